#include "fold.hpp"

#include "hedcheck/error.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace hedcheck {

using dfl::Expr;
using dfl::ExprPtr;
using dfl::Op;

const ListInput* AssignmentList::find_input(const std::string& name) const {
    for (const auto& i : inputs)
        if (i.name == name) return &i;
    return nullptr;
}

const ListOutput* AssignmentList::find_output(const std::string& external) const {
    for (const auto& o : outputs)
        if (o.external == external) return &o;
    return nullptr;
}

std::string element_name(const std::string& array, const BigInt& index) {
    const bool digit_end = !array.empty() && std::isdigit(static_cast<unsigned char>(array.back()));
    return array + (digit_end ? "_" : "") + index.str();
}

namespace {

BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b;  // truncates toward zero
    if ((a % b != 0) && ((a < 0) != (b < 0))) q -= 1;
    return q;
}

unsigned shift_amount(const BigInt& v) {
    if (v < 0) throw Error("negative shift or bit index");
    if (v > 65536) throw Error("shift amount too large");
    return static_cast<unsigned>(v);
}

} // namespace

std::optional<BigInt> eval_expr(const Expr& e, const std::function<std::optional<BigInt>(const Expr&)>& leaf) {
    switch (e.kind) {
    case Expr::Const:
        return e.value;
    case Expr::Name:
    case Expr::ArrayRef:
        return leaf(e);
    case Expr::BitSelect: {
        auto v = eval_expr(*e.args[0], leaf);
        auto i = eval_expr(*e.args[1], leaf);
        if (!v || !i) return std::nullopt;
        return mod_pow2(floor_div_pow2(*v, shift_amount(*i)), 1);
    }
    case Expr::Unary: {
        auto a = eval_expr(*e.args[0], leaf);
        if (!a) return std::nullopt;
        return e.op == Op::Neg ? BigInt(-*a) : BigInt(1 - *a);
    }
    case Expr::Ternary: {
        auto c = eval_expr(*e.args[0], leaf);
        if (!c) return std::nullopt;
        return eval_expr(*e.args[*c != 0 ? 1 : 2], leaf);
    }
    case Expr::Binary:
        break;
    }
    auto a = eval_expr(*e.args[0], leaf);
    if (!a) return std::nullopt;
    auto b = eval_expr(*e.args[1], leaf);
    if (!b) return std::nullopt;
    switch (e.op) {
    case Op::Add: return *a + *b;
    case Op::Sub: return *a - *b;
    case Op::Mul: return *a * *b;
    case Op::Div:
        if (*b == 0) throw Error("division by zero");
        return floor_div(*a, *b);
    case Op::Mod:
        if (*b == 0) throw Error("division by zero");
        return *a - *b * floor_div(*a, *b);
    case Op::Shl: return *a * pow2(shift_amount(*b));
    case Op::Shr: return floor_div_pow2(*a, shift_amount(*b));
    case Op::And: return *a & *b;
    case Op::Or: return *a | *b;
    case Op::Xor: return *a ^ *b;
    case Op::Eq: return BigInt(*a == *b ? 1 : 0);
    case Op::Ne: return BigInt(*a != *b ? 1 : 0);
    case Op::Lt: return BigInt(*a < *b ? 1 : 0);
    case Op::Le: return BigInt(*a <= *b ? 1 : 0);
    case Op::Gt: return BigInt(*a > *b ? 1 : 0);
    case Op::Ge: return BigInt(*a >= *b ? 1 : 0);
    default: break;
    }
    throw Error("bad binary operator");
}

namespace symsim {

std::optional<BigInt> fold(const Expr& e, const ConstEnv& env) {
    return eval_expr(e, [&](const Expr& leaf) -> std::optional<BigInt> {
        if (leaf.kind != Expr::Name) return std::nullopt;
        auto it = env.find(leaf.name);
        if (it == env.end()) return std::nullopt;
        return it->second;
    });
}

ExprPtr substitute(const ExprPtr& e, const ConstEnv& env, bool fold_subtrees) {
    if (e->kind == Expr::Const) return e;
    if (e->kind == Expr::Name) {
        auto it = env.find(e->name);
        if (it == env.end()) return e;
        auto c = std::make_shared<Expr>(*e);
        c->kind = Expr::Const;
        c->value = it->second;
        c->name.clear();
        return c;
    }
    auto n = std::make_shared<Expr>(*e);
    bool changed = false;
    for (auto& a : n->args) {
        ExprPtr s = substitute(a, env, fold_subtrees);
        changed |= s != a;
        a = s;
    }
    if (fold_subtrees && e->kind != Expr::ArrayRef) {
        ConstEnv none;
        if (auto v = fold(*n, none)) {
            auto c = std::make_shared<Expr>(*e);
            c->kind = Expr::Const;
            c->value = *v;
            c->args.clear();
            return c;
        }
    }
    return changed ? ExprPtr(n) : e;
}

} // namespace symsim

std::vector<ListInput> input_symbols(const dfl::Program& p) {
    std::vector<ListInput> out;
    for (const auto& d : p.decls) {
        if (!d.is_input()) continue;
        if (d.is_array())
            for (unsigned i = 0; i < *d.length; ++i) out.push_back({element_name(d.name, i), d.width});
        else
            out.push_back({d.name, d.width});
    }
    return out;
}

namespace {

class Interpreter {
public:
    Interpreter(const dfl::Program& p, std::size_t limit) : p_(p), limit_(limit) {}

    Valuation run(const Valuation& inputs) {
        for (const auto& in : input_symbols(p_)) {
            auto it = inputs.find(in.name);
            if (it == inputs.end()) throw Error("no value for input '" + in.name + "'");
            vals_[in.name] = it->second;
        }
        exec(p_.body);
        Valuation out;
        for (const auto& d : p_.decls) {
            if (!d.is_output()) continue;
            if (d.is_array()) {
                for (unsigned i = 0; i < *d.length; ++i) out[element_name(d.name, i)] = read(element_name(d.name, i));
            } else {
                out[d.name] = read(d.name);
            }
        }
        return out;
    }

private:
    BigInt read(const std::string& key) const {
        auto it = vals_.find(key);
        if (it == vals_.end()) throw Error("read of unassigned '" + key + "'");
        return it->second;
    }

    std::string element(const std::string& array, const Expr& index) {
        BigInt i = eval(index);
        const dfl::Decl* d = p_.find(array);
        if (i < 0 || i >= *d->length) throw Error("index " + i.str() + " out of range for '" + array + "'");
        return element_name(array, i);
    }

    BigInt eval(const Expr& e) {
        return *eval_expr(e, [&](const Expr& leaf) -> std::optional<BigInt> {
            if (leaf.kind == Expr::Name) return read(leaf.name);
            return read(element(leaf.name, *leaf.args[0]));
        });
    }

    void tick() {
        if (++steps_ > limit_) throw Error("step limit exceeded");
    }

    void exec(const std::vector<dfl::Stmt>& body) {
        for (const auto& s : body) {
            switch (s.kind) {
            case dfl::Stmt::Assign: {
                tick();
                BigInt v = eval(*s.rhs);
                vals_[s.target_index ? element(s.target, *s.target_index) : s.target] = v;
                break;
            }
            case dfl::Stmt::For:
                vals_[s.counter] = eval(*s.init);
                while (eval(*s.cond) != 0) {
                    tick();
                    exec(s.body);
                    vals_[s.counter] = eval(*s.step);
                }
                break;
            case dfl::Stmt::If:
                exec(eval(*s.guard) != 0 ? s.body : s.else_body);
                break;
            case dfl::Stmt::Cycle:
                break;
            }
        }
    }

    const dfl::Program& p_;
    std::size_t limit_;
    std::size_t steps_ = 0;
    std::map<std::string, BigInt> vals_;
};

} // namespace

Valuation interpret(const dfl::Program& p, const Valuation& inputs, std::size_t step_limit) {
    return Interpreter(p, step_limit).run(inputs);
}

Valuation interpret(const AssignmentList& list, const Valuation& inputs) {
    std::map<std::string, BigInt> vals;
    for (const auto& in : list.inputs) {
        auto it = inputs.find(in.name);
        if (it == inputs.end()) throw Error("no value for input '" + in.name + "'");
        vals[in.name] = it->second;
    }
    auto leaf = [&](const Expr& e) -> std::optional<BigInt> {
        auto it = vals.find(e.name);
        if (e.kind != Expr::Name || it == vals.end()) throw Error("read of undefined '" + e.name + "'");
        return it->second;
    };
    for (const auto& s : list.stmts) vals[s.lhs] = *eval_expr(*s.rhs, leaf);
    Valuation out;
    for (const auto& o : list.outputs) {
        auto it = vals.find(o.ssa);
        if (it == vals.end()) throw Error("output '" + o.external + "' has no value");
        out[o.external] = it->second;
    }
    return out;
}

std::string format_list(const AssignmentList& list) {
    std::ostringstream out;
    int cycle = list.stmts.empty() ? 0 : list.stmts.front().cycle;
    for (const auto& s : list.stmts) {
        if (s.cycle != cycle) {
            out << "cycle;\n";
            cycle = s.cycle;
        }
        out << s.lhs << " := " << dfl::to_string(*s.rhs) << ";\n";
    }
    return out.str();
}

std::string to_dfl(const AssignmentList& list) {
    std::ostringstream out;
    auto width = [](const std::optional<unsigned>& w) { return w ? ":u" + std::to_string(*w) : std::string(); };
    std::set<std::string> output_names;
    for (const auto& o : list.outputs) output_names.insert(o.external);
    for (const auto& in : list.inputs)
        out << (output_names.contains(in.name) ? "inout " : "input ") << in.name << width(in.width) << ";\n";
    for (const auto& o : list.outputs)
        if (!list.find_input(o.external)) out << "output " << o.external << width(o.width) << ";\n";
    out << "\n" << format_list(list);
    for (const auto& o : list.outputs)
        if (o.ssa != o.external) out << o.external << " := " << o.ssa << ";\n";
    return out.str();
}

} // namespace hedcheck
