#include "hedcheck/sec.hpp"

#include "hedcheck/error.hpp"

namespace hedcheck {

using dfl::Expr;
using dfl::Op;

VarId ExprBuilder::input(const std::string& name, std::optional<unsigned> bits) {
    if (auto it = inputs_.find(name); it != inputs_.end()) return it->second;
    if (m_.find_var(name)) throw Error("input name '" + name + "' clashes with an internal variable");
    VarId v = m_.add_var(name, bits);
    inputs_.emplace(name, v);
    return v;
}

HedRef ExprBuilder::input_ref(const std::string& name) {
    auto it = inputs_.find(name);
    if (it == inputs_.end()) throw Error("unknown input '" + name + "'");
    return slicer_.expansion(m_, it->second);
}

void ExprBuilder::prescan(const AssignmentList& list) {
    for (const auto& in : list.inputs) input(in.name, in.width);
    std::function<void(const Expr&)> scan = [&](const Expr& e) {
        if (e.kind == Expr::BitSelect && e.args[0]->kind == Expr::Name && is_input(e.args[0]->name) &&
            e.args[1]->kind == Expr::Const && e.args[1]->value >= 0 && e.args[1]->value < 65536)
            slicer_.select(m_, inputs_.at(e.args[0]->name), static_cast<unsigned>(e.args[1]->value));
        for (const auto& a : e.args) scan(*a);
    };
    for (const auto& s : list.stmts) scan(*s.rhs);
}

void ExprBuilder::note(const std::string& msg) {
    if (notes_.insert(msg).second) inexact.push_back(msg);
}

const HedRef& ExprBuilder::opaque(const HedRef& operand, const std::string& where) {
    if (!modular_cuts.empty())
        for (VarId v : m_.support(operand))
            if (modular_cuts.contains(v))
                note(where + ": non-polynomial operator over '" + m_.var_name(v) +
                     "', which is only known modulo the datapath width");
    return operand;
}

HedRef ExprBuilder::build(const Expr& e, const Lookup& lookup, const IsBool& is_bool, const std::string& where) {
    return rec(e, lookup, is_bool, where);
}

namespace {

unsigned constant_amount(const Expr& e, const char* what) {
    if (e.kind != Expr::Const || e.value < 0 || e.value > 65536)
        throw Error(std::string(what) + " must be a small non-negative constant, got '" + dfl::to_string(e) + "'");
    return static_cast<unsigned>(e.value);
}

// Exponent n when v == 2^n.
std::optional<unsigned> log2_exact(const BigInt& v) {
    if (v <= 0) return std::nullopt;
    unsigned n = two_adic_valuation(v);
    if (v != pow2(n)) return std::nullopt;
    return n;
}

} // namespace

HedRef ExprBuilder::rec(const Expr& e, const Lookup& lookup, const IsBool& is_bool, const std::string& where) {
    auto sub = [&](std::size_t i) { return rec(*e.args[i], lookup, is_bool, where); };
    switch (e.kind) {
    case Expr::Const:
        return m_.mk_const(e.value);
    case Expr::Name:
        return lookup(e.name);
    case Expr::ArrayRef:
        throw Error(where + ": array reference '" + e.name + "' in an assignment list");
    case Expr::BitSelect: {
        unsigned i = constant_amount(*e.args[1], "bit index");
        if (e.args[0]->kind == Expr::Name && is_input(e.args[0]->name))
            return slicer_.select(m_, inputs_.at(e.args[0]->name), i);
        HedRef v = sub(0);
        if (auto c = m_.constant_value(v)) return m_.mk_const(mod_pow2(floor_div_pow2(*c, i), 1));
        return m_.mk_var(atoms_.get(m_, AtomKind::BitOf, opaque(v, where), i));
    }
    case Expr::Unary:
        return e.op == Op::Neg ? m_.neg(sub(0)) : b_not(m_, sub(0));
    case Expr::Ternary: {
        auto pred = [&](const Expr& n) { return is_bool(n.name); };
        HedRef c = sub(0);
        if (!dfl::is_boolean(*e.args[0], pred)) c = b_not(m_, eq_zero(m_, atoms_, opaque(c, where)));
        return ite(m_, c, sub(1), sub(2));
    }
    case Expr::Binary:
        break;
    }
    switch (e.op) {
    case Op::Add: return m_.add(sub(0), sub(1));
    case Op::Sub: return m_.sub(sub(0), sub(1));
    case Op::Mul: return m_.mul(sub(0), sub(1));
    case Op::Shl: return shl(m_, sub(0), constant_amount(*e.args[1], "shift amount"));
    case Op::Shr:
    case Op::Div:
    case Op::Mod: {
        unsigned n;
        if (e.op == Op::Shr) {
            n = constant_amount(*e.args[1], "shift amount");
        } else {
            auto k = e.args[1]->kind == Expr::Const ? log2_exact(e.args[1]->value) : std::nullopt;
            if (!k) throw Error(where + ": division only by constant powers of two, got '" + dfl::to_string(e) + "'");
            n = *k;
        }
        HedRef a = sub(0);
        DivResult q = div_pow2(m_, atoms_, a, n);
        if (q.inexact) {
            opaque(a, where);
            note(where + ": floor division by 2^" + std::to_string(n) + " kept as an opaque term");
        }
        if (e.op == Op::Mod) return m_.sub(a, shl(m_, q.value, n));
        return q.value;
    }
    case Op::And: return b_and(m_, sub(0), sub(1));
    case Op::Or: return b_or(m_, sub(0), sub(1));
    case Op::Xor: return b_xor(m_, sub(0), sub(1));
    default: break;
    }
    // Relations compare a difference against zero.
    const HedRef a = sub(0);
    const HedRef b = sub(1);
    const bool swap = e.op == Op::Gt || e.op == Op::Le;
    const HedRef d = swap ? m_.sub(b, a) : m_.sub(a, b);
    opaque(d, where);
    switch (e.op) {
    case Op::Eq: return eq_zero(m_, atoms_, d);
    case Op::Ne: return b_not(m_, eq_zero(m_, atoms_, d));
    case Op::Lt:
    case Op::Gt: return lt_zero(m_, atoms_, d);
    case Op::Le:
    case Op::Ge: return b_not(m_, lt_zero(m_, atoms_, d));
    default: break;
    }
    throw Error(where + ": unsupported operator");
}

std::map<std::string, HedRef> substitute_outputs(ExprBuilder& b, const AssignmentList& list) {
    b.prescan(list);
    std::unordered_map<std::string, HedRef> env;
    std::set<std::string> booleans;
    for (const auto& in : list.inputs)
        if (in.width == 1u) booleans.insert(in.name);
    auto lookup = [&](const std::string& n) {
        auto it = env.find(n);
        return it != env.end() ? it->second : b.input_ref(n);
    };
    auto is_bool = [&](const std::string& n) { return booleans.contains(n); };
    for (const auto& s : list.stmts) {
        env[s.lhs] = b.build(*s.rhs, lookup, is_bool, s.lhs);
        if (s.boolean) booleans.insert(s.lhs);
    }
    std::map<std::string, HedRef> out;
    for (const auto& o : list.outputs) out[o.external] = lookup(o.ssa);
    return out;
}

} // namespace hedcheck
