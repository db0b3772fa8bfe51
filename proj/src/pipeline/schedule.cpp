#include "hedcheck/pipeline.hpp"

#include "hedcheck/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace hedcheck {

using dfl::Expr;
using dfl::ExprPtr;
using dfl::Op;

namespace {

constexpr std::pair<OpClass, const char*> kClassNames[] = {
    {OpClass::Add, "add"},         {OpClass::Mul, "mul"}, {OpClass::Shift, "shift"}, {OpClass::Logic, "logic"},
    {OpClass::Compare, "compare"}, {OpClass::Mux, "mux"}, {OpClass::Move, "move"},
};

OpClass class_of(const Expr& e) {
    switch (e.kind) {
    case Expr::Const:
    case Expr::Name:
    case Expr::ArrayRef: return OpClass::Move;
    case Expr::BitSelect: return OpClass::Logic;
    case Expr::Ternary: return OpClass::Mux;
    case Expr::Unary: return e.op == Op::Neg ? OpClass::Add : OpClass::Logic;
    case Expr::Binary: break;
    }
    switch (e.op) {
    case Op::Add:
    case Op::Sub: return OpClass::Add;
    case Op::Mul: return OpClass::Mul;
    case Op::Div:
    case Op::Mod:
    case Op::Shl:
    case Op::Shr: return OpClass::Shift;
    case Op::And:
    case Op::Or:
    case Op::Xor: return OpClass::Logic;
    default: return OpClass::Compare;
    }
}

// Name stem of a single-operator statement.
const char* stem(const Expr& e) {
    switch (e.kind) {
    case Expr::BitSelect: return "bit";
    case Expr::Ternary: return "mux";
    case Expr::Unary: return e.op == Op::Neg ? "neg" : "not";
    case Expr::Binary: break;
    default: return "mov";
    }
    switch (e.op) {
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::Mod: return "mod";
    case Op::Shl: return "shl";
    case Op::Shr: return "shr";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Xor: return "xor";
    default: return "cmp";
    }
}

bool is_leaf(const Expr& e) { return e.kind == Expr::Const || e.kind == Expr::Name; }

struct TacOp {
    std::string name;
    ExprPtr rhs;
    OpClass cls;
    int group;
    std::vector<std::string> reads;
};

class ThreeAddress {
public:
    explicit ThreeAddress(const AssignmentList& list) {
        for (const auto& in : list.inputs) used_.insert(in.name);
        for (const auto& s : list.stmts) {
            group_ = s.group;
            ExprPtr v = is_leaf(*s.rhs) ? emit(rename(s.rhs)) : lower(s.rhs);
            renamed_[s.lhs] = v->name;
        }
    }

    std::vector<TacOp> ops;

    std::string renamed(const std::string& name) const {
        auto it = renamed_.find(name);
        return it == renamed_.end() ? name : it->second;
    }

private:
    ExprPtr rename(const ExprPtr& leaf) const {
        if (leaf->kind != Expr::Name) return leaf;
        return dfl::make_name(renamed(leaf->name));
    }

    ExprPtr lower(const ExprPtr& e) {
        if (is_leaf(*e)) return rename(e);
        auto n = std::make_shared<Expr>(*e);
        for (std::size_t i = 0; i < n->args.size(); ++i)
            if (!(e->kind == Expr::BitSelect && i == 1)) n->args[i] = lower(n->args[i]);
        return emit(n);
    }

    ExprPtr emit(const ExprPtr& rhs) {
        const char* s = stem(*rhs);
        std::string name;
        do {
            name = s + std::to_string(next_[s]++);
        } while (used_.contains(name));
        used_.insert(name);
        TacOp op{name, rhs, class_of(*rhs), group_, {}};
        for (const auto& a : rhs->args)
            if (a->kind == Expr::Name) op.reads.push_back(a->name);
        if (rhs->kind == Expr::Name) op.reads.push_back(rhs->name);
        ops.push_back(std::move(op));
        return dfl::make_name(name);
    }

    std::set<std::string> used_;
    std::map<std::string, unsigned> next_;
    std::unordered_map<std::string, std::string> renamed_;
    int group_ = 0;
};

// Iteration rank of every op: groups numbered in order of first appearance.
std::vector<int> ranks(const std::vector<TacOp>& ops) {
    std::map<int, int> rank;
    std::vector<int> out;
    for (const auto& op : ops) {
        auto it = rank.try_emplace(op.group, int(rank.size())).first;
        out.push_back(it->second);
    }
    return out;
}

unsigned res_mii_of(const std::vector<TacOp>& ops, const LatencyModel& lm) {
    const auto r = ranks(ops);
    std::map<std::pair<int, OpClass>, unsigned> count;
    for (std::size_t i = 0; i < ops.size(); ++i) ++count[{r[i], ops[i].cls}];
    unsigned mii = 1;
    for (const auto& [key, n] : count)
        if (auto u = lm.units_of(key.second)) mii = std::max(mii, (n + *u - 1) / *u);
    return mii;
}

} // namespace

const char* op_class_name(OpClass c) {
    for (const auto& [k, n] : kClassNames)
        if (k == c) return n;
    return "?";
}

std::optional<OpClass> parse_op_class(const std::string& name) {
    for (const auto& [k, n] : kClassNames)
        if (name == n) return k;
    return std::nullopt;
}

unsigned LatencyModel::latency_of(OpClass c) const {
    auto it = latency.find(c);
    return it == latency.end() ? 1u : it->second;
}

std::optional<unsigned> LatencyModel::units_of(OpClass c) const {
    auto it = units.find(c);
    if (it == units.end()) return std::nullopt;
    return it->second;
}

LatencyModel LatencyModel::standard() {
    LatencyModel lm;
    for (const auto& [k, n] : kClassNames) lm.latency[k] = 1;
    lm.latency[OpClass::Mul] = 2;
    return lm;
}

LatencyModel LatencyModel::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("latency model: ") + e.what());
    }
    if (!j.is_object()) throw Error("latency model: expected a JSON object");
    LatencyModel lm = standard();
    auto read = [&](const char* field, std::map<OpClass, unsigned>& into) {
        if (!j.contains(field)) return;
        if (!j[field].is_object()) throw Error(std::string("latency model: '") + field + "' must be an object");
        for (const auto& [key, value] : j[field].items()) {
            auto c = parse_op_class(key);
            if (!c) throw Error("latency model: unknown operator class '" + key + "'");
            if (!value.is_number_unsigned() || value.get<unsigned>() < 1)
                throw Error("latency model: " + key + " needs a positive integer");
            into[*c] = value.get<unsigned>();
        }
    };
    read("latency", lm.latency);
    read("units", lm.units);
    for (const auto& [key, value] : j.items())
        if (key != "latency" && key != "units") throw Error("latency model: unknown field '" + key + "'");
    return lm;
}

LatencyModel LatencyModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open latency model '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

unsigned resource_mii(const AssignmentList& list, const LatencyModel& lm) {
    return res_mii_of(ThreeAddress(list).ops, lm);
}

Pipelined pipeline_transform(const AssignmentList& list, const LatencyModel& lm, unsigned ii) {
    ThreeAddress tac(list);
    const auto& ops = tac.ops;
    Schedule sched;
    sched.ii = ii;
    sched.res_mii = res_mii_of(ops, lm);
    if (ii < 1) throw Error("II must be at least 1");
    if (ii < sched.res_mii)
        throw Error("II " + std::to_string(ii) + " is infeasible under the resource limits; minimum feasible II is " +
                    std::to_string(sched.res_mii));

    const auto rank = ranks(ops);
    std::unordered_map<std::string, std::size_t> index;
    std::vector<unsigned> start(ops.size());
    std::map<std::pair<OpClass, unsigned>, unsigned> busy;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        unsigned t = unsigned(rank[i]) * ii;
        for (const auto& r : ops[i].reads)
            if (auto it = index.find(r); it != index.end())
                t = std::max(t, start[it->second] + lm.latency_of(ops[it->second].cls));
        if (auto u = lm.units_of(ops[i].cls))
            while (busy[{ops[i].cls, t}] >= *u) ++t;
        ++busy[{ops[i].cls, t}];
        start[i] = t;
        index.emplace(ops[i].name, i);
        sched.length = std::max(sched.length, t + lm.latency_of(ops[i].cls));
    }

    // Issue order; same-cycle ops are independent, so ties keep list order.
    std::vector<std::size_t> order(ops.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return start[a] < start[b]; });

    Pipelined out;
    out.list.inputs = list.inputs;
    out.list.assumptions = list.assumptions;
    std::set<std::string> booleans;
    for (const auto& in : list.inputs)
        if (in.width == 1u) booleans.insert(in.name);
    auto pred = [&](const Expr& e) { return booleans.contains(e.name); };
    for (std::size_t i : order) {
        const TacOp& op = ops[i];
        ListStmt s{op.name, op.rhs, op.group, int(start[i]), dfl::is_boolean(*op.rhs, pred)};
        if (s.boolean) booleans.insert(s.lhs);
        out.list.stmts.push_back(std::move(s));
        sched.ops.push_back({op.name, op.cls, rank[i], start[i], lm.latency_of(op.cls), op.reads});
    }
    for (const auto& o : list.outputs) out.list.outputs.push_back({o.external, tac.renamed(o.ssa), o.width});
    out.schedule = std::move(sched);
    return out;
}

std::string audit_schedule(const Schedule& s, const LatencyModel& lm) {
    std::ostringstream err;
    std::unordered_map<std::string, const ScheduledOp*> by_name;
    std::map<std::pair<OpClass, unsigned>, unsigned> busy;
    for (const auto& op : s.ops) {
        for (const auto& r : op.reads) {
            auto it = by_name.find(r);
            if (it == by_name.end()) continue;
            if (op.cycle < it->second->cycle + it->second->latency)
                err << op.name << " issues at " << op.cycle << " before " << r << " is ready at "
                    << it->second->cycle + it->second->latency << "\n";
        }
        if (op.cycle < unsigned(op.iteration) * s.ii)
            err << op.name << " issues at " << op.cycle << " before its iteration starts\n";
        if (auto u = lm.units_of(op.cls); u && ++busy[{op.cls, op.cycle}] > *u)
            err << "cycle " << op.cycle << " uses more than " << *u << " " << op_class_name(op.cls) << " units\n";
        by_name.emplace(op.name, &op);
    }
    for (const auto& op : s.ops)
        for (const auto& r : op.reads)
            if (by_name.contains(r) && by_name.at(r) > &op) err << op.name << " precedes its operand " << r << "\n";
    return err.str();
}

} // namespace hedcheck
