#include "hedcheck/pipeline.hpp"

#include "hedcheck/error.hpp"

#include <random>
#include <regex>
#include <set>

namespace hedcheck {

using dfl::Expr;
using dfl::ExprPtr;
using dfl::Op;

namespace {

using Kind = MutationDescriptor::Kind;

struct Site {
    Kind kind;
    std::size_t stmt;
    int node = -1;  // preorder position inside the rhs
    std::string replacement;  // drops only
};

bool commutes(Op op) { return op == Op::Add || op == Op::Mul || op == Op::And || op == Op::Or || op == Op::Xor; }

// Collects mutation sites of one rhs in preorder.
void sites(const Expr& e, std::size_t stmt, int& counter, std::vector<Site>& out, bool fixed_const = false) {
    const int me = counter++;
    if (e.kind == Expr::Const && !fixed_const) out.push_back({Kind::ConstantPerturb, stmt, me, {}});
    if (e.kind == Expr::Binary) {
        if (e.op == Op::Add || e.op == Op::Sub || e.op == Op::Mul) out.push_back({Kind::OperatorSwap, stmt, me, {}});
        const bool relational = e.op == Op::Lt || e.op == Op::Gt || e.op == Op::Le || e.op == Op::Ge;
        if ((e.op == Op::Sub || relational) && !commutes(e.op) &&
            dfl::to_string(*e.args[0]) != dfl::to_string(*e.args[1]))
            out.push_back({Kind::OperandSwap, stmt, me, {}});
    }
    // Shift amounts, bit indices and power-of-two divisors must stay as they are.
    const bool fixed_second = e.kind == Expr::BitSelect ||
                              (e.kind == Expr::Binary && (e.op == Op::Shl || e.op == Op::Shr || e.op == Op::Div ||
                                                          e.op == Op::Mod));
    for (std::size_t i = 0; i < e.args.size(); ++i) sites(*e.args[i], stmt, counter, out, fixed_second && i == 1);
}

template <class F>
ExprPtr rewrite_at(const ExprPtr& e, int& counter, int target, const F& f) {
    if (counter++ == target) return f(e);
    if (e->args.empty()) return e;
    auto n = std::make_shared<Expr>(*e);
    for (auto& a : n->args) a = rewrite_at(a, counter, target, f);
    return n;
}

ExprPtr rename_reads(const ExprPtr& e, const std::string& from, const std::string& to) {
    if (e->kind == Expr::Name) return e->name == from ? dfl::make_name(to) : e;
    if (e->args.empty()) return e;
    auto n = std::make_shared<Expr>(*e);
    for (auto& a : n->args) a = rename_reads(a, from, to);
    return n;
}

void first_name(const Expr& e, std::string& out) {
    if (!out.empty()) return;
    if (e.kind == Expr::Name) out = e.name;
    for (const auto& a : e.args) first_name(*a, out);
}

// What readers of a dropped statement see instead: the previous version of
// the same variable, else the first name the statement read.
std::string replacement(const AssignmentList& list, std::size_t k) {
    static const std::regex versioned("(.*)_[0-9]+");
    std::smatch m;
    const std::string& lhs = list.stmts[k].lhs;
    if (std::regex_match(lhs, m, versioned)) {
        const std::string base = m[1];
        for (std::size_t i = k; i-- > 0;)
            if (std::regex_match(list.stmts[i].lhs, m, versioned) && m[1] == base) return list.stmts[i].lhs;
        if (list.find_input(base)) return base;
    }
    std::string n;
    first_name(*list.stmts[k].rhs, n);
    return n;
}

bool is_flag(const AssignmentList& list, std::size_t before, const std::string& name) {
    for (std::size_t i = before; i-- > 0;)
        if (list.stmts[i].lhs == name) return list.stmts[i].boolean;
    const auto* in = list.find_input(name);
    return in && in->width == 1u;
}

} // namespace

const char* mutation_kind_name(MutationDescriptor::Kind k) {
    switch (k) {
    case Kind::OperatorSwap: return "operator-swap";
    case Kind::ConstantPerturb: return "constant-perturb";
    case Kind::OperandSwap: return "operand-swap";
    case Kind::StatementDrop: return "statement-drop";
    }
    return "?";
}

std::string MutationDescriptor::text() const {
    if (kind == Kind::StatementDrop)
        return std::string(mutation_kind_name(kind)) + " at statement " + std::to_string(stmt) + ": " + lhs +
               " := " + before + " removed, readers use " + after;
    return std::string(mutation_kind_name(kind)) + " at statement " + std::to_string(stmt) + ": " + lhs + " := " +
           before + "  =>  " + after;
}

std::pair<AssignmentList, MutationDescriptor> mutate(const AssignmentList& list, std::uint64_t seed) {
    if (list.stmts.empty()) throw Error("cannot mutate an empty assignment list");
    std::vector<Site> by_kind[4];
    for (std::size_t k = 0; k < list.stmts.size(); ++k) {
        std::vector<Site> found;
        int counter = 0;
        sites(*list.stmts[k].rhs, k, counter, found);
        for (auto& s : found) by_kind[s.kind].push_back(std::move(s));
        // Dropping a plain copy changes nothing.
        const auto kind = list.stmts[k].rhs->kind;
        if (kind == Expr::Name || kind == Expr::Const) continue;
        std::string r = replacement(list, k);
        // A 1-bit statement must be replaced by a 1-bit value, and a word by a word.
        if (!r.empty() && is_flag(list, k, r) == list.stmts[k].boolean)
            by_kind[Kind::StatementDrop].push_back({Kind::StatementDrop, k, -1, r});
    }
    std::vector<int> kinds;
    for (int k = 0; k < 4; ++k)
        if (!by_kind[k].empty()) kinds.push_back(k);
    if (kinds.empty()) throw Error("assignment list offers nothing to mutate");

    std::mt19937_64 rng(seed);
    const auto& pool = by_kind[kinds[rng() % kinds.size()]];
    const Site site = pool[rng() % pool.size()];

    AssignmentList out = list;
    MutationDescriptor d;
    d.kind = site.kind;
    d.stmt = site.stmt;
    d.lhs = list.stmts[site.stmt].lhs;
    d.before = dfl::to_string(*list.stmts[site.stmt].rhs);

    if (site.kind == Kind::StatementDrop) {
        d.after = site.replacement;
        out.stmts.erase(out.stmts.begin() + std::ptrdiff_t(site.stmt));
        for (std::size_t i = site.stmt; i < out.stmts.size(); ++i)
            out.stmts[i].rhs = rename_reads(out.stmts[i].rhs, d.lhs, site.replacement);
        for (auto& o : out.outputs)
            if (o.ssa == d.lhs) o.ssa = site.replacement;
        return {out, d};
    }

    const bool up = rng() % 2 == 0;
    int counter = 0;
    ListStmt& s = out.stmts[site.stmt];
    s.rhs = rewrite_at(s.rhs, counter, site.node, [&](const ExprPtr& e) -> ExprPtr {
        auto n = std::make_shared<Expr>(*e);
        switch (site.kind) {
        case Kind::OperatorSwap:
            n->op = e->op == Op::Add ? Op::Sub : Op::Add;
            break;
        case Kind::ConstantPerturb:
            n->value += up ? 1 : -1;
            break;
        case Kind::OperandSwap:
            std::swap(n->args[0], n->args[1]);
            break;
        case Kind::StatementDrop:
            break;
        }
        return n;
    });
    d.after = dfl::to_string(*s.rhs);
    return {out, d};
}

} // namespace hedcheck
