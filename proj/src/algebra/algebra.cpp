#include "hedcheck/algebra.hpp"

#include "hedcheck/error.hpp"

#include <functional>

namespace hedcheck {

HedRef b_not(Manager& m, const HedRef& a) { return m.sub(m.one(), a); }

HedRef b_and(Manager& m, const HedRef& a, const HedRef& b) { return m.mul(a, b); }

HedRef b_or(Manager& m, const HedRef& a, const HedRef& b) { return m.sub(m.add(a, b), m.mul(a, b)); }

HedRef b_xor(Manager& m, const HedRef& a, const HedRef& b) {
    return m.sub(m.add(a, b), m.scale(m.mul(a, b), 2));
}

HedRef shl(Manager& m, const HedRef& a, unsigned n) { return m.scale(a, pow2(n)); }

HedRef ite(Manager& m, const HedRef& c, const HedRef& t, const HedRef& e) {
    return m.add(e, m.mul(c, m.sub(t, e)));
}

// --- atoms ------------------------------------------------------------------

VarId AtomTable::get(Manager& m, AtomKind kind, const HedRef& operand, unsigned amount) {
    Key key{kind, amount, operand.weight, operand.node};
    if (auto it = index_.find(key); it != index_.end()) return atoms_[it->second].var;

    std::string name;
    std::optional<unsigned> bits;
    const auto n = atoms_.size();
    switch (kind) {
    case AtomKind::ShiftRight:
        if (auto tv = m.top_var(operand); tv && operand == m.mk_var(*tv))
            name = m.var_name(*tv) + ">>" + std::to_string(amount);
        else
            name = "$shr" + std::to_string(n) + ">>" + std::to_string(amount);
        break;
    case AtomKind::BitOf:
        name = "$bit" + std::to_string(n) + "[" + std::to_string(amount) + "]";
        bits = 1;
        break;
    case AtomKind::EqZero:
        name = "$eq" + std::to_string(n);
        bits = 1;
        break;
    case AtomKind::LtZero:
        name = "$lt" + std::to_string(n);
        bits = 1;
        break;
    }
    while (m.find_var(name)) name += "'";
    VarId v = m.add_var(name, bits);
    index_.emplace(key, atoms_.size());
    by_var_.emplace(v, atoms_.size());
    atoms_.push_back(Atom{kind, operand, amount, v});
    return v;
}

const Atom* AtomTable::find(VarId v) const {
    auto it = by_var_.find(v);
    return it == by_var_.end() ? nullptr : &atoms_[it->second];
}

std::vector<HedRef> AtomTable::roots() const {
    std::vector<HedRef> r;
    r.reserve(atoms_.size());
    for (const auto& a : atoms_) r.push_back(a.operand);
    return r;
}

BigInt AtomTable::apply(AtomKind kind, const BigInt& operand, unsigned amount) {
    switch (kind) {
    case AtomKind::ShiftRight:
        return floor_div_pow2(operand, amount);
    case AtomKind::BitOf: {
        BigInt q = floor_div_pow2(operand, amount);
        return mod_pow2(q, 1);
    }
    case AtomKind::EqZero:
        return operand == 0 ? 1 : 0;
    case AtomKind::LtZero:
        return operand < 0 ? 1 : 0;
    }
    return 0;
}

// --- division by 2^n --------------------------------------------------------

DivResult div_pow2(Manager& m, AtomTable& atoms, const HedRef& a, unsigned n) {
    if (n == 0 || a.is_zero()) return {a, false};
    // A normalized node has content 1, so w * node is divisible iff w is.
    if (divisible_by_pow2(a.weight, n)) return {HedRef{a.weight >> n, a.node}, false};

    // Split 2^k * node (k < n) into (divisible part, non-divisible part).
    using Split = std::pair<HedRef, HedRef>;
    std::map<std::pair<NodeId, unsigned>, Split> memo;
    std::function<Split(NodeId, unsigned)> split = [&](NodeId node, unsigned k) -> Split {
        if (node == kOneNode) return {m.zero(), m.mk_const(pow2(k))};
        if (auto it = memo.find({node, k}); it != memo.end()) return it->second;
        VarId x = m.node_var(node);
        auto part = [&](const HedRef& edge) -> Split {
            if (edge.is_zero()) return {m.zero(), m.zero()};
            BigInt w = edge.weight * pow2(k);
            unsigned v = two_adic_valuation(w);
            if (v >= n) return {HedRef{w, edge.node}, m.zero()};
            BigInt odd = w >> v;
            Split s = split(edge.node, v);
            return {m.scale(s.first, odd), m.scale(s.second, odd)};
        };
        Split lo = part(m.const_edge(node));
        Split hi = part(m.linear_edge(node));
        Split res{m.mk_node(x, lo.first, hi.first), m.mk_node(x, lo.second, hi.second)};
        memo.emplace(std::make_pair(node, k), res);
        return res;
    };

    unsigned v = two_adic_valuation(a.weight);
    BigInt odd = a.weight >> v;
    Split s = split(a.node, v);
    HedRef divisible = m.scale(s.first, odd);
    HedRef rest = m.scale(s.second, odd);
    HedRef q = divisible.is_zero() ? m.zero() : HedRef{divisible.weight >> n, divisible.node};
    VarId token = atoms.get(m, AtomKind::ShiftRight, rest, n);
    return {m.add(q, m.mk_var(token)), true};
}

// --- predicates -------------------------------------------------------------

HedRef eq_zero(Manager& m, AtomTable& atoms, const HedRef& diff) {
    if (auto c = m.constant_value(diff)) return m.mk_const(*c == 0 ? 1 : 0);
    // diff == 0 iff diff / w == 0
    return m.mk_var(atoms.get(m, AtomKind::EqZero, HedRef{1, diff.node}));
}

HedRef lt_zero(Manager& m, AtomTable& atoms, const HedRef& diff) {
    if (auto c = m.constant_value(diff)) return m.mk_const(*c < 0 ? 1 : 0);
    return m.mk_var(atoms.get(m, AtomKind::LtZero, HedRef{diff.weight.sign(), diff.node}));
}

// --- bit slicing --------------------------------------------------------------

const BitSlice& BitSlicer::decompose(Manager& m, VarId v, unsigned i) {
    if (auto it = slices_.find(v); it != slices_.end()) {
        if (it->second.index != i)
            throw Error("variable '" + m.var_name(v) + "' already split at bit " + std::to_string(it->second.index) +
                        ", cannot split at bit " + std::to_string(i));
        return it->second;
    }
    const auto& info = m.var_info(v);
    std::optional<unsigned> hi_bits;
    if (info.bits) hi_bits = *info.bits > i + 1 ? *info.bits - i - 1 : 0;
    const std::string base = info.name;
    const std::string sfx = std::to_string(i);
    VarId hi = m.add_var(base + ".hi" + sfx, hi_bits);
    VarId bit = m.add_var(base + "[" + sfx + "]", 1u);
    VarId lo = m.add_var(base + ".lo" + sfx, i);
    return slices_.emplace(v, BitSlice{hi, bit, lo, i}).first->second;
}

HedRef BitSlicer::select(Manager& m, VarId v, unsigned i) {
    if (auto bits = m.var_info(v).bits; bits && i >= *bits) return m.zero();
    if (m.var_info(v).bits == 1u) return m.mk_var(v);
    auto it = slices_.find(v);
    if (it == slices_.end()) return m.mk_var(decompose(m, v, i).bit);
    const BitSlice s = it->second;
    if (i == s.index) return m.mk_var(s.bit);
    if (i > s.index) return select(m, s.hi, i - s.index - 1);
    return select(m, s.lo, i);
}

const BitSlice* BitSlicer::slice(VarId v) const {
    auto it = slices_.find(v);
    return it == slices_.end() ? nullptr : &it->second;
}

HedRef BitSlicer::expansion(Manager& m, VarId v) const {
    auto it = slices_.find(v);
    if (it == slices_.end()) return m.mk_var(v);
    const BitSlice& s = it->second;
    HedRef r = m.scale(expansion(m, s.hi), pow2(s.index + 1));
    r = m.add(r, m.scale(m.mk_var(s.bit), pow2(s.index)));
    return m.add(r, expansion(m, s.lo));
}

HedRef BitSlicer::rewrite(Manager& m, const HedRef& r) const {
    std::unordered_map<VarId, HedRef> subst;
    for (VarId v : m.support(r))
        if (slices_.contains(v)) subst.emplace(v, expansion(m, v));
    if (subst.empty()) return r;
    return m.compose(r, subst);
}

} // namespace hedcheck
