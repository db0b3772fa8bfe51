#include "hedcheck/hed.hpp"

#include "hedcheck/error.hpp"

#include <algorithm>
#include <sstream>

namespace hedcheck {

namespace {

inline void hash_combine(std::size_t& seed, std::size_t v) {
    seed ^= v + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2);
}

inline std::size_t hash_big(const BigInt& v) { return std::hash<BigInt>{}(v); }

HedRef make_ref(BigInt w, NodeId n) {
    if (w == 0) return HedRef{0, kZeroNode};
    return HedRef{std::move(w), n};
}

} // namespace

std::size_t HedRefHash::operator()(const HedRef& r) const noexcept {
    std::size_t seed = hash_big(r.weight);
    hash_combine(seed, r.node);
    return seed;
}

std::size_t Manager::NodeKeyHash::operator()(const NodeKey& k) const noexcept {
    std::size_t seed = k.var;
    hash_combine(seed, hash_big(k.lo_w));
    hash_combine(seed, k.lo);
    hash_combine(seed, hash_big(k.hi_w));
    hash_combine(seed, k.hi);
    return seed;
}

std::size_t Manager::AddKeyHash::operator()(const AddKey& k) const noexcept {
    std::size_t seed = hash_big(k.wa);
    hash_combine(seed, k.a);
    hash_combine(seed, hash_big(k.wb));
    hash_combine(seed, k.b);
    return seed;
}

Manager::Manager() {
    // Terminals: slot 0 is the 0-terminal, slot 1 the 1-terminal.
    slots_.resize(2);
    slots_[kZeroNode].alive = true;
    slots_[kOneNode].alive = true;
    live_ = peak_ = 2;
}

VarId Manager::add_var(const std::string& name, std::optional<unsigned> bits) {
    if (var_by_name_.contains(name)) throw Error("variable '" + name + "' already registered");
    VarId v{static_cast<std::uint32_t>(vars_.size())};
    vars_.push_back(VarInfo{name, bits});
    var_by_name_.emplace(name, v);
    return v;
}

std::optional<VarId> Manager::find_var(const std::string& name) const {
    auto it = var_by_name_.find(name);
    if (it == var_by_name_.end()) return std::nullopt;
    return it->second;
}

const VarInfo& Manager::var_info(VarId v) const {
    if (index(v) >= vars_.size()) throw Error("unknown variable id " + std::to_string(index(v)));
    return vars_[index(v)];
}

HedRef Manager::mk_const(const BigInt& v) const { return make_ref(v, kOneNode); }

HedRef Manager::mk_var(VarId v) {
    var_info(v);
    return mk_node(v, zero(), one());
}

NodeId Manager::intern(NodeKey key) {
    if (auto it = unique_.find(key); it != unique_.end()) return it->second;
    NodeId id;
    if (!free_.empty()) {
        id = free_.back();
        free_.pop_back();
    } else {
        id = static_cast<NodeId>(slots_.size());
        slots_.emplace_back();
    }
    Slot& s = slots_[id];
    s.var = key.var;
    s.lo = make_ref(key.lo_w, key.lo);
    s.hi = make_ref(key.hi_w, key.hi);
    s.alive = true;
    unique_.emplace(std::move(key), id);
    ++live_;
    peak_ = std::max(peak_, live_);
    return id;
}

HedRef Manager::mk_node(VarId v, const HedRef& c, const HedRef& l) {
    const auto lv = std::int64_t(index(v));
    if (index(v) >= vars_.size()) throw Error("mk_node: unknown variable");
    if (level(c.node) >= lv)
        throw Error("mk_node: const edge of '" + var_name(v) + "' reaches a variable not below it");
    if (level(l.node) > lv)
        throw Error("mk_node: linear edge of '" + var_name(v) + "' reaches a variable above it");
    // Rule 1: no dependence on v.
    if (l.is_zero()) return c;

    BigInt g = gcd(abs(c.weight), abs(l.weight));
    if ((c.weight != 0 ? c.weight : l.weight) < 0) g = -g;
    NodeKey key{index(v), c.weight / g, c.is_zero() ? kZeroNode : c.node, l.weight / g, l.node};
    NodeId id = intern(std::move(key));
    return HedRef{std::move(g), id};
}

HedRef Manager::neg(const HedRef& a) const { return make_ref(-a.weight, a.node); }

HedRef Manager::scale(const HedRef& a, const BigInt& k) const { return make_ref(a.weight * k, a.node); }

VarId Manager::node_var(NodeId n) const {
    if (is_terminal(n)) throw Error("node_var: terminal node");
    return VarId{slots_[n].var};
}

HedRef Manager::const_edge(NodeId n) const { return slots_[n].lo; }
HedRef Manager::linear_edge(NodeId n) const { return slots_[n].hi; }

std::optional<VarId> Manager::top_var(const HedRef& r) const {
    if (is_terminal(r.node)) return std::nullopt;
    return VarId{slots_[r.node].var};
}

std::optional<BigInt> Manager::constant_value(const HedRef& r) const {
    if (r.node == kZeroNode) return BigInt(0);
    if (r.node == kOneNode) return r.weight;
    return std::nullopt;
}

HedRef Manager::add(const HedRef& a, const HedRef& b) { return add_rec(a, b); }

HedRef Manager::add_rec(const HedRef& a0, const HedRef& b0) {
    if (a0.is_zero()) return b0;
    if (b0.is_zero()) return a0;
    if (a0.node == b0.node) return make_ref(a0.weight + b0.weight, a0.node);

    const HedRef& a = a0.node < b0.node ? a0 : b0;
    const HedRef& b = a0.node < b0.node ? b0 : a0;
    BigInt g = gcd(abs(a.weight), abs(b.weight));
    if (a.weight < 0) g = -g;
    AddKey key{a.weight / g, a.node, b.weight / g, b.node};
    if (caching_) {
        if (auto it = add_cache_.find(key); it != add_cache_.end()) return scale(it->second, g);
    }

    HedRef na{key.wa, a.node};
    HedRef nb{key.wb, b.node};
    const auto la = level(a.node);
    const auto lb = level(b.node);
    HedRef res;
    if (la == lb) {
        VarId x{slots_[a.node].var};
        HedRef c = add_rec(scale(slots_[a.node].lo, na.weight), scale(slots_[b.node].lo, nb.weight));
        HedRef l = add_rec(scale(slots_[a.node].hi, na.weight), scale(slots_[b.node].hi, nb.weight));
        res = mk_node(x, c, l);
    } else {
        const HedRef& top = la > lb ? na : nb;
        const HedRef& other = la > lb ? nb : na;
        VarId x{slots_[top.node].var};
        HedRef c = add_rec(scale(slots_[top.node].lo, top.weight), other);
        HedRef l = scale(slots_[top.node].hi, top.weight);
        res = mk_node(x, c, l);
    }
    if (caching_) add_cache_.emplace(std::move(key), res);
    return scale(res, g);
}

HedRef Manager::mul(const HedRef& a, const HedRef& b) {
    if (a.is_zero() || b.is_zero()) return zero();
    BigInt w = a.weight * b.weight;
    if (a.node == kOneNode) return make_ref(std::move(w), b.node);
    if (b.node == kOneNode) return make_ref(std::move(w), a.node);
    HedRef r = mul_nodes(std::min(a.node, b.node), std::max(a.node, b.node));
    return scale(r, w);
}

HedRef Manager::mul_nodes(NodeId u, NodeId v) {
    const auto key = std::make_pair(u, v);
    if (caching_) {
        if (auto it = mul_cache_.find(key); it != mul_cache_.end()) return it->second;
    }
    const auto lu = level(u);
    const auto lv = level(v);
    HedRef res;
    if (lu == lv) {
        // (uc + x ul)(vc + x vl) = uc vc + x (uc vl + ul vc + x ul vl)
        VarId x{slots_[u].var};
        HedRef uc = slots_[u].lo, ul = slots_[u].hi;
        HedRef vc = slots_[v].lo, vl = slots_[v].hi;
        HedRef c = mul(uc, vc);
        HedRef cross = add(mul(uc, vl), mul(ul, vc));
        HedRef quad = mk_node(x, zero(), mul(ul, vl));
        res = mk_node(x, c, add(cross, quad));
    } else {
        NodeId top = lu > lv ? u : v;
        HedRef other{1, lu > lv ? v : u};
        VarId x{slots_[top].var};
        HedRef lo = slots_[top].lo;
        HedRef hi = slots_[top].hi;
        HedRef c = mul(lo, other);
        HedRef l = mul(hi, other);
        res = mk_node(x, c, l);
    }
    if (caching_) mul_cache_.emplace(key, res);
    return res;
}

HedRef Manager::compose(const HedRef& r, const std::unordered_map<VarId, HedRef>& subst) {
    std::unordered_map<NodeId, HedRef> memo;
    std::function<HedRef(NodeId)> rec = [&](NodeId n) -> HedRef {
        if (n == kZeroNode) return zero();
        if (n == kOneNode) return one();
        if (auto it = memo.find(n); it != memo.end()) return it->second;
        const Slot s = slots_[n];
        VarId x{s.var};
        auto it = subst.find(x);
        HedRef xv = it != subst.end() ? it->second : mk_var(x);
        HedRef c = scale(rec(s.lo.node), s.lo.weight);
        HedRef l = scale(rec(s.hi.node), s.hi.weight);
        HedRef res = add(c, mul(xv, l));
        memo.emplace(n, res);
        return res;
    };
    return scale(rec(r.node), r.weight);
}

std::vector<VarId> Manager::support(const HedRef& r) const {
    std::vector<char> seen_var(vars_.size(), 0);
    std::unordered_map<NodeId, bool> visited;
    std::vector<NodeId> stack{r.node};
    while (!stack.empty()) {
        NodeId n = stack.back();
        stack.pop_back();
        if (is_terminal(n) || visited.contains(n)) continue;
        visited.emplace(n, true);
        seen_var[slots_[n].var] = 1;
        stack.push_back(slots_[n].lo.node);
        stack.push_back(slots_[n].hi.node);
    }
    std::vector<VarId> out;
    for (std::uint32_t i = 0; i < seen_var.size(); ++i)
        if (seen_var[i]) out.push_back(VarId{i});
    return out;
}

BigInt Manager::evaluate(const HedRef& r, const Point& point) const {
    std::unordered_map<NodeId, BigInt> memo;
    std::function<BigInt(NodeId)> rec = [&](NodeId n) -> BigInt {
        if (n == kZeroNode) return 0;
        if (n == kOneNode) return 1;
        if (auto it = memo.find(n); it != memo.end()) return it->second;
        const Slot& s = slots_[n];
        auto pv = point.find(VarId{s.var});
        if (pv == point.end()) throw Error("evaluate: no value for variable '" + vars_[s.var].name + "'");
        BigInt v = s.lo.weight * rec(s.lo.node) + pv->second * s.hi.weight * rec(s.hi.node);
        memo.emplace(n, v);
        return v;
    };
    return r.weight * rec(r.node);
}

Polynomial Manager::to_polynomial(const HedRef& r) const {
    std::unordered_map<NodeId, Polynomial> memo;
    std::function<const Polynomial&(NodeId)> rec = [&](NodeId n) -> const Polynomial& {
        if (auto it = memo.find(n); it != memo.end()) return it->second;
        Polynomial p;
        if (n == kOneNode) {
            p.emplace(Monomial{}, BigInt(1));
        } else if (n != kZeroNode) {
            const Slot& s = slots_[n];
            VarId x{s.var};
            if (!s.lo.is_zero()) {
                for (const auto& [mono, c] : rec(s.lo.node)) p[mono] += c * s.lo.weight;
            }
            for (const auto& [mono, c] : rec(s.hi.node)) {
                Monomial m = mono;
                if (!m.empty() && m.back().first == x)
                    ++m.back().second;
                else
                    m.emplace_back(x, 1u);
                p[m] += c * s.hi.weight;
            }
        }
        return memo.emplace(n, std::move(p)).first->second;
    };
    Polynomial out;
    if (r.is_zero()) return out;
    for (const auto& [mono, c] : rec(r.node)) {
        BigInt v = c * r.weight;
        if (v != 0) out.emplace(mono, std::move(v));
    }
    return out;
}

HedRef Manager::from_polynomial(const Polynomial& p) {
    HedRef acc = zero();
    for (const auto& [mono, c] : p) {
        HedRef term = mk_const(c);
        for (const auto& [v, e] : mono) {
            HedRef xv = mk_var(v);
            for (unsigned k = 0; k < e; ++k) term = mul(term, xv);
        }
        acc = add(acc, term);
    }
    return acc;
}

void Manager::collect_garbage(std::span<const HedRef> roots) {
    std::vector<char> mark(slots_.size(), 0);
    mark[kZeroNode] = mark[kOneNode] = 1;
    std::vector<NodeId> stack;
    for (const auto& r : roots) stack.push_back(r.node);
    while (!stack.empty()) {
        NodeId n = stack.back();
        stack.pop_back();
        if (mark[n]) continue;
        mark[n] = 1;
        stack.push_back(slots_[n].lo.node);
        stack.push_back(slots_[n].hi.node);
    }
    for (NodeId n = 2; n < slots_.size(); ++n) {
        Slot& s = slots_[n];
        if (!s.alive || mark[n]) continue;
        unique_.erase(NodeKey{s.var, s.lo.weight, s.lo.node, s.hi.weight, s.hi.node});
        s = Slot{};
        free_.push_back(n);
        --live_;
    }
    add_cache_.clear();
    mul_cache_.clear();
}

void Manager::set_caching(bool enabled) {
    caching_ = enabled;
    if (!enabled) {
        add_cache_.clear();
        mul_cache_.clear();
    }
}

std::string Manager::audit() const {
    std::ostringstream err;
    std::size_t alive = 0;
    for (NodeId n = 0; n < slots_.size(); ++n) {
        const Slot& s = slots_[n];
        if (!s.alive) continue;
        ++alive;
        if (is_terminal(n)) continue;
        auto where = [&] { return "node " + std::to_string(n) + ": "; };
        if (s.hi.is_zero()) err << where() << "linear edge is zero (Rule 1)\n";
        if (s.lo.weight == 0 && s.lo.node != kZeroNode) err << where() << "zero weight on non-zero target\n";
        if (gcd(abs(s.lo.weight), abs(s.hi.weight)) != 1) err << where() << "edge weights not coprime\n";
        const BigInt& first = s.lo.weight != 0 ? s.lo.weight : s.hi.weight;
        if (first < 0) err << where() << "first nonzero weight negative\n";
        if (!slots_[s.lo.node].alive || !slots_[s.hi.node].alive) err << where() << "dangling child\n";
        if (level(s.lo.node) >= std::int64_t(s.var)) err << where() << "const edge order violation\n";
        if (level(s.hi.node) > std::int64_t(s.var)) err << where() << "linear edge order violation\n";
        auto it = unique_.find(NodeKey{s.var, s.lo.weight, s.lo.node, s.hi.weight, s.hi.node});
        if (it == unique_.end() || it->second != n) err << where() << "unique table mismatch\n";
    }
    if (alive != live_) err << "live count " << live_ << " != alive slots " << alive << "\n";
    if (unique_.size() + 2 != live_) err << "unique table size " << unique_.size() << " inconsistent\n";
    return err.str();
}

} // namespace hedcheck
