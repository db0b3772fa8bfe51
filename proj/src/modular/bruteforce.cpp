#include "hedcheck/modular.hpp"

#include "hedcheck/error.hpp"

#include <algorithm>
#include <atomic>
#include <unordered_map>

namespace hedcheck {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t low_mask(unsigned bits) { return bits >= 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << bits) - 1; }

std::uint64_t point_count(std::span<const unsigned> bits, const BruteForceOptions& opts) {
    if (opts.mode == BruteMode::Sampled) return opts.samples;
    std::uint64_t n = box_size(bits);
    if (n > kMaxExhaustivePoints)
        throw Error("exhaustive check needs more than 2^24 points; use sampled mode");
    return n;
}

void check_width(unsigned width) {
    if (width == 0 || width > 64) throw Error("brute-force width must be in [1, 64]");
}

} // namespace

WordEvaluator::WordEvaluator(const Manager& m, std::span<const HedRef> roots) {
    std::unordered_map<NodeId, std::int64_t> op_of;
    std::vector<char> var_seen;
    std::vector<NodeId> order;
    // Iterative post-order so that children precede parents.
    std::vector<std::pair<NodeId, bool>> stack;
    for (const auto& r : roots) stack.emplace_back(r.node, false);
    while (!stack.empty()) {
        auto [n, expanded] = stack.back();
        stack.pop_back();
        if (m.is_terminal(n) || op_of.contains(n)) continue;
        if (expanded) {
            op_of.emplace(n, static_cast<std::int64_t>(order.size()));
            order.push_back(n);
            continue;
        }
        stack.emplace_back(n, true);
        stack.emplace_back(m.linear_edge(n).node, false);
        stack.emplace_back(m.const_edge(n).node, false);
    }
    for (NodeId n : order) {
        auto v = index(m.node_var(n));
        if (v >= var_seen.size()) var_seen.resize(v + 1, 0);
        var_seen[v] = 1;
    }
    std::vector<std::uint32_t> slot(var_seen.size(), 0);
    for (std::uint32_t i = 0; i < var_seen.size(); ++i) {
        if (!var_seen[i]) continue;
        slot[i] = static_cast<std::uint32_t>(vars_.size());
        vars_.push_back(VarId{i});
    }
    auto child = [&](NodeId c) -> std::int64_t { return c == kOneNode || c == kZeroNode ? -1 : op_of.at(c); };
    for (NodeId n : order) {
        HedRef lo = m.const_edge(n);
        HedRef hi = m.linear_edge(n);
        ops_.push_back(Op{slot[index(m.node_var(n))], low_word(lo.weight), child(lo.node), low_word(hi.weight),
                          child(hi.node)});
    }
    for (const auto& r : roots) roots_.emplace_back(low_word(r.weight), r.is_constant() ? -1 : op_of.at(r.node));
}

void WordEvaluator::eval(const std::uint64_t* values, std::uint64_t* out, std::uint64_t* scratch) const {
    auto val = [&](std::int64_t i) -> std::uint64_t { return i < 0 ? 1 : scratch[i]; };
    for (std::size_t i = 0; i < ops_.size(); ++i) {
        const Op& op = ops_[i];
        scratch[i] = op.lo_w * val(op.lo) + values[op.var] * op.hi_w * val(op.hi);
    }
    for (std::size_t i = 0; i < roots_.size(); ++i) out[i] = roots_[i].first * val(roots_[i].second);
}

std::vector<unsigned> value_bits(const Manager& m, std::span<const VarId> vars, unsigned width) {
    std::vector<unsigned> bits;
    bits.reserve(vars.size());
    for (VarId v : vars) {
        auto b = m.var_info(v).bits;
        bits.push_back(b ? std::min(*b, width) : width);
    }
    return bits;
}

std::uint64_t box_size(std::span<const unsigned> bits) {
    unsigned total = 0;
    for (unsigned b : bits) {
        total += b;
        if (total > 24) return kMaxExhaustivePoints + 1;
    }
    return std::uint64_t(1) << total;
}

void point_at(std::uint64_t index, std::span<const unsigned> bits, const BruteForceOptions& opts,
              std::uint64_t* out) {
    if (opts.mode == BruteMode::Exhaustive) {
        for (std::size_t k = 0; k < bits.size(); ++k) {
            out[k] = index & low_mask(bits[k]);
            index = bits[k] >= 64 ? 0 : index >> bits[k];
        }
        return;
    }
    const std::uint64_t base = splitmix64(opts.seed ^ splitmix64(index));
    for (std::size_t k = 0; k < bits.size(); ++k) out[k] = splitmix64(base + k) & low_mask(bits[k]);
}

bool brute_force_equiv(const Manager& m, const HedRef& a, const HedRef& b, unsigned width,
                       const BruteForceOptions& opts) {
    check_width(width);
    const HedRef roots[2] = {a, b};
    WordEvaluator ev(m, roots);
    const auto bits = value_bits(m, ev.vars(), width);
    const std::uint64_t count = point_count(bits, opts);
    const std::uint64_t mask = low_mask(width);
    std::atomic<bool> differ{false};

#pragma omp parallel
    {
        std::vector<std::uint64_t> scratch(ev.scratch_size());
        std::vector<std::uint64_t> point(bits.size());
        std::uint64_t out[2];
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
            if (differ.load(std::memory_order_relaxed)) continue;
            point_at(static_cast<std::uint64_t>(i), bits, opts, point.data());
            ev.eval(point.data(), out, scratch.data());
            if ((out[0] ^ out[1]) & mask) differ.store(true, std::memory_order_relaxed);
        }
    }
    return !differ.load();
}

bool brute_force_equiv_serial(const Manager& m, const HedRef& a, const HedRef& b, unsigned width,
                              const BruteForceOptions& opts) {
    check_width(width);
    std::vector<VarId> vars = m.support(a);
    for (VarId v : m.support(b)) vars.push_back(v);
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    const auto bits = value_bits(m, vars, width);
    const std::uint64_t count = point_count(bits, opts);
    std::vector<std::uint64_t> coords(vars.size());
    Point p;
    for (std::uint64_t i = 0; i < count; ++i) {
        point_at(i, bits, opts, coords.data());
        for (std::size_t k = 0; k < vars.size(); ++k) p[vars[k]] = BigInt(coords[k]);
        if (mod_pow2(m.evaluate(a, p) - m.evaluate(b, p), width) != 0) return false;
    }
    return true;
}

} // namespace hedcheck
