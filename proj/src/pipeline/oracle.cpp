#include "hedcheck/pipeline.hpp"

#include "hedcheck/error.hpp"
#include "hedcheck/modular.hpp"
#include "hedcheck/sec.hpp"

#include <random>

namespace hedcheck {

namespace {

constexpr unsigned kExhaustiveBits = 20;

std::vector<std::pair<std::string, std::string>> pairs_of(const AssignmentList& spec, const AssignmentList& impl,
                                                          const std::map<std::string, std::string>& map) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& o : spec.outputs) {
        auto it = map.find(o.external);
        const std::string target = it != map.end() ? it->second : o.external;
        if (!impl.find_output(target))
            throw Error("spec output '" + o.external + "' has no implementation output '" + target + "'");
        out.emplace_back(o.external, target);
    }
    if (out.size() != impl.outputs.size()) throw Error("implementation has outputs without a spec counterpart");
    return out;
}

bool has_atoms(const Manager& m, const AtomTable& atoms, const HedRef& r) {
    for (VarId v : m.support(r))
        if (atoms.find(v)) return true;
    return false;
}

// Value range in bits of every input of either list.
std::map<std::string, unsigned> input_bits(const AssignmentList& spec, const AssignmentList& impl, unsigned width) {
    std::map<std::string, unsigned> bits;
    for (const auto* l : {&spec, &impl})
        for (const auto& in : l->inputs) {
            unsigned b = std::min(in.width.value_or(width), width);
            auto [it, fresh] = bits.emplace(in.name, b);
            if (!fresh) it->second = std::min(it->second, b);
        }
    return bits;
}

unsigned total_bits(const std::map<std::string, unsigned>& bits) {
    unsigned total = 0;
    for (const auto& [n, b] : bits) total += b;
    return total;
}

} // namespace

std::optional<Valuation> find_witness(const AssignmentList& spec, const AssignmentList& impl, unsigned width,
                                      std::uint64_t samples, std::uint64_t seed,
                                      const std::map<std::string, std::string>& output_map) {
    const auto pairs = pairs_of(spec, impl, output_map);
    const auto bits = input_bits(spec, impl, width);
    const unsigned total = total_bits(bits);
    const bool exhaustive = total <= kExhaustiveBits;
    const std::uint64_t points = exhaustive ? std::uint64_t(1) << total : samples;

    std::mt19937_64 rng(seed);
    for (std::uint64_t p = 0; p < points; ++p) {
        Valuation v;
        std::uint64_t rest = p;
        for (const auto& [name, b] : bits) {
            if (exhaustive) {
                v[name] = rest & ((std::uint64_t(1) << b) - 1);
                rest >>= b;
            } else {
                v[name] = mod_pow2(BigInt(rng()), b);
            }
        }
        Valuation a = interpret(spec, v);
        Valuation c = interpret(impl, v);
        for (const auto& [s, i] : pairs)
            if (mod_pow2(a.at(s) - c.at(i), width) != 0) return v;
    }
    return std::nullopt;
}

OracleResult oracle_check(const AssignmentList& spec, const AssignmentList& impl, const OracleConfig& cfg) {
    const auto pairs = pairs_of(spec, impl, cfg.output_map);
    Manager m;
    ExprBuilder b(m);
    for (const auto& in : spec.inputs) b.input(in.name, in.width);
    for (const auto& in : impl.inputs) b.input(in.name, in.width);
    b.prescan(spec);
    b.prescan(impl);
    auto a = substitute_outputs(b, spec);
    auto c = substitute_outputs(b, impl);
    if (m.node_count() > cfg.max_nodes)
        throw Error("full substitution needs " + std::to_string(m.node_count()) + " nodes, over the limit of " +
                    std::to_string(cfg.max_nodes));

    OracleResult r;
    r.method = "substitution";
    bool undecided = false;
    for (const auto& [s, i] : pairs) {
        const HedRef& x = a.at(s);
        const HedRef& y = c.at(i);
        if (x == y || (cfg.width && equiv_mod(m, x, y, RingConfig{*cfg.width, true}))) continue;
        // Distinct atoms may still denote the same function.
        if (has_atoms(m, b.atoms(), x) || has_atoms(m, b.atoms(), y))
            undecided = true;
        else
            r.differing.push_back(s);
    }
    if (undecided && r.differing.empty()) {
        const unsigned w = cfg.width.value_or(64);
        r.method = "evaluation";
        r.exhaustive = total_bits(input_bits(spec, impl, w)) <= kExhaustiveBits;
        if (auto v = find_witness(spec, impl, w, cfg.samples, cfg.seed, cfg.output_map)) {
            Valuation x = interpret(spec, *v);
            Valuation y = interpret(impl, *v);
            for (const auto& [s, i] : pairs)
                if (mod_pow2(x.at(s) - y.at(i), w) != 0) r.differing.push_back(s);
        }
    }
    r.equivalent = r.differing.empty();
    return r;
}

} // namespace hedcheck
