#pragma once

// Polynomial functions over Z_{2^w}.

#include "hedcheck/hed.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace hedcheck {

struct RingConfig {
    unsigned width = 0;  // w >= 1; modulus 2^w
    // Take each variable's declared bit range into account: a variable with
    // b bits only ranges over [0, 2^b), so falling factorials of order >= 2^b
    // vanish on its domain. Off by default (every variable spans Z_{2^w}).
    bool use_var_ranges = false;
};

// Least k with 2^w | k!.
unsigned smarandache_pow2(unsigned w);

// Canonical representative of r as a function Z_{2^w}^n -> Z_{2^w}:
// coefficients in the falling-factorial basis reduced modulo 2^w / gcd(2^w, K!).
HedRef reduce_mod(Manager& m, const HedRef& r, const RingConfig& cfg);
bool equiv_mod(Manager& m, const HedRef& a, const HedRef& b, const RingConfig& cfg);
bool vanishes(Manager& m, const HedRef& r, const RingConfig& cfg);

// Evaluates several roots mod 2^64 over a flat node program. Reduction mod
// 2^w is a ring homomorphism of Z_{2^64} for w <= 64, so this kernel is exact
// for every width the oracle supports.
class WordEvaluator {
public:
    WordEvaluator(const Manager& m, std::span<const HedRef> roots);

    // Variables of the program, in the order expected by eval().
    const std::vector<VarId>& vars() const noexcept { return vars_; }
    std::size_t scratch_size() const noexcept { return ops_.size(); }
    // values[i] is the value of vars()[i]; writes one word per root into out.
    void eval(const std::uint64_t* values, std::uint64_t* out, std::uint64_t* scratch) const;

private:
    struct Op {
        std::uint32_t var;  // index into vars_
        std::uint64_t lo_w;
        std::int64_t lo;    // op index, -1 for the unit terminal
        std::uint64_t hi_w;
        std::int64_t hi;
    };
    std::vector<VarId> vars_;
    std::vector<Op> ops_;
    std::vector<std::pair<std::uint64_t, std::int64_t>> roots_;
};

enum class BruteMode { Exhaustive, Sampled };

struct BruteForceOptions {
    BruteMode mode = BruteMode::Exhaustive;
    std::uint64_t samples = 4096;
    std::uint64_t seed = 1;
};

// Largest point count accepted in exhaustive mode.
inline constexpr std::uint64_t kMaxExhaustivePoints = std::uint64_t(1) << 24;

// Range of each variable in bits: min(declared bits, w), or w when undeclared.
std::vector<unsigned> value_bits(const Manager& m, std::span<const VarId> vars, unsigned width);
// Size of the box, saturating at kMaxExhaustivePoints + 1.
std::uint64_t box_size(std::span<const unsigned> bits);

// Compares a and b mod 2^w on every point of the input box (or on sampled
// points). Throws in exhaustive mode when the box has more than
// kMaxExhaustivePoints points. Runs on the parallel word kernel.
bool brute_force_equiv(const Manager& m, const HedRef& a, const HedRef& b, unsigned width,
                       const BruteForceOptions& opts = {});

// Same contract, evaluated point by point with exact big integers on one thread.
bool brute_force_equiv_serial(const Manager& m, const HedRef& a, const HedRef& b, unsigned width,
                              const BruteForceOptions& opts = {});

// Coordinates of point `index`: mixed radix over the box in exhaustive mode,
// hashed from (seed, index) in sampled mode. bits[k] is the range of variable k.
void point_at(std::uint64_t index, std::span<const unsigned> bits, const BruteForceOptions& opts,
              std::uint64_t* out);

} // namespace hedcheck
