#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace hedcheck {

using BigInt = boost::multiprecision::cpp_int;

inline BigInt pow2(unsigned n) {
    BigInt r = 1;
    r <<= n;
    return r;
}

// Exponent of the largest power of two dividing v; v must be nonzero.
inline unsigned two_adic_valuation(const BigInt& v) {
    return static_cast<unsigned>(boost::multiprecision::lsb(abs(v)));
}

inline bool divisible_by_pow2(const BigInt& v, unsigned n) {
    return v == 0 || two_adic_valuation(v) >= n;
}

// Floor division by 2^n, also for negative numerators.
inline BigInt floor_div_pow2(const BigInt& v, unsigned n) {
    if (v >= 0) return v >> n;
    BigInt q = -((-v) >> n);
    if (q * pow2(n) != v) q -= 1;
    return q;
}

// Least non-negative residue of v modulo 2^w.
inline BigInt mod_pow2(const BigInt& v, unsigned w) {
    BigInt m = pow2(w);
    BigInt r = v % m;
    if (r < 0) r += m;
    return r;
}

// v mod 2^64 as a two's-complement word.
inline std::uint64_t low_word(const BigInt& v) {
    BigInt r = mod_pow2(v, 64);
    return static_cast<std::uint64_t>(r);
}

inline int sign(const BigInt& v) { return v.sign(); }

inline std::string to_string(const BigInt& v) { return v.str(); }

} // namespace hedcheck
