#include "hedcheck/modular.hpp"

#include "hedcheck/error.hpp"

#include <bit>
#include <functional>
#include <map>

namespace hedcheck {

namespace {

// Stirling numbers up to a fixed order: S(n,k) of the second kind for
// x^n = sum_k S(n,k) Y_k(x), s(n,k) of the first kind (signed) for
// Y_n(x) = sum_k s(n,k) x^k.
struct StirlingTables {
    explicit StirlingTables(unsigned order) : s2(order + 1), s1(order + 1) {
        for (unsigned n = 0; n <= order; ++n) {
            s2[n].assign(n + 1, 0);
            s1[n].assign(n + 1, 0);
        }
        s2[0][0] = 1;
        s1[0][0] = 1;
        for (unsigned n = 1; n <= order; ++n) {
            for (unsigned k = 1; k <= n; ++k) {
                BigInt a2 = k < n ? s2[n - 1][k] : BigInt(0);
                s2[n][k] = BigInt(k) * a2 + s2[n - 1][k - 1];
                BigInt a1 = k < n ? s1[n - 1][k] : BigInt(0);
                s1[n][k] = s1[n - 1][k - 1] - BigInt(n - 1) * a1;
            }
        }
    }
    std::vector<std::vector<BigInt>> s2;
    std::vector<std::vector<BigInt>> s1;
};

// v2(k!) by Legendre: k - popcount(k).
unsigned factorial_valuation(unsigned k) { return k - static_cast<unsigned>(std::popcount(k)); }

// Expands prod over (var, e) of sum_j table[e][j] * basis_j(var) into acc, scaled by c.
void expand(const Monomial& mono, const BigInt& c, const std::vector<std::vector<BigInt>>& table,
            std::map<Monomial, BigInt>& acc) {
    Monomial cur;
    std::function<void(std::size_t, const BigInt&)> rec = [&](std::size_t i, const BigInt& coef) {
        if (i == mono.size()) {
            acc[cur] += coef;
            return;
        }
        const auto [v, e] = mono[i];
        for (unsigned j = 1; j <= e; ++j) {
            const BigInt& t = table[e][j];
            if (t == 0) continue;
            cur.emplace_back(v, j);
            rec(i + 1, coef * t);
            cur.pop_back();
        }
    };
    rec(0, c);
}

} // namespace

unsigned smarandache_pow2(unsigned w) {
    unsigned k = 0;
    while (factorial_valuation(k) < w) ++k;
    return k;
}

HedRef reduce_mod(Manager& m, const HedRef& r, const RingConfig& cfg) {
    if (cfg.width == 0) throw Error("ring width must be at least 1");
    const unsigned w = cfg.width;
    Polynomial p = m.to_polynomial(r);
    unsigned order = 0;
    for (const auto& [mono, c] : p)
        for (const auto& [v, e] : mono) order = std::max(order, e);
    StirlingTables st(order);

    std::map<Monomial, BigInt> falling;
    for (const auto& [mono, c] : p) expand(mono, c, st.s2, falling);

    Polynomial back;
    for (auto& [mono, b] : falling) {
        unsigned val = 0;
        bool dead = false;
        for (const auto& [v, k] : mono) {
            val += factorial_valuation(k);
            if (cfg.use_var_ranges) {
                if (auto bits = m.var_info(v).bits; bits && *bits < 32 && k >= (1u << *bits)) dead = true;
            }
        }
        if (dead || val >= w) continue;
        BigInt red = mod_pow2(b, w - val);
        if (red == 0) continue;
        expand(mono, red, st.s1, back);
    }
    std::erase_if(back, [](const auto& kv) { return kv.second == 0; });
    return m.from_polynomial(back);
}

bool equiv_mod(Manager& m, const HedRef& a, const HedRef& b, const RingConfig& cfg) {
    if (cfg.width == 0) throw Error("ring width must be at least 1");
    if (a == b) return true;
    return vanishes(m, m.sub(a, b), cfg);
}

bool vanishes(Manager& m, const HedRef& r, const RingConfig& cfg) { return reduce_mod(m, r, cfg).is_zero(); }

} // namespace hedcheck
