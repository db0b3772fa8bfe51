#pragma once

// Word-level operators on top of the HED manager: Boolean encodings, shifts,
// conditionals, uninterpreted atoms and bit-slice decomposition.

#include "hedcheck/hed.hpp"

#include <map>
#include <optional>
#include <tuple>
#include <vector>

namespace hedcheck {

// Boolean operators. Operands are expected to denote 0/1-valued polynomials;
// for other operands the result is the polynomial formula, nothing more.
HedRef b_not(Manager& m, const HedRef& a);
HedRef b_and(Manager& m, const HedRef& a, const HedRef& b);
HedRef b_or(Manager& m, const HedRef& a, const HedRef& b);
HedRef b_xor(Manager& m, const HedRef& a, const HedRef& b);

HedRef shl(Manager& m, const HedRef& a, unsigned n);

// c * t + (1 - c) * e, for a 0/1-valued guard c.
HedRef ite(Manager& m, const HedRef& c, const HedRef& t, const HedRef& e);

// Atoms are fresh variables standing for a function of a canonical operand
// that has no polynomial form. Two atoms are the same variable iff their
// kind, amount and operand reference are identical, so any two designs
// applying the same function to equal values share the atom.
enum class AtomKind {
    ShiftRight,  // floor(operand / 2^amount)
    BitOf,       // bit `amount` of operand
    EqZero,      // operand == 0
    LtZero,      // operand < 0
};

struct Atom {
    AtomKind kind;
    HedRef operand;
    unsigned amount;
    VarId var;
};

class AtomTable {
public:
    VarId get(Manager& m, AtomKind kind, const HedRef& operand, unsigned amount = 0);
    const Atom* find(VarId v) const;
    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    // Operand references, to be kept alive across garbage collection.
    std::vector<HedRef> roots() const;

    static BigInt apply(AtomKind kind, const BigInt& operand, unsigned amount);

private:
    struct Key {
        AtomKind kind;
        unsigned amount;
        BigInt weight;
        NodeId node;
        bool operator<(const Key& o) const {
            return std::tie(kind, amount, node, weight) < std::tie(o.kind, o.amount, o.node, o.weight);
        }
    };
    std::map<Key, std::size_t> index_;
    std::vector<Atom> atoms_;
    std::unordered_map<VarId, std::size_t> by_var_;
};

struct DivResult {
    HedRef value;
    // Set when part of the operand was not divisible and went into a shift atom.
    bool inexact = false;
};

// floor(a / 2^n). The part of `a` whose coefficients are divisible by 2^n is
// divided exactly; the remaining part B becomes the atom floor(B / 2^n).
DivResult div_pow2(Manager& m, AtomTable& atoms, const HedRef& a, unsigned n);

// 1 iff diff == 0 / diff < 0. Constant differences fold to 0 or 1.
HedRef eq_zero(Manager& m, AtomTable& atoms, const HedRef& diff);
HedRef lt_zero(Manager& m, AtomTable& atoms, const HedRef& diff);

struct BitSlice {
    VarId hi;
    VarId bit;
    VarId lo;
    unsigned index;
};

// Splits word variables as v = 2^(i+1) * hi + 2^i * bit + lo with bit in {0,1}
// and lo in [0, 2^i). One split per variable; further bits of the same word
// are taken from hi or lo.
class BitSlicer {
public:
    // Registers the split of v at bit i. Idempotent for the same (v, i);
    // throws if v was already split at another index.
    const BitSlice& decompose(Manager& m, VarId v, unsigned i);
    // Polynomial for bit i of v, splitting as needed. Zero when i is outside
    // the declared width of v.
    HedRef select(Manager& m, VarId v, unsigned i);

    bool decomposed(VarId v) const { return slices_.contains(v); }
    const BitSlice* slice(VarId v) const;
    // v in terms of the leaf variables of its split tree.
    HedRef expansion(Manager& m, VarId v) const;
    // Replaces every split variable in r by its expansion.
    HedRef rewrite(Manager& m, const HedRef& r) const;

private:
    std::map<VarId, BitSlice> slices_;
};

} // namespace hedcheck
