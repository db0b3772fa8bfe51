#pragma once

// Hand-rolled generators for property tests: random expression trees over a
// few variables, algebraic rewrites that preserve the polynomial, and a
// direct tree interpreter used as oracle.

#include "hedcheck/hed.hpp"

#include <memory>
#include <random>
#include <vector>

namespace testsupport {

using hedcheck::BigInt;
using hedcheck::HedRef;
using hedcheck::Manager;
using hedcheck::VarId;

struct Tree;
using TreePtr = std::shared_ptr<const Tree>;

struct Tree {
    enum Op { Const, Var, Add, Sub, Mul } op;
    BigInt value;  // Const
    int var = 0;   // Var
    TreePtr l, r;
};

inline TreePtr cnst(BigInt v) { return std::make_shared<Tree>(Tree{Tree::Const, std::move(v), 0, {}, {}}); }
inline TreePtr var(int i) { return std::make_shared<Tree>(Tree{Tree::Var, 0, i, {}, {}}); }
inline TreePtr bin(Tree::Op op, TreePtr l, TreePtr r) {
    return std::make_shared<Tree>(Tree{op, 0, 0, std::move(l), std::move(r)});
}

inline TreePtr random_tree(std::mt19937_64& rng, int nvars, int depth) {
    std::uniform_int_distribution<int> pick(0, 9);
    if (depth == 0 || pick(rng) < 2) {
        if (pick(rng) < 4) return cnst(std::uniform_int_distribution<int>(-9, 9)(rng));
        return var(std::uniform_int_distribution<int>(0, nvars - 1)(rng));
    }
    int k = pick(rng);
    Tree::Op op = k < 4 ? Tree::Add : k < 6 ? Tree::Sub : Tree::Mul;
    return bin(op, random_tree(rng, nvars, depth - 1), random_tree(rng, nvars, depth - 1));
}

inline BigInt eval_tree(const TreePtr& t, const std::vector<BigInt>& point) {
    switch (t->op) {
    case Tree::Const: return t->value;
    case Tree::Var: return point[t->var];
    case Tree::Add: return eval_tree(t->l, point) + eval_tree(t->r, point);
    case Tree::Sub: return eval_tree(t->l, point) - eval_tree(t->r, point);
    case Tree::Mul: return eval_tree(t->l, point) * eval_tree(t->r, point);
    }
    return 0;
}

inline HedRef build_tree(Manager& m, const TreePtr& t, const std::vector<VarId>& vars) {
    switch (t->op) {
    case Tree::Const: return m.mk_const(t->value);
    case Tree::Var: return m.mk_var(vars[t->var]);
    case Tree::Add: return m.add(build_tree(m, t->l, vars), build_tree(m, t->r, vars));
    case Tree::Sub: return m.sub(build_tree(m, t->l, vars), build_tree(m, t->r, vars));
    case Tree::Mul: return m.mul(build_tree(m, t->l, vars), build_tree(m, t->r, vars));
    }
    return m.zero();
}

// One polynomial-preserving rewrite at the root, if one applies.
inline TreePtr rewrite_root(std::mt19937_64& rng, const TreePtr& t) {
    const auto& l = t->l;
    const auto& r = t->r;
    switch (std::uniform_int_distribution<int>(0, 6)(rng)) {
    case 0:  // commute
        if (t->op == Tree::Add || t->op == Tree::Mul) return bin(t->op, r, l);
        break;
    case 1:  // associate
        if ((t->op == Tree::Add || t->op == Tree::Mul) && l->op == t->op)
            return bin(t->op, l->l, bin(t->op, l->r, r));
        break;
    case 2:  // distribute
        if (t->op == Tree::Mul && (r->op == Tree::Add || r->op == Tree::Sub))
            return bin(r->op, bin(Tree::Mul, l, r->l), bin(Tree::Mul, l, r->r));
        if (t->op == Tree::Mul && (l->op == Tree::Add || l->op == Tree::Sub))
            return bin(l->op, bin(Tree::Mul, l->l, r), bin(Tree::Mul, l->r, r));
        break;
    case 3:  // a - b = a + (-1) * b
        if (t->op == Tree::Sub) return bin(Tree::Add, l, bin(Tree::Mul, cnst(-1), r));
        break;
    case 4:
        return bin(Tree::Add, t, cnst(0));
    case 5:
        return bin(Tree::Mul, cnst(1), t);
    case 6:  // t = (t + t) - t
        return bin(Tree::Sub, bin(Tree::Add, t, t), t);
    }
    return t;
}

// Applies rewrites at random positions throughout the tree.
inline TreePtr rewrite(std::mt19937_64& rng, const TreePtr& t, int budget = 3) {
    if (!t->l) return std::uniform_int_distribution<int>(0, 3)(rng) == 0 ? rewrite_root(rng, t) : t;
    TreePtr n = bin(t->op, rewrite(rng, t->l, budget), rewrite(rng, t->r, budget));
    for (int i = 0; i < budget; ++i)
        if (std::uniform_int_distribution<int>(0, 1)(rng)) n = rewrite_root(rng, n);
    return n;
}

} // namespace testsupport
