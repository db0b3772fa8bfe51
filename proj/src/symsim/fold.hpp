#pragma once

#include "hedcheck/symsim.hpp"

#include <map>

namespace hedcheck::symsim {

using ConstEnv = std::map<std::string, BigInt>;

// Value of e if every name it reads is in env.
std::optional<BigInt> fold(const dfl::Expr& e, const ConstEnv& env);

// Replaces names found in env by constants. With fold_subtrees, every
// subtree that becomes constant is collapsed into a single literal.
dfl::ExprPtr substitute(const dfl::ExprPtr& e, const ConstEnv& env, bool fold_subtrees);

} // namespace hedcheck::symsim
