#pragma once

// Symbolic simulation: DFL program -> single-assignment, loop-free list.
//
//   parse -> unroll -> resolve_control -> lower_conditionals -> ssa_rename

#include "hedcheck/dfl.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hedcheck {

struct ListStmt {
    std::string lhs;
    dfl::ExprPtr rhs;  // over earlier lhs names, primary inputs and constants
    int group = 0;     // loop-body instance the statement came from
    int cycle = 0;     // `cycle` section of the source
    bool boolean = false;
};

struct ListInput {
    std::string name;
    std::optional<unsigned> width;
};

struct ListOutput {
    std::string external;  // declared name, or element name for arrays
    std::string ssa;       // final version (an input name for untouched inouts)
    std::optional<unsigned> width;
};

struct AssignmentList {
    std::vector<ListInput> inputs;
    std::vector<ListStmt> stmts;
    std::vector<ListOutput> outputs;
    std::vector<std::string> assumptions;

    const ListInput* find_input(const std::string& name) const;
    const ListOutput* find_output(const std::string& external) const;
};

struct SymSimConfig {
    std::size_t unroll_limit = std::size_t(1) << 20;
    bool prune_dead = false;  // drop statements no output depends on
};

// Scalar name for an array element: aar[2] -> aar2 (a1[2] -> a1_2).
std::string element_name(const std::string& array, const BigInt& index);

namespace symsim {

// Flattens loops. Loop counters are replaced by their values; `if` is kept.
// Guards that are already concrete keep only the taken branch.
std::vector<dfl::Stmt> unroll(const dfl::Program& p, const SymSimConfig& cfg = {});

// Propagates concrete scalar values, drops unconditional assignments of
// concrete values to temporaries, resolves concrete guards and folds array
// indices. Throws when an array index stays symbolic.
std::vector<dfl::Stmt> resolve_control(const dfl::Program& p, const std::vector<dfl::Stmt>& stmts);

struct Lowered {
    std::vector<dfl::Stmt> stmts;  // assignments only
    std::vector<std::string> assumptions;
};

// Removes the remaining (symbolic) `if`s: 1-bit guards become
// `v := g ? then : else`; word guards get renamed branch values merged on g != 0.
Lowered lower_conditionals(const dfl::Program& p, const std::vector<dfl::Stmt>& stmts);

// Versioned names (x_1, x_2, ...), array elements as scalars.
AssignmentList ssa_rename(const dfl::Program& p, const Lowered& lowered);

} // namespace symsim

AssignmentList sym_sim(const dfl::Program& p, const SymSimConfig& cfg = {});

// Removes statements that no output reads, directly or transitively.
AssignmentList prune_dead(const AssignmentList& list);

// --- concrete semantics ------------------------------------------------------

using Valuation = std::map<std::string, BigInt>;

// Primary input symbols of a program (scalars and array elements), declaration order.
std::vector<ListInput> input_symbols(const dfl::Program& p);

// Evaluates e with exact integers. `leaf` resolves Name and ArrayRef nodes
// (nullopt = unknown). Returns nullopt if any leaf is unknown. Throws on
// division by zero or negative shift/bit amounts.
std::optional<BigInt> eval_expr(const dfl::Expr& e,
                                const std::function<std::optional<BigInt>(const dfl::Expr&)>& leaf);

// Runs the source program. Inputs keyed by input symbol, result keyed by output name.
Valuation interpret(const dfl::Program& p, const Valuation& inputs, std::size_t step_limit = std::size_t(1) << 22);
Valuation interpret(const AssignmentList& list, const Valuation& inputs);

// --- printing ----------------------------------------------------------------

// One statement per line: `lhs := rhs;` with `cycle;` separators when cycles change.
std::string format_list(const AssignmentList& list);
// A DFL program with the same behavior (inputs as `input`/`inout`, trailing output copies).
std::string to_dfl(const AssignmentList& list);

} // namespace hedcheck
