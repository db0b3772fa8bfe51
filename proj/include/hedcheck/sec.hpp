#pragma once

// Segmented sequential equivalence checking of two assignment lists with
// dynamic cut points and internal-equivalence peeling.

#include "hedcheck/algebra.hpp"
#include "hedcheck/modular.hpp"
#include "hedcheck/symsim.hpp"

#include <deque>
#include <functional>
#include <limits>
#include <set>
#include <unordered_map>

namespace hedcheck {

// Turns DFL expressions into HEDs. Inputs become manager variables; bit
// selects of inputs become bit slices, other non-polynomial operators become atoms.
class ExprBuilder {
public:
    using Lookup = std::function<HedRef(const std::string&)>;
    using IsBool = std::function<bool(const std::string&)>;

    explicit ExprBuilder(Manager& m) : m_(m) {}

    Manager& manager() { return m_; }
    AtomTable& atoms() { return atoms_; }
    const BitSlicer& slicer() const { return slicer_; }

    // Registers (or finds) the variable of a primary input.
    VarId input(const std::string& name, std::optional<unsigned> bits);
    bool is_input(const std::string& name) const { return inputs_.contains(name); }
    // Reference of an input, expanded through its bit slices.
    HedRef input_ref(const std::string& name);

    // Splits inputs at every constant bit select in the list. Must run before
    // any reference over those inputs is built.
    void prescan(const AssignmentList& list);

    // `where` names the statement in notes about inexact shifts.
    HedRef build(const dfl::Expr& e, const Lookup& lookup, const IsBool& is_bool, const std::string& where);

    // Cut variables that stand for values equal only modulo 2^w.
    std::set<VarId> modular_cuts;
    std::vector<std::string> inexact;

private:
    HedRef rec(const dfl::Expr& e, const Lookup& lookup, const IsBool& is_bool, const std::string& where);
    // Notes operands that mention a modular-only cut; returns the operand.
    const HedRef& opaque(const HedRef& operand, const std::string& where);
    void note(const std::string& msg);

    Manager& m_;
    AtomTable atoms_;
    BitSlicer slicer_;
    std::unordered_map<std::string, VarId> inputs_;
    std::set<std::string> notes_;
};

// Builds every output of `list` by full forward substitution over its inputs.
std::map<std::string, HedRef> substitute_outputs(ExprBuilder& b, const AssignmentList& list);

inline constexpr std::size_t kUnlimitedNodes = std::numeric_limits<std::size_t>::max();

struct SecConfig {
    std::optional<unsigned> width;            // compare modulo 2^width; Z when unset
    std::size_t max_nodes = 1'000'000;        // node budget per segment pair
    std::map<std::string, std::string> output_map;  // spec output -> impl output; identity when empty
    bool confirm = true;                      // re-check unmatched outputs by full substitution
    bool trace = false;
};

enum class Result { Equivalent, Unequivalent };
const char* result_text(Result r);

struct MatchRecord {
    std::string spec;
    std::string impl;
    std::string cut;  // empty when the common value was already a constant or basis variable
};

struct OutputMismatch {
    std::string spec;
    std::string impl;
    std::string difference;  // spec - impl, truncated
};

struct SecCounters {
    std::size_t segments = 0;
    std::size_t internal_equ_calls = 0;
    std::size_t peels = 0;
    std::size_t peak_node_count = 0;
    std::size_t cut_vars = 0;
    std::size_t confirmations = 0;
    std::size_t budget_overflows = 0;  // single statements larger than the budget
    std::size_t spec_statements = 0;
    std::size_t impl_statements = 0;
};

struct Verdict {
    Result result = Result::Unequivalent;
    std::vector<MatchRecord> matched;        // cut points, in discovery order
    std::vector<std::string> outputs;        // corresponding output pairs "spec=impl" that agree
    std::vector<OutputMismatch> unmatched;
    SecCounters counters;
    std::vector<std::string> inexact;
    std::vector<std::string> assumptions;
    std::vector<std::string> trace;
};

enum class Side { Spec = 0, Impl = 1 };

// One check. The public steps are those of the algorithm; run() drives them.
class SecEngine {
public:
    SecEngine(const AssignmentList& spec, const AssignmentList& impl, const SecConfig& cfg = {});

    Verdict run();

    // Greedily grows both segments under the node budget. With force, every
    // side that still has pending statements gains at least one.
    void select_segments(bool force = false);
    // Moves the next `count` pending statements of one side into its segment.
    void extend(Side side, std::size_t count);
    // Segment outputs: names not read inside the segment, plus design outputs.
    std::vector<std::string> outputs(Side side) const;
    std::vector<std::string> segment(Side side) const;
    std::size_t pending(Side side) const { return d_[int(side)].pending.size(); }

    struct Match {
        std::vector<std::string> spec;
        std::vector<std::string> impl;
    };
    // Groups of segment outputs with equal values across the two sides.
    std::vector<Match> equ_checking();
    // Installs a cut variable per group and discharges matched outputs with their exclusive fanin.
    void update(const std::vector<Match>& matches);
    // Peels segment outputs back to the pending lists until internal values match.
    bool internal_equ();
    // Final comparison of the design outputs.
    Verdict finish();

    const SecCounters& counters() const { return counters_; }
    HedRef value(Side side, const std::string& name);
    Manager& manager() { return m_; }

private:
    struct Design {
        AssignmentList list;  // dead statements removed
        std::unordered_map<std::string, std::size_t> def;
        std::vector<std::vector<std::string>> reads;
        std::set<std::string> design_outputs;
        std::set<std::string> booleans;
        std::deque<std::size_t> pending;
        std::set<std::size_t> segment;
        std::unordered_map<std::string, HedRef> env;
    };

    void add(Side side);
    void remove_last(Side side, std::size_t stmt);
    std::vector<std::size_t> output_stmts(Side side) const;
    HedRef canonical(const HedRef& r);
    bool is_basis(const HedRef& r) const;
    void collect();
    void log(const std::string& msg);
    std::vector<std::pair<std::string, std::string>> correspondence() const;

    SecConfig cfg_;
    Manager m_;
    ExprBuilder builder_;
    Design d_[2];
    SecCounters counters_;
    std::vector<MatchRecord> matched_;
    std::vector<std::string> trace_;
    std::unordered_map<HedRef, HedRef, HedRefHash> canon_cache_;
};

Verdict sec_piped(const AssignmentList& spec, const AssignmentList& impl, const SecConfig& cfg = {});

} // namespace hedcheck
