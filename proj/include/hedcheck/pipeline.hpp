#pragma once

// Corpus generation: a loop-pipelining scheduler over assignment lists,
// a mutation injector and a full-substitution oracle.

#include "hedcheck/symsim.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hedcheck {

enum class OpClass { Add, Mul, Shift, Logic, Compare, Mux, Move };

const char* op_class_name(OpClass c);
std::optional<OpClass> parse_op_class(const std::string& name);

struct LatencyModel {
    std::map<OpClass, unsigned> latency;  // cycles, >= 1; missing classes take 1
    std::map<OpClass, unsigned> units;    // functional units; missing classes are unconstrained

    unsigned latency_of(OpClass c) const;
    std::optional<unsigned> units_of(OpClass c) const;

    // add/move/logic/compare/shift/mux 1 cycle, mul 2 cycles, no resource limits.
    static LatencyModel standard();
    // JSON: {"latency": {"mul": 2, ...}, "units": {"mul": 5, "add": 2}}
    static LatencyModel from_json(const std::string& text);
    static LatencyModel load(const std::string& path);
};

struct ScheduledOp {
    std::string name;  // statement lhs in the emitted list
    OpClass cls;
    int iteration;     // rank of the loop-body instance
    unsigned cycle;    // issue cycle
    unsigned latency;
    std::vector<std::string> reads;
};

struct Schedule {
    unsigned ii = 1;
    unsigned res_mii = 1;
    unsigned length = 0;  // cycles until the last result is available
    std::vector<ScheduledOp> ops;  // emitted order
};

struct Pipelined {
    AssignmentList list;
    Schedule schedule;
};

// Splits every statement into single-operator statements named after their
// operator class (add0, mul3, ...), then list-schedules them with iteration k
// released at cycle k*II under the resource limits. The emitted list is in
// issue order with `cycle` annotations. Throws when II is below the resource
// bound, naming the minimum feasible II.
Pipelined pipeline_transform(const AssignmentList& list, const LatencyModel& lm, unsigned ii);

// Resource bound: max over classes of ceil(ops per iteration / units).
unsigned resource_mii(const AssignmentList& list, const LatencyModel& lm);

// Dependence, release and per-cycle resource check. Empty when legal.
std::string audit_schedule(const Schedule& s, const LatencyModel& lm);

struct MutationDescriptor {
    enum Kind { OperatorSwap, ConstantPerturb, OperandSwap, StatementDrop } kind = OperatorSwap;
    std::size_t stmt = 0;  // index into the original list
    std::string lhs;
    std::string before;    // rhs before the change
    std::string after;     // rhs after, or the replacement name for a drop

    std::string text() const;
};

const char* mutation_kind_name(MutationDescriptor::Kind k);

// Applies one random change (same seed, same change). Throws on an empty list.
std::pair<AssignmentList, MutationDescriptor> mutate(const AssignmentList& list, std::uint64_t seed);

struct OracleResult {
    bool equivalent = false;
    std::vector<std::string> differing;  // spec output names
    // "substitution" when decided on the expanded polynomials, "evaluation"
    // when non-polynomial terms forced a point check.
    std::string method;
    bool exhaustive = true;  // false when the point check was sampled
};

struct OracleConfig {
    std::optional<unsigned> width;  // compare modulo 2^width; Z when unset
    std::size_t max_nodes = 5'000'000;
    std::uint64_t samples = 4096;
    std::uint64_t seed = 1;
    std::map<std::string, std::string> output_map;
};

// Ground truth by full forward substitution of every output.
OracleResult oracle_check(const AssignmentList& spec, const AssignmentList& impl, const OracleConfig& cfg = {});

// An input point where some corresponding outputs differ modulo 2^width,
// by concrete evaluation. Inputs range over [0, 2^min(declared, width)).
// Exhaustive up to 2^20 points, sampled beyond.
std::optional<Valuation> find_witness(const AssignmentList& spec, const AssignmentList& impl, unsigned width,
                                      std::uint64_t samples = 4096, std::uint64_t seed = 1,
                                      const std::map<std::string, std::string>& output_map = {});

} // namespace hedcheck
