#pragma once

// Horner Expansion Diagrams.
//
// A polynomial F over integer variables is decomposed with respect to its top
// variable X as F = const + X * linear, where const = F(X=0) does not mention
// X and linear = (F - const) / X may mention X again (so X^2 is a chain of two
// X nodes). Edges carry multiplicative integer weights; every stored node has
// coprime edge weights with the first nonzero weight positive, which together
// with hash-consing makes (weight, node) a canonical handle.

#include "hedcheck/bigint.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace hedcheck {

// Position in the manager's total variable order. Larger index = closer to the root.
enum class VarId : std::uint32_t {};

constexpr std::uint32_t index(VarId v) noexcept { return static_cast<std::uint32_t>(v); }

using NodeId = std::uint32_t;

inline constexpr NodeId kZeroNode = 0;
inline constexpr NodeId kOneNode = 1;

struct HedRef {
    BigInt weight;
    NodeId node = kZeroNode;

    bool is_zero() const { return weight == 0; }
    bool is_constant() const { return node == kZeroNode || node == kOneNode; }

    friend bool operator==(const HedRef&, const HedRef&) = default;
};

struct HedRefHash {
    std::size_t operator()(const HedRef& r) const noexcept;
};

// Sparse polynomial: monomial (sorted (var, exponent) pairs) -> nonzero coefficient.
using Monomial = std::vector<std::pair<VarId, unsigned>>;
using Polynomial = std::map<Monomial, BigInt>;

using Point = std::unordered_map<VarId, BigInt>;

struct VarInfo {
    std::string name;
    // Values range over [0, 2^bits) when set. Used by the brute-force oracle.
    std::optional<unsigned> bits;
};

class Manager {
public:
    Manager();
    Manager(const Manager&) = delete;
    Manager& operator=(const Manager&) = delete;

    // --- variables ------------------------------------------------------
    VarId add_var(const std::string& name, std::optional<unsigned> bits = std::nullopt);
    std::optional<VarId> find_var(const std::string& name) const;
    const VarInfo& var_info(VarId v) const;
    const std::string& var_name(VarId v) const { return var_info(v).name; }
    std::size_t var_count() const noexcept { return vars_.size(); }

    // --- construction ---------------------------------------------------
    HedRef zero() const { return HedRef{0, kZeroNode}; }
    HedRef one() const { return HedRef{1, kOneNode}; }
    HedRef mk_const(const BigInt& v) const;
    HedRef mk_var(VarId v);
    // Reduced, normalized node for const + v * linear. Throws on order violation.
    HedRef mk_node(VarId v, const HedRef& const_edge, const HedRef& linear_edge);

    // --- apply ------------------------------------------------------------
    HedRef add(const HedRef& a, const HedRef& b);
    HedRef neg(const HedRef& a) const;
    HedRef sub(const HedRef& a, const HedRef& b) { return add(a, neg(b)); }
    HedRef mul(const HedRef& a, const HedRef& b);
    HedRef scale(const HedRef& a, const BigInt& k) const;
    // Substitute variables by references (unmapped variables are kept).
    HedRef compose(const HedRef& r, const std::unordered_map<VarId, HedRef>& subst);

    // --- inspection -------------------------------------------------------
    bool is_terminal(NodeId n) const noexcept { return n == kZeroNode || n == kOneNode; }
    VarId node_var(NodeId n) const;
    HedRef const_edge(NodeId n) const;
    HedRef linear_edge(NodeId n) const;
    // Variable of the root node, or nullopt for constants.
    std::optional<VarId> top_var(const HedRef& r) const;
    // Variables reachable from r, ascending by order index.
    std::vector<VarId> support(const HedRef& r) const;
    std::optional<BigInt> constant_value(const HedRef& r) const;

    BigInt evaluate(const HedRef& r, const Point& point) const;
    Polynomial to_polynomial(const HedRef& r) const;
    HedRef from_polynomial(const Polynomial& p);

    // Live nodes, terminals included.
    std::size_t node_count() const noexcept { return live_; }
    std::size_t peak_node_count() const noexcept { return peak_; }
    void reset_peak() noexcept { peak_ = live_; }

    // Frees every node not reachable from roots and clears the apply caches.
    void collect_garbage(std::span<const HedRef> roots);

    // Memoization is on by default; turning it off must not change any result.
    void set_caching(bool enabled);
    bool caching() const noexcept { return caching_; }

    // Full store audit: normalization, Rule 1, ordering, unique-table consistency.
    // Returns an empty string when every invariant holds.
    std::string audit() const;

private:
    struct Slot {
        std::uint32_t var = kTerminalVar;
        HedRef lo;  // const edge
        HedRef hi;  // linear edge
        bool alive = false;
    };
    struct NodeKey {
        std::uint32_t var;
        BigInt lo_w;
        NodeId lo;
        BigInt hi_w;
        NodeId hi;
        friend bool operator==(const NodeKey&, const NodeKey&) = default;
    };
    struct NodeKeyHash {
        std::size_t operator()(const NodeKey& k) const noexcept;
    };
    struct AddKey {
        BigInt wa;
        NodeId a;
        BigInt wb;
        NodeId b;
        friend bool operator==(const AddKey&, const AddKey&) = default;
    };
    struct AddKeyHash {
        std::size_t operator()(const AddKey& k) const noexcept;
    };
    struct PairHash {
        std::size_t operator()(const std::pair<NodeId, NodeId>& p) const noexcept {
            return std::hash<std::uint64_t>{}((std::uint64_t(p.first) << 32) | p.second);
        }
    };

    static constexpr std::uint32_t kTerminalVar = 0xffffffffu;

    // Order level of a node: -1 for terminals.
    std::int64_t level(NodeId n) const noexcept {
        return slots_[n].var == kTerminalVar ? -1 : std::int64_t(slots_[n].var);
    }
    HedRef add_rec(const HedRef& a, const HedRef& b);
    HedRef mul_nodes(NodeId u, NodeId v);
    NodeId intern(NodeKey key);

    std::vector<Slot> slots_;
    std::vector<NodeId> free_;
    std::unordered_map<NodeKey, NodeId, NodeKeyHash> unique_;
    std::unordered_map<AddKey, HedRef, AddKeyHash> add_cache_;
    std::unordered_map<std::pair<NodeId, NodeId>, HedRef, PairHash> mul_cache_;
    std::vector<VarInfo> vars_;
    std::unordered_map<std::string, VarId> var_by_name_;
    std::size_t live_ = 0;
    std::size_t peak_ = 0;
    bool caching_ = true;
};

// Debug dumps.
// Textual polynomial: constant term first, then by total degree, explicit coefficients.
std::string format_polynomial(const Manager& m, const Polynomial& p, std::size_t max_terms = 0);
std::string format_ref(const Manager& m, const HedRef& r, std::size_t max_terms = 0);
// DOT graph: dashed const edges, solid linear edges, weights as labels.
void write_dot(const Manager& m, const HedRef& root, std::ostream& out);

} // namespace hedcheck

template <>
struct std::hash<hedcheck::HedRef> : hedcheck::HedRefHash {};
