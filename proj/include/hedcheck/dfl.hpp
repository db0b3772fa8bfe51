#pragma once

// DFL: a small dataflow language used for both the specification and the
// scheduled implementation. See docs/dfl.md for the grammar.

#include "hedcheck/bigint.hpp"

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hedcheck::dfl {

enum class Op {
    Add, Sub, Mul, Div, Mod, Shl, Shr,
    And, Or, Xor,
    Eq, Ne, Lt, Le, Gt, Ge,
    Neg, Not,
};

const char* op_text(Op op);
bool is_relational(Op op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum Kind { Const, Name, ArrayRef, BitSelect, Unary, Binary, Ternary } kind;
    BigInt value;             // Const
    std::string name;         // Name, ArrayRef
    Op op = Op::Add;          // Unary, Binary
    std::vector<ExprPtr> args;  // ArrayRef: {index}; BitSelect: {base, index}; Unary: {a}; Binary: {a, b}; Ternary: {c, t, e}
    int line = 0;
    int column = 0;
};

ExprPtr make_const(const BigInt& v);
ExprPtr make_name(const std::string& name);
ExprPtr make_unary(Op op, ExprPtr a);
ExprPtr make_binary(Op op, ExprPtr a, ExprPtr b);
ExprPtr make_ternary(ExprPtr c, ExprPtr t, ExprPtr e);
ExprPtr make_bit_select(ExprPtr base, ExprPtr index);
ExprPtr make_array_ref(const std::string& name, ExprPtr index);

// Fully parenthesized only where precedence requires it.
std::string to_string(const Expr& e);

struct Stmt {
    enum Kind { Assign, For, If, Cycle } kind = Assign;
    // Assign: target name, optional array index.
    std::string target;
    ExprPtr target_index;
    ExprPtr rhs;
    // For: counter := init; cond; counter := step
    std::string counter;
    ExprPtr init, cond, step;
    // If: guard, then_body, else_body
    ExprPtr guard;
    std::vector<Stmt> body;
    std::vector<Stmt> else_body;
    // Set by the unroller: loop-body instance and `cycle` section.
    int group = 0;
    int cycle = 0;
    int line = 0;
    int column = 0;
};

enum class DeclKind { Input, Output, InOut, Array, Var };

struct Decl {
    DeclKind kind;
    std::string name;
    std::optional<unsigned> width;
    std::optional<unsigned> length;  // arrays
    int line = 0;

    bool is_array() const { return length.has_value(); }
    bool is_input() const { return kind == DeclKind::Input || kind == DeclKind::InOut; }
    bool is_output() const { return kind == DeclKind::Output || kind == DeclKind::InOut; }
};

struct Program {
    std::vector<Decl> decls;
    std::vector<Stmt> body;
    // Undeclared scalars whose every assignment is 1-bit typed.
    std::set<std::string> boolean_temps;

    const Decl* find(const std::string& name) const;
};

// Parses and checks a program. Throws ParseError with line/column.
Program parse(const std::string& text);
Program parse_file(const std::string& path);

// Static 1-bit typing: constants 0/1, 1-bit declarations, bit selects,
// comparisons and logic over such operands. `is_bool_name` classifies names.
template <class F>
bool is_boolean(const Expr& e, const F& is_bool_name);

} // namespace hedcheck::dfl

#include "hedcheck/detail/dfl_bool.hpp"
