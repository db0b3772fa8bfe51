#include "hedcheck/dfl.hpp"

namespace hedcheck::dfl {

const char* op_text(Op op) {
    switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Mod: return "%";
    case Op::Shl: return "<<";
    case Op::Shr: return ">>";
    case Op::And: return "&";
    case Op::Or: return "|";
    case Op::Xor: return "^";
    case Op::Eq: return "==";
    case Op::Ne: return "!=";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::Neg: return "-";
    case Op::Not: return "~";
    }
    return "?";
}

bool is_relational(Op op) {
    return op == Op::Eq || op == Op::Ne || op == Op::Lt || op == Op::Le || op == Op::Gt || op == Op::Ge;
}

ExprPtr make_const(const BigInt& v) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Const;
    e->value = v;
    return e;
}

ExprPtr make_name(const std::string& name) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Name;
    e->name = name;
    return e;
}

ExprPtr make_unary(Op op, ExprPtr a) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Unary;
    e->op = op;
    e->args = {std::move(a)};
    return e;
}

ExprPtr make_binary(Op op, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Binary;
    e->op = op;
    e->args = {std::move(a), std::move(b)};
    return e;
}

ExprPtr make_ternary(ExprPtr c, ExprPtr t, ExprPtr f) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Ternary;
    e->args = {std::move(c), std::move(t), std::move(f)};
    return e;
}

ExprPtr make_bit_select(ExprPtr base, ExprPtr index) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::BitSelect;
    e->args = {std::move(base), std::move(index)};
    return e;
}

ExprPtr make_array_ref(const std::string& name, ExprPtr index) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::ArrayRef;
    e->name = name;
    e->args = {std::move(index)};
    return e;
}

namespace {

int precedence(const Expr& e) {
    switch (e.kind) {
    case Expr::Ternary: return 0;
    case Expr::Unary: return 9;
    case Expr::Binary:
        switch (e.op) {
        case Op::Or: return 1;
        case Op::Xor: return 2;
        case Op::And: return 3;
        case Op::Eq: case Op::Ne: return 4;
        case Op::Lt: case Op::Le: case Op::Gt: case Op::Ge: return 5;
        case Op::Shl: case Op::Shr: return 6;
        case Op::Add: case Op::Sub: return 7;
        default: return 8;
        }
    default:
        return 10;
    }
}

void print(const Expr& e, std::string& out);

void print_at(const Expr& e, int min_prec, std::string& out) {
    bool paren = precedence(e) < min_prec;
    // Negative constants read as unary minus.
    if (e.kind == Expr::Const && e.value < 0 && min_prec > 8) paren = true;
    if (paren) out += '(';
    print(e, out);
    if (paren) out += ')';
}

void print(const Expr& e, std::string& out) {
    switch (e.kind) {
    case Expr::Const:
        out += e.value.str();
        return;
    case Expr::Name:
        out += e.name;
        return;
    case Expr::ArrayRef:
        out += e.name + "[";
        print(*e.args[0], out);
        out += "]";
        return;
    case Expr::BitSelect:
        print_at(*e.args[0], 10, out);
        out += "[";
        print(*e.args[1], out);
        out += "]";
        return;
    case Expr::Unary:
        out += op_text(e.op);
        print_at(*e.args[0], 9, out);
        return;
    case Expr::Binary: {
        const int p = precedence(e);
        // Left-associative: the right operand needs strictly higher precedence.
        print_at(*e.args[0], p, out);
        out += ' ';
        out += op_text(e.op);
        out += ' ';
        print_at(*e.args[1], p + 1, out);
        return;
    }
    case Expr::Ternary:
        print_at(*e.args[0], 1, out);
        out += " ? ";
        print(*e.args[1], out);
        out += " : ";
        print_at(*e.args[2], 0, out);
        return;
    }
}

} // namespace

std::string to_string(const Expr& e) {
    std::string out;
    print(e, out);
    return out;
}

} // namespace hedcheck::dfl
