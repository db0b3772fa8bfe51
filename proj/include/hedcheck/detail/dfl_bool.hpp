#pragma once

namespace hedcheck::dfl {

template <class F>
bool is_boolean(const Expr& e, const F& is_bool_name) {
    switch (e.kind) {
    case Expr::Const:
        return e.value == 0 || e.value == 1;
    case Expr::Name:
    case Expr::ArrayRef:
        return is_bool_name(e);
    case Expr::BitSelect:
        return true;
    case Expr::Unary:
        return e.op == Op::Not && is_boolean(*e.args[0], is_bool_name);
    case Expr::Binary:
        if (is_relational(e.op)) return true;
        if (e.op == Op::And || e.op == Op::Or || e.op == Op::Xor)
            return is_boolean(*e.args[0], is_bool_name) && is_boolean(*e.args[1], is_bool_name);
        if (e.op == Op::Mul)
            return is_boolean(*e.args[0], is_bool_name) && is_boolean(*e.args[1], is_bool_name);
        return false;
    case Expr::Ternary:
        return is_boolean(*e.args[1], is_bool_name) && is_boolean(*e.args[2], is_bool_name);
    }
    return false;
}

} // namespace hedcheck::dfl
