#include "hedcheck/dfl.hpp"

#include "hedcheck/error.hpp"
#include "lexer.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace hedcheck::dfl {

const Decl* Program::find(const std::string& name) const {
    for (const auto& d : decls)
        if (d.name == name) return &d;
    return nullptr;
}

namespace {

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Program run() {
        while (!at_end()) {
            if (peek_kw("input") || peek_kw("output") || peek_kw("inout") || peek_kw("array") || peek_kw("var"))
                declaration();
            else
                prog_.body.push_back(statement());
        }
        return std::move(prog_);
    }

private:
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool at_end() const { return peek().kind == Token::End; }
    bool peek_punct(const char* p, std::size_t k = 0) const {
        return peek(k).kind == Token::Punct && peek(k).text == p;
    }
    bool peek_kw(const char* kw) const { return peek().kind == Token::Ident && peek().text == kw; }
    const Token& next() { return toks_[pos_++]; }

    [[noreturn]] void fail(const Token& t, const std::string& msg) const {
        std::string near = t.kind == Token::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(msg + " near " + near, t.line, t.column);
    }

    void expect(const char* p) {
        if (!peek_punct(p)) {
            if (std::string(p) == ":=" && peek_punct("=")) fail(peek(), "expected ':=' (assignment)");
            fail(peek(), std::string("expected '") + p + "'");
        }
        next();
    }
    std::string ident(const char* what) {
        if (peek().kind != Token::Ident) fail(peek(), std::string("expected ") + what);
        return next().text;
    }
    static bool keyword(const std::string& s) {
        static const std::set<std::string> kws{"input", "output", "inout", "array", "var", "for", "if", "else", "cycle"};
        return kws.contains(s);
    }

    void declaration() {
        const Token& kw = next();
        Decl d;
        d.line = kw.line;
        d.kind = kw.text == "input"    ? DeclKind::Input
                 : kw.text == "output" ? DeclKind::Output
                 : kw.text == "inout"  ? DeclKind::InOut
                 : kw.text == "array"  ? DeclKind::Array
                                       : DeclKind::Var;
        const Token& name_tok = peek();
        d.name = ident("a name");
        if (keyword(d.name)) fail(name_tok, "keyword used as a name");
        if (prog_.find(d.name)) fail(name_tok, "'" + d.name + "' declared twice");
        if (peek_punct("[")) {
            next();
            if (peek().kind != Token::Number) fail(peek(), "expected array length");
            const Token& len = next();
            if (len.value < 1 || len.value > 1 << 20) fail(len, "array length out of range");
            d.length = static_cast<unsigned>(len.value);
            expect("]");
        } else if (d.kind == DeclKind::Array) {
            fail(peek(), "expected '[' after array name");
        }
        if (peek_punct(":")) {
            next();
            const Token& w = peek();
            std::string ty = ident("a width such as u8");
            if (ty.size() < 2 || ty[0] != 'u' || ty.find_first_not_of("0123456789", 1) != std::string::npos)
                fail(w, "expected a width such as u8");
            unsigned bits = static_cast<unsigned>(std::stoul(ty.substr(1)));
            if (bits < 1 || bits > 4096) fail(w, "width out of range");
            d.width = bits;
        }
        expect(";");
        prog_.decls.push_back(d);
    }

    std::vector<Stmt> block() {
        expect("{");
        std::vector<Stmt> body;
        while (!peek_punct("}")) {
            if (at_end()) fail(peek(), "expected '}'");
            body.push_back(statement());
        }
        next();
        return body;
    }

    Stmt statement() {
        const Token& first = peek();
        Stmt s;
        s.line = first.line;
        s.column = first.column;
        if (peek_kw("for")) {
            next();
            s.kind = Stmt::For;
            expect("(");
            s.counter = ident("loop counter");
            expect(":=");
            s.init = expr();
            expect(";");
            s.cond = expr();
            expect(";");
            const Token& ct = peek();
            if (ident("loop counter") != s.counter) fail(ct, "loop step must assign the loop counter");
            expect(":=");
            s.step = expr();
            expect(")");
            s.body = block();
            return s;
        }
        if (peek_kw("if")) {
            next();
            s.kind = Stmt::If;
            expect("(");
            s.guard = expr();
            expect(")");
            s.body = block();
            if (peek_kw("else")) {
                next();
                if (peek_kw("if"))
                    s.else_body.push_back(statement());
                else
                    s.else_body = block();
            }
            return s;
        }
        if (peek_kw("cycle")) {
            next();
            s.kind = Stmt::Cycle;
            expect(";");
            return s;
        }
        if (peek().kind != Token::Ident) fail(peek(), "expected a statement");
        if (keyword(peek().text)) fail(peek(), "unexpected keyword");
        s.kind = Stmt::Assign;
        s.target = next().text;
        if (peek_punct("[")) {
            next();
            s.target_index = expr();
            expect("]");
        }
        expect(":=");
        s.rhs = expr();
        expect(";");
        return s;
    }

    std::shared_ptr<Expr> node(Expr::Kind k, const Token& at) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->line = at.line;
        e->column = at.column;
        return e;
    }

    ExprPtr binary(const Token& at, Op op, ExprPtr a, ExprPtr b) {
        auto e = node(Expr::Binary, at);
        e->op = op;
        e->args = {std::move(a), std::move(b)};
        return e;
    }

    ExprPtr expr() { return ternary(); }

    ExprPtr ternary() {
        ExprPtr c = level(0);
        if (!peek_punct("?")) return c;
        const Token& q = next();
        ExprPtr t = expr();
        expect(":");
        ExprPtr f = ternary();
        auto e = node(Expr::Ternary, q);
        e->args = {c, t, f};
        return e;
    }

    // Binary precedence levels, loosest first.
    ExprPtr level(int lv) {
        static const std::vector<std::vector<std::pair<const char*, Op>>> levels = {
            {{"|", Op::Or}},
            {{"^", Op::Xor}},
            {{"&", Op::And}},
            {{"==", Op::Eq}, {"!=", Op::Ne}},
            {{"<", Op::Lt}, {"<=", Op::Le}, {">", Op::Gt}, {">=", Op::Ge}},
            {{"<<", Op::Shl}, {">>", Op::Shr}},
            {{"+", Op::Add}, {"-", Op::Sub}},
            {{"*", Op::Mul}, {"/", Op::Div}, {"%", Op::Mod}},
        };
        if (lv == static_cast<int>(levels.size())) return unary();
        ExprPtr lhs = level(lv + 1);
        for (;;) {
            bool found = false;
            for (const auto& [text, op] : levels[lv]) {
                if (peek_punct(text)) {
                    const Token& at = next();
                    lhs = binary(at, op, lhs, level(lv + 1));
                    found = true;
                    break;
                }
            }
            if (!found) return lhs;
        }
    }

    ExprPtr unary() {
        if (peek_punct("-") || peek_punct("~") || peek_punct("+")) {
            const Token& at = next();
            ExprPtr a = unary();
            if (at.text == "+") return a;
            auto e = node(Expr::Unary, at);
            e->op = at.text == "-" ? Op::Neg : Op::Not;
            e->args = {a};
            return e;
        }
        if (peek_punct("!")) fail(peek(), "use '~' for 1-bit negation");
        return postfix();
    }

    ExprPtr postfix() {
        ExprPtr base = primary();
        while (peek_punct("[")) {
            const Token& at = next();
            ExprPtr idx = expr();
            expect("]");
            const Decl* d = base->kind == Expr::Name ? prog_.find(base->name) : nullptr;
            if (d && d->is_array()) {
                auto e = node(Expr::ArrayRef, at);
                e->name = base->name;
                e->line = base->line;
                e->column = base->column;
                e->args = {idx};
                base = e;
            } else {
                auto e = node(Expr::BitSelect, at);
                e->args = {base, idx};
                base = e;
            }
        }
        return base;
    }

    ExprPtr primary() {
        const Token& t = peek();
        if (t.kind == Token::Number) {
            next();
            auto e = node(Expr::Const, t);
            e->value = t.value;
            return e;
        }
        if (t.kind == Token::Ident) {
            if (keyword(t.text)) fail(t, "unexpected keyword");
            next();
            auto e = node(Expr::Name, t);
            e->name = t.text;
            return e;
        }
        if (peek_punct("(")) {
            next();
            ExprPtr e = expr();
            expect(")");
            return e;
        }
        fail(t, "expected an expression");
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    Program prog_;
};

// Semantic checks on a parsed program.
class Checker {
public:
    explicit Checker(Program& p) : p_(p) {}

    void run() {
        collect_assigned(p_.body);
        infer_booleans();
        p_.boolean_temps = bool_temps_;
        std::vector<std::string> scope;
        check_block(p_.body, scope);
        for (const auto& d : p_.decls) {
            if (d.kind == DeclKind::Output && !assigned_.contains(d.name))
                throw ParseError("output '" + d.name + "' never assigned", d.line, 1);
        }
    }

private:
    [[noreturn]] static void fail(int line, int col, const std::string& msg) { throw ParseError(msg, line, col); }

    void collect_assigned(const std::vector<Stmt>& body) {
        for (const auto& s : body) {
            switch (s.kind) {
            case Stmt::Assign: {
                const Decl* d = p_.find(s.target);
                if (d && d->kind == DeclKind::Input) fail(s.line, s.column, "cannot assign to input '" + s.target + "'");
                if (d && d->is_array() && !s.target_index)
                    fail(s.line, s.column, "array '" + s.target + "' assigned without index");
                if (s.target_index && !(d && d->is_array()))
                    fail(s.line, s.column, "'" + s.target + "' is not an array");
                assigned_.insert(s.target);
                if (!d) temp_rhs_[s.target].push_back(s.rhs);
                break;
            }
            case Stmt::For:
                counters_.insert(s.counter);
                collect_assigned(s.body);
                break;
            case Stmt::If:
                collect_assigned(s.body);
                collect_assigned(s.else_body);
                break;
            case Stmt::Cycle:
                break;
            }
        }
    }

    bool name_is_bool(const Expr& e) const {
        if (const Decl* d = p_.find(e.name)) return d->width == 1u;
        return bool_temps_.contains(e.name);
    }

    void infer_booleans() {
        for (const auto& [name, rhs] : temp_rhs_)
            if (!counters_.contains(name)) bool_temps_.insert(name);
        bool changed = true;
        auto pred = [this](const Expr& e) { return name_is_bool(e); };
        while (changed) {
            changed = false;
            for (const auto& [name, rhss] : temp_rhs_) {
                if (!bool_temps_.contains(name)) continue;
                for (const auto& r : rhss) {
                    if (!is_boolean(*r, pred)) {
                        bool_temps_.erase(name);
                        changed = true;
                        break;
                    }
                }
            }
        }
    }

    void check_expr(const Expr& e, const std::vector<std::string>& scope, bool loop_header) {
        auto in_scope = [&](const std::string& n) { return std::find(scope.begin(), scope.end(), n) != scope.end(); };
        switch (e.kind) {
        case Expr::Const:
            return;
        case Expr::Name: {
            if (in_scope(e.name)) return;
            const Decl* d = p_.find(e.name);
            if (!d && !assigned_.contains(e.name) && !counters_.contains(e.name))
                fail(e.line, e.column, "unknown identifier '" + e.name + "'");
            if (d && d->is_array()) fail(e.line, e.column, "array '" + e.name + "' used without index");
            if (loop_header && d && d->kind != DeclKind::Var)
                fail(e.line, e.column, "loop bound is not constant: depends on '" + e.name + "'");
            return;
        }
        case Expr::ArrayRef:
            if (loop_header) fail(e.line, e.column, "loop bound is not constant: depends on '" + e.name + "'");
            check_expr(*e.args[0], scope, loop_header);
            return;
        default:
            break;
        }
        if (e.kind == Expr::Unary && e.op == Op::Not) require_bool(e, *e.args[0], "~");
        if (e.kind == Expr::Binary && (e.op == Op::And || e.op == Op::Or || e.op == Op::Xor)) {
            require_bool(e, *e.args[0], op_text(e.op));
            require_bool(e, *e.args[1], op_text(e.op));
        }
        for (const auto& a : e.args) check_expr(*a, scope, loop_header);
    }

    void require_bool(const Expr& at, const Expr& operand, const char* op) const {
        auto pred = [this](const Expr& n) { return name_is_bool(n); };
        if (!is_boolean(operand, pred))
            fail(at.line, at.column, std::string("operator '") + op + "' needs 1-bit operands");
    }

    void check_block(const std::vector<Stmt>& body, std::vector<std::string>& scope) {
        for (const auto& s : body) {
            switch (s.kind) {
            case Stmt::Assign:
                if (std::find(scope.begin(), scope.end(), s.target) != scope.end())
                    fail(s.line, s.column, "loop counter '" + s.target + "' assigned inside its loop");
                if (s.target_index) check_expr(*s.target_index, scope, false);
                check_expr(*s.rhs, scope, false);
                break;
            case Stmt::For: {
                if (const Decl* d = p_.find(s.counter); d && d->kind != DeclKind::Var)
                    fail(s.line, s.column, "loop counter '" + s.counter + "' is a declared signal");
                check_expr(*s.init, scope, true);
                scope.push_back(s.counter);
                check_expr(*s.cond, scope, true);
                check_expr(*s.step, scope, true);
                check_block(s.body, scope);
                scope.pop_back();
                break;
            }
            case Stmt::If:
                check_expr(*s.guard, scope, false);
                check_block(s.body, scope);
                check_block(s.else_body, scope);
                break;
            case Stmt::Cycle:
                break;
            }
        }
    }

    Program& p_;
    std::set<std::string> assigned_;
    std::set<std::string> counters_;
    std::map<std::string, std::vector<ExprPtr>> temp_rhs_;
    std::set<std::string> bool_temps_;
};

} // namespace

Program parse(const std::string& text) {
    Program p = Parser(tokenize(text)).run();
    Checker(p).run();
    return p;
}

Program parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ":" + e.what(), 0, 0);
    }
}

} // namespace hedcheck::dfl
