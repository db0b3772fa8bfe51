#include "fold.hpp"

#include "hedcheck/error.hpp"

#include <set>

namespace hedcheck::symsim {

using dfl::Expr;
using dfl::ExprPtr;
using dfl::Stmt;

namespace {

std::string where(const Stmt& s) { return "line " + std::to_string(s.line) + ": "; }

// Scalar names assigned anywhere inside body (array elements excluded).
void scalar_targets(const std::vector<Stmt>& body, std::set<std::string>& out) {
    for (const auto& s : body) {
        if (s.kind == Stmt::Assign && !s.target_index) out.insert(s.target);
        if (s.kind == Stmt::For) out.insert(s.counter);
        scalar_targets(s.body, out);
        scalar_targets(s.else_body, out);
    }
}

class Unroller {
public:
    Unroller(const dfl::Program& p, const SymSimConfig& cfg) : p_(p), cfg_(cfg) {}

    std::vector<Stmt> run() {
        std::vector<Stmt> out;
        block(p_.body, out);
        return out;
    }

private:
    void count() {
        if (++work_ > cfg_.unroll_limit)
            throw Error("unroll limit of " + std::to_string(cfg_.unroll_limit) + " statements exceeded");
    }

    BigInt concrete(const ExprPtr& e, const Stmt& s, const char* what) const {
        auto v = fold(*e, known_);
        if (!v) throw Error(where(s) + "loop " + what + " is not constant: " + dfl::to_string(*e));
        return *v;
    }

    void track(const std::string& name, const ExprPtr& rhs) {
        if (auto v = fold(*rhs, known_))
            known_[name] = *v;
        else
            known_.erase(name);
    }

    void block(const std::vector<Stmt>& body, std::vector<Stmt>& out) {
        for (const auto& s : body) {
            switch (s.kind) {
            case Stmt::Cycle:
                ++cycle_;
                break;
            case Stmt::Assign: {
                count();
                Stmt a = s;
                a.rhs = substitute(s.rhs, counters_, false);
                if (s.target_index) a.target_index = substitute(s.target_index, counters_, true);
                a.group = group_;
                a.cycle = cycle_;
                if (!s.target_index) track(s.target, s.rhs);
                out.push_back(std::move(a));
                break;
            }
            case Stmt::If: {
                if (auto g = fold(*s.guard, known_)) {
                    block(*g != 0 ? s.body : s.else_body, out);
                    break;
                }
                Stmt i = s;
                i.guard = substitute(s.guard, counters_, false);
                i.group = group_;
                i.cycle = cycle_;
                i.body.clear();
                i.else_body.clear();
                const auto before = known_;
                block(s.body, i.body);
                known_ = before;
                block(s.else_body, i.else_body);
                known_ = before;
                std::set<std::string> assigned;
                scalar_targets(s.body, assigned);
                scalar_targets(s.else_body, assigned);
                for (const auto& n : assigned) known_.erase(n);
                out.push_back(std::move(i));
                break;
            }
            case Stmt::For:
                loop(s, out);
                break;
            }
        }
    }

    void loop(const Stmt& s, std::vector<Stmt>& out) {
        const auto saved_counter = counters_.find(s.counter) != counters_.end()
                                       ? std::optional<BigInt>(counters_[s.counter])
                                       : std::nullopt;
        BigInt i = concrete(s.init, s, "start");
        while (true) {
            known_[s.counter] = i;
            counters_[s.counter] = i;
            if (concrete(s.cond, s, "bound") == 0) break;
            count();
            group_ = ++next_group_;
            block(s.body, out);
            known_[s.counter] = i;
            counters_[s.counter] = i;
            i = concrete(s.step, s, "step");
        }
        if (saved_counter)
            counters_[s.counter] = *saved_counter;
        else
            counters_.erase(s.counter);
        // The counter stays readable after the loop with its final value.
        Stmt fin;
        fin.kind = Stmt::Assign;
        fin.target = s.counter;
        fin.rhs = dfl::make_const(i);
        fin.line = s.line;
        fin.column = s.column;
        group_ = ++next_group_;
        fin.group = group_;
        fin.cycle = cycle_;
        out.push_back(std::move(fin));
    }

    const dfl::Program& p_;
    const SymSimConfig& cfg_;
    ConstEnv known_;
    ConstEnv counters_;
    std::size_t work_ = 0;
    int group_ = 0;
    int next_group_ = 0;
    int cycle_ = 0;
};

class Resolver {
public:
    explicit Resolver(const dfl::Program& p) : p_(p) {}

    void block(const std::vector<Stmt>& body, std::vector<Stmt>& out, bool conditional) {
        for (const auto& s : body) {
            if (s.kind == Stmt::Assign)
                assign(s, out, conditional);
            else if (s.kind == Stmt::If)
                branch(s, out, conditional);
            else
                throw Error(where(s) + "unexpected statement after unrolling");
        }
    }

private:
    bool is_temp(const std::string& name) const {
        const dfl::Decl* d = p_.find(name);
        return !d || d->kind == dfl::DeclKind::Var;
    }

    ExprPtr index(const ExprPtr& idx, const std::string& array, const Stmt& s) const {
        ExprPtr e = substitute(idx, env_, true);
        if (e->kind != Expr::Const)
            throw Error(where(s) + "array index of '" + array + "' is not constant after unrolling: " +
                        dfl::to_string(*idx));
        const dfl::Decl* d = p_.find(array);
        if (e->value < 0 || e->value >= *d->length)
            throw Error(where(s) + "index " + e->value.str() + " out of range for '" + array + "'");
        return e;
    }

    // Checks that every array and bit index in e is a literal.
    void check_indices(const Expr& e, const Stmt& s) const {
        if (e.kind == Expr::ArrayRef) index(e.args[0], e.name, s);
        if (e.kind == Expr::BitSelect && e.args[1]->kind != Expr::Const)
            throw Error(where(s) + "bit index is not constant after unrolling: " + dfl::to_string(e));
        for (const auto& a : e.args) check_indices(*a, s);
    }

    void assign(const Stmt& s, std::vector<Stmt>& out, bool conditional) {
        Stmt a = s;
        a.rhs = substitute(s.rhs, env_, true);
        check_indices(*a.rhs, s);
        if (s.target_index) {
            a.target_index = index(s.target_index, s.target, s);
            out.push_back(std::move(a));
            return;
        }
        if (a.rhs->kind == Expr::Const) {
            env_[s.target] = a.rhs->value;
            if (is_temp(s.target) && !conditional) return;
        } else {
            env_.erase(s.target);
        }
        out.push_back(std::move(a));
    }

    void branch(const Stmt& s, std::vector<Stmt>& out, bool conditional) {
        ExprPtr g = substitute(s.guard, env_, true);
        if (g->kind == Expr::Const) {
            block(g->value != 0 ? s.body : s.else_body, out, conditional);
            return;
        }
        check_indices(*g, s);
        std::set<std::string> assigned;
        scalar_targets(s.body, assigned);
        scalar_targets(s.else_body, assigned);
        // A dropped concrete value may be overwritten on one path only; make it explicit again.
        for (const auto& n : assigned) {
            auto it = env_.find(n);
            if (it == env_.end() || !is_temp(n)) continue;
            Stmt m;
            m.kind = Stmt::Assign;
            m.target = n;
            m.rhs = dfl::make_const(it->second);
            m.line = s.line;
            m.column = s.column;
            m.group = s.group;
            m.cycle = s.cycle;
            out.push_back(std::move(m));
        }
        Stmt i = s;
        i.guard = g;
        i.body.clear();
        i.else_body.clear();
        const auto before = env_;
        block(s.body, i.body, true);
        env_ = before;
        block(s.else_body, i.else_body, true);
        env_ = before;
        for (const auto& n : assigned) env_.erase(n);
        out.push_back(std::move(i));
    }

    const dfl::Program& p_;
    ConstEnv env_;
};

} // namespace

std::vector<Stmt> unroll(const dfl::Program& p, const SymSimConfig& cfg) {
    return Unroller(p, cfg).run();
}

std::vector<Stmt> resolve_control(const dfl::Program& p, const std::vector<Stmt>& stmts) {
    std::vector<Stmt> out;
    Resolver(p).block(stmts, out, false);
    return out;
}

} // namespace hedcheck::symsim
