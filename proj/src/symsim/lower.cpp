#include "fold.hpp"

#include "hedcheck/error.hpp"

#include <set>

namespace hedcheck {
namespace symsim {

using dfl::Expr;
using dfl::ExprPtr;
using dfl::Stmt;

namespace {

// Storage key of an assignment target or a read: "x" or "a[3]".
std::string key_of(const std::string& name, const ExprPtr& index) {
    return index ? name + "[" + index->value.str() + "]" : name;
}

std::string read_key(const Expr& e) {
    return e.kind == Expr::ArrayRef ? key_of(e.name, e.args[0]) : e.name;
}

// Rewrites every Name/ArrayRef read through f (which returns nullptr to keep it).
template <class F>
ExprPtr map_reads(const ExprPtr& e, const F& f) {
    if (e->kind == Expr::Name || e->kind == Expr::ArrayRef)
        if (ExprPtr r = f(*e)) return r;
    if (e->kind == Expr::ArrayRef || e->args.empty()) return e;
    auto n = std::make_shared<Expr>(*e);
    bool changed = false;
    for (auto& a : n->args) {
        ExprPtr m = map_reads(a, f);
        changed |= m != a;
        a = m;
    }
    return changed ? ExprPtr(n) : e;
}

ExprPtr read_expr(const std::string& name, const ExprPtr& index) {
    return index ? dfl::make_array_ref(name, index) : dfl::make_name(name);
}

class Lowerer {
public:
    explicit Lowerer(const dfl::Program& p) : p_(p) {
        for (const auto& d : p.decls) {
            if (!d.is_input()) continue;
            if (d.is_array())
                for (unsigned i = 0; i < *d.length; ++i) defined_.insert(d.name + "[" + std::to_string(i) + "]");
            else
                defined_.insert(d.name);
        }
        for (const auto& d : p.decls) taken_.insert(d.name);
        collect_targets(p.body);
    }

    std::vector<Stmt> block(const std::vector<Stmt>& body, std::set<std::string>& defined) {
        std::vector<Stmt> out;
        for (const auto& s : body) {
            if (s.kind == Stmt::Assign) {
                defined.insert(key_of(s.target, s.target_index));
                out.push_back(s);
            } else {
                lower_if(s, out, defined);
            }
        }
        return out;
    }

    std::set<std::string> defined_;
    std::vector<std::string> assumptions;

private:
    void collect_targets(const std::vector<Stmt>& body) {
        for (const auto& s : body) {
            if (s.kind == Stmt::Assign) taken_.insert(s.target);
            collect_targets(s.body);
            collect_targets(s.else_body);
        }
    }

    // Generated names step around names the program itself uses.
    std::string fresh(std::string name) {
        while (taken_.contains(name)) name += "_";
        taken_.insert(name);
        return name;
    }

    bool is_bool_read(const Expr& e) const {
        if (const dfl::Decl* d = p_.find(e.name)) return d->width == 1u;
        return p_.boolean_temps.contains(e.name);
    }

    struct Branch {
        std::vector<Stmt> stmts;
        std::map<std::string, std::string> renamed;  // key -> branch-local name
    };

    // Moves every write of the branch to a branch-local scalar and redirects later reads.
    Branch localize(std::vector<Stmt> stmts, const std::string& tag) {
        Branch b;
        for (auto& s : stmts) {
            s.rhs = map_reads(s.rhs, [&](const Expr& r) -> ExprPtr {
                auto it = b.renamed.find(read_key(r));
                return it == b.renamed.end() ? nullptr : dfl::make_name(it->second);
            });
            const std::string key = key_of(s.target, s.target_index);
            auto it = b.renamed.find(key);
            if (it == b.renamed.end()) {
                std::string base = s.target_index ? element_name(s.target, s.target_index->value) : s.target;
                it = b.renamed.emplace(key, fresh(base + "__" + tag)).first;
                order_.push_back(key);
                targets_[key] = {s.target, s.target_index};
            }
            s.target = it->second;
            s.target_index = nullptr;
            b.stmts.push_back(std::move(s));
        }
        return b;
    }

    void lower_if(const Stmt& s, std::vector<Stmt>& out, std::set<std::string>& defined) {
        const int k = ++if_count_;
        auto then_defined = defined;
        auto else_defined = defined;
        Branch t = localize(block(s.body, then_defined), "t" + std::to_string(k));
        Branch e = localize(block(s.else_body, else_defined), "e" + std::to_string(k));

        auto pred = [this](const Expr& n) { return is_bool_read(n); };
        ExprPtr guard = s.guard;
        if (!dfl::is_boolean(*guard, pred)) {
            assumptions.push_back("line " + std::to_string(s.line) + ": word guard '" + dfl::to_string(*guard) +
                                  "' merged as (guard != 0)");
            guard = dfl::make_binary(dfl::Op::Ne, guard, dfl::make_const(0));
        }
        // The branches may overwrite what the guard reads, so it is captured first.
        const dfl::Decl* gd = guard->kind == Expr::Name ? p_.find(guard->name) : nullptr;
        if (!(gd && gd->kind == dfl::DeclKind::Input) && guard->kind != Expr::Const) {
            Stmt g;
            g.kind = Stmt::Assign;
            g.target = fresh("g__" + std::to_string(k));
            g.rhs = guard;
            g.line = s.line;
            g.column = s.column;
            g.group = s.group;
            g.cycle = s.cycle;
            guard = dfl::make_name(g.target);
            out.push_back(std::move(g));
        }
        for (auto& st : t.stmts) out.push_back(std::move(st));
        for (auto& st : e.stmts) out.push_back(std::move(st));

        std::set<std::string> done;
        for (const auto& key : order_) {
            if (done.contains(key)) continue;
            auto ti = t.renamed.find(key);
            auto ei = e.renamed.find(key);
            if (ti == t.renamed.end() && ei == e.renamed.end()) continue;
            done.insert(key);
            const auto& [name, index] = targets_.at(key);
            Stmt m;
            m.kind = Stmt::Assign;
            m.target = name;
            m.target_index = index;
            m.line = s.line;
            m.column = s.column;
            m.group = s.group;
            m.cycle = s.cycle;
            ExprPtr tv = ti != t.renamed.end() ? dfl::make_name(ti->second) : nullptr;
            ExprPtr ev = ei != e.renamed.end() ? dfl::make_name(ei->second) : nullptr;
            if (!defined.contains(key) && (!tv || !ev)) {
                // Only one path defines it; the other path never reads it.
                m.rhs = tv ? tv : ev;
            } else {
                if (!tv) tv = read_expr(name, index);
                if (!ev) ev = read_expr(name, index);
                m.rhs = dfl::make_ternary(guard, tv, ev);
            }
            defined.insert(key);
            out.push_back(std::move(m));
        }
    }

    const dfl::Program& p_;
    std::set<std::string> taken_;
    int if_count_ = 0;
    std::vector<std::string> order_;
    std::map<std::string, std::pair<std::string, ExprPtr>> targets_;
};

} // namespace

Lowered lower_conditionals(const dfl::Program& p, const std::vector<Stmt>& stmts) {
    Lowerer l(p);
    Lowered out;
    auto defined = l.defined_;
    out.stmts = l.block(stmts, defined);
    out.assumptions = std::move(l.assumptions);
    return out;
}

AssignmentList ssa_rename(const dfl::Program& p, const Lowered& lowered) {
    AssignmentList list;
    std::map<std::string, std::string> current;  // key -> SSA name
    std::map<std::string, unsigned> versions;
    std::set<std::string> used;
    std::map<std::string, std::optional<unsigned>> input_width;

    for (const auto& d : p.decls) {
        if (!d.is_input()) continue;
        for (unsigned i = 0; i < (d.is_array() ? *d.length : 1u); ++i) {
            std::string key = d.is_array() ? d.name + "[" + std::to_string(i) + "]" : d.name;
            std::string name = d.is_array() ? element_name(d.name, i) : d.name;
            if (!used.insert(name).second) throw Error("input symbol '" + name + "' is ambiguous");
            current[key] = name;
            input_width[name] = d.width;
        }
    }
    for (const auto& d : p.decls)
        if (!d.is_input()) used.insert(d.name);

    std::set<std::string> bool_names;
    for (const auto& [n, w] : input_width)
        if (w == 1u) bool_names.insert(n);
    auto pred = [&](const Expr& e) { return bool_names.contains(e.name); };

    std::vector<ListStmt> all;
    for (const auto& s : lowered.stmts) {
        ExprPtr rhs = map_reads(s.rhs, [&](const Expr& r) -> ExprPtr {
            auto it = current.find(read_key(r));
            if (it == current.end())
                throw Error("line " + std::to_string(s.line) + ": '" + read_key(r) + "' read before it is written");
            return dfl::make_name(it->second);
        });
        std::function<void(const Expr&)> check_bits = [&](const Expr& e) {
            if (e.kind == Expr::BitSelect && e.args[1]->kind != Expr::Const)
                throw Error("line " + std::to_string(s.line) + ": bit index must be constant");
            for (const auto& a : e.args) check_bits(*a);
        };
        check_bits(*rhs);
        const std::string key = key_of(s.target, s.target_index);
        const std::string base = s.target_index ? element_name(s.target, s.target_index->value) : s.target;
        std::string name;
        do {
            name = base + "_" + std::to_string(++versions[key]);
        } while (used.contains(name));
        used.insert(name);
        current[key] = name;
        ListStmt ls{name, rhs, s.group, s.cycle, dfl::is_boolean(*rhs, pred)};
        if (ls.boolean) bool_names.insert(name);
        all.push_back(std::move(ls));
    }

    for (const auto& d : p.decls) {
        if (!d.is_output()) continue;
        for (unsigned i = 0; i < (d.is_array() ? *d.length : 1u); ++i) {
            std::string key = d.is_array() ? d.name + "[" + std::to_string(i) + "]" : d.name;
            std::string ext = d.is_array() ? element_name(d.name, i) : d.name;
            auto it = current.find(key);
            if (it == current.end()) throw Error("output '" + ext + "' is never assigned");
            list.outputs.push_back({ext, it->second, d.width});
        }
    }

    std::set<std::string> seen;
    for (auto& st : all) {
        map_reads(st.rhs, [&](const Expr& r) -> ExprPtr {
            if (input_width.contains(r.name) && seen.insert(r.name).second)
                list.inputs.push_back({r.name, input_width[r.name]});
            return nullptr;
        });
        list.stmts.push_back(std::move(st));
    }
    for (const auto& in : input_symbols(p))
        if (seen.insert(in.name).second) list.inputs.push_back(in);
    list.assumptions = lowered.assumptions;
    return list;
}

} // namespace symsim

AssignmentList prune_dead(const AssignmentList& list) {
    std::set<std::string> live;
    for (const auto& o : list.outputs) live.insert(o.ssa);
    std::vector<bool> keep(list.stmts.size(), false);
    for (std::size_t i = list.stmts.size(); i-- > 0;) {
        if (!live.contains(list.stmts[i].lhs)) continue;
        keep[i] = true;
        symsim::map_reads(list.stmts[i].rhs, [&](const dfl::Expr& r) -> dfl::ExprPtr {
            live.insert(r.name);
            return nullptr;
        });
    }
    AssignmentList out = list;
    out.stmts.clear();
    for (std::size_t i = 0; i < list.stmts.size(); ++i)
        if (keep[i]) out.stmts.push_back(list.stmts[i]);
    return out;
}

AssignmentList sym_sim(const dfl::Program& p, const SymSimConfig& cfg) {
    using namespace symsim;
    AssignmentList list = ssa_rename(p, lower_conditionals(p, resolve_control(p, unroll(p, cfg))));
    return cfg.prune_dead ? prune_dead(list) : list;
}

} // namespace hedcheck
