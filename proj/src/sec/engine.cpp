#include "hedcheck/sec.hpp"

#include "hedcheck/error.hpp"

#include <algorithm>
#include <map>

namespace hedcheck {

const char* result_text(Result r) { return r == Result::Equivalent ? "EQUIVALENT" : "UNEQUIVALENT"; }

namespace {

constexpr std::size_t kDiffTerms = 8;

void collect_names(const dfl::Expr& e, std::vector<std::string>& out) {
    if (e.kind == dfl::Expr::Name) out.push_back(e.name);
    for (const auto& a : e.args) collect_names(*a, out);
}

void register_inputs(ExprBuilder& b, const AssignmentList& spec, const AssignmentList& impl) {
    for (const auto& in : spec.inputs) b.input(in.name, in.width);
    for (const auto& in : impl.inputs) b.input(in.name, in.width);
    b.prescan(spec);
    b.prescan(impl);
}

} // namespace

SecEngine::SecEngine(const AssignmentList& spec, const AssignmentList& impl, const SecConfig& cfg)
    : cfg_(cfg), builder_(m_) {
    if (cfg_.width && (*cfg_.width < 1 || *cfg_.width > 64)) throw Error("width must be in [1, 64]");
    if (cfg_.max_nodes < 1) throw Error("node budget must be at least 1");
    d_[0].list = prune_dead(spec);
    d_[1].list = prune_dead(impl);
    correspondence();  // reject malformed pairings before any work
    register_inputs(builder_, d_[0].list, d_[1].list);
    for (Design& d : d_) {
        const auto& stmts = d.list.stmts;
        d.reads.resize(stmts.size());
        for (const auto& in : d.list.inputs)
            if (in.width == 1u) d.booleans.insert(in.name);
        for (std::size_t i = 0; i < stmts.size(); ++i) {
            if (!d.def.emplace(stmts[i].lhs, i).second) throw Error("'" + stmts[i].lhs + "' assigned twice");
            collect_names(*stmts[i].rhs, d.reads[i]);
            if (stmts[i].boolean) d.booleans.insert(stmts[i].lhs);
            d.pending.push_back(i);
        }
        for (const auto& o : d.list.outputs) d.design_outputs.insert(o.ssa);
    }
    counters_.spec_statements = d_[0].list.stmts.size();
    counters_.impl_statements = d_[1].list.stmts.size();
    m_.reset_peak();
}

void SecEngine::log(const std::string& msg) {
    if (cfg_.trace) trace_.push_back(msg);
}

HedRef SecEngine::value(Side side, const std::string& name) {
    const Design& d = d_[int(side)];
    if (auto it = d.env.find(name); it != d.env.end()) return it->second;
    if (builder_.is_input(name)) return builder_.input_ref(name);
    throw Error("'" + name + "' has no value in the " + (side == Side::Spec ? "spec" : "impl") +
                " environment");
}

void SecEngine::add(Side side) {
    Design& d = d_[int(side)];
    const std::size_t i = d.pending.front();
    d.pending.pop_front();
    const ListStmt& s = d.list.stmts[i];
    auto lookup = [&](const std::string& n) { return value(side, n); };
    auto is_bool = [&](const std::string& n) { return d.booleans.contains(n); };
    d.env[s.lhs] = builder_.build(*s.rhs, lookup, is_bool, s.lhs);
    d.segment.insert(i);
    counters_.peak_node_count = std::max(counters_.peak_node_count, m_.peak_node_count());
}

void SecEngine::remove_last(Side side, std::size_t stmt) {
    Design& d = d_[int(side)];
    d.segment.erase(stmt);
    d.env.erase(d.list.stmts[stmt].lhs);
    d.pending.push_front(stmt);
}

void SecEngine::collect() {
    std::vector<HedRef> roots = builder_.atoms().roots();
    for (const Design& d : d_)
        for (const auto& [name, ref] : d.env) roots.push_back(ref);
    m_.collect_garbage(roots);
    canon_cache_.clear();
}

void SecEngine::extend(Side side, std::size_t count) {
    for (std::size_t k = 0; k < count && !d_[int(side)].pending.empty(); ++k) add(side);
}

void SecEngine::select_segments(bool force) {
    bool stop[2], added[2] = {false, false};
    for (int s = 0; s < 2; ++s) stop[s] = d_[s].pending.empty();
    auto ratio = [&](int s) {
        const double total = double(d_[s].list.stmts.size());
        return total == 0 ? 1.0 : (total - double(d_[s].pending.size())) / total;
    };
    while (!stop[0] || !stop[1]) {
        const int s = stop[0] ? 1 : stop[1] ? 0 : (ratio(1) < ratio(0) ? 1 : 0);
        Design& d = d_[s];
        const bool was_empty = d.segment.empty();
        const std::size_t idx = d.pending.front();
        add(Side(s));
        if (m_.node_count() > cfg_.max_nodes) {
            collect();
            if (m_.node_count() > cfg_.max_nodes) {
                stop[s] = true;
                if (was_empty || (force && !added[s])) {
                    ++counters_.budget_overflows;
                    added[s] = true;
                    log("statement '" + d.list.stmts[idx].lhs + "' alone exceeds the node budget");
                } else {
                    remove_last(Side(s), idx);
                }
                continue;
            }
        }
        added[s] = true;
        if (d.pending.empty()) stop[s] = true;
    }
    if (!added[0] && !added[1]) return;
    ++counters_.segments;
    log("segment " + std::to_string(counters_.segments) + ": spec " + std::to_string(d_[0].segment.size()) +
        " stmts, impl " + std::to_string(d_[1].segment.size()) + " stmts, " + std::to_string(m_.node_count()) +
        " nodes");
}

std::vector<std::size_t> SecEngine::output_stmts(Side side) const {
    const Design& d = d_[int(side)];
    std::set<std::string> read_inside;
    for (std::size_t i : d.segment)
        for (const auto& n : d.reads[i]) read_inside.insert(n);
    std::vector<std::size_t> out;
    for (std::size_t i : d.segment) {
        const std::string& lhs = d.list.stmts[i].lhs;
        if (!read_inside.contains(lhs) || d.design_outputs.contains(lhs)) out.push_back(i);
    }
    return out;
}

std::vector<std::string> SecEngine::outputs(Side side) const {
    std::vector<std::string> out;
    for (std::size_t i : output_stmts(side)) out.push_back(d_[int(side)].list.stmts[i].lhs);
    return out;
}

std::vector<std::string> SecEngine::segment(Side side) const {
    std::vector<std::string> out;
    for (std::size_t i : d_[int(side)].segment) out.push_back(d_[int(side)].list.stmts[i].lhs);
    return out;
}

HedRef SecEngine::canonical(const HedRef& r) {
    if (!cfg_.width) return r;
    if (auto it = canon_cache_.find(r); it != canon_cache_.end()) return it->second;
    HedRef c = reduce_mod(m_, r, RingConfig{*cfg_.width, true});
    canon_cache_.emplace(r, c);
    return c;
}

bool SecEngine::is_basis(const HedRef& r) const {
    if (r.is_constant()) return true;
    return r.weight == 1 && m_.const_edge(r.node).is_zero() && m_.linear_edge(r.node) == m_.one();
}

std::vector<SecEngine::Match> SecEngine::equ_checking() {
    // Buckets keep discovery order so cut numbering is deterministic.
    std::vector<std::pair<HedRef, Match>> buckets;
    std::unordered_map<HedRef, std::size_t, HedRefHash> where;
    for (int s = 0; s < 2; ++s) {
        for (std::size_t i : output_stmts(Side(s))) {
            const std::string& lhs = d_[s].list.stmts[i].lhs;
            HedRef c = canonical(d_[s].env.at(lhs));
            auto [it, fresh] = where.emplace(c, buckets.size());
            if (fresh) buckets.push_back({c, {}});
            Match& m = buckets[it->second].second;
            (s == 0 ? m.spec : m.impl).push_back(lhs);
        }
    }
    std::vector<Match> out;
    for (auto& [c, m] : buckets)
        if (!m.spec.empty() && !m.impl.empty()) out.push_back(std::move(m));
    return out;
}

void SecEngine::update(const std::vector<Match>& matches) {
    std::set<std::string> matched[2];
    for (const Match& mt : matches) {
        const HedRef v = d_[0].env.at(mt.spec.front());
        bool same = true;
        for (const auto& n : mt.spec) same &= d_[0].env.at(n) == v;
        for (const auto& n : mt.impl) same &= d_[1].env.at(n) == v;
        std::string cut;
        if (!(same && is_basis(v))) {
            cut = "$cut" + std::to_string(counters_.cut_vars++);
            VarId c = m_.add_var(cut);
            if (!same) builder_.modular_cuts.insert(c);
            const HedRef r = m_.mk_var(c);
            for (const auto& n : mt.spec) d_[0].env[n] = r;
            for (const auto& n : mt.impl) d_[1].env[n] = r;
        }
        for (const auto& s : mt.spec)
            for (const auto& i : mt.impl) matched_.push_back({s, i, cut});
        matched[0].insert(mt.spec.begin(), mt.spec.end());
        matched[1].insert(mt.impl.begin(), mt.impl.end());
        log("match {" + mt.spec.front() + (mt.spec.size() > 1 ? ", ..." : "") + "} = {" + mt.impl.front() +
            (mt.impl.size() > 1 ? ", ..." : "") + "}" + (cut.empty() ? "" : " as " + cut));
    }

    for (int s = 0; s < 2; ++s) {
        Design& d = d_[s];
        // Unmatched outputs and their in-segment fanin stay; matched values are cut off.
        std::set<std::size_t> keep;
        std::vector<std::size_t> work;
        for (std::size_t i : output_stmts(Side(s)))
            if (!matched[s].contains(d.list.stmts[i].lhs)) work.push_back(i);
        while (!work.empty()) {
            std::size_t i = work.back();
            work.pop_back();
            if (!keep.insert(i).second) continue;
            for (const auto& n : d.reads[i]) {
                auto it = d.def.find(n);
                if (it != d.def.end() && d.segment.contains(it->second) && !matched[s].contains(n))
                    work.push_back(it->second);
            }
        }
        d.segment = std::move(keep);

        std::set<std::string> live(d.design_outputs.begin(), d.design_outputs.end());
        for (std::size_t i : d.pending) live.insert(d.reads[i].begin(), d.reads[i].end());
        for (std::size_t i : d.segment) {
            live.insert(d.list.stmts[i].lhs);
            live.insert(d.reads[i].begin(), d.reads[i].end());
        }
        std::erase_if(d.env, [&](const auto& kv) { return !live.contains(kv.first); });
    }
    collect();
}

bool SecEngine::internal_equ() {
    ++counters_.internal_equ_calls;
    for (int s = 0; s < 2; ++s) {
        Design& d = d_[s];
        const auto saved_segment = d.segment;
        const auto saved_pending = d.pending;
        const auto saved_env = d.env;
        while (!d.segment.empty()) {
            // Peel the sinks of the segment; they do not read each other.
            std::set<std::string> read_inside;
            for (std::size_t i : d.segment)
                for (const auto& n : d.reads[i]) read_inside.insert(n);
            std::vector<std::size_t> sinks;
            for (std::size_t i : d.segment)
                if (!read_inside.contains(d.list.stmts[i].lhs)) sinks.push_back(i);
            for (auto it = sinks.rbegin(); it != sinks.rend(); ++it) remove_last(Side(s), *it);
            ++counters_.peels;
            log(std::string("peel ") + (s == 0 ? "spec" : "impl") + " outputs, " +
                std::to_string(d.segment.size()) + " stmts left");
            if (d.segment.empty()) break;
            auto m = equ_checking();
            if (!m.empty()) {
                update(m);
                return true;
            }
        }
        d.segment = saved_segment;
        d.pending = saved_pending;
        d.env = saved_env;
    }
    return false;
}

std::vector<std::pair<std::string, std::string>> SecEngine::correspondence() const {
    const AssignmentList& spec = d_[0].list;
    const AssignmentList& impl = d_[1].list;
    std::vector<std::pair<std::string, std::string>> out;
    std::set<std::string> used;
    for (const auto& [s, i] : cfg_.output_map)
        if (!spec.find_output(s)) throw Error("output map names '" + s + "', which is not a spec output");
    for (const auto& o : spec.outputs) {
        auto it = cfg_.output_map.find(o.external);
        const std::string target = it != cfg_.output_map.end() ? it->second : o.external;
        if (!impl.find_output(target))
            throw Error("spec output '" + o.external + "' has no implementation output '" + target + "'");
        if (!used.insert(target).second) throw Error("implementation output '" + target + "' is mapped twice");
        out.emplace_back(o.external, target);
    }
    for (const auto& o : impl.outputs)
        if (!used.contains(o.external))
            throw Error("implementation output '" + o.external + "' has no spec counterpart");
    return out;
}

Verdict SecEngine::finish() {
    Verdict v;
    const auto pairs = correspondence();
    auto equal = [&](Manager& m, const HedRef& a, const HedRef& b) {
        return a == b || (cfg_.width && equiv_mod(m, a, b, RingConfig{*cfg_.width, true}));
    };
    auto difference = [&](Manager& m, const HedRef& a, const HedRef& b) {
        HedRef d = m.sub(a, b);
        if (cfg_.width) d = reduce_mod(m, d, RingConfig{*cfg_.width, true});
        return format_ref(m, d, kDiffTerms);
    };

    std::vector<std::pair<std::string, std::string>> residual;
    for (const auto& [s, i] : pairs) {
        HedRef a = value(Side::Spec, d_[0].list.find_output(s)->ssa);
        HedRef b = value(Side::Impl, d_[1].list.find_output(i)->ssa);
        if (equal(m_, a, b))
            v.outputs.push_back(s + "=" + i);
        else
            residual.emplace_back(s, i);
    }
    counters_.peak_node_count = std::max(counters_.peak_node_count, m_.peak_node_count());

    std::vector<std::string> notes = builder_.inexact;
    if (!residual.empty() && cfg_.confirm) {
        // Cut variables forget how a value was computed; recheck without them.
        ++counters_.confirmations;
        log("confirming " + std::to_string(residual.size()) + " residual outputs by full substitution");
        Manager m;
        ExprBuilder b(m);
        register_inputs(b, d_[0].list, d_[1].list);
        auto spec_out = substitute_outputs(b, d_[0].list);
        auto impl_out = substitute_outputs(b, d_[1].list);
        for (const auto& [s, i] : residual) {
            const HedRef& a = spec_out.at(s);
            const HedRef& c = impl_out.at(i);
            if (equal(m, a, c))
                v.outputs.push_back(s + "=" + i);
            else
                v.unmatched.push_back({s, i, difference(m, a, c)});
        }
        for (const auto& n : b.inexact)
            if (std::find(notes.begin(), notes.end(), n) == notes.end()) notes.push_back(n);
    } else {
        for (const auto& [s, i] : residual) {
            HedRef a = value(Side::Spec, d_[0].list.find_output(s)->ssa);
            HedRef b = value(Side::Impl, d_[1].list.find_output(i)->ssa);
            v.unmatched.push_back({s, i, difference(m_, a, b)});
        }
    }

    v.result = v.unmatched.empty() ? Result::Equivalent : Result::Unequivalent;
    v.matched = matched_;
    v.counters = counters_;
    v.inexact = std::move(notes);
    for (const auto& a : d_[0].list.assumptions) v.assumptions.push_back("spec: " + a);
    for (const auto& a : d_[1].list.assumptions) v.assumptions.push_back("impl: " + a);
    v.trace = trace_;
    return v;
}

Verdict SecEngine::run() {
    bool force = false;
    while (true) {
        select_segments(force);
        force = false;
        auto m = equ_checking();
        if (!m.empty()) {
            update(m);
            continue;
        }
        // Peeling needs something to compare against on both sides.
        if (!d_[0].segment.empty() && !d_[1].segment.empty() && internal_equ()) continue;
        // No internal match either; only more statements can help.
        if (!d_[0].pending.empty() || !d_[1].pending.empty()) {
            force = true;
            continue;
        }
        break;
    }
    return finish();
}

Verdict sec_piped(const AssignmentList& spec, const AssignmentList& impl, const SecConfig& cfg) {
    return SecEngine(spec, impl, cfg).run();
}

} // namespace hedcheck
