// hedcheck: equivalence checking of dataflow programs against pipelined implementations.

#include "hedcheck/error.hpp"
#include "hedcheck/modular.hpp"
#include "hedcheck/pipeline.hpp"
#include "hedcheck/report.hpp"
#include "hedcheck/sec.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace hedcheck;

namespace {

constexpr int kExitEquivalent = 0;
constexpr int kExitUnequivalent = 1;
constexpr int kExitError = 2;

std::size_t parse_nodes(const std::string& text) {
    if (text == "unlimited" || text == "inf") return kUnlimitedNodes;
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(text, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != text.size() || v < 1) throw Error("node budget must be a positive integer or 'unlimited', got '" + text + "'");
    return static_cast<std::size_t>(v);
}

std::size_t default_max_nodes() {
    if (const char* env = std::getenv("HEDCHECK_MAX_NODES")) return parse_nodes(env);
    return SecConfig{}.max_nodes;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
}

AssignmentList simulate_file(const std::string& path, std::size_t unroll_limit, bool file_order = false) {
    dfl::Program p = dfl::parse_file(path);
    SymSimConfig cfg;
    cfg.unroll_limit = unroll_limit;
    AssignmentList l = sym_sim(p, cfg);
    if (file_order) l.inputs = input_symbols(p);
    return l;
}

struct CheckOptions {
    std::string spec, impl;
    std::optional<unsigned> width;
    std::string max_nodes;
    std::string outputs_map;
    std::string report;
    std::string order = "first-appearance";
    std::size_t unroll_limit = SymSimConfig{}.unroll_limit;
    bool trace = false;
    bool no_confirm = false;
};

void print_verdict(const Verdict& v) {
    std::cout << result_text(v.result) << "\n";
    std::cout << "  outputs agreeing: " << v.outputs.size() << ", differing: " << v.unmatched.size() << "\n";
    const SecCounters& c = v.counters;
    std::cout << "  segments " << c.segments << ", internal-equ calls " << c.internal_equ_calls << ", peels " << c.peels
              << ", cut variables " << c.cut_vars << ", peak nodes " << c.peak_node_count << "\n";
    for (const auto& u : v.unmatched)
        std::cout << "  output " << u.spec << (u.spec == u.impl ? "" : "/" + u.impl) << " differs by " << u.difference
                  << "\n";
    for (const auto& n : v.inexact) std::cout << "  inexact: " << n << "\n";
    for (const auto& a : v.assumptions) std::cout << "  assumption: " << a << "\n";
    for (const auto& t : v.trace) std::cout << "  trace: " << t << "\n";
}

int run_check(const CheckOptions& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const bool file_order = o.order == "file";
    AssignmentList spec = simulate_file(o.spec, o.unroll_limit, file_order);
    AssignmentList impl = simulate_file(o.impl, o.unroll_limit, file_order);
    SecConfig cfg;
    cfg.width = o.width;
    cfg.max_nodes = o.max_nodes.empty() ? default_max_nodes() : parse_nodes(o.max_nodes);
    cfg.trace = o.trace;
    cfg.confirm = !o.no_confirm;
    if (!o.outputs_map.empty()) cfg.output_map = load_output_map(o.outputs_map);
    Verdict v = sec_piped(spec, impl, cfg);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    print_verdict(v);
    if (!o.report.empty()) write_text(o.report, report_json(v, {o.spec, o.impl, cfg, ms}));
    return v.result == Result::Equivalent ? kExitEquivalent : kExitUnequivalent;
}

int run_canon(const std::string& path, std::optional<unsigned> width, const std::string& output,
              std::size_t unroll_limit) {
    AssignmentList l = simulate_file(path, unroll_limit);
    if (!l.find_output(output)) throw Error("'" + output + "' is not an output of " + path);
    Manager m;
    ExprBuilder b(m);
    for (const auto& in : l.inputs) b.input(in.name, in.width);
    HedRef r = substitute_outputs(b, l).at(output);
    if (width) r = reduce_mod(m, r, RingConfig{*width, true});
    std::cout << format_ref(m, r) << "\n";
    for (const auto& n : b.inexact) std::cerr << "inexact: " << n << "\n";
    return kExitEquivalent;
}

// Manifest lines: <spec> <impl> <EQUIVALENT|UNEQUIVALENT> [width|-]; paths relative to the manifest.
int run_corpus(const std::string& manifest, const std::string& max_nodes) {
    std::ifstream in(manifest);
    if (!in) throw Error("cannot open manifest '" + manifest + "'");
    const auto dir = std::filesystem::path(manifest).parent_path();
    std::string line;
    int n = 0, failures = 0, entries = 0;
    while (std::getline(in, line)) {
        ++n;
        std::istringstream f(line);
        std::string spec, impl, expected, width = "-";
        if (!(f >> spec) || spec[0] == '#') continue;
        if (!(f >> impl >> expected)) throw Error("manifest line " + std::to_string(n) + ": expected spec, impl, verdict");
        f >> width;
        if (expected != "EQUIVALENT" && expected != "UNEQUIVALENT")
            throw Error("manifest line " + std::to_string(n) + ": unknown verdict '" + expected + "'");
        SecConfig cfg;
        cfg.max_nodes = max_nodes.empty() ? default_max_nodes() : parse_nodes(max_nodes);
        if (width != "-") cfg.width = static_cast<unsigned>(std::stoul(width));
        ++entries;
        Verdict v = sec_piped(sym_sim(dfl::parse_file((dir / spec).string())),
                              sym_sim(dfl::parse_file((dir / impl).string())), cfg);
        const bool ok = expected == result_text(v.result);
        failures += !ok;
        std::cout << (ok ? "ok   " : "FAIL ") << spec << " " << impl << " " << result_text(v.result) << "\n";
    }
    std::cout << entries - failures << "/" << entries << " entries as expected\n";
    return failures == 0 ? kExitEquivalent : kExitUnequivalent;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Equivalence checking of dataflow specifications against pipelined implementations"};
    app.require_subcommand(1);
    std::size_t unroll_limit = SymSimConfig{}.unroll_limit;
    app.add_option("--unroll-limit", unroll_limit, "Maximum statements produced by loop unrolling")
        ->check(CLI::PositiveNumber);

    CheckOptions check;
    auto* c = app.add_subcommand("check", "Check a specification against an implementation");
    c->add_option("spec", check.spec, "Specification program")->required();
    c->add_option("impl", check.impl, "Implementation program")->required();
    c->add_option("--width", check.width, "Compare modulo 2^N; integers when absent")->check(CLI::Range(1, 64));
    c->add_option("--max-nodes", check.max_nodes, "Node budget per segment pair (or 'unlimited'; default $HEDCHECK_MAX_NODES or 1000000)");
    c->add_option("--outputs-map", check.outputs_map, "Two-column file pairing spec outputs with impl outputs");
    c->add_option("--report", check.report, "Write a JSON report ('-' for stdout)");
    c->add_option("--order", check.order, "Input variable order")
        ->check(CLI::IsMember({"first-appearance", "file"}));
    c->add_flag("--trace", check.trace, "Print segment and match events");
    c->add_flag("--no-confirm", check.no_confirm, "Skip the full-substitution recheck of differing outputs");

    std::string sim_path, sim_out;
    bool sim_prune = false, sim_dfl = false;
    auto* s = app.add_subcommand("simulate", "Print the assignment list of a program");
    s->add_option("program", sim_path)->required();
    s->add_flag("--prune", sim_prune, "Drop statements no output depends on");
    s->add_flag("--dfl", sim_dfl, "Print as a DFL program");
    s->add_option("-o,--out", sim_out, "Output file");

    std::string canon_path, canon_output;
    std::optional<unsigned> canon_width;
    auto* k = app.add_subcommand("canon", "Print the canonical polynomial of one output");
    k->add_option("program", canon_path)->required();
    k->add_option("--width", canon_width, "Reduce modulo 2^N")->check(CLI::Range(1, 64));
    k->add_option("--output", canon_output, "Output name")->required();

    std::string pipe_path, pipe_latency, pipe_out;
    std::string pipe_ii;
    auto* p = app.add_subcommand("pipeline", "Emit a pipelined implementation of a program");
    p->add_option("program", pipe_path)->required();
    p->add_option("--ii", pipe_ii, "Initiation interval, or 'min' for the resource bound")
        ->required()
        ->check(CLI::PositiveNumber | CLI::IsMember({"min"}));
    p->add_option("--latency", pipe_latency, "JSON latency and resource model");
    p->add_option("-o,--out", pipe_out, "Output file");

    std::string mut_path, mut_out;
    std::uint64_t mut_seed = 0;
    auto* m = app.add_subcommand("mutate", "Emit a program with one injected change");
    m->add_option("program", mut_path)->required();
    m->add_option("--seed", mut_seed, "Random seed")->required();
    m->add_option("-o,--out", mut_out, "Output file");

    std::string or_spec, or_impl, or_map;
    std::optional<unsigned> or_width;
    auto* o = app.add_subcommand("oracle", "Decide equivalence by full substitution, without segmentation");
    o->add_option("spec", or_spec)->required();
    o->add_option("impl", or_impl)->required();
    o->add_option("--width", or_width, "Compare modulo 2^N")->check(CLI::Range(1, 64));
    o->add_option("--outputs-map", or_map, "Two-column output pairing file");

    std::string manifest, corpus_nodes;
    auto* r = app.add_subcommand("corpus", "Check every entry of a corpus manifest");
    r->add_option("manifest", manifest)->required();
    r->add_option("--max-nodes", corpus_nodes, "Node budget");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : kExitError;
    }

    try {
        if (*c) {
            check.unroll_limit = unroll_limit;
            return run_check(check);
        }
        if (*s) {
            SymSimConfig cfg;
            cfg.unroll_limit = unroll_limit;
            cfg.prune_dead = sim_prune;
            AssignmentList l = sym_sim(dfl::parse_file(sim_path), cfg);
            write_text(sim_out, sim_dfl ? to_dfl(l) : format_list(l));
            for (const auto& a : l.assumptions) std::cerr << "assumption: " << a << "\n";
            return 0;
        }
        if (*k) return run_canon(canon_path, canon_width, canon_output, unroll_limit);
        if (*p) {
            LatencyModel lm = pipe_latency.empty() ? LatencyModel::standard() : LatencyModel::load(pipe_latency);
            AssignmentList l = simulate_file(pipe_path, unroll_limit);
            unsigned ii = pipe_ii == "min" ? resource_mii(l, lm) : unsigned(std::stoul(pipe_ii));
            Pipelined out = pipeline_transform(l, lm, ii);
            write_text(pipe_out, to_dfl(out.list));
            std::cerr << "II " << out.schedule.ii << " (resource bound " << out.schedule.res_mii << "), "
                      << out.schedule.length << " cycles\n";
            return 0;
        }
        if (*m) {
            auto [l, d] = mutate(simulate_file(mut_path, unroll_limit), mut_seed);
            write_text(mut_out, to_dfl(l));
            std::cerr << d.text() << "\n";
            return 0;
        }
        if (*o) {
            OracleConfig cfg;
            cfg.width = or_width;
            if (!or_map.empty()) cfg.output_map = load_output_map(or_map);
            OracleResult res =
                oracle_check(simulate_file(or_spec, unroll_limit), simulate_file(or_impl, unroll_limit), cfg);
            std::cout << (res.equivalent ? "EQUIVALENT" : "UNEQUIVALENT") << " (" << res.method
                      << (res.exhaustive ? "" : ", sampled") << ")\n";
            for (const auto& d : res.differing) std::cout << "  output " << d << " differs\n";
            return res.equivalent ? kExitEquivalent : kExitUnequivalent;
        }
        if (*r) return run_corpus(manifest, corpus_nodes);
    } catch (const std::exception& e) {
        std::cerr << "hedcheck: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
