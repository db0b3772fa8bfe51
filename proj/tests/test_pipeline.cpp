#include "hedcheck/error.hpp"
#include "hedcheck/pipeline.hpp"
#include "hedcheck/sec.hpp"

#include <doctest.h>

#include <filesystem>
#include <map>
#include <set>

using namespace hedcheck;

namespace {

std::string corpus(const std::string& name) { return std::string(HEDCHECK_CORPUS_DIR) + "/" + name; }
AssignmentList file_list(const std::string& name) { return sym_sim(dfl::parse_file(corpus(name))); }
AssignmentList list_of(const std::string& text) { return sym_sim(dfl::parse(text)); }

std::vector<std::string> corpus_programs() {
    std::vector<std::string> out;
    for (const auto& e : std::filesystem::directory_iterator(HEDCHECK_CORPUS_DIR))
        if (e.path().extension() == ".dfl") out.push_back(e.path().filename().string());
    std::sort(out.begin(), out.end());
    return out;
}

// Resource-limited model: five multipliers and two adders.
LatencyModel limited() {
    LatencyModel lm = LatencyModel::standard();
    lm.units[OpClass::Mul] = 5;
    lm.units[OpClass::Add] = 2;
    return lm;
}

struct Span {
    unsigned first = ~0u;
    unsigned end = 0;  // cycle after the last result
};

std::map<int, Span> iteration_spans(const Schedule& s) {
    std::map<int, Span> out;
    for (const auto& op : s.ops) {
        Span& sp = out[op.iteration];
        sp.first = std::min(sp.first, op.cycle);
        sp.end = std::max(sp.end, op.cycle + op.latency);
    }
    return out;
}

} // namespace

TEST_CASE("three-address form names operators by class") {
    auto l = list_of("input a; input b; input c; output y; y := (a + b) * c - 3;");
    auto p = pipeline_transform(l, LatencyModel::standard(), 1);
    REQUIRE(p.list.stmts.size() == 3);
    CHECK(p.list.stmts[0].lhs == "add0");
    CHECK(dfl::to_string(*p.list.stmts[0].rhs) == "a + b");
    CHECK(p.list.stmts[1].lhs == "mul0");
    CHECK(p.list.stmts[2].lhs == "sub0");
    CHECK(p.list.outputs.at(0).ssa == "sub0");
    CHECK(p.list.stmts[1].cycle == 1);
    CHECK(p.list.stmts[2].cycle == 3);  // the multiplier takes two cycles
    CHECK(p.schedule.length == 4);
}

TEST_CASE("generated names avoid input names") {
    auto l = list_of("input add0; input b; output y; y := add0 + b;");
    auto p = pipeline_transform(l, LatencyModel::standard(), 1);
    CHECK(p.list.stmts.at(0).lhs == "add1");
    CHECK(oracle_check(l, p.list).equivalent);
}

TEST_CASE("II = 1 overlaps consecutive iterations of the loop nest") {
    auto l = file_list("fig2_nest.dfl");
    auto p = pipeline_transform(l, LatencyModel::standard(), 1);
    auto spans = iteration_spans(p.schedule);
    REQUIRE(spans.size() >= 12);
    int overlapped = 0;
    for (auto it = spans.begin(); std::next(it) != spans.end(); ++it)
        if (std::next(it)->second.first < it->second.end) ++overlapped;
    CHECK(overlapped >= 10);
    CHECK(audit_schedule(p.schedule, LatencyModel::standard()).empty());
}

TEST_CASE("II equal to the body latency gives a non-overlapped schedule") {
    for (const char* name : {"fig2_nest.dfl", "fft4.dfl", "mac2x2.dfl"}) {
        CAPTURE(name);
        auto l = file_list(name);
        const LatencyModel lm = LatencyModel::standard();
        const unsigned wide = 1000;
        auto solo = pipeline_transform(l, lm, wide);
        unsigned body = 1;
        for (const auto& [it, sp] : iteration_spans(solo.schedule)) body = std::max(body, sp.end - unsigned(it) * wide);
        auto p = pipeline_transform(l, lm, body);
        auto spans = iteration_spans(p.schedule);
        for (auto it = spans.begin(); std::next(it) != spans.end(); ++it)
            CHECK(std::next(it)->second.first >= it->second.end);
    }
}

TEST_CASE("a straight-line list is only reordered") {
    auto l = list_of("input a; input b; output y; output z; t := a * b; y := t + a; z := b - t;");
    for (unsigned ii : {1u, 3u}) {
        auto p = pipeline_transform(l, LatencyModel::standard(), ii);
        CHECK(oracle_check(l, p.list).equivalent);
        CHECK(p.schedule.length == 3);
    }
}

TEST_CASE("II below the resource bound is rejected with the minimum") {
    auto l = file_list("mac2x2.dfl");
    LatencyModel lm = LatencyModel::standard();
    lm.units[OpClass::Mul] = 1;
    const unsigned mii = resource_mii(l, lm);
    CHECK(mii > 1);
    const std::string expected = "minimum feasible II is " + std::to_string(mii);
    CHECK_THROWS_WITH_AS(pipeline_transform(l, lm, mii - 1), doctest::Contains(expected.c_str()), Error);
    CHECK_NOTHROW(pipeline_transform(l, lm, mii));
    CHECK_THROWS_AS(pipeline_transform(l, LatencyModel::standard(), 0), Error);
}

TEST_CASE("schedules are legal and transforms sound on the whole corpus") {
    for (const auto& name : corpus_programs()) {
        auto l = file_list(name);
        for (const LatencyModel& lm : {LatencyModel::standard(), limited()}) {
            const unsigned mii = resource_mii(l, lm);
            for (unsigned ii : {mii, mii + 1, mii + 3}) {
                CAPTURE(name);
                CAPTURE(ii);
                auto p = pipeline_transform(l, lm, ii);
                CHECK(audit_schedule(p.schedule, lm).empty());
                CHECK(oracle_check(l, p.list).equivalent);
                CHECK_FALSE(find_witness(l, p.list, 6, 256).has_value());
                int last = -1;
                for (const auto& s : p.list.stmts) {
                    CHECK(s.cycle >= last);
                    last = s.cycle;
                }
            }
        }
    }
}

TEST_CASE("audit reports violations") {
    Schedule s;
    s.ii = 2;
    s.ops = {{"add0", OpClass::Add, 0, 0, 1, {"a"}},
             {"mul0", OpClass::Mul, 0, 0, 2, {"add0"}},
             {"add1", OpClass::Add, 1, 1, 1, {"a"}},
             {"add2", OpClass::Add, 1, 2, 1, {"a"}},
             {"add3", OpClass::Add, 1, 2, 1, {"a"}}};
    LatencyModel lm = LatencyModel::standard();
    lm.units[OpClass::Add] = 1;
    const std::string a = audit_schedule(s, lm);
    CHECK(a.find("mul0 issues at 0 before add0") != std::string::npos);
    CHECK(a.find("add1 issues at 1 before its iteration starts") != std::string::npos);
    CHECK(a.find("cycle 2 uses more than 1 add units") != std::string::npos);
}

TEST_CASE("printed pipelined lists carry cycle separators and reparse") {
    auto l = file_list("fft4.dfl");
    auto p = pipeline_transform(l, LatencyModel::standard(), 1);
    const std::string text = to_dfl(p.list);
    CHECK(text.find("cycle;") != std::string::npos);
    auto back = sym_sim(dfl::parse(text));
    CHECK(oracle_check(l, back).equivalent);
}

TEST_CASE("latency model files") {
    auto lm = LatencyModel::from_json(R"({"latency": {"mul": 3}, "units": {"mul": 5, "add": 2}})");
    CHECK(lm.latency_of(OpClass::Mul) == 3);
    CHECK(lm.latency_of(OpClass::Add) == 1);
    CHECK(lm.units_of(OpClass::Mul) == 5u);
    CHECK_FALSE(lm.units_of(OpClass::Logic).has_value());
    CHECK_THROWS_WITH_AS(LatencyModel::from_json(R"({"latency": {"div": 3}})"), doctest::Contains("div"), Error);
    CHECK_THROWS_AS(LatencyModel::from_json(R"({"latency": {"mul": 0}})"), Error);
    CHECK_THROWS_AS(LatencyModel::from_json(R"({"units": 3})"), Error);
    CHECK_THROWS_AS(LatencyModel::from_json(R"({"lat": {}})"), Error);
    CHECK_THROWS_AS(LatencyModel::from_json("{"), Error);
    CHECK_THROWS_AS(LatencyModel::load("/nonexistent/model.json"), Error);
}

TEST_CASE("mutations are deterministic and described") {
    std::set<MutationDescriptor::Kind> kinds;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        // FFT4 has no constants; the filter does.
        auto l = pipeline_transform(file_list(seed % 2 ? "fft4.dfl" : "fir4.dfl"), LatencyModel::standard(), 1).list;
        auto [m1, d1] = mutate(l, seed);
        auto [m2, d2] = mutate(l, seed);
        CHECK(d1.text() == d2.text());
        CHECK(format_list(m1) == format_list(m2));
        CHECK(d1.before != d1.after);
        kinds.insert(d1.kind);
        if (d1.kind == MutationDescriptor::StatementDrop)
            CHECK(m1.stmts.size() + 1 == l.stmts.size());
        else
            CHECK(m1.stmts.size() == l.stmts.size());
    }
    CHECK(kinds.size() == 4);
}

TEST_CASE("operator and constant mutations") {
    auto l = list_of("input a; input b; output y; y := a + b;");
    auto [m, d] = mutate(l, 0);
    CHECK(d.kind == MutationDescriptor::OperatorSwap);
    CHECK(d.before == "a + b");
    CHECK(d.after == "a - b");
    auto c = list_of("input a; output y; y := 6 * a;");
    bool saw_const = false;
    for (std::uint64_t seed = 0; seed < 20 && !saw_const; ++seed) {
        auto [mc, dc] = mutate(c, seed);
        if (dc.kind != MutationDescriptor::ConstantPerturb) continue;
        saw_const = true;
        CHECK((dc.after == "7 * a" || dc.after == "5 * a"));
    }
    CHECK(saw_const);
    CHECK_THROWS_AS(mutate(AssignmentList{}, 1), Error);
}

TEST_CASE("shift amounts and divisors are never perturbed") {
    auto l = list_of("input a; output y; y := (a >> 2) + (a / 4) + a[1];");
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto [m, d] = mutate(l, seed);
        CHECK_NOTHROW(sec_piped(l, m));
    }
}

TEST_CASE("mutants keep 1-bit and word values apart") {
    for (const auto& name : {"shift_mix.dfl", "cond_mux.dfl", "word_guard.dfl"}) {
        auto impl = pipeline_transform(file_list(name), LatencyModel::standard(), 1).list;
        for (std::uint64_t seed = 0; seed < 60; ++seed) {
            auto [m, d] = mutate(impl, seed);
            CAPTURE(d.text());
            CHECK_NOTHROW(sym_sim(dfl::parse(to_dfl(m))));
        }
    }
}

TEST_CASE("almost every mutation of pipelined FFT4 changes behavior at width 4") {
    auto spec = file_list("fft4.dfl");
    auto impl = pipeline_transform(spec, LatencyModel::standard(), 1).list;
    int distinguishing = 0;
    const int n = 200;
    for (std::uint64_t seed = 0; seed < n; ++seed) {
        auto [m, d] = mutate(impl, seed);
        if (find_witness(spec, m, 4)) ++distinguishing;
    }
    CHECK(distinguishing * 100 >= 95 * n);
}

TEST_CASE("oracle") {
    auto l = file_list("fft4.dfl");
    SUBCASE("a list against itself") {
        auto r = oracle_check(l, l);
        CHECK(r.equivalent);
        CHECK(r.method == "substitution");
    }
    SUBCASE("a mutant") {
        auto impl = pipeline_transform(l, LatencyModel::standard(), 1).list;
        auto [m, d] = mutate(impl, 3);
        auto r = oracle_check(l, m, {.width = 4});
        CHECK_FALSE(r.equivalent);
        CHECK_FALSE(r.differing.empty());
    }
    SUBCASE("vanishing pair") {
        auto a = file_list("vanish.dfl");
        auto b = file_list("vanish_impl.dfl");
        CHECK_FALSE(oracle_check(a, b).equivalent);
        CHECK(oracle_check(a, b, {.width = 4}).equivalent);
    }
    SUBCASE("distinct atoms fall back to evaluation") {
        auto a = list_of("input a:u4; output y; y := (a + 1) >> 1;");
        auto b = list_of("input a:u4; output y; y := (a >> 1) + a[0];");
        auto r = oracle_check(a, b, {.width = 8});
        CHECK(r.equivalent);
        CHECK(r.method == "evaluation");
        CHECK(r.exhaustive);
        auto c = list_of("input a:u4; output y; y := (a >> 1) + 1;");
        auto rc = oracle_check(a, c, {.width = 8});
        CHECK_FALSE(rc.equivalent);
        CHECK(rc.differing == std::vector<std::string>{"y"});
    }
    SUBCASE("substitution limit") {
        CHECK_THROWS_WITH_AS(oracle_check(l, l, {.max_nodes = 5}), doctest::Contains("over the limit"), Error);
    }
    SUBCASE("output correspondence") {
        auto a = list_of("input a; output y; y := a;");
        auto b = list_of("input a; output z; z := a;");
        CHECK_THROWS_AS(oracle_check(a, b), Error);
        CHECK(oracle_check(a, b, {.output_map = {{"y", "z"}}}).equivalent);
    }
}

TEST_CASE("witness search") {
    auto a = list_of("input a:u3; input b:u3; output y; y := a * b;");
    auto b = list_of("input a:u3; input b:u3; output y; y := a * b + (a == 5) * (b == 6) * 4;");
    auto w = find_witness(a, b, 4);
    REQUIRE(w.has_value());
    CHECK(w->at("a") == 5);
    CHECK(w->at("b") == 6);
    CHECK_FALSE(find_witness(a, b, 2).has_value());
}
