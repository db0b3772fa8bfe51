#include "hedcheck/error.hpp"
#include "hedcheck/sec.hpp"

#include <doctest.h>

#include <algorithm>

using namespace hedcheck;

namespace {

std::string corpus(const std::string& name) { return std::string(HEDCHECK_CORPUS_DIR) + "/" + name; }

AssignmentList list_of(const std::string& text) { return sym_sim(dfl::parse(text)); }
AssignmentList file_list(const std::string& name) { return sym_sim(dfl::parse_file(corpus(name))); }

SecConfig budget(std::size_t nodes, std::optional<unsigned> width = std::nullopt) {
    SecConfig c;
    c.max_nodes = nodes;
    c.width = width;
    return c;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

const char* kMacSpec = R"(
input x; input y; input u; input v; input w;
output r;
tempf0 := x * y + u * v;
temps0 := x * w + u * y;
res00 := tempf0 * temps0;
r := res00;
)";

const char* kMacImpl = R"(
input x; input y; input u; input v; input w;
output r;
mul0 := x * y;
mul1 := u * v;
mul2 := x * w;
mul3 := u * y;
add0 := mul0 + mul1;
add1 := mul2 + mul3;
r := add0 * add1;
)";

} // namespace

TEST_CASE("manual stepping: cut after the first match, internal peel for the second") {
    SecEngine e(list_of(kMacSpec), list_of(kMacImpl), budget(kUnlimitedNodes));
    e.extend(Side::Spec, 2);
    e.extend(Side::Impl, 5);
    CHECK(e.outputs(Side::Spec) == std::vector<std::string>{"tempf0_1", "temps0_1"});
    CHECK(e.outputs(Side::Impl) == std::vector<std::string>{"mul2_1", "mul3_1", "add0_1"});

    auto m = e.equ_checking();
    REQUIRE(m.size() == 1);
    CHECK(m[0].spec == std::vector<std::string>{"tempf0_1"});
    CHECK(m[0].impl == std::vector<std::string>{"add0_1"});
    e.update(m);
    CHECK(e.counters().cut_vars == 1);
    // temps0 has no partner yet; mul2 and mul3 do not feed add0.
    CHECK(e.segment(Side::Spec) == std::vector<std::string>{"temps0_1"});
    CHECK(e.segment(Side::Impl) == std::vector<std::string>{"mul2_1", "mul3_1"});
    CHECK(e.value(Side::Spec, "tempf0_1") == e.value(Side::Impl, "add0_1"));

    e.extend(Side::Spec, 1);
    e.extend(Side::Impl, 1);
    CHECK(e.outputs(Side::Spec) == std::vector<std::string>{"res00_1"});
    CHECK(e.outputs(Side::Impl) == std::vector<std::string>{"add1_1"});
    CHECK(e.equ_checking().empty());

    CHECK(e.internal_equ());
    CHECK(e.counters().internal_equ_calls == 1);
    CHECK(e.counters().peels == 1);
    CHECK(e.counters().cut_vars == 2);
    CHECK(e.value(Side::Spec, "temps0_1") == e.value(Side::Impl, "add1_1"));
    CHECK(e.pending(Side::Spec) == 2);  // res00 went back in front of r

    Verdict v = e.run();
    CHECK(v.result == Result::Equivalent);
    REQUIRE(v.matched.size() >= 2);
    CHECK(v.matched[0].spec == "tempf0_1");
    CHECK(v.matched[0].impl == "add0_1");
    CHECK(v.matched[1].spec == "temps0_1");
    CHECK(v.matched[1].impl == "add1_1");
    CHECK(v.counters.confirmations == 0);
}

TEST_CASE("segment outputs include design outputs read later in the segment") {
    const char* text = "input a; input b; output y; output z; y := a + b; z := y * a;";
    SecEngine e(list_of(text), list_of(text));
    e.extend(Side::Spec, 2);
    CHECK(e.outputs(Side::Spec) == std::vector<std::string>{"y_1", "z_1"});
    CHECK(e.segment(Side::Spec).size() == 2);
}

TEST_CASE("a shared fanin node stays bound over the inputs") {
    const char* spec = "input a; input b; input c; output p; output q; t := a * b; p := t + 1; q := t * c;";
    const char* impl = "input a; input b; input c; output p; output q; t := a * b; p := t + 1; q := t * c + 1;";
    SecEngine e(list_of(spec), list_of(impl));
    e.extend(Side::Spec, 3);
    e.extend(Side::Impl, 3);
    auto m = e.equ_checking();
    REQUIRE(m.size() == 1);
    CHECK(m[0].spec == std::vector<std::string>{"p_1"});
    e.update(m);
    CHECK(e.segment(Side::Spec) == std::vector<std::string>{"t_1", "q_1"});
    Manager& mgr = e.manager();
    HedRef ab = mgr.mul(mgr.mk_var(*mgr.find_var("a")), mgr.mk_var(*mgr.find_var("b")));
    CHECK(e.value(Side::Spec, "t_1") == ab);
    CHECK(e.run().result == Result::Unequivalent);
}

TEST_CASE("all outputs matched empties both segments") {
    const char* text = "input a; input b; output y; output z; y := a * b; z := a - b;";
    SecEngine e(list_of(text), list_of(text));
    e.extend(Side::Spec, 2);
    e.extend(Side::Impl, 2);
    e.update(e.equ_checking());
    CHECK(e.segment(Side::Spec).empty());
    CHECK(e.segment(Side::Impl).empty());
}

TEST_CASE("a+b against a-b exhausts internal peeling and is unequivalent") {
    Verdict v = sec_piped(list_of("input a; input b; output y; y := a + b;"),
                          list_of("input a; input b; output y; y := a - b;"));
    CHECK(v.result == Result::Unequivalent);
    REQUIRE(v.unmatched.size() == 1);
    CHECK(v.unmatched[0].spec == "y");
    CHECK(v.unmatched[0].difference == "2*b");
    CHECK(v.counters.internal_equ_calls >= 1);
    CHECK(v.counters.confirmations == 1);
}

TEST_CASE("identical lists need no internal peeling") {
    for (const char* name : {"fft4.dfl", "mac2x2.dfl", "fig2_nest.dfl", "sobel3x3.dfl"}) {
        CAPTURE(name);
        auto l = file_list(name);
        for (std::size_t b : {kUnlimitedNodes, std::size_t(1)}) {
            Verdict v = sec_piped(l, l, budget(b));
            CHECK(v.result == Result::Equivalent);
            CHECK(v.counters.internal_equ_calls == 0);
            CHECK(v.unmatched.empty());
        }
    }
}

TEST_CASE("unlimited budget takes one segment, minimum budget one statement per segment") {
    auto l = file_list("fft4.dfl");
    const std::size_t live = prune_dead(l).stmts.size();
    CHECK(sec_piped(l, l, budget(kUnlimitedNodes)).counters.segments == 1);
    Verdict v = sec_piped(l, l, budget(1));
    CHECK(v.counters.segments == live);
    CHECK(v.counters.budget_overflows == 2 * live);
}

TEST_CASE("restructured arithmetic is equivalent at every budget") {
    auto s = list_of("input a; input b; input c; output y; t := a + b; u := t * c; y := u + t;");
    auto i = list_of("input a; input b; input c; output y; p := b + a; q := c * p; r := p + q; y := r;");
    for (std::size_t b : {kUnlimitedNodes, std::size_t(8), std::size_t(4), std::size_t(1)}) {
        CAPTURE(b);
        CHECK(sec_piped(s, i, budget(b)).result == Result::Equivalent);
    }
}

TEST_CASE("vanishing difference matches only in modular mode") {
    auto a = file_list("vanish.dfl");
    auto b = file_list("vanish_impl.dfl");
    {
        SecEngine e(a, b, budget(kUnlimitedNodes, 4));
        e.extend(Side::Spec, 2);
        e.extend(Side::Impl, 1);
        CHECK(e.equ_checking().size() == 1);
    }
    {
        SecEngine e(a, b, budget(kUnlimitedNodes));
        e.extend(Side::Spec, 2);
        e.extend(Side::Impl, 1);
        CHECK(e.equ_checking().empty());
    }
    CHECK(sec_piped(a, b, budget(kUnlimitedNodes, 4)).result == Result::Equivalent);
    CHECK(sec_piped(a, b, budget(1, 4)).result == Result::Equivalent);
    CHECK(sec_piped(a, b, budget(kUnlimitedNodes, 3)).result == Result::Equivalent);
    CHECK(sec_piped(a, b, budget(kUnlimitedNodes, 6)).result == Result::Unequivalent);
    Verdict z = sec_piped(a, b);
    CHECK(z.result == Result::Unequivalent);
    CHECK(z.unmatched.at(0).difference == "32*x - 16*x^2 + 16*x^3");
}

TEST_CASE("non-polynomial operators over a modular-only cut are flagged") {
    auto s = list_of("input a:u4; output y; t := 16 * a; y := t < 5;");
    auto i = list_of("input a:u4; output y; u := 32 * a; y := u < 5;");
    SecEngine e(s, i, budget(kUnlimitedNodes, 4));
    e.extend(Side::Spec, 1);
    e.extend(Side::Impl, 1);
    auto m = e.equ_checking();
    REQUIRE(m.size() == 1);
    e.update(m);
    e.extend(Side::Spec, 1);
    e.extend(Side::Impl, 1);
    CHECK(e.equ_checking().size() == 1);
    Verdict v = e.run();
    CHECK(v.result == Result::Equivalent);
    CHECK_FALSE(v.inexact.empty());
}

TEST_CASE("word operators") {
    auto eq = [](const char* a, const char* b, std::optional<unsigned> w = std::nullopt) {
        return sec_piped(list_of(a), list_of(b), budget(kUnlimitedNodes, w));
    };
    SUBCASE("mux against its polynomial form") {
        CHECK(eq("input s:u1; input a; input b; output y; y := s ? a : b;",
                 "input s:u1; input a; input b; output y; y := s * a + (1 - s) * b;")
                  .result == Result::Equivalent);
    }
    SUBCASE("same shift on both sides shares its atom") {
        Verdict v = eq("input a; input b; output y; y := (a + b) >> 2;", "input a; input b; output y; t := b + a; y := t >> 2;");
        CHECK(v.result == Result::Equivalent);
        CHECK_FALSE(v.inexact.empty());
    }
    SUBCASE("exact shifts fold away") {
        Verdict v = eq("input a; output y; y := (a * 4) >> 2;", "input a; output y; y := a;");
        CHECK(v.result == Result::Equivalent);
        CHECK(v.inexact.empty());
    }
    SUBCASE("shift by division") {
        CHECK(eq("input a; output y; y := a >> 1;", "input a; output y; y := a / 2;").result == Result::Equivalent);
        CHECK(eq("input a; output y; y := a % 8;", "input a; output y; y := a - ((a >> 3) << 3);").result ==
              Result::Equivalent);
    }
    SUBCASE("mirrored comparisons") {
        CHECK(eq("input a; input b; output y; y := a < b;", "input a; input b; output y; y := b > a;").result ==
              Result::Equivalent);
        CHECK(eq("input a; input b; output y; y := a <= b;", "input a; input b; output y; y := 1 - (b < a);").result ==
              Result::Equivalent);
        CHECK(eq("input a; input b; output y; y := a < b;", "input a; input b; output y; y := a <= b;").result ==
              Result::Unequivalent);
    }
    SUBCASE("bit selects of inputs are exact") {
        CHECK(eq("input a:u4; input b:u4; output y; y := a[0] ^ b[0];",
                 "input a:u4; input b:u4; output y; y := a[0] + b[0] - 2 * a[0] * b[0];")
                  .result == Result::Equivalent);
    }
    SUBCASE("non power-of-two division is rejected") {
        CHECK_THROWS_AS(eq("input a; output y; y := a / 3;", "input a; output y; y := a;"), Error);
    }
}

TEST_CASE("output correspondence") {
    auto s = list_of("input a; output y; y := a + 1;");
    auto i = list_of("input a; output z; z := 1 + a;");
    CHECK_THROWS_WITH_AS(sec_piped(s, i), doctest::Contains("has no implementation output"), Error);
    SecConfig c;
    c.output_map = {{"y", "z"}};
    Verdict v = sec_piped(s, i, c);
    CHECK(v.result == Result::Equivalent);
    CHECK(v.outputs == std::vector<std::string>{"y=z"});
    auto extra = list_of("input a; output y; output w; y := a + 1; w := a;");
    CHECK_THROWS_WITH_AS(sec_piped(s, extra), doctest::Contains("has no spec counterpart"), Error);
}

TEST_CASE("untouched inout outputs compare as inputs") {
    auto s = list_of("inout a; input b; output y; y := a + b;");
    auto i = list_of("inout a; input b; output y; t := b + a; y := t;");
    CHECK(sec_piped(s, i).result == Result::Equivalent);
}

TEST_CASE("word guards carry their assumption into the verdict") {
    auto l = file_list("word_guard.dfl");
    Verdict v = sec_piped(l, l);
    CHECK(v.result == Result::Equivalent);
    CHECK_FALSE(v.assumptions.empty());
    CHECK(v.assumptions.front().rfind("spec: ", 0) == 0);
}

TEST_CASE("verdicts are deterministic") {
    auto s = list_of(kMacSpec);
    auto i = list_of(kMacImpl);
    for (std::size_t b : {kUnlimitedNodes, std::size_t(12), std::size_t(1)}) {
        Verdict v1 = sec_piped(s, i, budget(b));
        Verdict v2 = sec_piped(s, i, budget(b));
        REQUIRE(v1.matched.size() == v2.matched.size());
        for (std::size_t k = 0; k < v1.matched.size(); ++k) {
            CHECK(v1.matched[k].spec == v2.matched[k].spec);
            CHECK(v1.matched[k].impl == v2.matched[k].impl);
            CHECK(v1.matched[k].cut == v2.matched[k].cut);
        }
        CHECK(v1.counters.segments == v2.counters.segments);
        CHECK(v1.counters.peak_node_count == v2.counters.peak_node_count);
    }
}

TEST_CASE("trace records segments and matches") {
    SecConfig c;
    c.trace = true;
    Verdict v = sec_piped(list_of(kMacSpec), list_of(kMacImpl), c);
    CHECK_FALSE(v.trace.empty());
    CHECK(v.trace.front().rfind("segment 1:", 0) == 0);
    CHECK(contains(v.outputs, "r=r"));
}

TEST_CASE("invalid configuration") {
    auto l = list_of("input a; output y; y := a;");
    CHECK_THROWS_AS(sec_piped(l, l, budget(kUnlimitedNodes, 0)), Error);
    CHECK_THROWS_AS(sec_piped(l, l, budget(kUnlimitedNodes, 65)), Error);
    CHECK_THROWS_AS(sec_piped(l, l, budget(0)), Error);
}
