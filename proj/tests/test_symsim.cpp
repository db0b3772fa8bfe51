#include "hedcheck/error.hpp"
#include "hedcheck/symsim.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

using namespace hedcheck;

namespace {

std::string corpus(const std::string& name) { return std::string(HEDCHECK_CORPUS_DIR) + "/" + name; }

std::vector<std::string> rendered(const AssignmentList& l) {
    std::vector<std::string> out;
    for (const auto& s : l.stmts) out.push_back(s.lhs + " := " + dfl::to_string(*s.rhs));
    return out;
}

// Enumerates every point of the box [0, 2^bits)^n for the list's inputs.
template <class F>
void for_each_point(const std::vector<ListInput>& inputs, unsigned cap_bits, F&& f) {
    std::vector<unsigned> bits;
    for (const auto& in : inputs) bits.push_back(std::min(in.width.value_or(cap_bits), cap_bits));
    std::vector<std::uint64_t> digit(inputs.size(), 0);
    while (true) {
        Valuation v;
        for (std::size_t i = 0; i < inputs.size(); ++i) v[inputs[i].name] = digit[i];
        f(v);
        std::size_t k = 0;
        while (k < digit.size() && ++digit[k] == (std::uint64_t(1) << bits[k])) digit[k++] = 0;
        if (k == digit.size()) return;
    }
}

// Checks source semantics against the emitted list on every point.
void check_semantics(const dfl::Program& p, unsigned cap_bits) {
    AssignmentList l = sym_sim(p);
    auto inputs = input_symbols(p);
    REQUIRE(inputs.size() <= 3);
    std::size_t mismatches = 0;
    for_each_point(inputs, cap_bits, [&](const Valuation& v) {
        if (interpret(p, v) != interpret(l, v)) ++mismatches;
    });
    CHECK(mismatches == 0);
}

} // namespace

TEST_CASE("parse errors carry positions") {
    try {
        dfl::parse("input a:u4;\noutput x:u4;\nx := a + ;\n");
        FAIL("no error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.column() == 10);
    }
    CHECK_THROWS_WITH_AS(dfl::parse("output y:u8;\n"), doctest::Contains("output 'y' never assigned"), ParseError);
    CHECK_THROWS_WITH_AS(dfl::parse("input n:u4; output y:u8; for (i := 0; i < n; i := i + 1) { y := i; }"),
                         doctest::Contains("loop bound is not constant"), ParseError);
    CHECK_THROWS_WITH_AS(dfl::parse("input a:u4; output y:u8; y := b;"), doctest::Contains("unknown identifier"),
                         ParseError);
    CHECK_THROWS_AS(dfl::parse_file(corpus("missing.dfl")), Error);
}

TEST_CASE("FFT4 parses with three nested loops") {
    dfl::Program p = dfl::parse_file(corpus("fft4.dfl"));
    int depth = 0;
    const std::vector<dfl::Stmt>* body = &p.body;
    while (true) {
        const dfl::Stmt* loop = nullptr;
        for (const auto& s : *body)
            if (s.kind == dfl::Stmt::For) loop = &s;
        if (!loop) break;
        ++depth;
        body = &loop->body;
    }
    CHECK(depth == 3);
}

TEST_CASE("unroll") {
    dfl::Program p = dfl::parse("input b[2]:u4; output a[2]:u5; for (i := 0; i < 2; i := i + 1) { a[i] := b[i] + 1; }");
    auto flat = symsim::resolve_control(p, symsim::unroll(p));
    REQUIRE(flat.size() == 2);
    CHECK(dfl::to_string(*flat[0].target_index) == "0");
    CHECK(dfl::to_string(*flat[0].rhs) == "b[0] + 1");
    CHECK(dfl::to_string(*flat[1].rhs) == "b[1] + 1");
    CHECK(flat[0].group != flat[1].group);

    dfl::Program zero = dfl::parse("input x:u4; output y:u4; y := x; for (i := 0; i < 0; i := i + 1) { y := y + 1; }");
    CHECK(symsim::resolve_control(zero, symsim::unroll(zero)).size() == 1);

    dfl::Program nest = dfl::parse_file(corpus("fig2_nest.dfl"));
    std::size_t assigns = 0;
    for (const auto& s : symsim::resolve_control(nest, symsim::unroll(nest)))
        if (s.target == "a1" || s.target == "a2") ++assigns;
    CHECK(assigns == 12);

    SymSimConfig small;
    small.unroll_limit = 5;
    CHECK_THROWS_WITH_AS(symsim::unroll(nest, small), doctest::Contains("unroll limit"), Error);
}

TEST_CASE("resolve control keeps symbolic guards") {
    dfl::Program p = dfl::parse("input x:u4; output y:u4; k := 2; if (x == 0) { y := k; } else { y := x; }");
    auto r = symsim::resolve_control(p, symsim::unroll(p));
    REQUIRE(r.size() == 1);
    CHECK(r[0].kind == dfl::Stmt::If);
    CHECK(dfl::to_string(*r[0].body[0].rhs) == "2");

    dfl::Program bad = dfl::parse("input x:u2; array a[4]:u4; output y:u4; a[x] := 1; y := 0;");
    CHECK_THROWS_WITH_AS(symsim::resolve_control(bad, symsim::unroll(bad)), doctest::Contains("not constant"), Error);
}

TEST_CASE("FFT4 list matches the hand-unrolled butterfly list") {
    AssignmentList l = sym_sim(dfl::parse_file(corpus("fft4.dfl")));
    const std::vector<std::string> expected{
        // stage 0, j = 0
        "C_1 := wr0", "S_1 := wi0", "tmr_1 := aar0 - aar2", "tmi_1 := aai0 - aai2", "aar0_1 := aar0 + aar2",
        "aai0_1 := aai0 + aai2", "aar2_1 := tmr_1", "aai2_1 := tmi_1",
        // stage 0, j = 1
        "C_2 := wr1", "S_2 := wi1", "tmr_2 := aar1 - aar3", "tmi_2 := aai1 - aai3", "aar1_1 := aar1 + aar3",
        "aai1_1 := aai1 + aai3", "aar3_1 := tmr_2 * C_2 - tmi_2 * S_2", "aai3_1 := tmr_2 * S_2 + tmi_2 * C_2",
        // stage 1, j = 0
        "C_3 := wr0", "S_3 := wi0", "tmr_3 := aar0_1 - aar1_1", "tmi_3 := aai0_1 - aai1_1",
        "aar0_2 := aar0_1 + aar1_1", "aai0_2 := aai0_1 + aai1_1", "aar1_2 := tmr_3", "aai1_2 := tmi_3",
        "tmr_4 := aar2_1 - aar3_1", "tmi_4 := aai2_1 - aai3_1", "aar2_2 := aar2_1 + aar3_1",
        "aai2_2 := aai2_1 + aai3_1", "aar3_2 := tmr_4", "aai3_2 := tmi_4"};
    CHECK(rendered(l) == expected);
    REQUIRE(l.find_output("aar3"));
    CHECK(l.find_output("aar3")->ssa == "aar3_2");
    CHECK(l.outputs.size() == 8);
    CHECK(l.inputs.size() == 12);
    CHECK(l.assumptions.empty());
}

TEST_CASE("per-iteration body of the multiply-accumulate nest") {
    AssignmentList l = sym_sim(dfl::parse_file(corpus("mac2x2.dfl")));
    REQUIRE(l.stmts.size() == 12);
    for (std::size_t it = 0; it < 4; ++it) {
        std::string ops;
        for (std::size_t k = 0; k < 3; ++k) {
            const auto& e = *l.stmts[3 * it + k].rhs;
            ops += dfl::op_text(e.op);
            if (k < 2) ops += std::string(dfl::op_text(e.args[0]->op)) + dfl::op_text(e.args[1]->op);
            CHECK(l.stmts[3 * it + k].group == l.stmts[3 * it].group);
        }
        CHECK(ops == "+**+***");
    }
}

TEST_CASE("ssa renaming") {
    dfl::Program p = dfl::parse("input a:u4; input b:u4; input c:u4; output x:u8; x := a + b; x := x * 2;");
    AssignmentList l = sym_sim(p);
    CHECK(rendered(l) == std::vector<std::string>{"x_1 := a + b", "x_2 := x_1 * 2"});
    CHECK(l.outputs.size() == 1);
    CHECK(l.outputs[0].ssa == "x_2");
    REQUIRE(l.inputs.size() == 3);
    CHECK(l.inputs[2].name == "c");

    CHECK(element_name("aar", 2) == "aar2");
    CHECK(element_name("a1", 2) == "a1_2");

    dfl::Program inout = dfl::parse("inout v:u4; input a:u4; output y:u4; y := a;");
    AssignmentList li = sym_sim(inout);
    CHECK(li.find_output("v")->ssa == "v");

    dfl::Program rbw = dfl::parse("input a:u4; output y:u4; y := t; t := a;");
    CHECK_THROWS_WITH_AS(sym_sim(rbw), doctest::Contains("read before"), Error);

    dfl::Program part = dfl::parse("input a:u4; output y[2]:u4; y[0] := a;");
    CHECK_THROWS_WITH_AS(sym_sim(part), doctest::Contains("'y1' is never assigned"), Error);
}

TEST_CASE("conditional lowering") {
    dfl::Program b = dfl::parse("input s:u1; input a:u4; input c:u4; output x:u4; if (s) { x := a; } else { x := c; }");
    AssignmentList lb = sym_sim(b);
    CHECK(rendered(lb).back() == "x_1 := s ? x__t1_1 : x__e1_1");
    CHECK(lb.assumptions.empty());

    dfl::Program w = dfl::parse("input g:u4; input a:u4; input c:u4; output x:u4; if (g) { x := a; } else { x := c; }");
    AssignmentList lw = sym_sim(w);
    CHECK(rendered(lw).front() == "g__1_1 := g != 0");
    CHECK(rendered(lw).back() == "x_1 := g__1_1 ? x__t1_1 : x__e1_1");
    REQUIRE(lw.assumptions.size() == 1);
    CHECK(lw.assumptions[0].find("word guard") != std::string::npos);

    check_semantics(b, 4);
    check_semantics(w, 4);
}

TEST_CASE("printed list reparses to the same behavior") {
    for (const char* name : {"cond_mux.dfl", "word_guard.dfl", "shift_mix.dfl"}) {
        dfl::Program p = dfl::parse_file(corpus(name));
        AssignmentList l = sym_sim(p);
        dfl::Program back = dfl::parse(to_dfl(l));
        for_each_point(input_symbols(p), 3, [&](const Valuation& v) { CHECK(interpret(back, v) == interpret(l, v)); });
    }
}

TEST_CASE("interpreter arithmetic") {
    auto eval = [](const std::string& expr) {
        dfl::Program p = dfl::parse("output y:u8; y := " + expr + ";");
        return interpret(p, {}).at("y");
    };
    CHECK(eval("-7 / 2") == -4);
    CHECK(eval("-7 % 2") == 1);
    CHECK(eval("13 >> 2") == 3);
    CHECK(eval("(0 - 13) >> 2") == -4);
    CHECK(eval("5[2]") == 1);
    CHECK(eval("3 < 4 ? 10 : 20") == 10);
    CHECK_THROWS_AS(eval("1 / 0"), Error);
}

TEST_CASE("corpus programs with few inputs keep their semantics") {
    for (const auto& entry : std::filesystem::directory_iterator(HEDCHECK_CORPUS_DIR)) {
        if (entry.path().extension() != ".dfl") continue;
        dfl::Program p = dfl::parse_file(entry.path().string());
        if (input_symbols(p).size() > 3) continue;
        INFO(entry.path().filename().string());
        check_semantics(p, 4);
    }
}

namespace {

// Random programs over inputs a, b (3 bits) and s (1 bit) with loops,
// concrete, Boolean and word guards, arrays and counters.
class ProgramGen {
public:
    explicit ProgramGen(std::uint64_t seed) : rng_(seed) {}

    std::string program() {
        out_.str("");
        out_ << "input a:u3; input b:u3; input s:u1; output y:u12; output z:u12; array m[3]:u8;\n";
        out_ << "t0 := a + 1; t1 := b * 2; t2 := a - b;\n";
        for (int i = 0; i < 3; ++i) out_ << "m[" << i << "] := b + " << i << ";\n";
        block(2, {});
        out_ << "y := " << expr(2, {}) << ";\nz := t0 + m[1];\n";
        return out_.str();
    }

private:
    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

    std::string leaf(const std::vector<std::string>& counters) {
        int k = pick(6 + static_cast<int>(counters.size()));
        static const char* names[] = {"a", "b", "t0", "t1", "t2", "m[1]"};
        if (k < 6) return pick(5) == 0 ? std::to_string(pick(4)) : names[k];
        return counters[static_cast<std::size_t>(k - 6)];
    }

    std::string expr(int depth, const std::vector<std::string>& counters) {
        if (depth == 0 || pick(3) == 0) return leaf(counters);
        static const char* ops[] = {"+", "-", "*"};
        return "(" + expr(depth - 1, counters) + " " + ops[pick(3)] + " " + expr(depth - 1, counters) + ")";
    }

    void block(int depth, std::vector<std::string> counters) {
        int n = 1 + pick(3);
        for (int k = 0; k < n; ++k) {
            int kind = depth == 0 ? 0 : pick(5);
            if (kind <= 1) {
                std::string target = pick(3) == 0 && !counters.empty() ? "m[" + counters.back() + "]"
                                                                       : "t" + std::to_string(pick(3));
                out_ << target << " := " << expr(2, counters) << ";\n";
            } else if (kind == 2) {
                std::string c = "i" + std::to_string(counters.size());
                out_ << "for (" << c << " := 0; " << c << " < " << pick(4) << "; " << c << " := " << c << " + 1) {\n";
                counters.push_back(c);
                block(depth - 1, counters);
                counters.pop_back();
                out_ << "}\n";
            } else {
                std::string guard;
                switch (pick(3)) {
                case 0: guard = counters.empty() ? "t0 == t0" : counters.back() + " == 1"; break;
                case 1: guard = pick(2) ? "s" : "a[1]"; break;
                default: guard = "a - " + leaf(counters); break;
                }
                out_ << "if (" << guard << ") {\n";
                block(depth - 1, counters);
                out_ << "} else {\n";
                block(depth - 1, counters);
                out_ << "}\n";
            }
        }
    }

    std::mt19937_64 rng_;
    std::ostringstream out_;
};

} // namespace

TEST_CASE("random programs keep their semantics") {
    for (std::uint64_t seed = 1; seed <= 150; ++seed) {
        std::string text = ProgramGen(seed).program();
        INFO(text);
        dfl::Program p = dfl::parse(text);
        check_semantics(p, 3);
    }
}

TEST_CASE("sym_sim is deterministic") {
    dfl::Program p = dfl::parse_file(corpus("fft4.dfl"));
    CHECK(to_dfl(sym_sim(p)) == to_dfl(sym_sim(p)));
}

TEST_CASE("dead statement pruning") {
    dfl::Program p = dfl::parse_file(corpus("fft4.dfl"));
    SymSimConfig cfg;
    cfg.prune_dead = true;
    AssignmentList l = sym_sim(p, cfg);
    // The twiddle reads of the two iterations that take the trivial branch are dead.
    CHECK(l.stmts.size() == 26);
}

TEST_CASE("generated temporaries avoid program names") {
    const std::string text = "input a:u4; input s:u1; output y; output z; g__1 := a + 1; y__t1 := a;\n"
                             "if (s) { y := g__1; y__t1 := 3; } else { y := y__t1; }\n"
                             "z := y__t1 + g__1;\n";
    dfl::Program p = dfl::parse(text);
    AssignmentList l = sym_sim(p);
    for (std::uint64_t a = 0; a < 16; ++a)
        for (std::uint64_t s = 0; s < 2; ++s) {
            Valuation v{{"a", a}, {"s", s}};
            CHECK(interpret(p, v) == interpret(l, v));
        }
}
