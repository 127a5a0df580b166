#include <doctest.h>

#include "rnnrat/embedding.hpp"
#include "rnnrat/spec_io.hpp"
#include "support/activations.hpp"
#include "support/systems.hpp"

using namespace rnnrat;

namespace {

const char *kExample = R"(schema: rnnrat.rnn/1
name: example
A: [[0, 1], [1, 0]]
B: [[1], [1]]
C: [[1, 0]]
x0: [0, 0]
alphabet: [["1/2"]]
activation: sigmoid
input:
  durations: [1.5, 2]
  letters: [1, 1]
)";

void check_same(const RnnSystem &a, const RnnSystem &b) {
    CHECK(a.A == b.A);
    CHECK(a.B == b.B);
    CHECK(a.C == b.C);
    CHECK(a.x0 == b.x0);
    CHECK(a.alphabet == b.alphabet);
    CHECK(a.activation.name == b.activation.name);
    CHECK(a.activation.order == b.activation.order);
    CHECK(a.activation.rhs == b.activation.rhs);
    CHECK(a.activation.init == b.activation.init);
    CHECK(a.activation.invertible == b.activation.invertible);
    CHECK(a.activation.closed_form == b.activation.closed_form);
}

void check_same(const RationalSystemSpec &a, const RationalSystemSpec &b) {
    CHECK(a.dim == b.dim);
    CHECK(a.fields == b.fields);
    CHECK(a.outputs == b.outputs);
    CHECK(a.v0 == b.v0);
    CHECK(a.var_names == b.var_names);
    CHECK(a.alphabet == b.alphabet);
}

// Replaces the first occurrence of `from` in the example document.
std::string edited(const std::string &from, const std::string &to) {
    std::string s = kExample;
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
}

std::string parse_message(const std::string &text, int *line = nullptr) {
    try {
        parse_spec(text);
    } catch (const ParseError &e) {
        if (line) *line = e.line();
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("parsing an RNN document") {
    const SpecFile spec = parse_spec(kExample);
    REQUIRE(spec.is_rnn());
    CHECK(spec.name == "example");
    check_same(spec.rnn(), testing::worked_example());
    REQUIRE(spec.input.has_value());
    CHECK(spec.input->durations == std::vector<double>{1.5, 2.0});
    CHECK(spec.input->letters == std::vector<std::size_t>{0, 0});
}

TEST_CASE("defaults and scalar letters") {
    const SpecFile spec = parse_spec(R"(A: [[1]]
B: [[1]]
C: [[1]]
alphabet: [0, 1, "-1/3"]
activation: tanh
)");
    REQUIRE(spec.is_rnn());
    CHECK(spec.rnn().x0 == std::vector<Scalar>{Scalar(0)});
    CHECK(spec.rnn().num_letters() == 3);
    CHECK(spec.rnn().alphabet[2] == Letter{Scalar(-1, 3)});
    CHECK_FALSE(spec.input.has_value());
}

TEST_CASE("RNN documents round-trip") {
    testing::RandomRnnGenerator gen(11);
    for (int trial = 0; trial < 10; ++trial) {
        const RnnSystem sys = gen.next(trial % 2 == 0);
        const PwcInput u = gen.three_piece_input(sys.num_letters());
        const SpecFile back = parse_spec(emit_rnn(sys, "trial", u));
        check_same(back.rnn(), sys);
        CHECK(back.name == "trial");
        REQUIRE(back.input.has_value());
        CHECK(back.input->durations == u.durations);
        CHECK(back.input->letters == u.letters);
    }
    SUBCASE("inline activations") {
        for (const auto &act : {testing::sine_activation(), testing::cubic_inverse_activation()}) {
            const auto sys = testing::scalar_rnn(act, Scalar(1, 2), Scalar(1), Scalar(2));
            const std::string text = emit_rnn(sys);
            CHECK(text.find("rhs") != std::string::npos);
            check_same(parse_spec(text).rnn(), sys);
        }
    }
}

TEST_CASE("constructed rational systems round-trip") {
    testing::RandomRnnGenerator gen(5);
    for (int trial = 0; trial < 8; ++trial) {
        const RnnSystem sys = gen.next(trial % 2 == 1);
        for (const auto &rs : {build_r_sigma(sys), build_r_aux(sys)}) {
            const SpecFile back = parse_spec(emit_rational(rs));
            REQUIRE_FALSE(back.is_rnn());
            check_same(back.rational(), rs);
        }
    }
    SUBCASE("a system without variable names gets X1..Xn") {
        RationalSystemSpec rs;
        rs.dim = 2;
        rs.fields = {{RationalFunc(parse_poly("X2", 2)), RationalFunc(parse_poly("1", 2), parse_poly("1 + X1^2", 2))}};
        rs.outputs = {RationalFunc(parse_poly("X1", 2))};
        rs.v0 = {Scalar(0), Scalar(1)};
        const auto back = parse_spec(emit_rational(rs)).rational();
        CHECK(back.var_names == std::vector<std::string>{"X1", "X2"});
        CHECK(back.fields == rs.fields);
    }
}

TEST_CASE("the emitted text is stable") {
    const auto rs = build_r_aux(testing::worked_example());
    const std::string once = emit_rational(rs, "aux");
    CHECK(emit_rational(parse_spec(once).rational(), "aux") == once);
    CHECK(once.find("schema: rnnrat.rational/1") != std::string::npos);
}

TEST_CASE("diagnostics name the field and the line") {
    int line = 0;
    SUBCASE("short matrix row") {
        const std::string msg = parse_message(edited("A: [[0, 1], [1, 0]]", "A:\n  - [0, 1]\n  - [1]"), &line);
        CHECK(msg.find("A: row 2 has 1 entries, expected 2") != std::string::npos);
        CHECK(line == 5);
    }
    SUBCASE("non-square A") {
        CHECK(parse_message(edited("A: [[0, 1], [1, 0]]", "A: [[0, 1]]")).find("A: expected a square matrix") !=
              std::string::npos);
    }
    SUBCASE("B with the wrong row count") {
        CHECK(parse_message(edited("B: [[1], [1]]", "B: [[1]]")).find("B: has 1 rows, expected 2") !=
              std::string::npos);
    }
    SUBCASE("C with the wrong width") {
        CHECK(parse_message(edited("C: [[1, 0]]", "C: [[1]]")).find("C: rows have 1 entries") != std::string::npos);
    }
    SUBCASE("empty alphabet") {
        const std::string msg = parse_message(edited("alphabet: [[\"1/2\"]]", "alphabet: []"), &line);
        CHECK(msg.find("alphabet: the input alphabet must be non-empty") != std::string::npos);
        CHECK(line == 7);
    }
    SUBCASE("repeated letter") {
        CHECK(parse_message(edited("alphabet: [[\"1/2\"]]", "alphabet: [[1], [1]]")).find("letters 1 and 2") !=
              std::string::npos);
    }
    SUBCASE("letter of the wrong width") {
        CHECK(parse_message(edited("alphabet: [[\"1/2\"]]", "alphabet: [[1, 2]]")).find("alphabet[1]: has 2") !=
              std::string::npos);
    }
    SUBCASE("not a rational") {
        CHECK(parse_message(edited("x0: [0, 0]", "x0: [0, pi]")).find("x0[2]: 'pi' is not an exact rational") !=
              std::string::npos);
    }
    SUBCASE("unknown key") {
        const std::string msg = parse_message(edited("name: example", "nmae: example"), &line);
        CHECK(msg.find("unknown key 'nmae'") != std::string::npos);
        CHECK(line == 2);
    }
    SUBCASE("unknown activation") {
        CHECK(parse_message(edited("activation: sigmoid", "activation: relu")).find("relu") != std::string::npos);
    }
    SUBCASE("input letter out of range") {
        CHECK(parse_message(edited("letters: [1, 1]", "letters: [1, 2]")).find("input.letters[2]: letter 2") !=
              std::string::npos);
    }
    SUBCASE("input with mismatched lengths") {
        CHECK(parse_message(edited("letters: [1, 1]", "letters: [1]")).find("input.letters") != std::string::npos);
    }
    SUBCASE("non-positive duration") {
        CHECK(parse_message(edited("durations: [1.5, 2]", "durations: [0, 2]")).find("positive") !=
              std::string::npos);
    }
    SUBCASE("unsupported schema") {
        CHECK(parse_message(edited("rnnrat.rnn/1", "rnnrat.rnn/9")).find("unsupported schema") != std::string::npos);
    }
    SUBCASE("malformed YAML") {
        CHECK(parse_message("A: [[1, 2]\nB: 3\n").find("malformed YAML") != std::string::npos);
    }
    SUBCASE("inline activation with the wrong init length") {
        CHECK(parse_message(edited("activation: sigmoid",
                                   "activation: {name: s, N: 2, rhs: {numerator: \"-X1\"}, init: [0]}"))
                  .find("activation.init: has 1 entries, expected 2") != std::string::npos);
    }
}

TEST_CASE("rational document diagnostics") {
    const std::string good = R"(schema: rnnrat.rational/1
dim: 2
variables: [p, q]
fields:
  - ["q", {numerator: "1", denominator: "1 + p^2"}]
outputs: ["p"]
v0: ["0", "1"]
)";
    const SpecFile spec = parse_spec(good);
    REQUIRE_FALSE(spec.is_rnn());
    CHECK(spec.rational().fields[0][1] == RationalFunc(parse_poly("1", 2), parse_poly("1 + X1^2", 2)));

    auto message = [&](const std::string &from, const std::string &to) {
        std::string s = good;
        s.replace(s.find(from), from.size(), to);
        return parse_message(s);
    };
    CHECK(message("[p, q]", "[p, p]").find("'p' appears twice") != std::string::npos);
    CHECK(message("[p, q]", "[p, 2q]").find("not an identifier") != std::string::npos);
    CHECK(message("\"q\", {", "\"r\", {").find("fields[1][1]") != std::string::npos);
    CHECK(message("[\"0\", \"1\"]", "[\"0\"]").find("v0: has 1 entries, expected 2") != std::string::npos);
    CHECK(message("\"1 + p^2\"", "\"0\"").find("denominator is the zero polynomial") != std::string::npos);
    CHECK(message("outputs: [\"p\"]", "outputs: []").find("outputs") != std::string::npos);
}
