#include <doctest.h>

#include <cmath>
#include <sstream>

#include "rnnrat/systems.hpp"
#include "support/systems.hpp"

using namespace rnnrat;

namespace {

RationalSystemSpec one_state(const std::string &p, const std::string &q, const Scalar &v0) {
    RationalSystemSpec sys;
    sys.dim = 1;
    sys.fields = {{RationalFunc(parse_poly(p, 1), parse_poly(q, 1))}};
    sys.outputs = {RationalFunc(parse_poly("X1", 1))};
    sys.v0 = {v0};
    return sys;
}

double logistic_at_one(double step) {
    const auto traj = simulate_rational(one_state("X1*(1 - X1)", "1", Scalar(1, 2)), PwcInput::constant(0), 1.0, step);
    return traj.states.back()[0];
}

} // namespace

TEST_CASE("simulate_rnn: zero system stays at rest") {
    RnnSystem sys = testing::scalar_rnn(tanh_activation(), 0, 0, 1);
    const auto traj = simulate_rnn(sys, PwcInput::constant(0), 1.0, 1e-2);
    for (std::size_t s = 0; s < traj.times.size(); ++s) {
        CHECK(traj.states[s][0] == 0.0);
        CHECK(traj.outputs[s][0] == 0.0);
    }
}

TEST_CASE("simulate_rnn: worked example is strictly increasing") {
    const auto traj = simulate_rnn(testing::worked_example(), PwcInput::constant(0), 5.0, 1e-3);
    for (std::size_t s = 1; s < traj.times.size(); ++s) {
        CHECK(traj.states[s][0] > traj.states[s - 1][0]);
        CHECK(traj.states[s][1] > traj.states[s - 1][1]);
    }
}

TEST_CASE("simulate_rnn: constant drive gives x(t) = t tanh(alpha)") {
    const Scalar alpha(3, 4);
    const auto sys = testing::scalar_rnn(tanh_activation(), 0, 1, 1, {alpha});
    const auto traj = simulate_rnn(sys, PwcInput::constant(0), 2.0, 1e-3);
    for (std::size_t s = 0; s < traj.times.size(); s += 100) {
        CHECK(std::abs(traj.states[s][0] - traj.times[s] * std::tanh(0.75)) <= 1e-12);
    }
    CHECK(traj.times.back() == 2.0);
}

TEST_CASE("simulate_rnn: switched drive follows the piecewise closed form") {
    // Switch at t = 0.3333 (off-grid for step 0.01): slope tanh(1) then tanh(-1/2).
    const auto sys = testing::scalar_rnn(tanh_activation(), 0, 1, 1, {Scalar(1), Scalar(-1, 2)});
    const PwcInput u{{0.3333, 1.0}, {0, 1}};
    const auto traj = simulate_rnn(sys, u, 1.0, 1e-2);
    const double expected = 0.3333 * std::tanh(1.0) + (1.0 - 0.3333) * std::tanh(-0.5);
    CHECK(std::abs(traj.states.back()[0] - expected) <= 1e-12);
    CHECK(traj.letters.front() == 0);
    CHECK(traj.letters.back() == 1);
}

TEST_CASE("simulate_rnn: overflow is reported as divergence") {
    const auto sys = testing::scalar_rnn(identity_activation(), 1000, 0, 1);
    auto start = sys;
    start.x0 = {Scalar(1)};
    try {
        (void)simulate_rnn(start, PwcInput::constant(0), 5.0, 1e-3);
        FAIL("expected divergence");
    } catch (const DivergenceError &e) {
        CHECK(e.time() > 0.5);
        CHECK(e.time() < 1.0);
    }
}

TEST_CASE("simulate_rational examples") {
    SUBCASE("symmetric worked-example dynamics keep both coordinates equal") {
        RationalSystemSpec sys;
        sys.dim = 2;
        sys.fields = {{RationalFunc(parse_poly("X1*X2*(1 - X1)", 2)), RationalFunc(parse_poly("X1*X2*(1 - X2)", 2))}};
        sys.outputs = {RationalFunc(parse_poly("X1", 2))};
        const Scalar start = round_to_decimal(1.0 / (1.0 + std::exp(-0.5)), 12);
        sys.v0 = {start, start};
        const auto traj = simulate_rational(sys, PwcInput::constant(0), 5.0, 1e-3);
        for (const auto &v : traj.states) CHECK(v[0] == v[1]);
    }
    SUBCASE("constant field") {
        const auto traj = simulate_rational(one_state("1", "1", Scalar(0)), PwcInput::constant(0), 2.0, 1e-3);
        CHECK(std::abs(traj.states.back()[0] - 2.0) <= 1e-12);
    }
    SUBCASE("logistic equation") {
        CHECK(std::abs(logistic_at_one(1e-3) - std::exp(1.0) / (1.0 + std::exp(1.0))) <= 1e-8);
    }
}

TEST_CASE("simulate_rational: denominator guard") {
    RationalSystemSpec sys;
    sys.dim = 2;
    sys.fields = {{RationalFunc(parse_poly("1", 2)), RationalFunc(parse_poly("1", 2), parse_poly("X1 - 1/2", 2))}};
    sys.outputs = {RationalFunc(parse_poly("X2", 2))};
    sys.v0 = {Scalar(0), Scalar(0)};
    try {
        (void)simulate_rational(sys, PwcInput::constant(0), 1.0, 1e-3);
        FAIL("expected a singularity");
    } catch (const SingularityError &e) {
        CHECK(std::abs(e.time() - 0.5) <= 2e-3);
        CHECK(std::string(e.what()).find("state") != std::string::npos);
    }

    sys.v0 = {Scalar(1, 2), Scalar(0)};
    CHECK_THROWS_AS(simulate_rational(sys, PwcInput::constant(0), 1.0, 1e-3), ArgumentError);
}

TEST_CASE("is_polynomial examples") {
    CHECK(is_polynomial(one_state("X1", "1", Scalar(0))));
    CHECK(!is_polynomial(one_state("1", "X1", Scalar(1))));
    auto sys = one_state("X1", "1", Scalar(0));
    sys.outputs = {RationalFunc(parse_poly("1", 1), parse_poly("X1 + 2", 1))};
    CHECK(!is_polynomial(sys));
}

TEST_CASE("RK4 shows fourth-order convergence") {
    const double x1 = logistic_at_one(0.2), x2 = logistic_at_one(0.1), x3 = logistic_at_one(0.05);
    const double ratio = std::abs(x1 - x2) / std::abs(x2 - x3);
    CHECK(ratio >= 16 * 0.75);
    CHECK(ratio <= 16 * 1.25);
}

TEST_CASE("simulation is deterministic") {
    testing::RandomRnnGenerator gen(5);
    for (int i = 0; i < 3; ++i) {
        const auto sys = gen.next(i % 2 == 0);
        const auto u = gen.three_piece_input(sys.num_letters());
        const auto a = simulate_rnn(sys, u, 5.0, 1e-2);
        const auto b = simulate_rnn(sys, u, 5.0, 1e-2);
        CHECK(a.states == b.states);
        CHECK(a.outputs == b.outputs);
    }
}

TEST_CASE("switches on grid nodes need no refinement") {
    // Splitting the run at an on-grid switch reproduces the switched run.
    const auto sys = testing::scalar_rnn(sigmoid_activation(), Scalar(-1, 2), 1, 1, {Scalar(1), Scalar(-1)});
    const auto whole = simulate_rnn(sys, PwcInput{{0.5, 1.0}, {0, 1}}, 1.0, 1e-2);
    const auto first = simulate_rnn(sys, PwcInput::constant(0), 0.5, 1e-2);
    // Continue from the double state by integrating the second letter's field directly.
    const LetterField field = [](std::size_t, double, std::span<const double> x, std::span<double> dx) {
        dx[0] = 1.0 / (1.0 + std::exp(-(-0.5 * x[0] - 1.0)));
    };
    const auto rest = integrate_pwc(field, first.states.back(), PwcInput::constant(0), 0.5, 1e-2);
    REQUIRE(whole.states.size() == first.states.size() + rest.states.size() - 1);
    for (std::size_t s = 0; s < first.states.size(); ++s) CHECK(whole.states[s] == first.states[s]);
    CHECK(std::abs(whole.states.back()[0] - rest.states.back()[0]) <= 1e-14);
}

TEST_CASE("validation rejects malformed systems") {
    auto sys = testing::worked_example();
    sys.alphabet.clear();
    CHECK_THROWS_AS(validate(sys), ArgumentError);

    sys = testing::worked_example();
    sys.alphabet = {{Scalar(1)}, {Scalar(1)}};
    CHECK_THROWS_AS(validate(sys), ArgumentError);

    sys = testing::worked_example();
    sys.C = Matrix(1, 3);
    CHECK_THROWS_AS(validate(sys), DimensionError);

    RnnSystem empty;
    empty.alphabet = {{}};
    empty.activation = tanh_activation();
    CHECK_THROWS_AS(validate(empty), DimensionError);

    CHECK_THROWS_AS(validate(PwcInput{{1.0, -1.0}, {0, 0}}, 1), ArgumentError);
    CHECK_THROWS_AS(validate(PwcInput{{1.0}, {3}}, 2), ArgumentError);
    CHECK_THROWS_AS(simulate_rnn(testing::worked_example(), PwcInput::constant(0), 1.0, 0.0), ArgumentError);
}

TEST_CASE("trajectory CSV layout") {
    const auto traj = simulate_rnn(testing::worked_example(), PwcInput::constant(0), 0.02, 1e-2);
    std::ostringstream out;
    write_csv(out, traj);
    std::istringstream in(out.str());
    std::string header, row;
    std::getline(in, header);
    CHECK(header == "t,x1,x2,y1,input_letter_index");
    std::getline(in, row);
    CHECK(row == "0,0,0,0,1");
    int rows = 1;
    while (std::getline(in, row)) ++rows;
    CHECK(rows == 3);
}
