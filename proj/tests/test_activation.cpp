#include <doctest.h>

#include <cmath>

#include "rnnrat/activation.hpp"
#include "support/activations.hpp"

using namespace rnnrat;

namespace {

MultiPoly P(const std::string &s) { return parse_poly(s, 1); }

std::vector<double> grid(double lo, double hi, int points) {
    std::vector<double> out;
    for (int i = 0; i < points; ++i) out.push_back(lo + (hi - lo) * i / (points - 1));
    return out;
}

} // namespace

TEST_CASE("a2_to_a1 examples") {
    const auto tanh_data = a2_to_a1(tanh_activation());
    REQUIRE(tanh_data.U.size() == 2);
    CHECK(tanh_data.U[0] == P("X1"));
    CHECK(tanh_data.V[0].is_one());
    CHECK(tanh_data.U[1] == P("1 - X1^2"));
    CHECK(tanh_data.V[1].is_one());

    const auto sigmoid_data = a2_to_a1(sigmoid_activation());
    CHECK(sigmoid_data.U[0] == P("X1"));
    CHECK(sigmoid_data.U[1] == P("X1 - X1^2"));
    CHECK(sigmoid_data.V[1].is_one());

    const auto id_data = a2_to_a1(identity_activation());
    CHECK(id_data.U[0] == P("X1"));
    CHECK(id_data.U[1] == P("1"));
    CHECK(id_data.is_polynomial());
}

TEST_CASE("a2_to_a1 shape for higher order and rational right-hand sides") {
    const auto sine = testing::sine_activation();
    const auto data = a2_to_a1(sine);
    REQUIRE(data.U.size() == 3);
    REQUIRE(data.V.size() == 3);
    for (const auto &u : data.U) CHECK(u.num_vars() == 2);
    CHECK(data.U[0] == parse_poly("X1", 2));
    CHECK(data.U[1] == parse_poly("X2", 2));
    CHECK(data.U[2] == parse_poly("-X1", 2));

    const auto cubic = a2_to_a1(testing::cubic_inverse_activation());
    CHECK(!cubic.is_polynomial());
    CHECK(cubic.V[1] == P("1 + X1^2"));
}

TEST_CASE("activation validation") {
    auto spec = tanh_activation();
    spec.init.clear();
    CHECK_THROWS_AS(validate(spec), ConfigurationError);

    spec = tanh_activation();
    spec.order = 0;
    CHECK_THROWS_AS(validate(spec), ConfigurationError);

    spec = testing::cubic_inverse_activation();
    spec.rhs = RationalFunc(P("1"), P("X1"));
    CHECK_THROWS_AS(validate(spec), ConfigurationError); // denominator vanishes at sigma(0) = 0

    spec = testing::sine_activation();
    spec.closed_form = ClosedForm::tanh;
    CHECK_THROWS_AS(validate(spec), ConfigurationError);
}

TEST_CASE("sigma_eval examples") {
    CHECK(sigma_eval(tanh_activation(), 0.0) == 0.0);
    CHECK(sigma_eval(sigmoid_activation(), 0.0) == 0.5);
    auto ode_tanh = tanh_activation();
    ode_tanh.closed_form = ClosedForm::none;
    CHECK(std::abs(sigma_eval(ode_tanh, 1.0) - std::tanh(1.0)) <= 1e-8);
}

TEST_CASE("ODE path agrees with closed forms on [-5, 5]") {
    for (auto spec : {tanh_activation(), sigmoid_activation(), identity_activation()}) {
        const XiRule rule(spec);
        double worst = 0;
        for (double z : grid(-5, 5, 101)) worst = std::max(worst, std::abs(rule.integrate(z)[0] - sigma_eval(spec, z)));
        INFO(spec.name);
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("ODE path for a second-order activation") {
    const XiRule rule(testing::sine_activation());
    for (double z : grid(-4, 4, 17)) {
        const auto xi = rule(z);
        CHECK(std::abs(xi[0] - std::sin(z)) <= 1e-8);
        CHECK(std::abs(xi[1] - std::cos(z)) <= 1e-8);
    }
}

TEST_CASE("ODE path for a rational right-hand side") {
    // sigma inverts z = s + s^3 / 3.
    const XiRule rule(testing::cubic_inverse_activation());
    for (double z : grid(-3, 3, 13)) {
        const double s = rule(z)[0];
        CHECK(std::abs(s + s * s * s / 3 - z) <= 1e-8);
    }
}

TEST_CASE("xi rule reports vanishing denominators") {
    // sigma' = 1 / (1 - sigma) with sigma(0) = 0 reaches the pole at z = 1/2.
    ActivationSpec spec;
    spec.name = "pole";
    spec.order = 1;
    spec.rhs = RationalFunc(P("1"), P("1 - X1"));
    spec.init = {Scalar(0)};
    CHECK_THROWS_AS(XiRule(spec).integrate(2.0), EvaluationError);
}

TEST_CASE("check_a1 examples") {
    const auto samples = grid(-3, 3, 61);
    for (const auto &spec : {tanh_activation(), sigmoid_activation(), testing::sine_activation(),
                             testing::cubic_inverse_activation()}) {
        const auto report = check_a1(a2_to_a1(spec), spec, samples);
        INFO(spec.name << " " << report.max_output_residual << " " << report.max_derivative_residual);
        CHECK(report.pass);
    }

    auto corrupted = a2_to_a1(tanh_activation());
    corrupted.U[1] = P("1 + X1^2");
    const auto bad = check_a1(corrupted, tanh_activation(), samples);
    CHECK(!bad.pass);
    CHECK(bad.max_derivative_residual > 1e-1);
    // The residual of the corrupted identity is |(1 - s^2) - (1 + s^2)| = 2 s^2, maximal at the ends.
    const double expected = 2 * std::tanh(3.0) * std::tanh(3.0);
    CHECK(std::abs(bad.max_derivative_residual - expected) <= 1e-6);
}
