#include "rnnrat/activation.hpp"

#include <algorithm>
#include <cmath>

namespace rnnrat {

namespace {

constexpr double kXiTolerance = 1e-10;
constexpr double kDenominatorGuard = 1e-12;
constexpr int kMaxHalvings = 14;

double closed_form_value(ClosedForm form, double z) {
    switch (form) {
    case ClosedForm::tanh: return std::tanh(z);
    case ClosedForm::sigmoid: return 1.0 / (1.0 + std::exp(-z));
    case ClosedForm::identity: return z;
    case ClosedForm::none: break;
    }
    throw ArgumentError("activation has no closed form");
}

ActivationSpec order_one(std::string name, const std::string &rhs, const std::string &init, ClosedForm form,
                         bool invertible) {
    ActivationSpec spec;
    spec.name = std::move(name);
    spec.order = 1;
    spec.rhs = RationalFunc(parse_poly(rhs, 1));
    spec.init = {parse_scalar(init)};
    spec.invertible = invertible;
    spec.closed_form = form;
    return spec;
}

} // namespace

std::string_view to_string(ClosedForm form) {
    switch (form) {
    case ClosedForm::tanh: return "tanh";
    case ClosedForm::sigmoid: return "sigmoid";
    case ClosedForm::identity: return "identity";
    case ClosedForm::none: break;
    }
    return "none";
}

ClosedForm closed_form_from_string(std::string_view name) {
    if (name == "tanh") return ClosedForm::tanh;
    if (name == "sigmoid") return ClosedForm::sigmoid;
    if (name == "identity") return ClosedForm::identity;
    if (name == "none" || name.empty()) return ClosedForm::none;
    throw ArgumentError("unknown closed-form tag '" + std::string(name) + "'");
}

void validate(const ActivationSpec &spec) {
    const std::string who = "activation '" + spec.name + "': ";
    if (spec.order == 0) throw ConfigurationError(who + "order must be at least 1");
    if (spec.rhs.num_vars() != spec.order) {
        throw ConfigurationError(who + "right-hand side has " + std::to_string(spec.rhs.num_vars()) +
                                 " variables, expected " + std::to_string(spec.order));
    }
    if (spec.init.size() != spec.order) {
        throw ConfigurationError(who + "initial condition has " + std::to_string(spec.init.size()) +
                                 " entries, expected " + std::to_string(spec.order));
    }
    if (spec.rhs.denominator().evaluate(spec.init) == 0) {
        throw ConfigurationError(who + "right-hand side denominator vanishes at the initial condition");
    }
    if (spec.closed_form != ClosedForm::none && spec.order != 1) {
        throw ConfigurationError(who + "closed-form tags are only defined for first-order activations");
    }
}

ActivationSpec tanh_activation() { return order_one("tanh", "1 - X1^2", "0", ClosedForm::tanh, true); }

ActivationSpec sigmoid_activation() {
    return order_one("sigmoid", "X1*(1 - X1)", "1/2", ClosedForm::sigmoid, true);
}

ActivationSpec identity_activation() { return order_one("identity", "1", "0", ClosedForm::identity, true); }

std::optional<ActivationSpec> builtin_activation(std::string_view name) {
    if (name == "tanh") return tanh_activation();
    if (name == "sigmoid") return sigmoid_activation();
    if (name == "identity") return identity_activation();
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// XiRule
// ---------------------------------------------------------------------------

XiRule::XiRule(const ActivationSpec &spec)
    : order_(spec.order),
      num_(spec.rhs.numerator()),
      den_(spec.rhs.denominator()),
      den_exact_(spec.rhs.denominator()),
      closed_form_(spec.closed_form) {
    validate(spec);
    init_.reserve(spec.init.size());
    for (const auto &v : spec.init) init_.push_back(v.get_d());
}

void XiRule::derivative(std::span<const double> y, std::span<double> dy) const {
    for (std::size_t i = 0; i + 1 < order_; ++i) dy[i] = y[i + 1];
    const double d = den_(y);
    if (!(std::abs(d) >= kDenominatorGuard)) {
        throw EvaluationError("activation ODE denominator vanishes during xi integration", den_exact_);
    }
    dy[order_ - 1] = num_(y) / d;
}

std::vector<double> XiRule::rk4(double z, std::size_t steps) const {
    std::vector<double> y = init_, k1(order_), k2(order_), k3(order_), k4(order_), w(order_);
    const double h = z / static_cast<double>(steps);
    for (std::size_t s = 0; s < steps; ++s) {
        derivative(y, k1);
        for (std::size_t i = 0; i < order_; ++i) w[i] = y[i] + 0.5 * h * k1[i];
        derivative(w, k2);
        for (std::size_t i = 0; i < order_; ++i) w[i] = y[i] + 0.5 * h * k2[i];
        derivative(w, k3);
        for (std::size_t i = 0; i < order_; ++i) w[i] = y[i] + h * k3[i];
        derivative(w, k4);
        for (std::size_t i = 0; i < order_; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    for (double v : y) {
        if (!std::isfinite(v)) throw EvaluationError("xi integration produced a non-finite value", den_exact_);
    }
    return y;
}

std::vector<double> XiRule::integrate(double z) const {
    if (order_ == 0) throw ConfigurationError("xi rule used before initialisation");
    if (z == 0.0) return init_;
    auto steps = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(std::abs(z) / 0.05)));
    std::vector<double> coarse = rk4(z, steps);
    for (int k = 0; k < kMaxHalvings; ++k) {
        steps *= 2;
        std::vector<double> fine = rk4(z, steps);
        double delta = 0;
        for (std::size_t i = 0; i < order_; ++i) delta = std::max(delta, std::abs(fine[i] - coarse[i]));
        if (delta <= kXiTolerance * std::max(1.0, std::abs(fine[0]))) return fine;
        coarse = std::move(fine);
    }
    throw EvaluationError("xi integration did not reach tolerance at z = " + std::to_string(z), den_exact_);
}

std::vector<double> XiRule::operator()(double z) const {
    if (closed_form_ != ClosedForm::none && order_ == 1) return {closed_form_value(closed_form_, z)};
    return integrate(z);
}

// ---------------------------------------------------------------------------
// A1 data
// ---------------------------------------------------------------------------

bool A1Data::is_polynomial() const {
    return std::all_of(V.begin(), V.end(), [](const MultiPoly &v) { return v.is_one(); });
}

A1Data a2_to_a1(const ActivationSpec &spec) {
    validate(spec);
    const std::size_t n = spec.order;
    A1Data data;
    data.order = n;
    const MultiPoly one = MultiPoly::constant(n, Scalar(1));
    data.U.push_back(MultiPoly::variable(n, 0));
    data.V.push_back(one);
    for (std::size_t i = 1; i < n; ++i) {
        data.U.push_back(MultiPoly::variable(n, i));
        data.V.push_back(one);
    }
    data.U.push_back(spec.rhs.numerator());
    data.V.push_back(spec.rhs.denominator());
    data.xi = XiRule(spec);
    return data;
}

double sigma_eval(const ActivationSpec &spec, double z) {
    if (spec.closed_form != ClosedForm::none) return closed_form_value(spec.closed_form, z);
    return XiRule(spec).integrate(z)[0];
}

A1CheckReport check_a1(const A1Data &data, const ActivationSpec &spec, std::span<const double> samples) {
    A1CheckReport report;
    const std::size_t n = data.order;
    const XiRule rule(spec);
    const double h = 1e-2;
    for (double z : samples) {
        const auto xi = rule.integrate(z);
        const double sigma = sigma_eval(spec, z);
        const double r0 = std::abs(sigma * data.V[0].evaluate(std::span<const double>(xi)) -
                                   data.U[0].evaluate(std::span<const double>(xi)));
        const auto p2 = rule.integrate(z + 2 * h), p1 = rule.integrate(z + h);
        const auto m1 = rule.integrate(z - h), m2 = rule.integrate(z - 2 * h);
        double rd = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dxi = (-p2[i] + 8 * p1[i] - 8 * m1[i] + m2[i]) / (12 * h);
            const double r = std::abs(dxi * data.V[i + 1].evaluate(std::span<const double>(xi)) -
                                      data.U[i + 1].evaluate(std::span<const double>(xi)));
            rd = std::max(rd, r);
        }
        if (std::max(r0, rd) > std::max(report.max_output_residual, report.max_derivative_residual)) {
            report.worst_sample = z;
        }
        report.max_output_residual = std::max(report.max_output_residual, r0);
        report.max_derivative_residual = std::max(report.max_derivative_residual, rd);
    }
    report.pass = report.max_output_residual <= 1e-6 && report.max_derivative_residual <= 1e-6;
    return report;
}

} // namespace rnnrat
