#pragma once

// Activation functions described by an explicit polynomial ODE
//   sigma^(N) = U(sigma, ..., sigma^(N-1)) / V(sigma, ..., sigma^(N-1))
// and their conversion to the (U_i, V_i, xi) data used by the constructions.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rnnrat/algebra.hpp"

namespace rnnrat {

enum class ClosedForm { none, tanh, sigmoid, identity };

std::string_view to_string(ClosedForm form);
/// Maps "tanh" / "sigmoid" / "identity" / "none"; anything else is an ArgumentError.
ClosedForm closed_form_from_string(std::string_view name);

struct ActivationSpec {
    std::string name;
    std::size_t order = 1;
    /// Right-hand side in `order` variables (X1 = sigma, X2 = sigma', ...).
    RationalFunc rhs;
    /// sigma(0), sigma'(0), ..., sigma^(N-1)(0).
    std::vector<Scalar> init;
    /// Declared property; used by the observability transfer.
    bool invertible = false;
    ClosedForm closed_form = ClosedForm::none;
};

/// Throws ConfigurationError when the spec is unusable (order 0, shape
/// mismatch, denominator vanishing at the initial condition, ...).
void validate(const ActivationSpec &spec);

ActivationSpec tanh_activation();
ActivationSpec sigmoid_activation();
ActivationSpec identity_activation();
/// Built-in activation by name, if any.
std::optional<ActivationSpec> builtin_activation(std::string_view name);

/// Evaluates xi(z) = (sigma(z), sigma'(z), ..., sigma^(N-1)(z)).
class XiRule {
public:
    XiRule() = default;
    explicit XiRule(const ActivationSpec &spec);

    std::size_t order() const { return order_; }

    /// Closed form when the activation has one (order 1), otherwise integrate().
    std::vector<double> operator()(double z) const;

    /// Integrates the ODE from 0 to z with RK4, halving the step until two
    /// successive results agree within 1e-10. Throws EvaluationError when a
    /// denominator vanishes or the iteration does not settle.
    std::vector<double> integrate(double z) const;

private:
    std::vector<double> rk4(double z, std::size_t steps) const;
    void derivative(std::span<const double> y, std::span<double> dy) const;

    std::size_t order_ = 0;
    CompiledPoly num_;
    CompiledPoly den_;
    MultiPoly den_exact_;
    std::vector<double> init_;
    ClosedForm closed_form_ = ClosedForm::none;
};

/// Data of the form sigma V0(xi) = U0(xi), xi_i' V_i(xi) = U_i(xi).
struct A1Data {
    std::size_t order = 0;
    std::vector<MultiPoly> U; // U_0..U_N, each in N variables
    std::vector<MultiPoly> V; // V_0..V_N
    XiRule xi;

    bool is_polynomial() const;
};

/// xi_i = sigma^(i-1); U_0 = X1, V_0 = 1; U_i = X_{i+1}, V_i = 1 for i < N;
/// U_N / V_N = rhs.
A1Data a2_to_a1(const ActivationSpec &spec);

double sigma_eval(const ActivationSpec &spec, double z);

struct A1CheckReport {
    double max_output_residual = 0;     // |sigma V0(xi) - U0(xi)|
    double max_derivative_residual = 0; // max_i |xi_i' V_i(xi) - U_i(xi)|
    double worst_sample = 0;
    bool pass = false;
};

/// Residuals of both identities along the samples, with xi from the ODE
/// integration, sigma from sigma_eval and xi' from a five-point stencil.
/// Passes iff both maxima are <= 1e-6.
A1CheckReport check_a1(const A1Data &data, const ActivationSpec &spec, std::span<const double> samples);

} // namespace rnnrat
