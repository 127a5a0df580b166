#pragma once

#include "rnnrat/activation.hpp"

namespace rnnrat::testing {

/// sigma = sin: sigma'' = -sigma, sigma(0) = 0, sigma'(0) = 1. No closed-form tag,
/// so every evaluation goes through the ODE path.
inline ActivationSpec sine_activation() {
    ActivationSpec spec;
    spec.name = "sine";
    spec.order = 2;
    spec.rhs = RationalFunc(parse_poly("-X1", 2));
    spec.init = {Scalar(0), Scalar(1)};
    return spec;
}

/// sigma' = 1 / (1 + sigma^2), sigma(0) = 0: the inverse of z = s + s^3/3.
/// Analytic, globally Lipschitz and invertible, with a rational right-hand side.
inline ActivationSpec cubic_inverse_activation() {
    ActivationSpec spec;
    spec.name = "cubic_inverse";
    spec.order = 1;
    spec.rhs = RationalFunc(parse_poly("1", 1), parse_poly("1 + X1^2", 1));
    spec.init = {Scalar(0)};
    spec.invertible = true;
    return spec;
}

} // namespace rnnrat::testing
