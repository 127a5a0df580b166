#pragma once

// Construction of the rational system R(Sigma) and the auxiliary system
// R_aux(Sigma) from an RNN, the embedding map F, and numeric co-simulation
// checks of both constructions.

#include <cstddef>
#include <vector>

#include "rnnrat/systems.hpp"

namespace rnnrat {

/// Flattens (derivative index i, neuron j, letter r), all 1-based, into the
/// 1-based position N*K*(j-1) + N*(r-1) + i of the upsilon block.
class IndexMap {
public:
    struct Triple {
        std::size_t i, j, r;
        friend bool operator==(const Triple &, const Triple &) = default;
    };

    IndexMap(std::size_t N, std::size_t n, std::size_t K);

    std::size_t N() const { return N_; }
    std::size_t n() const { return n_; }
    std::size_t K() const { return K_; }
    std::size_t size() const { return N_ * n_ * K_; }

    /// Throws ArgumentError when any index is out of range.
    std::size_t phi(std::size_t i, std::size_t j, std::size_t r) const;
    Triple phi_inverse(std::size_t k) const;

private:
    std::size_t N_, n_, K_;
};

IndexMap index_map(const RnnSystem &sys);

/// Dimension n(1 + N K) of R(Sigma).
std::size_t r_sigma_dim(const RnnSystem &sys);
/// Dimension n N K of R_aux(Sigma).
std::size_t r_aux_dim(const RnnSystem &sys);

/// States 1..NKn hold upsilon_{i,j,alpha} in phi order, then x_1..x_n.
/// Outputs are sum_i c_{k,i} x_i over 1. Initial upsilon values are
/// xi_i(e_j^T(A x0 + B alpha)) rounded to 12 decimals.
RationalSystemSpec build_r_sigma(const RnnSystem &sys);

/// The upsilon block of R(Sigma) on its own, with outputs
/// y_{k,alpha} = sum_i c_{k,i} U0/V0(upsilon_{i,alpha}) at position r*p + k.
RationalSystemSpec build_r_aux(const RnnSystem &sys);

/// F(x): the xi values followed by x itself.
std::vector<double> embed_state(const RnnSystem &sys, std::span<const double> x);

struct EmbeddingReport {
    double max_state_deviation = 0;
    double max_output_deviation = 0;
    double worst_time = 0;
    double horizon = 0;
    double step = 0;
    double tol = 0;
    PwcInput input;
    bool pass = false;
};

/// Simulates the RNN and R(Sigma) on the same grid and compares upsilon(t)
/// with F(x(t)) and the two outputs.
EmbeddingReport verify_embedding(const RnnSystem &sys, const PwcInput &u, double horizon, double step, double tol);
/// Same check against a caller-supplied rational system (e.g. a modified one).
EmbeddingReport verify_embedding(const RnnSystem &sys, const RationalSystemSpec &r_sigma, const PwcInput &u,
                                 double horizon, double step, double tol);

/// (sum_i c_{k,i} sigma(sum_j a_{i,j} x_j + e_i^T B alpha))_k: the derivative
/// of the output when the input switches to letter `letter` (0-based).
std::vector<double> derivative_output_closed_form(const RnnSystem &sys, std::span<const double> x,
                                                  std::size_t letter);

struct AuxReport {
    double max_closed_form_deviation = 0;
    double max_fd_deviation = 0;
    double worst_closed_form_time = 0;
    double worst_fd_time = 0;
    double horizon = 0;
    double step = 0;
    double fd_step = 0;
    double tol_closed = 0;
    double tol_fd = 0;
    PwcInput input;
    bool closed_form_pass = false;
    bool fd_pass = false;
    bool pass = false;
};

/// Compares the R_aux outputs along the grid with the closed form at the RNN
/// state and with the forward difference (y(t+h) - y(t))/h obtained by holding
/// each letter for one RK4 step of length h from x(t).
AuxReport verify_aux(const RnnSystem &sys, const PwcInput &u, double horizon, double step, double tol_closed,
                     double tol_fd, double fd_step = 1e-6);

} // namespace rnnrat
