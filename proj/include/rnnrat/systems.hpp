#pragma once

// RNNs, rational systems, piecewise-constant inputs and fixed-step simulation.

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rnnrat/activation.hpp"
#include "rnnrat/algebra.hpp"

namespace rnnrat {

using Letter = std::vector<Scalar>;

/// x' = sigma(A x + B u), y = C x, x(0) = x0, u taking values in a finite alphabet.
struct RnnSystem {
    Matrix A; // n x n
    Matrix B; // n x m
    Matrix C; // p x n
    std::vector<Scalar> x0;
    std::vector<Letter> alphabet; // K distinct m-vectors
    ActivationSpec activation;

    std::size_t n() const { return A.rows(); }
    std::size_t m() const { return B.cols(); }
    std::size_t p() const { return C.rows(); }
    std::size_t num_letters() const { return alphabet.size(); }
};

/// Shapes, non-empty distinct alphabet, n >= 1 and a usable activation.
/// Throws DimensionError / ArgumentError / ConfigurationError.
void validate(const RnnSystem &sys);

/// v_i' = P_{i,a}(v) / Q_{i,a}(v), y_k = h_{k,1}(v) / h_{k,2}(v).
struct RationalSystemSpec {
    std::size_t dim = 0;
    /// fields[a][i] = P_{i,a} / Q_{i,a}, one row per input letter.
    std::vector<std::vector<RationalFunc>> fields;
    std::vector<RationalFunc> outputs;
    std::vector<Scalar> v0;
    /// Optional display names for the state variables (empty or `dim` entries).
    std::vector<std::string> var_names;
    /// Optional letter values, carried as metadata (empty or one per field row).
    std::vector<Letter> alphabet;

    std::size_t num_letters() const { return fields.size(); }
};

void validate(const RationalSystemSpec &sys);

/// True iff every Q_{i,a} and every h_{k,2} is the constant 1.
bool is_polynomial(const RationalSystemSpec &sys);

/// Piecewise-constant input: letters[i] (0-based alphabet index) on
/// [T_i, T_{i+1}), T_0 = 0, T_{i+1} = T_i + durations[i]; the last letter is held forever.
struct PwcInput {
    std::vector<double> durations;
    std::vector<std::size_t> letters;

    static PwcInput constant(std::size_t letter) { return {{1.0}, {letter}}; }

    /// Interior switch instants T_1 .. T_{l-1}.
    std::vector<double> switch_times() const;
    /// Letter active at t (right-continuous).
    std::size_t letter_at(double t) const;
};

void validate(const PwcInput &u, std::size_t num_letters);

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    std::vector<std::vector<double>> outputs;
    /// 0-based letter active on [t_k, t_{k+1}).
    std::vector<std::size_t> letters;
};

/// Vector field of a piecewise-defined autonomous system, selected by letter.
using LetterField = std::function<void(std::size_t letter, double t, std::span<const double> x, std::span<double> dx)>;

/// Fixed-step RK4 on the uniform grid t_k = k * step (the last node is the horizon).
/// Steps containing an input switch are split at the switch. Samples are taken on the grid.
Trajectory integrate_pwc(const LetterField &field, std::vector<double> x0, const PwcInput &u, double horizon,
                         double step);

/// One classical RK4 step of length h with a fixed letter.
void rk4_step(const LetterField &field, std::size_t letter, double t, std::vector<double> &x, double h);

Trajectory simulate_rnn(const RnnSystem &sys, const PwcInput &u, double horizon, double step);
Trajectory simulate_rational(const RationalSystemSpec &sys, const PwcInput &u, double horizon, double step);

/// Scalar activation evaluator with the closed form when available.
std::function<double(double)> make_sigma(const ActivationSpec &spec);

/// Header "t,x1..xn,y1..yp,input_letter_index"; letters are written 1-based.
void write_csv(std::ostream &out, const Trajectory &traj);

} // namespace rnnrat
