#pragma once

// Fixture systems and a seeded generator of random RNNs shared by unit and acceptance tests.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "rnnrat/systems.hpp"

namespace rnnrat::testing {

inline Matrix matrix_from(const std::vector<std::vector<std::string>> &rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = parse_scalar(rows[r][c]);
    }
    return m;
}

/// x1' = sigmoid(x2 + u), x2' = sigmoid(x1 + u), y = x1, x(0) = 0, alphabet {u}.
inline RnnSystem worked_example(const Scalar &u = Scalar(1, 2)) {
    RnnSystem sys;
    sys.A = matrix_from({{"0", "1"}, {"1", "0"}});
    sys.B = matrix_from({{"1"}, {"1"}});
    sys.C = matrix_from({{"1", "0"}});
    sys.x0 = {Scalar(0), Scalar(0)};
    sys.alphabet = {{u}};
    sys.activation = sigmoid_activation();
    return sys;
}

/// Single-neuron RNN x' = sigma(a x + b u), y = c x.
inline RnnSystem scalar_rnn(const ActivationSpec &act, const Scalar &a, const Scalar &b, const Scalar &c,
                            std::vector<Scalar> letters = {Scalar(1)}) {
    RnnSystem sys;
    sys.A = Matrix{{a}};
    sys.B = Matrix{{b}};
    sys.C = Matrix{{c}};
    sys.x0 = {Scalar(0)};
    for (const auto &l : letters) sys.alphabet.push_back({l});
    sys.activation = act;
    return sys;
}

struct RandomRnnOptions {
    std::size_t max_n = 4;
    std::size_t max_letters = 3;
    std::size_t max_inputs = 2;
    std::size_t max_outputs = 2;
};

/// Entries drawn from {-1, -3/4, ..., 3/4, 1}; tanh and sigmoid alternate with the trial index.
class RandomRnnGenerator {
public:
    explicit RandomRnnGenerator(std::uint64_t seed, RandomRnnOptions options = {})
        : rng_(seed), options_(options) {}

    Scalar entry() {
        Scalar q(std::uniform_int_distribution<int>(-4, 4)(rng_), 4);
        q.canonicalize();
        return q;
    }

    Matrix matrix(std::size_t rows, std::size_t cols) {
        Matrix m(rows, cols);
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) m(r, c) = entry();
        }
        return m;
    }

    RnnSystem next(bool use_tanh) {
        const std::size_t n = pick(1, options_.max_n);
        const std::size_t k = pick(1, options_.max_letters);
        const std::size_t m = pick(1, options_.max_inputs);
        const std::size_t p = pick(1, options_.max_outputs);
        RnnSystem sys;
        sys.A = matrix(n, n);
        sys.B = matrix(n, m);
        sys.C = matrix(p, n);
        for (std::size_t i = 0; i < n; ++i) sys.x0.push_back(entry());
        while (sys.alphabet.size() < k) {
            Letter letter;
            for (std::size_t j = 0; j < m; ++j) letter.push_back(entry());
            if (std::find(sys.alphabet.begin(), sys.alphabet.end(), letter) == sys.alphabet.end()) {
                sys.alphabet.push_back(std::move(letter));
            }
        }
        sys.activation = use_tanh ? tanh_activation() : sigmoid_activation();
        return sys;
    }

    /// Three pieces with durations in {0.75, 1, ..., 2.5}.
    PwcInput three_piece_input(std::size_t num_letters) {
        PwcInput u;
        for (int i = 0; i < 3; ++i) {
            u.durations.push_back(0.25 * static_cast<double>(pick(3, 10)));
            u.letters.push_back(pick(0, num_letters - 1));
        }
        return u;
    }

    std::size_t pick(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
    }

    std::mt19937_64 &rng() { return rng_; }

private:
    std::mt19937_64 rng_;
    RandomRnnOptions options_;
};

} // namespace rnnrat::testing
