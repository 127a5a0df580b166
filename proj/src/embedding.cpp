#include "rnnrat/embedding.hpp"

#include <algorithm>
#include <cmath>

namespace rnnrat {

namespace {

constexpr int kInitialDigits = 12;

// z_{j,alpha} = e_j^T(A x + B alpha) for all j and letters, in double.
struct Preactivation {
    std::vector<double> a;                  // n x n row-major
    std::vector<std::vector<double>> drive; // [letter][j] = e_j^T B alpha

    explicit Preactivation(const RnnSystem &sys) : a(sys.n() * sys.n()), drive(sys.num_letters()) {
        const std::size_t n = sys.n();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) a[i * n + j] = sys.A(i, j).get_d();
        }
        for (std::size_t r = 0; r < sys.num_letters(); ++r) {
            drive[r].resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                Scalar s = 0;
                for (std::size_t l = 0; l < sys.m(); ++l) s += sys.B(i, l) * sys.alphabet[r][l];
                drive[r][i] = s.get_d();
            }
        }
    }

    double operator()(std::span<const double> x, std::size_t j, std::size_t r) const {
        const std::size_t n = x.size();
        double z = drive[r][j];
        for (std::size_t l = 0; l < n; ++l) z += a[j * n + l] * x[l];
        return z;
    }
};

// Exact z at x0, used for the initial state.
Scalar exact_preactivation(const RnnSystem &sys, std::size_t j, std::size_t r) {
    Scalar z = 0;
    for (std::size_t l = 0; l < sys.n(); ++l) z += sys.A(j, l) * sys.x0[l];
    for (std::size_t l = 0; l < sys.m(); ++l) z += sys.B(j, l) * sys.alphabet[r][l];
    return z;
}

std::vector<double> embed_with(const IndexMap &idx, const XiRule &xi, const Preactivation &pre,
                               std::span<const double> x) {
    const std::size_t N = idx.N(), n = idx.n(), K = idx.K();
    std::vector<double> out(idx.size() + n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t r = 0; r < K; ++r) {
            const auto values = xi(pre(x, j, r));
            const std::size_t base = idx.phi(1, j + 1, r + 1) - 1;
            for (std::size_t i = 0; i < N; ++i) out[base + i] = values[i];
        }
    }
    std::copy(x.begin(), x.end(), out.begin() + static_cast<std::ptrdiff_t>(idx.size()));
    return out;
}

// U/V of the activation data moved onto the block upsilon_{., j, r} of a ring with `vars` variables.
RationalFunc on_block(const MultiPoly &U, const MultiPoly &V, const IndexMap &idx, std::size_t vars, std::size_t j,
                      std::size_t r) {
    std::vector<std::size_t> var_map(idx.N());
    const std::size_t base = idx.phi(1, j + 1, r + 1) - 1;
    for (std::size_t q = 0; q < idx.N(); ++q) var_map[q] = base + q;
    return RationalFunc(U.rename(vars, var_map), V.rename(vars, var_map));
}

// The upsilon fields in a ring with `vars` variables, one row per active letter.
std::vector<std::vector<RationalFunc>> upsilon_fields(const RnnSystem &sys, const A1Data &data, const IndexMap &idx,
                                                      std::size_t vars) {
    const std::size_t N = idx.N(), n = idx.n(), K = idx.K();
    std::vector<std::vector<RationalFunc>> fields(K, std::vector<RationalFunc>(idx.size(), RationalFunc(vars)));
    for (std::size_t beta = 0; beta < K; ++beta) {
        for (std::size_t j = 0; j < n; ++j) {
            // sum_l a_{j,l} U0/V0(upsilon_{l,beta}); zero weights contribute nothing
            std::vector<RationalFunc> terms;
            for (std::size_t l = 0; l < n; ++l) {
                if (sys.A(j, l) == 0) continue;
                RationalFunc s = on_block(data.U[0], data.V[0], idx, vars, l, beta);
                terms.emplace_back(s.numerator() * sys.A(j, l), s.denominator());
            }
            if (terms.empty()) continue;
            const RationalFunc speed = rat_combine(terms);
            for (std::size_t alpha = 0; alpha < K; ++alpha) {
                for (std::size_t i = 1; i <= N; ++i) {
                    fields[beta][idx.phi(i, j + 1, alpha + 1) - 1] =
                        on_block(data.U[i], data.V[i], idx, vars, j, alpha) * speed;
                }
            }
        }
    }
    return fields;
}

std::vector<Scalar> upsilon_initial(const RnnSystem &sys, const A1Data &data, const IndexMap &idx) {
    std::vector<Scalar> v0(idx.size());
    for (std::size_t j = 0; j < idx.n(); ++j) {
        for (std::size_t r = 0; r < idx.K(); ++r) {
            const auto values = data.xi(exact_preactivation(sys, j, r).get_d());
            for (std::size_t i = 0; i < idx.N(); ++i) {
                v0[idx.phi(i + 1, j + 1, r + 1) - 1] = round_to_decimal(values[i], kInitialDigits);
            }
        }
    }
    return v0;
}

std::vector<std::string> upsilon_names(const IndexMap &idx) {
    std::vector<std::string> names(idx.size());
    for (std::size_t k = 1; k <= idx.size(); ++k) {
        const auto t = idx.phi_inverse(k);
        names[k - 1] = "v_" + std::to_string(t.i) + "_" + std::to_string(t.j) + "_alpha" + std::to_string(t.r);
    }
    return names;
}

void check_tolerance(double tol) {
    if (!(tol >= 0) || !std::isfinite(tol)) throw ArgumentError("tolerance must be non-negative and finite");
}

} // namespace

IndexMap::IndexMap(std::size_t N, std::size_t n, std::size_t K) : N_(N), n_(n), K_(K) {
    if (N == 0 || n == 0 || K == 0) throw ArgumentError("index map needs N, n, K >= 1");
}

std::size_t IndexMap::phi(std::size_t i, std::size_t j, std::size_t r) const {
    if (i < 1 || i > N_ || j < 1 || j > n_ || r < 1 || r > K_) {
        throw ArgumentError("phi(" + std::to_string(i) + ", " + std::to_string(j) + ", " + std::to_string(r) +
                            ") outside {1.." + std::to_string(N_) + "} x {1.." + std::to_string(n_) + "} x {1.." +
                            std::to_string(K_) + "}");
    }
    return N_ * K_ * (j - 1) + N_ * (r - 1) + i;
}

IndexMap::Triple IndexMap::phi_inverse(std::size_t k) const {
    if (k < 1 || k > size()) {
        throw ArgumentError("flat index " + std::to_string(k) + " outside 1.." + std::to_string(size()));
    }
    const std::size_t z = k - 1;
    return {z % N_ + 1, z / (N_ * K_) + 1, (z / N_) % K_ + 1};
}

IndexMap index_map(const RnnSystem &sys) { return IndexMap(sys.activation.order, sys.n(), sys.num_letters()); }

std::size_t r_sigma_dim(const RnnSystem &sys) { return sys.n() * (1 + sys.activation.order * sys.num_letters()); }

std::size_t r_aux_dim(const RnnSystem &sys) { return sys.n() * sys.activation.order * sys.num_letters(); }

RationalSystemSpec build_r_sigma(const RnnSystem &sys) {
    validate(sys);
    const A1Data data = a2_to_a1(sys.activation);
    const IndexMap idx = index_map(sys);
    const std::size_t n = sys.n(), L = r_sigma_dim(sys), base = idx.size();

    RationalSystemSpec out;
    out.dim = L;
    out.fields = upsilon_fields(sys, data, idx, L);
    for (std::size_t beta = 0; beta < idx.K(); ++beta) {
        for (std::size_t j = 0; j < n; ++j) {
            out.fields[beta].push_back(on_block(data.U[0], data.V[0], idx, L, j, beta));
        }
    }
    for (std::size_t k = 0; k < sys.p(); ++k) {
        MultiPoly y(L);
        for (std::size_t i = 0; i < n; ++i) y += MultiPoly::variable(L, base + i) * sys.C(k, i);
        out.outputs.emplace_back(std::move(y));
    }
    out.v0 = upsilon_initial(sys, data, idx);
    out.v0.insert(out.v0.end(), sys.x0.begin(), sys.x0.end());
    out.var_names = upsilon_names(idx);
    for (std::size_t j = 1; j <= n; ++j) out.var_names.push_back("x_" + std::to_string(j));
    out.alphabet = sys.alphabet;
    return out;
}

RationalSystemSpec build_r_aux(const RnnSystem &sys) {
    validate(sys);
    const A1Data data = a2_to_a1(sys.activation);
    const IndexMap idx = index_map(sys);
    const std::size_t D = idx.size();

    RationalSystemSpec out;
    out.dim = D;
    out.fields = upsilon_fields(sys, data, idx, D);
    for (std::size_t r = 0; r < idx.K(); ++r) {
        for (std::size_t k = 0; k < sys.p(); ++k) {
            std::vector<RationalFunc> terms;
            for (std::size_t i = 0; i < sys.n(); ++i) {
                if (sys.C(k, i) == 0) continue;
                RationalFunc s = on_block(data.U[0], data.V[0], idx, D, i, r);
                terms.emplace_back(s.numerator() * sys.C(k, i), s.denominator());
            }
            out.outputs.push_back(terms.empty() ? RationalFunc(D) : rat_combine(terms));
        }
    }
    out.v0 = upsilon_initial(sys, data, idx);
    out.var_names = upsilon_names(idx);
    out.alphabet = sys.alphabet;
    return out;
}

std::vector<double> embed_state(const RnnSystem &sys, std::span<const double> x) {
    validate(sys);
    if (x.size() != sys.n()) throw DimensionError("state has the wrong length");
    return embed_with(index_map(sys), XiRule(sys.activation), Preactivation(sys), x);
}

EmbeddingReport verify_embedding(const RnnSystem &sys, const PwcInput &u, double horizon, double step, double tol) {
    return verify_embedding(sys, build_r_sigma(sys), u, horizon, step, tol);
}

EmbeddingReport verify_embedding(const RnnSystem &sys, const RationalSystemSpec &r_sigma, const PwcInput &u,
                                 double horizon, double step, double tol) {
    check_tolerance(tol);
    validate(sys);
    if (r_sigma.dim != r_sigma_dim(sys) || r_sigma.outputs.size() != sys.p()) {
        throw DimensionError("rational system does not have the shape of R(Sigma) for this RNN");
    }
    const Trajectory rnn = simulate_rnn(sys, u, horizon, step);
    const Trajectory rat = simulate_rational(r_sigma, u, horizon, step);

    const IndexMap idx = index_map(sys);
    const XiRule xi(sys.activation);
    const Preactivation pre(sys);

    EmbeddingReport rep;
    rep.horizon = horizon;
    rep.step = step;
    rep.tol = tol;
    rep.input = u;
    double worst = -1;
    for (std::size_t s = 0; s < rnn.times.size(); ++s) {
        const auto F = embed_with(idx, xi, pre, rnn.states[s]);
        double dev = 0;
        for (std::size_t q = 0; q < F.size(); ++q) dev = std::max(dev, std::abs(rat.states[s][q] - F[q]));
        double out_dev = 0;
        for (std::size_t k = 0; k < sys.p(); ++k) {
            out_dev = std::max(out_dev, std::abs(rat.outputs[s][k] - rnn.outputs[s][k]));
        }
        rep.max_state_deviation = std::max(rep.max_state_deviation, dev);
        rep.max_output_deviation = std::max(rep.max_output_deviation, out_dev);
        if (std::max(dev, out_dev) > worst) {
            worst = std::max(dev, out_dev);
            rep.worst_time = rnn.times[s];
        }
    }
    rep.pass = rep.max_state_deviation <= tol && rep.max_output_deviation <= tol;
    return rep;
}

std::vector<double> derivative_output_closed_form(const RnnSystem &sys, std::span<const double> x,
                                                  std::size_t letter) {
    validate(sys);
    if (x.size() != sys.n()) throw DimensionError("state has the wrong length");
    if (letter >= sys.num_letters()) throw ArgumentError("letter outside the alphabet");
    const Preactivation pre(sys);
    const auto sigma = make_sigma(sys.activation);
    std::vector<double> s(sys.n());
    for (std::size_t i = 0; i < sys.n(); ++i) s[i] = sigma(pre(x, i, letter));
    std::vector<double> out(sys.p(), 0.0);
    for (std::size_t k = 0; k < sys.p(); ++k) {
        for (std::size_t i = 0; i < sys.n(); ++i) out[k] += sys.C(k, i).get_d() * s[i];
    }
    return out;
}

AuxReport verify_aux(const RnnSystem &sys, const PwcInput &u, double horizon, double step, double tol_closed,
                     double tol_fd, double fd_step) {
    check_tolerance(tol_closed);
    check_tolerance(tol_fd);
    if (!(fd_step > 0)) throw ArgumentError("finite-difference step must be positive");
    validate(sys);
    const RationalSystemSpec aux = build_r_aux(sys);
    const Trajectory rnn = simulate_rnn(sys, u, horizon, step);
    const Trajectory rat = simulate_rational(aux, u, horizon, step);

    const std::size_t n = sys.n(), p = sys.p(), K = sys.num_letters();
    const Preactivation pre(sys);
    const auto sigma = make_sigma(sys.activation);
    std::vector<double> c(p * n);
    for (std::size_t k = 0; k < p; ++k) {
        for (std::size_t i = 0; i < n; ++i) c[k * n + i] = sys.C(k, i).get_d();
    }
    const LetterField field = [&](std::size_t letter, double, std::span<const double> x, std::span<double> dx) {
        for (std::size_t i = 0; i < n; ++i) dx[i] = sigma(pre(x, i, letter));
    };
    auto output = [&](std::span<const double> x, std::size_t k) {
        double y = 0;
        for (std::size_t i = 0; i < n; ++i) y += c[k * n + i] * x[i];
        return y;
    };

    AuxReport rep;
    rep.horizon = horizon;
    rep.step = step;
    rep.fd_step = fd_step;
    rep.tol_closed = tol_closed;
    rep.tol_fd = tol_fd;
    rep.input = u;
    std::vector<double> moved(n);
    for (std::size_t s = 0; s < rnn.times.size(); ++s) {
        const auto &x = rnn.states[s];
        for (std::size_t r = 0; r < K; ++r) {
            moved.assign(x.begin(), x.end());
            rk4_step(field, r, rnn.times[s], moved, fd_step);
            for (std::size_t k = 0; k < p; ++k) {
                double closed = 0;
                for (std::size_t i = 0; i < n; ++i) closed += c[k * n + i] * sigma(pre(x, i, r));
                const double realized = rat.outputs[s][r * p + k];
                const double fd = (output(moved, k) - output(x, k)) / fd_step;
                const double dc = std::abs(realized - closed), df = std::abs(realized - fd);
                if (dc > rep.max_closed_form_deviation) {
                    rep.max_closed_form_deviation = dc;
                    rep.worst_closed_form_time = rnn.times[s];
                }
                if (df > rep.max_fd_deviation) {
                    rep.max_fd_deviation = df;
                    rep.worst_fd_time = rnn.times[s];
                }
            }
        }
    }
    rep.closed_form_pass = rep.max_closed_form_deviation <= tol_closed;
    rep.fd_pass = rep.max_fd_deviation <= tol_fd;
    rep.pass = rep.closed_form_pass && rep.fd_pass;
    return rep;
}

} // namespace rnnrat
