#include "rnnrat/systems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace rnnrat {

namespace {

constexpr double kDenominatorGuard = 1e-12;

double time_eps(double t) { return 1e-12 * std::max(1.0, std::abs(t)); }

std::string format_state(std::span<const double> x) {
    std::ostringstream out;
    out.precision(17);
    out << '(';
    for (std::size_t i = 0; i < x.size(); ++i) out << (i ? ", " : "") << x[i];
    out << ')';
    return out.str();
}

void check_finite(std::span<const double> x, double t) {
    for (double v : x) {
        if (!std::isfinite(v)) {
            std::ostringstream msg;
            msg << "state became non-finite at t = " << t;
            throw DivergenceError(msg.str(), t);
        }
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

void validate(const RnnSystem &sys) {
    const std::size_t n = sys.n();
    if (n == 0) throw DimensionError("RNN state dimension must be at least 1");
    if (sys.A.cols() != n) throw DimensionError("A must be square");
    if (sys.B.rows() != n) throw DimensionError("B must have n = " + std::to_string(n) + " rows");
    if (sys.C.cols() != n) throw DimensionError("C must have n = " + std::to_string(n) + " columns");
    if (sys.x0.size() != n) throw DimensionError("x0 must have n = " + std::to_string(n) + " entries");
    if (sys.alphabet.empty()) throw ArgumentError("input alphabet must be non-empty");
    for (std::size_t r = 0; r < sys.alphabet.size(); ++r) {
        if (sys.alphabet[r].size() != sys.m()) {
            throw DimensionError("alphabet letter " + std::to_string(r + 1) + " has " +
                                 std::to_string(sys.alphabet[r].size()) + " entries, expected m = " +
                                 std::to_string(sys.m()));
        }
        for (std::size_t s = 0; s < r; ++s) {
            if (sys.alphabet[s] == sys.alphabet[r]) {
                throw ArgumentError("alphabet letters " + std::to_string(s + 1) + " and " + std::to_string(r + 1) +
                                    " coincide");
            }
        }
    }
    validate(sys.activation);
}

void validate(const RationalSystemSpec &sys) {
    if (sys.dim == 0) throw DimensionError("rational system dimension must be at least 1");
    if (sys.fields.empty()) throw ArgumentError("rational system needs at least one input letter");
    if (sys.v0.size() != sys.dim) throw DimensionError("initial state has the wrong length");
    if (!sys.var_names.empty() && sys.var_names.size() != sys.dim) {
        throw DimensionError("variable-name table has the wrong length");
    }
    if (!sys.alphabet.empty() && sys.alphabet.size() != sys.fields.size()) {
        throw DimensionError("alphabet metadata does not match the number of field rows");
    }
    for (std::size_t a = 0; a < sys.fields.size(); ++a) {
        if (sys.fields[a].size() != sys.dim) {
            throw DimensionError("field row " + std::to_string(a + 1) + " has " +
                                 std::to_string(sys.fields[a].size()) + " components, expected " +
                                 std::to_string(sys.dim));
        }
        for (const auto &f : sys.fields[a]) {
            if (f.num_vars() != sys.dim) throw DimensionError("vector-field polynomial in the wrong ring");
        }
    }
    for (const auto &h : sys.outputs) {
        if (h.num_vars() != sys.dim) throw DimensionError("output polynomial in the wrong ring");
    }
}

bool is_polynomial(const RationalSystemSpec &sys) {
    for (const auto &row : sys.fields) {
        for (const auto &f : row) {
            if (!f.denominator().is_one()) return false;
        }
    }
    return std::all_of(sys.outputs.begin(), sys.outputs.end(),
                       [](const RationalFunc &h) { return h.denominator().is_one(); });
}

// ---------------------------------------------------------------------------
// Inputs
// ---------------------------------------------------------------------------

std::vector<double> PwcInput::switch_times() const {
    std::vector<double> out;
    double t = 0;
    for (std::size_t i = 0; i + 1 < durations.size(); ++i) {
        t += durations[i];
        out.push_back(t);
    }
    return out;
}

std::size_t PwcInput::letter_at(double t) const {
    double boundary = 0;
    for (std::size_t i = 0; i + 1 < letters.size(); ++i) {
        boundary += durations[i];
        if (t < boundary - time_eps(boundary)) return letters[i];
    }
    return letters.back();
}

void validate(const PwcInput &u, std::size_t num_letters) {
    if (u.letters.empty()) throw ArgumentError("input signal needs at least one piece");
    if (u.letters.size() != u.durations.size()) {
        throw DimensionError("input signal has " + std::to_string(u.durations.size()) + " durations and " +
                             std::to_string(u.letters.size()) + " letters");
    }
    for (double d : u.durations) {
        if (!(d > 0) || !std::isfinite(d)) throw ArgumentError("input durations must be positive and finite");
    }
    for (std::size_t l : u.letters) {
        if (l >= num_letters) {
            throw ArgumentError("input letter " + std::to_string(l + 1) + " outside the alphabet of size " +
                                std::to_string(num_letters));
        }
    }
}

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

void rk4_step(const LetterField &field, std::size_t letter, double t, std::vector<double> &x, double h) {
    const std::size_t n = x.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), w(n);
    field(letter, t, x, k1);
    for (std::size_t i = 0; i < n; ++i) w[i] = x[i] + 0.5 * h * k1[i];
    field(letter, t + 0.5 * h, w, k2);
    for (std::size_t i = 0; i < n; ++i) w[i] = x[i] + 0.5 * h * k2[i];
    field(letter, t + 0.5 * h, w, k3);
    for (std::size_t i = 0; i < n; ++i) w[i] = x[i] + h * k3[i];
    field(letter, t + h, w, k4);
    for (std::size_t i = 0; i < n; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

Trajectory integrate_pwc(const LetterField &field, std::vector<double> x, const PwcInput &u, double horizon,
                         double step) {
    if (!(step > 0) || !std::isfinite(step)) throw ArgumentError("step must be positive");
    if (!(horizon > 0) || !std::isfinite(horizon)) throw ArgumentError("horizon must be positive");
    const auto num_steps = static_cast<std::size_t>(std::ceil(horizon / step - 1e-9));
    const auto switches = u.switch_times();

    Trajectory traj;
    traj.times.reserve(num_steps + 1);
    traj.states.reserve(num_steps + 1);
    check_finite(x, 0.0);
    traj.times.push_back(0.0);
    traj.states.push_back(x);
    traj.letters.push_back(u.letter_at(0.0));

    std::vector<double> cuts;
    for (std::size_t k = 0; k < num_steps; ++k) {
        const double t0 = static_cast<double>(k) * step;
        const double t1 = k + 1 == num_steps ? horizon : static_cast<double>(k + 1) * step;
        cuts.assign(1, t0);
        for (double s : switches) {
            if (s > t0 + time_eps(s) && s < t1 - time_eps(s)) cuts.push_back(s);
        }
        cuts.push_back(t1);
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            const double a = cuts[c], b = cuts[c + 1];
            rk4_step(field, u.letter_at(0.5 * (a + b)), a, x, b - a);
            check_finite(x, b);
        }
        traj.times.push_back(t1);
        traj.states.push_back(x);
        traj.letters.push_back(u.letter_at(t1));
    }
    return traj;
}

std::function<double(double)> make_sigma(const ActivationSpec &spec) {
    switch (spec.closed_form) {
    case ClosedForm::tanh: return [](double z) { return std::tanh(z); };
    case ClosedForm::sigmoid: return [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
    case ClosedForm::identity: return [](double z) { return z; };
    case ClosedForm::none: break;
    }
    return [rule = XiRule(spec)](double z) { return rule.integrate(z)[0]; };
}

Trajectory simulate_rnn(const RnnSystem &sys, const PwcInput &u, double horizon, double step) {
    validate(sys);
    validate(u, sys.num_letters());
    const std::size_t n = sys.n();
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] = sys.A(i, j).get_d();
    }
    // B alpha per letter.
    std::vector<std::vector<double>> drive(sys.num_letters(), std::vector<double>(n, 0.0));
    for (std::size_t r = 0; r < sys.num_letters(); ++r) {
        for (std::size_t i = 0; i < n; ++i) {
            Scalar s = 0;
            for (std::size_t j = 0; j < sys.m(); ++j) s += sys.B(i, j) * sys.alphabet[r][j];
            drive[r][i] = s.get_d();
        }
    }
    const auto sigma = make_sigma(sys.activation);
    const LetterField field = [&](std::size_t letter, double, std::span<const double> x, std::span<double> dx) {
        for (std::size_t i = 0; i < n; ++i) {
            double z = drive[letter][i];
            for (std::size_t j = 0; j < n; ++j) z += a[i * n + j] * x[j];
            dx[i] = sigma(z);
        }
    };
    std::vector<double> x0(n);
    for (std::size_t i = 0; i < n; ++i) x0[i] = sys.x0[i].get_d();
    Trajectory traj = integrate_pwc(field, std::move(x0), u, horizon, step);

    std::vector<double> c(sys.p() * n);
    for (std::size_t k = 0; k < sys.p(); ++k) {
        for (std::size_t i = 0; i < n; ++i) c[k * n + i] = sys.C(k, i).get_d();
    }
    traj.outputs.reserve(traj.states.size());
    for (const auto &x : traj.states) {
        std::vector<double> y(sys.p(), 0.0);
        for (std::size_t k = 0; k < sys.p(); ++k) {
            for (std::size_t i = 0; i < n; ++i) y[k] += c[k * n + i] * x[i];
        }
        traj.outputs.push_back(std::move(y));
    }
    return traj;
}

Trajectory simulate_rational(const RationalSystemSpec &sys, const PwcInput &u, double horizon, double step) {
    validate(sys);
    validate(u, sys.num_letters());
    const std::size_t dim = sys.dim;
    for (std::size_t a = 0; a < sys.num_letters(); ++a) {
        for (std::size_t i = 0; i < dim; ++i) {
            if (sys.fields[a][i].denominator().evaluate(sys.v0) == 0) {
                throw ArgumentError("denominator Q_{" + std::to_string(i + 1) + "," + std::to_string(a + 1) +
                                    "} vanishes at the initial state");
            }
        }
    }
    for (std::size_t k = 0; k < sys.outputs.size(); ++k) {
        if (sys.outputs[k].denominator().evaluate(sys.v0) == 0) {
            throw ArgumentError("output denominator h_{" + std::to_string(k + 1) + ",2} vanishes at the initial state");
        }
    }

    struct Compiled {
        CompiledPoly num, den;
        bool unit_den;
    };
    std::vector<std::vector<Compiled>> fields(sys.num_letters());
    for (std::size_t a = 0; a < sys.num_letters(); ++a) {
        for (const auto &f : sys.fields[a]) {
            fields[a].push_back({CompiledPoly(f.numerator()), CompiledPoly(f.denominator()), f.denominator().is_one()});
        }
    }
    const LetterField field = [&](std::size_t letter, double t, std::span<const double> v, std::span<double> dv) {
        for (std::size_t i = 0; i < dim; ++i) {
            const auto &f = fields[letter][i];
            if (f.unit_den) {
                dv[i] = f.num(v);
                continue;
            }
            const double q = f.den(v);
            if (!(std::abs(q) >= kDenominatorGuard)) {
                std::ostringstream msg;
                msg << "denominator Q_{" << i + 1 << "," << letter + 1 << "} = " << q << " near zero at t = " << t
                    << ", state " << format_state(v);
                throw SingularityError(msg.str(), t);
            }
            dv[i] = f.num(v) / q;
        }
    };
    std::vector<double> v0(dim);
    for (std::size_t i = 0; i < dim; ++i) v0[i] = sys.v0[i].get_d();
    Trajectory traj = integrate_pwc(field, std::move(v0), u, horizon, step);

    std::vector<Compiled> outputs;
    for (const auto &h : sys.outputs) {
        outputs.push_back({CompiledPoly(h.numerator()), CompiledPoly(h.denominator()), h.denominator().is_one()});
    }
    traj.outputs.reserve(traj.states.size());
    for (std::size_t s = 0; s < traj.states.size(); ++s) {
        const auto &v = traj.states[s];
        std::vector<double> y(outputs.size());
        for (std::size_t k = 0; k < outputs.size(); ++k) {
            const double den = outputs[k].unit_den ? 1.0 : outputs[k].den(v);
            if (!(std::abs(den) >= kDenominatorGuard)) {
                std::ostringstream msg;
                msg << "output denominator h_{" << k + 1 << ",2} near zero at t = " << traj.times[s] << ", state "
                    << format_state(v);
                throw SingularityError(msg.str(), traj.times[s]);
            }
            y[k] = outputs[k].num(v) / den;
        }
        traj.outputs.push_back(std::move(y));
    }
    return traj;
}

void write_csv(std::ostream &out, const Trajectory &traj) {
    const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
    const std::size_t p = traj.outputs.empty() ? 0 : traj.outputs.front().size();
    out << 't';
    for (std::size_t i = 1; i <= n; ++i) out << ",x" << i;
    for (std::size_t k = 1; k <= p; ++k) out << ",y" << k;
    out << ",input_letter_index\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf;
    };
    for (std::size_t s = 0; s < traj.times.size(); ++s) {
        put(traj.times[s]);
        for (double v : traj.states[s]) {
            out << ',';
            put(v);
        }
        if (s < traj.outputs.size()) {
            for (double v : traj.outputs[s]) {
                out << ',';
                put(v);
            }
        }
        out << ',' << traj.letters[s] + 1 << '\n';
    }
}

} // namespace rnnrat
