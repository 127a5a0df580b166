#include "rnnrat/analysis.hpp"

#include <algorithm>
#include <random>

namespace rnnrat {

namespace {

constexpr int kPointRange = 10;
constexpr std::size_t kMaxPointAttempts = 100000;

void check_field(const VectorField &field, std::size_t n) {
    if (field.size() != n) {
        throw DimensionError("vector field has " + std::to_string(field.size()) + " components, expected " +
                             std::to_string(n));
    }
    for (const auto &f : field) {
        if (f.num_vars() != n) throw DimensionError("vector-field component in the wrong ring");
    }
}

struct BudgetExceeded {
    std::size_t used;
};

class TermBudget {
public:
    explicit TermBudget(std::size_t limit) : limit_(limit) {}

    void charge(const RationalFunc &f) {
        used_ += f.numerator().num_terms() + f.denominator().num_terms();
        if (used_ > limit_) throw BudgetExceeded{used_};
    }

    std::string reason() const { return "term budget of " + std::to_string(limit_) + " exhausted"; }

private:
    std::size_t limit_;
    std::size_t used_ = 0;
};

std::size_t resolve_cap(std::size_t cap, std::size_t dim) { return cap == 0 ? dim : cap; }

// Gradient row of N/D at a point, scaled by D(p)^2 (or D(p) when D is constant).
struct GradientRows {
    std::vector<MultiPoly> dn, dd;
    const RationalFunc *g = nullptr;
    bool constant_den = true;

    explicit GradientRows(const RationalFunc &fn) : g(&fn), constant_den(fn.denominator().is_constant()) {
        const std::size_t n = fn.num_vars();
        for (std::size_t i = 0; i < n; ++i) {
            dn.push_back(fn.numerator().partial(i));
            if (!constant_den) dd.push_back(fn.denominator().partial(i));
        }
    }

    std::vector<Scalar> at(std::span<const Scalar> p) const {
        std::vector<Scalar> row(dn.size());
        if (constant_den) {
            for (std::size_t i = 0; i < dn.size(); ++i) row[i] = dn[i].evaluate(p);
            return row;
        }
        const Scalar N = g->numerator().evaluate(p), D = g->denominator().evaluate(p);
        for (std::size_t i = 0; i < dn.size(); ++i) row[i] = dn[i].evaluate(p) * D - N * dd[i].evaluate(p);
        return row;
    }
};

Matrix stack(const std::vector<std::vector<Scalar>> &rows, std::size_t cols) {
    Matrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
}

// Rows accumulated per evaluation point; a candidate is accepted when it
// raises the largest rank over the points.
class RankTracker {
public:
    RankTracker(std::size_t points, std::size_t cols) : rows_(points), ranks_(points, 0), cols_(cols) {}

    bool offer(const std::vector<std::vector<Scalar>> &candidate) {
        std::vector<std::size_t> trial(rows_.size());
        std::size_t best = 0;
        for (std::size_t p = 0; p < rows_.size(); ++p) {
            auto rows = rows_[p];
            rows.push_back(candidate[p]);
            trial[p] = exact_rank(stack(rows, cols_));
            best = std::max(best, trial[p]);
        }
        if (best <= rank()) return false;
        for (std::size_t p = 0; p < rows_.size(); ++p) rows_[p].push_back(candidate[p]);
        ranks_ = std::move(trial);
        return true;
    }

    std::size_t rank() const { return ranks_.empty() ? 0 : *std::max_element(ranks_.begin(), ranks_.end()); }

    std::size_t witness() const {
        return static_cast<std::size_t>(std::max_element(ranks_.begin(), ranks_.end()) - ranks_.begin());
    }

private:
    std::vector<std::vector<std::vector<Scalar>>> rows_;
    std::vector<std::size_t> ranks_;
    std::size_t cols_;
};

std::string letters_text(const std::vector<std::size_t> &word) {
    std::string s;
    for (std::size_t a : word) s += (s.empty() ? "" : ",") + std::to_string(a + 1);
    return s;
}

std::string rational_text(const RationalFunc &f) {
    if (f.is_polynomial()) return f.numerator().to_string();
    return "(" + f.numerator().to_string() + ") / (" + f.denominator().to_string() + ")";
}

nlohmann::json points_json(std::span<const Scalar> p) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto &v : p) out.push_back(to_string(v));
    return out;
}

std::vector<Scalar> evaluate_field(const VectorField &f, std::span<const Scalar> p) {
    std::vector<Scalar> out;
    out.reserve(f.size());
    for (const auto &c : f) out.push_back(c.evaluate(p));
    return out;
}

Certificate make(std::string name, Status status, std::string claim) {
    Certificate c;
    c.name = std::move(name);
    c.status = status;
    c.claim = std::move(claim);
    return c;
}

Certificate observability_certificate(const LieTower &tower, const std::string &system) {
    Certificate c = make(system + "_semi_algebraic_observability", tower.status,
                         system + " is semi-algebraically observable: the Jacobian of its observation tower has rank " +
                             std::to_string(tower.dim));
    c.reason = tower.reason;
    c.evidence = to_json(tower);
    return c;
}

Certificate accessibility_certificate(const AccessibilityResult &acc, const std::string &system) {
    Certificate c = make(system + "_accessibility", acc.status,
                         system + " is accessible: its Lie algebra of vector fields has full rank at the initial state");
    c.reason = acc.reason;
    c.evidence = to_json(acc);
    return c;
}

std::string unmet(const std::vector<const Certificate *> &premises) {
    std::string s;
    for (const auto *p : premises) {
        if (p->status != Status::holds) s += (s.empty() ? "" : ", ") + p->name + " is " + std::string(to_string(p->status));
    }
    return s;
}

Certificate derived(std::string name, std::string claim, std::string rule,
                    const std::vector<const Certificate *> &premises) {
    Certificate c = make(std::move(name), Status::holds, std::move(claim));
    c.rule = std::move(rule);
    for (const auto *p : premises) {
        c.premises.push_back(p->name);
        c.evidence[p->name] = std::string(to_string(p->status));
    }
    const std::string missing = unmet(premises);
    if (!missing.empty()) {
        c.status = Status::inconclusive;
        c.reason = "sufficient condition not met: " + missing;
    }
    return c;
}

} // namespace

std::string_view to_string(Status s) {
    switch (s) {
    case Status::holds: return "holds";
    case Status::fails: return "fails";
    case Status::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

RationalFunc lie_derivative(const RationalFunc &g, const VectorField &field) {
    const std::size_t n = g.num_vars();
    check_field(field, n);
    const MultiPoly &N = g.numerator(), &D = g.denominator();
    const bool constant_den = D.is_constant();

    std::vector<MultiPoly> qs; // distinct field denominators that occur
    std::vector<std::pair<MultiPoly, std::size_t>> terms;
    for (std::size_t i = 0; i < n; ++i) {
        if (field[i].is_zero()) continue;
        MultiPoly d = constant_den ? N.partial(i) : N.partial(i) * D - N * D.partial(i);
        if (d.is_zero()) continue;
        const MultiPoly &q = field[i].denominator();
        auto it = std::find(qs.begin(), qs.end(), q);
        const auto qi = static_cast<std::size_t>(it - qs.begin());
        if (it == qs.end()) qs.push_back(q);
        terms.emplace_back(d * field[i].numerator(), qi);
    }
    if (terms.empty()) return RationalFunc(n);

    MultiPoly num(n);
    for (const auto &[t, qi] : terms) {
        MultiPoly s = t;
        for (std::size_t r = 0; r < qs.size(); ++r) {
            if (r != qi && !qs[r].is_one()) s *= qs[r];
        }
        num += s;
    }
    if (num.is_zero()) return RationalFunc(n);
    MultiPoly den = constant_den ? D : D * D;
    for (const auto &q : qs) {
        if (!q.is_one()) den *= q;
    }
    return RationalFunc(std::move(num), std::move(den));
}

VectorField lie_bracket(const VectorField &f, const VectorField &g) {
    const std::size_t n = f.size();
    check_field(g, n);
    VectorField out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        RationalFunc c = lie_derivative(f[i], g) - lie_derivative(g[i], f);
        out.push_back(c.is_zero() ? RationalFunc(n) : std::move(c));
    }
    return out;
}

std::vector<std::vector<Scalar>> sample_points(const RationalSystemSpec &sys, std::size_t count,
                                               std::uint64_t seed) {
    std::vector<const MultiPoly *> dens;
    for (const auto &row : sys.fields) {
        for (const auto &f : row) {
            if (!f.denominator().is_constant()) dens.push_back(&f.denominator());
        }
    }
    for (const auto &h : sys.outputs) {
        if (!h.denominator().is_constant()) dens.push_back(&h.denominator());
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> coord(-kPointRange, kPointRange);
    std::vector<std::vector<Scalar>> points;
    std::size_t attempts = 0;
    while (points.size() < count) {
        if (++attempts > kMaxPointAttempts) {
            throw ArgumentError("could not find sample points avoiding the denominators");
        }
        std::vector<Scalar> p(sys.dim);
        for (auto &v : p) v = coord(rng);
        const bool ok = std::none_of(dens.begin(), dens.end(), [&](const MultiPoly *d) { return d->evaluate(p) == 0; });
        if (ok) points.push_back(std::move(p));
    }
    return points;
}

LieTower observability_rank(const RationalSystemSpec &sys, std::size_t depth_cap, std::size_t num_points,
                            std::uint64_t seed, std::size_t term_budget) {
    validate(sys);
    if (depth_cap < 1) throw ArgumentError("depth cap must be at least 1");
    if (num_points < 1) throw ArgumentError("number of sample points must be at least 1");

    LieTower tower;
    tower.dim = sys.dim;
    tower.points = sample_points(sys, num_points, seed);
    RankTracker tracker(num_points, sys.dim);
    TermBudget budget(term_budget);

    auto offer = [&](const RationalFunc &g, std::size_t source, std::vector<std::size_t> word) {
        if (g.is_zero()) return false;
        budget.charge(g);
        const GradientRows grad(g);
        std::vector<std::vector<Scalar>> rows;
        for (const auto &p : tower.points) rows.push_back(grad.at(p));
        if (!tracker.offer(rows)) return false;
        tower.generators.push_back(g);
        tower.sources.push_back(source);
        tower.depths.push_back(word.size());
        tower.words.push_back(std::move(word));
        return true;
    };

    auto finish_early = [&](std::string why) {
        tower.rank = tracker.rank();
        tower.witness = tracker.witness();
        tower.status = tower.rank == sys.dim ? Status::holds : Status::inconclusive;
        if (tower.status != Status::holds) tower.reason = std::move(why);
        return tower;
    };

    std::vector<std::size_t> frontier;
    bool capped = false;
    try {
        for (std::size_t k = 0; k < sys.outputs.size() && tracker.rank() < sys.dim; ++k) {
            if (offer(sys.outputs[k], k, {})) frontier.push_back(tower.generators.size() - 1);
        }
        for (std::size_t depth = 1; depth <= depth_cap && tracker.rank() < sys.dim && !frontier.empty(); ++depth) {
            tower.depth_reached = depth;
            std::vector<std::size_t> next;
            for (std::size_t gi : frontier) {
                for (std::size_t a = 0; a < sys.num_letters() && tracker.rank() < sys.dim; ++a) {
                    const RationalFunc d = lie_derivative(tower.generators[gi], sys.fields[a]);
                    auto word = tower.words[gi];
                    word.push_back(a);
                    if (offer(d, tower.sources[gi], std::move(word))) next.push_back(tower.generators.size() - 1);
                }
            }
            frontier = std::move(next);
        }
        capped = !frontier.empty() && tracker.rank() < sys.dim;
    } catch (const BlowUpError &e) {
        return finish_early(std::string("degree cap exceeded: ") + e.what());
    } catch (const BudgetExceeded &) {
        return finish_early(budget.reason());
    }

    tower.rank = tracker.rank();
    tower.witness = tracker.witness();
    if (tower.rank == sys.dim) {
        tower.status = Status::holds;
    } else if (capped) {
        tower.status = Status::inconclusive;
        tower.reason = "depth cap " + std::to_string(depth_cap) + " reached before the tower closed";
    } else {
        tower.status = Status::fails;
    }
    return tower;
}

AccessibilityResult accessibility_larc(const RationalSystemSpec &sys, std::size_t bracket_depth_cap,
                                       std::size_t num_points, std::uint64_t seed, std::size_t term_budget) {
    validate(sys);
    if (bracket_depth_cap < 1) throw ArgumentError("bracket depth cap must be at least 1");
    if (num_points < 1) throw ArgumentError("number of sample points must be at least 1");
    for (std::size_t a = 0; a < sys.num_letters(); ++a) {
        for (std::size_t i = 0; i < sys.dim; ++i) {
            if (sys.fields[a][i].denominator().evaluate(sys.v0) == 0) {
                throw ArgumentError("field denominator Q_{" + std::to_string(i + 1) + "," + std::to_string(a + 1) +
                                    "} vanishes at the initial state");
            }
        }
    }

    AccessibilityResult acc;
    acc.dim = sys.dim;
    auto points = sample_points(sys, num_points, seed);
    points.push_back(sys.v0);
    const std::size_t width = sys.dim * points.size();

    std::vector<VectorField> kept;
    std::vector<std::vector<Scalar>> fingerprints, at_v0;
    TermBudget budget(term_budget);
    auto offer = [&](const VectorField &f, std::string label) {
        if (std::all_of(f.begin(), f.end(), [](const RationalFunc &c) { return c.is_zero(); })) return false;
        for (const auto &c : f) budget.charge(c);
        std::vector<Scalar> fp;
        fp.reserve(width);
        for (const auto &p : points) {
            auto v = evaluate_field(f, p);
            fp.insert(fp.end(), v.begin(), v.end());
        }
        auto trial = fingerprints;
        trial.push_back(fp);
        if (exact_rank(stack(trial, width)) <= fingerprints.size()) return false;
        fingerprints = std::move(trial);
        at_v0.push_back(evaluate_field(f, sys.v0));
        kept.push_back(f);
        acc.kept.push_back(std::move(label));
        acc.rank_at_v0 = exact_rank(stack(at_v0, sys.dim));
        return true;
    };

    std::vector<std::size_t> frontier;
    bool capped = false;
    try {
        acc.levels = 1;
        for (std::size_t a = 0; a < sys.num_letters(); ++a) {
            if (offer(sys.fields[a], "f" + std::to_string(a + 1))) frontier.push_back(kept.size() - 1);
        }
        for (std::size_t level = 2; level <= bracket_depth_cap && acc.rank_at_v0 < sys.dim && !frontier.empty();
             ++level) {
            acc.levels = level;
            std::vector<std::size_t> next;
            for (std::size_t gi : frontier) {
                for (std::size_t a = 0; a < sys.num_letters() && acc.rank_at_v0 < sys.dim; ++a) {
                    const std::string label = "[f" + std::to_string(a + 1) + "," + acc.kept[gi] + "]";
                    if (offer(lie_bracket(sys.fields[a], kept[gi]), label)) next.push_back(kept.size() - 1);
                }
            }
            frontier = std::move(next);
        }
        capped = !frontier.empty() && acc.rank_at_v0 < sys.dim;
    } catch (const BlowUpError &e) {
        acc.status = acc.rank_at_v0 == sys.dim ? Status::holds : Status::inconclusive;
        if (acc.status != Status::holds) acc.reason = std::string("degree cap exceeded: ") + e.what();
        return acc;
    } catch (const BudgetExceeded &) {
        acc.status = acc.rank_at_v0 == sys.dim ? Status::holds : Status::inconclusive;
        if (acc.status != Status::holds) acc.reason = budget.reason();
        return acc;
    }

    if (acc.rank_at_v0 == sys.dim) {
        acc.status = Status::holds;
    } else {
        acc.status = Status::inconclusive;
        acc.reason = capped ? "bracket depth cap " + std::to_string(bracket_depth_cap) + " reached at rank " +
                                  std::to_string(acc.rank_at_v0)
                            : "Lie algebra closed with rank " + std::to_string(acc.rank_at_v0) +
                                  " at the initial state; the rank test is only sufficient";
    }
    return acc;
}

std::vector<std::size_t> coordinate_obs_subspace(const Matrix &A, const Matrix &C) {
    const std::size_t n = A.rows();
    if (A.cols() != n || C.cols() != n) throw DimensionError("A must be square and C must have n columns");
    std::vector<bool> in(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        in[i] = true;
        for (std::size_t k = 0; k < C.rows(); ++k) {
            if (C(k, i) != 0) in[i] = false;
        }
    }
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t k = 0; k < n; ++k) {
            if (!in[k]) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (!in[j] && A(j, k) != 0) {
                    in[k] = false;
                    changed = true;
                    break;
                }
            }
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (in[i]) out.push_back(i);
    }
    return out;
}

const Certificate *CertificateReport::find(std::string_view name) const {
    for (const auto &c : certificates) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

nlohmann::json CertificateReport::to_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto &c : certificates) {
        nlohmann::json j = {{"name", c.name}, {"status", std::string(rnnrat::to_string(c.status))}, {"claim", c.claim}};
        if (!c.reason.empty()) j["reason"] = c.reason;
        j["evidence"] = c.evidence;
        if (!c.premises.empty()) {
            j["premises"] = c.premises;
            j["rule"] = c.rule;
        }
        out.push_back(std::move(j));
    }
    return out;
}

nlohmann::json to_json(const LieTower &tower, bool with_generators) {
    nlohmann::json gens = nlohmann::json::array();
    for (std::size_t g = 0; g < tower.generators.size(); ++g) {
        nlohmann::json e = {{"output", tower.sources[g] + 1},
                            {"letters", letters_text(tower.words[g])},
                            {"depth", tower.depths[g]}};
        if (with_generators) e["function"] = rational_text(tower.generators[g]);
        gens.push_back(std::move(e));
    }
    nlohmann::json out = {{"dimension", tower.dim},
                          {"rank", tower.rank},
                          {"status", std::string(to_string(tower.status))},
                          {"depth_reached", tower.depth_reached},
                          {"num_points", tower.points.size()},
                          {"generators", std::move(gens)}};
    if (!tower.points.empty()) out["witness_point"] = points_json(tower.points[tower.witness]);
    if (!tower.reason.empty()) out["reason"] = tower.reason;
    return out;
}

nlohmann::json to_json(const AccessibilityResult &acc) {
    nlohmann::json out = {{"dimension", acc.dim},
                          {"rank_at_initial_state", acc.rank_at_v0},
                          {"status", std::string(to_string(acc.status))},
                          {"levels", acc.levels},
                          {"kept_fields", acc.kept}};
    if (!acc.reason.empty()) out["reason"] = acc.reason;
    return out;
}

CertificateReport minimality_certificate(const RnnSystem &sys, const AnalysisOptions &options) {
    const RationalSystemSpec aux = build_r_aux(sys);
    const LieTower tower =
        observability_rank(aux, resolve_cap(options.depth_cap, aux.dim), options.num_points, options.seed, options.term_budget);
    const AccessibilityResult acc = accessibility_larc(aux, resolve_cap(options.bracket_depth_cap, aux.dim),
                                                       options.num_points, options.seed, options.term_budget);
    CertificateReport rep;
    rep.certificates.push_back(observability_certificate(tower, "r_aux"));
    rep.certificates.push_back(accessibility_certificate(acc, "r_aux"));
    rep.certificates.push_back(derived(
        "sigma_minimality", "no RNN with the same activation and fewer states has the same input-output map",
        "a semi-algebraically observable, accessible (hence algebraically reachable) realization of the output "
        "derivatives is minimal, and then the RNN is sigma-minimal",
        {&rep.certificates[0], &rep.certificates[1]}));
    return rep;
}

CertificateReport hankel_minimality(const RnnSystem &sys, const AnalysisOptions &options) {
    const RationalSystemSpec rs = build_r_sigma(sys), aux = build_r_aux(sys);
    const LieTower rs_tower =
        observability_rank(rs, resolve_cap(options.depth_cap, rs.dim), options.num_points, options.seed, options.term_budget);
    const LieTower aux_tower =
        observability_rank(aux, resolve_cap(options.depth_cap, aux.dim), options.num_points, options.seed, options.term_budget);

    CertificateReport rep;
    auto rank_cert = [&](const LieTower &t, const std::string &name, const std::string &what) {
        Certificate c = make(name, t.rank == t.dim ? Status::holds : Status::inconclusive,
                             "the observation algebra of " + what + " has transcendence degree " +
                                 std::to_string(t.dim));
        c.evidence = to_json(t);
        c.evidence["target"] = t.dim;
        c.evidence["estimate"] = "Jacobian rank of the tower of the realization at sampled points";
        if (c.status != Status::holds) {
            c.reason = "rank " + std::to_string(t.rank) + " below the target " + std::to_string(t.dim);
        }
        return c;
    };
    rep.certificates.push_back(rank_cert(rs_tower, "output_map_rank", "the output map (via R(Sigma))"));
    rep.certificates.push_back(rank_cert(aux_tower, "derivative_map_rank", "the output derivatives (via R_aux)"));

    Certificate verdict = make("sigma_minimality_rank_condition", Status::inconclusive,
                               "no RNN with the same activation and fewer states has the same input-output map");
    verdict.premises = {rep.certificates[0].name, rep.certificates[1].name};
    verdict.rule = "either transcendence degree reaching its target n(1+KN) or nKN makes the RNN sigma-minimal";
    verdict.evidence = {{"output_map_rank", rs_tower.rank},
                        {"output_map_target", rs.dim},
                        {"derivative_map_rank", aux_tower.rank},
                        {"derivative_map_target", aux.dim}};
    if (rs_tower.rank == rs.dim || aux_tower.rank == aux.dim) {
        verdict.status = Status::holds;
    } else {
        verdict.reason = "neither rank reaches its target";
    }
    rep.certificates.push_back(std::move(verdict));
    return rep;
}

CertificateReport observability_report(const RnnSystem &sys, const AnalysisOptions &options) {
    const RationalSystemSpec aux = build_r_aux(sys);
    const LieTower tower =
        observability_rank(aux, resolve_cap(options.depth_cap, aux.dim), options.num_points, options.seed, options.term_budget);
    CertificateReport rep;
    auto &certs = rep.certificates;
    certs.reserve(7);
    certs.push_back(observability_certificate(tower, "r_aux"));
    const Certificate &obs = certs[0];

    Certificate poly = make("r_aux_polynomial", is_polynomial(aux) ? Status::holds : Status::fails,
                            "R_aux has polynomial vector fields and outputs");
    poly.evidence = {{"polynomial", is_polynomial(aux)}};
    certs.push_back(std::move(poly));

    Certificate inv = make("activation_invertible", sys.activation.invertible ? Status::holds : Status::inconclusive,
                           "the activation " + sys.activation.name + " is invertible");
    if (sys.activation.invertible) {
        inv.evidence = {{"declared_invertible", true}};
    } else {
        inv.reason = "activation not declared invertible";
    }
    certs.push_back(std::move(inv));

    const std::size_t rank_a = exact_rank(sys.A);
    Certificate full = make("a_full_rank", rank_a == sys.n() ? Status::holds : Status::fails,
                            "A has trivial kernel");
    full.evidence = {{"rank", rank_a}, {"n", sys.n()}};
    certs.push_back(std::move(full));

    certs.push_back(derived("weak_observability", "Sigma is weakly observable",
                            "a polynomial, semi-algebraically observable R_aux with invertible activation and "
                            "trivial Ker(A) makes the RNN weakly observable",
                            {&obs, &certs[1], &certs[2], &certs[3]}));

    const auto oc = coordinate_obs_subspace(sys.A, sys.C);
    nlohmann::json oc_json = nlohmann::json::array();
    for (std::size_t i : oc) oc_json.push_back(i + 1);
    Certificate trivial = make("coordinate_obs_subspace_trivial", oc.empty() ? Status::holds : Status::fails,
                               "no coordinate subspace is A-invariant and inside Ker(C)");
    trivial.evidence = {{"index_set", oc_json}};
    certs.push_back(std::move(trivial));

    const bool violation = tower.status == Status::holds && !oc.empty();
    Certificate consistent = make("rank_test_consistency", violation ? Status::fails : Status::holds,
                                  "a semi-algebraically observable R_aux comes with a trivial coordinate "
                                  "observability subspace");
    consistent.premises = {obs.name, "coordinate_obs_subspace_trivial"};
    consistent.rule = "semi-algebraic observability of R_aux requires the coordinate subspace to be trivial";
    consistent.evidence = {{"observability", std::string(to_string(tower.status))}, {"index_set", oc_json}};
    certs.push_back(std::move(consistent));
    return rep;
}

CertificateReport reachability_report(const RnnSystem &sys, const AnalysisOptions &options) {
    const RationalSystemSpec aux = build_r_aux(sys);
    const AccessibilityResult acc = accessibility_larc(aux, resolve_cap(options.bracket_depth_cap, aux.dim),
                                                       options.num_points, options.seed, options.term_budget);
    CertificateReport rep;
    auto &certs = rep.certificates;
    certs.reserve(2);
    certs.push_back(accessibility_certificate(acc, "r_aux"));
    certs.push_back(derived("span_reachability", "the reachable set of the RNN spans the state space",
                            "accessibility of R_aux makes the RNN span-reachable", {&certs[0]}));
    return rep;
}

CertificateReport rnn_property_report(const RnnSystem &sys, const AnalysisOptions &options) {
    CertificateReport rep = observability_report(sys, options);
    CertificateReport reach = reachability_report(sys, options);
    for (auto &c : reach.certificates) rep.certificates.push_back(std::move(c));
    return rep;
}

CertificateReport existence_necessary_check(const RnnSystem &sys, const AnalysisOptions &options) {
    validate(sys);
    const RationalSystemSpec rs = build_r_sigma(sys);
    const LieTower tower =
        observability_rank(rs, resolve_cap(options.depth_cap, rs.dim), options.num_points, options.seed, options.term_budget);

    CertificateReport rep;
    Certificate bound = make("finite_transcendence_bound", Status::holds,
                             "the output map has a rational realization of dimension n(1+KN), so its observation "
                             "algebra has transcendence degree at most " +
                                 std::to_string(rs.dim));
    bound.evidence = {{"n", sys.n()},
                      {"K", sys.num_letters()},
                      {"N", sys.activation.order},
                      {"bound", rs.dim}};
    rep.certificates.push_back(std::move(bound));

    Certificate est = make("output_map_rank_estimate", tower.rank <= rs.dim ? Status::holds : Status::fails,
                           "the observation rank of R(Sigma) lies within the bound");
    est.evidence = to_json(tower);
    est.evidence["bound"] = rs.dim;
    est.evidence["direction"] =
        "sampled rank <= trdeg of the observation field of R(Sigma) >= trdeg of the output map's observation algebra, "
        "with equality on the right when R(Sigma) is algebraically reachable from v0; both are <= n(1+KN)";
    rep.certificates.push_back(std::move(est));
    return rep;
}

} // namespace rnnrat
