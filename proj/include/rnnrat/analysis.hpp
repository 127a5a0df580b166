#pragma once

// Lie-derivative towers, generic Jacobian ranks, accessibility, the
// coordinate observability subspace, and certificates for RNN properties
// derived from the auxiliary rational system.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rnnrat/embedding.hpp"

namespace rnnrat {

using VectorField = std::vector<RationalFunc>;

/// L_f g = sum_i dg/dX_i * P_i/Q_i over one common denominator
/// (den(g)^2 times the distinct Q_i; den(g) alone when it is constant).
RationalFunc lie_derivative(const RationalFunc &g, const VectorField &field);

/// [f, g]_i = sum_j (df_i/dX_j g_j - dg_i/dX_j f_j).
VectorField lie_bracket(const VectorField &f, const VectorField &g);

enum class Status { holds, fails, inconclusive };
std::string_view to_string(Status s);

/// Total number of polynomial terms a tower or bracket search may generate
/// before it gives up with an inconclusive result.
inline constexpr std::size_t kDefaultTermBudget = 100000;

struct AnalysisOptions {
    std::size_t depth_cap = 0;         // 0: system dimension
    std::size_t bracket_depth_cap = 0; // 0: system dimension
    std::size_t num_points = 8;
    std::uint64_t seed = 0;
    std::size_t term_budget = kDefaultTermBudget;
};

/// Integer points in [-10, 10]^dim avoiding every field and output
/// denominator. A longer list for the same seed extends a shorter one.
std::vector<std::vector<Scalar>> sample_points(const RationalSystemSpec &sys, std::size_t count, std::uint64_t seed);

struct LieTower {
    std::size_t dim = 0;
    /// Kept generators: outputs and iterated Lie derivatives of them.
    std::vector<RationalFunc> generators;
    /// Letters (0-based) applied to output `sources[g]`, innermost first.
    std::vector<std::vector<std::size_t>> words;
    std::vector<std::size_t> sources;
    std::vector<std::size_t> depths;
    std::size_t rank = 0;
    std::size_t depth_reached = 0;
    std::vector<std::vector<Scalar>> points;
    /// Index into `points` where `rank` is attained.
    std::size_t witness = 0;
    /// holds: rank = dim. fails: the tower closed below dim. inconclusive: a cap was hit.
    Status status = Status::inconclusive;
    std::string reason;
};

/// Builds the tower of Lie derivatives of the outputs along every field,
/// keeping a derivative only when it raises the maximal Jacobian rank over
/// the sample points. Stops when the rank reaches dim, when a depth adds
/// nothing, or at the depth cap. A degree blow-up ends the run with the
/// partial tower and an inconclusive status, as does exhausting the term budget.
LieTower observability_rank(const RationalSystemSpec &sys, std::size_t depth_cap, std::size_t num_points,
                            std::uint64_t seed, std::size_t term_budget = kDefaultTermBudget);

struct AccessibilityResult {
    std::size_t dim = 0;
    std::size_t rank_at_v0 = 0;
    std::size_t levels = 0;
    /// Bracket expressions of the kept fields, e.g. "[f1,[f2,f1]]".
    std::vector<std::string> kept;
    Status status = Status::inconclusive; // never fails
    std::string reason;
};

/// Rank at v0 of the Lie algebra generated by the fields, built from
/// right-normed brackets [f_a, g]. A bracket is kept when it raises the rank
/// of the evaluations at v0 and the sample points.
AccessibilityResult accessibility_larc(const RationalSystemSpec &sys, std::size_t bracket_depth_cap,
                                       std::size_t num_points, std::uint64_t seed,
                                       std::size_t term_budget = kDefaultTermBudget);

/// Largest I such that span{e_i : i in I} is A-invariant and inside Ker C. 0-based, sorted.
std::vector<std::size_t> coordinate_obs_subspace(const Matrix &A, const Matrix &C);

struct Certificate {
    std::string name;
    Status status = Status::inconclusive;
    std::string claim;
    /// Why the status is inconclusive (empty otherwise).
    std::string reason;
    nlohmann::json evidence = nlohmann::json::object();
    /// Names of the certificates this one is derived from, and the rule used.
    std::vector<std::string> premises;
    std::string rule;
};

struct CertificateReport {
    std::vector<Certificate> certificates;

    const Certificate *find(std::string_view name) const;
    nlohmann::json to_json() const;
};

nlohmann::json to_json(const LieTower &tower, bool with_generators = false);
nlohmann::json to_json(const AccessibilityResult &acc);

/// sigma-minimality from R_aux: holds when R_aux is semi-algebraically
/// observable and accessible, inconclusive otherwise.
CertificateReport minimality_certificate(const RnnSystem &sys, const AnalysisOptions &options = {});

/// Rank conditions on R(Sigma) (target n(1+KN)) and R_aux (target nKN).
CertificateReport hankel_minimality(const RnnSystem &sys, const AnalysisOptions &options = {});

/// Weak observability of the RNN from R_aux, the coordinate subspace check
/// and its consistency with the rank test.
CertificateReport observability_report(const RnnSystem &sys, const AnalysisOptions &options = {});

/// Span-reachability of the RNN from accessibility of R_aux.
CertificateReport reachability_report(const RnnSystem &sys, const AnalysisOptions &options = {});

/// Union of the observability and reachability reports.
CertificateReport rnn_property_report(const RnnSystem &sys, const AnalysisOptions &options = {});

/// The bound trdeg <= n(1+KN) from the construction and the rank of R(Sigma).
CertificateReport existence_necessary_check(const RnnSystem &sys, const AnalysisOptions &options = {});

} // namespace rnnrat
