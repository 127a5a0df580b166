#pragma once

// Exact multivariate polynomials and rational functions over Q.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "rnnrat/errors.hpp"

namespace rnnrat {

/// Arbitrary-precision rational, always kept in canonical form (gcd 1, positive denominator).
using Scalar = mpq_class;

using Exponent = std::vector<std::uint32_t>;

/// Term order used for iteration and serialization: graded lexicographic,
/// largest monomial first (X1 > X2 > ... > Xn).
struct GradedLexOrder {
    bool operator()(const Exponent &a, const Exponent &b) const;
};

/// Maximum total degree any polynomial operation may produce. Default 64.
std::uint32_t degree_cap();
void set_degree_cap(std::uint32_t cap);

/// Sets the degree cap for the lifetime of the guard and restores the previous one.
class DegreeCapScope {
public:
    explicit DegreeCapScope(std::uint32_t cap) : saved_(degree_cap()) { set_degree_cap(cap); }
    ~DegreeCapScope() { set_degree_cap(saved_); }
    DegreeCapScope(const DegreeCapScope &) = delete;
    DegreeCapScope &operator=(const DegreeCapScope &) = delete;

private:
    std::uint32_t saved_;
};

/// Parses an exact rational literal: integer, "p/q", or a finite decimal
/// ("-0.125", "1e-3"). Anything else raises ArgumentError.
Scalar parse_scalar(const std::string &text);
std::string to_string(const Scalar &s);
/// Nearest rational with denominator 10^digits.
Scalar round_to_decimal(double value, int digits);

class MultiPoly {
public:
    using TermMap = std::map<Exponent, Scalar, GradedLexOrder>;

    /// Zero polynomial in `num_vars` variables.
    explicit MultiPoly(std::size_t num_vars = 0) : num_vars_(num_vars) {}

    static MultiPoly constant(std::size_t num_vars, const Scalar &c);
    /// The coordinate polynomial X_{index+1} (index is 0-based).
    static MultiPoly variable(std::size_t num_vars, std::size_t index);
    static MultiPoly monomial(const Scalar &c, Exponent exponent);

    std::size_t num_vars() const { return num_vars_; }
    const TermMap &terms() const { return terms_; }
    std::size_t num_terms() const { return terms_.size(); }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    bool is_one() const;
    /// Total degree; the zero polynomial has degree 0.
    std::uint32_t total_degree() const;
    /// Coefficient of the given monomial (zero when absent).
    Scalar coefficient(const Exponent &exponent) const;

    /// Adds c * X^exponent, pruning the entry if it cancels.
    void add_term(const Exponent &exponent, const Scalar &c);

    MultiPoly &operator+=(const MultiPoly &other);
    MultiPoly &operator-=(const MultiPoly &other);
    MultiPoly &operator*=(const MultiPoly &other);
    MultiPoly &operator*=(const Scalar &c);

    friend MultiPoly operator+(MultiPoly a, const MultiPoly &b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly &b) { return a -= b; }
    friend MultiPoly operator*(const MultiPoly &a, const MultiPoly &b);
    friend MultiPoly operator*(MultiPoly a, const Scalar &c) { return a *= c; }
    friend MultiPoly operator*(const Scalar &c, MultiPoly a) { return a *= c; }
    MultiPoly operator-() const;

    friend bool operator==(const MultiPoly &a, const MultiPoly &b) {
        return a.num_vars_ == b.num_vars_ && a.terms_ == b.terms_;
    }

    MultiPoly pow(std::uint32_t e) const;

    /// Formal partial derivative with respect to X_{var+1} (0-based index).
    MultiPoly partial(std::size_t var) const;

    Scalar evaluate(std::span<const Scalar> point) const;
    double evaluate(std::span<const double> point) const;

    /// Re-indexes the variables into a ring with `target_vars` variables:
    /// X_{i+1} becomes X_{var_map[i]+1}.
    MultiPoly rename(std::size_t target_vars, std::span<const std::size_t> var_map) const;

    /// Canonical text "c * X1^e1 * X2 + ..." in graded-lex order.
    /// Custom names replace X1..Xn when given.
    std::string to_string(std::span<const std::string> names = {}) const;

private:
    void check_same_ring(const MultiPoly &other, const char *op) const;

    std::size_t num_vars_;
    TermMap terms_;
};

/// Parses a polynomial expression in X1..Xn (or the given variable names).
/// Accepts sums, products, integer powers, parentheses and exact literals.
MultiPoly parse_poly(const std::string &text, std::size_t num_vars,
                     std::span<const std::string> names = {});

/// Raised when a denominator vanishes at an evaluation point.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string &what, MultiPoly denominator)
        : Error(what), denominator_(std::move(denominator)) {}

    const MultiPoly &denominator() const { return denominator_; }

private:
    MultiPoly denominator_;
};

/// Numerator/denominator pair. No gcd cancellation is ever performed.
class RationalFunc {
public:
    explicit RationalFunc(std::size_t num_vars = 0);
    RationalFunc(MultiPoly numerator); // NOLINT: polynomials are fractions over 1
    RationalFunc(MultiPoly numerator, MultiPoly denominator);

    std::size_t num_vars() const { return num_.num_vars(); }
    const MultiPoly &numerator() const { return num_; }
    const MultiPoly &denominator() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.is_one(); }

    /// Sum over a common denominator. Identical denominators are shared,
    /// otherwise the cross-multiplied form is used.
    friend RationalFunc operator+(const RationalFunc &a, const RationalFunc &b);
    friend RationalFunc operator-(const RationalFunc &a, const RationalFunc &b);
    friend RationalFunc operator*(const RationalFunc &a, const RationalFunc &b);
    RationalFunc operator-() const { return {-num_, den_}; }

    /// Quotient rule, exact.
    RationalFunc partial(std::size_t var) const;

    Scalar evaluate(std::span<const Scalar> point) const;
    double evaluate(std::span<const double> point) const;

    RationalFunc rename(std::size_t target_vars, std::span<const std::size_t> var_map) const;

    /// Structural equality of numerator and denominator.
    friend bool operator==(const RationalFunc &a, const RationalFunc &b) = default;

private:
    MultiPoly num_;
    MultiPoly den_;
};

/// True iff a/b and c/d are the same element of the fraction field (a*d == c*b).
bool equivalent(const RationalFunc &a, const RationalFunc &b);

/// Brings every summand to the product denominator:
/// (sum_k P_k prod_{r!=k} Q_r) / prod_k Q_k.
RationalFunc rat_combine(std::span<const RationalFunc> terms);

/// Dense row-major matrix of exact rationals.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    Matrix(std::initializer_list<std::initializer_list<Scalar>> rows);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Scalar &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Scalar &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    friend bool operator==(const Matrix &, const Matrix &) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Scalar> data_;
};

/// Rank over Q by fraction-free (Bareiss) elimination. Exact.
std::size_t exact_rank(const Matrix &m);

/// Fast double evaluator for a fixed polynomial, used by the integrators.
class CompiledPoly {
public:
    CompiledPoly() = default;
    explicit CompiledPoly(const MultiPoly &p);

    double operator()(std::span<const double> x) const;

private:
    struct Factor {
        std::uint32_t var;
        std::uint32_t exp;
    };
    struct Term {
        double coef;
        std::vector<Factor> factors;
    };
    std::vector<Term> terms_;
};

} // namespace rnnrat
