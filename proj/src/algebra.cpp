#include "rnnrat/algebra.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <regex>
#include <sstream>

namespace rnnrat {

namespace {

std::atomic<std::uint32_t> g_degree_cap{64};

std::uint32_t degree_of(const Exponent &e) {
    return std::accumulate(e.begin(), e.end(), std::uint32_t{0});
}

} // namespace

bool GradedLexOrder::operator()(const Exponent &a, const Exponent &b) const {
    const auto da = degree_of(a);
    const auto db = degree_of(b);
    if (da != db) return da > db;
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

std::uint32_t degree_cap() { return g_degree_cap.load(); }

void set_degree_cap(std::uint32_t cap) { g_degree_cap.store(cap); }

// ---------------------------------------------------------------------------
// Scalars
// ---------------------------------------------------------------------------

Scalar parse_scalar(const std::string &raw) {
    static const std::regex fraction(R"(^\s*([+-]?)(\d+)\s*/\s*(\d+)\s*$)");
    static const std::regex decimal(R"(^\s*([+-]?)(\d*)(?:\.(\d*))?(?:[eE]([+-]?\d+))?\s*$)");
    std::smatch m;
    if (std::regex_match(raw, m, fraction)) {
        mpz_class num(m[2].str(), 10);
        mpz_class den(m[3].str(), 10);
        if (den == 0) throw ArgumentError("zero denominator in literal '" + raw + "'");
        if (m[1] == "-") num = -num;
        Scalar q(num, den);
        q.canonicalize();
        return q;
    }
    if (std::regex_match(raw, m, decimal) && (m[2].length() + m[3].length()) > 0) {
        const std::string digits = m[2].str() + m[3].str();
        mpz_class num(digits, 10);
        long exponent = -static_cast<long>(m[3].length());
        if (m[4].matched) exponent += std::stol(m[4].str());
        if (std::labs(exponent) > 4096) throw ArgumentError("exponent out of range in '" + raw + "'");
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
        if (m[1] == "-") num = -num;
        Scalar q = exponent >= 0 ? Scalar(num * scale) : Scalar(num, scale);
        q.canonicalize();
        return q;
    }
    throw ArgumentError("not an exact rational literal: '" + raw + "'");
}

std::string to_string(const Scalar &s) { return s.get_str(); }

Scalar round_to_decimal(double value, int digits) {
    if (!std::isfinite(value)) throw ArgumentError("cannot round a non-finite value");
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
    const double scaled = std::round(value * std::pow(10.0, digits));
    Scalar q(mpz_class(scaled), scale);
    q.canonicalize();
    return q;
}

// ---------------------------------------------------------------------------
// MultiPoly
// ---------------------------------------------------------------------------

MultiPoly MultiPoly::constant(std::size_t num_vars, const Scalar &c) {
    MultiPoly p(num_vars);
    p.add_term(Exponent(num_vars, 0), c);
    return p;
}

MultiPoly MultiPoly::variable(std::size_t num_vars, std::size_t index) {
    if (index >= num_vars) {
        throw ArgumentError("variable index " + std::to_string(index + 1) + " out of range 1.." +
                            std::to_string(num_vars));
    }
    Exponent e(num_vars, 0);
    e[index] = 1;
    MultiPoly p(num_vars);
    p.add_term(e, Scalar(1));
    return p;
}

MultiPoly MultiPoly::monomial(const Scalar &c, Exponent exponent) {
    MultiPoly p(exponent.size());
    p.add_term(exponent, c);
    return p;
}

bool MultiPoly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && degree_of(terms_.begin()->first) == 0);
}

bool MultiPoly::is_one() const {
    return terms_.size() == 1 && degree_of(terms_.begin()->first) == 0 && terms_.begin()->second == 1;
}

std::uint32_t MultiPoly::total_degree() const {
    // Graded order: the first term has maximal degree.
    return terms_.empty() ? 0 : degree_of(terms_.begin()->first);
}

Scalar MultiPoly::coefficient(const Exponent &exponent) const {
    auto it = terms_.find(exponent);
    return it == terms_.end() ? Scalar(0) : it->second;
}

void MultiPoly::add_term(const Exponent &exponent, const Scalar &c) {
    if (exponent.size() != num_vars_) {
        throw DimensionError("exponent of length " + std::to_string(exponent.size()) +
                             " in a ring with " + std::to_string(num_vars_) + " variables");
    }
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(exponent, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

void MultiPoly::check_same_ring(const MultiPoly &other, const char *op) const {
    if (num_vars_ != other.num_vars_) {
        throw DimensionError(std::string("poly ") + op + ": operands have " + std::to_string(num_vars_) +
                             " and " + std::to_string(other.num_vars_) + " variables");
    }
}

MultiPoly &MultiPoly::operator+=(const MultiPoly &other) {
    check_same_ring(other, "add");
    for (const auto &[e, c] : other.terms_) add_term(e, c);
    return *this;
}

MultiPoly &MultiPoly::operator-=(const MultiPoly &other) {
    check_same_ring(other, "sub");
    for (const auto &[e, c] : other.terms_) add_term(e, -c);
    return *this;
}

MultiPoly operator*(const MultiPoly &a, const MultiPoly &b) {
    a.check_same_ring(b, "mul");
    MultiPoly out(a.num_vars_);
    if (a.is_zero() || b.is_zero()) return out;
    const auto degree = a.total_degree() + b.total_degree();
    if (degree > degree_cap()) {
        throw BlowUpError("product of degree " + std::to_string(degree) + " exceeds degree cap " +
                          std::to_string(degree_cap()));
    }
    Exponent e(a.num_vars_);
    for (const auto &[ea, ca] : a.terms_) {
        for (const auto &[eb, cb] : b.terms_) {
            for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
            out.add_term(e, ca * cb);
        }
    }
    return out;
}

MultiPoly &MultiPoly::operator*=(const MultiPoly &other) {
    *this = *this * other;
    return *this;
}

MultiPoly &MultiPoly::operator*=(const Scalar &c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto &[e, coef] : terms_) coef *= c;
    return *this;
}

MultiPoly MultiPoly::operator-() const {
    MultiPoly out = *this;
    for (auto &[e, c] : out.terms_) c = -c;
    return out;
}

MultiPoly MultiPoly::pow(std::uint32_t e) const {
    MultiPoly result = constant(num_vars_, Scalar(1));
    MultiPoly base = *this;
    while (e > 0) {
        if (e & 1U) result *= base;
        e >>= 1U;
        if (e > 0) base *= base;
    }
    return result;
}

MultiPoly MultiPoly::partial(std::size_t var) const {
    if (var >= num_vars_) {
        throw ArgumentError("partial: variable index " + std::to_string(var + 1) + " out of range 1.." +
                            std::to_string(num_vars_));
    }
    MultiPoly out(num_vars_);
    for (const auto &[e, c] : terms_) {
        if (e[var] == 0) continue;
        Exponent d = e;
        d[var] -= 1;
        out.add_term(d, c * e[var]);
    }
    return out;
}

Scalar MultiPoly::evaluate(std::span<const Scalar> point) const {
    if (point.size() != num_vars_) {
        throw DimensionError("evaluation point has " + std::to_string(point.size()) + " coordinates, expected " +
                             std::to_string(num_vars_));
    }
    Scalar sum = 0;
    Scalar term;
    mpq_class power;
    for (const auto &[e, c] : terms_) {
        term = c;
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            mpz_pow_ui(power.get_num_mpz_t(), point[i].get_num_mpz_t(), e[i]);
            mpz_pow_ui(power.get_den_mpz_t(), point[i].get_den_mpz_t(), e[i]);
            term *= power;
        }
        sum += term;
    }
    return sum;
}

double MultiPoly::evaluate(std::span<const double> point) const {
    if (point.size() != num_vars_) {
        throw DimensionError("evaluation point has " + std::to_string(point.size()) + " coordinates, expected " +
                             std::to_string(num_vars_));
    }
    double sum = 0.0;
    for (const auto &[e, c] : terms_) {
        double term = c.get_d();
        for (std::size_t i = 0; i < e.size(); ++i) {
            for (std::uint32_t k = 0; k < e[i]; ++k) term *= point[i];
        }
        sum += term;
    }
    return sum;
}

MultiPoly MultiPoly::rename(std::size_t target_vars, std::span<const std::size_t> var_map) const {
    if (var_map.size() != num_vars_) {
        throw DimensionError("rename: map has " + std::to_string(var_map.size()) + " entries, expected " +
                             std::to_string(num_vars_));
    }
    MultiPoly out(target_vars);
    Exponent e(target_vars);
    for (const auto &[src, c] : terms_) {
        std::fill(e.begin(), e.end(), 0);
        for (std::size_t i = 0; i < src.size(); ++i) {
            if (var_map[i] >= target_vars) throw ArgumentError("rename: target index out of range");
            e[var_map[i]] += src[i];
        }
        out.add_term(e, c);
    }
    return out;
}

std::string MultiPoly::to_string(std::span<const std::string> names) const {
    if (!names.empty() && names.size() != num_vars_) {
        throw DimensionError("to_string: name table size does not match variable count");
    }
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto &[e, c] : terms_) {
        const bool negative = c < 0;
        if (first) {
            if (negative) out << '-';
        } else {
            out << (negative ? " - " : " + ");
        }
        first = false;
        out << Scalar(abs(c)).get_str();
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            out << " * ";
            if (names.empty()) out << 'X' << (i + 1);
            else out << names[i];
            if (e[i] > 1) out << '^' << e[i];
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// RationalFunc
// ---------------------------------------------------------------------------

RationalFunc::RationalFunc(std::size_t num_vars)
    : num_(num_vars), den_(MultiPoly::constant(num_vars, Scalar(1))) {}

RationalFunc::RationalFunc(MultiPoly numerator)
    : num_(std::move(numerator)), den_(MultiPoly::constant(num_.num_vars(), Scalar(1))) {}

RationalFunc::RationalFunc(MultiPoly numerator, MultiPoly denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
    if (num_.num_vars() != den_.num_vars()) {
        throw DimensionError("fraction with numerator in " + std::to_string(num_.num_vars()) +
                             " and denominator in " + std::to_string(den_.num_vars()) + " variables");
    }
    if (den_.is_zero()) throw ArgumentError("fraction with zero denominator");
}

RationalFunc operator+(const RationalFunc &a, const RationalFunc &b) {
    if (a.den_ == b.den_) return {a.num_ + b.num_, a.den_};
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
}

RationalFunc operator-(const RationalFunc &a, const RationalFunc &b) { return a + (-b); }

RationalFunc operator*(const RationalFunc &a, const RationalFunc &b) {
    return {a.num_ * b.num_, a.den_ * b.den_};
}

RationalFunc RationalFunc::partial(std::size_t var) const {
    if (den_.is_constant()) return {num_.partial(var), den_};
    return {num_.partial(var) * den_ - num_ * den_.partial(var), den_ * den_};
}

Scalar RationalFunc::evaluate(std::span<const Scalar> point) const {
    const Scalar d = den_.evaluate(point);
    if (d == 0) throw EvaluationError("denominator " + den_.to_string() + " vanishes at evaluation point", den_);
    return num_.evaluate(point) / d;
}

double RationalFunc::evaluate(std::span<const double> point) const {
    const double d = den_.evaluate(point);
    if (d == 0.0) throw EvaluationError("denominator " + den_.to_string() + " vanishes at evaluation point", den_);
    return num_.evaluate(point) / d;
}

RationalFunc RationalFunc::rename(std::size_t target_vars, std::span<const std::size_t> var_map) const {
    return {num_.rename(target_vars, var_map), den_.rename(target_vars, var_map)};
}

bool equivalent(const RationalFunc &a, const RationalFunc &b) {
    return a.numerator() * b.denominator() == b.numerator() * a.denominator();
}

RationalFunc rat_combine(std::span<const RationalFunc> terms) {
    if (terms.empty()) throw ArgumentError("rat_combine: empty list of summands");
    const std::size_t n = terms.front().num_vars();
    for (const auto &t : terms) {
        if (t.num_vars() != n) throw DimensionError("rat_combine: summands live in different rings");
    }
    MultiPoly numerator(n);
    MultiPoly denominator = MultiPoly::constant(n, Scalar(1));
    for (std::size_t k = 0; k < terms.size(); ++k) {
        MultiPoly summand = terms[k].numerator();
        for (std::size_t r = 0; r < terms.size(); ++r) {
            if (r != k) summand *= terms[r].denominator();
        }
        numerator += summand;
        denominator *= terms[k].denominator();
    }
    return {std::move(numerator), std::move(denominator)};
}

// ---------------------------------------------------------------------------
// Linear algebra
// ---------------------------------------------------------------------------

Matrix::Matrix(std::initializer_list<std::initializer_list<Scalar>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto &row : rows) {
        if (row.size() != cols_) throw DimensionError("ragged matrix literal");
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

std::size_t exact_rank(const Matrix &m) {
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    if (rows == 0 || cols == 0) return 0;

    // Clear denominators row by row; scaling rows does not change the rank.
    std::vector<std::vector<mpz_class>> a(rows, std::vector<mpz_class>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        mpz_class l = 1;
        for (std::size_t c = 0; c < cols; ++c) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(r, c).get_den_mpz_t());
        for (std::size_t c = 0; c < cols; ++c) a[r][c] = m(r, c).get_num() * (l / m(r, c).get_den());
    }

    std::size_t rank = 0;
    mpz_class previous = 1;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t pivot = rank;
        while (pivot < rows && a[pivot][c] == 0) ++pivot;
        if (pivot == rows) continue;
        std::swap(a[pivot], a[rank]);
        for (std::size_t r = rank + 1; r < rows; ++r) {
            for (std::size_t k = c + 1; k < cols; ++k) {
                a[r][k] = a[r][k] * a[rank][c] - a[r][c] * a[rank][k];
                mpz_divexact(a[r][k].get_mpz_t(), a[r][k].get_mpz_t(), previous.get_mpz_t());
            }
            a[r][c] = 0;
        }
        previous = a[rank][c];
        ++rank;
    }
    return rank;
}

// ---------------------------------------------------------------------------
// CompiledPoly
// ---------------------------------------------------------------------------

CompiledPoly::CompiledPoly(const MultiPoly &p) {
    terms_.reserve(p.num_terms());
    for (const auto &[e, c] : p.terms()) {
        Term t{c.get_d(), {}};
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] > 0) t.factors.push_back({static_cast<std::uint32_t>(i), e[i]});
        }
        terms_.push_back(std::move(t));
    }
}

double CompiledPoly::operator()(std::span<const double> x) const {
    double sum = 0.0;
    for (const auto &t : terms_) {
        double v = t.coef;
        for (const auto &f : t.factors) {
            const double base = x[f.var];
            for (std::uint32_t k = 0; k < f.exp; ++k) v *= base;
        }
        sum += v;
    }
    return sum;
}

} // namespace rnnrat
