// Recursive-descent parser for polynomial expressions.
//
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := power ('*' power)*
//   power  := atom ('^' integer)?
//   atom   := literal | identifier | '(' expr ')'
//
// A literal is an integer, "p/q" or a finite decimal; there is no general division.

#include <cctype>

#include "rnnrat/algebra.hpp"

namespace rnnrat {

namespace {

class PolyParser {
public:
    PolyParser(const std::string &text, std::size_t num_vars, std::span<const std::string> names)
        : text_(text), num_vars_(num_vars), names_(names) {}

    MultiPoly parse() {
        MultiPoly p = expr();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return p;
    }

private:
    [[noreturn]] void fail(const std::string &why) const {
        throw ArgumentError("polynomial '" + text_ + "' at column " + std::to_string(pos_ + 1) + ": " + why);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    MultiPoly expr() {
        bool negate = false;
        if (accept('-')) negate = true;
        else accept('+');
        MultiPoly sum = term();
        if (negate) sum = -sum;
        for (;;) {
            if (accept('+')) sum += term();
            else if (accept('-')) sum -= term();
            else return sum;
        }
    }

    MultiPoly term() {
        MultiPoly product = power();
        while (accept('*')) product *= power();
        return product;
    }

    MultiPoly power() {
        MultiPoly base = atom();
        if (!accept('^')) return base;
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) fail("expected a non-negative integer exponent");
        const auto e = std::stoul(text_.substr(start, pos_ - start));
        if (e > degree_cap()) fail("exponent exceeds degree cap");
        return base.pow(static_cast<std::uint32_t>(e));
    }

    MultiPoly atom() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            MultiPoly inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return literal();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    MultiPoly literal() {
        const std::size_t start = pos_;
        auto digits = [&] {
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        };
        digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            const std::size_t exp_start = pos_;
            digits();
            if (exp_start == pos_) pos_ = save;
        }
        std::string lit = text_.substr(start, pos_ - start);
        // "p/q" is a single literal when both sides are plain integers.
        if (pos_ < text_.size() && text_[pos_] == '/' && lit.find_first_not_of("0123456789") == std::string::npos) {
            const std::size_t den_start = ++pos_;
            digits();
            if (den_start == pos_) fail("expected denominator after '/'");
            lit += "/" + text_.substr(den_start, pos_ - den_start);
        }
        try {
            return MultiPoly::constant(num_vars_, parse_scalar(lit));
        } catch (const ArgumentError &e) {
            fail(e.what());
        }
    }

    MultiPoly identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        const std::string name = text_.substr(start, pos_ - start);
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (names_[i] == name) return MultiPoly::variable(num_vars_, i);
        }
        if (name.size() > 1 && name[0] == 'X' &&
            name.find_first_not_of("0123456789", 1) == std::string::npos) {
            const auto index = std::stoul(name.substr(1));
            if (index < 1 || index > num_vars_) {
                fail("variable " + name + " out of range X1..X" + std::to_string(num_vars_));
            }
            return MultiPoly::variable(num_vars_, index - 1);
        }
        fail("unknown identifier '" + name + "'");
    }

    const std::string &text_;
    std::size_t num_vars_;
    std::span<const std::string> names_;
    std::size_t pos_ = 0;
};

} // namespace

MultiPoly parse_poly(const std::string &text, std::size_t num_vars, std::span<const std::string> names) {
    if (!names.empty() && names.size() != num_vars) {
        throw DimensionError("parse_poly: name table size does not match variable count");
    }
    return PolyParser(text, num_vars, names).parse();
}

} // namespace rnnrat
