#pragma once

// YAML system spec files.
//
// RNN documents (schema "rnnrat.rnn/1") carry A, B, C, x0, the alphabet, the
// activation (a built-in name or an inline mapping) and an optional input
// signal. Rational documents (schema "rnnrat.rational/1") carry the variable
// table, one list of field components per letter, outputs and v0.
// Exact rationals are written as strings; letters are 1-based in files.

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>

#include "rnnrat/systems.hpp"

namespace rnnrat {

inline constexpr const char *kRnnSchema = "rnnrat.rnn/1";
inline constexpr const char *kRationalSchema = "rnnrat.rational/1";

struct SpecFile {
    std::string name;
    std::variant<RnnSystem, RationalSystemSpec> system;
    std::optional<PwcInput> input;

    bool is_rnn() const { return std::holds_alternative<RnnSystem>(system); }
    const RnnSystem &rnn() const { return std::get<RnnSystem>(system); }
    const RationalSystemSpec &rational() const { return std::get<RationalSystemSpec>(system); }
};

/// Parses one document. Without a schema field the kind is guessed from the
/// keys present. Every malformed or inconsistent entry raises ParseError with
/// the source line and the offending field.
SpecFile parse_spec(const std::string &text);
SpecFile load_spec_file(const std::string &path);

void emit_spec(std::ostream &out, const SpecFile &spec);
std::string emit_rnn(const RnnSystem &sys, const std::string &name = {},
                     const std::optional<PwcInput> &input = std::nullopt);
std::string emit_rational(const RationalSystemSpec &sys, const std::string &name = {},
                          const std::optional<PwcInput> &input = std::nullopt);

} // namespace rnnrat
