#include "rnnrat/spec_io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace rnnrat {

namespace {

int line_of(const YAML::Node &node) {
    const YAML::Mark m = node.Mark();
    return m.line >= 0 ? m.line + 1 : 0;
}

[[noreturn]] void fail(const YAML::Node &node, const std::string &what) { throw ParseError(what, line_of(node)); }

void check_keys(const YAML::Node &map, const std::set<std::string> &allowed, const std::string &where) {
    if (!map.IsMap()) fail(map, where + ": expected a mapping");
    for (const auto &kv : map) {
        const std::string key = kv.first.as<std::string>();
        if (!allowed.count(key)) fail(kv.first, where + ": unknown key '" + key + "'");
    }
}

const YAML::Node require(const YAML::Node &map, const std::string &key, const std::string &where) {
    const YAML::Node n = map[key];
    if (!n) fail(map, where + ": missing required key '" + key + "'");
    return n;
}

std::string scalar_text(const YAML::Node &node, const std::string &field) {
    if (!node.IsScalar()) fail(node, field + ": expected a scalar");
    return node.Scalar();
}

Scalar exact(const YAML::Node &node, const std::string &field) {
    const std::string text = scalar_text(node, field);
    try {
        return parse_scalar(text);
    } catch (const ArgumentError &e) {
        fail(node, field + ": '" + text + "' is not an exact rational");
    }
}

double real(const YAML::Node &node, const std::string &field) {
    const std::string text = scalar_text(node, field);
    double v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) fail(node, field + ": '" + text + "' is not a number");
    return v;
}

std::size_t count(const YAML::Node &node, const std::string &field) {
    const std::string text = scalar_text(node, field);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        fail(node, field + ": '" + text + "' is not a non-negative integer");
    return v;
}

bool flag(const YAML::Node &node, const std::string &field) {
    const std::string text = scalar_text(node, field);
    if (text == "true") return true;
    if (text == "false") return false;
    fail(node, field + ": expected true or false, got '" + text + "'");
}

std::vector<Scalar> exact_vector(const YAML::Node &node, const std::string &field) {
    if (!node.IsSequence()) fail(node, field + ": expected a list");
    std::vector<Scalar> out;
    for (std::size_t i = 0; i < node.size(); ++i)
        out.push_back(exact(node[i], field + "[" + std::to_string(i + 1) + "]"));
    return out;
}

Matrix exact_matrix(const YAML::Node &node, const std::string &field) {
    if (!node.IsSequence() || node.size() == 0) fail(node, field + ": expected a non-empty list of rows");
    std::size_t cols = 0;
    std::vector<std::vector<Scalar>> rows;
    for (std::size_t r = 0; r < node.size(); ++r) {
        const YAML::Node row = node[r];
        if (!row.IsSequence()) fail(row, field + ": row " + std::to_string(r + 1) + " is not a list");
        if (r == 0) {
            cols = row.size();
            if (cols == 0) fail(row, field + ": row 1 is empty");
        } else if (row.size() != cols) {
            fail(row, field + ": row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                          " entries, expected " + std::to_string(cols));
        }
        rows.push_back(exact_vector(row, field + " row " + std::to_string(r + 1)));
    }
    Matrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
    return m;
}

MultiPoly poly(const YAML::Node &node, const std::string &field, std::size_t num_vars,
               std::span<const std::string> names) {
    const std::string text = scalar_text(node, field);
    try {
        return parse_poly(text, num_vars, names);
    } catch (const ArgumentError &e) {
        fail(node, field + ": " + e.what());
    }
}

RationalFunc component(const YAML::Node &node, const std::string &field, std::size_t num_vars,
                       std::span<const std::string> names) {
    if (node.IsScalar()) return RationalFunc(poly(node, field, num_vars, names));
    check_keys(node, {"numerator", "denominator"}, field);
    MultiPoly num = poly(require(node, "numerator", field), field + ".numerator", num_vars, names);
    MultiPoly den = MultiPoly::constant(num_vars, 1);
    if (node["denominator"]) den = poly(node["denominator"], field + ".denominator", num_vars, names);
    if (den.is_zero()) fail(node, field + ": denominator is the zero polynomial");
    return RationalFunc(std::move(num), std::move(den));
}

ActivationSpec activation(const YAML::Node &node) {
    if (node.IsScalar()) {
        auto spec = builtin_activation(node.Scalar());
        if (!spec) fail(node, "activation: unknown built-in activation '" + node.Scalar() + "'");
        return *spec;
    }
    check_keys(node, {"name", "N", "rhs", "init", "invertible", "closed_form"}, "activation");
    ActivationSpec spec;
    spec.name = scalar_text(require(node, "name", "activation"), "activation.name");
    spec.order = count(require(node, "N", "activation"), "activation.N");
    if (spec.order == 0) fail(node["N"], "activation.N: the order must be at least 1");
    spec.rhs = component(require(node, "rhs", "activation"), "activation.rhs", spec.order, {});
    spec.init = exact_vector(require(node, "init", "activation"), "activation.init");
    if (spec.init.size() != spec.order)
        fail(node["init"], "activation.init: has " + std::to_string(spec.init.size()) + " entries, expected " +
                               std::to_string(spec.order));
    if (node["invertible"]) spec.invertible = flag(node["invertible"], "activation.invertible");
    if (node["closed_form"]) {
        try {
            spec.closed_form = closed_form_from_string(scalar_text(node["closed_form"], "activation.closed_form"));
        } catch (const ArgumentError &) {
            fail(node["closed_form"], "activation.closed_form: expected tanh, sigmoid, identity or none");
        }
    }
    try {
        validate(spec);
    } catch (const Error &e) {
        fail(node, std::string("activation: ") + e.what());
    }
    return spec;
}

std::vector<Letter> alphabet(const YAML::Node &node, std::size_t width, bool fixed_width) {
    if (!node.IsSequence()) fail(node, "alphabet: expected a list of input vectors");
    if (node.size() == 0) fail(node, "alphabet: the input alphabet must be non-empty");
    std::vector<Letter> out;
    for (std::size_t k = 0; k < node.size(); ++k) {
        const std::string field = "alphabet[" + std::to_string(k + 1) + "]";
        Letter letter = node[k].IsScalar() ? Letter{exact(node[k], field)} : exact_vector(node[k], field);
        if (fixed_width && letter.size() != width)
            fail(node[k], field + ": has " + std::to_string(letter.size()) + " entries, expected " +
                              std::to_string(width));
        for (std::size_t j = 0; j < out.size(); ++j)
            if (out[j] == letter)
                fail(node[k], "alphabet: letters " + std::to_string(j + 1) + " and " + std::to_string(k + 1) +
                                  " are equal");
        out.push_back(std::move(letter));
    }
    return out;
}

PwcInput input_signal(const YAML::Node &node, std::size_t num_letters) {
    check_keys(node, {"durations", "letters"}, "input");
    const YAML::Node d = require(node, "durations", "input");
    const YAML::Node l = require(node, "letters", "input");
    if (!d.IsSequence() || d.size() == 0) fail(d, "input.durations: expected a non-empty list");
    if (!l.IsSequence() || l.size() != d.size())
        fail(l, "input.letters: expected " + std::to_string(d.size()) + " entries, one per duration");
    PwcInput u;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const std::string field = "input.durations[" + std::to_string(i + 1) + "]";
        const double v = real(d[i], field);
        if (!(v > 0)) fail(d[i], field + ": durations must be positive");
        u.durations.push_back(v);
    }
    for (std::size_t i = 0; i < l.size(); ++i) {
        const std::string field = "input.letters[" + std::to_string(i + 1) + "]";
        const std::size_t k = count(l[i], field);
        if (k < 1 || k > num_letters)
            fail(l[i], field + ": letter " + std::to_string(k) + " outside 1.." + std::to_string(num_letters));
        u.letters.push_back(k - 1);
    }
    return u;
}

RnnSystem parse_rnn(const YAML::Node &root) {
    RnnSystem sys;
    sys.A = exact_matrix(require(root, "A", "spec"), "A");
    const std::size_t n = sys.A.rows();
    if (sys.A.cols() != n)
        fail(root["A"], "A: expected a square matrix, got " + std::to_string(n) + " rows of " +
                            std::to_string(sys.A.cols()) + " entries");
    sys.B = exact_matrix(require(root, "B", "spec"), "B");
    if (sys.B.rows() != n)
        fail(root["B"], "B: has " + std::to_string(sys.B.rows()) + " rows, expected " + std::to_string(n));
    sys.C = exact_matrix(require(root, "C", "spec"), "C");
    if (sys.C.cols() != n)
        fail(root["C"], "C: rows have " + std::to_string(sys.C.cols()) + " entries, expected " + std::to_string(n));
    if (root["x0"]) {
        sys.x0 = exact_vector(root["x0"], "x0");
        if (sys.x0.size() != n)
            fail(root["x0"], "x0: has " + std::to_string(sys.x0.size()) + " entries, expected " + std::to_string(n));
    } else {
        sys.x0.assign(n, Scalar(0));
    }
    sys.alphabet = alphabet(require(root, "alphabet", "spec"), sys.B.cols(), true);
    sys.activation = activation(require(root, "activation", "spec"));
    try {
        validate(sys);
    } catch (const Error &e) {
        fail(root, e.what());
    }
    return sys;
}

bool is_identifier(const std::string &s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

RationalSystemSpec parse_rational(const YAML::Node &root) {
    RationalSystemSpec sys;
    sys.dim = count(require(root, "dim", "spec"), "dim");
    if (sys.dim == 0) fail(root["dim"], "dim: must be at least 1");
    if (root["variables"]) {
        const YAML::Node v = root["variables"];
        if (!v.IsSequence() || v.size() != sys.dim)
            fail(v, "variables: expected a list of " + std::to_string(sys.dim) + " names");
        std::set<std::string> seen;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string name = scalar_text(v[i], "variables");
            if (!is_identifier(name)) fail(v[i], "variables: '" + name + "' is not an identifier");
            if (!seen.insert(name).second) fail(v[i], "variables: '" + name + "' appears twice");
            sys.var_names.push_back(name);
        }
    }
    const std::span<const std::string> names(sys.var_names);

    const YAML::Node fields = require(root, "fields", "spec");
    if (!fields.IsSequence() || fields.size() == 0)
        fail(fields, "fields: expected one list of components per input letter");
    for (std::size_t a = 0; a < fields.size(); ++a) {
        const YAML::Node row = fields[a];
        const std::string field = "fields[" + std::to_string(a + 1) + "]";
        if (!row.IsSequence() || row.size() != sys.dim)
            fail(row, field + ": expected " + std::to_string(sys.dim) + " components");
        std::vector<RationalFunc> comps;
        for (std::size_t i = 0; i < row.size(); ++i)
            comps.push_back(component(row[i], field + "[" + std::to_string(i + 1) + "]", sys.dim, names));
        sys.fields.push_back(std::move(comps));
    }

    const YAML::Node outputs = require(root, "outputs", "spec");
    if (!outputs.IsSequence() || outputs.size() == 0) fail(outputs, "outputs: expected a non-empty list");
    for (std::size_t k = 0; k < outputs.size(); ++k)
        sys.outputs.push_back(component(outputs[k], "outputs[" + std::to_string(k + 1) + "]", sys.dim, names));

    sys.v0 = exact_vector(require(root, "v0", "spec"), "v0");
    if (sys.v0.size() != sys.dim)
        fail(root["v0"], "v0: has " + std::to_string(sys.v0.size()) + " entries, expected " + std::to_string(sys.dim));

    if (root["alphabet"]) {
        sys.alphabet = alphabet(root["alphabet"], 0, false);
        if (sys.alphabet.size() != sys.fields.size())
            fail(root["alphabet"], "alphabet: has " + std::to_string(sys.alphabet.size()) + " letters but there are " +
                                       std::to_string(sys.fields.size()) + " field lists");
    }
    try {
        validate(sys);
    } catch (const Error &e) {
        fail(root, e.what());
    }
    return sys;
}

// Emission

void emit_scalar(YAML::Emitter &e, const Scalar &s) { e << YAML::DoubleQuoted << to_string(s); }

void emit_vector(YAML::Emitter &e, const std::vector<Scalar> &v) {
    e << YAML::Flow << YAML::BeginSeq;
    for (const auto &s : v) emit_scalar(e, s);
    e << YAML::EndSeq;
}

void emit_matrix(YAML::Emitter &e, const Matrix &m) {
    e << YAML::BeginSeq;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        std::vector<Scalar> row;
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        emit_vector(e, row);
    }
    e << YAML::EndSeq;
}

void emit_alphabet(YAML::Emitter &e, const std::vector<Letter> &alphabet) {
    e << YAML::Key << "alphabet" << YAML::Value << YAML::BeginSeq;
    for (const auto &letter : alphabet) emit_vector(e, letter);
    e << YAML::EndSeq;
}

void emit_component(YAML::Emitter &e, const RationalFunc &f, std::span<const std::string> names) {
    if (f.is_polynomial()) {
        e << YAML::DoubleQuoted << f.numerator().to_string(names);
        return;
    }
    e << YAML::BeginMap;
    e << YAML::Key << "numerator" << YAML::Value << YAML::DoubleQuoted << f.numerator().to_string(names);
    e << YAML::Key << "denominator" << YAML::Value << YAML::DoubleQuoted << f.denominator().to_string(names);
    e << YAML::EndMap;
}

std::string shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void emit_input(YAML::Emitter &e, const PwcInput &u) {
    e << YAML::Key << "input" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "durations" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (double d : u.durations) e << shortest(d);
    e << YAML::EndSeq;
    e << YAML::Key << "letters" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (std::size_t k : u.letters) e << k + 1;
    e << YAML::EndSeq;
    e << YAML::EndMap;
}

bool same_activation(const ActivationSpec &a, const ActivationSpec &b) {
    return a.name == b.name && a.order == b.order && a.rhs == b.rhs && a.init == b.init &&
           a.invertible == b.invertible && a.closed_form == b.closed_form;
}

void emit_activation(YAML::Emitter &e, const ActivationSpec &spec) {
    e << YAML::Key << "activation" << YAML::Value;
    const auto builtin = builtin_activation(spec.name);
    if (builtin && same_activation(*builtin, spec)) {
        e << spec.name;
        return;
    }
    e << YAML::BeginMap;
    e << YAML::Key << "name" << YAML::Value << spec.name;
    e << YAML::Key << "N" << YAML::Value << spec.order;
    e << YAML::Key << "rhs" << YAML::Value;
    e << YAML::BeginMap;
    e << YAML::Key << "numerator" << YAML::Value << YAML::DoubleQuoted << spec.rhs.numerator().to_string();
    e << YAML::Key << "denominator" << YAML::Value << YAML::DoubleQuoted << spec.rhs.denominator().to_string();
    e << YAML::EndMap;
    e << YAML::Key << "init" << YAML::Value;
    emit_vector(e, spec.init);
    e << YAML::Key << "invertible" << YAML::Value << spec.invertible;
    if (spec.closed_form != ClosedForm::none)
        e << YAML::Key << "closed_form" << YAML::Value << std::string(to_string(spec.closed_form));
    e << YAML::EndMap;
}

} // namespace

SpecFile parse_spec(const std::string &text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException &e) {
        throw ParseError("malformed YAML: " + e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0);
    }
    if (!root.IsMap()) throw ParseError("spec: expected a mapping at the top level", line_of(root));

    std::string schema;
    if (root["schema"]) {
        schema = scalar_text(root["schema"], "schema");
        if (schema != kRnnSchema && schema != kRationalSchema)
            fail(root["schema"], "schema: unsupported schema '" + schema + "'");
    } else {
        schema = root["A"] ? kRnnSchema : kRationalSchema;
    }

    SpecFile spec;
    try {
        if (schema == kRnnSchema) {
            check_keys(root, {"schema", "name", "A", "B", "C", "x0", "alphabet", "activation", "input"}, "spec");
            spec.system = parse_rnn(root);
        } else {
            check_keys(root, {"schema", "name", "dim", "variables", "alphabet", "fields", "outputs", "v0", "input"},
                       "spec");
            spec.system = parse_rational(root);
        }
        if (root["name"]) spec.name = scalar_text(root["name"], "name");
        if (root["input"]) {
            const std::size_t k =
                spec.is_rnn() ? spec.rnn().num_letters() : std::get<RationalSystemSpec>(spec.system).num_letters();
            spec.input = input_signal(root["input"], k);
        }
    } catch (const YAML::Exception &e) {
        throw ParseError("malformed spec: " + e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0);
    }
    return spec;
}

SpecFile load_spec_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read spec file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_spec(buf.str());
}

std::string emit_rnn(const RnnSystem &sys, const std::string &name, const std::optional<PwcInput> &input) {
    YAML::Emitter e;
    e << YAML::BeginMap;
    e << YAML::Key << "schema" << YAML::Value << kRnnSchema;
    if (!name.empty()) e << YAML::Key << "name" << YAML::Value << name;
    e << YAML::Key << "A" << YAML::Value;
    emit_matrix(e, sys.A);
    e << YAML::Key << "B" << YAML::Value;
    emit_matrix(e, sys.B);
    e << YAML::Key << "C" << YAML::Value;
    emit_matrix(e, sys.C);
    e << YAML::Key << "x0" << YAML::Value;
    emit_vector(e, sys.x0);
    emit_alphabet(e, sys.alphabet);
    emit_activation(e, sys.activation);
    if (input) emit_input(e, *input);
    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

std::string emit_rational(const RationalSystemSpec &sys, const std::string &name,
                          const std::optional<PwcInput> &input) {
    std::vector<std::string> names = sys.var_names;
    if (names.empty())
        for (std::size_t i = 0; i < sys.dim; ++i) names.push_back("X" + std::to_string(i + 1));

    YAML::Emitter e;
    e << YAML::BeginMap;
    e << YAML::Key << "schema" << YAML::Value << kRationalSchema;
    if (!name.empty()) e << YAML::Key << "name" << YAML::Value << name;
    e << YAML::Key << "dim" << YAML::Value << sys.dim;
    e << YAML::Key << "variables" << YAML::Value << YAML::Flow << names;
    if (!sys.alphabet.empty()) emit_alphabet(e, sys.alphabet);
    e << YAML::Key << "fields" << YAML::Value << YAML::BeginSeq;
    for (const auto &row : sys.fields) {
        e << YAML::BeginSeq;
        for (const auto &f : row) emit_component(e, f, names);
        e << YAML::EndSeq;
    }
    e << YAML::EndSeq;
    e << YAML::Key << "outputs" << YAML::Value << YAML::BeginSeq;
    for (const auto &h : sys.outputs) emit_component(e, h, names);
    e << YAML::EndSeq;
    e << YAML::Key << "v0" << YAML::Value;
    emit_vector(e, sys.v0);
    if (input) emit_input(e, *input);
    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

void emit_spec(std::ostream &out, const SpecFile &spec) {
    out << (spec.is_rnn() ? emit_rnn(spec.rnn(), spec.name, spec.input)
                          : emit_rational(spec.rational(), spec.name, spec.input));
}

} // namespace rnnrat
