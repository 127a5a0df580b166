#include "rnnrat/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "rnnrat/analysis.hpp"
#include "rnnrat/embedding.hpp"
#include "rnnrat/spec_io.hpp"

namespace rnnrat::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Usage problem detected after argument parsing; exits with kParseError.
class UsageError : public Error {
public:
    using Error::Error;
};

spdlog::logger &logger() {
    static std::shared_ptr<spdlog::logger> log = [] {
        auto l = std::make_shared<spdlog::logger>("rnnrat", std::make_shared<spdlog::sinks::stderr_sink_st>());
        l->set_pattern("[%l] %v");
        return l;
    }();
    const char *env = std::getenv(kLogEnv);
    log->set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
    return *log;
}

// Statement attached to each report entry: what a "holds" status asserts.
const std::map<std::string, std::string> &lemma_statements() {
    static const std::map<std::string, std::string> table = {
        {"embedding", "the solution of R(Sigma) from v0 equals F(x(t)) and its output equals the RNN output"},
        {"derivative_realization",
         "the outputs of R_aux equal the output derivatives sum_i c_ki sigma(a_i x + e_i^T B alpha)"},
        {"r_aux_semi_algebraic_observability",
         "the Lie derivatives of the R_aux outputs have generic Jacobian rank equal to dim R_aux"},
        {"r_aux_accessibility", "the Lie algebra generated by the R_aux fields has full rank at v0"},
        {"r_aux_polynomial", "R_aux is a polynomial system"},
        {"activation_invertible", "the activation is invertible"},
        {"a_full_rank", "Ker(A) is trivial"},
        {"span_reachability", "accessibility of R_aux implies span-reachability of the RNN"},
        {"weak_observability",
         "a polynomial, semi-algebraically observable R_aux with invertible activation and trivial Ker(A) implies "
         "weak observability of the RNN"},
        {"coordinate_obs_subspace_trivial",
         "the largest coordinate subspace that is A-invariant and inside Ker(C) is trivial"},
        {"rank_test_consistency", "semi-algebraic observability of R_aux forces a trivial coordinate subspace"},
        {"sigma_minimality", "an observable and accessible R_aux makes the RNN sigma-minimal"},
        {"output_map_rank", "observation rank of R(Sigma) against n(1+KN)"},
        {"derivative_map_rank", "observation rank of R_aux against nKN"},
        {"sigma_minimality_rank_condition", "either observation rank reaching its target makes the RNN sigma-minimal"},
        {"finite_transcendence_bound", "the output map has a rational realization of dimension n(1+KN)"},
        {"output_map_rank_estimate", "the observation rank of R(Sigma) lies within n(1+KN)"},
    };
    return table;
}

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read spec file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error("write to '" + path.string() + "' failed");
}

fs::path prepare_out(const RunConfig &cfg) {
    fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + cfg.out_dir + "': " + ec.message());
    return dir;
}

const RnnSystem &require_rnn(const SpecFile &spec, const std::string &cmd) {
    if (!spec.is_rnn()) throw UsageError(cmd + " needs an RNN spec (schema " + std::string(kRnnSchema) + ")");
    return spec.rnn();
}

PwcInput input_or_default(const SpecFile &spec) { return spec.input ? *spec.input : PwcInput::constant(0); }

const PwcInput &require_input(const SpecFile &spec, const std::string &cmd) {
    if (!spec.input) throw UsageError(cmd + " needs an input section in the spec");
    return *spec.input;
}

AnalysisOptions options(const RunConfig &cfg) {
    AnalysisOptions o;
    o.depth_cap = cfg.depth_cap;
    o.bracket_depth_cap = cfg.bracket_depth_cap;
    o.num_points = cfg.num_points;
    o.seed = cfg.seed;
    o.term_budget = cfg.term_budget;
    return o;
}

json input_json(const PwcInput &u) {
    json letters = json::array();
    for (std::size_t k : u.letters) letters.push_back(k + 1);
    return {{"durations", u.durations}, {"letters", letters}};
}

json to_json(const EmbeddingReport &r) {
    return {{"max_state_deviation", r.max_state_deviation},
            {"max_output_deviation", r.max_output_deviation},
            {"worst_time", r.worst_time},
            {"horizon", r.horizon},
            {"step", r.step},
            {"tol", r.tol},
            {"input", input_json(r.input)},
            {"pass", r.pass}};
}

json to_json(const AuxReport &r) {
    return {{"max_closed_form_deviation", r.max_closed_form_deviation},
            {"max_fd_deviation", r.max_fd_deviation},
            {"worst_closed_form_time", r.worst_closed_form_time},
            {"worst_fd_time", r.worst_fd_time},
            {"horizon", r.horizon},
            {"step", r.step},
            {"fd_step", r.fd_step},
            {"tol_closed_form", r.tol_closed},
            {"tol_fd", r.tol_fd},
            {"input", input_json(r.input)},
            {"closed_form_pass", r.closed_form_pass},
            {"fd_pass", r.fd_pass},
            {"pass", r.pass}};
}

json dims_json(const RnnSystem &sys) {
    return {{"n", sys.n()},
            {"m", sys.m()},
            {"p", sys.p()},
            {"K", sys.num_letters()},
            {"N", sys.activation.order},
            {"r_sigma_dim", r_sigma_dim(sys)},
            {"r_aux_dim", r_aux_dim(sys)}};
}

json config_json(const RunConfig &cfg) {
    return {{"horizon", cfg.horizon},
            {"step", cfg.step},
            {"tolerances",
             {{"embedding", cfg.tol_embedding}, {"closed_form", cfg.tol_closed_form}, {"finite_difference", cfg.tol_fd}}},
            {"depth_cap", cfg.depth_cap},
            {"bracket_depth_cap", cfg.bracket_depth_cap},
            {"points", cfg.num_points},
            {"seed", cfg.seed},
            {"term_budget", cfg.term_budget}};
}

json entry(const Certificate &c) {
    const auto &table = lemma_statements();
    const auto it = table.find(c.name);
    json e = {{"name", c.name},
              {"lemma", it != table.end() ? it->second : c.claim},
              {"status", std::string(to_string(c.status))},
              {"claim", c.claim},
              {"evidence", c.evidence}};
    if (!c.reason.empty()) e["reason"] = c.reason;
    if (!c.premises.empty()) e["premises"] = c.premises;
    if (!c.rule.empty()) e["rule"] = c.rule;
    return e;
}

Certificate numeric_check(std::string name, bool pass, std::string claim, json evidence) {
    Certificate c;
    c.name = std::move(name);
    c.status = pass ? Status::holds : Status::fails;
    c.claim = std::move(claim);
    c.evidence = std::move(evidence);
    return c;
}

bool any_fails(const std::vector<Certificate> &certs) {
    for (const auto &c : certs)
        if (c.status == Status::fails) return true;
    return false;
}

// Writes the certificates as JSON to out and to the output directory.
int emit_certificates(const RunConfig &cfg, const std::string &file, const std::vector<Certificate> &certs,
                      std::ostream &out) {
    json checks = json::array();
    for (const auto &c : certs) checks.push_back(entry(c));
    const std::string text = checks.dump(2) + "\n";
    write_file(prepare_out(cfg) / file, text);
    out << text;
    for (const auto &c : certs) logger().info("{}: {}", c.name, to_string(c.status));
    return any_fails(certs) ? kCertificationFailure : kOk;
}

int cmd_build(const RunConfig &cfg, const SpecFile &spec, std::ostream &out) {
    const RnnSystem &sys = require_rnn(spec, "build");
    const fs::path dir = prepare_out(cfg);
    const std::string base = spec.name.empty() ? std::string() : spec.name + " ";
    write_file(dir / "r_sigma.yaml", emit_rational(build_r_sigma(sys), base + "R(Sigma)"));
    write_file(dir / "r_aux.yaml", emit_rational(build_r_aux(sys), base + "R_aux"));
    const json dims = dims_json(sys);
    write_file(dir / "dims.json", dims.dump(2) + "\n");
    out << "dim R(Sigma) = " << dims["r_sigma_dim"].get<std::size_t>() << "\n";
    out << "dim R_aux = " << dims["r_aux_dim"].get<std::size_t>() << "\n";
    return kOk;
}

std::string csv_text(const Trajectory &traj) {
    std::ostringstream s;
    write_csv(s, traj);
    return s.str();
}

int cmd_simulate(const RunConfig &cfg, const SpecFile &spec, std::ostream &out) {
    const PwcInput u = input_or_default(spec);
    const Trajectory traj = spec.is_rnn() ? simulate_rnn(spec.rnn(), u, cfg.horizon, cfg.step)
                                          : simulate_rational(spec.rational(), u, cfg.horizon, cfg.step);
    const fs::path file = prepare_out(cfg) / "trajectory.csv";
    write_file(file, csv_text(traj));
    out << "wrote " << traj.times.size() << " samples to " << file.string() << "\n";
    return kOk;
}

int cmd_verify_embedding(const RunConfig &cfg, const SpecFile &spec, std::ostream &out) {
    const RnnSystem &sys = require_rnn(spec, "verify-embedding");
    const auto rep = verify_embedding(sys, require_input(spec, "verify-embedding"), cfg.horizon, cfg.step,
                                      cfg.tol_embedding);
    const std::string text = to_json(rep).dump(2) + "\n";
    write_file(prepare_out(cfg) / "embedding.json", text);
    out << text;
    return rep.pass ? kOk : kSimulationError;
}

int cmd_verify_aux(const RunConfig &cfg, const SpecFile &spec, std::ostream &out) {
    const RnnSystem &sys = require_rnn(spec, "verify-aux");
    const auto rep = verify_aux(sys, require_input(spec, "verify-aux"), cfg.horizon, cfg.step, cfg.tol_closed_form,
                                cfg.tol_fd);
    const std::string text = to_json(rep).dump(2) + "\n";
    write_file(prepare_out(cfg) / "aux.json", text);
    out << text;
    return rep.pass ? kOk : kSimulationError;
}

void append_unique(std::vector<Certificate> &into, std::vector<Certificate> from) {
    for (auto &c : from) {
        bool seen = false;
        for (const auto &d : into) seen = seen || d.name == c.name;
        if (!seen) into.push_back(std::move(c));
    }
}

int cmd_report(const RunConfig &cfg, const SpecFile &spec, const std::string &input_bytes, std::ostream &out) {
    const RnnSystem &sys = require_rnn(spec, "report");
    const fs::path dir = prepare_out(cfg);
    const PwcInput u = input_or_default(spec);
    const AnalysisOptions opts = options(cfg);

    std::vector<Certificate> certs;
    logger().info("embedding check");
    const auto emb = verify_embedding(sys, u, cfg.horizon, cfg.step, cfg.tol_embedding);
    certs.push_back(numeric_check("embedding", emb.pass, "R(Sigma) reproduces the RNN trajectory and output",
                                  to_json(emb)));
    logger().info("derivative realization check");
    const auto aux = verify_aux(sys, u, cfg.horizon, cfg.step, cfg.tol_closed_form, cfg.tol_fd);
    certs.push_back(numeric_check("derivative_realization", aux.pass,
                                  "R_aux outputs are the output derivatives of the switched RNN", to_json(aux)));
    logger().info("observability and reachability");
    append_unique(certs, rnn_property_report(sys, opts).certificates);
    logger().info("minimality");
    append_unique(certs, minimality_certificate(sys, opts).certificates);
    append_unique(certs, hankel_minimality(sys, opts).certificates);
    append_unique(certs, existence_necessary_check(sys, opts).certificates);

    json manifest = json::array();
    const auto add_trajectory = [&](const std::string &file, const std::string &system, const Trajectory &traj) {
        const std::string text = csv_text(traj);
        write_file(dir / file, text);
        manifest.push_back({{"file", file}, {"system", system}, {"rows", traj.times.size()}, {"sha256", sha256_hex(text)}});
    };
    add_trajectory("trajectory_rnn.csv", "RNN", simulate_rnn(sys, u, cfg.horizon, cfg.step));
    add_trajectory("trajectory_r_sigma.csv", "R(Sigma)", simulate_rational(build_r_sigma(sys), u, cfg.horizon, cfg.step));

    json checks = json::array();
    std::map<std::string, std::size_t> tally = {{"holds", 0}, {"fails", 0}, {"inconclusive", 0}};
    for (const auto &c : certs) {
        checks.push_back(entry(c));
        ++tally[std::string(to_string(c.status))];
    }
    const json doc = {{"schema", kReportSchema},
                      {"tool_version", kToolVersion},
                      {"input", {{"name", spec.name}, {"bytes", input_bytes.size()}, {"sha256", sha256_hex(input_bytes)}}},
                      {"signal", input_json(u)},
                      {"config", config_json(cfg)},
                      {"dimensions", dims_json(sys)},
                      {"checks", checks},
                      {"summary", tally},
                      {"trajectories", manifest}};
    write_file(dir / "report.json", doc.dump(2) + "\n");
    for (const auto &c : certs) out << std::left << std::setw(36) << c.name << to_string(c.status) << "\n";
    out << "report written to " << (dir / "report.json").string() << "\n";
    return any_fails(certs) ? kCertificationFailure : kOk;
}

int dispatch(const RunConfig &cfg, std::ostream &out) {
    const std::string bytes = read_file(cfg.input);
    const SpecFile spec = parse_spec(bytes);
    logger().debug("parsed {} spec '{}'", spec.is_rnn() ? "RNN" : "rational", spec.name);
    const std::string &cmd = cfg.subcommand;
    if (cmd == "build") return cmd_build(cfg, spec, out);
    if (cmd == "simulate") return cmd_simulate(cfg, spec, out);
    if (cmd == "verify-embedding") return cmd_verify_embedding(cfg, spec, out);
    if (cmd == "verify-aux") return cmd_verify_aux(cfg, spec, out);
    if (cmd == "report") return cmd_report(cfg, spec, bytes, out);

    const RnnSystem &sys = require_rnn(spec, cmd);
    const AnalysisOptions opts = options(cfg);
    if (cmd == "check-observability")
        return emit_certificates(cfg, "observability.json", observability_report(sys, opts).certificates, out);
    if (cmd == "check-reachability")
        return emit_certificates(cfg, "reachability.json", reachability_report(sys, opts).certificates, out);
    if (cmd == "check-minimality") {
        std::vector<Certificate> certs = minimality_certificate(sys, opts).certificates;
        append_unique(certs, hankel_minimality(sys, opts).certificates);
        return emit_certificates(cfg, "minimality.json", certs, out);
    }
    throw UsageError("unknown subcommand '" + cmd + "'");
}

} // namespace

std::string sha256_hex(const std::string &bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 computation failed");
    std::ostringstream s;
    for (unsigned int i = 0; i < len; ++i) s << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return s.str();
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    RunConfig cfg;
    CLI::App app{"Rational-system embeddings and structural checks for continuous-time RNNs", "rnnrat"};
    app.require_subcommand(1);
    app.fallthrough();

    const auto positive = CLI::PositiveNumber;
    app.add_option("--horizon", cfg.horizon, "simulation horizon")->check(positive);
    app.add_option("--step", cfg.step, "RK4 step")->check(positive);
    app.add_option("--tol", cfg.tol_embedding, "embedding and closed-form tolerance")->check(positive);
    app.add_option("--fd-tol", cfg.tol_fd, "finite-difference tolerance")->check(positive);
    app.add_option("--depth-cap", cfg.depth_cap, "Lie derivative depth cap (0: dimension)");
    app.add_option("--bracket-depth-cap", cfg.bracket_depth_cap, "Lie bracket depth cap (0: dimension)");
    app.add_option("--points", cfg.num_points, "sample points for generic ranks")->check(CLI::Range(1, 1000000));
    app.add_option("--seed", cfg.seed, "sampling seed");
    app.add_option("--term-budget", cfg.term_budget, "polynomial term budget for symbolic searches")
        ->check(CLI::Range(1, 1000000000));
    app.add_option("--out", cfg.out_dir, "output directory");

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"build", "write R(Sigma) and R_aux spec files and a dimensions summary"},
        {"simulate", "simulate the spec's system and write a CSV trajectory"},
        {"verify-embedding", "co-simulate the RNN and R(Sigma)"},
        {"verify-aux", "check R_aux outputs against closed form and finite differences"},
        {"check-observability", "weak observability certificates"},
        {"check-reachability", "span-reachability certificates"},
        {"check-minimality", "sigma-minimality certificates"},
        {"report", "all checks, trajectories and a JSON report"},
    };
    for (const auto &[name, help] : commands) {
        CLI::App *sub = app.add_subcommand(name, help);
        sub->add_option("spec", cfg.input, "system spec file")->required();
        sub->callback([&cfg, name = name] { cfg.subcommand = name; });
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kParseError;
    }
    cfg.tol_closed_form = cfg.tol_embedding;

    try {
        return dispatch(cfg, out);
    } catch (const ParseError &e) {
        err << "parse error: " << e.what() << "\n";
        return kParseError;
    } catch (const UsageError &e) {
        err << "error: " << e.what() << "\n";
        return kParseError;
    } catch (const DivergenceError &e) {
        err << "simulation error: " << e.what() << "\n";
        return kSimulationError;
    } catch (const SingularityError &e) {
        err << "simulation error: " << e.what() << "\n";
        return kSimulationError;
    } catch (const EvaluationError &e) {
        err << "simulation error: " << e.what() << "\n";
        return kSimulationError;
    } catch (const DimensionError &e) {
        err << "invalid system: " << e.what() << "\n";
        return kParseError;
    } catch (const ArgumentError &e) {
        err << "invalid system: " << e.what() << "\n";
        return kParseError;
    } catch (const ConfigurationError &e) {
        err << "invalid system: " << e.what() << "\n";
        return kParseError;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kOtherError;
    }
}

} // namespace rnnrat::cli
