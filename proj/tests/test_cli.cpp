#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rnnrat/cli.hpp"
#include "rnnrat/embedding.hpp"
#include "rnnrat/spec_io.hpp"

using namespace rnnrat;
namespace fs = std::filesystem;

namespace {

const char *kExample = R"(schema: rnnrat.rnn/1
name: example
A: [[0, 1], [1, 0]]
B: [[1], [1]]
C: [[1, 0]]
x0: [0, 0]
alphabet: [["1/2"]]
activation: sigmoid
input:
  durations: [2, 3]
  letters: [1, 1]
)";

const char *kTanh = R"(A:
  - ["1/2", 0, "-1/4"]
  - [0, "1/3", 1]
  - ["-1", "1/5", 0]
B: [[1], ["1/2"], [0]]
C: [[1, 0, 0], [0, 0, 1]]
x0: ["1/10", 0, "-1/10"]
alphabet: [0, 1]
activation: tanh
input: {durations: [1, 1, 1], letters: [1, 2, 1]}
)";

struct Sandbox {
    fs::path dir;

    explicit Sandbox(const std::string &name) : dir(fs::temp_directory_path() / ("rnnrat_cli_" + name)) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Sandbox() { fs::remove_all(dir); }

    std::string write(const std::string &file, const std::string &text) const {
        std::ofstream(dir / file) << text;
        return (dir / file).string();
    }

    std::string out(const std::string &sub = "out") const { return (dir / sub).string(); }
};

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

TEST_CASE("build writes both systems and the dimensions") {
    Sandbox box("build");
    const auto spec = box.write("example.yaml", kExample);
    const auto r = run({"build", spec, "--out", box.out()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("dim R(Sigma) = 4") != std::string::npos);
    CHECK(r.out.find("dim R_aux = 2") != std::string::npos);

    const auto aux = load_spec_file(box.out() + "/r_aux.yaml");
    REQUIRE_FALSE(aux.is_rnn());
    const auto &ra = aux.rational();
    REQUIRE(ra.dim == 2);
    CHECK(equivalent(ra.fields[0][0], RationalFunc(parse_poly("X1*X2*(1 - X1)", 2))));
    CHECK(equivalent(ra.fields[0][1], RationalFunc(parse_poly("X1*X2*(1 - X2)", 2))));
    CHECK(equivalent(ra.outputs[0], RationalFunc(parse_poly("X1", 2))));

    const auto rs = load_spec_file(box.out() + "/r_sigma.yaml");
    CHECK(rs.rational().dim == 4);
    const auto dims = nlohmann::json::parse(slurp(box.out() + "/dims.json"));
    CHECK(dims["r_sigma_dim"] == 4);
    CHECK(dims["r_aux_dim"] == 2);
}

TEST_CASE("build on a three-neuron tanh RNN with two letters") {
    Sandbox box("tanh");
    const auto r = run({"build", box.write("tanh.yaml", kTanh), "--out", box.out()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("dim R(Sigma) = 9") != std::string::npos);
    CHECK(r.out.find("dim R_aux = 6") != std::string::npos);
}

TEST_CASE("built files re-parse to the constructed systems") {
    Sandbox box("roundtrip");
    const auto spec_path = box.write("tanh.yaml", kTanh);
    REQUIRE(run({"build", spec_path, "--out", box.out()}).code == 0);
    const auto sys = load_spec_file(spec_path).rnn();
    const auto rs = load_spec_file(box.out() + "/r_sigma.yaml").rational();
    const auto expected = build_r_sigma(sys);
    CHECK(rs.fields == expected.fields);
    CHECK(rs.outputs == expected.outputs);
    CHECK(rs.v0 == expected.v0);
    CHECK(rs.var_names == expected.var_names);
    CHECK(rs.alphabet == expected.alphabet);
}

TEST_CASE("simulate writes a CSV for RNN and rational specs") {
    Sandbox box("simulate");
    const auto spec = box.write("example.yaml", kExample);
    auto r = run({"simulate", spec, "--out", box.out(), "--horizon", "1", "--step", "0.01"});
    REQUIRE(r.code == 0);
    std::string csv = slurp(box.out() + "/trajectory.csv");
    CHECK(csv.rfind("t,x1,x2,y1,input_letter_index\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 102);

    REQUIRE(run({"build", spec, "--out", box.out("built")}).code == 0);
    r = run({"simulate", box.out("built") + "/r_aux.yaml", "--out", box.out("aux"), "--horizon", "1"});
    REQUIRE(r.code == 0);
    csv = slurp(box.out("aux") + "/trajectory.csv");
    CHECK(csv.rfind("t,x1,x2,y1,input_letter_index\n", 0) == 0);
}

TEST_CASE("verify subcommands pass on the example") {
    Sandbox box("verify");
    const auto spec = box.write("example.yaml", kExample);
    auto r = run({"verify-embedding", spec, "--out", box.out()});
    CHECK(r.code == 0);
    auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["pass"] == true);
    CHECK(doc["max_state_deviation"].get<double>() <= 1e-6);

    r = run({"verify-aux", spec, "--out", box.out()});
    CHECK(r.code == 0);
    doc = nlohmann::json::parse(r.out);
    CHECK(doc["closed_form_pass"] == true);
    CHECK(doc["fd_pass"] == true);
    CHECK(fs::exists(box.out() + "/aux.json"));
}

TEST_CASE("a failed verification exits with the simulation code") {
    Sandbox box("verify_fail");
    const auto spec = box.write("example.yaml", kExample);
    // A tolerance below rounding noise cannot be met.
    const auto r = run({"verify-embedding", spec, "--out", box.out(), "--tol", "1e-300"});
    CHECK(r.code == cli::kSimulationError);
}

TEST_CASE("verification needs an input section") {
    Sandbox box("verify_noinput");
    std::string text = kExample;
    text.erase(text.find("input:"));
    const auto r = run({"verify-aux", box.write("noinput.yaml", text), "--out", box.out()});
    CHECK(r.code == cli::kParseError);
    CHECK(r.err.find("input section") != std::string::npos);
}

TEST_CASE("certification on the example concludes weak observability") {
    Sandbox box("certify");
    const auto spec = box.write("example.yaml", kExample);
    auto r = run({"check-observability", spec, "--out", box.out()});
    REQUIRE(r.code == 0);
    const auto checks = nlohmann::json::parse(r.out);
    bool found = false;
    for (const auto &c : checks) {
        if (c["name"] == "weak_observability") {
            found = true;
            CHECK(c["status"] == "holds");
            CHECK(c["claim"] == "Sigma is weakly observable");
        }
    }
    CHECK(found);

    r = run({"check-reachability", spec, "--out", box.out()});
    CHECK(r.code == 0);
    CHECK(r.out.find("span_reachability") != std::string::npos);
    r = run({"check-minimality", spec, "--out", box.out()});
    CHECK(r.code == 0);
    CHECK(r.out.find("sigma_minimality_rank_condition") != std::string::npos);
}

TEST_CASE("reports are byte-identical across runs") {
    Sandbox box("report");
    const auto spec = box.write("example.yaml", kExample);
    REQUIRE(run({"report", spec, "--out", box.out("a")}).code == 0);
    REQUIRE(run({"report", spec, "--out", box.out("b")}).code == 0);
    const std::string a = slurp(box.out("a") + "/report.json");
    CHECK(a == slurp(box.out("b") + "/report.json"));
    CHECK(slurp(box.out("a") + "/trajectory_rnn.csv") == slurp(box.out("b") + "/trajectory_rnn.csv"));

    const auto doc = nlohmann::json::parse(a);
    CHECK(doc["schema"] == cli::kReportSchema);
    CHECK(doc["input"]["sha256"] == cli::sha256_hex(kExample));
    CHECK(doc["summary"]["fails"] == 0);
    for (const auto &c : doc["checks"]) {
        CHECK(c.contains("status"));
        CHECK(c.contains("lemma"));
    }
    for (const auto &t : doc["trajectories"]) {
        CHECK(t["sha256"] == cli::sha256_hex(slurp(box.out("a") + "/" + t["file"].get<std::string>())));
    }
}

TEST_CASE("a changed seed is recorded in the report") {
    Sandbox box("seed");
    const auto spec = box.write("example.yaml", kExample);
    REQUIRE(run({"report", spec, "--out", box.out("a"), "--seed", "7"}).code == 0);
    const auto doc = nlohmann::json::parse(slurp(box.out("a") + "/report.json"));
    CHECK(doc["config"]["seed"] == 7);
}

TEST_CASE("exit codes") {
    Sandbox box("codes");
    SUBCASE("malformed matrix row") {
        std::string text = kExample;
        text.replace(text.find("[[0, 1], [1, 0]]"), 16, "[[0, 1], [1]]");
        const auto r = run({"build", box.write("bad.yaml", text), "--out", box.out()});
        CHECK(r.code == cli::kParseError);
        CHECK(r.err.find("A: row 2 has 1 entries, expected 2") != std::string::npos);
    }
    SUBCASE("empty alphabet") {
        std::string text = kExample;
        text.replace(text.find("[[\"1/2\"]]"), 9, "[]");
        const auto r = run({"build", box.write("empty.yaml", text), "--out", box.out()});
        CHECK(r.code == cli::kParseError);
        CHECK(r.err.find("alphabet") != std::string::npos);
    }
    SUBCASE("missing file") {
        CHECK(run({"build", box.out("nothing.yaml")}).code == cli::kParseError);
    }
    SUBCASE("bad arguments") {
        const auto spec = box.write("example.yaml", kExample);
        CHECK(run({}).code == cli::kParseError);
        CHECK(run({"frobnicate", spec}).code == cli::kParseError);
        CHECK(run({"simulate", spec, "--horizon", "-1"}).code == cli::kParseError);
        CHECK(run({"simulate", spec, "--step", "abc"}).code == cli::kParseError);
        CHECK(run({"--help"}).code == 0);
    }
    SUBCASE("rational spec where an RNN is needed") {
        const auto r = run({"check-observability", box.write("r.yaml", "dim: 1\nfields: [[\"1\"]]\noutputs: [X1]\nv0: [0]\n"),
                            "--out", box.out()});
        CHECK(r.code == cli::kParseError);
    }
    SUBCASE("finite-time blow-up") {
        // v' = v^2 from v = 1 escapes at t = 1.
        const auto spec = box.write("blowup.yaml", "dim: 1\nfields: [[\"X1^2\"]]\noutputs: [X1]\nv0: [1]\n");
        const auto r = run({"simulate", spec, "--out", box.out(), "--horizon", "2"});
        CHECK(r.code == cli::kSimulationError);
        CHECK(r.err.find("simulation error") != std::string::npos);
    }
    SUBCASE("denominator vanishing at the initial state") {
        const auto spec = box.write(
            "pole.yaml", "dim: 1\nfields: [[{numerator: \"1\", denominator: \"1 - X1\"}]]\noutputs: [X1]\nv0: [1]\n");
        CHECK(run({"simulate", spec, "--out", box.out()}).code == cli::kParseError);
    }
    SUBCASE("a failing certificate") {
        // Singular A: the trivial-kernel premise fails.
        std::string text = kExample;
        text.replace(text.find("[[0, 1], [1, 0]]"), 16, "[[1, 1], [1, 1]]");
        const auto r = run({"check-observability", box.write("singular.yaml", text), "--out", box.out()});
        CHECK(r.code == cli::kCertificationFailure);
    }
}

TEST_CASE("sha256 of known strings") {
    CHECK(cli::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
