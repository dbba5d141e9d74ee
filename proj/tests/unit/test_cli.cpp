#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "coherify/channel.hpp"
#include "coherify/cli.hpp"
#include "fixtures.hpp"

using namespace coherify;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
  json report() const { return json::parse(out); }
};

Outcome run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Fresh scratch directory per test case.
fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("coherify_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path.string();
}

std::string write_t(const fs::path& dir, const std::string& name, const TransitionMatrix& t) {
  return write(dir / name, cli::format_matrix_json(t.as_matrix()));
}

std::vector<double> as_vector(const json& a) { return a.get<std::vector<double>>(); }

void check_close(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  REQUIRE(got.size() >= want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(std::abs(got[i] - (i < want.size() ? want[i] : 0.0)) <= tol);
  }
}

}  // namespace

TEST_CASE("matrix files: json") {
  const auto f = cli::parse_matrix_json(R"({"dim": 2, "kind": "complex", "entries": [[1, 0], [0, 0.5], [0, -0.5], [2, 0]]})");
  CHECK(f.rows == 2);
  CHECK(f.complex);
  CHECK(f.entries[1] == Complex(0, 0.5));
  CHECK(f.entries[2] == Complex(0, -0.5));

  const auto m = f.matrix();
  const auto back = cli::parse_matrix_json(cli::format_matrix_json(m));
  CHECK(back.matrix() == m);
  CHECK(cli::format_matrix_json(ComplexMatrix::identity(2)) == R"({"dim":2,"kind":"real","entries":[1.0,0.0,0.0,1.0]})");

  const auto code_of = [](const std::string& text) {
    try {
      cli::parse_matrix_json(text);
    } catch (const cli::InputError& e) {
      return static_cast<int>(e.code());
    }
    return 0;
  };
  CHECK(code_of("{") == cli::kParseError);
  CHECK(code_of("[1, 2]") == cli::kParseError);
  CHECK(code_of(R"({"dim": 2, "entries": [1, 0, 0, 1]})") == cli::kParseError);
  CHECK(code_of(R"({"dim": 2, "kind": "quaternion", "entries": [1, 0, 0, 1]})") == cli::kParseError);
  CHECK(code_of(R"({"dim": 2, "kind": "complex", "entries": [1, 0, 0, 1]})") == cli::kParseError);
  CHECK(code_of(R"({"dim": 2, "kind": "real", "entries": [1, 0, 0]})") == cli::kInvalidMatrix);
  CHECK(code_of(R"({"dim": 0, "kind": "real", "entries": []})") == cli::kInvalidMatrix);
}

TEST_CASE("matrix files: csv") {
  const auto f = cli::parse_matrix_csv("0.5, 0.25\n\n 0.5,0.75 \r\n");
  CHECK(f.rows == 2);
  CHECK(f.cols == 2);
  CHECK(f.entries[3].real() == 0.75);
  CHECK_FALSE(f.complex);

  const auto code_of = [](const std::string& text) {
    try {
      cli::parse_matrix_csv(text);
    } catch (const cli::InputError& e) {
      return static_cast<int>(e.code());
    }
    return 0;
  };
  CHECK(code_of("1,2\n3,4,5\n") == cli::kInvalidMatrix);
  CHECK(code_of("1,2,3\n4,5,6\n") == cli::kInvalidMatrix);
  CHECK(code_of("1,x\n3,4\n") == cli::kParseError);
  CHECK(code_of("1,,2\n") == cli::kParseError);
  CHECK(code_of("") == cli::kParseError);
}

TEST_CASE("cli: argument and file errors") {
  CHECK(run_cli({}).code == cli::kParseError);
  CHECK(run_cli({"frobnicate"}).code == cli::kParseError);
  CHECK(run_cli({"bounds", "/nonexistent/t.json"}).code == cli::kParseError);
  CHECK(run_cli({"--help"}).code == cli::kOk);

  const auto dir = scratch("errors");
  const auto t = write_t(dir, "t.json", fixtures::example_t());
  CHECK(run_cli({"coherify", t, "--method", "magic"}).code == cli::kParseError);
  CHECK(run_cli({"bounds", t, "--format", "xml"}).code == cli::kParseError);

  const auto bad = run_cli({"bounds", write(dir / "bad.json", "{\"dim\": 2")});
  CHECK(bad.code == cli::kParseError);
  CHECK(bad.out.empty());
  CHECK(bad.err.find("error:") == 0);
  CHECK(std::count(bad.err.begin(), bad.err.end(), '\n') == 1);

  // Column sums 1.2 and 0.8.
  CHECK(run_cli({"bounds", write(dir / "ns.csv", "0.6,0.4\n0.6,0.4\n")}).code == cli::kInvalidMatrix);
  CHECK(run_cli({"coherify", write(dir / "big.json", cli::format_matrix_json(ComplexMatrix::identity(9)))}).code ==
        cli::kInvalidMatrix);
}

TEST_CASE("cli classify") {
  const auto dir = scratch("classify");
  const auto r = run_cli({"classify", write_t(dir, "half.json", fixtures::half_offdiagonal_t())});
  REQUIRE(r.code == cli::kOk);
  const auto j = r.report();
  CHECK(j["bistochastic"] == true);
  CHECK(j["unistochastic"] == "no");
  CHECK(j["witness_triple"] == json::array({1, 2, 3}));

  const auto q = run_cli({"classify", write(dir / "q.csv", "0.5,0.5\n0.5,0.5\n")}).report();
  CHECK(q["unistochastic"] == "yes");
  const auto u = cli::parse_matrix_json(q["witness_unitary"].dump()).matrix();
  for (const auto& z : u.data()) CHECK(std::abs(std::norm(z) - 0.5) < 1e-12);

  // Not stochastic at all: reported, not rejected.
  const auto ns = run_cli({"classify", write(dir / "ns.csv", "0.6,0.4\n0.6,0.4\n")});
  CHECK(ns.code == cli::kOk);
  CHECK(ns.report()["stochastic"] == false);
  // ... but its transpose is.
  const auto tr = run_cli({"classify", dir / "ns.csv", "--row-stochastic"});
  CHECK(tr.report()["stochastic"] == true);
  CHECK(tr.report()["bistochastic"] == false);

  CHECK(run_cli({"classify", write(dir / "rect.csv", "0.5,0.5,0\n0.5,0.5,1\n")}).code == cli::kInvalidMatrix);
  CHECK(run_cli({"classify", write(dir / "neg.csv", "1.5,-0.5\n-0.5,1.5\n")}).code == cli::kInvalidMatrix);
}

TEST_CASE("cli coherify") {
  const auto dir = scratch("coherify");
  const auto t = write_t(dir, "t.json", fixtures::example_t());
  const auto out_dir = dir / "kraus";
  const auto r = run_cli({"coherify", t, "--method", "c0", "--out", out_dir.string()});
  REQUIRE(r.code == cli::kOk);
  const auto j = r.report();
  CHECK(j["method"] == "c0");
  check_close(as_vector(j["achieved_spectrum"]), {0.5, 0.4, 0.1}, 1e-12);
  REQUIRE(j["kraus_files"].size() == 3);
  std::vector<ComplexMatrix> kraus;
  for (int n = 1; n <= 3; ++n) {
    const auto path = out_dir / ("kraus_" + std::to_string(n) + ".json");
    REQUIRE(fs::exists(path));
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    kraus.push_back(cli::parse_matrix_json(buf.str()).matrix());
  }
  const auto expected = fixtures::example_c0_kraus();
  for (std::size_t n = 0; n < 3; ++n) CHECK(max_abs_diff(kraus[n], expected[n]) < 1e-11);

  // a = 1/3, b = 5/6: row sums 1/2 and 3/2, so the upper vector is
  // (1/2)([1/2, 0] + [1, 1/2]) = [3/4, 1/4], reached by the qubit optimum.
  const auto q = run_cli({"coherify", write_t(dir, "q.json", fixtures::qubit_t(1.0 / 3, 5.0 / 6))}).report();
  CHECK(q["method"] == "qubit_optimal");
  CHECK(q["optimal"] == true);
  check_close(as_vector(q["achieved_spectrum"]), {0.75, 0.25}, 1e-11);

  for (std::size_t d : {2, 3, 4}) {
    const auto id = run_cli({"coherify", write_t(dir, "id.json", TransitionMatrix::identity(d))}).report();
    CHECK(id["method"] == "unistochastic");
    CHECK(std::abs(id["c_e"].get<double>() - std::log2(static_cast<double>(d))) < 1e-11);
    CHECK(id["kraus"].size() == 1);
  }

  const auto mismatch = run_cli({"coherify", t, "--method", "qutrit-cyclic"});
  CHECK(mismatch.code == cli::kMethodPrecondition);
  CHECK(mismatch.err.find("T(1,1)") != std::string::npos);
  CHECK(run_cli({"coherify", t, "--method", "qubit"}).code == cli::kMethodPrecondition);
  CHECK(run_cli({"coherify", t, "--method", "unistochastic"}).code == cli::kMethodPrecondition);
  CHECK(run_cli({"coherify", t, "--method", "qutrit"}).code == cli::kMethodPrecondition);
  const auto half = write_t(dir, "half.json", fixtures::half_offdiagonal_t());
  CHECK(run_cli({"coherify", half, "--method", "qutrit"}).report()["method"] == "qutrit_cyclic");
}

TEST_CASE("cli bounds") {
  const auto dir = scratch("bounds");
  const auto j = run_cli({"bounds", write_t(dir, "t.json", fixtures::example_t())}).report();
  check_close(as_vector(j["mu_upper"]), {0.8, 0.2}, 1e-12);
  check_close(as_vector(j["mu_lower"]), {0.5, 0.4, 0.1}, 1e-12);
  CHECK(j["mu_upper"].size() == 9);
  CHECK(j["bistochastic"] == false);
  CHECK_FALSE(j.contains("polygon"));

  const auto h = run_cli({"bounds", write_t(dir, "half.json", fixtures::half_offdiagonal_t())}).report();
  REQUIRE(h.contains("polygon"));
  check_close(as_vector(h["polygon"]["majorization_upper"]), {0.5, 0.5}, 1e-12);
  // One defined pair per row, the two off-diagonal entries.
  CHECK(h["polygon"]["alphas"].size() == 3);

  const auto w = run_cli({"bounds", write_t(dir, "w.json", TransitionMatrix::flat(4))}).report();
  check_close(as_vector(w["mu_upper"]), {1.0}, 1e-12);
  CHECK(w["unistochastic"] == "yes");
  CHECK(w["complete_coherification_possible"] == true);

  // Row-stochastic input is the transpose of the same channel's T.
  const auto rs = run_cli({"bounds", write(dir / "rs.csv", "0.7,0.1,0.2\n0.2,0.6,0.2\n0.6,0.4,0.0\n"),
                           "--row-stochastic"});
  CHECK(rs.report()["mu_upper"] == j["mu_upper"]);
  CHECK(rs.report()["mu_lower"] == j["mu_lower"]);
}

TEST_CASE("cli diagnose") {
  const auto dir = scratch("diagnose");
  const auto id = run_cli({"diagnose", write(dir / "id.json", cli::format_matrix_json(ComplexMatrix::identity(3)))});
  REQUIRE(id.code == cli::kOk);
  CHECK(std::abs(id.report()["unitarity"].get<double>() - 1.0) < 1e-11);
  CHECK(std::abs(id.report()["c_e"].get<double>() - std::log2(3.0)) < 1e-11);

  // Qubit optimum: path probabilities are Tr(K K^dagger)/d of the written operators.
  const auto out_dir = dir / "q";
  run_cli({"coherify", write_t(dir, "q.json", fixtures::qubit_t(1.0 / 3, 5.0 / 6)), "--out", out_dir.string()});
  std::vector<std::string> args{"diagnose"};
  std::vector<double> expected;
  for (const auto& e : fs::directory_iterator(out_dir)) args.push_back(e.path().string());
  std::sort(args.begin() + 1, args.end());
  for (std::size_t n = 1; n < args.size(); ++n) {
    std::ifstream in(args[n]);
    std::stringstream buf;
    buf << in.rdbuf();
    const auto k = cli::parse_matrix_json(buf.str()).matrix();
    expected.push_back((k * k.adjoint()).trace().real() / 2.0);
  }
  std::sort(expected.rbegin(), expected.rend());
  const auto q = run_cli(args);
  REQUIRE(q.code == cli::kOk);
  check_close(as_vector(q.report()["path_distribution"]), expected, 1e-11);
  check_close(as_vector(q.report()["path_distribution"]), {0.75, 0.25}, 1e-11);

  std::vector<std::string> c0{"diagnose"};
  int n = 0;
  for (const auto& k : fixtures::example_c0_kraus()) {
    c0.push_back(write(dir / ("c0_" + std::to_string(n++) + ".json"), cli::format_matrix_json(k)));
  }
  const auto c = run_cli(c0).report();
  const auto action = cli::parse_matrix_json(c["classical_action"].dump()).matrix();
  CHECK(max_abs_diff(action, fixtures::example_t().as_matrix()) < 1e-11);
  for (const auto& [name, ok] : c["checks"].items()) CHECK_MESSAGE(ok == true, name);

  const auto bad = write(dir / "bad.json", R"({"dim": 2, "kind": "real", "entries": [1, 0, 0, 0.5]})");
  CHECK(run_cli({"diagnose", bad}).code == cli::kNotTracePreserving);
  CHECK(run_cli({"diagnose", c0[1], dir / "id.json"}).code == cli::kNotTracePreserving);
  const auto two = write(dir / "two.json", cli::format_matrix_json(ComplexMatrix::identity(2)));
  CHECK(run_cli({"diagnose", c0[1], two}).code == cli::kInvalidMatrix);
}

TEST_CASE("cli validate") {
  const auto dir = scratch("validate");
  const auto t = write_t(dir, "t.json", fixtures::example_t());
  const auto a = run_cli({"validate", t, "--samples", "100", "--seed", "7", "--restarts", "3"});
  REQUIRE(a.code == cli::kOk);
  const auto j = a.report();
  CHECK(j["violations"] == 0);
  const double best = j["best_purity"].get<double>();
  CHECK(best >= 0.42);
  CHECK(best <= 0.68);
  for (const auto& [name, f] : j["violation_fraction"].items()) CHECK_MESSAGE(f == 0.0, name);

  const auto b = run_cli({"validate", t, "--samples", "100", "--seed", "7", "--restarts", "3"});
  CHECK(a.out == b.out);
  const auto other = run_cli({"validate", t, "--samples", "100", "--seed", "8", "--restarts", "3"});
  CHECK(other.out != a.out);

  const auto h = run_cli({"validate", write_t(dir, "half.json", fixtures::half_offdiagonal_t()), "--samples", "100"});
  REQUIRE(h.code == cli::kOk);
  CHECK(h.report()["violation_fraction"]["polygon_majorization_upper"] == 0.0);

  const auto id = run_cli({"validate", write_t(dir, "id.json", TransitionMatrix::identity(3)), "--samples", "20"});
  REQUIRE(id.code == cli::kOk);
  CHECK(std::abs(id.report()["best_purity"].get<double>() - 1.0) < 1e-4);
}
