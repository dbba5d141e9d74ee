#include "coherify/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <tuple>

#include "coherify/bounds.hpp"
#include "coherify/channel.hpp"
#include "coherify/coherification.hpp"
#include "coherify/diagnostics.hpp"
#include "coherify/error.hpp"
#include "coherify/oracle.hpp"
#include "coherify/stochastic.hpp"

namespace coherify::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::size_t kMaxChannelDim = 8;
constexpr double kKrausTolerance = 1e-7;
constexpr double kCheckSlack = 1e-9;

// 12 significant digits, so reports do not depend on the last bits of
// floating-point noise.
double round12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

Json number(double v) { return round12(v); }

Json numbers(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

Json matrix_json(const ComplexMatrix& m) {
  const bool is_real = std::all_of(m.data().begin(), m.data().end(), [](Complex z) { return z.imag() == 0.0; });
  Json entries = Json::array();
  for (Complex z : m.data()) {
    if (is_real) {
      entries.push_back(number(z.real()));
    } else {
      entries.push_back(Json::array({number(z.real()), number(z.imag())}));
    }
  }
  Json out;
  out["dim"] = m.rows();
  out["kind"] = is_real ? "real" : "complex";
  out["entries"] = std::move(entries);
  return out;
}

Json transition_json(const TransitionMatrix& t) { return matrix_json(t.as_matrix()); }

Json interval_json(const Interval& i) { return Json::array({number(i.lower), number(i.upper)}); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(kParseError, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool ends_with_csv(const std::string& path) {
  const auto ext = std::filesystem::path(path).extension().string();
  return ext == ".csv" || ext == ".CSV";
}

MatrixFile load_matrix(const std::string& path, const std::string& format) {
  const auto text = read_file(path);
  const bool csv = format.empty() ? ends_with_csv(path) : format == "csv";
  try {
    return csv ? parse_matrix_csv(text) : parse_matrix_json(text);
  } catch (const InputError& e) {
    throw InputError(e.code(), path + ": " + e.what());
  }
}

TransitionMatrix to_transition(const MatrixFile& f, bool row_stochastic) {
  if (f.complex) throw InputError(kInvalidMatrix, "transition matrix must be real");
  if (f.rows != f.cols || f.rows == 0) throw InputError(kInvalidMatrix, "transition matrix is not square");
  const std::size_t d = f.rows;
  std::vector<double> t(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      t[i * d + j] = row_stochastic ? f.entries[j * d + i].real() : f.entries[i * d + j].real();
    }
  }
  return {d, std::move(t)};
}

void require_channel_dim(std::size_t d) {
  if (d > kMaxChannelDim) {
    throw InputError(kInvalidMatrix, "dimension " + std::to_string(d) + " exceeds " + std::to_string(kMaxChannelDim));
  }
}

Json triple_json(const AlphaTriple& a) {
  // One-based, matching the usual matrix notation.
  return Json::array({a.i + 1, a.k + 1, a.l + 1});
}

struct Options {
  std::string format;
  bool row_stochastic = false;
  std::uint64_t seed = 42;
  std::string method = "auto";
  std::string out_dir;
  std::size_t samples = 1000;
  int restarts = 8;
  std::vector<std::string> inputs;
};

Json cmd_classify(const Options& o) {
  const auto f = load_matrix(o.inputs.front(), o.format);
  if (f.complex) throw InputError(kInvalidMatrix, "transition matrix must be real");
  if (f.rows != f.cols || f.rows == 0) throw InputError(kInvalidMatrix, "matrix is not square");
  const std::size_t d = f.rows;
  std::vector<double> raw(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      raw[i * d + j] = o.row_stochastic ? f.entries[j * d + i].real() : f.entries[i * d + j].real();
    }
  }
  PhaseSearchConfig cfg;
  cfg.seed = o.seed;
  const auto c = classify_raw(d, raw, cfg);

  Json r;
  r["command"] = "classify";
  r["dim"] = d;
  r["stochastic"] = c.is_stochastic;
  r["bistochastic"] = c.is_bistochastic;
  r["unistochastic"] = std::string(to_string(c.unistochastic));
  if (c.witness_unitary) r["witness_unitary"] = matrix_json(*c.witness_unitary);
  if (c.witness_triple) {
    r["witness_triple"] = triple_json(*c.witness_triple);
    r["witness_alpha"] = number(c.witness_triple->alpha);
  }
  return r;
}

CoherificationResult run_method(const TransitionMatrix& t, const std::string& method) {
  if (method == "auto") return coherify_auto(t);
  if (method == "c0") return coherify_c0(t);
  if (method == "qubit") return coherify_qubit(t);
  if (method == "unistochastic") return coherify_unistochastic(t);
  if (method == "qutrit") {
    if (t.dim() != 3) throw Error(ErrorKind::DimensionMismatch, "qutrit methods need d = 3");
    const auto family = detect_qutrit_family(t);
    if (!family) throw Error(ErrorKind::FamilyMismatch, "T matches no solved qutrit family");
    return coherify_qutrit(t, *family);
  }
  if (method == "qutrit-cyclic") return coherify_qutrit(t, QutritFamily::Cyclic);
  if (method == "qutrit-single-row") return coherify_qutrit(t, QutritFamily::SingleRow);
  if (method == "qutrit-double-row") return coherify_qutrit(t, QutritFamily::DoubleRow);
  throw InputError(kParseError, "unknown method " + method);
}

Json cmd_coherify(const Options& o) {
  const auto t = to_transition(load_matrix(o.inputs.front(), o.format), o.row_stochastic);
  require_channel_dim(t.dim());
  const auto res = [&] {
    try {
      return run_method(t, o.method);
    } catch (const Error& e) {
      // A forced method that cannot run on this T.
      if (o.method != "auto") throw InputError(kMethodPrecondition, e.what());
      throw;
    }
  }();

  Json kraus = Json::array();
  for (const auto& k : res.kraus) kraus.push_back(matrix_json(k));

  Json r;
  r["command"] = "coherify";
  r["dim"] = t.dim();
  r["method"] = std::string(to_string(res.method));
  r["optimal"] = res.optimal;
  r["achieved_spectrum"] = numbers(res.achieved_spectrum);
  r["mu_upper"] = numbers(mu_upper(t));
  r["purity"] = number(channel_purity(res.channel));
  r["c_e"] = number(channel_coherence_entropic(res.channel));
  r["c_2"] = number(channel_coherence_2norm(res.channel));
  r["classical_action"] = transition_json(classical_action(res.channel));
  r["kraus"] = std::move(kraus);

  if (!o.out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(o.out_dir, ec);
    Json files = Json::array();
    for (std::size_t n = 0; n < res.kraus.size(); ++n) {
      const auto path = (std::filesystem::path(o.out_dir) / ("kraus_" + std::to_string(n + 1) + ".json")).string();
      std::ofstream f(path, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + path);
      f << format_matrix_json(res.kraus[n]) << '\n';
      files.push_back(path);
    }
    r["kraus_files"] = std::move(files);
  }
  return r;
}

Json cmd_bounds(const Options& o) {
  const auto t = to_transition(load_matrix(o.inputs.front(), o.format), o.row_stochastic);
  const auto b = bound_report(t);
  const auto c = classify(t, PhaseSearchConfig{.seed = o.seed});

  Json r;
  r["command"] = "bounds";
  r["dim"] = t.dim();
  r["bistochastic"] = t.is_bistochastic();
  r["unistochastic"] = std::string(to_string(c.unistochastic));
  r["complete_coherification_possible"] = c.unistochastic == Unistochastic::Yes;
  r["mu_upper"] = numbers(b.mu_upper);
  r["mu_lower"] = numbers(b.mu_lower);
  r["purity_range"] = Json::array({number(std::inner_product(b.mu_lower.begin(), b.mu_lower.end(), b.mu_lower.begin(), 0.0)),
                                   number(std::inner_product(b.mu_upper.begin(), b.mu_upper.end(), b.mu_upper.begin(), 0.0))});
  r["c_e_range"] = interval_json(b.c_e_range);
  r["c_2_range"] = interval_json(b.c_2_range);
  if (b.polygon) {
    const auto acc = polygon_report(t, PolygonMode::Accumulate);
    Json alphas = Json::array();
    for (const auto& a : b.polygon->alphas) {
      Json e;
      e["triple"] = triple_json(a);
      e["alpha"] = number(a.alpha);
      alphas.push_back(std::move(e));
    }
    Json p;
    p["alphas"] = std::move(alphas);
    p["purity_upper"] = number(b.polygon->purity_upper);
    p["purity_upper_accumulated"] = number(acc.purity_upper);
    p["majorization_upper"] = numbers(b.polygon->majorization_upper);
    r["polygon"] = std::move(p);
  }
  return r;
}

// Returns the report and whether every bound check held.
std::pair<Json, bool> cmd_diagnose(const Options& o) {
  std::vector<ComplexMatrix> kraus;
  for (const auto& path : o.inputs) {
    const auto f = load_matrix(path, o.format);
    if (f.rows != f.cols || f.rows == 0) throw InputError(kInvalidMatrix, path + ": Kraus operator is not square");
    if (!kraus.empty() && f.rows != kraus.front().rows()) {
      throw InputError(kInvalidMatrix, path + ": Kraus operators differ in size");
    }
    require_channel_dim(f.rows);
    kraus.push_back(f.matrix());
  }
  const auto ch = Channel::from_kraus(kraus, kKrausTolerance);
  const auto t = classical_action(ch);
  const auto diag = diagnose(ch);
  const auto rel = purity_relations(ch);
  const auto split = c2_split(ch);
  const double gamma = channel_purity(ch);
  const auto& lambda = ch.jamiolkowski().spectrum();

  Json checks;
  checks["mu_upper_majorizes_spectrum"] = majorizes(mu_upper(t), lambda, kCheckSlack);
  checks["theorem1_majorizes_spectrum"] = majorizes(theorem1_bound(ch.jamiolkowski()), lambda, kCheckSlack);
  checks["unitarity_upper"] = diag.unitarity <= rel.unitarity_upper + kCheckSlack;
  checks["output_purity_lower"] = diag.avg_output_purity >= rel.output_purity_lower - kCheckSlack;
  checks["maxmixed_lower"] = diag.maxmixed_output_purity >= rel.maxmixed_lower - kCheckSlack;
  bool all = true;
  for (const auto& [name, ok] : checks.items()) all = all && ok.get<bool>();

  Json r;
  r["command"] = "diagnose";
  r["dim"] = ch.dim();
  r["kraus_count"] = kraus.size();
  r["entropy"] = number(channel_entropy(ch));
  r["purity"] = number(gamma);
  r["c_e"] = number(channel_coherence_entropic(ch));
  r["c_2"] = number(channel_coherence_2norm(ch));
  r["c_2_split"] = {{"diagonal_blocks", number(split.diagonal_blocks)},
                    {"coherence_blocks", number(split.coherence_blocks)}};
  r["classical_action"] = transition_json(t);
  r["path_distribution"] = numbers(diag.path_distribution);
  r["unitarity"] = number(diag.unitarity);
  r["avg_output_purity"] = number(diag.avg_output_purity);
  r["maxmixed_output_purity"] = number(diag.maxmixed_output_purity);
  r["unitarity_upper_from_purity"] = number(diag.unitarity_upper_from_purity);
  r["output_purity_lower_from_purity"] = number(diag.output_purity_lower_from_purity);
  r["maxmixed_lower"] = number(diag.maxmixed_lower);
  r["checks"] = std::move(checks);
  return {std::move(r), all};
}

std::pair<Json, bool> cmd_validate(const Options& o) {
  const auto t = to_transition(load_matrix(o.inputs.front(), o.format), o.row_stochastic);
  require_channel_dim(t.dim());
  const auto upper = mu_upper(t);
  const auto lower = mu_lower(t);
  const double purity_lo = std::inner_product(lower.begin(), lower.end(), lower.begin(), 0.0);
  const double purity_hi = std::inner_product(upper.begin(), upper.end(), upper.begin(), 0.0);
  std::optional<PolygonRecord> polygon;
  if (t.is_bistochastic()) polygon = polygon_report(t, PolygonMode::Accumulate);

  OracleConfig cfg;
  cfg.seed = o.seed;
  cfg.restarts = o.restarts;
  cfg.step_size = 0.25;

  std::size_t bad_action = 0, bad_mu = 0, bad_theorem1 = 0, bad_purity = 0, bad_poly_purity = 0, bad_poly_major = 0;
  double best_sampled = 0.0;
  const auto samples = sample_fixed_action(t, o.samples, cfg);
  for (const auto& ch : samples) {
    const auto& lambda = ch.jamiolkowski().spectrum();
    const double gamma = channel_purity(ch);
    best_sampled = std::max(best_sampled, gamma);
    if (max_abs_diff(classical_action(ch), t) > 1e-6) ++bad_action;
    if (!majorizes(upper, lambda, kCheckSlack)) ++bad_mu;
    if (!majorizes(theorem1_bound(ch.jamiolkowski()), lambda, kCheckSlack)) ++bad_theorem1;
    if (gamma > purity_hi + kCheckSlack) ++bad_purity;
    if (polygon) {
      if (gamma > polygon->purity_upper + kCheckSlack) ++bad_poly_purity;
      if (!majorizes(polygon->majorization_upper, lambda, kCheckSlack)) ++bad_poly_major;
    }
  }

  const auto best = maximize_purity(t, cfg);
  const double best_purity = std::max(best.purity, best_sampled);
  const bool in_bracket = best_purity >= purity_lo - kCheckSlack && best_purity <= purity_hi + kCheckSlack &&
                          (!polygon || best_purity <= polygon->purity_upper + kCheckSlack);

  const double n = samples.empty() ? 1.0 : static_cast<double>(samples.size());
  Json frac;
  frac["classical_action"] = number(bad_action / n);
  frac["mu_upper"] = number(bad_mu / n);
  frac["theorem1"] = number(bad_theorem1 / n);
  frac["purity_upper"] = number(bad_purity / n);
  if (polygon) {
    frac["polygon_purity_upper"] = number(bad_poly_purity / n);
    frac["polygon_majorization_upper"] = number(bad_poly_major / n);
  }
  const std::size_t violations = bad_action + bad_mu + bad_theorem1 + bad_purity + bad_poly_purity + bad_poly_major;

  Json r;
  r["command"] = "validate";
  r["dim"] = t.dim();
  r["seed"] = o.seed;
  r["samples"] = samples.size();
  r["restarts"] = o.restarts;
  r["violations"] = violations;
  r["violation_fraction"] = std::move(frac);
  r["purity_bracket"] = Json::array({number(purity_lo), number(purity_hi)});
  if (polygon) r["polygon_purity_upper"] = number(polygon->purity_upper);
  r["max_sampled_purity"] = number(best_sampled);
  r["maximized_purity"] = number(best.purity);
  r["best_purity"] = number(best_purity);
  r["best_purity_in_bracket"] = in_bracket;
  return {std::move(r), violations == 0 && in_bracket};
}

ExitCode code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidTransitionMatrix:
    case ErrorKind::InvalidState:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::NotHermitian: return kInvalidMatrix;
    case ErrorKind::NotUnistochastic:
    case ErrorKind::FamilyMismatch:
    case ErrorKind::NotBistochastic: return kMethodPrecondition;
    case ErrorKind::NotTracePreserving: return kNotTracePreserving;
    default: return kFailure;
  }
}

void add_common(CLI::App* cmd, Options& o, bool many_inputs) {
  if (many_inputs) {
    cmd->add_option("inputs", o.inputs, "Matrix files")->required();
  } else {
    cmd->add_option("input", o.inputs, "Matrix file")->required()->expected(1);
  }
  cmd->add_option("--format", o.format, "Input format, default from the file extension")
      ->check(CLI::IsMember({"json", "csv"}));
}

void add_transition(CLI::App* cmd, Options& o) {
  add_common(cmd, o, false);
  cmd->add_flag("--row-stochastic", o.row_stochastic, "Input rows sum to 1; transpose on read");
}

}  // namespace

MatrixFile parse_matrix_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(kParseError, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError(kParseError, "expected a JSON object");
  for (const char* key : {"dim", "kind", "entries"}) {
    if (!j.contains(key)) throw InputError(kParseError, std::string("missing field \"") + key + "\"");
  }
  if (!j["dim"].is_number_unsigned()) throw InputError(kParseError, "\"dim\" must be a non-negative integer");
  if (!j["kind"].is_string()) throw InputError(kParseError, "\"kind\" must be a string");
  if (!j["entries"].is_array()) throw InputError(kParseError, "\"entries\" must be an array");
  const auto kind = j["kind"].get<std::string>();
  if (kind != "real" && kind != "complex") throw InputError(kParseError, "\"kind\" must be \"real\" or \"complex\"");

  MatrixFile f;
  f.rows = f.cols = j["dim"].get<std::size_t>();
  f.complex = kind == "complex";
  for (const auto& e : j["entries"]) {
    if (f.complex) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        throw InputError(kParseError, "complex entries must be [re, im] pairs");
      }
      f.entries.emplace_back(e[0].get<double>(), e[1].get<double>());
    } else {
      if (!e.is_number()) throw InputError(kParseError, "real entries must be numbers");
      f.entries.emplace_back(e.get<double>(), 0.0);
    }
  }
  if (f.rows == 0) throw InputError(kInvalidMatrix, "dimension is 0");
  if (f.entries.size() != f.rows * f.cols) {
    throw InputError(kInvalidMatrix, std::to_string(f.entries.size()) + " entries for dim " + std::to_string(f.rows));
  }
  return f;
}

MatrixFile parse_matrix_csv(std::string_view text) {
  MatrixFile f;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    std::size_t cells = 0;
    while (true) {
      const auto comma = line.find(',');
      auto cell = line.substr(0, comma);
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      cell = b == std::string_view::npos ? std::string_view{} : cell.substr(b, e - b + 1);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw InputError(kParseError, "line " + std::to_string(line_no) + ": \"" + std::string(cell) + "\" is not a number");
      }
      f.entries.emplace_back(v, 0.0);
      ++cells;
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }
    if (f.rows == 0) {
      f.cols = cells;
    } else if (cells != f.cols) {
      throw InputError(kInvalidMatrix, "line " + std::to_string(line_no) + " has " + std::to_string(cells) +
                                           " entries, expected " + std::to_string(f.cols));
    }
    ++f.rows;
  }
  if (f.rows == 0) throw InputError(kParseError, "empty CSV");
  if (f.rows != f.cols) {
    throw InputError(kInvalidMatrix, std::to_string(f.rows) + " x " + std::to_string(f.cols) + " matrix is not square");
  }
  return f;
}

std::string format_matrix_json(const ComplexMatrix& m) { return matrix_json(m).dump(); }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Coherence of quantum channels with a fixed classical action", "coherify"};
  app.require_subcommand(1);

  auto* classify_cmd = app.add_subcommand("classify", "Stochastic, bistochastic and unistochastic verdicts");
  add_transition(classify_cmd, o);
  classify_cmd->add_option("--seed", o.seed, "Seed for the d >= 4 phase search");

  auto* coherify_cmd = app.add_subcommand("coherify", "Build a coherified channel for T");
  add_transition(coherify_cmd, o);
  coherify_cmd
      ->add_option("--method", o.method,
                   "auto, c0, qubit, unistochastic, qutrit, qutrit-cyclic, qutrit-single-row or qutrit-double-row")
      ->check(CLI::IsMember({"auto", "c0", "qubit", "unistochastic", "qutrit", "qutrit-cyclic", "qutrit-single-row",
                             "qutrit-double-row"}));
  coherify_cmd->add_option("--out", o.out_dir, "Directory for kraus_N.json files");

  auto* bounds_cmd = app.add_subcommand("bounds", "Spectrum, purity and coherence bounds for T");
  add_transition(bounds_cmd, o);
  bounds_cmd->add_option("--seed", o.seed, "Seed for the d >= 4 phase search");

  auto* diagnose_cmd = app.add_subcommand("diagnose", "Coherence and purity measures of a Kraus set");
  add_common(diagnose_cmd, o, true);

  auto* validate_cmd = app.add_subcommand("validate", "Check the bounds against sampled channels");
  add_transition(validate_cmd, o);
  validate_cmd->add_option("--samples", o.samples, "Number of sampled channels");
  validate_cmd->add_option("--seed", o.seed, "Oracle seed");
  validate_cmd->add_option("--restarts", o.restarts, "Purity ascent restarts")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParseError;
  }

  try {
    Json report;
    bool ok = true;
    if (*classify_cmd) {
      report = cmd_classify(o);
    } else if (*coherify_cmd) {
      report = cmd_coherify(o);
    } else if (*bounds_cmd) {
      report = cmd_bounds(o);
    } else if (*diagnose_cmd) {
      std::tie(report, ok) = cmd_diagnose(o);
    } else {
      std::tie(report, ok) = cmd_validate(o);
    }
    out << report.dump(2) << '\n';
    if (!ok) {
      err << "error: bound violation, see report\n";
      return kBoundViolation;
    }
    return kOk;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return e.code();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace coherify::cli
