#include "consensus/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "consensus/digraph.hpp"
#include "consensus/errors.hpp"
#include "consensus/limits.hpp"
#include "consensus/verification.hpp"

namespace consensus::cli {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& message) { throw Error(Errc::ValidationError, message); }

// 12 significant digits; -0 prints as 0.
json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

// Report data: rounding noise below kChop prints as 0.
constexpr double kChop = 1e-12;

json datum(double v) { return number(std::abs(v) < kChop ? 0.0 : v); }

json vector_json(std::span<const double> v) {
  json out = json::array();
  for (double x : v) out.push_back(datum(x));
  return out;
}

json matrix_json(const DenseMatrix& m) {
  json out = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) out.push_back(vector_json(m.row(r)));
  return out;
}

json agents_json(std::span<const std::size_t> vertices) {
  json out = json::array();
  for (std::size_t v : vertices) out.push_back(v + 1);
  return out;
}

const char* mode_name(PreequalizationMode mode) {
  return mode == PreequalizationMode::Orthogonal ? "orthogonal" : "tilde";
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

double require_number(const json& j, const std::string& where) {
  if (!j.is_number()) invalid(where + " must be a number");
  return j.get<double>();
}

Vector parse_vector(const json& j, const std::string& where) {
  if (!j.is_array()) invalid(where + " must be an array of numbers");
  Vector out;
  for (std::size_t k = 0; k < j.size(); ++k)
    out.push_back(require_number(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

ToleranceConfig parse_tolerance(const json& root) {
  ToleranceConfig tol;
  if (!root.contains("tolerance")) return tol;
  const json& t = root["tolerance"];
  if (!t.is_object()) invalid("tolerance must be an object");
  for (const auto& [key, value] : t.items()) {
    if (key == "zero_tol") {
      tol.zero_tol = require_number(value, "tolerance.zero_tol");
    } else if (key == "conv_tol") {
      tol.conv_tol = require_number(value, "tolerance.conv_tol");
    } else if (key == "max_iter") {
      if (!value.is_number_unsigned()) invalid("tolerance.max_iter must be a non-negative integer");
      tol.max_iter = value.get<std::size_t>();
    } else {
      invalid("unknown tolerance field '" + key + "'");
    }
  }
  tol.validate();
  return tol;
}

ToleranceConfig effective_tolerance(const InputDocument& doc, const Flags& flags) {
  ToleranceConfig tol = doc.tolerance;
  if (flags.tolerance) tol.conv_tol = *flags.tolerance;
  if (flags.max_iter) tol.max_iter = *flags.max_iter;
  tol.validate();
  return tol;
}

json tolerance_json(const ToleranceConfig& tol) {
  return {{"zero_tol", number(tol.zero_tol)},
          {"conv_tol", number(tol.conv_tol)},
          {"max_iter", tol.max_iter}};
}

json analysis_json(const ConsensusAnalysis& a, const InputDocument& doc, const ToleranceConfig& tol,
                   const Flags& flags) {
  const auto& d = a.decomposition;
  json report;
  report["agents"] = a.size();
  if (!doc.labels.empty()) report["labels"] = doc.labels;
  report["tolerance"] = tolerance_json(tol);
  report["spectral_class"] = spectral_kind_name(a.spectral.kind);
  report["nu"] = d.nu;
  report["b"] = d.b;

  json classes = json::array();
  for (std::size_t c = 0; c < d.classes.size(); ++c) {
    json cls{{"index", c + 1}, {"agents", agents_json(d.classes[c])}, {"basic", bool(d.is_basic[c])}};
    if (d.is_basic[c]) {
      const auto& tw = a.trees.classes[c];
      cls["period"] = a.spectral.periods[c];
      cls["stationary"] = vector_json(a.class_stationary[c]);
      cls["beta"] = datum(a.beta[c]);
      cls["trees"] = {{"per_root", vector_json(tw.per_root)},
                      {"total", datum(tw.total)},
                      {"w", datum(tw.w)},
                      {"source", a.tree_sources[c] == TreeWeightSource::Enumeration ? "enumeration"
                                                                                     : "cofactors"}};
    }
    classes.push_back(std::move(cls));
  }
  report["classes"] = std::move(classes);

  report["power_limit"] = {{"method", limit_method_name(a.p_inf.method)},
                           {"matrix", matrix_json(a.p_inf.matrix)}};
  report["region_basis"] = {{"matrix", matrix_json(a.basis.u)},
                            {"deleted_columns", agents_json(a.basis.deleted_columns)}};
  report["projector"] = matrix_json(a.s.s);
  report["projector_tilde"] = matrix_json(a.s_tilde);
  report["regularized_limit"] = matrix_json(a.p_hat);
  report["alpha"] = vector_json(a.alpha);
  report["beta"] = vector_json(a.beta);

  if (flags.tau) {
    const DenseMatrix r = resolvent(a.kirchhoff, *flags.tau, tol);
    report["resolvent_probe"] = {{"tau", number(*flags.tau)},
                                 {"matrix", matrix_json(r)},
                                 {"distance_to_limit", number(max_abs_diff(r, a.p_inf.matrix))}};
  }
  return report;
}

json checks_json(const std::string& name, std::size_t n, const std::vector<CheckResult>& checks) {
  json list = json::array();
  std::size_t pass = 0, fail = 0, skipped = 0;
  for (const auto& c : checks) {
    switch (c.status) {
      case CheckStatus::Pass: ++pass; break;
      case CheckStatus::Fail: ++fail; break;
      case CheckStatus::Skipped: ++skipped; break;
    }
    json entry{{"name", c.name},
               {"status", check_status_name(c.status)},
               {"value", number(c.value)},
               {"threshold", number(c.threshold)}};
    if (!c.detail.empty()) entry["detail"] = c.detail;
    list.push_back(std::move(entry));
  }
  return {{"name", name},
          {"agents", n},
          {"passed", fail == 0},
          {"summary", {{"pass", pass}, {"fail", fail}, {"skipped", skipped}}},
          {"checks", std::move(list)}};
}

VerifyOptions verify_options(const Flags& flags) {
  VerifyOptions options;
  if (flags.oracle_cap) options.class_cap = options.forest_cap = *flags.oracle_cap;
  return options;
}

Output verify_fixtures(const std::vector<std::pair<std::string, StochasticMatrix>>& fixtures,
                       const ToleranceConfig& tol, const Flags& flags) {
  json report{{"command", "verify"}, {"tolerance", tolerance_json(tol)}};
  json list = json::array();
  bool passed = true;
  for (const auto& [name, p] : fixtures) {
    const auto checks = verify_matrix(p, tol, verify_options(flags));
    passed = passed && all_passed(checks);
    list.push_back(checks_json(name, p.size(), checks));
  }
  report["fixtures"] = std::move(list);
  report["passed"] = passed;
  return {dump(report), passed ? kSuccess : kVerificationFailed};
}

}  // namespace

InputDocument parse_input(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports a byte offset; recover line and column from it.
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t k = 0; k < end; ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(line, column, e.what());
  }
  if (!root.is_object()) invalid("top level must be an object");
  for (const auto& [key, value] : root.items()) {
    (void)value;
    if (key != "matrix" && key != "labels" && key != "initial_opinions" && key != "tolerance")
      invalid("unknown field '" + key + "'");
  }
  if (!root.contains("matrix")) invalid("missing field 'matrix'");

  const json& rows = root["matrix"];
  if (!rows.is_array() || rows.empty()) invalid("matrix must be a non-empty array of rows");
  const std::size_t n = rows.size();
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector row = parse_vector(rows[i], "matrix[" + std::to_string(i) + "]");
    if (row.size() != n)
      invalid("matrix is not square: row " + std::to_string(i + 1) + " has " +
              std::to_string(row.size()) + " entries, expected " + std::to_string(n));
    for (std::size_t j = 0; j < n; ++j) m(i, j) = row[j];
  }

  const ToleranceConfig tol = parse_tolerance(root);
  InputDocument doc{validate_stochastic(m, tol), {}, std::nullopt, tol};

  if (root.contains("labels")) {
    const json& labels = root["labels"];
    if (!labels.is_array()) invalid("labels must be an array of strings");
    for (const json& l : labels) {
      if (!l.is_string()) invalid("labels must be an array of strings");
      doc.labels.push_back(l.get<std::string>());
    }
    if (doc.labels.size() != n)
      invalid("labels has " + std::to_string(doc.labels.size()) + " entries, expected " + std::to_string(n));
  }
  if (root.contains("initial_opinions")) {
    Vector s0 = parse_vector(root["initial_opinions"], "initial_opinions");
    if (s0.size() != n)
      invalid("initial_opinions has " + std::to_string(s0.size()) + " entries, expected " + std::to_string(n));
    doc.initial_opinions = std::move(s0);
  }
  return doc;
}

InputDocument load_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) invalid("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_input(buf.str());
}

Output execute(Command command, const InputDocument& doc, const Flags& flags) {
  const ToleranceConfig tol = effective_tolerance(doc, flags);
  const std::size_t cap = flags.oracle_cap.value_or(oracle::kDefaultClassCap);

  switch (command) {
    case Command::ExportDot: {
      const auto [graph, kirchhoff] = build(doc.matrix, tol);
      return {export_dot(graph, decompose(graph), doc.labels), kSuccess};
    }
    case Command::Verify:
      return verify_fixtures({{"input", doc.matrix}}, tol, flags);
    case Command::Analyze: {
      const ConsensusAnalysis a = analyze(doc.matrix, tol, cap);
      json report = analysis_json(a, doc, tol, flags);
      report["command"] = "analyze";
      return {dump(report), kSuccess};
    }
    case Command::Simulate: {
      if (!doc.initial_opinions) throw Error(Errc::MissingOpinions, "simulate needs initial_opinions");
      const ConsensusAnalysis a = analyze(doc.matrix, tol, cap);
      const Vector& s0 = *doc.initial_opinions;
      const OpinionTrajectory traj = simulate(doc.matrix, a, s0, tol, flags.mode);
      json report = analysis_json(a, doc, tol, flags);
      report["command"] = "simulate";
      report["trajectory"] = {{"mode", mode_name(flags.mode)},
                              {"initial", vector_json(traj.initial)},
                              {"preequalized", vector_json(traj.states.front())},
                              {"final_state", vector_json(traj.states.back())},
                              {"steps", traj.converged_at},
                              {"consensus", datum(traj.consensus)},
                              {"predicted_consensus", datum(consensus_value(a, s0))},
                              {"ignored_by_alpha", agents_json(a.decomposition.nonbasic_vertices())}};
      return {dump(report), kSuccess};
    }
  }
  invalid("unknown command");
}

Output execute_builtin_verify(const Flags& flags) {
  ToleranceConfig tol;
  if (flags.tolerance) tol.conv_tol = *flags.tolerance;
  if (flags.max_iter) tol.max_iter = *flags.max_iter;
  tol.validate();
  return verify_fixtures({{"example_seven_agents", validate_stochastic(example_seven_agents(), tol)},
                          {"example_five_basic_agents", validate_stochastic(example_five_basic_agents(), tol)}},
                         tol, flags);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Consensus analysis of row-stochastic influence matrices", "consensus"};
  app.require_subcommand(1);

  Flags flags;
  std::string input;
  std::string output;
  std::string mode = "orthogonal";
  bool builtin = false;

  auto add_common = [&](CLI::App* sub, bool input_required) {
    auto* in = sub->add_option("input", input, "Input JSON file");
    if (input_required) in->required();
    sub->add_option("--tolerance", flags.tolerance, "Convergence tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--max-iter", flags.max_iter, "Iteration cap");
    sub->add_option("--mode", mode, "Preequalization: orthogonal or tilde")
        ->check(CLI::IsMember({"orthogonal", "tilde"}));
    sub->add_option("--tau", flags.tau, "Report the resolvent (I + tau L)^-1")->check(CLI::PositiveNumber);
    sub->add_option("--oracle-cap", flags.oracle_cap, "Largest size enumerated by the tree oracle");
    sub->add_option("--output", output, "Write the report here instead of stdout");
  };
  auto* analyze_cmd = app.add_subcommand("analyze", "Full analysis report");
  auto* simulate_cmd = app.add_subcommand("simulate", "Preequalize and iterate the initial opinions");
  auto* verify_cmd = app.add_subcommand("verify", "Run every cross-check");
  auto* dot_cmd = app.add_subcommand("export-dot", "Graphviz rendering of the influence digraph");
  add_common(analyze_cmd, true);
  add_common(simulate_cmd, true);
  add_common(verify_cmd, false);
  add_common(dot_cmd, true);
  verify_cmd->add_flag("--builtin", builtin, "Verify the embedded example matrices");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }
  flags.mode = mode == "tilde" ? PreequalizationMode::Tilde : PreequalizationMode::Orthogonal;

  try {
    Output result;
    if (verify_cmd->parsed() && builtin) {
      if (!input.empty()) {
        err << "error: verify --builtin takes no input file\n";
        return kUsage;
      }
      result = execute_builtin_verify(flags);
    } else {
      if (input.empty()) {
        err << "error: an input file is required\n";
        return kUsage;
      }
      Command command = Command::Analyze;
      if (simulate_cmd->parsed()) command = Command::Simulate;
      if (verify_cmd->parsed()) command = Command::Verify;
      if (dot_cmd->parsed()) command = Command::ExportDot;
      result = execute(command, load_input(input), flags);
    }

    if (output.empty()) {
      out << result.text;
    } else {
      std::ofstream file(output, std::ios::binary);
      if (!file || !(file << result.text)) {
        err << "error: cannot write '" << output << "'\n";
        return kUsage;
      }
    }
    if (result.exit_code == kVerificationFailed) err << "verification failed\n";
    return result.exit_code;
  } catch (const ImproperMatrix& e) {
    err << "error: " << e.what() << "\n";
    return kImproper;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace consensus::cli
