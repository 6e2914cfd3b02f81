#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ordvar/estimator.hpp"
#include "ordvar/risk_engine.hpp"

namespace ordvar {

inline constexpr std::string_view kVersion = "1.0.0";
inline constexpr std::string_view kBoundaryInterpretation =
    "dBZ = boundary estimator: phi*(Z1)*S1 for sigma1^2, psi*(Z1*)*S2 for sigma2^2";
inline constexpr std::string_view kSigmaConvention = "sigma2^2 = 1, sigma1^2 = ratio";

/// Invalid or unreadable run configuration. `key` names the offending entry
/// (dotted path), or the file for I/O problems.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error("config error at '" + key + "': " + message), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

enum class OutputFormat { TableCsv, LongCsv, JsonMetadata };

/// One grid of a run plus a label used in file names and long-format rows.
struct Panel {
  std::string label;
  GridSpec grid;
};

/// Candidate function of the `check` subcommand.
struct CheckSpec {
  Target target = Target::Sigma1;
  LossKind loss = LossKind::SquaredError;
  int m1 = 8;
  int m2 = 12;
  std::optional<double> nu;  // empty: point mass
  Parameterization parameterization = Parameterization::Preset;
  std::string candidate_kind = "boundary";  // constant | baee | d11 | d21 | boundary
  double candidate_value = 1.0;             // constant value or BAEE scale
  std::vector<double> grid;
};

struct RunConfig {
  std::string name = "run";
  std::vector<Panel> panels;
  std::filesystem::path output_dir = "out";
  std::vector<OutputFormat> formats = {OutputFormat::TableCsv, OutputFormat::LongCsv,
                                       OutputFormat::JsonMetadata};
  bool enforce_ordering = true;
  std::optional<CheckSpec> check;

  bool wants(OutputFormat f) const {
    for (auto g : formats) {
      if (g == f) return true;
    }
    return false;
  }
};

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

inline const std::vector<std::pair<int, int>>& table_pairs() {
  static const std::vector<std::pair<int, int>> pairs = {
      {5, 7}, {10, 8}, {12, 15}, {13, 18}, {20, 17}};
  return pairs;
}

inline const std::vector<double>& table_ratios() {
  static const std::vector<double> ratios = {0.1, 0.2, 0.4, 0.6, 0.7, 0.8};
  return ratios;
}

inline const std::vector<double>& table_nus() {
  static const std::vector<double> nus = {5.0, 8.0, 10.0, 15.0};
  return nus;
}

/// Table layouts: d11 and dBZ (sigma1) under one loss.
inline RunConfig table_preset(int table_number) {
  const LossKind loss = table_number == 1 ? LossKind::SquaredError : LossKind::Entropy;
  GridSpec grid;
  grid.pairs = table_pairs();
  grid.ratios = table_ratios();
  grid.nus = table_nus();
  grid.p = 2;
  grid.q = 2;
  grid.replications = 20000;
  grid.estimators = {{EstimatorFamily::D11, Target::Sigma1, loss},
                     {EstimatorFamily::Boundary, Target::Sigma1, loss}};
  grid.master_seed = 42;
  grid.parameterization = Parameterization::Paper;
  RunConfig cfg;
  cfg.name = "table" + std::to_string(table_number);
  cfg.panels.push_back({cfg.name, grid});
  return cfg;
}

/// Figure data: d12 against nu and the variance ratio, for four sample-size
/// pairs and three mean settings per loss. Scalar means fill the vector.
inline RunConfig figures_preset() {
  RunConfig cfg;
  cfg.name = "figures";
  cfg.formats = {OutputFormat::LongCsv, OutputFormat::JsonMetadata};
  const std::vector<std::pair<int, int>> pairs = {{5, 7}, {10, 8}, {13, 9}, {12, 15}};
  std::vector<double> ratios;
  for (int i = 1; i <= 10; ++i) ratios.push_back(i / 10.0);
  struct Setting {
    LossKind loss;
    double mu1, mu2;
  };
  const std::vector<Setting> settings = {
      {LossKind::SquaredError, 0.0, 0.0}, {LossKind::SquaredError, 3.0, 2.0},
      {LossKind::SquaredError, 1.0, 1.5}, {LossKind::Entropy, 0.0, 0.0},
      {LossKind::Entropy, 3.0, 2.0},      {LossKind::Entropy, 1.5, 1.0}};
  for (const auto& s : settings) {
    GridSpec grid;
    grid.pairs = pairs;
    grid.ratios = ratios;
    grid.nus = table_nus();
    grid.p = 2;
    grid.q = 2;
    grid.mu1 = std::vector<double>(2, s.mu1);
    grid.mu2 = std::vector<double>(2, s.mu2);
    grid.replications = 20000;
    grid.estimators = {{EstimatorFamily::D12, Target::Sigma1, s.loss}};
    grid.master_seed = 42;
    grid.parameterization = Parameterization::Paper;
    std::ostringstream label;
    label << "d12_" << loss_tag(s.loss) << "_mu" << s.mu1 << "_" << s.mu2;
    cfg.panels.push_back({label.str(), grid});
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// JSON parsing
// ---------------------------------------------------------------------------

namespace detail {

using nlohmann::json;

inline void check_keys(const json& obj, const std::string& path,
                       std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || a == key;
    if (!known) {
      throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
    }
  }
}

inline std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

inline double get_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  return v.get<double>();
}

inline long long get_integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError(key, "expected an integer");
  return v.get<long long>();
}

inline std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(key, "expected a string");
  return v.get<std::string>();
}

inline bool get_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError(key, "expected a boolean");
  return v.get<bool>();
}

inline std::vector<double> get_number_list(const json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError(key, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(get_number(v[i], key + "[" + std::to_string(i) + "]"));
  }
  return out;
}

inline LossKind parse_loss(const json& v, const std::string& key) {
  const auto s = get_string(v, key);
  if (s == "Q" || s == "squared-error") return LossKind::SquaredError;
  if (s == "E" || s == "entropy") return LossKind::Entropy;
  throw ConfigError(key, "expected \"Q\" or \"E\"");
}

inline GridSpec parse_grid(const json& g, const std::string& path, bool enforce_ordering) {
  check_keys(g, path,
             {"pairs", "ratios", "nus", "p", "q", "mu1", "mu2", "replications", "estimators",
              "seed", "parameterization", "tau_sharing", "block_size"});
  GridSpec grid;
  grid.enforce_ordering = enforce_ordering;
  auto required = [&](std::string_view key) -> const json& {
    if (!g.contains(std::string(key))) throw ConfigError(join(path, key), "missing required key");
    return g.at(std::string(key));
  };
  {
    const auto key = join(path, "pairs");
    const auto& v = required("pairs");
    if (!v.is_array() || v.empty()) throw ConfigError(key, "expected a nonempty array of [n1, n2]");
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto k = key + "[" + std::to_string(i) + "]";
      if (!v[i].is_array() || v[i].size() != 2) throw ConfigError(k, "expected [n1, n2]");
      grid.pairs.emplace_back(static_cast<int>(get_integer(v[i][0], k)),
                              static_cast<int>(get_integer(v[i][1], k)));
    }
  }
  grid.ratios = get_number_list(required("ratios"), join(path, "ratios"));
  grid.nus = get_number_list(required("nus"), join(path, "nus"));
  if (g.contains("p")) grid.p = static_cast<int>(get_integer(g["p"], join(path, "p")));
  if (g.contains("q")) grid.q = static_cast<int>(get_integer(g["q"], join(path, "q")));
  auto mean = [&](std::string_view key, int dim) -> std::vector<double> {
    if (!g.contains(std::string(key))) return {};
    const auto& v = g.at(std::string(key));
    const auto k = join(path, key);
    if (v.is_number()) return std::vector<double>(static_cast<std::size_t>(std::max(dim, 0)), v.get<double>());
    auto out = get_number_list(v, k);
    if (out.size() != static_cast<std::size_t>(dim)) throw ConfigError(k, "length differs from dimension");
    return out;
  };
  grid.mu1 = mean("mu1", grid.p);
  grid.mu2 = mean("mu2", grid.q);
  if (g.contains("replications")) {
    grid.replications = get_integer(g["replications"], join(path, "replications"));
  }
  {
    const auto key = join(path, "estimators");
    const auto& v = required("estimators");
    if (!v.is_array() || v.empty()) throw ConfigError(key, "expected a nonempty array of names");
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto k = key + "[" + std::to_string(i) + "]";
      const auto name = get_string(v[i], k);
      const auto spec = EstimatorSpec::parse(name);
      if (!spec) throw ConfigError(k, "unknown estimator '" + name + "'");
      grid.estimators.push_back(*spec);
    }
  }
  if (g.contains("seed")) {
    const auto k = join(path, "seed");
    if (!g["seed"].is_number_unsigned() && !(g["seed"].is_number_integer() && g["seed"].get<long long>() >= 0)) {
      throw ConfigError(k, "expected a nonnegative integer");
    }
    grid.master_seed = g["seed"].get<std::uint64_t>();
  }
  if (g.contains("parameterization")) {
    const auto k = join(path, "parameterization");
    const auto p = parse_parameterization(get_string(g["parameterization"], k));
    if (!p) throw ConfigError(k, "expected paper, preset or chisq-over-nu");
    grid.parameterization = *p;
  }
  if (g.contains("tau_sharing")) {
    const auto k = join(path, "tau_sharing");
    const auto s = get_string(g["tau_sharing"], k);
    if (s == "shared") {
      grid.tau_sharing = TauSharing::Shared;
    } else if (s == "per-population") {
      grid.tau_sharing = TauSharing::PerPopulation;
    } else {
      throw ConfigError(k, "expected shared or per-population");
    }
  }
  if (g.contains("block_size")) {
    grid.block_size = get_integer(g["block_size"], join(path, "block_size"));
  }
  try {
    grid.validate();
  } catch (const StructuralError& e) {
    throw ConfigError(path, e.what());
  }
  return grid;
}

inline CheckSpec parse_check(const json& c) {
  check_keys(c, "check", {"target", "loss", "m1", "m2", "nu", "parameterization", "candidate", "grid"});
  CheckSpec spec;
  if (c.contains("target")) {
    const auto s = get_string(c["target"], "check.target");
    if (s == "sigma1") {
      spec.target = Target::Sigma1;
    } else if (s == "sigma2") {
      spec.target = Target::Sigma2;
    } else {
      throw ConfigError("check.target", "expected sigma1 or sigma2");
    }
  }
  if (c.contains("loss")) spec.loss = parse_loss(c["loss"], "check.loss");
  if (c.contains("m1")) spec.m1 = static_cast<int>(get_integer(c["m1"], "check.m1"));
  if (c.contains("m2")) spec.m2 = static_cast<int>(get_integer(c["m2"], "check.m2"));
  if (spec.m1 < 1 || spec.m2 < 1) throw ConfigError("check.m1", "degrees of freedom must be >= 1");
  if (c.contains("nu") && !c["nu"].is_null()) spec.nu = get_number(c["nu"], "check.nu");
  if (c.contains("parameterization")) {
    const auto p = parse_parameterization(get_string(c["parameterization"], "check.parameterization"));
    if (!p) throw ConfigError("check.parameterization", "expected paper, preset or chisq-over-nu");
    spec.parameterization = *p;
  }
  if (c.contains("candidate")) {
    const auto& cand = c["candidate"];
    check_keys(cand, "check.candidate", {"kind", "value", "scale"});
    if (cand.contains("kind")) spec.candidate_kind = get_string(cand["kind"], "check.candidate.kind");
    const std::set<std::string> kinds = {"constant", "baee", "d11", "d21", "boundary"};
    if (!kinds.count(spec.candidate_kind)) {
      throw ConfigError("check.candidate.kind", "expected constant, baee, d11, d21 or boundary");
    }
    if (spec.candidate_kind == "constant") {
      if (!cand.contains("value")) throw ConfigError("check.candidate.value", "missing required key");
      spec.candidate_value = get_number(cand["value"], "check.candidate.value");
    }
    if (cand.contains("scale")) spec.candidate_value = get_number(cand["scale"], "check.candidate.scale");
  }
  if (c.contains("grid")) {
    spec.grid = get_number_list(c["grid"], "check.grid");
  } else {
    spec.grid = {0.01, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0};
  }
  if (spec.grid.empty()) throw ConfigError("check.grid", "grid is empty");
  for (std::size_t i = 0; i < spec.grid.size(); ++i) {
    if (!(spec.grid[i] > 0.0) || (i > 0 && !(spec.grid[i] > spec.grid[i - 1]))) {
      throw ConfigError("check.grid", "grid must be positive and strictly increasing");
    }
  }
  return spec;
}

}  // namespace detail

/// Parses a run configuration document. Unknown keys are errors.
inline RunConfig parse_run_config(const nlohmann::json& doc) {
  using detail::get_bool;
  using detail::get_string;
  detail::check_keys(doc, "", {"name", "grid", "grids", "output_dir", "formats", "enforce_ordering", "check"});
  RunConfig cfg;
  if (doc.contains("name")) cfg.name = get_string(doc["name"], "name");
  if (doc.contains("enforce_ordering")) {
    cfg.enforce_ordering = get_bool(doc["enforce_ordering"], "enforce_ordering");
  }
  if (doc.contains("output_dir")) cfg.output_dir = get_string(doc["output_dir"], "output_dir");
  if (doc.contains("formats")) {
    const auto& v = doc["formats"];
    if (!v.is_array() || v.empty()) throw ConfigError("formats", "expected a nonempty array");
    cfg.formats.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto k = "formats[" + std::to_string(i) + "]";
      const auto s = get_string(v[i], k);
      if (s == "table-csv") {
        cfg.formats.push_back(OutputFormat::TableCsv);
      } else if (s == "long-csv") {
        cfg.formats.push_back(OutputFormat::LongCsv);
      } else if (s == "json-metadata") {
        cfg.formats.push_back(OutputFormat::JsonMetadata);
      } else {
        throw ConfigError(k, "expected table-csv, long-csv or json-metadata");
      }
    }
  }
  if (doc.contains("grid") && doc.contains("grids")) {
    throw ConfigError("grids", "give either grid or grids, not both");
  }
  if (doc.contains("grid")) {
    cfg.panels.push_back({cfg.name, detail::parse_grid(doc["grid"], "grid", cfg.enforce_ordering)});
  }
  if (doc.contains("grids")) {
    const auto& v = doc["grids"];
    if (!v.is_object() || v.empty()) throw ConfigError("grids", "expected an object of labelled grids");
    for (const auto& [label, g] : v.items()) {
      cfg.panels.push_back({label, detail::parse_grid(g, "grids." + label, cfg.enforce_ordering)});
    }
  }
  if (doc.contains("check")) cfg.check = detail::parse_check(doc["check"]);
  if (cfg.panels.empty() && !cfg.check) {
    throw ConfigError("grid", "missing required key (grid, grids or check)");
  }
  return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string(), std::string("parse error: ") + e.what());
  }
  return parse_run_config(doc);
}

}  // namespace ordvar
