#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "ordvar/config.hpp"
#include "ordvar/risk_engine.hpp"

namespace ordvar {

/// Locale-independent number formatting for CSV output.
inline std::string format_fixed(double v, int decimals) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  std::string out(buf, r.ptr);
  if (out == "-0.00" || out == "-0.0" || out == "-0") out.erase(0, 1);
  return out;
}

inline std::string format_shortest(double v) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string format_hex(std::uint64_t v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, 16);
  return std::string(buf, r.ptr);
}

struct PanelResult {
  Panel panel;
  GridResult result;
};

namespace detail {

inline std::string mean_text(const std::vector<double>& mu) {
  if (mu.empty()) return "0";
  bool uniform = true;
  for (double v : mu) uniform = uniform && v == mu.front();
  if (uniform) return format_shortest(mu.front());
  std::string out;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (i) out += ';';
    out += format_shortest(mu[i]);
  }
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace detail

/// Table layout for one nu: n1, n2, ratio, then rri_<estimator> with two
/// decimals.
inline std::string table_csv(const GridSpec& grid, const GridResult& result, double nu) {
  std::string out = "n1,n2,ratio";
  for (const auto& e : grid.estimators) out += ",rri_" + e.name();
  out += '\n';
  for (const auto& [n1, n2] : grid.pairs) {
    for (double ratio : grid.ratios) {
      out += std::to_string(n1) + ',' + std::to_string(n2) + ',' + format_shortest(ratio);
      for (const auto& e : grid.estimators) {
        double value = std::nan("");
        for (const auto& row : result.rows) {
          if (row.cell.n1 == n1 && row.cell.n2 == n2 && row.cell.ratio == ratio &&
              row.cell.nu == nu && row.estimator == e) {
            value = row.error ? std::nan("") : row.rri;
          }
        }
        out += ',' + format_fixed(value, 2);
      }
      out += '\n';
    }
  }
  return out;
}

inline std::string long_csv_header() {
  return "panel,n1,n2,ratio,nu,p,q,mu1,mu2,estimator,baseline,risk,risk_se,baseline_risk,"
         "baseline_se,rri,rri_se,replications,fingerprint,error\n";
}

/// One line per (cell, estimator), full precision.
inline std::string long_csv_rows(const Panel& panel, const GridResult& result) {
  std::string out;
  const auto& g = panel.grid;
  const auto mu1 = detail::mean_text(g.mu1);
  const auto mu2 = detail::mean_text(g.mu2);
  for (const auto& row : result.rows) {
    out += panel.label + ',' + std::to_string(row.cell.n1) + ',' + std::to_string(row.cell.n2) +
           ',' + format_shortest(row.cell.ratio) + ',' + format_shortest(row.cell.nu) + ',' +
           std::to_string(g.p) + ',' + std::to_string(g.q) + ',' + mu1 + ',' + mu2 + ',' +
           row.estimator.name() + ',' + row.estimator.baseline().name() + ',';
    if (row.error) {
      std::string msg = *row.error;
      for (char& c : msg) {
        if (c == ',' || c == '\n' || c == '"') c = ' ';
      }
      out += "NA,NA,NA,NA,NA,NA,NA,NA," + msg + '\n';
      continue;
    }
    out += format_shortest(row.risk.mean_loss) + ',' + format_shortest(row.risk.std_error) + ',' +
           format_shortest(row.baseline.mean_loss) + ',' +
           format_shortest(row.baseline.std_error) + ',' + format_shortest(row.rri) + ',' +
           format_shortest(row.rri_se) + ',' + std::to_string(row.risk.replications) + ',' +
           format_hex(row.sample_fingerprint) + ",\n";
  }
  return out;
}

/// Run metadata. Holds nothing that depends on the machine, the clock or the
/// worker count, so repeated runs give identical files.
inline nlohmann::json metadata_json(const RunConfig& cfg, const std::vector<PanelResult>& results,
                                    std::string_view command) {
  using nlohmann::json;
  json meta;
  meta["tool"] = "ordvar";
  meta["version"] = std::string(kVersion);
  meta["command"] = std::string(command);
  meta["dbz_interpretation"] = std::string(kBoundaryInterpretation);
  meta["sigma_convention"] = std::string(kSigmaConvention);
  meta["enforce_ordering"] = cfg.enforce_ordering;
  json panels = json::array();
  json failed = json::array();
  for (const auto& pr : results) {
    const auto& g = pr.panel.grid;
    json p;
    p["label"] = pr.panel.label;
    p["master_seed"] = g.master_seed;
    p["replications"] = g.replications;
    p["parameterization"] = {{"tag", std::string(parameterization_name(g.parameterization))},
                             {"detail", std::string(parameterization_detail(g.parameterization))}};
    p["tau_sharing"] = std::string(tau_sharing_name(g.tau_sharing));
    p["p"] = g.p;
    p["q"] = g.q;
    p["mu1"] = g.mu1_or_zero();
    p["mu2"] = g.mu2_or_zero();
    json pairs = json::array();
    for (const auto& [n1, n2] : g.pairs) pairs.push_back({n1, n2});
    p["pairs"] = pairs;
    p["ratios"] = g.ratios;
    p["nus"] = g.nus;
    json names = json::array();
    for (const auto& e : g.estimators) names.push_back(e.name());
    p["estimators"] = names;
    p["block_size"] = g.block_size;
    p["user_supplied_base"] = false;
    panels.push_back(p);
    for (const auto& [cell, message] : pr.result.failed_cells) {
      failed.push_back({{"panel", pr.panel.label},
                        {"n1", cell.n1},
                        {"n2", cell.n2},
                        {"ratio", cell.ratio},
                        {"nu", cell.nu},
                        {"error", message}});
    }
  }
  meta["panels"] = panels;
  meta["failed_cells"] = failed;
  if (results.size() == 1) {
    // Flat copies of the single panel's settings for quick lookup.
    const auto& p = panels.front();
    for (const char* key : {"master_seed", "replications", "parameterization", "mu1", "mu2"}) {
      meta[key] = p[key];
    }
  }
  return meta;
}

/// Writes the requested formats into cfg.output_dir and returns the paths.
inline std::vector<std::filesystem::path> write_outputs(const RunConfig& cfg,
                                                        const std::vector<PanelResult>& results,
                                                        std::string_view command) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  std::vector<fs::path> written;
  if (cfg.wants(OutputFormat::TableCsv)) {
    for (const auto& pr : results) {
      const bool single = results.size() == 1;
      for (double nu : pr.panel.grid.nus) {
        const auto stem = (single ? cfg.name : pr.panel.label) + "_nu" + format_shortest(nu);
        const auto path = cfg.output_dir / (stem + ".csv");
        detail::write_file(path, table_csv(pr.panel.grid, pr.result, nu));
        written.push_back(path);
      }
    }
  }
  if (cfg.wants(OutputFormat::LongCsv)) {
    std::string content = long_csv_header();
    for (const auto& pr : results) content += long_csv_rows(pr.panel, pr.result);
    const auto path = cfg.output_dir / (cfg.name + "_long.csv");
    detail::write_file(path, content);
    written.push_back(path);
  }
  if (cfg.wants(OutputFormat::JsonMetadata)) {
    auto meta = metadata_json(cfg, results, command);
    nlohmann::json files = nlohmann::json::array();
    for (const auto& p : written) files.push_back(p.filename().string());
    meta["outputs"] = files;
    const auto path = cfg.output_dir / (cfg.name + "_metadata.json");
    detail::write_file(path, meta.dump(2) + "\n");
    written.push_back(path);
  }
  return written;
}

}  // namespace ordvar
