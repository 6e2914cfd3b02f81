#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "ordvar.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<long long> reps;
  std::vector<double> nus;
  unsigned workers = 0;
  std::string parameterization;
  bool no_ordering_check = false;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("ordvar");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("ORDVAR_LOG")) {
    const std::string level = env;
    if (level == "error") spdlog::set_level(spdlog::level::err);
    else if (level == "warn") spdlog::set_level(spdlog::level::warn);
    else if (level == "info") spdlog::set_level(spdlog::level::info);
    else if (level == "debug") spdlog::set_level(spdlog::level::debug);
    else spdlog::warn("ORDVAR_LOG='{}' not recognized; using warn", level);
  }
}

void apply_overrides(ordvar::RunConfig& cfg, const Overrides& o) {
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.no_ordering_check) cfg.enforce_ordering = false;
  for (auto& panel : cfg.panels) {
    auto& g = panel.grid;
    if (o.seed) g.master_seed = *o.seed;
    if (o.reps) g.replications = *o.reps;
    if (!o.nus.empty()) g.nus = o.nus;
    if (!o.parameterization.empty()) {
      const auto p = ordvar::parse_parameterization(o.parameterization);
      if (!p) throw ordvar::ConfigError("--parameterization", "expected paper, preset or chisq-over-nu");
      g.parameterization = *p;
    }
    g.enforce_ordering = cfg.enforce_ordering;
    try {
      g.validate();
    } catch (const ordvar::StructuralError& e) {
      throw ordvar::ConfigError(o.reps ? "--reps" : "grid", e.what());
    }
  }
}

int run_panels(const ordvar::RunConfig& cfg, unsigned workers, std::string_view command) {
  std::vector<ordvar::PanelResult> results;
  std::size_t failed = 0;
  for (const auto& panel : cfg.panels) {
    spdlog::info("running {}: {} cells x {} estimators, {} replications", panel.label,
                 panel.grid.pairs.size() * panel.grid.ratios.size() * panel.grid.nus.size(),
                 panel.grid.estimators.size(), panel.grid.replications);
    auto result = ordvar::run_grid(panel.grid, workers);
    failed += result.failed_cells.size();
    results.push_back({panel, std::move(result)});
  }
  for (const auto& path : ordvar::write_outputs(cfg, results, command)) {
    std::cout << "wrote " << path.string() << "\n";
  }
  if (failed > 0) {
    std::cerr << "numerical failure in " << failed << " cell(s):\n";
    for (const auto& pr : results) {
      for (const auto& [cell, message] : pr.result.failed_cells) {
        std::cerr << "  " << pr.panel.label << " n1=" << cell.n1 << " n2=" << cell.n2
                  << " ratio=" << cell.ratio << " nu=" << cell.nu << ": " << message << "\n";
      }
    }
    return kExitNumerical;
  }
  return 0;
}

int run_check(const ordvar::RunConfig& cfg) {
  using namespace ordvar;
  const auto& spec = *cfg.check;
  const MixingMoments moments =
      spec.nu ? mixing_setup(spec.parameterization, *spec.nu).estimator_moments
              : MixingMoments::point_mass();
  std::function<double(double)> candidate;
  const auto& kind = spec.candidate_kind;
  const int dim = 1;
  if (kind == "constant") {
    const double v = spec.candidate_value;
    candidate = [v](double) { return v; };
  } else if (kind == "baee") {
    const double v = spec.candidate_value *
                     baee_coefficient(spec.target == Target::Sigma1 ? Population::One : Population::Two,
                                      spec.loss, spec.target == Target::Sigma1 ? spec.m1 : spec.m2,
                                      moments)
                         .value;
    candidate = [v](double) { return v; };
  } else if (kind == "d11") {
    auto est = Sigma1Estimator::d11(spec.loss, spec.m1, spec.m2, dim, moments);
    candidate = [est](double z) { return est.coefficient(SufficientStatistics(1.0, z, 0.0, 0.0)); };
  } else if (kind == "d21") {
    auto est = Sigma2Estimator::d21(spec.loss, spec.m1, spec.m2, dim, moments);
    candidate = [est](double z) { return est.coefficient(SufficientStatistics(z, 1.0, 0.0, 0.0)); };
  } else {
    auto bf = std::make_shared<BoundaryFunction>(spec.target, spec.loss, spec.m1, spec.m2, moments);
    candidate = [bf](double z) { return bf->uncached(z); };
  }
  const auto report =
      check_class_membership(candidate, spec.target, spec.loss, spec.m1, spec.m2, moments, spec.grid);

  std::string csv = "point,candidate,boundary\n";
  for (const auto& p : report.points) {
    csv += format_shortest(p.point) + ',' + format_shortest(p.candidate) + ',' +
           format_shortest(p.boundary) + '\n';
  }
  std::string violations = "kind,point,candidate,reference\n";
  for (const auto& v : report.violations) {
    violations += std::string(violation_name(v.kind)) + ',' + format_shortest(v.point) + ',' +
                  format_shortest(v.candidate) + ',' + format_shortest(v.reference) + '\n';
  }
  std::filesystem::create_directories(cfg.output_dir);
  const auto points_path = cfg.output_dir / (cfg.name + "_check.csv");
  const auto violations_path = cfg.output_dir / (cfg.name + "_violations.csv");
  detail::write_file(points_path, csv);
  detail::write_file(violations_path, violations);
  std::cout << "candidate '" << kind << "' (" << target_name(spec.target) << ", "
            << loss_name(spec.loss) << "): " << (report.passed() ? "PASS" : "FAIL") << ", "
            << report.violations.size() << " violation(s), limit deviation "
            << format_shortest(report.limit_deviation) << " at " << format_shortest(report.limit_point)
            << "\n";
  for (const auto& v : report.violations) {
    std::cout << "  " << violation_name(v.kind) << " at " << format_shortest(v.point)
              << ": candidate " << format_shortest(v.candidate) << " vs "
              << format_shortest(v.reference) << "\n";
  }
  std::cout << "wrote " << points_path.string() << "\nwrote " << violations_path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Monte Carlo risk of improved estimators of ordered scale-mixture variances"};
  app.set_version_flag("--version", std::string(ordvar::kVersion));
  app.require_subcommand(1);

  Overrides o;
  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--seed", o.seed, "Master seed");
    sub->add_option("--reps", o.reps, "Replications per cell");
    sub->add_option("--nu", o.nus, "Degrees of freedom (repeatable)");
    sub->add_option("--workers", o.workers, "Worker threads (default: machine parallelism)");
    sub->add_option("--parameterization", o.parameterization,
                    "Mixing parameterization: paper, preset or chisq-over-nu")
        ->check(CLI::IsMember({"paper", "preset", "chisq-over-nu"}));
    sub->add_flag("--no-ordering-check", o.no_ordering_check,
                  "Allow variance ratios above one");
  };
  auto* run = app.add_subcommand("run", "Run the grid(s) of a config file");
  run->add_option("--config", o.config, "Run configuration (JSON)")->required();
  add_common(run);
  auto* t1 = app.add_subcommand("table1", "Squared-error table preset (d11, dBZ)");
  add_common(t1);
  auto* t2 = app.add_subcommand("table2", "Entropy table preset (d11, dBZ)");
  add_common(t2);
  auto* fig = app.add_subcommand("figures", "Figure data preset (d12), long format");
  add_common(fig);
  auto* check = app.add_subcommand("check", "Class-membership report for a candidate");
  check->add_option("--config", o.config, "Config with a check section (JSON)")->required();
  check->add_option("--out", o.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    ordvar::RunConfig cfg;
    std::string command;
    if (*run) {
      cfg = ordvar::load_run_config(o.config);
      command = "run";
      if (cfg.panels.empty()) throw ordvar::ConfigError("grid", "missing required key");
    } else if (*t1) {
      cfg = ordvar::table_preset(1);
      command = "table1";
    } else if (*t2) {
      cfg = ordvar::table_preset(2);
      command = "table2";
    } else if (*fig) {
      cfg = ordvar::figures_preset();
      command = "figures";
    } else {
      cfg = ordvar::load_run_config(o.config);
      if (!cfg.check) throw ordvar::ConfigError("check", "missing required key");
      if (!o.out.empty()) cfg.output_dir = o.out;
      return run_check(cfg);
    }
    apply_overrides(cfg, o);
    return run_panels(cfg, o.workers, command);
  } catch (const ordvar::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const ordvar::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << " (achieved error " << e.achieved_error()
              << ")\n";
    return kExitNumerical;
  } catch (const ordvar::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
