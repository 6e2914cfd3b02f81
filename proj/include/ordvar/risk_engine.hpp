#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <spdlog/spdlog.h>

#include "ordvar/core_model.hpp"
#include "ordvar/errors.hpp"
#include "ordvar/estimator.hpp"
#include "ordvar/rng.hpp"
#include "ordvar/sampling.hpp"

namespace ordvar {

struct RiskEstimate {
  double mean_loss = 0.0;
  double std_error = 0.0;
  long long replications = 0;
};

/// Running mean and sum of squared deviations; merges exactly in any split.
struct LossAccumulator {
  long long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }

  void merge(const LossAccumulator& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(n + o.n);
    const double delta = o.mean - mean;
    mean += delta * static_cast<double>(o.n) / total;
    m2 += o.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(o.n) / total;
    n += o.n;
  }

  RiskEstimate estimate() const {
    RiskEstimate r;
    r.mean_loss = mean;
    r.replications = n;
    r.std_error = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
    return r;
  }
};

/// Paired (candidate, baseline) loss moments, for the RRI standard error.
struct PairedAccumulator {
  long long n = 0;
  double mean_x = 0.0, mean_y = 0.0;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;

  void add(double x, double y) {
    ++n;
    const double dx = x - mean_x;
    const double dy = y - mean_y;
    mean_x += dx / static_cast<double>(n);
    mean_y += dy / static_cast<double>(n);
    sxx += dx * (x - mean_x);
    syy += dy * (y - mean_y);
    sxy += dx * (y - mean_y);
  }

  void merge(const PairedAccumulator& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n);
    const double nb = static_cast<double>(o.n);
    const double total = na + nb;
    const double dx = o.mean_x - mean_x;
    const double dy = o.mean_y - mean_y;
    mean_x += dx * nb / total;
    mean_y += dy * nb / total;
    sxx += o.sxx + dx * dx * na * nb / total;
    syy += o.syy + dy * dy * na * nb / total;
    sxy += o.sxy + dx * dy * na * nb / total;
    n += o.n;
  }

  /// Delta-method standard error of 100 (1 - mean_x / mean_y).
  double rri_std_error() const {
    if (n < 2 || !(mean_y > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double k = static_cast<double>(n - 1);
    const double vxx = sxx / k, vyy = syy / k, vxy = sxy / k;
    const double my = mean_y, mx = mean_x;
    const double var = (vxx / (my * my) + mx * mx * vyy / (my * my * my * my) -
                        2.0 * mx * vxy / (my * my * my)) /
                       static_cast<double>(n);
    return 100.0 * std::sqrt(std::max(var, 0.0));
  }
};

/// 100 (baseline - improved) / baseline; negative values are kept.
inline double rri(const RiskEstimate& improved, const RiskEstimate& baseline) {
  if (!(baseline.mean_loss > 0.0)) throw DomainError("rri: baseline risk must be positive");
  return 100.0 * (baseline.mean_loss - improved.mean_loss) / baseline.mean_loss;
}

inline double true_variance(Target target, const PopulationConfig& config) {
  return target == Target::Sigma1 ? config.sigma1_sq() : config.sigma2_sq();
}

/// Monte Carlo risk of one estimator. Replication i uses substream(seed, i).
inline RiskEstimate estimate_risk(const Estimator& estimator, const PopulationConfig& config,
                                  const MixingMoments& sampling_law, long long reps,
                                  const SeedSpec& seed, TauSharing sharing = TauSharing::Shared) {
  if (reps < 2) throw DomainError("estimate_risk: need at least 2 replications");
  const double sigma_sq = true_variance(estimator.target(), config);
  LossAccumulator acc;
  for (long long i = 0; i < reps; ++i) {
    const auto sample = draw(config, sampling_law, substream(seed, static_cast<std::uint64_t>(i)),
                             sharing);
    try {
      const auto stats = sufficient_stats(sample, config);
      acc.add(loss(estimator.loss(), estimator.estimate(stats), sigma_sq));
    } catch (const DomainError& e) {
      throw DomainError(std::string(e.what()) + " (replication " + std::to_string(i) + ")");
    }
  }
  return acc.estimate();
}

// ---------------------------------------------------------------------------
// Mixing parameterizations
// ---------------------------------------------------------------------------

/// How nu maps to the moments used by the estimators and the law used to
/// draw tau.
///   Paper:       estimators use the Gamma(nu/2, scale nu/2) inverse moments,
///                tau is drawn as chi2_nu / nu (the published tables).
///   Preset:      Gamma(nu/2, scale nu/2) for both.
///   ChisqOverNu: chi2_nu / nu for both.
enum class Parameterization { Paper, Preset, ChisqOverNu };

constexpr std::string_view parameterization_name(Parameterization p) {
  switch (p) {
    case Parameterization::Paper: return "paper";
    case Parameterization::Preset: return "preset";
    case Parameterization::ChisqOverNu: return "chisq-over-nu";
  }
  return "?";
}

inline std::optional<Parameterization> parse_parameterization(std::string_view s) {
  if (s == "paper") return Parameterization::Paper;
  if (s == "preset") return Parameterization::Preset;
  if (s == "chisq-over-nu") return Parameterization::ChisqOverNu;
  return std::nullopt;
}

constexpr std::string_view parameterization_detail(Parameterization p) {
  switch (p) {
    case Parameterization::Paper:
      return "estimator moments: Gamma(nu/2, scale nu/2); tau sampled as chi2_nu/nu";
    case Parameterization::Preset:
      return "estimator moments and tau law: Gamma(nu/2, scale nu/2)";
    case Parameterization::ChisqOverNu:
      return "estimator moments and tau law: chi2_nu/nu = Gamma(nu/2, scale 2/nu)";
  }
  return "?";
}

struct MixingSetup {
  MixingMoments estimator_moments;
  MixingMoments sampling_law;
};

/// nu > 4 gives both inverse moments; 2 < nu <= 4 only the first, which
/// limits the grid to entropy-loss estimators.
inline MixingSetup mixing_setup(Parameterization param, double nu) {
  const bool full = nu > 4.0;
  auto preset = [&] { return full ? t_preset(nu) : t_preset_entropy_only(nu); };
  auto chisq = [&] { return full ? chisq_over_nu(nu) : chisq_over_nu_entropy_only(nu); };
  switch (param) {
    case Parameterization::Paper: return {preset(), chisq()};
    case Parameterization::Preset: return {preset(), preset()};
    case Parameterization::ChisqOverNu: return {chisq(), chisq()};
  }
  throw StructuralError("mixing_setup: unknown parameterization");
}

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

struct GridSpec {
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> ratios;
  std::vector<double> nus;
  int p = 2;
  int q = 2;
  std::vector<double> mu1;  // empty: zero vector
  std::vector<double> mu2;
  long long replications = 20000;
  std::vector<EstimatorSpec> estimators;
  std::uint64_t master_seed = 42;
  Parameterization parameterization = Parameterization::Paper;
  TauSharing tau_sharing = TauSharing::Shared;
  bool enforce_ordering = true;
  long long block_size = 2048;

  void validate() const {
    if (pairs.empty()) throw StructuralError("grid: pairs is empty");
    if (ratios.empty()) throw StructuralError("grid: ratios is empty");
    if (nus.empty()) throw StructuralError("grid: nus is empty");
    if (estimators.empty()) throw StructuralError("grid: estimators is empty");
    if (replications < 100) throw StructuralError("grid: replications must be >= 100");
    if (block_size < 1) throw StructuralError("grid: block_size must be >= 1");
    if (p < 1 || q < 1) throw StructuralError("grid: p and q must be >= 1");
    if (!mu1.empty() && mu1.size() != static_cast<std::size_t>(p)) {
      throw StructuralError("grid: mu1 length differs from p");
    }
    if (!mu2.empty() && mu2.size() != static_cast<std::size_t>(q)) {
      throw StructuralError("grid: mu2 length differs from q");
    }
    for (const auto& [n1, n2] : pairs) {
      if (n1 < 2 || n2 < 2) throw StructuralError("grid: sample sizes must be >= 2");
    }
    for (double r : ratios) {
      if (!(r > 0.0) || !std::isfinite(r)) throw StructuralError("grid: ratios must be positive");
      if (enforce_ordering && r > 1.0) {
        throw StructuralError("grid: ratio above 1 violates sigma1^2 <= sigma2^2");
      }
    }
    for (double nu : nus) {
      if (!(nu > 2.0) || !std::isfinite(nu)) throw StructuralError("grid: nu must exceed 2");
    }
  }

  std::vector<double> mu1_or_zero() const {
    return mu1.empty() ? std::vector<double>(static_cast<std::size_t>(p), 0.0) : mu1;
  }
  std::vector<double> mu2_or_zero() const {
    return mu2.empty() ? std::vector<double>(static_cast<std::size_t>(q), 0.0) : mu2;
  }
};

struct CellKey {
  int n1 = 0;
  int n2 = 0;
  double ratio = 0.0;
  double nu = 0.0;
};

/// Stream id of a cell; depends only on the cell coordinates.
inline std::uint64_t cell_stream_id(const CellKey& cell) {
  std::uint64_t h = 0x6f72647661720001ULL;
  auto absorb = [&h](std::uint64_t v) { h = detail::mix64(h ^ v) + 0x9e3779b97f4a7c15ULL; };
  absorb(static_cast<std::uint64_t>(static_cast<std::uint32_t>(cell.n1)));
  absorb(static_cast<std::uint64_t>(static_cast<std::uint32_t>(cell.n2)));
  absorb(std::bit_cast<std::uint64_t>(cell.ratio));
  absorb(std::bit_cast<std::uint64_t>(cell.nu));
  return h;
}

struct GridRow {
  CellKey cell;
  EstimatorSpec estimator;
  RiskEstimate risk;
  RiskEstimate baseline;
  double rri = std::numeric_limits<double>::quiet_NaN();
  double rri_se = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t sample_fingerprint = 0;
  std::optional<std::string> error;
};

struct GridResult {
  std::vector<GridRow> rows;
  std::vector<std::pair<CellKey, std::string>> failed_cells;
};

namespace detail {

// FNV-1a over the bits of the sufficient statistics, one replication at a time.
inline std::uint64_t fingerprint_step(std::uint64_t h, const SufficientStatistics& s) {
  for (double v : {s.s1(), s.s2(), s.t1(), s.t2()}) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      h ^= bits & 0xffu;
      h *= 0x100000001b3ULL;
      bits >>= 8;
    }
  }
  return h;
}

struct CellPlan {
  CellKey key;
  PopulationConfig config;
  MixingMoments sampling_law;
  std::vector<Estimator> estimators;        // all distinct specs used in the cell
  std::vector<EstimatorSpec> specs;         // parallel to estimators
  std::vector<std::size_t> requested;       // index per grid estimator
  std::vector<std::size_t> baseline_of;     // index per grid estimator
  SeedSpec seed;
  std::optional<std::string> setup_error;
};

struct BlockResult {
  std::vector<LossAccumulator> losses;
  std::vector<PairedAccumulator> paired;
  std::uint64_t fingerprint = 0;
  std::optional<std::string> error;
};

}  // namespace detail

/// Runs every (pair, ratio, nu) cell. Cells are split into blocks of
/// block_size replications; replication i of a cell always uses the same
/// substream, and all estimators of the cell see the same samples. Blocks are
/// merged in block order, so the result does not depend on `workers`.
inline GridResult run_grid(const GridSpec& grid, unsigned workers = 0) {
  grid.validate();
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());

  std::vector<detail::CellPlan> plans;
  for (const auto& [n1, n2] : grid.pairs) {
    for (double ratio : grid.ratios) {
      for (double nu : grid.nus) {
        if (ratio > 1.0) {
          spdlog::warn("cell (n1={}, n2={}, ratio={}) violates sigma1^2 <= sigma2^2", n1, n2,
                       ratio);
        }
        const CellKey key{n1, n2, ratio, nu};
        PopulationConfig config(grid.p, grid.q, n1, n2, grid.mu1_or_zero(), grid.mu2_or_zero(),
                                ratio, 1.0);
        detail::CellPlan plan{key, config, MixingMoments::point_mass(), {}, {}, {}, {},
                              SeedSpec{grid.master_seed, cell_stream_id(key)}, std::nullopt};
        try {
          const auto setup = mixing_setup(grid.parameterization, nu);
          plan.sampling_law = setup.sampling_law;
          auto index_of = [&](const EstimatorSpec& spec) {
            for (std::size_t i = 0; i < plan.specs.size(); ++i) {
              if (plan.specs[i] == spec) return i;
            }
            plan.estimators.push_back(make_estimator(spec, config.m1(), config.m2(), grid.p,
                                                     grid.q, setup.estimator_moments));
            plan.specs.push_back(spec);
            return plan.specs.size() - 1;
          };
          for (const auto& spec : grid.estimators) {
            plan.requested.push_back(index_of(spec));
            plan.baseline_of.push_back(index_of(spec.baseline()));
          }
        } catch (const std::exception& e) {
          plan.setup_error = e.what();
        }
        plans.push_back(std::move(plan));
      }
    }
  }

  const long long blocks_per_cell = (grid.replications + grid.block_size - 1) / grid.block_size;
  const std::size_t unit_count = plans.size() * static_cast<std::size_t>(blocks_per_cell);
  std::vector<detail::BlockResult> results(unit_count);

  auto run_unit = [&](std::size_t unit) {
    const auto& plan = plans[unit / static_cast<std::size_t>(blocks_per_cell)];
    auto& out = results[unit];
    if (plan.setup_error) return;
    const long long block = static_cast<long long>(unit % static_cast<std::size_t>(blocks_per_cell));
    const long long begin = block * grid.block_size;
    const long long end = std::min(grid.replications, begin + grid.block_size);
    const std::size_t k = plan.estimators.size();
    out.losses.assign(k, {});
    out.paired.assign(plan.requested.size(), {});
    std::vector<double> values(k);
    std::uint64_t fp = 0xcbf29ce484222325ULL;
    long long i = begin;
    try {
      for (; i < end; ++i) {
        const auto sample = draw(plan.config, plan.sampling_law,
                                 substream(plan.seed, static_cast<std::uint64_t>(i)),
                                 grid.tau_sharing);
        const auto stats = sufficient_stats(sample, plan.config);
        fp = detail::fingerprint_step(fp, stats);
        for (std::size_t e = 0; e < k; ++e) {
          const auto& est = plan.estimators[e];
          values[e] = loss(est.loss(), est.estimate(stats), true_variance(est.target(), plan.config));
          out.losses[e].add(values[e]);
        }
        for (std::size_t r = 0; r < plan.requested.size(); ++r) {
          out.paired[r].add(values[plan.requested[r]], values[plan.baseline_of[r]]);
        }
      }
    } catch (const std::exception& e) {
      out.error = std::string(e.what()) + " (replication " + std::to_string(i) + ")";
    }
    out.fingerprint = fp;
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t unit = next.fetch_add(1);
      if (unit >= unit_count) return;
      run_unit(unit);
    }
  };
  const unsigned thread_count =
      static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(unit_count, 1)));
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(thread_count);
    for (unsigned t = 0; t < thread_count; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  GridResult result;
  for (std::size_t c = 0; c < plans.size(); ++c) {
    const auto& plan = plans[c];
    std::optional<std::string> error = plan.setup_error;
    std::vector<LossAccumulator> losses(plan.estimators.size());
    std::vector<PairedAccumulator> paired(plan.requested.size());
    std::uint64_t fingerprint = 0xcbf29ce484222325ULL;
    for (long long b = 0; b < blocks_per_cell && !error; ++b) {
      const auto& block = results[c * static_cast<std::size_t>(blocks_per_cell) +
                                  static_cast<std::size_t>(b)];
      if (block.error) {
        error = block.error;
        break;
      }
      for (std::size_t e = 0; e < losses.size(); ++e) losses[e].merge(block.losses[e]);
      for (std::size_t r = 0; r < paired.size(); ++r) paired[r].merge(block.paired[r]);
      fingerprint = detail::mix64(fingerprint ^ block.fingerprint);
    }
    if (error) {
      spdlog::error("cell (n1={}, n2={}, ratio={}, nu={}) failed: {}", plan.key.n1, plan.key.n2,
                    plan.key.ratio, plan.key.nu, *error);
      result.failed_cells.emplace_back(plan.key, *error);
    }
    for (std::size_t r = 0; r < grid.estimators.size(); ++r) {
      GridRow row;
      row.cell = plan.key;
      row.estimator = grid.estimators[r];
      if (error) {
        row.error = error;
      } else {
        row.risk = losses[plan.requested[r]].estimate();
        row.baseline = losses[plan.baseline_of[r]].estimate();
        row.sample_fingerprint = fingerprint;
        if (row.baseline.mean_loss > 0.0) {
          row.rri = rri(row.risk, row.baseline);
          row.rri_se = plan.requested[r] == plan.baseline_of[r] ? 0.0 : paired[r].rri_std_error();
        } else {
          row.error = "baseline risk is zero";
        }
      }
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

}  // namespace ordvar
