#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <thread>
#include <vector>

#include "mixshift/asymptotics.hpp"
#include "mixshift/bootstrap.hpp"
#include "mixshift/distributions.hpp"
#include "mixshift/errors.hpp"
#include "mixshift/estimators.hpp"

namespace mixshift {

// One experiment cell: control law F, responder fraction theta, separation
// K = delta/sigma_X, and common group size m = n.
struct CellSpec {
  FamilySpec family;
  double theta = 0.5;
  double K = 1.0;
  std::size_t n = 100;

  double delta() const { return K * family.scale_sigma; }
};

struct RunOptions {
  double level = 0.95;
  std::size_t B = 1000;        // bootstrap replicates (bootstrap methods only)
  std::size_t threads = 1;     // worker cap; output is identical for any value
  double eps_log_base = std::numbers::e;
};

struct MethodAggregate {
  Method method = Method::Asymptotic;
  double coverage_theta = 0.0;
  double avg_len_theta = 0.0;
  double coverage_delta = 0.0;
  double avg_len_delta = 0.0;
  double mc_se_theta = 0.0;  // sqrt(cov(1-cov)/R)
  double mc_se_delta = 0.0;
  std::size_t truncations = 0;  // intervals clamped at a parameter boundary
  std::size_t fallbacks = 0;    // BCa percentile fallbacks
  std::size_t floors = 0;       // variance plug-ins floored at 0
  std::size_t failures = 0;     // replications skipped by estimator errors
};

struct CoverageRow {
  CellSpec cell;
  std::size_t R = 0;
  double level = 0.95;
  double mean_abs_err_theta = 0.0;  // bias summaries across replications
  double mean_abs_err_delta = 0.0;
  std::vector<MethodAggregate> methods;
};

namespace detail {

struct MethodRep {
  bool failed = false;
  bool cover_theta = false;
  bool cover_delta = false;
  double len_theta = 0.0;
  double len_delta = 0.0;
  unsigned truncations = 0;
  unsigned fallbacks = 0;
  unsigned floors = 0;
};

struct RepOutcome {
  bool failed = false;
  double abs_err_theta = 0.0;
  double abs_err_delta = 0.0;
  std::array<MethodRep, 3> per_method{};
};

inline unsigned truncation_count(const IntervalResult& iv) {
  return (iv.truncated_low ? 1u : 0u) + (iv.truncated_high ? 1u : 0u);
}

// One replication: draw both samples, estimate, build every requested
// interval.  Streams: rep.child(0) control, rep.child(1) treatment,
// rep.child(2) bootstrap (fixed layout, independent of the method list).
inline RepOutcome run_replication(const CellSpec& cell, const std::vector<Method>& methods,
                                  Seed rep, const RunOptions& opt) {
  RepOutcome out;
  const double delta = cell.delta();
  const MixtureParams mix{cell.theta, delta};
  TwoSample ts;
  EstimateResult est;
  try {
    ts = TwoSample::from_observations(
        sample_control(cell.family, cell.n, rep.child(0)),
        sample_treatment(cell.family, mix, cell.n, rep.child(1)));
    est = estimate(ts, opt.eps_log_base);
  } catch (const Error&) {
    out.failed = true;
    for (auto& mr : out.per_method) mr.failed = true;
    return out;
  }
  out.abs_err_theta = std::abs(est.theta_hat - cell.theta);
  out.abs_err_delta = std::abs(est.delta_hat - delta);

  const bool wants_bootstrap =
      std::find(methods.begin(), methods.end(), Method::BCa) != methods.end() ||
      std::find(methods.begin(), methods.end(), Method::CenteredPercentile) != methods.end();
  BootstrapConfig bcfg;
  BootstrapDistribution boot;
  if (wants_bootstrap) {
    bcfg.B = opt.B;
    bcfg.level = opt.level;
    bcfg.seed = rep.child(2);
    bcfg.eps_log_base = opt.eps_log_base;
    boot = resample(ts, bcfg);
  }

  for (std::size_t j = 0; j < methods.size(); ++j) {
    MethodRep& mr = out.per_method[j];
    try {
      IntervalResult th, de;
      switch (methods[j]) {
        case Method::Asymptotic: {
          const PluginMoments pm = PluginMoments::from(ts.control, ts.treatment, opt.eps_log_base);
          const VarianceEstimates ve = finite_sample_variances(ts.control, ts.treatment, pm);
          mr.floors = (ve.floored_theta ? 1u : 0u) + (ve.floored_delta ? 1u : 0u);
          std::tie(th, de) = asymptotic_ci(est, ve, opt.level);
          break;
        }
        case Method::BCa: {
          th = bca_interval(boot, ts, bcfg, Target::Theta);
          de = bca_interval(boot, ts, bcfg, Target::Delta);
          mr.fallbacks = (th.diagnostics->fallback_used ? 1u : 0u) +
                         (de.diagnostics->fallback_used ? 1u : 0u);
          break;
        }
        case Method::CenteredPercentile: {
          th = centered_percentile_interval(boot, bcfg, Target::Theta);
          de = centered_percentile_interval(boot, bcfg, Target::Delta);
          break;
        }
      }
      mr.cover_theta = th.contains(cell.theta);
      mr.cover_delta = de.contains(delta);
      mr.len_theta = th.length();
      mr.len_delta = de.length();
      mr.truncations = truncation_count(th) + truncation_count(de);
    } catch (const Error&) {
      mr.failed = true;
    }
  }
  return out;
}

}  // namespace detail

// Monte Carlo over one cell.  Replication r draws from seed.child(r); results
// land in per-replication slots and are reduced in index order, so the output
// is byte-identical for every thread count.
inline CoverageRow run_cell(const CellSpec& cell, std::size_t R,
                            const std::vector<Method>& methods, Seed seed,
                            const RunOptions& opt = {}) {
  if (R < 1) throw DomainError("run_cell: R must be >= 1");
  if (cell.n < 2) throw DomainError("run_cell: group size must be >= 2");
  if (!(cell.theta > 0.0 && cell.theta <= 1.0)) throw DomainError("run_cell: theta must lie in (0,1]");
  if (!(cell.K >= 0.0)) throw DomainError("run_cell: K must be >= 0");
  if (methods.empty() || methods.size() > 3) throw DomainError("run_cell: need 1..3 methods");

  std::vector<detail::RepOutcome> slots(R);
  auto work = [&](std::size_t r) { slots[r] = detail::run_replication(cell, methods, seed.child(r), opt); };
  const std::size_t workers = std::max<std::size_t>(1, std::min(opt.threads, R));
  if (workers == 1) {
    for (std::size_t r = 0; r < R; ++r) work(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t r = next.fetch_add(1); r < R; r = next.fetch_add(1)) work(r);
      });
    for (auto& t : pool) t.join();
  }

  CoverageRow row;
  row.cell = cell;
  row.R = R;
  row.level = opt.level;
  std::size_t ok = 0;
  for (const auto& s : slots) {
    if (s.failed) continue;
    ++ok;
    row.mean_abs_err_theta += s.abs_err_theta;
    row.mean_abs_err_delta += s.abs_err_delta;
  }
  if (ok > 0) {
    row.mean_abs_err_theta /= static_cast<double>(ok);
    row.mean_abs_err_delta /= static_cast<double>(ok);
  }
  for (std::size_t j = 0; j < methods.size(); ++j) {
    MethodAggregate agg;
    agg.method = methods[j];
    std::size_t used = 0, cov_t = 0, cov_d = 0;
    for (const auto& s : slots) {
      const detail::MethodRep& mr = s.per_method[j];
      if (s.failed || mr.failed) {
        ++agg.failures;
        continue;
      }
      ++used;
      cov_t += mr.cover_theta ? 1 : 0;
      cov_d += mr.cover_delta ? 1 : 0;
      agg.avg_len_theta += mr.len_theta;
      agg.avg_len_delta += mr.len_delta;
      agg.truncations += mr.truncations;
      agg.fallbacks += mr.fallbacks;
      agg.floors += mr.floors;
    }
    if (used > 0) {
      const double du = static_cast<double>(used);
      agg.coverage_theta = static_cast<double>(cov_t) / du;
      agg.coverage_delta = static_cast<double>(cov_d) / du;
      agg.avg_len_theta /= du;
      agg.avg_len_delta /= du;
      agg.mc_se_theta = std::sqrt(agg.coverage_theta * (1.0 - agg.coverage_theta) / du);
      agg.mc_se_delta = std::sqrt(agg.coverage_delta * (1.0 - agg.coverage_delta) / du);
    }
    row.methods.push_back(agg);
  }
  return row;
}

struct SimulationGrid {
  std::vector<FamilySpec> families;
  std::vector<double> thetas;
  std::vector<double> Ks;
  std::vector<std::size_t> sizes;  // m = n
  std::size_t R = 1000;
  double level = 0.95;
  std::vector<Method> methods = {Method::Asymptotic};
  std::size_t B = 1000;
  Seed master;
  std::size_t threads = 1;
  double eps_log_base = std::numbers::e;
};

inline SimulationGrid paper_grid() {
  SimulationGrid g;
  g.families = {FamilySpec{Family::Normal}, FamilySpec{Family::Logistic},
                FamilySpec{Family::Laplace}};
  g.thetas = {0.5, 0.8};
  g.Ks = {1.0, 3.0};
  g.sizes = {25, 50, 100, 500};
  return g;
}

// Cartesian product of cells in declaration order (family, theta, K, size).
// Cell i derives its seed as master.child(i); output order is grid order.
using ProgressFn = std::function<void(std::size_t done, std::size_t total, const CoverageRow&)>;

inline std::vector<CoverageRow> run_grid(const SimulationGrid& grid,
                                         const ProgressFn& progress = nullptr) {
  if (grid.R < 1) throw DomainError("run_grid: R must be >= 1");
  if (!(grid.level > 0.0 && grid.level < 1.0)) throw DomainError("run_grid: level must lie in (0,1)");
  const std::size_t total =
      grid.families.size() * grid.thetas.size() * grid.Ks.size() * grid.sizes.size();
  std::vector<CoverageRow> rows;
  rows.reserve(total);
  RunOptions opt{grid.level, grid.B, grid.threads, grid.eps_log_base};
  std::size_t cell_index = 0;
  for (const auto& fam : grid.families)
    for (double theta : grid.thetas)
      for (double K : grid.Ks)
        for (std::size_t n : grid.sizes) {
          const CellSpec cell{fam, theta, K, n};
          rows.push_back(run_cell(cell, grid.R, grid.methods, grid.master.child(cell_index), opt));
          ++cell_index;
          if (progress) progress(cell_index, total, rows.back());
        }
  return rows;
}

// Raw sampling distribution of (theta_hat, delta_hat) for one cell, plus the
// population-level normal parameters (sd_* = sigma_*/sqrt(n)); sd values are
// NaN when delta = 0, where the population variances are undefined.
struct SamplingDistribution {
  CellSpec cell;
  std::size_t R = 0;
  double theta = 0.0;
  double delta = 0.0;
  double sd_theta = 0.0;
  double sd_delta = 0.0;
  std::vector<double> theta_hat;
  std::vector<double> delta_hat;
};

inline SamplingDistribution export_sampling_distribution(const CellSpec& cell, std::size_t R,
                                                         Seed seed, const RunOptions& opt = {}) {
  if (R < 1) throw DomainError("export_sampling_distribution: R must be >= 1");
  SamplingDistribution sd;
  sd.cell = cell;
  sd.R = R;
  sd.theta = cell.theta;
  sd.delta = cell.delta();
  if (sd.delta > 0.0) {
    const MomentSet momF = theoretical_moments_F(cell.family);
    const MomentSet momG = mixture_moments(momF, MixtureParams{cell.theta, sd.delta});
    const double dn = static_cast<double>(cell.n);
    sd.sd_theta = std::sqrt(sigma2_theta(momF, momG) / dn);
    sd.sd_delta = std::sqrt(sigma2_delta(momF, momG) / dn);
  } else {
    sd.sd_theta = std::numeric_limits<double>::quiet_NaN();
    sd.sd_delta = std::numeric_limits<double>::quiet_NaN();
  }
  sd.theta_hat.reserve(R);
  sd.delta_hat.reserve(R);
  const MixtureParams mix{cell.theta, sd.delta};
  for (std::size_t r = 0; r < R; ++r) {
    const Seed rep = seed.child(r);
    const TwoSample ts = TwoSample::from_observations(
        sample_control(cell.family, cell.n, rep.child(0)),
        sample_treatment(cell.family, mix, cell.n, rep.child(1)));
    const EstimateResult est = estimate(ts, opt.eps_log_base);
    sd.theta_hat.push_back(est.theta_hat);
    sd.delta_hat.push_back(est.delta_hat);
  }
  return sd;
}

}  // namespace mixshift
