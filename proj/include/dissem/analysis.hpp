// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "dissem/equal_optimal.hpp"
#include "dissem/exact_general.hpp"
#include "dissem/fluid.hpp"
#include "dissem/rng.hpp"
#include "dissem/stats.hpp"
#include "dissem/stochastic_sim.hpp"

namespace dissem {

struct ExperimentSpec {
  Scenario scenario = Scenario::kList;
  std::vector<long> m_list;
  std::vector<long> n_grid;
  long replications = 0;
  std::uint64_t master_seed = 0;
};

inline void validate_experiment_spec(const ExperimentSpec& spec) {
  if (spec.m_list.empty() || spec.n_grid.empty())
    throw InvalidInstance("grid", "empty experiment grid");
  if (spec.replications < 2)
    throw InvalidInstance("replications",
                          "need >= 2 runs for variance estimates");
}

struct GrowthRow {
  long m = 0;
  RegressionFit fit;  // makespan (rounds/M) against log2 N
  double centralized_slope = 0;  // 1/M
};

/// Per-run samples for one M over the N grid. Each (N, M) point draws an
/// independent stream from the master seed.
inline std::vector<std::pair<long, double>> collect_samples(
    Scenario scenario, long m, const std::vector<long>& n_grid,
    long replications, std::uint64_t master_seed) {
  std::vector<std::pair<long, double>> pts;
  for (long n : n_grid) {
    std::uint64_t point_seed =
        grid_seed(master_seed, static_cast<std::uint64_t>(n),
                  static_cast<std::uint64_t>(m),
                  scenario == Scenario::kList ? 1 : 2);
    for (long r = 0; r < replications; ++r) {
      long rounds = run_once(n, m, scenario,
                             replication_seed(point_seed,
                                              static_cast<std::uint64_t>(r)));
      pts.emplace_back(n, static_cast<double>(rounds));
    }
  }
  return pts;
}

/// Log-linear growth of the randomized strategy per part count. The fit is
/// computed on round counts and rescaled by 1/M so that slopes compare
/// directly against the centralized coefficient 1/M.
inline std::vector<GrowthRow> growth_report(const ExperimentSpec& spec) {
  validate_experiment_spec(spec);
  std::vector<GrowthRow> rows;
  for (long m : spec.m_list) {
    auto pts = collect_samples(spec.scenario, m, spec.n_grid,
                               spec.replications, spec.master_seed);
    RegressionFit fit = fit_loglinear(pts);
    fit.intercept /= static_cast<double>(m);
    fit.slope /= static_cast<double>(m);
    fit.residual_se /= static_cast<double>(m);
    rows.push_back(GrowthRow{m, fit, 1.0 / static_cast<double>(m)});
  }
  return rows;
}

namespace csvdetail {
inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}
}  // namespace csvdetail

/// CSV of one sample per line: scenario,n,m,replication,rounds.
inline std::string samples_csv(Scenario scenario, long n, long m,
                               const TrialStats& stats) {
  std::string out = "scenario,n,m,replication,rounds\n";
  for (size_t r = 0; r < stats.samples.size(); ++r)
    out += std::string(scenario_name(scenario)) + "," + std::to_string(n) +
           "," + std::to_string(m) + "," + std::to_string(r) + "," +
           std::to_string(stats.samples[r]) + "\n";
  return out;
}

/// CSV of fitted growth rows: m,intercept,slope,r_squared,inv_m.
inline std::string growth_csv(const std::vector<GrowthRow>& rows) {
  std::string out = "m,intercept,slope,r_squared,inv_m\n";
  for (const auto& r : rows)
    out += std::to_string(r.m) + "," + csvdetail::fmt(r.fit.intercept) + "," +
           csvdetail::fmt(r.fit.slope) + "," + csvdetail::fmt(r.fit.r_squared) +
           "," + csvdetail::fmt(r.centralized_slope) + "\n";
  return out;
}

/// Plot-ready CSV: m,decentralized_slope,centralized_slope.
inline std::string slope_comparison_csv(const std::vector<GrowthRow>& rows) {
  std::string out = "m,decentralized_slope,centralized_slope\n";
  for (const auto& r : rows)
    out += std::to_string(r.m) + "," + csvdetail::fmt(r.fit.slope) + "," +
           csvdetail::fmt(r.centralized_slope) + "\n";
  return out;
}

/// Replica profile CSV: round,part,count.
inline std::string replica_profile_csv(const ReplicaProfile& prof) {
  std::string out = "round,part,count\n";
  for (size_t r = 0; r < prof.count.size(); ++r)
    for (long k = 1; k <= prof.n_parts; ++k)
      out += std::to_string(r + 1) + "," + std::to_string(k) + "," +
             std::to_string(prof.count[r][static_cast<size_t>(k - 1)]) + "\n";
  return out;
}

/// Makespans of the four two-peer strategies over a ratio grid
/// (c1_over_cs,makespan_a,makespan_b,makespan_c,makespan_d,best_case).
inline std::string two_by_two_sweep_csv(const std::vector<Rational>& ratios) {
  std::string out = "c1_over_cs,makespan_a,makespan_b,makespan_c,makespan_d,best_case\n";
  for (const auto& r : ratios) {
    auto cases = two_by_two_cases(Rational(1), r);
    auto best = two_by_two_makespan(Rational(1), r);
    out += csvdetail::fmt(to_double(r)) + "," +
           csvdetail::fmt(to_double(cases['A'])) + "," +
           csvdetail::fmt(to_double(cases['B'])) + "," +
           csvdetail::fmt(to_double(cases['C'])) + "," +
           csvdetail::fmt(to_double(cases['D'])) + "," + best.second + "\n";
  }
  return out;
}

/// Infinitely-divisible-file makespan over a ratio grid
/// (c1_over_cs,makespan,alpha).
inline std::string fluid_server_sweep_csv(long n_users,
                                          const std::vector<Rational>& ratios) {
  std::string out = "c1_over_cs,makespan,alpha\n";
  for (const auto& r : ratios) {
    auto [t, alpha] = fluid_single_server(n_users, Rational(1), r);
    out += csvdetail::fmt(to_double(r)) + "," + csvdetail::fmt(to_double(t)) +
           "," + csvdetail::fmt(to_double(alpha)) + "\n";
  }
  return out;
}

}  // namespace dissem
