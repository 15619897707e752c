// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dissem/analysis.hpp"
#include "dissem/core.hpp"
#include "dissem/equal_optimal.hpp"
#include "dissem/exact_general.hpp"
#include "dissem/fluid.hpp"
#include "dissem/json_io.hpp"
#include "dissem/markov_exact.hpp"
#include "dissem/stats.hpp"
#include "dissem/stochastic_sim.hpp"

namespace dissem {
namespace cli {

inline Scenario scenario_from_string(const std::string& s) {
  if (s == "list") return Scenario::kList;
  if (s == "nolist") return Scenario::kNoList;
  throw DomainError("scenario must be list or nolist");
}

inline std::string profile_path_for(const std::string& out) {
  const std::string suffix = ".json";
  if (out.size() > suffix.size() &&
      out.compare(out.size() - suffix.size(), suffix.size(), suffix) == 0)
    return out.substr(0, out.size() - suffix.size()) + ".profile.csv";
  return out + ".profile.csv";
}

inline std::vector<Rational> ratio_grid() {
  std::vector<Rational> grid;
  for (long k = 1; k <= 180; ++k) grid.push_back(Rational(k, 60));
  return grid;
}

inline void emit(const std::string& path, const std::string& text) {
  if (path.empty())
    std::cout << text;
  else
    write_text_file(path, text);
}

inline void run_schedule_equal(long n, long m, const std::string& capacity,
                               const std::string& out,
                               std::string profile_out) {
  Rational cap = parse_rational(capacity);
  if (n < 1 || m < 1) throw DomainError("need --n >= 1 and --m >= 1");
  if (cap <= 0) throw DomainError("capacity must be positive");
  RoundSchedule rs = build_schedule(n, m);
  ContinuousSchedule cs = to_continuous(rs, cap);
  Instance inst = uniform_instance(n, m, cap);
  auto rep = verify_schedule(inst, cs, true);
  detail::check(rep.valid, "constructed schedule failed verification");
  write_text_file(out, schedule_to_json(cs).dump(2) + "\n");
  if (profile_out.empty()) profile_out = profile_path_for(out);
  emit(profile_out, replica_profile_csv(replica_profile(rs, n, m)));
  json summary;
  summary["rounds"] = static_cast<long>(rs.rounds.size());
  summary["makespan"] = format_rational(schedule_makespan(cs));
  summary["schedule"] = out;
  summary["profile_csv"] = profile_out;
  std::cout << summary.dump() << "\n";
}

inline void run_solve_exact(const std::string& instance_path,
                            const std::string& tau_text,
                            std::uint64_t node_limit,
                            const std::string& out) {
  Instance inst = instance_from_json(read_json_file(instance_path));
  Rational tau =
      tau_text.empty() ? practical_tau(inst) : parse_rational(tau_text);
  SolveResult res = min_makespan(inst, tau, node_limit);
  auto rep = verify_schedule(inst, res.schedule);
  detail::check(rep.valid, "solver schedule failed verification");
  json j;
  j["makespan"] = format_rational(res.makespan);
  j["makespan_decimal"] = to_double(res.makespan);
  j["grid_makespan"] = format_rational(res.grid_makespan);
  j["tau"] = format_rational(tau);
  j["status"] = res.exact ? "exact" : "approximate";
  j["gap_bound"] = format_rational(res.gap_bound);
  j["nodes_explored"] = res.nodes_explored;
  j["schedule"] = schedule_to_json(res.schedule);
  if (out.empty())
    std::cout << j.dump(2) << "\n";
  else {
    write_text_file(out, j.dump(2) + "\n");
    json brief;
    brief["makespan"] = j["makespan"];
    brief["status"] = j["status"];
    brief["out"] = out;
    std::cout << brief.dump() << "\n";
  }
}

inline void run_solve_table3(const std::string& cs_text,
                             const std::string& c1_text, bool sweep,
                             const std::string& out) {
  if (sweep) {
    emit(out, two_by_two_sweep_csv(ratio_grid()));
    return;
  }
  Rational cs = parse_rational(cs_text), c1 = parse_rational(c1_text);
  auto cases = two_by_two_cases(cs, c1);
  auto best = two_by_two_makespan(cs, c1);
  json j;
  j["cs"] = format_rational(cs);
  j["c1"] = format_rational(c1);
  for (auto& [label, value] : cases)
    j["cases"][std::string(1, label)] = format_rational(value);
  j["makespan"] = format_rational(best.first);
  j["makespan_decimal"] = to_double(best.first);
  j["case"] = std::string(1, best.second);
  std::cout << j.dump() << "\n";
}

inline void run_solve_fluid(const std::vector<std::string>& files,
                            const std::vector<std::string>& caps,
                            const std::string& plan_out) {
  FluidInstance fi;
  fi.n_users = static_cast<long>(files.size());
  for (const auto& f : files) fi.file_sizes.push_back(parse_rational(f));
  for (const auto& c : caps) fi.capacities.push_back(parse_rational(c));
  validate_fluid_instance(fi);
  TransferPlan plan = build_transfer_plan(fi);
  auto rep = verify_plan(fi, plan);
  detail::check(rep.valid, "constructed plan failed verification");
  json j;
  j["n_users"] = plan.n_users;
  j["makespan"] = format_rational(plan.plan_makespan);
  j["makespan_decimal"] = to_double(plan.plan_makespan);
  json alpha = json::array();
  for (const auto& row : plan.alpha) {
    json r = json::array();
    for (const auto& v : row) r.push_back(format_rational(v));
    alpha.push_back(std::move(r));
  }
  j["alpha"] = std::move(alpha);
  json eff = json::array(), vols = json::array();
  for (long i = 0; i < plan.n_users; ++i) {
    eff.push_back(
        format_rational(plan.effective_capacities[static_cast<size_t>(i)]));
    vols.push_back(format_rational(plan_upload_volume(fi, plan, i)));
  }
  j["effective_capacities"] = std::move(eff);
  j["upload_volumes"] = std::move(vols);
  if (plan_out.empty())
    std::cout << j.dump(2) << "\n";
  else {
    write_text_file(plan_out, j.dump(2) + "\n");
    json brief;
    brief["makespan"] = j["makespan"];
    brief["plan"] = plan_out;
    std::cout << brief.dump() << "\n";
  }
}

inline void run_solve_fluid_server(long n, const std::string& cs_text,
                                   const std::string& c1_text, bool sweep,
                                   const std::string& out) {
  if (sweep) {
    emit(out, fluid_server_sweep_csv(n, ratio_grid()));
    return;
  }
  Rational cs = parse_rational(cs_text), c1 = parse_rational(c1_text);
  auto [t, alpha] = fluid_single_server(n, cs, c1);
  json j;
  j["n"] = n;
  j["makespan"] = format_rational(t);
  j["makespan_decimal"] = to_double(t);
  j["alpha"] = format_rational(alpha);
  std::cout << j.dump() << "\n";
}

inline void run_simulate(const std::string& scenario_text, long n, long m,
                         long reps, std::uint64_t seed,
                         const std::string& csv_out, bool nolist_multipart) {
  SimConfig cfg;
  cfg.scenario = scenario_from_string(scenario_text);
  cfg.n_peers = n;
  cfg.n_parts = m;
  cfg.replications = reps;
  cfg.seed = seed;
  cfg.nolist_multipart = nolist_multipart;
  TrialStats ts = simulate(cfg);
  if (!csv_out.empty())
    write_text_file(csv_out, samples_csv(cfg.scenario, n, m, ts));
  long lo = ts.samples.front(), hi = ts.samples.front();
  for (long s : ts.samples) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  json j;
  j["scenario"] = scenario_text;
  j["n"] = n;
  j["m"] = m;
  j["replications"] = reps;
  j["seed"] = seed;
  j["mean_rounds"] = ts.mean;
  j["mean_makespan"] = ts.mean / static_cast<double>(m);
  j["sd"] = ts.sd;
  j["std_error"] = ts.std_error;
  j["ci95"] = {ts.ci95_low, ts.ci95_high};
  j["min"] = lo;
  j["max"] = hi;
  if (!csv_out.empty()) j["csv"] = csv_out;
  std::cout << j.dump() << "\n";
}

inline void run_markov(const std::string& scenario_text, long n,
                       bool exact_rational) {
  Scenario sc = scenario_from_string(scenario_text);
  DisseminationChain chain = build_chain(n, sc);
  BigFloat rounds = expected_makespan(chain);
  json j;
  j["n"] = n;
  j["scenario"] = scenario_text;
  j["expected_rounds"] = rounds.str(15, std::ios_base::fixed);
  if (exact_rational)
    j["exact"] = format_rational(expected_makespan_exact(chain));
  std::cout << j.dump() << "\n";
}

inline void run_fit(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw DomainError("cannot open " + csv_path);
  std::string line;
  if (!std::getline(in, line) ||
      line != "scenario,n,m,replication,rounds")
    throw DomainError("expected header scenario,n,m,replication,rounds");
  std::vector<std::pair<long, double>> pts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    size_t pos = 0;
    while (true) {
      size_t comma = line.find(',', pos);
      cells.push_back(line.substr(pos, comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (cells.size() != 5) throw DomainError("bad csv row: " + line);
    try {
      pts.emplace_back(std::stol(cells[1]), std::stod(cells[4]));
    } catch (const std::exception&) {
      throw DomainError("bad csv row: " + line);
    }
  }
  RegressionFit fit = fit_loglinear(pts);
  json j;
  j["n_points"] = fit.n_points;
  j["intercept"] = fit.intercept;
  j["slope"] = fit.slope;
  j["r_squared"] = fit.r_squared;
  j["residual_se"] = fit.residual_se;
  std::cout << j.dump() << "\n";
}

inline void run_report(const std::string& scenario_text,
                       std::vector<long> m_list, long n_max, long reps,
                       std::uint64_t seed, const std::string& out,
                       const std::string& plot_out) {
  ExperimentSpec spec;
  spec.scenario = scenario_from_string(scenario_text);
  spec.m_list = std::move(m_list);
  for (long n = 2; n <= n_max; n *= 2) spec.n_grid.push_back(n);
  spec.replications = reps;
  spec.master_seed = seed;
  auto rows = growth_report(spec);
  emit(out, growth_csv(rows));
  if (!plot_out.empty()) write_text_file(plot_out, slope_comparison_csv(rows));
}

/// Routes argv to the toolkit commands. Exit codes: 0 on success, 1 on a
/// domain error, 2 on a usage error.
inline int cli_dispatch(int argc, const char* const* argv) {
  CLI::App app{"makespan bounds, schedules and simulations for spreading a "
               "file from a server through cooperating peers"};
  app.require_subcommand(1);

  // schedule equal
  auto* schedule = app.add_subcommand("schedule", "construct schedules");
  schedule->require_subcommand(1);
  auto* equal = schedule->add_subcommand(
      "equal", "optimal round schedule for equal capacities");
  struct {
    long n = 0, m = 0;
    std::string capacity = "1", out, profile;
  } eq;
  equal->add_option("--n", eq.n, "number of peers")->required();
  equal->add_option("--m", eq.m, "number of file parts")->required();
  equal->add_option("--capacity", eq.capacity,
                    "common upload capacity in MB/s (rational)");
  equal->add_option("--out", eq.out, "schedule JSON path")->required();
  equal->add_option("--profile-csv", eq.profile,
                    "replica profile CSV path (default: out with "
                    ".profile.csv)");
  equal->callback([&eq] {
    run_schedule_equal(eq.n, eq.m, eq.capacity, eq.out, eq.profile);
  });

  // solve {exact|table3|fluid|fluid-server}
  auto* solve = app.add_subcommand("solve", "makespan solvers");
  solve->require_subcommand(1);

  auto* exact = solve->add_subcommand(
      "exact", "minimal makespan by discretized search plus bisection");
  struct {
    std::string instance, tau, out;
    std::uint64_t node_limit = exact_detail::kDefaultNodeLimit;
  } ex;
  exact->add_option("--instance", ex.instance, "instance JSON path")
      ->required();
  exact->add_option("--tau", ex.tau,
                    "grid step as a rational (default 1/(M L))");
  exact->add_option("--node-limit", ex.node_limit, "search node budget");
  exact->add_option("--out", ex.out, "result JSON path (default stdout)");
  exact->callback(
      [&ex] { run_solve_exact(ex.instance, ex.tau, ex.node_limit, ex.out); });

  auto* table3 = solve->add_subcommand(
      "table3", "two peers, two parts: the four strategy makespans");
  struct {
    std::string cs = "1", c1, out;
    bool sweep = false;
  } t3;
  table3->add_option("--cs", t3.cs, "server capacity (rational)");
  table3->add_option("--c1", t3.c1, "peer capacity (rational)");
  table3->add_flag("--sweep", t3.sweep, "emit CSV over a ratio grid");
  table3->add_option("--out", t3.out, "CSV path for --sweep");
  table3->callback([&t3] {
    if (!t3.sweep && t3.c1.empty())
      throw CLI::RequiredError("--c1 (or --sweep)");
    run_solve_table3(t3.cs, t3.c1, t3.sweep, t3.out);
  });

  auto* fluid = solve->add_subcommand(
      "fluid", "infinitely divisible files from several sources");
  struct {
    std::vector<std::string> files, caps;
    std::string plan;
  } fl;
  fluid->add_option("--files", fl.files, "per-user file sizes in MB")
      ->required()
      ->delimiter(',');
  fluid->add_option("--caps", fl.caps, "per-user capacities in MB/s")
      ->required()
      ->delimiter(',');
  fluid->add_option("--plan", fl.plan, "plan JSON path (default stdout)");
  fluid->callback([&fl] { run_solve_fluid(fl.files, fl.caps, fl.plan); });

  auto* fserver = solve->add_subcommand(
      "fluid-server", "one server, identical peers, infinitely many parts");
  struct {
    long n = 0;
    std::string cs = "1", c1, out;
    bool sweep = false;
  } fs;
  fserver->add_option("--n", fs.n, "number of peers")->required();
  fserver->add_option("--cs", fs.cs, "server capacity (rational)");
  fserver->add_option("--c1", fs.c1, "peer capacity (rational)");
  fserver->add_flag("--sweep", fs.sweep, "emit CSV over a ratio grid");
  fserver->add_option("--out", fs.out, "CSV path for --sweep");
  fserver->callback([&fs] {
    if (!fs.sweep && fs.c1.empty())
      throw CLI::RequiredError("--c1 (or --sweep)");
    run_solve_fluid_server(fs.n, fs.cs, fs.c1, fs.sweep, fs.out);
  });

  // simulate
  auto* sim = app.add_subcommand(
      "simulate", "randomized dissemination, synchronous rounds");
  struct {
    std::string scenario, csv;
    long n = 0, m = 1, reps = 1000;
    std::uint64_t seed = 1;
    bool nolist_multipart = false;
  } sm;
  sim->add_option("--scenario", sm.scenario, "list or nolist")->required();
  sim->add_option("--n", sm.n, "number of peers")->required();
  sim->add_option("--m", sm.m, "number of file parts");
  sim->add_option("--reps", sm.reps, "independent replications");
  sim->add_option("--seed", sm.seed, "master seed")->envname("DISSEM_SEED");
  sim->add_option("--csv", sm.csv, "per-replication CSV path");
  sim->add_flag("--allow-nolist-multipart", sm.nolist_multipart,
                "enable the multi-part extension of the nolist scenario");
  sim->callback([&sm] {
    run_simulate(sm.scenario, sm.n, sm.m, sm.reps, sm.seed, sm.csv,
                 sm.nolist_multipart);
  });

  // markov
  auto* mk = app.add_subcommand(
      "markov", "exact expected rounds for the whole-file strategy");
  struct {
    std::string scenario;
    long n = 0;
    bool exact = false;
  } mo;
  mk->add_option("--scenario", mo.scenario, "list or nolist")->required();
  mk->add_option("--n", mo.n, "number of peers")->required();
  mk->add_flag("--exact-rational", mo.exact,
               "also report the exact rational (small N only)");
  mk->callback([&mo] { run_markov(mo.scenario, mo.n, mo.exact); });

  // fit
  auto* fit = app.add_subcommand(
      "fit", "least squares of rounds against log2 N from a samples CSV");
  struct {
    std::string csv;
  } ft;
  fit->add_option("--csv", ft.csv, "samples CSV (simulate --csv format)")
      ->required();
  fit->callback([&ft] { run_fit(ft.csv); });

  // report
  auto* report = app.add_subcommand(
      "report", "growth-rate table over part counts");
  struct {
    std::string scenario = "list", out, plot;
    std::vector<long> m_list{1};
    long n_max = 1024, reps = 100;
    std::uint64_t seed = 1;
  } rp;
  report->add_option("--scenario", rp.scenario, "list or nolist");
  report->add_option("--m-list", rp.m_list, "part counts")->delimiter(',');
  report->add_option("--n-max", rp.n_max, "peer grid top (powers of two)");
  report->add_option("--reps", rp.reps, "replications per grid point");
  report->add_option("--seed", rp.seed, "master seed")->envname("DISSEM_SEED");
  report->add_option("--out", rp.out, "growth CSV path (default stdout)");
  report->add_option("--plot-out", rp.plot, "slope comparison CSV path");
  report->callback([&rp] {
    run_report(rp.scenario, rp.m_list, rp.n_max, rp.reps, rp.seed, rp.out,
               rp.plot);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace cli
}  // namespace dissem
