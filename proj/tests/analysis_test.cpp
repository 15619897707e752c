// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dissem/analysis.hpp"
#include "dissem/cli.hpp"
#include "dissem/json_io.hpp"
#include "dissem/stats.hpp"

using namespace dissem;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int exit_code = 0;
  std::string out;
};

CliRun run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"dissem"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::stringstream captured;
  auto* old = std::cout.rdbuf(captured.rdbuf());
  int code = cli::cli_dispatch(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old);
  return CliRun{code, captured.str()};
}

fs::path temp_dir() {
  auto dir = fs::temp_directory_path() / "dissem_test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("least squares recovers exact linear data") {
  std::vector<std::pair<long, double>> pts;
  for (long n : {2L, 4L, 8L})
    pts.emplace_back(n, 2.0 + 3.0 * std::log2(static_cast<double>(n)));
  RegressionFit fit = fit_loglinear(pts);
  CHECK(fit.intercept == Catch::Approx(2.0).margin(1e-9));
  CHECK(fit.slope == Catch::Approx(3.0).margin(1e-9));
  CHECK(fit.r_squared == Catch::Approx(1.0).margin(1e-12));
  CHECK(fit.n_points == 3);
}

TEST_CASE("least squares needs two distinct sizes") {
  std::vector<std::pair<long, double>> pts{{4, 1.0}, {4, 2.0}, {4, 3.0}};
  CHECK_THROWS_AS(fit_loglinear(pts), DegenerateDesign);
}

TEST_CASE("growth report slopes decrease with more parts") {
  ExperimentSpec spec;
  spec.scenario = Scenario::kList;
  spec.m_list = {1, 2, 3};
  spec.n_grid = {2, 4, 8, 16, 32, 64};
  spec.replications = 60;
  spec.master_seed = 2024;
  auto rows = growth_report(spec);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].fit.slope > rows[1].fit.slope);
  CHECK(rows[1].fit.slope > rows[2].fit.slope);
  for (const auto& r : rows) {
    CHECK(r.fit.slope >= r.centralized_slope);
    CHECK(r.fit.r_squared > 0.9);
  }
  // byte-identical reruns
  CHECK(growth_csv(rows) == growth_csv(growth_report(spec)));
  ExperimentSpec bad = spec;
  bad.m_list.clear();
  CHECK_THROWS_AS(growth_report(bad), InvalidInstance);
  ExperimentSpec single = spec;
  single.replications = 1;  // no variance estimate from one run
  CHECK_THROWS_AS(growth_report(single), InvalidInstance);
}

TEST_CASE("strategy-table sweep switches cases at the printed thresholds") {
  std::string csv = two_by_two_sweep_csv(cli::ratio_grid());
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "c1_over_cs,makespan_a,makespan_b,makespan_c,makespan_d,best_case");
  long k = 0;
  while (std::getline(in, line)) {
    ++k;  // ratio k/60
    char winner = line.back();
    if (k < 20) CHECK(winner == 'A');
    if (k == 20) CHECK(winner == 'A');  // tie at 1/3 keeps the earlier label
    if (k > 20 && k < 60) CHECK(winner == 'C');
    if (k == 60) CHECK(winner == 'C');  // tie at 1
    if (k > 60) CHECK(winner == 'D');
  }
  CHECK(k == 180);
  // the relay-only and swap strategies coincide beyond ratio one
  for (long kk : {60L, 90L, 180L}) {
    auto cases = two_by_two_cases(Rational(1), Rational(kk, 60));
    CHECK(cases['B'] == cases['D']);
  }
}

TEST_CASE("fluid sweep reproduces the infinite-split curve") {
  std::string csv = fluid_server_sweep_csv(2, cli::ratio_grid());
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "c1_over_cs,makespan,alpha");
  long rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    double ratio = std::stod(line.substr(0, line.find(',')));
    double mk = std::stod(line.substr(line.find(',') + 1));
    double expect =
        ratio >= 0.5 ? 1.0 : 2.0 / (1.0 + 2.0 * ratio);
    CHECK(mk == Catch::Approx(expect).margin(1e-9));
  }
  CHECK(rows == 180);
}

TEST_CASE("cli: schedule equal writes a verifier-clean schedule") {
  auto dir = temp_dir();
  auto sched_path = dir / "schedule.json";
  auto run = run_cli({"schedule", "equal", "--n", "3", "--m", "2", "--out",
                      sched_path.string()});
  REQUIRE(run.exit_code == 0);
  ContinuousSchedule cs = schedule_from_json(read_json_file(sched_path.string()));
  Instance inst = uniform_instance(3, 2);
  CHECK(verify_schedule(inst, cs, true).valid);
  CHECK(schedule_makespan(cs) == Rational(3, 2));
  std::string prof = slurp(dir / "schedule.profile.csv");
  CHECK(prof.rfind("round,part,count\n", 0) == 0);
  CHECK(prof.find("3,2,3\n") != std::string::npos);
}

TEST_CASE("cli: usage and domain errors use distinct exit codes") {
  CHECK(run_cli({"frobnicate"}).exit_code == 2);
  CHECK(run_cli({"markov", "--scenario", "sometimes", "--n", "4"}).exit_code ==
        1);
  CHECK(run_cli({"simulate", "--scenario", "nolist", "--n", "4", "--m", "2",
                 "--reps", "5"})
            .exit_code == 1);
  CHECK(run_cli({"--help"}).exit_code == 0);
  CHECK(run_cli({"solve", "table3"}).exit_code == 2);
}

TEST_CASE("cli: markov prints the printed-table value") {
  auto run = run_cli({"markov", "--scenario", "nolist", "--n", "8"});
  REQUIRE(run.exit_code == 0);
  CHECK(run.out.find("5.956") != std::string::npos);
  auto exact = run_cli({"markov", "--scenario", "nolist", "--n", "2",
                        "--exact-rational"});
  CHECK(exact.out.find("7/3") != std::string::npos);
}

TEST_CASE("cli: simulate, fit and report round-trip through files") {
  auto dir = temp_dir();
  auto csv_path = dir / "samples.csv";
  auto run = run_cli({"simulate", "--scenario", "list", "--n", "8", "--m",
                      "1", "--reps", "50", "--seed", "9", "--csv",
                      csv_path.string()});
  REQUIRE(run.exit_code == 0);
  std::string csv = slurp(csv_path);
  CHECK(csv.rfind("scenario,n,m,replication,rounds\n", 0) == 0);
  CHECK(run_cli({"simulate", "--scenario", "list", "--n", "8", "--m", "1",
                 "--reps", "50", "--seed", "9", "--csv", csv_path.string()})
            .out == run.out);

  // fit needs several sizes; stitch two sweeps together
  auto big = dir / "fitme.csv";
  {
    std::ofstream out(big);
    out << "scenario,n,m,replication,rounds\n";
    for (long n : {2L, 4L, 8L, 16L})
      for (long r = 0; r < 30; ++r)
        out << "list," << n << ",1," << r << ","
            << run_once(n, 1, Scenario::kList,
                        replication_seed(grid_seed(5, n, 1, 1),
                                         static_cast<std::uint64_t>(r)))
            << "\n";
  }
  auto fit = run_cli({"fit", "--csv", big.string()});
  REQUIRE(fit.exit_code == 0);
  auto j = json::parse(fit.out);
  CHECK(j.at("n_points").get<long>() == 120);
  CHECK(j.at("slope").get<double>() > 0.8);
  CHECK(j.at("slope").get<double>() < 1.6);

  auto growth = dir / "growth.csv";
  auto plot = dir / "plot.csv";
  auto rep = run_cli({"report", "--scenario", "list", "--m-list", "1,2",
                      "--n-max", "16", "--reps", "20", "--seed", "3", "--out",
                      growth.string(), "--plot-out", plot.string()});
  REQUIRE(rep.exit_code == 0);
  std::string g1 = slurp(growth);
  CHECK(g1.rfind("m,intercept,slope,r_squared,inv_m\n", 0) == 0);
  CHECK(slurp(plot).rfind("m,decentralized_slope,centralized_slope\n", 0) == 0);
  run_cli({"report", "--scenario", "list", "--m-list", "1,2", "--n-max", "16",
           "--reps", "20", "--seed", "3", "--out", growth.string()});
  CHECK(slurp(growth) == g1);
}

TEST_CASE("cli: solvers") {
  auto dir = temp_dir();
  auto inst_path = dir / "inst.json";
  {
    Instance inst = uniform_instance(3, 2);
    write_text_file(inst_path.string(), instance_to_json(inst).dump());
  }
  auto result_path = dir / "result.json";
  auto run = run_cli({"solve", "exact", "--instance", inst_path.string(),
                      "--out", result_path.string()});
  REQUIRE(run.exit_code == 0);
  auto j = read_json_file(result_path.string());
  CHECK(j.at("makespan").get<std::string>() == "3/2");
  CHECK(j.at("status").get<std::string>() == "approximate");
  auto sched = schedule_from_json(j.at("schedule"));
  CHECK(verify_schedule(uniform_instance(3, 2), sched).valid);

  auto t3 = run_cli({"solve", "table3", "--cs", "1", "--c1", "0.2"});
  REQUIRE(t3.exit_code == 0);
  auto tj = parse_json_exact(t3.out);
  CHECK(tj.at("makespan").get<std::string>() == "2");
  CHECK(tj.at("case").get<std::string>() == "A");

  auto fl = run_cli({"solve", "fluid", "--files", "6,1,1", "--caps", "1,1,1"});
  REQUIRE(fl.exit_code == 0);
  auto fj = parse_json_exact(fl.out);
  CHECK(fj.at("makespan").get<std::string>() == "6");
  CHECK(fj.at("effective_capacities")[1].get<std::string>() == "5/6");

  auto fsrv = run_cli(
      {"solve", "fluid-server", "--n", "4", "--cs", "2", "--c1", "1"});
  REQUIRE(fsrv.exit_code == 0);
  auto sj = parse_json_exact(fsrv.out);
  CHECK(sj.at("makespan").get<std::string>() == "2/3");
  CHECK(sj.at("alpha").get<std::string>() == "2/3");
}

TEST_CASE("sample csv format") {
  TrialStats ts = make_trial_stats({3, 4, 5});
  std::string csv = samples_csv(Scenario::kNoList, 4, 1, ts);
  CHECK(csv ==
        "scenario,n,m,replication,rounds\n"
        "nolist,4,1,0,3\n"
        "nolist,4,1,1,4\n"
        "nolist,4,1,2,5\n");
  CHECK(ts.mean == Catch::Approx(4.0));
  CHECK(ts.sd == Catch::Approx(1.0));
}
