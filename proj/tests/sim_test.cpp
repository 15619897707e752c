// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <bit>

#include "dissem/markov_exact.hpp"
#include "dissem/stochastic_sim.hpp"

using namespace dissem;

TEST_CASE("rng stack is stable and unbiased enough to trust") {
  Xoshiro256 a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a() == b());
  Xoshiro256 c(7);
  std::vector<long> buckets(5, 0);
  for (int i = 0; i < 50000; ++i) ++buckets[c.below(5)];
  for (long v : buckets) CHECK(std::abs(v - 10000) < 500);
  CHECK(replication_seed(1, 0) != replication_seed(1, 1));
  CHECK(replication_seed(1, 0) != replication_seed(2, 0));
}

TEST_CASE("single peer completes in one round") {
  Xoshiro256 rng(1);
  SwarmState st = SwarmState::initial(1, 1);
  SwarmState next = simulate_round(st, Scenario::kList, rng);
  CHECK(next.complete());
  CHECK(next.round == 1);
  CHECK(st.round == 0);  // the input state is untouched
}

TEST_CASE("blind two-peer round stalls exactly when both cross-query") {
  long stalled = 0, advanced = 0;
  const long trials = 20000;
  for (long s = 0; s < trials; ++s) {
    Xoshiro256 rng(static_cast<std::uint64_t>(s) + 1000);
    SwarmState st = SwarmState::initial(2, 1);
    advance_round(st, Scenario::kNoList, rng);
    long holders = static_cast<long>(st.holders.size());
    if (holders == 0)
      ++stalled;
    else {
      CHECK(holders == 1);  // one grant at most from the empty start
      ++advanced;
    }
  }
  // both peers query each other with chance 1/4
  CHECK(stalled > trials / 4 - 300);
  CHECK(stalled < trials / 4 + 300);
  CHECK(advanced + stalled == trials);
}

TEST_CASE("contention grants exactly one copy") {
  // three peers, one already holding: when both needy peers hit the same
  // holder only one succeeds, otherwise both do
  bool saw_single = false, saw_double = false;
  for (std::uint64_t s = 0; s < 200 && (!saw_single || !saw_double); ++s) {
    Xoshiro256 rng(s);
    SwarmState st = SwarmState::initial(3, 1);
    st.held[0] = st.full;
    st.holders.push_back(1);
    st.complete_peers = 1;
    advance_round(st, Scenario::kList, rng);
    long gained = st.complete_peers - 1;
    if (gained == 1) saw_single = true;
    if (gained == 2) saw_double = true;
    CHECK(gained >= 1);
    CHECK(gained <= 2);
  }
  CHECK(saw_single);
  CHECK(saw_double);
}

TEST_CASE("informed rounds always move something") {
  Xoshiro256 rng(99);
  SwarmState st = SwarmState::initial(9, 3);
  long held_before = 0;
  while (!st.complete()) {
    advance_round(st, Scenario::kList, rng);
    long held_now = 0;
    for (auto h : st.held) held_now += std::popcount(h);
    CHECK(held_now > held_before);
    held_before = held_now;
  }
  CHECK(st.round >= 3 + floor_log2(9));
}

TEST_CASE("config validation") {
  SimConfig cfg;
  cfg.n_peers = 2;
  cfg.n_parts = 2;
  cfg.scenario = Scenario::kNoList;
  cfg.replications = 4;
  CHECK_THROWS_AS(simulate(cfg), InvalidInstance);
  cfg.nolist_multipart = true;
  CHECK_NOTHROW(simulate(cfg));
  cfg.n_parts = 65;
  CHECK_THROWS_AS(simulate(cfg), InvalidInstance);
}

TEST_CASE("identical seeds give identical sample vectors") {
  SimConfig cfg;
  cfg.n_peers = 17;
  cfg.n_parts = 3;
  cfg.scenario = Scenario::kList;
  cfg.seed = 31337;
  cfg.replications = 64;
  TrialStats a = simulate(cfg);
  TrialStats b = simulate(cfg);
  CHECK(a.samples == b.samples);
  cfg.seed = 31338;
  CHECK(simulate(cfg).samples != a.samples);
}

TEST_CASE("informed two-peer runs take exactly two rounds") {
  SimConfig cfg;
  cfg.n_peers = 2;
  cfg.n_parts = 1;
  cfg.scenario = Scenario::kList;
  cfg.seed = 5;
  cfg.replications = 4000;
  TrialStats ts = simulate(cfg);
  CHECK(ts.mean == 2.0);
  CHECK(ts.sd == 0.0);
}

TEST_CASE("sample means land on the exact chain values") {
  struct Case {
    long n;
    Scenario sc;
  };
  for (auto [n, sc] : {Case{2, Scenario::kNoList}, Case{8, Scenario::kList},
                       Case{8, Scenario::kNoList}}) {
    SimConfig cfg;
    cfg.n_peers = n;
    cfg.n_parts = 1;
    cfg.scenario = sc;
    cfg.seed = 424242;
    cfg.replications = 20000;
    TrialStats ts = simulate(cfg);
    double truth =
        expected_makespan(build_chain(n, sc)).convert_to<double>();
    CAPTURE(n, scenario_name(sc), ts.mean, truth);
    CHECK(std::abs(ts.mean - truth) <= 3 * ts.std_error);
    long bound = 1 + floor_log2(n);
    for (long s : ts.samples) CHECK(s >= bound);
  }
}

TEST_CASE("knowing the holders beats probing blindly at every size") {
  for (long n : {2L, 4L, 16L}) {
    SimConfig cfg;
    cfg.n_peers = n;
    cfg.n_parts = 1;
    cfg.seed = 8080;
    cfg.replications = 10000;
    cfg.scenario = Scenario::kList;
    TrialStats informed = simulate(cfg);
    cfg.scenario = Scenario::kNoList;
    TrialStats blind = simulate(cfg);
    CAPTURE(n, informed.mean, blind.mean);
    CHECK(informed.mean < blind.mean);
  }
}

TEST_CASE("splitting the file shortens the makespan in time units") {
  SimConfig one;
  one.n_peers = 2;
  one.n_parts = 1;
  one.scenario = Scenario::kList;
  one.seed = 77;
  one.replications = 20000;
  SimConfig two = one;
  two.n_parts = 2;
  TrialStats t1 = simulate(one);
  TrialStats t2 = simulate(two);
  CHECK(t2.mean / 2.0 < t1.mean - 5 * t1.std_error);
}

TEST_CASE("sweep produces one deterministic row per grid point") {
  auto rows = sweep(Scenario::kList, {2, 4, 8}, {1}, 400, 99);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].mean < rows[1].mean);
  CHECK(rows[1].mean < rows[2].mean);
  for (const auto& r : rows) CHECK(r.n_samples == 400);
  auto again = sweep(Scenario::kList, {2, 4, 8}, {1}, 400, 99);
  for (size_t i = 0; i < rows.size(); ++i)
    CHECK(rows[i].mean == again[i].mean);
  CHECK_THROWS_AS(sweep(Scenario::kList, {}, {1}, 10, 1), DomainError);
}
