// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "dissem/core.hpp"
#include "dissem/equal_optimal.hpp"
#include "dissem/exact_general.hpp"

using namespace dissem;

static Instance two_peer(const Rational& cs, const Rational& c1,
                         const Rational& c2, long m) {
  Instance inst;
  inst.n_peers = 2;
  inst.n_parts = m;
  inst.server_capacity = cs;
  inst.peer_capacities = {c1, c2};
  return inst;
}

TEST_CASE("exact step size") {
  CHECK(exact_tau(uniform_instance(1, 1)) == Rational(1));
  CHECK(exact_tau(uniform_instance(2, 2)) == Rational(1, 16));
  CHECK(exact_tau(two_peer(Rational(2), Rational(3), Rational(3), 1)) ==
        Rational(1, 36));
  // fractional capacities get rescaled first
  CHECK(exact_tau(two_peer(Rational(1), Rational(1, 3), Rational(1, 3), 2)) ==
        Rational(1, 432));
  CHECK(practical_tau(uniform_instance(3, 2)) == Rational(1, 2));
  CHECK(practical_tau(two_peer(Rational(2), Rational(3), Rational(3), 1)) ==
        Rational(1, 6));
}

TEST_CASE("feasible finds and refutes horizons") {
  Instance one = uniform_instance(1, 1);
  auto s = feasible(one, Rational(1), Rational(1));
  REQUIRE(s.has_value());
  REQUIRE(s->uploads.size() == 1);
  CHECK(s->uploads[0].start == 0);
  CHECK(s->uploads[0].end == 1);

  Instance three = uniform_instance(3, 2);
  auto ok = feasible(three, Rational(3, 2), Rational(1, 2));
  REQUIRE(ok.has_value());
  CHECK(verify_schedule(three, *ok).valid);
  CHECK(schedule_makespan(*ok) <= Rational(3, 2));

  // any grid schedule is a real schedule, so T below the true optimum
  // must come back infeasible at every step size
  CHECK_FALSE(feasible(three, Rational(7, 5), Rational(1, 10)).has_value());
  CHECK_THROWS_AS(feasible(three, Rational(4, 3), Rational(1, 2)),
                  DomainError);  // tau does not divide T
}

TEST_CASE("min_makespan on the worked two-peer instances") {
  {
    Instance inst = two_peer(Rational(1), Rational(1), Rational(0), 1);
    auto r = min_makespan(inst, exact_tau(inst));
    CHECK(r.exact);
    CHECK(r.makespan == 2);
    CHECK(verify_schedule(inst, r.schedule).valid);
  }
  {
    Instance inst = two_peer(Rational(1), Rational(1), Rational(1), 1);
    auto r = min_makespan(inst, exact_tau(inst));
    CHECK(r.makespan == 2);
  }
  {
    Instance inst = two_peer(Rational(1), Rational(2), Rational(2), 1);
    auto r = min_makespan(inst, exact_tau(inst));
    CHECK(r.makespan == Rational(3, 2));
    CHECK(r.makespan == n2_m1_makespan(Rational(1), Rational(2)));
  }
  {
    Instance inst = uniform_instance(3, 2);
    auto r = min_makespan(inst, exact_tau(inst));
    CHECK(r.exact);
    CHECK(r.makespan == Rational(3, 2));
    CHECK(r.gap_bound == 0);
  }
}

TEST_CASE("min_makespan agrees with the closed form on equal capacities") {
  for (long n = 1; n <= 4; ++n)
    for (long m = 1; m <= 2; ++m) {
      CAPTURE(n, m);
      Instance inst = uniform_instance(n, m);
      auto r = min_makespan(inst, exact_tau(inst));
      CHECK(r.exact);
      CHECK(r.makespan == optimal_makespan_equal(n, m, Rational(1)));
      CHECK(r.grid_makespan == r.makespan);
      auto rep = verify_schedule(inst, r.schedule);
      CHECK(rep.valid);
      CHECK(r.makespan >= Rational(1) / inst.server_capacity);
    }
}

TEST_CASE("coarse steps certify a bounded gap") {
  // two peers at capacity 3: optimum 7/6, grid answer within N*M*tau
  Instance inst = two_peer(Rational(1), Rational(3), Rational(3), 2);
  Rational tau(1, 16);
  auto r = min_makespan(inst, tau);
  CHECK_FALSE(r.exact);
  CHECK(r.gap_bound == Rational(4) * tau);
  Rational truth = two_by_two_makespan(Rational(1), Rational(3)).first;
  CHECK(r.makespan >= truth);
  CHECK(r.grid_makespan >= r.makespan);
  CHECK(r.grid_makespan - truth <= r.gap_bound);
  CHECK(verify_schedule(inst, r.schedule).valid);
}

TEST_CASE("min_makespan is deterministic") {
  Instance inst = two_peer(Rational(1), Rational(2), Rational(1), 2);
  auto a = min_makespan(inst, Rational(1, 8));
  auto b = min_makespan(inst, Rational(1, 8));
  CHECK(a.makespan == b.makespan);
  REQUIRE(a.schedule.uploads.size() == b.schedule.uploads.size());
  for (size_t i = 0; i < a.schedule.uploads.size(); ++i) {
    CHECK(a.schedule.uploads[i].uploader == b.schedule.uploads[i].uploader);
    CHECK(a.schedule.uploads[i].start == b.schedule.uploads[i].start);
  }
}

TEST_CASE("node budget fires as BudgetExceeded") {
  // refuting a horizon just below the optimum takes real search effort
  Instance inst = uniform_instance(4, 2);
  CHECK_THROWS_AS(feasible(inst, Rational(19, 10), Rational(1, 10), 5),
                  BudgetExceeded);
}

TEST_CASE("two-peer single-file closed form") {
  CHECK(n2_m1_makespan(Rational(1), Rational(1)) == 2);
  CHECK(n2_m1_makespan(Rational(1), Rational(3)) == Rational(4, 3));
  CHECK(n2_m1_makespan(Rational(2), Rational(0)) == 1);
}

TEST_CASE("two-by-two case table") {
  auto [m1, c1] = two_by_two_makespan(Rational(1), Rational(1, 5));
  CHECK(m1 == 2);
  CHECK(c1 == 'A');
  auto cases = two_by_two_cases(Rational(1), Rational(1, 5));
  CHECK(cases['C'] == 3);
  CHECK(cases['D'] == Rational(7, 2));
  CHECK(cases['B'] == Rational(11, 2));

  auto [m2, c2] = two_by_two_makespan(Rational(1), Rational(1, 2));
  CHECK(m2 == Rational(3, 2));
  CHECK(c2 == 'C');

  auto [m3, c3] = two_by_two_makespan(Rational(1), Rational(2));
  CHECK(m3 == Rational(5, 4));
  CHECK(c3 == 'D');
  auto more = two_by_two_cases(Rational(1), Rational(2));
  CHECK(more['B'] == more['D']);  // the relay and swap strategies tie here

  // boundary ties keep the earlier label
  CHECK(two_by_two_makespan(Rational(1), Rational(1, 3)).second == 'A');
  CHECK(two_by_two_makespan(Rational(1), Rational(1)).second == 'C');
}

TEST_CASE("round search oracle at small sizes") {
  CHECK(brute_force_rounds(2, 1) == 2);
  CHECK(brute_force_rounds(4, 2) == 4);
  CHECK(brute_force_rounds(1, 2) == 2);
  CHECK(brute_force_rounds(3, 2) == 3);
  CHECK_THROWS_AS(brute_force_rounds(5, 1), SizeGuard);
  CHECK_THROWS_AS(brute_force_rounds(2, 4), SizeGuard);
}

TEST_CASE("solver is permutation invariant and dilates with capacity") {
  Instance inst;
  inst.n_peers = 3;
  inst.n_parts = 2;
  inst.server_capacity = 2;
  inst.peer_capacities = {Rational(1), Rational(3), Rational(1, 2)};
  Rational tau = practical_tau(inst);
  auto base = min_makespan(inst, tau);

  Instance permuted = inst;
  permuted.peer_capacities = {Rational(1, 2), Rational(1), Rational(3)};
  auto other = min_makespan(permuted, tau);
  CHECK(other.grid_makespan == base.grid_makespan);
  CHECK(other.makespan == base.makespan);

  Instance scaled = inst;
  scaled.server_capacity *= 3;
  for (auto& c : scaled.peer_capacities) c *= 3;
  auto fast = min_makespan(scaled, tau / 3);
  CHECK(fast.makespan == base.makespan / 3);
  CHECK(fast.grid_makespan == base.grid_makespan / 3);
}

TEST_CASE("case-table envelope equals the solver at the exact step size") {
  for (const Rational& c1 :
       {Rational(1, 4), Rational(1, 2), Rational(1), Rational(2)}) {
    CAPTURE(format_rational(c1));
    Instance inst = two_peer(Rational(1), c1, c1, 2);
    auto res = min_makespan(inst, exact_tau(inst));
    REQUIRE(res.exact);
    CHECK(res.makespan == two_by_two_makespan(Rational(1), c1).first);
    CHECK(verify_schedule(inst, res.schedule).valid);
  }
}

TEST_CASE("interval view conforms for grid-aligned solver output") {
  Instance inst = uniform_instance(2, 2);
  Rational tau = exact_tau(inst);
  auto r = min_makespan(inst, tau);
  auto d = DiscretizedProblem::from_schedule(inst, r.schedule, tau);
  auto bad = d.check_constraints();
  for (auto& b : bad) UNSCOPED_INFO(b);
  CHECK(bad.empty());
  // a redundant second delivery of a held part trips the view
  ContinuousSchedule wrong = r.schedule;
  wrong.uploads.push_back(wrong.uploads.front());
  auto dwrong = DiscretizedProblem::from_schedule(inst, wrong, tau);
  CHECK_FALSE(dwrong.check_constraints().empty());
}
