// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "dissem/markov_exact.hpp"

using namespace dissem;

TEST_CASE("hand-enumerated two-peer chains") {
  DisseminationChain nolist = build_chain(2, Scenario::kNoList);
  CHECK(nolist.probability(0, 0) == Rational(1, 4));
  CHECK(nolist.probability(0, 1) == Rational(3, 4));
  CHECK(nolist.probability(0, 2) == Rational(0));
  CHECK(nolist.probability(1, 2) == Rational(1));
  CHECK(expected_makespan_exact(nolist) == Rational(7, 3));

  DisseminationChain list = build_chain(2, Scenario::kList);
  CHECK(list.probability(0, 1) == Rational(1));
  CHECK(list.probability(1, 2) == Rational(1));
  CHECK(expected_makespan_exact(list) == Rational(2));
}

TEST_CASE("four-peer informed chain, worked by hand") {
  // requesters pick uniformly among server plus holders; the expected
  // rounds from an empty swarm resolve to 37/12
  DisseminationChain list = build_chain(4, Scenario::kList);
  CHECK(list.probability(1, 2) == Rational(1, 4));
  CHECK(list.probability(1, 3) == Rational(3, 4));
  CHECK(list.probability(2, 3) == Rational(1, 3));
  CHECK(list.probability(2, 4) == Rational(2, 3));
  CHECK(expected_makespan_exact(list) == Rational(37, 12));
}

TEST_CASE("rows sum to one and never move backwards") {
  for (long n : {1L, 2L, 3L, 5L, 8L, 13L, 21L, 64L})
    for (Scenario sc : {Scenario::kList, Scenario::kNoList}) {
      DisseminationChain chain = build_chain(n, sc);
      for (long i = 0; i < n; ++i) {
        Rational sum(0);
        for (long j = 0; j <= n; ++j) {
          if (j < i) CHECK(chain.probability(i, j) == 0);
          sum += chain.probability(i, j);
        }
        CHECK(sum == 1);
      }
    }
}

TEST_CASE("printed table spot values") {
  auto close = [](const BigFloat& got, double want) {
    return std::abs(got.convert_to<double>() - want) <= 0.001;
  };
  CHECK(close(expected_makespan(build_chain(8, Scenario::kList)), 4.172));
  CHECK(close(expected_makespan(build_chain(16, Scenario::kList)), 5.319));
  CHECK(close(expected_makespan(build_chain(4, Scenario::kNoList)), 4.058));
  CHECK(close(expected_makespan(build_chain(8, Scenario::kNoList)), 5.956));
}

TEST_CASE("expected rounds grow with N and the informed side wins") {
  BigFloat prev_list(0), prev_nolist(0);
  for (long n = 2; n <= 128; n *= 2) {
    BigFloat l = expected_makespan(build_chain(n, Scenario::kList));
    BigFloat nl = expected_makespan(build_chain(n, Scenario::kNoList));
    CHECK(l > prev_list);
    CHECK(nl > prev_nolist);
    CHECK(l < nl);
    prev_list = l;
    prev_nolist = nl;
  }
  for (long n = 2; n <= 16; ++n)
    CHECK(expected_makespan_exact(build_chain(n, Scenario::kList)) <=
          expected_makespan_exact(build_chain(n, Scenario::kNoList)));
}

TEST_CASE("published transition sum and its absorbing quirk") {
  // the printed form leaves out the server, so the empty state never moves
  CHECK(eq32_transition(2, 0, 0) == 1);
  CHECK(eq32_transition(7, 0, 0) == 1);
  CHECK(eq32_transition(5, 5, 0) == 1);
  // at one holder the two conventions coincide for N=2
  CHECK(eq32_transition(2, 1, 1) == 1);
  CHECK(build_chain(2, Scenario::kNoList).probability(1, 2) == 1);
  // beyond that they differ: 19/27 printed versus 19/32 enumerated
  CHECK(eq32_transition(4, 1, 1) == Rational(19, 27));
  CHECK(build_chain(4, Scenario::kNoList).probability(1, 2) ==
        Rational(19, 32));
  CHECK_THROWS_AS(eq32_transition(1, 0, 0), DomainError);
}

TEST_CASE("guards") {
  CHECK_THROWS_AS(build_chain(513, Scenario::kList), SizeGuard);
  CHECK_THROWS_AS(expected_makespan_exact(build_chain(65, Scenario::kList)),
                  SizeGuard);
  DisseminationChain stuck;
  stuck.n_peers = 1;
  stuck.scenario = Scenario::kList;
  stuck.row_num = {{BigInt(1)}};
  stuck.row_den = {BigInt(1)};
  CHECK_THROWS_AS(expected_makespan(stuck), AbsorbingBeforeTarget);
}

TEST_CASE("exact and floating evaluations agree") {
  for (long n : {2L, 5L, 16L, 33L}) {
    DisseminationChain chain = build_chain(n, Scenario::kNoList);
    Rational exact = expected_makespan_exact(chain);
    BigFloat approx = expected_makespan(chain);
    BigFloat diff = approx - BigFloat(exact);
    CHECK(boost::multiprecision::abs(diff) < BigFloat("1e-30"));
  }
}
