// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "dissem/errors.hpp"
#include "dissem/rational.hpp"
#include "dissem/stochastic_sim.hpp"

namespace dissem {

constexpr long kChainPeerCeiling = 512;

inline BigInt binomial(long n, long k) {
  if (k < 0 || k > n) return BigInt(0);
  k = std::min(k, n - k);
  BigInt r(1);
  for (long i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

// Absorbing chain for the whole-file randomized strategy: state i counts
// peers holding the file, every needy peer queries one target per round and
// a queried holder serves exactly one requester. Rows are exact rationals
// stored as integer numerators over a shared denominator.
struct DisseminationChain {
  long n_peers = 0;
  Scenario scenario = Scenario::kList;
  std::vector<std::vector<BigInt>> row_num;  // row i, entry m: P(i -> i+m)
  std::vector<BigInt> row_den;

  Rational probability(long from, long to) const {
    if (from < 0 || from > n_peers || to < from || to > n_peers)
      return Rational(0);
    if (from == n_peers) return to == n_peers ? Rational(1) : Rational(0);
    const auto& row = row_num[static_cast<size_t>(from)];
    long m = to - from;
    if (m >= static_cast<long>(row.size())) return Rational(0);
    return Rational(row[static_cast<size_t>(m)],
                    row_den[static_cast<size_t>(from)]);
  }
};

/// Exact transition rows by direct enumeration of the round mechanics. The
/// chance that exactly m of the u useful targets receive at least one of
/// the R requests is C(u,m) * Delta^m (K+y)^R |_{y=0} / D^R, with D targets
/// per requester of which K are useless.
inline DisseminationChain build_chain(long n_peers, Scenario scenario,
                                      long max_peers = kChainPeerCeiling) {
  if (n_peers > max_peers)
    throw SizeGuard("chain construction capped at " +
                    std::to_string(max_peers) + " peers");
  detail::check(n_peers >= 1, "need at least one peer");
  DisseminationChain chain;
  chain.n_peers = n_peers;
  chain.scenario = scenario;
  const long N = n_peers;
  for (long i = 0; i < N; ++i) {
    const long R = N - i;       // requesters
    const long u = i + 1;       // server plus holders
    const long D = scenario == Scenario::kList ? u : N;
    const long K = D - u;       // queries that cannot succeed
    const long mm = std::min(u, R);
    std::vector<BigInt> vals(static_cast<size_t>(mm + 1));
    for (long y = 0; y <= mm; ++y)
      vals[static_cast<size_t>(y)] = boost::multiprecision::pow(
          BigInt(K + y), static_cast<unsigned>(R));
    std::vector<BigInt> row(static_cast<size_t>(mm + 1));
    BigInt den = boost::multiprecision::pow(BigInt(D),
                                            static_cast<unsigned>(R));
    BigInt sum(0);
    for (long m = 0; m <= mm; ++m) {
      row[static_cast<size_t>(m)] = binomial(u, m) * vals[0];
      detail::check(row[static_cast<size_t>(m)] >= 0,
                    "negative transition numerator");
      sum += row[static_cast<size_t>(m)];
      for (long y = 0; y + m < mm; ++y)
        vals[static_cast<size_t>(y)] =
            vals[static_cast<size_t>(y + 1)] - vals[static_cast<size_t>(y)];
    }
    detail::check(sum == den, "transition row does not sum to one");
    chain.row_num.push_back(std::move(row));
    chain.row_den.push_back(std::move(den));
  }
  return chain;
}

namespace markov_detail {

template <typename Num>
std::vector<Num> hitting_times(const DisseminationChain& chain) {
  const long N = chain.n_peers;
  std::vector<Num> k(static_cast<size_t>(N + 1), Num(0));
  for (long i = N - 1; i >= 0; --i) {
    const auto& row = chain.row_num[static_cast<size_t>(i)];
    const BigInt& den = chain.row_den[static_cast<size_t>(i)];
    if (row[0] == den) throw AbsorbingBeforeTarget(static_cast<int>(i));
    Num acc(den);
    for (long m = 1; m < static_cast<long>(row.size()); ++m)
      acc += Num(row[static_cast<size_t>(m)]) * k[static_cast<size_t>(i + m)];
    k[static_cast<size_t>(i)] = acc / Num(den - row[0]);
  }
  return k;
}

}  // namespace markov_detail

/// Expected rounds to full dissemination from an empty swarm, evaluated in
/// 50-digit floating point (the transition data stays exact).
inline BigFloat expected_makespan(const DisseminationChain& chain) {
  return markov_detail::hitting_times<BigFloat>(chain)[0];
}

/// Exact rational expected rounds; denominators compound quickly, so this
/// is guarded to small chains.
inline Rational expected_makespan_exact(const DisseminationChain& chain,
                                        long max_peers = 64) {
  if (chain.n_peers > max_peers)
    throw SizeGuard("exact hitting times capped at " +
                    std::to_string(max_peers) + " peers");
  return markov_detail::hitting_times<Rational>(chain)[0];
}

/// The address-free transition sum in its published form (server not
/// counted as a target), reparametrized over binomials; reciprocal
/// factorials of negative integers read as zero. Disagrees with the
/// enumeration chain at state 0, which it makes absorbing.
inline Rational eq32_transition(long n_peers, long state, long gain) {
  const long N = n_peers, i = state, m = gain;
  if (N < 2) throw DomainError("published transition form needs N >= 2");
  detail::check(i >= 0 && i <= N && m >= 0 && m <= N - i,
                "state or gain out of range");
  Rational total(0);
  for (long l = 0; l <= m; ++l) {
    Rational base(N - 1 - i + m - l, N - 1);
    Rational term = Rational(binomial(m, l)) *
                    rat_pow(base, static_cast<unsigned>(N - i));
    total += (l % 2 == 0) ? term : -term;
  }
  return Rational(binomial(i, m)) * total;
}

}  // namespace dissem
