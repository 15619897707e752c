// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dissem/core.hpp"
#include "dissem/errors.hpp"
#include "dissem/rational.hpp"
#include "dissem/rng.hpp"

namespace dissem {

enum class Scenario { kList, kNoList };

inline const char* scenario_name(Scenario s) {
  return s == Scenario::kList ? "list" : "nolist";
}

struct SimConfig {
  long n_peers = 0;
  long n_parts = 1;
  Scenario scenario = Scenario::kList;
  std::uint64_t seed = 0;
  long replications = 1;
  // the address-free scenario is defined for whole files; multi-part
  // behaviour is an extension gated behind this switch
  bool nolist_multipart = false;
};

inline void validate_sim_config(const SimConfig& cfg) {
  if (cfg.n_peers < 1) throw InvalidInstance("n_peers", "must be >= 1");
  if (cfg.n_parts < 1 || cfg.n_parts > 64)
    throw InvalidInstance("n_parts", "must be in 1..64");
  if (cfg.replications < 1)
    throw InvalidInstance("replications", "must be >= 1");
  if (cfg.scenario == Scenario::kNoList && cfg.n_parts > 1 &&
      !cfg.nolist_multipart)
    throw InvalidInstance("scenario",
                          "nolist with several parts needs the extension flag");
}

// Synchronous-round swarm. Parts are mask bits; the server (id 0) always
// holds everything.
struct SwarmState {
  long n_peers = 0;
  long n_parts = 0;
  std::uint64_t full = 0;
  std::vector<std::uint64_t> held;  // index peer-1
  std::vector<NodeId> holders;      // peers with >= 1 part, acquisition order
  long complete_peers = 0;
  long round = 0;

  static SwarmState initial(long n, long m) {
    SwarmState st;
    st.n_peers = n;
    st.n_parts = m;
    st.full = m == 64 ? ~0ULL : ((1ULL << m) - 1);
    st.held.assign(static_cast<size_t>(n), 0);
    return st;
  }
  bool complete() const { return complete_peers == n_peers; }
  std::uint64_t held_by(NodeId node) const {
    return node == kServer ? full : held[static_cast<size_t>(node - 1)];
  }
};

namespace sim_detail {

inline long nth_set_bit(std::uint64_t mask, long n) {
  for (long b = 0; b < 64; ++b)
    if (mask & (1ULL << b)) {
      if (n == 0) return b;
      --n;
    }
  throw InternalError("bit index out of range");
}

// Uniform draw over the targets useful to `peer`: the server plus every
// holder offering at least one missing part. Rejection-samples the holder
// list, falling back to full enumeration when acceptance is poor.
inline NodeId pick_list_target(const SwarmState& st, NodeId peer,
                               Xoshiro256& rng) {
  std::uint64_t need = st.full & ~st.held_by(peer);
  const std::uint64_t pool = 1 + st.holders.size();
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::uint64_t r = rng.below(pool);
    if (r == 0) return kServer;
    NodeId cand = st.holders[static_cast<size_t>(r - 1)];
    if (st.held_by(cand) & need) return cand;
  }
  std::vector<NodeId> useful{kServer};
  for (NodeId h : st.holders)
    if (st.held_by(h) & need) useful.push_back(h);
  return useful[static_cast<size_t>(rng.below(useful.size()))];
}

inline NodeId pick_nolist_target(const SwarmState& st, NodeId peer,
                                 Xoshiro256& rng) {
  // server plus the other N-1 peers, self excluded
  std::uint64_t r = rng.below(static_cast<std::uint64_t>(st.n_peers));
  if (r == 0) return kServer;
  NodeId cand = static_cast<NodeId>(r);
  return cand < peer ? cand : cand + 1;
}

}  // namespace sim_detail

/// Advances the swarm by one synchronous round in place: every incomplete
/// peer queries one target, contended targets grant one requester chosen
/// uniformly, and each grant moves one uniformly chosen useful part.
inline void advance_round(SwarmState& st, Scenario scenario, Xoshiro256& rng) {
  detail::check(!st.complete(), "round on a finished swarm");
  const long n = st.n_peers;
  std::vector<NodeId> winner(static_cast<size_t>(n + 1), -1);
  std::vector<std::uint64_t> requests(static_cast<size_t>(n + 1), 0);

  for (NodeId p = 1; p <= n; ++p) {
    if (st.held[static_cast<size_t>(p - 1)] == st.full) continue;
    NodeId target = scenario == Scenario::kList
                        ? sim_detail::pick_list_target(st, p, rng)
                        : sim_detail::pick_nolist_target(st, p, rng);
    auto t = static_cast<size_t>(target);
    if (++requests[t] == 1)
      winner[t] = p;
    else if (rng.below(requests[t]) == 0)
      winner[t] = p;
  }

  struct Grant {
    NodeId to;
    std::uint64_t bit;
  };
  std::vector<Grant> grants;
  for (NodeId t = 0; t <= n; ++t) {
    if (requests[static_cast<size_t>(t)] == 0) continue;
    NodeId w = winner[static_cast<size_t>(t)];
    std::uint64_t avail = st.held_by(t) & ~st.held_by(w) & st.full;
    if (!avail) continue;  // an address-blind query hit a useless peer
    long idx = static_cast<long>(rng.below(
        static_cast<std::uint64_t>(std::popcount(avail))));
    grants.push_back(Grant{w, 1ULL << sim_detail::nth_set_bit(avail, idx)});
  }

  bool had_needy = false;
  for (NodeId p = 1; p <= n; ++p)
    if (st.held[static_cast<size_t>(p - 1)] != st.full) had_needy = true;
  if (scenario == Scenario::kList)
    detail::check(!had_needy || !grants.empty(),
                  "an informed round must move at least one part");

  for (const Grant& g : grants) {
    auto i = static_cast<size_t>(g.to - 1);
    if (st.held[i] == 0) st.holders.push_back(g.to);
    st.held[i] |= g.bit;
    if (st.held[i] == st.full) ++st.complete_peers;
  }
  ++st.round;
}

/// Pure single-round step (copying); advance_round is the in-place variant.
inline SwarmState simulate_round(const SwarmState& st, Scenario scenario,
                                 Xoshiro256& rng) {
  SwarmState next = st;
  advance_round(next, scenario, rng);
  return next;
}

struct TrialStats {
  std::vector<long> samples;  // rounds to full dissemination, per replication
  double mean = 0;
  double sd = 0;
  double std_error = 0;
  double ci95_low = 0;
  double ci95_high = 0;
};

inline TrialStats make_trial_stats(std::vector<long> samples) {
  TrialStats ts;
  ts.samples = std::move(samples);
  const auto n = static_cast<double>(ts.samples.size());
  detail::check(n >= 1, "no samples");
  double sum = 0;
  for (long s : ts.samples) sum += static_cast<double>(s);
  ts.mean = sum / n;
  if (ts.samples.size() > 1) {
    double ss = 0;
    for (long s : ts.samples) {
      double d = static_cast<double>(s) - ts.mean;
      ss += d * d;
    }
    ts.sd = std::sqrt(ss / (n - 1));
    ts.std_error = ts.sd / std::sqrt(n);
  }
  ts.ci95_low = ts.mean - 1.96 * ts.std_error;
  ts.ci95_high = ts.mean + 1.96 * ts.std_error;
  return ts;
}

/// Runs one full dissemination and returns the round count.
inline long run_once(long n_peers, long n_parts, Scenario scenario,
                     std::uint64_t stream_seed) {
  Xoshiro256 rng(stream_seed);
  SwarmState st = SwarmState::initial(n_peers, n_parts);
  while (!st.complete()) advance_round(st, scenario, rng);
  long bound = n_parts + floor_log2(n_peers);
  detail::check(st.round >= bound, "run undercut the deterministic bound");
  return st.round;
}

/// Independent replications; replication r draws stream
/// replication_seed(seed, r), so results do not depend on execution order.
inline TrialStats simulate(const SimConfig& cfg) {
  validate_sim_config(cfg);
  std::vector<long> samples(static_cast<size_t>(cfg.replications));
  for (long r = 0; r < cfg.replications; ++r)
    samples[static_cast<size_t>(r)] =
        run_once(cfg.n_peers, cfg.n_parts, cfg.scenario,
                 replication_seed(cfg.seed, static_cast<std::uint64_t>(r)));
  return make_trial_stats(std::move(samples));
}

struct SweepRow {
  Scenario scenario;
  long n_peers = 0;
  long n_parts = 0;
  double mean = 0;
  double sd = 0;
  long n_samples = 0;
};

/// One row per (N, M) grid point, each point on its own seed stream.
inline std::vector<SweepRow> sweep(Scenario scenario,
                                   const std::vector<long>& n_grid,
                                   const std::vector<long>& m_grid,
                                   long replications, std::uint64_t seed,
                                   bool nolist_multipart = false) {
  if (n_grid.empty() || m_grid.empty())
    throw DomainError("sweep grid is empty");
  std::vector<SweepRow> rows;
  for (long n : n_grid)
    for (long m : m_grid) {
      SimConfig cfg;
      cfg.n_peers = n;
      cfg.n_parts = m;
      cfg.scenario = scenario;
      cfg.replications = replications;
      cfg.nolist_multipart = nolist_multipart;
      cfg.seed = grid_seed(seed, static_cast<std::uint64_t>(n),
                           static_cast<std::uint64_t>(m),
                           scenario == Scenario::kList ? 1 : 2);
      TrialStats ts = simulate(cfg);
      rows.push_back(SweepRow{scenario, n, m, ts.mean, ts.sd,
                              static_cast<long>(ts.samples.size())});
    }
  return rows;
}

}  // namespace dissem
