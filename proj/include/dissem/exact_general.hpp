// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <climits>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <unordered_set>
#include <vector>

#include "dissem/core.hpp"
#include "dissem/errors.hpp"
#include "dissem/rational.hpp"

namespace dissem {

/// Time-rescale unit making all positive capacities integral.
inline BigInt rescale_unit(const Instance& inst) {
  BigInt u = rat_den(inst.server_capacity);
  for (const auto& c : inst.peer_capacities)
    if (c > 0) u = lcm(u, rat_den(c));
  return u;
}

/// Step size fine enough that some optimal schedule lies on the grid:
/// 1/(M L)^(M N) in rescaled time, L the lcm of the integer capacities.
inline Rational exact_tau(const Instance& inst) {
  validate_instance(inst);
  BigInt u = rescale_unit(inst);
  BigInt L = rat_num(inst.server_capacity * Rational(u));
  for (const auto& c : inst.peer_capacities)
    if (c > 0) L = lcm(L, rat_num(c * Rational(u)));
  const long e = inst.n_parts * inst.n_peers;
  if (e > 100000) throw SizeGuard("exact step size exponent too large");
  BigInt denom = boost::multiprecision::pow(BigInt(inst.n_parts) * L,
                                            static_cast<unsigned>(e));
  return Rational(u, denom);
}

/// Practical default step: one part at the slowest aligned rate, 1/(M L).
inline Rational practical_tau(const Instance& inst) {
  validate_instance(inst);
  BigInt u = rescale_unit(inst);
  BigInt L = rat_num(inst.server_capacity * Rational(u));
  for (const auto& c : inst.peer_capacities)
    if (c > 0) L = lcm(L, rat_num(c * Rational(u)));
  return Rational(u, BigInt(inst.n_parts) * L);
}

struct SolveResult {
  Rational makespan;            // max true end time of the returned schedule
  Rational grid_makespan;       // minimal feasible horizon on the tau grid
  ContinuousSchedule schedule;
  bool exact = false;
  Rational gap_bound;           // 0 when exact, else N*M*tau
  std::uint64_t nodes_explored = 0;
};

namespace exact_detail {

constexpr std::uint64_t kDefaultNodeLimit = 50'000'000;

// Depth-first feasibility search over whole jobs on the tau grid. Jobs start
// only at time 0 or when another job completes; every minimal-horizon grid
// schedule can be normalized into that shape, so the restriction is lossless.
// The first schedule found under the fixed enumeration order (uploaders by
// ascending id, candidate (downloader, part) pairs in ascending order, idling
// last) is returned, which makes the result deterministic.
struct Search {
  const Instance& inst;
  long N, M, H;
  std::vector<long> dur;  // slots per upload, index 0..N; -1 = cannot upload
  std::uint64_t limit;
  std::uint64_t nodes = 0;

  std::vector<long> busy;               // absolute busy-until slot, 0..N
  std::vector<std::vector<long>> comp;  // [peer-1][part-1] end slot or -1
  struct Job {
    NodeId up;
    NodeId down;
    long part;
    long start;
  };
  std::vector<Job> chosen;
  long scheduled = 0;
  std::unordered_set<std::string> dead;
  std::vector<std::vector<NodeId>> cap_groups;  // equal-capacity peers

  Search(const Instance& inst_, long horizon, const Rational& tau,
         std::uint64_t node_limit)
      : inst(inst_), N(inst_.n_peers), M(inst_.n_parts), H(horizon),
        limit(node_limit) {
    dur.assign(static_cast<size_t>(N + 1), -1);
    for (NodeId u = 0; u <= N; ++u) {
      const Rational& c = inst.capacity(u);
      if (c == 0) continue;
      BigInt d = rat_ceil(Rational(1) / (Rational(M) * c * tau));
      if (d > (BigInt(1) << 40))
        throw SizeGuard("grid step too fine for this capacity spread");
      dur[static_cast<size_t>(u)] = d.convert_to<long>();
    }
    busy.assign(static_cast<size_t>(N + 1), 0);
    comp.assign(static_cast<size_t>(N),
                std::vector<long>(static_cast<size_t>(M), -1));
    std::map<Rational, std::vector<NodeId>> groups;
    for (NodeId p = 1; p <= N; ++p) groups[inst.capacity(p)].push_back(p);
    for (auto& [c, v] : groups) cap_groups.push_back(v);
  }

  bool fresh(NodeId peer) const {
    for (long k = 0; k < M; ++k)
      if (comp[static_cast<size_t>(peer - 1)][static_cast<size_t>(k)] != -1)
        return false;
    return true;
  }

  // Among untouched peers of one capacity class only the least id may be
  // targeted; they are interchangeable.
  bool symmetric_skip(NodeId down) const {
    if (!fresh(down)) return false;
    for (const auto& group : cap_groups) {
      bool contains = false;
      for (NodeId p : group)
        if (p == down) contains = true;
      if (!contains) continue;
      for (NodeId p : group) {
        if (p == down) return false;
        if (fresh(p)) return true;  // smaller fresh twin exists
      }
    }
    return false;
  }

  bool holds(NodeId up, long part, long t) const {
    if (up == kServer) return true;
    long e = comp[static_cast<size_t>(up - 1)][static_cast<size_t>(part - 1)];
    return e != -1 && e <= t;
  }

  std::string encode(long t) const {
    std::string key;
    key.reserve(static_cast<size_t>((N + 1) * (M + 2)) * 4);
    auto put = [&key](long v) {
      key.append(reinterpret_cast<const char*>(&v), sizeof(v));
    };
    put(H - t);
    put(std::max(busy[0] - t, 0L));
    for (const auto& group : cap_groups) {
      std::vector<std::string> members;
      for (NodeId p : group) {
        std::string m;
        auto putm = [&m](long v) {
          m.append(reinterpret_cast<const char*>(&v), sizeof(v));
        };
        putm(std::max(busy[static_cast<size_t>(p)] - t, 0L));
        for (long k = 0; k < M; ++k) {
          long e = comp[static_cast<size_t>(p - 1)][static_cast<size_t>(k)];
          putm(e == -1 ? -1 : std::max(e - t, 0L));
        }
        members.push_back(std::move(m));
      }
      std::sort(members.begin(), members.end());
      for (auto& m : members) key += m;
    }
    return key;
  }

  bool bounds_fail(long t) const {
    long min_dur = LONG_MAX;
    for (long d : dur)
      if (d > 0) min_dur = std::min(min_dur, d);
    if (t + min_dur > H) return true;
    // every untouched part still needs a first upload from the server
    long untouched = 0;
    for (long k = 0; k < M; ++k) {
      bool seen = false;
      for (long i = 0; i < N && !seen; ++i)
        if (comp[static_cast<size_t>(i)][static_cast<size_t>(k)] != -1)
          seen = true;
      if (!seen) ++untouched;
    }
    if (std::max(busy[0], t) + untouched * dur[0] > H) return true;
    // aggregate upload-slot capacity
    long room = 0;
    for (NodeId u = 0; u <= N; ++u) {
      long d = dur[static_cast<size_t>(u)];
      if (d <= 0) continue;
      long free = H - std::max(busy[static_cast<size_t>(u)], t);
      if (free > 0) room += free / d;
      if (room >= N * M - scheduled) return false;
    }
    return room < N * M - scheduled;
  }

  bool dfs(long t) {
    if (scheduled == N * M) return true;
    if (++nodes > limit) throw BudgetExceeded(nodes);
    if (bounds_fail(t)) return false;
    std::string key = encode(t);
    if (dead.count(key)) return false;
    std::vector<NodeId> idle;
    for (NodeId u = 0; u <= N; ++u)
      if (dur[static_cast<size_t>(u)] > 0 &&
          busy[static_cast<size_t>(u)] <= t)
        idle.push_back(u);
    if (pick(t, idle, 0)) return true;
    dead.insert(std::move(key));
    return false;
  }

  bool pick(long t, const std::vector<NodeId>& idle, size_t ui) {
    if (ui == idle.size()) {
      long tn = LONG_MAX;
      for (NodeId u = 0; u <= N; ++u)
        if (busy[static_cast<size_t>(u)] > t)
          tn = std::min(tn, busy[static_cast<size_t>(u)]);
      if (tn == LONG_MAX) return false;  // stalled: nothing ever finishes
      return dfs(tn);
    }
    NodeId u = idle[ui];
    long d = dur[static_cast<size_t>(u)];
    if (t + d <= H) {
      for (NodeId i = 1; i <= N; ++i) {
        if (i == u) continue;
        for (long k = 1; k <= M; ++k) {
          long& slot = comp[static_cast<size_t>(i - 1)][static_cast<size_t>(k - 1)];
          if (slot != -1) continue;
          if (!holds(u, k, t)) continue;
          if (symmetric_skip(i)) continue;
          slot = t + d;
          busy[static_cast<size_t>(u)] = t + d;
          chosen.push_back(Job{u, i, k, t});
          ++scheduled;
          if (pick(t, idle, ui + 1)) return true;
          --scheduled;
          chosen.pop_back();
          busy[static_cast<size_t>(u)] = t;  // was idle at t
          slot = -1;
        }
      }
    }
    return pick(t, idle, ui + 1);  // u idles until the next event
  }
};

}  // namespace exact_detail

/// Searches for a schedule finishing every delivery by time T with all
/// uploads starting on the tau grid. Returns the schedule with true upload
/// durations (ends can undercut the grid), or nothing when the discretized
/// problem is infeasible. Throws BudgetExceeded when the node limit fires
/// before an answer is established.
inline std::optional<ContinuousSchedule> feasible(
    const Instance& inst, const Rational& T, const Rational& tau,
    std::uint64_t node_limit = exact_detail::kDefaultNodeLimit,
    std::uint64_t* nodes_used = nullptr) {
  validate_instance(inst);
  detail::check(tau > 0, "tau must be positive");
  Rational slots = T / tau;
  if (rat_den(slots) != 1 || slots < 0)
    throw DomainError("tau must divide T");
  if (rat_num(slots) > (BigInt(1) << 40))
    throw SizeGuard("horizon has too many grid slots");
  long H = slots.convert_to<long>();
  exact_detail::Search s(inst, H, tau, node_limit);
  bool ok = s.dfs(0);
  if (nodes_used) *nodes_used = s.nodes;
  if (!ok) return std::nullopt;
  ContinuousSchedule sched;
  for (const auto& j : s.chosen) {
    Rational start = Rational(j.start) * tau;
    Rational length =
        Rational(1) / (Rational(inst.n_parts) * inst.capacity(j.up));
    sched.uploads.push_back(Upload{j.up, j.down, j.part, start, start + length});
  }
  return sched;
}

/// Minimal feasible horizon on the tau grid, found by integer bisection on
/// the number of slots. The certified optimality gap is N*M*tau; it
/// collapses to zero at the exact step size.
inline SolveResult min_makespan(
    const Instance& inst, const Rational& tau,
    std::uint64_t node_limit = exact_detail::kDefaultNodeLimit) {
  validate_instance(inst);
  detail::check(tau > 0, "tau must be positive");
  const long N = inst.n_peers, M = inst.n_parts;
  BigInt ds_big = rat_ceil(Rational(1) /
                           (Rational(M) * inst.server_capacity * tau));
  if (BigInt(N) * M * ds_big > (BigInt(1) << 40))
    throw SizeGuard("bisection horizon has too many grid slots");
  long d_s = ds_big.convert_to<long>();
  long lo = M * d_s;
  long hi = N * M * d_s;  // server-serial schedule always fits here
  SolveResult res;
  res.nodes_explored = 0;
  std::optional<ContinuousSchedule> best;
  std::uint64_t used = 0;
  best = feasible(inst, Rational(hi) * tau, tau, node_limit, &used);
  res.nodes_explored += used;
  detail::check(best.has_value(), "server-serial horizon must be feasible");
  long best_h = hi;
  while (lo < hi) {
    long mid = lo + (hi - lo) / 2;
    auto got = feasible(inst, Rational(mid) * tau, tau, node_limit, &used);
    res.nodes_explored += used;
    if (got) {
      best = std::move(got);
      best_h = mid;
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  res.schedule = std::move(*best);
  res.grid_makespan = Rational(best_h) * tau;
  res.makespan = schedule_makespan(res.schedule);
  res.exact = tau == exact_tau(inst);
  res.gap_bound = res.exact ? Rational(0) : Rational(N * M) * tau;
  return res;
}

/// Makespan for two peers sharing capacity C_1 and a single whole file:
/// 1/C_S + min(1/C_S, 1/C_1); a peer with no uplink forces both downloads
/// onto the server.
inline Rational n2_m1_makespan(const Rational& c_s, const Rational& c_1) {
  detail::check(c_s > 0 && c_1 >= 0, "bad capacities");
  Rational direct = Rational(1) / c_s;
  if (c_1 == 0) return 2 * direct;
  return direct + std::min(direct, Rational(1) / c_1);
}

/// The four candidate strategies for two peers and two parts. Returns the
/// best makespan and its case label; ties prefer A, then C, then D, then B.
inline std::pair<Rational, char> two_by_two_makespan(const Rational& c_s,
                                                     const Rational& c_1) {
  detail::check(c_s > 0 && c_1 > 0, "capacities must be positive");
  Rational is = Rational(1) / c_s, ip = Rational(1) / c_1;
  Rational half_is = is / 2, half_ip = ip / 2;
  Rational a = 2 * is;
  Rational b = half_is + half_ip + std::max(half_is, half_ip);
  Rational c = half_is + std::max(is, half_ip);
  Rational d = is + half_ip;
  std::pair<Rational, char> best{a, 'A'};
  if (c < best.first) best = {c, 'C'};
  if (d < best.first) best = {d, 'D'};
  if (b < best.first) best = {b, 'B'};
  return best;
}

/// Evaluates all four case formulas (A, B, C, D) for reporting.
inline std::map<char, Rational> two_by_two_cases(const Rational& c_s,
                                                 const Rational& c_1) {
  Rational is = Rational(1) / c_s, ip = Rational(1) / c_1;
  Rational half_is = is / 2, half_ip = ip / 2;
  std::map<char, Rational> cases;
  cases['A'] = 2 * is;
  cases['B'] = half_is + half_ip + std::max(half_is, half_ip);
  cases['C'] = half_is + std::max(is, half_ip);
  cases['D'] = is + half_ip;
  return cases;
}

/// Breadth-first search over round states for the minimal number of rounds
/// at unit capacities; the independent oracle for the closed form. A round
/// lets every node upload at most one part and every peer download at most
/// one part.
inline long brute_force_rounds(long n_peers, long n_parts, long max_peers = 4,
                               long max_parts = 3) {
  if (n_peers > max_peers || n_parts > max_parts)
    throw SizeGuard("brute_force_rounds limited to " +
                    std::to_string(max_peers) + " peers and " +
                    std::to_string(max_parts) + " parts");
  detail::check(n_peers >= 1 && n_parts >= 1, "need N,M >= 1");
  const long N = n_peers, M = n_parts;
  const unsigned full = (1u << M) - 1u;
  using State = std::vector<unsigned>;  // sorted part masks per peer

  auto canon = [](State s) {
    std::sort(s.begin(), s.end());
    return s;
  };
  auto key_of = [](const State& s) {
    std::string k;
    for (unsigned m : s) k += static_cast<char>(m);
    return k;
  };

  State init(static_cast<size_t>(N), 0u);
  std::unordered_set<std::string> seen{key_of(init)};
  std::queue<std::pair<State, long>> frontier;
  frontier.push({init, 0});

  while (!frontier.empty()) {
    auto [state, depth] = frontier.front();
    frontier.pop();
    bool done = true;
    for (unsigned m : state)
      if (m != full) done = false;
    if (done) return depth;

    // enumerate all round assignments: per downloader either nothing or
    // (uploader, part) with distinct uploaders
    std::vector<State> nexts;
    std::vector<std::pair<int, unsigned>> assign(static_cast<size_t>(N),
                                                 {-1, 0});
    auto rec = [&](auto&& self, long down, unsigned used_uploaders) -> void {
      if (down == N) {
        State ns = state;
        for (long i = 0; i < N; ++i)
          if (assign[static_cast<size_t>(i)].first >= 0)
            ns[static_cast<size_t>(i)] |= assign[static_cast<size_t>(i)].second;
        nexts.push_back(canon(std::move(ns)));
        return;
      }
      self(self, down + 1, used_uploaders);  // downloader sits out
      if (state[static_cast<size_t>(down)] == full) return;
      for (long up = 0; up <= N; ++up) {
        if (used_uploaders & (1u << up)) continue;
        if (up == down + 1) continue;
        unsigned held = up == 0 ? full : state[static_cast<size_t>(up - 1)];
        unsigned options = held & ~state[static_cast<size_t>(down)] & full;
        for (long k = 0; k < M; ++k) {
          if (!(options & (1u << k))) continue;
          assign[static_cast<size_t>(down)] = {static_cast<int>(up),
                                               1u << k};
          self(self, down + 1, used_uploaders | (1u << up));
          assign[static_cast<size_t>(down)] = {-1, 0};
        }
      }
    };
    rec(rec, 0, 0u);

    for (auto& ns : nexts) {
      std::string k = key_of(ns);
      if (seen.insert(std::move(k)).second) frontier.push({ns, depth + 1});
    }
  }
  throw InternalError("round search exhausted without completion");
}

// Discretized view of a schedule: the per-interval download indicators
// x_{ijk}(t), accumulated proportions p_{ik}(t) and completion indicators
// xi_{ik}(t), for checking a schedule against the interval formulation.
// Meaningful when every upload in the schedule is grid aligned.
struct DiscretizedProblem {
  Instance instance;
  Rational tau;
  long horizon = 0;
  // active[t] lists (downloader, uploader, part)
  std::vector<std::vector<std::array<long, 3>>> active;
  std::vector<std::vector<std::vector<Rational>>> p;   // [t][peer-1][part-1]
  std::vector<std::vector<std::vector<bool>>> xi;      // [t][peer-1][part-1]

  static DiscretizedProblem from_schedule(const Instance& inst,
                                          const ContinuousSchedule& sched,
                                          const Rational& tau) {
    validate_instance(inst);
    detail::check(tau > 0, "tau must be positive");
    DiscretizedProblem d;
    d.instance = inst;
    d.tau = tau;
    Rational mk = sched.uploads.empty() ? Rational(0) : schedule_makespan(sched);
    d.horizon = rat_ceil(mk / tau).convert_to<long>();
    const long N = inst.n_peers, M = inst.n_parts, T = d.horizon;
    d.active.assign(static_cast<size_t>(T), {});
    for (long t = 0; t < T; ++t) {
      Rational lo = Rational(t) * tau, hi = Rational(t + 1) * tau;
      for (const auto& u : sched.uploads)
        if (u.start <= lo && u.end >= hi)
          d.active[static_cast<size_t>(t)].push_back(
              {u.downloader, u.uploader, u.part});
    }
    d.p.assign(static_cast<size_t>(T + 1),
               std::vector<std::vector<Rational>>(
                   static_cast<size_t>(N),
                   std::vector<Rational>(static_cast<size_t>(M), Rational(0))));
    for (long t = 0; t < T; ++t) {
      d.p[static_cast<size_t>(t + 1)] = d.p[static_cast<size_t>(t)];
      for (const auto& [i, j, k] : d.active[static_cast<size_t>(t)]) {
        Rational& v =
            d.p[static_cast<size_t>(t + 1)][static_cast<size_t>(i - 1)]
               [static_cast<size_t>(k - 1)];
        v += Rational(M) * tau * inst.capacity(static_cast<NodeId>(j));
        if (v > 1) v = Rational(-1);  // poison: overshoot breaks [0,1]
      }
    }
    d.xi.assign(static_cast<size_t>(T + 1),
                std::vector<std::vector<bool>>(
                    static_cast<size_t>(N),
                    std::vector<bool>(static_cast<size_t>(M), false)));
    for (long t = 0; t <= T; ++t)
      for (long i = 0; i < N; ++i)
        for (long k = 0; k < M; ++k)
          d.xi[static_cast<size_t>(t)][static_cast<size_t>(i)]
              [static_cast<size_t>(k)] =
              d.p[static_cast<size_t>(t)][static_cast<size_t>(i)]
                 [static_cast<size_t>(k)] == 1;
    return d;
  }

  bool is_active(long t, long i, long j, long k) const {
    for (const auto& a : active[static_cast<size_t>(t)])
      if (a[0] == i && a[1] == j && a[2] == k) return true;
    return false;
  }

  /// Names of the interval-formulation constraint families the schedule
  /// violates; empty when fully conformant and complete.
  std::vector<std::string> check_constraints() const {
    std::vector<std::string> bad;
    const long N = instance.n_peers, M = instance.n_parts, T = horizon;
    auto flag = [&bad](const std::string& name) {
      if (std::find(bad.begin(), bad.end(), name) == bad.end())
        bad.push_back(name);
    };
    for (long t = 0; t <= T; ++t)
      for (long i = 0; i < N; ++i)
        for (long k = 0; k < M; ++k) {
          const Rational& v =
              p[static_cast<size_t>(t)][static_cast<size_t>(i)]
                 [static_cast<size_t>(k)];
          if (v < 0 || v > 1) flag("regional");
        }
    for (long t = 0; t < T; ++t) {
      std::map<long, long> per_uploader;
      std::map<std::pair<long, long>, long> per_pair;
      for (const auto& [i, j, k] : active[static_cast<size_t>(t)]) {
        ++per_uploader[j];
        ++per_pair[{i, k}];
        if (j != 0 &&
            !xi[static_cast<size_t>(t)][static_cast<size_t>(j - 1)]
                [static_cast<size_t>(k - 1)])
          flag("source-availability");
        if (xi[static_cast<size_t>(t)][static_cast<size_t>(i - 1)]
              [static_cast<size_t>(k - 1)])
          flag("stopping");
        if (t + 1 <= T &&
            !xi[static_cast<size_t>(t + 1)][static_cast<size_t>(i - 1)]
                [static_cast<size_t>(k - 1)] &&
            t + 1 < T && !is_active(t + 1, i, j, k))
          flag("continuity");
      }
      for (auto& [j, cnt] : per_uploader)
        if (cnt > 1) flag("connection");
      for (auto& [ik, cnt] : per_pair)
        if (cnt > 1) flag("exclusivity");
    }
    Rational total(0);
    for (long i = 0; i < N; ++i)
      for (long k = 0; k < M; ++k)
        total += p[static_cast<size_t>(T)][static_cast<size_t>(i)]
                   [static_cast<size_t>(k)];
    if (total != N * M) flag("objective");
    return bad;
  }
};

}  // namespace dissem
