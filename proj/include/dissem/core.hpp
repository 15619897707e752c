// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dissem/errors.hpp"
#include "dissem/rational.hpp"

namespace dissem {

// Node ids: 0 is the server, peers are 1..N. The file is 1 MB split into
// n_parts equal parts; capacities are MB/s.
using NodeId = int;
constexpr NodeId kServer = 0;

struct Instance {
  long n_peers = 0;
  long n_parts = 0;
  Rational server_capacity;
  std::vector<Rational> peer_capacities;

  const Rational& capacity(NodeId node) const {
    detail::check(node >= 0 && node <= static_cast<NodeId>(n_peers),
                  "node id out of range");
    return node == kServer ? server_capacity
                           : peer_capacities[static_cast<size_t>(node - 1)];
  }
};

/// Throws InvalidInstance for each violated instance invariant (first one
/// encountered); returns normally iff the instance is well formed.
inline void validate_instance(const Instance& inst) {
  if (inst.n_peers < 1)
    throw InvalidInstance("n_peers", "must be >= 1");
  if (inst.n_parts < 1)
    throw InvalidInstance("n_parts", "must be >= 1");
  if (inst.server_capacity <= 0)
    throw InvalidInstance("server_capacity", "must be > 0");
  if (static_cast<long>(inst.peer_capacities.size()) != inst.n_peers)
    throw InvalidInstance("peer_capacities",
                          "expected exactly " + std::to_string(inst.n_peers) +
                              " entries, got " +
                              std::to_string(inst.peer_capacities.size()));
  for (size_t i = 0; i < inst.peer_capacities.size(); ++i)
    if (inst.peer_capacities[i] < 0)
      throw InvalidInstance("peer_capacities",
                            "entry " + std::to_string(i + 1) + " is negative");
}

// One job: `uploader` sends `part` to `downloader` exclusively at full rate,
// so (end - start) * capacity(uploader) == 1/M.
struct Upload {
  NodeId uploader = 0;
  NodeId downloader = 0;
  long part = 0;
  Rational start;
  Rational end;
};

struct ContinuousSchedule {
  std::vector<Upload> uploads;
};

/// Max end time over all uploads. Throws EmptySchedule when there are none.
inline Rational schedule_makespan(const ContinuousSchedule& sched) {
  if (sched.uploads.empty()) throw EmptySchedule();
  Rational m = sched.uploads.front().end;
  for (const auto& u : sched.uploads)
    if (u.end > m) m = u.end;
  return m;
}

// Round-based schedule: round r (0-based) spans [r, r+1) round units, one
// round unit being 1/(M*C) seconds at common capacity C. Within a round each
// node uploads at most one part and downloads at most one part.
struct RoundUpload {
  NodeId uploader = 0;
  NodeId downloader = 0;
  long part = 0;
};

struct RoundSchedule {
  long n_peers = 0;
  long n_parts = 0;
  std::vector<std::vector<RoundUpload>> rounds;
};

/// Expands a round schedule into continuous uploads of duration 1/(M*C).
inline ContinuousSchedule to_continuous(const RoundSchedule& rs,
                                        const Rational& capacity = Rational(1)) {
  detail::check(capacity > 0, "round expansion needs positive capacity");
  Rational unit = Rational(1) / (Rational(rs.n_parts) * capacity);
  ContinuousSchedule out;
  for (size_t r = 0; r < rs.rounds.size(); ++r) {
    Rational s = Rational(static_cast<long>(r)) * unit;
    for (const auto& ru : rs.rounds[r])
      out.uploads.push_back(
          Upload{ru.uploader, ru.downloader, ru.part, s, s + unit});
  }
  return out;
}

struct Violation {
  std::string constraint;        // e.g. "source-availability"
  std::vector<size_t> uploads;   // offending indices into sched.uploads
  Rational time;                 // where it bites
  std::string detail;
};

struct ReplicaSnapshot {
  Rational time;
  std::vector<long> per_part;  // index part-1, count of peers holding it
};

struct VerificationReport {
  bool valid = false;
  std::vector<Violation> violations;
  Rational makespan;
  std::vector<ReplicaSnapshot> replica_timeline;
};

/// Checks a schedule against the uplink-sharing normal form: exact upload
/// durations, one upload at a time per uploader, one delivery per
/// (downloader, part), completeness, and source availability (a peer may
/// upload a part only after fully receiving it; the server holds everything
/// at time 0). With check_downloads set, also one download at a time per
/// downloader. Violations are reported, never thrown.
inline VerificationReport verify_schedule(const Instance& inst,
                                          const ContinuousSchedule& sched,
                                          bool check_downloads = false) {
  validate_instance(inst);
  VerificationReport rep;
  const long N = inst.n_peers;
  const long M = inst.n_parts;
  auto add = [&rep](std::string name, std::vector<size_t> idx, Rational t,
                    std::string detail) {
    rep.violations.push_back(
        Violation{std::move(name), std::move(idx), std::move(t),
                  std::move(detail)});
  };

  std::vector<size_t> shaped;  // indices that passed basic shape checks
  for (size_t i = 0; i < sched.uploads.size(); ++i) {
    const Upload& u = sched.uploads[i];
    if (u.uploader < 0 || u.uploader > N || u.downloader < 1 ||
        u.downloader > N || u.uploader == u.downloader || u.part < 1 ||
        u.part > M || u.start < 0 || u.end <= u.start) {
      add("malformed", {i}, u.start, "bad node id, part or time interval");
      continue;
    }
    shaped.push_back(i);
  }

  // Duration: exactly one part at the uploader's full rate.
  for (size_t i : shaped) {
    const Upload& u = sched.uploads[i];
    const Rational& cap = inst.capacity(u.uploader);
    if (cap == 0) {
      add("duration", {i}, u.start, "uploader has zero capacity");
    } else if ((u.end - u.start) * cap * M != 1) {
      add("duration", {i}, u.start,
          "expected length " + format_rational(Rational(1) / (cap * M)));
    }
  }

  // Connection: per-uploader intervals must not overlap (touching is fine).
  {
    std::map<NodeId, std::vector<size_t>> by_up;
    for (size_t i : shaped) by_up[sched.uploads[i].uploader].push_back(i);
    for (auto& [node, idxs] : by_up) {
      std::sort(idxs.begin(), idxs.end(), [&](size_t a, size_t b) {
        const auto& ua = sched.uploads[a];
        const auto& ub = sched.uploads[b];
        return ua.start != ub.start ? ua.start < ub.start : a < b;
      });
      for (size_t k = 1; k < idxs.size(); ++k) {
        const auto& prev = sched.uploads[idxs[k - 1]];
        const auto& cur = sched.uploads[idxs[k]];
        if (cur.start < prev.end)
          add("connection", {idxs[k - 1], idxs[k]}, cur.start,
              "uploader " + std::to_string(node) + " uploads overlap");
      }
    }
  }

  if (check_downloads) {
    std::map<NodeId, std::vector<size_t>> by_down;
    for (size_t i : shaped) by_down[sched.uploads[i].downloader].push_back(i);
    for (auto& [node, idxs] : by_down) {
      std::sort(idxs.begin(), idxs.end(), [&](size_t a, size_t b) {
        const auto& ua = sched.uploads[a];
        const auto& ub = sched.uploads[b];
        return ua.start != ub.start ? ua.start < ub.start : a < b;
      });
      for (size_t k = 1; k < idxs.size(); ++k) {
        const auto& prev = sched.uploads[idxs[k - 1]];
        const auto& cur = sched.uploads[idxs[k]];
        if (cur.start < prev.end)
          add("download-overlap", {idxs[k - 1], idxs[k]}, cur.start,
              "downloader " + std::to_string(node) + " downloads overlap");
      }
    }
  }

  // Exclusivity and completeness over (downloader, part) pairs.
  std::map<std::pair<NodeId, long>, std::vector<size_t>> deliveries;
  for (size_t i : shaped)
    deliveries[{sched.uploads[i].downloader, sched.uploads[i].part}]
        .push_back(i);
  for (auto& [key, idxs] : deliveries)
    if (idxs.size() > 1)
      add("exclusivity", idxs, sched.uploads[idxs.front()].start,
          "peer " + std::to_string(key.first) + " receives part " +
              std::to_string(key.second) + " more than once");
  for (NodeId p = 1; p <= N; ++p)
    for (long k = 1; k <= M; ++k)
      if (!deliveries.count({p, k}))
        add("completeness", {}, Rational(0),
            "peer " + std::to_string(p) + " never receives part " +
                std::to_string(k));

  // Source availability: earliest receipt must precede any re-upload.
  for (size_t i : shaped) {
    const Upload& u = sched.uploads[i];
    if (u.uploader == kServer) continue;
    auto it = deliveries.find({u.uploader, u.part});
    bool ok = false;
    size_t receipt = 0;
    if (it != deliveries.end()) {
      const Upload* best = nullptr;
      for (size_t j : it->second) {
        const Upload& r = sched.uploads[j];
        if (!best || r.end < best->end) {
          best = &r;
          receipt = j;
        }
      }
      ok = best && best->end <= u.start;
    }
    if (!ok)
      add("source-availability",
          it == deliveries.end() ? std::vector<size_t>{i}
                                 : std::vector<size_t>{i, receipt},
          u.start,
          "peer " + std::to_string(u.uploader) + " uploads part " +
              std::to_string(u.part) + " before holding it");
  }

  // Replica counts at each completion event (informational).
  {
    std::set<Rational> events;
    for (size_t i : shaped) events.insert(sched.uploads[i].end);
    for (const Rational& t : events) {
      ReplicaSnapshot snap;
      snap.time = t;
      snap.per_part.assign(static_cast<size_t>(M), 0);
      std::set<std::pair<NodeId, long>> have;
      for (size_t i : shaped) {
        const Upload& u = sched.uploads[i];
        if (u.end <= t && have.insert({u.downloader, u.part}).second)
          ++snap.per_part[static_cast<size_t>(u.part - 1)];
      }
      rep.replica_timeline.push_back(std::move(snap));
    }
  }

  std::stable_sort(rep.violations.begin(), rep.violations.end(),
                   [](const Violation& a, const Violation& b) {
                     return a.constraint < b.constraint;
                   });
  rep.makespan = Rational(0);
  for (size_t i : shaped)
    if (sched.uploads[i].end > rep.makespan) rep.makespan = sched.uploads[i].end;
  rep.valid = rep.violations.empty();
  return rep;
}

/// Uniform-capacity instance helper (capacity C for server and all peers).
inline Instance uniform_instance(long n_peers, long n_parts,
                                 const Rational& cap = Rational(1)) {
  Instance inst;
  inst.n_peers = n_peers;
  inst.n_parts = n_parts;
  inst.server_capacity = cap;
  inst.peer_capacities.assign(static_cast<size_t>(n_peers), cap);
  return inst;
}

}  // namespace dissem
