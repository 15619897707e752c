// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <vector>

#include "dissem/core.hpp"
#include "dissem/errors.hpp"
#include "dissem/rational.hpp"

namespace dissem {

/// Minimum number of rounds to spread M parts to N peers with equal unit
/// capacities: M + floor(log2 N).
inline long optimal_rounds(long n_peers, long n_parts) {
  detail::check(n_peers >= 1 && n_parts >= 1, "optimal_rounds needs N,M >= 1");
  return n_parts + floor_log2(n_peers);
}

/// Minimal makespan (1 + floor(log2 N)/M) / C when every node uploads at C.
inline Rational optimal_makespan_equal(long n_peers, long n_parts,
                                       const Rational& common_capacity) {
  detail::check(common_capacity > 0, "capacity must be positive");
  return Rational(optimal_rounds(n_peers, n_parts), n_parts) / common_capacity;
}

/// Replica counts per (round, part): count[r][k-1] is the number of peers
/// holding part k at the end of round r+1.
struct ReplicaProfile {
  long n_peers = 0;
  long n_parts = 0;
  std::vector<std::vector<long>> count;
};

/// Replica count the constructive schedule attains for `part` at the end of
/// `round`, valid for rounds >= floor(log2 N). Columns follow the shiftable
/// pattern: part i has 2^(n+j-i) copies at round n+j (entries below 1 read
/// as 0), the last part one fewer, and everything older is complete.
inline long predicted_replica_count(long n_peers, long n_parts, long part,
                                    long round) {
  const long n = floor_log2(n_peers);
  const long j = round - n;
  detail::check(j >= 0 && round <= optimal_rounds(n_peers, n_parts),
                "predicted_replica_count: round out of range");
  detail::check(part >= 1 && part <= n_parts, "part out of range");
  if (round == optimal_rounds(n_peers, n_parts)) return n_peers;
  if (part < j) return n_peers;
  auto p2 = [](long e) { return e >= 0 ? (1L << e) : 0L; };
  if (part == n_parts) return std::max(p2(n + j - n_parts + 1) - 1, 0L);
  return p2(n + j - part);
}

namespace equal_detail {

struct Builder {
  long N, M, n, x, fl, ce;
  std::vector<std::vector<RoundUpload>> rounds;

  // Holdings are tracked implicitly through the class structure; a debug
  // holdings table guards the construction.
  std::vector<std::vector<bool>> holds;  // [peer 1..N][part 1..M]

  explicit Builder(long N_, long M_) : N(N_), M(M_) {
    n = floor_log2(N);
    x = N - (1L << n) + 1;
    fl = x / 2;
    ce = x - fl;
    holds.assign(static_cast<size_t>(N + 1),
                 std::vector<bool>(static_cast<size_t>(M + 1), false));
  }

  void emit(std::vector<RoundUpload>& round, NodeId up, NodeId down, long part) {
    detail::check(up != down && down >= 1, "bad upload pair");
    detail::check(up == kServer || holds[up][part], "uploader lacks part");
    detail::check(!holds[down][part], "downloader already has part");
    round.push_back(RoundUpload{up, down, part});
  }

  void close_round(std::vector<RoundUpload>& round) {
    for (const auto& u : round) holds[u.downloader][u.part] = true;
    rounds.push_back(std::move(round));
  }

  long pw(long e) const { return e >= 0 ? (1L << e) : 0L; }

  // Rounds 1..n: every part holder re-uploads its only part to a peer that
  // has nothing yet, the server injecting part min(j, M).
  void seeding(std::vector<std::vector<NodeId>>& singles,
               std::deque<NodeId>& empties) {
    for (long j = 1; j <= n; ++j) {
      std::vector<RoundUpload> round;
      std::vector<std::vector<NodeId>> grown = singles;
      for (long p = 1; p <= M; ++p)
        for (NodeId holder : singles[p]) {
          NodeId t = empties.front();
          empties.pop_front();
          emit(round, holder, t, p);
          grown[p].push_back(t);
        }
      long q = std::min(j, M);
      NodeId t = empties.front();
      empties.pop_front();
      emit(round, kServer, t, q);
      grown[q].push_back(t);
      for (auto& v : grown) std::sort(v.begin(), v.end());
      singles = std::move(grown);
      close_round(round);
    }
  }

  void build_m1() {
    std::vector<NodeId> holders;
    std::deque<NodeId> empties;
    for (NodeId p = 1; p <= N; ++p) empties.push_back(p);
    while (!empties.empty()) {
      std::vector<RoundUpload> round;
      std::vector<NodeId> grown = holders;
      if (!empties.empty()) {
        NodeId t = empties.front();
        empties.pop_front();
        emit(round, kServer, t, 1);
        grown.push_back(t);
      }
      for (NodeId h : holders) {
        if (empties.empty()) break;
        NodeId t = empties.front();
        empties.pop_front();
        emit(round, h, t, 1);
        grown.push_back(t);
      }
      std::sort(grown.begin(), grown.end());
      holders = std::move(grown);
      close_round(round);
    }
  }

  // Last round everywhere: x peers miss only the last part, x-1 miss only
  // the one before; they trade, the server covering the odd one out.
  void final_round(const std::vector<NodeId>& needs_last,
                   const std::vector<NodeId>& needs_prev) {
    detail::check(static_cast<long>(needs_last.size()) == x &&
                      static_cast<long>(needs_prev.size()) == x - 1,
                  "final round class sizes off");
    std::vector<RoundUpload> round;
    for (long k = 0; k + 1 < x; ++k) {
      emit(round, needs_last[k], needs_prev[k], M == 1 ? 1 : M - 1);
      emit(round, needs_prev[k], needs_last[k], M);
    }
    emit(round, kServer, needs_last[x - 1], M);
    close_round(round);
  }

  void build_m2() {
    if (n == 0) {  // N == 1
      for (long p = 1; p <= 2; ++p) {
        std::vector<RoundUpload> round;
        emit(round, kServer, 1, p);
        close_round(round);
      }
      return;
    }
    std::vector<std::vector<NodeId>> singles(M + 1);
    std::deque<NodeId> empties;
    for (NodeId p = 1; p <= N; ++p) empties.push_back(p);
    seeding(singles, empties);
    std::vector<NodeId> a1 = singles[1], a2 = singles[2];
    std::vector<NodeId> a0(empties.begin(), empties.end());
    detail::check(static_cast<long>(a1.size()) == pw(n - 1) &&
                      static_cast<long>(a2.size()) == pw(n - 1) - 1 &&
                      static_cast<long>(a0.size()) == x,
                  "seeding left unexpected sets");

    std::vector<RoundUpload> round;
    std::vector<NodeId> only1, only2;
    if (x == 1) {
      // Part 1 to all of a2 and the lone empty; part 2 from a2 and the
      // server covers all of a1.
      size_t t = 0;
      for (NodeId target : a2) emit(round, a1[t++], target, 1);
      emit(round, a1[t++], a0[0], 1);
      for (size_t k = 0; k < a2.size(); ++k) emit(round, a2[k], a1[k], 2);
      emit(round, kServer, a1.back(), 2);
      only1 = {a0[0]};
    } else {
      long to_a2 = pw(n - 1) - fl;   // part-1 uploads into a2
      long to_a0_1 = fl;             // part-1 uploads into empties
      long to_a1 = pw(n - 1) - ce;   // part-2 uploads into a1
      long to_a0_2 = ce - 1;         // part-2 uploads into empties
      size_t up = 0;
      for (long k = 0; k < to_a2; ++k) emit(round, a1[up++], a2[k], 1);
      for (long k = 0; k < to_a0_1; ++k) emit(round, a1[up++], a0[k], 1);
      detail::check(up == a1.size(), "a1 uploads exhausted");
      up = 0;
      for (long k = 0; k < to_a1; ++k) emit(round, a2[up++], a1[k], 2);
      for (long k = 0; k < to_a0_2; ++k)
        emit(round, a2[up++], a0[to_a0_1 + k], 2);
      detail::check(up == a2.size(), "a2 uploads exhausted");
      emit(round, kServer, a0[x - 1], 2);
      only1.assign(a1.begin() + to_a1, a1.end());
      only1.insert(only1.end(), a0.begin(), a0.begin() + to_a0_1);
      only2.assign(a2.begin() + to_a2, a2.end());
      only2.insert(only2.end(), a0.begin() + to_a0_1, a0.end());
    }
    close_round(round);
    std::sort(only1.begin(), only1.end());
    std::sort(only2.begin(), only2.end());
    final_round(only1, only2);
  }

  // M >= 3. Class state between rounds n+1 .. n+M-1, relative to part a=j:
  //   A: holds {j, j+1}   B[p]: holds {j, p}, p >= j+2   C: holds {j}
  //   D: holds {j+1}      E[p]: holds {p}
  // with all parts below j universal. Sizes are 2^(n-1)-fl, 2^(n-1)-ce, x,
  // fl, ce-1 respectively.
  struct Classes {
    std::vector<NodeId> A, C, D;
    std::map<long, std::vector<NodeId>> B, E;
    long countB() const {
      long s = 0;
      for (auto& [p, v] : B) s += static_cast<long>(v.size());
      return s;
    }
    long countE() const {
      long s = 0;
      for (auto& [p, v] : E) s += static_cast<long>(v.size());
      return s;
    }
  };

  Classes round_np1(std::vector<std::vector<NodeId>>& singles,
                    std::deque<NodeId>& emptq) {
    std::vector<NodeId> empties(emptq.begin(), emptq.end());
    const long q = std::min(n + 1, M);
    std::vector<long> h(M + 1, 0), sup(M + 1, 0);
    for (long p = 1; p <= M; ++p) {
      h[p] = static_cast<long>(singles[p].size());
      sup[p] = h[p] + (p == q ? 1 : 0);
    }
    const long sizeA = pw(n - 1) - fl;
    const long sizeB = pw(n - 1) - ce;
    const long sizeE = ce - 1;

    // Splits around part 2, upgrading existing holders first.
    const long r21 = std::min(h[2], sizeA);
    const long r12 = sizeA - r21;
    detail::check(r12 >= 0 && r12 <= sup[2], "part-2 split infeasible");
    const long e2emp = sup[2] - r12;
    const long z2 = h[2] - r21;
    detail::check(z2 + e2emp == fl, "only-part-2 class size off");

    // Target composition of E over parts >= 3. Pushed as high as allowed:
    // a later round may hold at most fl singles of its incoming part.
    std::vector<long> Et(M + 1, 0), Bt(M + 1, 0), countP(M + 1, 0);
    long budget = sizeE;
    for (long p = 3; p <= M; ++p) countP[p] = h[p] + sup[p];
    for (long p = 3; p <= M && budget > 0; ++p) {
      long cap = p < M ? std::min(fl, countP[p]) : countP[p];
      Et[p] = std::min(budget, cap);
      budget -= Et[p];
    }
    detail::check(budget == 0, "could not place only-part singles");
    for (long p = 3; p <= M; ++p) {
      Bt[p] = countP[p] - Et[p];
      detail::check(Bt[p] >= 0, "negative pair class");
    }
    detail::check([&] {
      long s = 0;
      for (long p = 3; p <= M; ++p) s += Bt[p];
      return s == sizeB;
    }(), "pair classes do not sum");

    // Per-part receiver split: r1p from part-1 holders, the rest of each
    // part's uploads land on empties.
    std::vector<long> r1p(M + 1, 0), rp1(M + 1, 0), ep(M + 1, 0), zp(M + 1, 0);
    long lo = 0, hi = 0;
    for (long p = 3; p <= M; ++p) {
      lo += std::max(0L, Bt[p] - h[p]);
      hi += std::min(sup[p], Bt[p]);
    }
    long want = h[1] - r12;  // serve every part-1 holder if possible
    long R = std::clamp(want, lo, hi);
    detail::check(want - R <= x, "unserved part-1 holders exceed class");
    {
      long left = R;
      for (long p = 3; p <= M; ++p) {
        r1p[p] = std::max(0L, Bt[p] - h[p]);
        left -= r1p[p];
      }
      detail::check(left >= 0, "lower bounds exceed target");
      for (long p = 3; p <= M && left > 0; ++p) {
        long room = std::min(sup[p], Bt[p]) - r1p[p];
        long add = std::min(room, left);
        r1p[p] += add;
        left -= add;
      }
      detail::check(left == 0, "could not distribute part-1-holder upgrades");
    }
    const long z1 = h[1] - r12 - R;
    const long e1 = x - z1;
    detail::check(z1 >= 0 && e1 >= 0, "part-1 class split negative");
    for (long p = 3; p <= M; ++p) {
      rp1[p] = Bt[p] - r1p[p];
      ep[p] = sup[p] - r1p[p];
      zp[p] = h[p] - rp1[p];
      detail::check(rp1[p] >= 0 && ep[p] >= 0 && zp[p] >= 0,
                    "per-part split negative");
      detail::check(ep[p] + zp[p] == Et[p], "only-part composition off");
    }
    detail::check(e1 + e2emp + [&] {
      long s = 0;
      for (long p = 3; p <= M; ++p) s += ep[p];
      return s;
    }() == x, "not every empty peer is served");

    // Materialize. Receiver order inside each part is fixed: upgraded
    // holders first (ascending part, then id), then empties.
    std::vector<RoundUpload> round;
    Classes cls;
    size_t eoff = 0;

    // part 1 uploads by singles[1] (+ never the server: q >= 2)
    {
      std::vector<NodeId> recv;
      for (long k = 0; k < r21; ++k) recv.push_back(singles[2][k]);
      for (long p = 3; p <= M; ++p)
        for (long k = 0; k < rp1[p]; ++k) recv.push_back(singles[p][k]);
      for (long k = 0; k < e1; ++k) recv.push_back(empties[eoff + k]);
      eoff += e1;
      detail::check(recv.size() == singles[1].size(), "part-1 flow mismatch");
      for (size_t k = 0; k < recv.size(); ++k)
        emit(round, singles[1][k], recv[k], 1);
    }
    // part p >= 2 uploads by singles[p] plus the server for part q
    for (long p = 2; p <= M; ++p) {
      std::vector<NodeId> recv;
      long holders_upgraded = p == 2 ? r12 : r1p[p];
      long into_empties = p == 2 ? e2emp : ep[p];
      long seg = r12;
      for (long pp = 3; pp < p; ++pp) seg += r1p[pp];
      long base = p == 2 ? 0 : seg;
      for (long k = 0; k < holders_upgraded; ++k)
        recv.push_back(singles[1][base + k]);
      for (long k = 0; k < into_empties; ++k) recv.push_back(empties[eoff + k]);
      eoff += into_empties;
      std::vector<NodeId> ups = singles[p];
      if (p == q) ups.push_back(kServer);
      detail::check(recv.size() == ups.size(), "per-part flow mismatch");
      for (size_t k = 0; k < recv.size(); ++k) emit(round, ups[k], recv[k], p);
    }
    detail::check(eoff == empties.size(), "empties left unserved");

    // Classes at the end of round n+1.
    for (long k = 0; k < r12; ++k) cls.A.push_back(singles[1][k]);
    for (long k = 0; k < r21; ++k) cls.A.push_back(singles[2][k]);
    {
      long base = r12;
      long e_base = e1 + e2emp;
      for (long p = 3; p <= M; ++p) {
        auto& bp = cls.B[p];
        for (long k = 0; k < r1p[p]; ++k) bp.push_back(singles[1][base + k]);
        base += r1p[p];
        for (long k = 0; k < rp1[p]; ++k) bp.push_back(singles[p][k]);
        auto& epv = cls.E[p];
        for (long k = 0; k < zp[p]; ++k)
          epv.push_back(singles[p][rp1[p] + k]);
        for (long k = 0; k < ep[p]; ++k) epv.push_back(empties[e_base + k]);
        e_base += ep[p];
        if (bp.empty()) cls.B.erase(p);
        if (epv.empty()) cls.E.erase(p);
        else std::sort(cls.E[p].begin(), cls.E[p].end());
        if (cls.B.count(p)) std::sort(cls.B[p].begin(), cls.B[p].end());
      }
      for (long k = 0; k < z1; ++k) cls.C.push_back(singles[1][R + r12 + k]);
      for (long k = 0; k < e1; ++k) cls.C.push_back(empties[k]);
      for (long k = 0; k < z2; ++k) cls.D.push_back(singles[2][r21 + k]);
      for (long k = 0; k < e2emp; ++k) cls.D.push_back(empties[e1 + k]);
    }
    std::sort(cls.A.begin(), cls.A.end());
    std::sort(cls.C.begin(), cls.C.end());
    std::sort(cls.D.begin(), cls.D.end());
    detail::check(static_cast<long>(cls.A.size()) == sizeA &&
                      static_cast<long>(cls.C.size()) == x &&
                      static_cast<long>(cls.D.size()) == fl &&
                      cls.countB() == sizeB && cls.countE() == sizeE,
                  "round n+1 classes sized wrong");
    close_round(round);
    return cls;
  }

  // One rotation round n+j+1, shifting the class structure from part j to
  // part j+1. For j == M-2 the incoming part is the last one and the whole
  // upload of parts-other goes to it.
  Classes rotate(const Classes& cls, long j) {
    const long r = n + j + 1;
    const long bb = j + 2;
    const long spart = std::min(r, M);
    const bool last = j == M - 2;
    auto sup3 = [&](long p) {
      long s = p == spart ? 1 : 0;
      if (auto it = cls.B.find(p); it != cls.B.end())
        s += static_cast<long>(it->second.size());
      if (auto it = cls.E.find(p); it != cls.E.end())
        s += static_cast<long>(it->second.size());
      return s;
    };
    auto classCount = [&](const std::map<long, std::vector<NodeId>>& m,
                          long p) {
      auto it = m.find(p);
      return it == m.end() ? 0L : static_cast<long>(it->second.size());
    };

    long a2, c2;
    std::vector<long> crecv(M + 2, 0);  // C-side receivers per part >= j+3
    if (last) {
      a2 = static_cast<long>(cls.A.size());
      c2 = fl;
      detail::check(sup3(bb) == a2 + c2, "final rotation flow mismatch");
    } else {
      const long b2 = classCount(cls.B, bb);
      const long e2 = classCount(cls.E, bb);
      a2 = (pw(n - 1) - fl) - b2;
      c2 = fl - e2;
      detail::check(a2 >= 0 && a2 <= static_cast<long>(cls.A.size()),
                    "pair-class target infeasible");
      detail::check(c2 >= 0, "single-class target infeasible");
      detail::check(sup3(bb) == a2 + c2, "incoming-part flow mismatch");
      long budget = fl - c2;
      // Keep the next round's incoming singles in range before topping up.
      if (j + 1 <= M - 3) {
        long cnext = classCount(cls.B, j + 3) + classCount(cls.E, j + 3) +
                     sup3(j + 3);
        long need = std::max(0L, cnext - (pw(n - 1) - fl) -
                                     classCount(cls.E, j + 3));
        detail::check(need <= std::min(budget, sup3(j + 3)),
                      "cannot reach next-round single floor");
      }
      for (long p = j + 3; p <= M && budget > 0; ++p) {
        long cap = p < M ? fl - classCount(cls.E, p) : sup3(p);
        crecv[p] = std::clamp(std::min(budget, sup3(p)), 0L, std::max(cap, 0L));
        budget -= crecv[p];
      }
      detail::check(budget == 0, "rotation budget not placed");
    }

    std::vector<RoundUpload> round;
    Classes next;

    // Part j: x-1 single-holders refresh the two lagging classes.
    {
      std::vector<NodeId> targets = cls.D;
      for (const auto& [p, v] : cls.E)
        targets.insert(targets.end(), v.begin(), v.end());
      std::sort(targets.begin(), targets.end());
      detail::check(static_cast<long>(targets.size()) == x - 1,
                    "rotation lagging classes sized wrong");
      for (size_t k = 0; k < targets.size(); ++k)
        emit(round, cls.C[k], targets[k], j);
    }
    // Part j+1 from A and D onto every pair-class peer and ce singles.
    {
      std::vector<NodeId> ups = cls.A;
      ups.insert(ups.end(), cls.D.begin(), cls.D.end());
      std::sort(ups.begin(), ups.end());
      std::vector<NodeId> recv;
      for (const auto& [p, v] : cls.B) recv.insert(recv.end(), v.begin(), v.end());
      std::sort(recv.begin(), recv.end());
      for (long k = 0; k < ce; ++k) recv.push_back(cls.C[k]);
      detail::check(ups.size() == recv.size(), "rotation part j+1 mismatch");
      for (size_t k = 0; k < ups.size(); ++k)
        emit(round, ups[k], recv[k], j + 1);
    }
    // Parts >= j+2 from their holders (and the server) onto A and fl singles.
    {
      // receiver layout: A gets bb first then higher parts; C likewise
      std::vector<std::pair<NodeId, long>> assign;  // (receiver, part)
      size_t apos = 0;
      for (long k = 0; k < a2; ++k) assign.push_back({cls.A[apos++], bb});
      for (long p = j + 3; p <= M; ++p) {
        long arecv = last ? 0 : sup3(p) - crecv[p];
        for (long k = 0; k < arecv; ++k) assign.push_back({cls.A[apos++], p});
      }
      detail::check(apos == cls.A.size(), "pair-class receivers leftover");
      size_t cpos = static_cast<size_t>(ce);
      for (long k = 0; k < c2; ++k)
        assign.push_back({cls.C[cpos++], bb});
      for (long p = j + 3; p <= M; ++p)
        for (long k = 0; k < crecv[p]; ++k)
          assign.push_back({cls.C[cpos++], p});
      detail::check(cpos == cls.C.size(), "single-class receivers leftover");

      for (long p = bb; p <= M; ++p) {
        std::vector<NodeId> ups;
        if (auto it = cls.B.find(p); it != cls.B.end())
          ups.insert(ups.end(), it->second.begin(), it->second.end());
        if (auto it = cls.E.find(p); it != cls.E.end())
          ups.insert(ups.end(), it->second.begin(), it->second.end());
        std::sort(ups.begin(), ups.end());
        if (p == spart) ups.push_back(kServer);
        std::vector<NodeId> recv;
        for (auto& [node, part] : assign)
          if (part == p) recv.push_back(node);
        detail::check(ups.size() == recv.size(), "per-part rotation mismatch");
        for (size_t k = 0; k < ups.size(); ++k)
          emit(round, ups[k], recv[k], p);
      }

      // Next classes.
      for (size_t k = 0; k < static_cast<size_t>(a2); ++k)
        next.A.push_back(cls.A[k]);
      if (auto it = cls.B.find(bb); it != cls.B.end())
        next.A.insert(next.A.end(), it->second.begin(), it->second.end());
      {
        size_t off = static_cast<size_t>(a2);
        for (long p = j + 3; p <= M; ++p) {
          long arecv = last ? 0 : sup3(p) - crecv[p];
          auto& bp = next.B[p];
          if (auto it = cls.B.find(p); it != cls.B.end())
            bp.insert(bp.end(), it->second.begin(), it->second.end());
          for (long k = 0; k < arecv; ++k) bp.push_back(cls.A[off++]);
          if (bp.empty()) next.B.erase(p);
          else std::sort(bp.begin(), bp.end());
        }
      }
      next.C = cls.D;
      for (long k = 0; k < ce; ++k) next.C.push_back(cls.C[k]);
      if (auto it = cls.E.find(bb); it != cls.E.end())
        next.D.insert(next.D.end(), it->second.begin(), it->second.end());
      for (long k = 0; k < c2; ++k)
        next.D.push_back(cls.C[static_cast<size_t>(ce + k)]);
      {
        size_t off = static_cast<size_t>(ce + c2);
        for (long p = j + 3; p <= M; ++p) {
          auto& epv = next.E[p];
          if (auto it = cls.E.find(p); it != cls.E.end())
            epv.insert(epv.end(), it->second.begin(), it->second.end());
          for (long k = 0; k < crecv[p]; ++k)
            epv.push_back(cls.C[off++]);
          if (epv.empty()) next.E.erase(p);
          else std::sort(epv.begin(), epv.end());
        }
      }
      std::sort(next.A.begin(), next.A.end());
      std::sort(next.C.begin(), next.C.end());
      std::sort(next.D.begin(), next.D.end());
    }
    close_round(round);
    return next;
  }

  void build_general() {
    if (n == 0) {  // single peer: server streams the parts
      for (long p = 1; p <= M; ++p) {
        std::vector<RoundUpload> round;
        emit(round, kServer, 1, p);
        close_round(round);
      }
      return;
    }
    std::vector<std::vector<NodeId>> singles(M + 1);
    std::deque<NodeId> empties;
    for (NodeId p = 1; p <= N; ++p) empties.push_back(p);
    seeding(singles, empties);
    Classes cls = round_np1(singles, empties);
    for (long j = 1; j <= M - 2; ++j) cls = rotate(cls, j);
    // After round n+M-1: cls.C holds only part M-1, cls.D only part M.
    final_round(cls.C, cls.D);
  }
};

}  // namespace equal_detail

/// Constructive optimal schedule: exactly optimal_rounds(N, M) rounds,
/// verifier-clean including the one-download-per-round constraint, replica
/// profile matching the shiftable column pattern from round floor(log2 N) on.
inline RoundSchedule build_schedule(long n_peers, long n_parts) {
  detail::check(n_peers >= 1 && n_parts >= 1, "build_schedule needs N,M >= 1");
  equal_detail::Builder b(n_peers, n_parts);
  if (n_parts == 1)
    b.build_m1();
  else if (n_parts == 2)
    b.build_m2();
  else
    b.build_general();
  detail::check(static_cast<long>(b.rounds.size()) ==
                    optimal_rounds(n_peers, n_parts),
                "constructed schedule has wrong round count");
  RoundSchedule rs;
  rs.n_peers = n_peers;
  rs.n_parts = n_parts;
  rs.rounds = std::move(b.rounds);
  return rs;
}

/// Per-round replica counts of a (verifier-checked) round schedule.
/// Throws InvalidSchedule when the expanded schedule fails verification.
inline ReplicaProfile replica_profile(const RoundSchedule& rs, long n_peers,
                                      long n_parts) {
  Instance inst = uniform_instance(n_peers, n_parts);
  auto rep = verify_schedule(inst, to_continuous(rs), true);
  if (!rep.valid)
    throw InvalidSchedule(rep.violations.front().constraint + ": " +
                          rep.violations.front().detail);
  ReplicaProfile prof;
  prof.n_peers = n_peers;
  prof.n_parts = n_parts;
  std::vector<long> cur(static_cast<size_t>(n_parts), 0);
  for (const auto& round : rs.rounds) {
    for (const auto& u : round) ++cur[static_cast<size_t>(u.part - 1)];
    prof.count.push_back(cur);
  }
  return prof;
}

}  // namespace dissem
