// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "dissem/core.hpp"
#include "dissem/errors.hpp"
#include "dissem/rational.hpp"

namespace dissem {

// Infinitely divisible files: every user i starts with F_i MB to spread to
// all others and uploads at C_i MB/s.
struct FluidInstance {
  long n_users = 0;
  std::vector<Rational> file_sizes;
  std::vector<Rational> capacities;

  Rational total_files() const {
    return std::accumulate(file_sizes.begin(), file_sizes.end(), Rational(0));
  }
  Rational total_capacity() const {
    return std::accumulate(capacities.begin(), capacities.end(), Rational(0));
  }
};

inline void validate_fluid_instance(const FluidInstance& fi) {
  if (fi.n_users < 2) throw InvalidInstance("n_users", "must be >= 2");
  if (static_cast<long>(fi.file_sizes.size()) != fi.n_users)
    throw InvalidInstance("file_sizes", "length mismatch");
  if (static_cast<long>(fi.capacities.size()) != fi.n_users)
    throw InvalidInstance("capacities", "length mismatch");
  bool any = false;
  for (const auto& f : fi.file_sizes) {
    if (f < 0) throw InvalidInstance("file_sizes", "negative entry");
    if (f > 0) any = true;
  }
  if (!any) throw InvalidInstance("file_sizes", "all zero");
  for (const auto& c : fi.capacities)
    if (c <= 0) throw InvalidInstance("capacities", "entries must be > 0");
}

/// Fluid-limit minimal makespan: the worst of the per-user bounds F_i/C_i
/// and the aggregate bound (N-1)F/C.
inline Rational fluid_general_makespan(const FluidInstance& fi) {
  validate_fluid_instance(fi);
  Rational best = Rational(fi.n_users - 1) * fi.total_files() /
                  fi.total_capacity();
  for (long i = 0; i < fi.n_users; ++i) {
    Rational own = fi.file_sizes[static_cast<size_t>(i)] /
                   fi.capacities[static_cast<size_t>(i)];
    if (own > best) best = own;
  }
  return best;
}

/// One server spreading a unit file to N identical peers with infinitely
/// many parts. Returns (makespan, alpha) where alpha is the fraction each
/// peer pulls from its peers rather than from the server.
inline std::pair<Rational, Rational> fluid_single_server(long n_users,
                                                         const Rational& c_s,
                                                         const Rational& c_1) {
  detail::check(n_users >= 1 && c_s > 0 && c_1 >= 0, "bad inputs");
  if (n_users == 1) return {Rational(1) / c_s, Rational(0)};
  Rational server_side = c_s / Rational(n_users);
  Rational peer_side = c_1 / Rational(n_users - 1);
  if (peer_side <= server_side) {
    Rational denom = c_s + Rational(n_users) * c_1;
    return {Rational(n_users) / denom, Rational(n_users) * c_1 / denom};
  }
  return {Rational(1) / c_s, Rational(n_users - 1, n_users)};
}

// Relay-fraction plan: row i gives how file i travels, alpha[i][i] directly
// to everybody, alpha[i][j] through relay j. All rows of the symmetric
// construction coincide.
struct TransferPlan {
  long n_users = 0;
  std::vector<std::vector<Rational>> alpha;
  Rational plan_makespan;
  // capacities the equalization ran against (reduced ones in the
  // bottlenecked case); upload volumes divide by these to give exactly the
  // plan makespan
  std::vector<Rational> effective_capacities;
};

struct CapacityReduction {
  std::vector<Rational> gamma;
  Rational delta;
  std::vector<Rational> reduced_capacities;
};

/// Upload volume user i carries under the plan: its own direct broadcast,
/// handoffs to relays, and the relayed portions of everyone else's files.
inline Rational plan_upload_volume(const FluidInstance& fi,
                                   const TransferPlan& plan, long i) {
  const long n = fi.n_users;
  const auto& a = plan.alpha[static_cast<size_t>(i)];
  Rational vol = a[static_cast<size_t>(i)] *
                 fi.file_sizes[static_cast<size_t>(i)] * Rational(n - 1);
  for (long k = 0; k < n; ++k) {
    if (k == i) continue;
    vol += plan.alpha[static_cast<size_t>(i)][static_cast<size_t>(k)] *
           fi.file_sizes[static_cast<size_t>(i)];
    vol += plan.alpha[static_cast<size_t>(k)][static_cast<size_t>(i)] *
           fi.file_sizes[static_cast<size_t>(k)] * Rational(n - 2);
  }
  return vol;
}

/// Builds reduced capacities C' for the bottleneck case (user 0 must have
/// the largest F/C ratio and strictly exceed the aggregate bound). The
/// reduced instance meets the aggregate bound with equality, so the direct
/// equalizing construction applies to it.
inline CapacityReduction reduce_capacities(const FluidInstance& fi) {
  validate_fluid_instance(fi);
  if (fi.n_users < 3) throw NotCase2("needs at least three users");
  const long n = fi.n_users;
  const Rational F = fi.total_files();
  const Rational C = fi.total_capacity();
  const Rational& f1 = fi.file_sizes[0];
  const Rational& c1 = fi.capacities[0];
  if (f1 == 0) throw NotCase2("lead user has no file");
  for (long i = 0; i < n; ++i)
    if (fi.file_sizes[static_cast<size_t>(i)] *
            c1 >
        f1 * fi.capacities[static_cast<size_t>(i)])
      throw NotCase2("users not sorted by decreasing F/C");
  if (f1 * C <= Rational(n - 1) * F * c1)
    throw NotCase2("aggregate bound already dominates");

  CapacityReduction red;
  red.delta = Rational(n - 2) * F * c1 / (f1 * C - F * c1);
  Rational ratio = f1 / c1;  // the binding per-user bound
  Rational mass_total(0);
  for (long i = 0; i < n; ++i) {
    const Rational& fi_i = fi.file_sizes[static_cast<size_t>(i)];
    const Rational& ci = fi.capacities[static_cast<size_t>(i)];
    // gamma_i * F_i stays finite for zero-size users; their capacity simply
    // scales by delta
    Rational mass =
        (red.delta * ci * ratio + (1 - red.delta) * fi_i) / Rational(n - 1);
    mass_total += mass;
    red.reduced_capacities.push_back(Rational(n - 1) * mass / ratio);
    red.gamma.push_back(fi_i > 0 ? mass / fi_i : Rational(0));
  }
  detail::check(mass_total == F, "reduction does not conserve file mass");

  // invariants of the construction
  detail::check(red.reduced_capacities[0] == c1, "lead capacity changed");
  Rational reduced_total(0);
  for (long i = 0; i < n; ++i) {
    detail::check(red.reduced_capacities[static_cast<size_t>(i)] <=
                      fi.capacities[static_cast<size_t>(i)],
                  "capacity increased by reduction");
    detail::check(fi.file_sizes[static_cast<size_t>(i)] <=
                      ratio * red.reduced_capacities[static_cast<size_t>(i)],
                  "per-user bound violated after reduction");
    reduced_total += red.reduced_capacities[static_cast<size_t>(i)];
  }
  detail::check(Rational(n - 1) * F == ratio * reduced_total,
                "aggregate bound not tight after reduction");
  return red;
}

/// Two-hop plan achieving the fluid makespan. With two users everything is
/// sent directly; otherwise the symmetric relay fractions equalize every
/// user's upload completion at the makespan, reducing capacities first when
/// one user's own bound dominates.
inline TransferPlan build_transfer_plan(const FluidInstance& fi) {
  if (fi.n_users == 2 && fi.file_sizes.size() == 2 &&
      fi.file_sizes[0] == 0 && fi.file_sizes[1] == 0)
    throw DegenerateInstance("two users with nothing to send");
  validate_fluid_instance(fi);
  const long n = fi.n_users;
  TransferPlan plan;
  plan.n_users = n;
  plan.plan_makespan = fluid_general_makespan(fi);
  if (n == 2) {
    plan.alpha = {{Rational(1), Rational(0)}, {Rational(0), Rational(1)}};
    plan.effective_capacities = fi.capacities;
    return plan;
  }

  const Rational F = fi.total_files();
  std::vector<Rational> eff = fi.capacities;
  Rational aggregate = Rational(n - 1) * F / fi.total_capacity();
  Rational worst(0);
  long worst_at = 0;
  for (long i = 0; i < n; ++i) {
    Rational own = fi.file_sizes[static_cast<size_t>(i)] /
                   fi.capacities[static_cast<size_t>(i)];
    if (own > worst) {
      worst = own;
      worst_at = i;
    }
  }
  if (worst > aggregate) {
    // reorder so the bottleneck user leads, reduce, and map back
    std::vector<long> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0L);
    std::stable_sort(order.begin(), order.end(), [&](long a, long b) {
      return fi.file_sizes[static_cast<size_t>(a)] *
                 fi.capacities[static_cast<size_t>(b)] >
             fi.file_sizes[static_cast<size_t>(b)] *
                 fi.capacities[static_cast<size_t>(a)];
    });
    (void)worst_at;
    FluidInstance sorted;
    sorted.n_users = n;
    for (long idx : order) {
      sorted.file_sizes.push_back(fi.file_sizes[static_cast<size_t>(idx)]);
      sorted.capacities.push_back(fi.capacities[static_cast<size_t>(idx)]);
    }
    CapacityReduction red = reduce_capacities(sorted);
    for (long pos = 0; pos < n; ++pos)
      eff[static_cast<size_t>(order[static_cast<size_t>(pos)])] =
          red.reduced_capacities[static_cast<size_t>(pos)];
  }

  Rational eff_total = std::accumulate(eff.begin(), eff.end(), Rational(0));
  std::vector<Rational> star(static_cast<size_t>(n));
  Rational sum(0);
  for (long i = 0; i < n; ++i) {
    star[static_cast<size_t>(i)] =
        Rational(n - 1) * eff[static_cast<size_t>(i)] /
            (Rational(n - 2) * eff_total) -
        fi.file_sizes[static_cast<size_t>(i)] / (Rational(n - 2) * F);
    detail::check(star[static_cast<size_t>(i)] >= 0,
                  "negative relay fraction");
    sum += star[static_cast<size_t>(i)];
  }
  detail::check(sum == 1, "relay fractions do not sum to one");
  plan.alpha.assign(static_cast<size_t>(n), star);
  plan.effective_capacities = std::move(eff);
  return plan;
}

/// Structural checks on a plan: nonnegative fractions, full dissemination of
/// every nonempty file over at most two hops, upload volumes within
/// capacity at the claimed makespan, and the makespan matching the bound.
inline VerificationReport verify_plan(const FluidInstance& fi,
                                      const TransferPlan& plan) {
  validate_fluid_instance(fi);
  VerificationReport rep;
  rep.makespan = plan.plan_makespan;
  auto add = [&rep](std::string name, std::string detail) {
    rep.violations.push_back(
        Violation{std::move(name), {}, Rational(0), std::move(detail)});
  };
  const long n = fi.n_users;
  if (plan.n_users != n ||
      static_cast<long>(plan.alpha.size()) != n)
    add("shape", "plan size does not match instance");
  else {
    for (long i = 0; i < n; ++i)
      if (static_cast<long>(plan.alpha[static_cast<size_t>(i)].size()) != n)
        add("shape", "row " + std::to_string(i) + " has wrong length");
  }
  if (!rep.violations.empty()) {
    rep.valid = false;
    return rep;
  }

  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j)
      if (plan.alpha[static_cast<size_t>(i)][static_cast<size_t>(j)] < 0)
        add("nonnegativity", "alpha[" + std::to_string(i) + "][" +
                                 std::to_string(j) + "] < 0");

  for (long i = 0; i < n; ++i) {
    if (fi.file_sizes[static_cast<size_t>(i)] == 0) continue;
    Rational row(0);
    for (long j = 0; j < n; ++j)
      row += plan.alpha[static_cast<size_t>(i)][static_cast<size_t>(j)];
    if (row != 1)
      add("row-sum", "file " + std::to_string(i) + " splits into " +
                         format_rational(row));
    // received fraction at every other user: direct part, own relay chunk,
    // and all other relays' forwards
    for (long j = 0; j < n; ++j) {
      if (j == i) continue;
      Rational got = plan.alpha[static_cast<size_t>(i)][static_cast<size_t>(i)];
      for (long k = 0; k < n; ++k)
        if (k != i)
          got += plan.alpha[static_cast<size_t>(i)][static_cast<size_t>(k)];
      if (got != 1)
        add("coverage", "user " + std::to_string(j) + " receives " +
                            format_rational(got) + " of file " +
                            std::to_string(i));
    }
  }

  Rational bound = fluid_general_makespan(fi);
  if (plan.plan_makespan != bound)
    add("makespan", "plan claims " + format_rational(plan.plan_makespan) +
                        ", bound is " + format_rational(bound));
  for (long i = 0; i < n; ++i) {
    Rational vol = plan_upload_volume(fi, plan, i);
    if (vol > fi.capacities[static_cast<size_t>(i)] * plan.plan_makespan)
      add("capacity", "user " + std::to_string(i) + " uploads " +
                          format_rational(vol) + " MB");
  }
  rep.valid = rep.violations.empty();
  return rep;
}

}  // namespace dissem
