// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dissem {

/// Base class for all errors raised by the library on bad domain input.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// A problem instance violates one of its invariants.
class InvalidInstance : public DomainError {
 public:
  InvalidInstance(std::string field, const std::string& reason)
      : DomainError("invalid instance: " + field + ": " + reason),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class EmptySchedule : public DomainError {
 public:
  EmptySchedule() : DomainError("schedule has no uploads") {}
};

class InvalidSchedule : public DomainError {
 public:
  explicit InvalidSchedule(const std::string& why)
      : DomainError("invalid schedule: " + why) {}
};

/// Search aborted because the configured node limit was reached before the
/// question was resolved. Distinct from a proven infeasibility.
class BudgetExceeded : public DomainError {
 public:
  explicit BudgetExceeded(std::uint64_t nodes)
      : DomainError("search node budget exceeded after " +
                    std::to_string(nodes) + " nodes"),
        nodes_(nodes) {}
  std::uint64_t nodes() const { return nodes_; }

 private:
  std::uint64_t nodes_;
};

/// Instance is larger than a size-guarded routine is willing to handle.
class SizeGuard : public DomainError {
 public:
  explicit SizeGuard(const std::string& what) : DomainError(what) {}
};

/// Capacity reduction requested on an instance where the aggregate bound
/// already dominates; the caller should use the direct construction.
class NotCase2 : public DomainError {
 public:
  explicit NotCase2(const std::string& why)
      : DomainError("capacity reduction not applicable: " + why) {}
};

class DegenerateInstance : public DomainError {
 public:
  explicit DegenerateInstance(const std::string& why) : DomainError(why) {}
};

class DegenerateDesign : public DomainError {
 public:
  explicit DegenerateDesign(const std::string& why) : DomainError(why) {}
};

class AbsorbingBeforeTarget : public DomainError {
 public:
  explicit AbsorbingBeforeTarget(int state)
      : DomainError("chain absorbs in state " + std::to_string(state) +
                    " before full dissemination") {}
};

/// Thrown when an internal consistency check fails; indicates a bug.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

namespace detail {
inline void check(bool cond, const char* msg) {
  if (!cond) throw InternalError(msg);
}
}  // namespace detail

}  // namespace dissem
