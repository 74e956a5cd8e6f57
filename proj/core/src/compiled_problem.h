#ifndef ALO_SRC_COMPILED_PROBLEM_H_
#define ALO_SRC_COMPILED_PROBLEM_H_

// Integer form of a ConstraintSystem. Each row is multiplied by the lcm of
// its coefficient denominators; the right-hand side is floored, which is
// exact because the left-hand side is integral at binary points.

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "alo/model.h"
#include "alo/solver.h"

namespace alo::internal {

struct Choice {
  std::size_t var = 0;
  int bin = 0;
};

struct IntRow {
  RowTag tag = RowTag::kPlacement;
  int index = 0;
  Int128 rhs = 0;
  Int128 scale = 1;    // multiplier applied to the rational row
  double norm = 1;     // max |scaled coef|, for violation weighting
  bool has_negative = false;
};

struct ColumnEntry {
  std::uint32_t row = 0;
  Int128 coef = 0;
};

enum class ObjectiveKind { kNull, kMass, kGeneral };

class CompiledProblem {
 public:
  CompiledProblem(const ConstraintSystem& system, const Payload& payload,
                  const AircraftSpec& spec);

  std::size_t container_count() const { return choices_.size(); }
  std::size_t row_count() const { return rows_.size(); }
  std::size_t var_count() const { return col_start_.size() - 1; }
  int bin_count() const { return bin_count_; }

  const std::vector<Choice>& choices(std::size_t c) const { return choices_[c]; }
  const IntRow& row(std::size_t r) const { return rows_[r]; }
  std::span<const ColumnEntry> column(std::size_t var) const {
    return {entries_.data() + col_start_[var],
            entries_.data() + col_start_[var + 1]};
  }
  std::int64_t mass(std::size_t c) const { return mass_[c]; }
  std::int64_t total_mass() const { return total_mass_; }

  ObjectiveKind objective_kind() const { return objective_kind_; }
  // Objective multiplied by objective_scale(), integral.
  Int128 objective(std::size_t var) const { return objective_[var]; }
  Int128 objective_scale() const { return objective_scale_; }
  Rational ObjectiveValue(Int128 scaled) const {
    return Rational(scaled, objective_scale_);
  }

  // Carried-mass cap from the weight row (if any) and the total mass.
  std::int64_t mass_cap() const { return mass_cap_; }
  std::optional<std::size_t> weight_row() const { return weight_row_; }
  // The innermost left/right shear rows, which together cover every bin
  // exactly once when N is even.
  std::optional<std::pair<std::size_t, std::size_t>> covering_shear_rows()
      const {
    return covering_shear_;
  }

  // Decode per-container choice indices (-1 = out) into an Assignment.
  Assignment ToAssignment(const std::vector<int>& pos) const;

 private:
  int bin_count_ = 0;
  std::vector<std::vector<Choice>> choices_;
  std::vector<IntRow> rows_;
  std::vector<std::size_t> col_start_;
  std::vector<ColumnEntry> entries_;
  std::vector<std::int64_t> mass_;
  std::int64_t total_mass_ = 0;
  ObjectiveKind objective_kind_ = ObjectiveKind::kNull;
  std::vector<Int128> objective_;
  Int128 objective_scale_ = 1;
  std::int64_t mass_cap_ = 0;
  std::optional<std::size_t> weight_row_;
  std::optional<std::pair<std::size_t, std::size_t>> covering_shear_;
  const Payload* payload_ = nullptr;
};

// Elapsed time under either clock kind.
class SolveClock {
 public:
  explicit SolveClock(ClockKind kind)
      : kind_(kind), start_(std::chrono::steady_clock::now()) {}
  double Elapsed(std::uint64_t steps) const {
    if (kind_ == ClockKind::kSteps) return steps / kStepsPerVirtualSecond;
    return WallSeconds();
  }
  double WallSeconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  ClockKind kind_;
  std::chrono::steady_clock::time_point start_;
};

// Smallest carried mass that satisfies tau (exact ceil(tau * cap)).
std::int64_t TauTarget(double tau, std::int64_t cap);

}  // namespace alo::internal

#endif  // ALO_SRC_COMPILED_PROBLEM_H_
