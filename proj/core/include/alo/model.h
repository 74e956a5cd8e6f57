#ifndef ALO_MODEL_H_
#define ALO_MODEL_H_

// Aircraft loading model: domain types, the binary IP constraint system and
// the loading physics (center of gravity, shear, carried mass).
//
// Positions are fractions of the loading-zone length L (L = 1), measured from
// the center of the zone. Bins are numbered 1..N from the negative end.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "alo/rational.h"

namespace alo {

enum class ContainerSize : int { kOne = 1, kTwo = 2, kThree = 3 };

struct Container {
  int id = 0;
  ContainerSize size = ContainerSize::kOne;
  std::int64_t mass = 0;  // kg

  friend bool operator==(const Container&, const Container&) = default;
};

// Ordered container list with the size-class index sets. Indices into the
// payload (0-based) are used throughout the library; `Container::id` is the
// external label.
class Payload {
 public:
  Payload() = default;
  // Throws std::invalid_argument on duplicate ids or non-positive masses.
  explicit Payload(std::vector<Container> containers);

  std::span<const Container> containers() const { return containers_; }
  const Container& operator[](std::size_t i) const { return containers_[i]; }
  std::size_t size() const { return containers_.size(); }
  bool empty() const { return containers_.empty(); }

  // Payload indices of the containers of the given size, in payload order.
  std::span<const std::size_t> OfSize(ContainerSize size) const {
    return by_size_[static_cast<int>(size) - 1];
  }
  std::optional<std::size_t> IndexOfId(int id) const;
  std::int64_t TotalMass() const { return total_mass_; }

  friend bool operator==(const Payload& a, const Payload& b) {
    return a.containers_ == b.containers_;
  }

 private:
  std::vector<Container> containers_;
  std::vector<std::size_t> by_size_[3];
  std::unordered_map<int, std::size_t> index_of_id_;
  std::int64_t total_mass_ = 0;
};

enum class ShearShape { kLinearSymmetric, kPiecewiseLinear };
enum class ShearSide { kLeft, kRight };

// Maximum shear curve. The linear-symmetric shape rises from the ends to
// `peak` at the center and is sampled as peak * j / floor(N/2) for the j-th
// bin counted from either end. The piecewise shape interpolates a table of
// (x, S) points, x in [-1/2, 1/2], at bin centers.
struct ShearLimit {
  ShearShape shape = ShearShape::kLinearSymmetric;
  Rational peak = 0;                                  // S^max(0), kg
  std::vector<std::pair<Rational, Rational>> table;  // piecewise only

  // Limit for the shear row j (1..floor(N/2)) on the given side.
  Rational At(ShearSide side, int j, int bin_count) const;
  // Piecewise table interpolated at x, clamped at the table ends.
  Rational Interpolate(const Rational& x) const;

  friend bool operator==(const ShearLimit&, const ShearLimit&) = default;
};

struct AircraftSpec {
  int bin_count = 0;               // N
  std::int64_t max_payload = 0;    // W_p, kg
  std::int64_t empty_mass = 0;     // W_e, kg
  Rational empty_cg = 0;           // x^e_cg
  Rational cg_min = 0;
  Rational cg_max = 0;
  Rational cg_target = 0;
  ShearLimit shear_limit;

  // Throws std::invalid_argument when an invariant does not hold.
  void Validate() const;

  friend bool operator==(const AircraftSpec&, const AircraftSpec&) = default;
};

// Number of admissible bins for a container of this size: N, or N-1 for a
// size-3 container which straddles bins j and j+1.
int PositionCount(ContainerSize size, int bin_count);

// Binary placement matrix y(k, j). Row k has PositionCount(s_k, N) entries.
// More than one entry per row may be set; validate() reports it.
class Assignment {
 public:
  Assignment() = default;
  Assignment(const Payload& payload, int bin_count);

  std::size_t container_count() const { return offsets_.size() - 1; }
  int bin_count() const { return bin_count_; }
  int positions(std::size_t c) const {
    return static_cast<int>(offsets_[c + 1] - offsets_[c]);
  }
  // j is 1-based. Throws std::out_of_range.
  bool Get(std::size_t c, int j) const;
  void Set(std::size_t c, int j, bool value);
  // Clears row c and sets y(c, j).
  void Place(std::size_t c, int j);
  void Remove(std::size_t c);
  // First set position of container c.
  std::optional<int> PositionOf(std::size_t c) const;
  // (container index, bin) for every set entry, row-major.
  std::vector<std::pair<std::size_t, int>> Entries() const;

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  int bin_count_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint8_t> bits_;
};

enum class RowTag {
  kPlacement,
  kBin,
  kWeight,
  kCgUpper,
  kCgLower,
  kShearLeft,
  kShearRight,
  kMassFloor,
  kCgWindow,
};

std::string_view RowTagName(RowTag tag);
std::optional<RowTag> RowTagFromName(std::string_view name);

struct Term {
  std::size_t var = 0;
  Rational coef;

  friend bool operator==(const Term&, const Term&) = default;
};

// One "sum(coef * y) <= rhs" row. `index` is the family-local index: the
// container id for placement rows, j for bin and shear rows, 1/2 for the
// upper/lower cg window rows and 0 otherwise.
struct Row {
  RowTag tag = RowTag::kPlacement;
  int index = 0;
  std::vector<Term> terms;  // sorted by var, no duplicates
  Rational rhs;

  friend bool operator==(const Row&, const Row&) = default;
};

struct VariableKey {
  int container_id = 0;
  int bin = 0;  // 1-based

  friend bool operator==(const VariableKey&, const VariableKey&) = default;
};

// Sparse <=-system plus objective. Variable order: all size-1 containers
// (N columns each), then size-2, then size-3 (N-1 columns each), each class
// in payload order.
struct ConstraintSystem {
  std::vector<Row> rows;
  std::vector<Rational> objective;  // dense, one per variable
  std::vector<VariableKey> variables;

  std::size_t num_variables() const { return variables.size(); }

  friend bool operator==(const ConstraintSystem&,
                         const ConstraintSystem&) = default;
};

struct Violation {
  RowTag tag = RowTag::kPlacement;
  int index = 0;
  Rational lhs;
  Rational rhs;
  Rational slack;  // rhs - lhs, negative for a violation
};

struct ValidationReport {
  bool feasible = true;
  std::vector<Violation> violations;
};

// Signed distance of a container center from the zone center, fraction of L.
// Throws std::out_of_range when j is outside 1..PositionCount(size, N).
Rational SignedDistance(ContainerSize size, int j, int bin_count);

ConstraintSystem BuildConstraints(const AircraftSpec& spec,
                                  const Payload& payload);

// Flat variable index of y(c, j) in the layout produced by BuildConstraints.
class VariableLayout {
 public:
  VariableLayout(const Payload& payload, int bin_count);
  std::size_t Index(std::size_t c, int j) const { return start_[c] + j - 1; }
  std::size_t Start(std::size_t c) const { return start_[c]; }
  std::size_t size() const { return total_; }

 private:
  std::vector<std::size_t> start_;
  std::size_t total_ = 0;
};

std::int64_t TotalMass(const Assignment& y, const Payload& payload);

Rational CenterOfGravityExact(const Assignment& y, const AircraftSpec& spec,
                              const Payload& payload);
double CenterOfGravity(const Assignment& y, const AircraftSpec& spec,
                       const Payload& payload);

struct ShearPoint {
  ShearSide side = ShearSide::kLeft;
  int j = 0;
  Rational load;   // kg
  Rational limit;  // kg
};

// Cumulative loads at the bin centers j = 1..floor(N/2) from each end.
std::vector<ShearPoint> ShearProfile(const Assignment& y,
                                     const AircraftSpec& spec,
                                     const Payload& payload);

// Checks every row family of the model directly from the bin occupancy,
// without going through the constraint matrix. Throws std::invalid_argument
// on a dimension mismatch.
ValidationReport Validate(const Assignment& y, const AircraftSpec& spec,
                          const Payload& payload);

// Exact evaluation of an arbitrary system (including appended rows) at y.
ValidationReport CheckRows(const ConstraintSystem& system,
                           const Assignment& y, const Payload& payload);

std::size_t CountNonzeros(const ConstraintSystem& system);

}  // namespace alo

#endif  // ALO_MODEL_H_
