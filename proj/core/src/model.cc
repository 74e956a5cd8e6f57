#include "alo/model.h"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace alo {

Payload::Payload(std::vector<Container> containers)
    : containers_(std::move(containers)) {
  for (std::size_t i = 0; i < containers_.size(); ++i) {
    const Container& c = containers_[i];
    if (c.id <= 0) {
      throw std::invalid_argument("container id must be positive");
    }
    if (!index_of_id_.emplace(c.id, i).second) {
      throw std::invalid_argument("duplicate container id " +
                                  std::to_string(c.id));
    }
    if (c.mass <= 0) {
      throw std::invalid_argument("container " + std::to_string(c.id) +
                                  " has non-positive mass");
    }
    int s = static_cast<int>(c.size);
    if (s < 1 || s > 3) {
      throw std::invalid_argument("container " + std::to_string(c.id) +
                                  " has size outside {1,2,3}");
    }
    by_size_[s - 1].push_back(i);
    total_mass_ += c.mass;
  }
}

std::optional<std::size_t> Payload::IndexOfId(int id) const {
  auto it = index_of_id_.find(id);
  if (it == index_of_id_.end()) return std::nullopt;
  return it->second;
}

namespace {

Rational BinCenter(int bin, int bin_count) {
  return Rational(2 * bin - bin_count - 1, 2 * bin_count);
}

}  // namespace

Rational ShearLimit::At(ShearSide side, int j, int bin_count) const {
  int half = bin_count / 2;
  if (j < 1 || j > half) throw std::out_of_range("shear row out of range");
  if (shape == ShearShape::kLinearSymmetric) {
    return peak * Rational(j, half);
  }
  Rational x = side == ShearSide::kLeft
                   ? BinCenter(j, bin_count)
                   : BinCenter(bin_count - j + 1, bin_count);
  return Interpolate(x);
}

Rational ShearLimit::Interpolate(const Rational& x) const {
  if (x <= table.front().first) return table.front().second;
  if (x >= table.back().first) return table.back().second;
  for (std::size_t i = 1; i < table.size(); ++i) {
    const auto& [x1, s1] = table[i];
    if (x <= x1) {
      const auto& [x0, s0] = table[i - 1];
      return s0 + (s1 - s0) * (x - x0) / (x1 - x0);
    }
  }
  return table.back().second;
}

void AircraftSpec::Validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("aircraft spec: " + what);
  };
  const Rational lo(-1, 2), hi(1, 2);
  if (bin_count < 2) fail("bin_count must be >= 2");
  if (max_payload <= 0) fail("max_payload must be > 0");
  if (empty_mass <= 0) fail("empty_mass must be > 0");
  if (cg_min > cg_max) fail("cg_min > cg_max");
  for (const Rational* x : {&cg_min, &cg_max, &cg_target, &empty_cg}) {
    if (*x < lo || *x > hi) fail("cg positions must lie in [-0.5, 0.5]");
  }
  if (shear_limit.shape == ShearShape::kLinearSymmetric) {
    if (shear_limit.peak <= Rational(0)) fail("shear peak must be > 0");
  } else {
    const auto& t = shear_limit.table;
    if (t.size() < 2) fail("piecewise shear table needs >= 2 points");
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i].first < lo || t[i].first > hi) {
        fail("shear table x outside [-0.5, 0.5]");
      }
      if (t[i].second < Rational(0)) fail("negative shear limit");
      if (i > 0 && t[i].first <= t[i - 1].first) {
        fail("shear table x must be strictly increasing");
      }
    }
  }
}

int PositionCount(ContainerSize size, int bin_count) {
  return size == ContainerSize::kThree ? bin_count - 1 : bin_count;
}

Assignment::Assignment(const Payload& payload, int bin_count)
    : bin_count_(bin_count) {
  offsets_.reserve(payload.size() + 1);
  for (const Container& c : payload.containers()) {
    offsets_.push_back(offsets_.back() + PositionCount(c.size, bin_count));
  }
  bits_.assign(offsets_.back(), 0);
}

bool Assignment::Get(std::size_t c, int j) const {
  if (c >= container_count() || j < 1 || j > positions(c)) {
    throw std::out_of_range("assignment index out of range");
  }
  return bits_[offsets_[c] + j - 1] != 0;
}

void Assignment::Set(std::size_t c, int j, bool value) {
  if (c >= container_count() || j < 1 || j > positions(c)) {
    throw std::out_of_range("assignment index out of range");
  }
  bits_[offsets_[c] + j - 1] = value ? 1 : 0;
}

void Assignment::Place(std::size_t c, int j) {
  Remove(c);
  Set(c, j, true);
}

void Assignment::Remove(std::size_t c) {
  std::fill(bits_.begin() + offsets_[c], bits_.begin() + offsets_[c + 1], 0);
}

std::optional<int> Assignment::PositionOf(std::size_t c) const {
  for (std::size_t i = offsets_[c]; i < offsets_[c + 1]; ++i) {
    if (bits_[i]) return static_cast<int>(i - offsets_[c]) + 1;
  }
  return std::nullopt;
}

std::vector<std::pair<std::size_t, int>> Assignment::Entries() const {
  std::vector<std::pair<std::size_t, int>> out;
  for (std::size_t c = 0; c < container_count(); ++c) {
    for (std::size_t i = offsets_[c]; i < offsets_[c + 1]; ++i) {
      if (bits_[i]) out.emplace_back(c, static_cast<int>(i - offsets_[c]) + 1);
    }
  }
  return out;
}

namespace {

constexpr std::array<std::string_view, 9> kTagNames = {
    "placement", "bin",         "weight",     "cg_upper",  "cg_lower",
    "shear_left", "shear_right", "mass_floor", "cg_window",
};

}  // namespace

std::string_view RowTagName(RowTag tag) {
  return kTagNames[static_cast<std::size_t>(tag)];
}

std::optional<RowTag> RowTagFromName(std::string_view name) {
  for (std::size_t i = 0; i < kTagNames.size(); ++i) {
    if (kTagNames[i] == name) return static_cast<RowTag>(i);
  }
  return std::nullopt;
}

Rational SignedDistance(ContainerSize size, int j, int bin_count) {
  if (j < 1 || j > PositionCount(size, bin_count)) {
    throw std::out_of_range("bin index " + std::to_string(j) +
                            " out of range for size " +
                            std::to_string(static_cast<int>(size)));
  }
  if (size == ContainerSize::kThree) {
    return Rational(2 * j - bin_count, 2 * bin_count);
  }
  return Rational(2 * j - bin_count - 1, 2 * bin_count);
}

VariableLayout::VariableLayout(const Payload& payload, int bin_count)
    : start_(payload.size(), 0) {
  for (ContainerSize s :
       {ContainerSize::kOne, ContainerSize::kTwo, ContainerSize::kThree}) {
    for (std::size_t c : payload.OfSize(s)) {
      start_[c] = total_;
      total_ += PositionCount(s, bin_count);
    }
  }
}

namespace {

// Containers in variable-layout order.
std::vector<std::size_t> LayoutOrder(const Payload& payload) {
  std::vector<std::size_t> order;
  order.reserve(payload.size());
  for (ContainerSize s :
       {ContainerSize::kOne, ContainerSize::kTwo, ContainerSize::kThree}) {
    auto idx = payload.OfSize(s);
    order.insert(order.end(), idx.begin(), idx.end());
  }
  return order;
}

}  // namespace

ConstraintSystem BuildConstraints(const AircraftSpec& spec,
                                  const Payload& payload) {
  spec.Validate();
  const int n_bins = spec.bin_count;
  const VariableLayout layout(payload, n_bins);
  const std::vector<std::size_t> order = LayoutOrder(payload);

  ConstraintSystem sys;
  sys.variables.resize(layout.size());
  sys.objective.resize(layout.size());
  for (std::size_t c : order) {
    const Container& ct = payload[c];
    for (int j = 1; j <= PositionCount(ct.size, n_bins); ++j) {
      std::size_t v = layout.Index(c, j);
      sys.variables[v] = {ct.id, j};
      sys.objective[v] = Rational(-ct.mass);
    }
  }

  // Placement: each container in at most one position.
  for (std::size_t c : order) {
    const Container& ct = payload[c];
    Row row{RowTag::kPlacement, ct.id, {}, Rational(1)};
    for (int j = 1; j <= PositionCount(ct.size, n_bins); ++j) {
      row.terms.push_back({layout.Index(c, j), Rational(1)});
    }
    sys.rows.push_back(std::move(row));
  }

  // Bins. A size-3 container at position p covers bins p and p+1.
  const Rational half(1, 2);
  for (int j = 1; j <= n_bins; ++j) {
    Row row{RowTag::kBin, j, {}, Rational(1)};
    for (std::size_t c : order) {
      const Container& ct = payload[c];
      switch (ct.size) {
        case ContainerSize::kOne:
          row.terms.push_back({layout.Index(c, j), Rational(1)});
          break;
        case ContainerSize::kTwo:
          row.terms.push_back({layout.Index(c, j), half});
          break;
        case ContainerSize::kThree:
          if (j > 1) row.terms.push_back({layout.Index(c, j - 1), Rational(1)});
          if (j < n_bins) row.terms.push_back({layout.Index(c, j), Rational(1)});
          break;
      }
    }
    sys.rows.push_back(std::move(row));
  }

  // Maximum payload.
  {
    Row row{RowTag::kWeight, 0, {}, Rational(spec.max_payload)};
    for (std::size_t c : order) {
      const Container& ct = payload[c];
      for (int j = 1; j <= PositionCount(ct.size, n_bins); ++j) {
        row.terms.push_back({layout.Index(c, j), Rational(ct.mass)});
      }
    }
    sys.rows.push_back(std::move(row));
  }

  // Center-of-gravity window, linearized by multiplying through by the
  // (positive) total mass. Zero coefficients are kept: the structure of the
  // matrix does not depend on the window.
  {
    const Rational we(spec.empty_mass);
    Row upper{RowTag::kCgUpper, 1, {}, we * (spec.cg_max - spec.empty_cg)};
    Row lower{RowTag::kCgLower, 2, {}, we * (spec.empty_cg - spec.cg_min)};
    for (std::size_t c : order) {
      const Container& ct = payload[c];
      const Rational m(ct.mass);
      for (int j = 1; j <= PositionCount(ct.size, n_bins); ++j) {
        const Rational d = SignedDistance(ct.size, j, n_bins);
        upper.terms.push_back({layout.Index(c, j), m * (d - spec.cg_max)});
        lower.terms.push_back({layout.Index(c, j), m * (spec.cg_min - d)});
      }
    }
    sys.rows.push_back(std::move(upper));
    sys.rows.push_back(std::move(lower));
  }

  // Shear at the bin centers, cumulative from each end.
  for (int j = 1; j <= n_bins / 2; ++j) {
    Row left{RowTag::kShearLeft, j, {},
             spec.shear_limit.At(ShearSide::kLeft, j, n_bins)};
    Row right{RowTag::kShearRight, j, {},
              spec.shear_limit.At(ShearSide::kRight, j, n_bins)};
    for (std::size_t c : order) {
      const Container& ct = payload[c];
      const Rational m(ct.mass);
      if (ct.size != ContainerSize::kThree) {
        for (int b = 1; b <= j; ++b) {
          left.terms.push_back({layout.Index(c, b), m});
        }
        for (int b = n_bins - j + 1; b <= n_bins; ++b) {
          right.terms.push_back({layout.Index(c, b), m});
        }
      } else {
        for (int p = 1; p < j; ++p) {
          left.terms.push_back({layout.Index(c, p), m});
        }
        left.terms.push_back({layout.Index(c, j), m * half});
        right.terms.push_back({layout.Index(c, n_bins - j), m * half});
        for (int p = n_bins - j + 1; p <= n_bins - 1; ++p) {
          right.terms.push_back({layout.Index(c, p), m});
        }
      }
    }
    sys.rows.push_back(std::move(left));
    sys.rows.push_back(std::move(right));
  }
  return sys;
}

std::int64_t TotalMass(const Assignment& y, const Payload& payload) {
  std::int64_t mass = 0;
  for (const auto& [c, j] : y.Entries()) mass += payload[c].mass;
  return mass;
}

namespace {

void CheckDimensions(const Assignment& y, const AircraftSpec& spec,
                     const Payload& payload) {
  if (y.container_count() != payload.size() || y.bin_count() != spec.bin_count) {
    throw std::invalid_argument("assignment dimensions do not match instance");
  }
  for (std::size_t c = 0; c < payload.size(); ++c) {
    if (y.positions(c) != PositionCount(payload[c].size, spec.bin_count)) {
      throw std::invalid_argument("assignment row " + std::to_string(c) +
                                  " has the wrong number of positions");
    }
  }
}

}  // namespace

Rational CenterOfGravityExact(const Assignment& y, const AircraftSpec& spec,
                              const Payload& payload) {
  CheckDimensions(y, spec, payload);
  Rational moment = Rational(spec.empty_mass) * spec.empty_cg;
  std::int64_t mass = spec.empty_mass;
  for (const auto& [c, j] : y.Entries()) {
    const Container& ct = payload[c];
    moment += Rational(ct.mass) * SignedDistance(ct.size, j, spec.bin_count);
    mass += ct.mass;
  }
  return moment / Rational(mass);
}

double CenterOfGravity(const Assignment& y, const AircraftSpec& spec,
                       const Payload& payload) {
  return CenterOfGravityExact(y, spec, payload).ToDouble();
}

std::vector<ShearPoint> ShearProfile(const Assignment& y,
                                     const AircraftSpec& spec,
                                     const Payload& payload) {
  CheckDimensions(y, spec, payload);
  const int n_bins = spec.bin_count;
  // Twice the mass resting on each bin; a size-3 container splits evenly
  // between the two bins it straddles.
  std::vector<std::int64_t> twice(n_bins + 2, 0);
  for (const auto& [c, j] : y.Entries()) {
    const Container& ct = payload[c];
    if (ct.size == ContainerSize::kThree) {
      twice[j] += ct.mass;
      twice[j + 1] += ct.mass;
    } else {
      twice[j] += 2 * ct.mass;
    }
  }
  std::vector<ShearPoint> out;
  std::int64_t left = 0, right = 0;
  for (int j = 1; j <= n_bins / 2; ++j) {
    left += twice[j];
    right += twice[n_bins - j + 1];
    out.push_back({ShearSide::kLeft, j, Rational(left, 2),
                   spec.shear_limit.At(ShearSide::kLeft, j, n_bins)});
    out.push_back({ShearSide::kRight, j, Rational(right, 2),
                   spec.shear_limit.At(ShearSide::kRight, j, n_bins)});
  }
  return out;
}

ValidationReport Validate(const Assignment& y, const AircraftSpec& spec,
                          const Payload& payload) {
  CheckDimensions(y, spec, payload);
  ValidationReport report;
  auto check = [&](RowTag tag, int index, const Rational& lhs,
                   const Rational& rhs) {
    if (lhs > rhs) report.violations.push_back({tag, index, lhs, rhs, rhs - lhs});
  };
  const int n_bins = spec.bin_count;

  // Placement and bin occupancy (twice the occupied fraction per bin).
  std::vector<std::int64_t> count(payload.size(), 0);
  std::vector<std::int64_t> occupancy2(n_bins + 2, 0);
  std::int64_t mass = 0;
  Rational moment = 0;
  for (const auto& [c, j] : y.Entries()) {
    const Container& ct = payload[c];
    ++count[c];
    mass += ct.mass;
    moment += Rational(ct.mass) * SignedDistance(ct.size, j, n_bins);
    switch (ct.size) {
      case ContainerSize::kOne: occupancy2[j] += 2; break;
      case ContainerSize::kTwo: occupancy2[j] += 1; break;
      case ContainerSize::kThree:
        occupancy2[j] += 2;
        occupancy2[j + 1] += 2;
        break;
    }
  }
  for (ContainerSize s :
       {ContainerSize::kOne, ContainerSize::kTwo, ContainerSize::kThree}) {
    for (std::size_t c : payload.OfSize(s)) {
      check(RowTag::kPlacement, payload[c].id, Rational(count[c]), Rational(1));
    }
  }
  for (int j = 1; j <= n_bins; ++j) {
    check(RowTag::kBin, j, Rational(occupancy2[j], 2), Rational(1));
  }
  check(RowTag::kWeight, 0, Rational(mass), Rational(spec.max_payload));

  // x_cg <= max  <=>  moment - max*mass <= We (max - xe), likewise for min.
  const Rational m(mass), we(spec.empty_mass);
  check(RowTag::kCgUpper, 1, moment - spec.cg_max * m,
        we * (spec.cg_max - spec.empty_cg));
  check(RowTag::kCgLower, 2, spec.cg_min * m - moment,
        we * (spec.empty_cg - spec.cg_min));

  for (const ShearPoint& p : ShearProfile(y, spec, payload)) {
    check(p.side == ShearSide::kLeft ? RowTag::kShearLeft : RowTag::kShearRight,
          p.j, p.load, p.limit);
  }
  report.feasible = report.violations.empty();
  return report;
}

ValidationReport CheckRows(const ConstraintSystem& system, const Assignment& y,
                           const Payload& payload) {
  std::vector<std::uint8_t> value(system.num_variables(), 0);
  for (std::size_t v = 0; v < system.num_variables(); ++v) {
    const VariableKey& key = system.variables[v];
    auto c = payload.IndexOfId(key.container_id);
    if (!c || *c >= y.container_count()) {
      throw std::invalid_argument("variable refers to unknown container " +
                                  std::to_string(key.container_id));
    }
    value[v] = y.Get(*c, key.bin) ? 1 : 0;
  }
  ValidationReport report;
  for (const Row& row : system.rows) {
    Rational lhs = 0;
    for (const Term& t : row.terms) {
      if (value[t.var]) lhs += t.coef;
    }
    if (lhs > row.rhs) {
      report.violations.push_back({row.tag, row.index, lhs, row.rhs,
                                   row.rhs - lhs});
    }
  }
  report.feasible = report.violations.empty();
  return report;
}

std::size_t CountNonzeros(const ConstraintSystem& system) {
  std::size_t n = 0;
  for (const Row& row : system.rows) n += row.terms.size();
  return n;
}

}  // namespace alo
