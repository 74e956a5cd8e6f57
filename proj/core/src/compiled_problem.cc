#include "compiled_problem.h"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace alo::internal {

namespace {

Int128 Abs128(Int128 v) { return v < 0 ? -v : v; }

Int128 FloorDiv(Int128 a, Int128 b) {
  Int128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

CompiledProblem::CompiledProblem(const ConstraintSystem& system,
                                 const Payload& payload,
                                 const AircraftSpec& spec)
    : bin_count_(spec.bin_count), payload_(&payload) {
  const std::size_t nv = system.num_variables();
  if (system.objective.size() != nv) {
    throw std::invalid_argument("objective length does not match variables");
  }
  choices_.resize(payload.size());
  std::vector<std::size_t> owner(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    const VariableKey& key = system.variables[v];
    auto c = payload.IndexOfId(key.container_id);
    if (!c) {
      throw std::invalid_argument("variable refers to unknown container " +
                                  std::to_string(key.container_id));
    }
    int positions = PositionCount(payload[*c].size, bin_count_);
    if (key.bin < 1 || key.bin > positions) {
      throw std::invalid_argument("variable bin out of range for container " +
                                  std::to_string(key.container_id));
    }
    choices_[*c].push_back({v, key.bin});
    owner[v] = *c;
  }
  for (auto& list : choices_) {
    std::sort(list.begin(), list.end(),
              [](const Choice& a, const Choice& b) { return a.bin < b.bin; });
    for (std::size_t i = 1; i < list.size(); ++i) {
      if (list[i].bin == list[i - 1].bin) {
        throw std::invalid_argument("duplicate variable for one position");
      }
    }
  }
  mass_.resize(payload.size());
  for (std::size_t c = 0; c < payload.size(); ++c) mass_[c] = payload[c].mass;
  total_mass_ = payload.TotalMass();

  std::vector<std::vector<ColumnEntry>> cols(nv);
  rows_.reserve(system.rows.size());
  for (const Row& row : system.rows) {
    IntRow ir;
    ir.tag = row.tag;
    ir.index = row.index;
    Int128 scale = 1;
    for (const Term& t : row.terms) scale = Lcm(scale, t.coef.den());
    ir.scale = scale;
    Int128 num = CheckedMul(row.rhs.num(), scale);
    ir.rhs = FloorDiv(num, row.rhs.den());
    Int128 norm = 1;
    for (const Term& t : row.terms) {
      if (t.var >= nv) throw std::invalid_argument("row refers to unknown variable");
      Int128 coef = CheckedMul(t.coef.num(), scale / t.coef.den());
      if (coef == 0) continue;
      if (coef < 0) ir.has_negative = true;
      norm = std::max(norm, Abs128(coef));
      cols[t.var].push_back({static_cast<std::uint32_t>(rows_.size()), coef});
    }
    ir.norm = static_cast<double>(norm);
    rows_.push_back(ir);
  }
  col_start_.assign(nv + 1, 0);
  for (std::size_t v = 0; v < nv; ++v) col_start_[v + 1] = col_start_[v] + cols[v].size();
  entries_.reserve(col_start_[nv]);
  for (auto& col : cols) entries_.insert(entries_.end(), col.begin(), col.end());

  // Objective.
  Int128 oscale = 1;
  for (const Rational& f : system.objective) oscale = Lcm(oscale, f.den());
  objective_scale_ = oscale;
  objective_.resize(nv);
  bool all_zero = true;
  bool is_mass = true;
  for (std::size_t v = 0; v < nv; ++v) {
    const Rational& f = system.objective[v];
    objective_[v] = CheckedMul(f.num(), oscale / f.den());
    if (objective_[v] != 0) all_zero = false;
    if (f != Rational(-mass_[owner[v]])) is_mass = false;
  }
  if (all_zero) {
    objective_kind_ = ObjectiveKind::kNull;
  } else if (is_mass) {
    objective_kind_ = ObjectiveKind::kMass;
  } else {
    objective_kind_ = ObjectiveKind::kGeneral;
  }

  // Mass cap and covering shear rows. Weight rows are recognized only when
  // their coefficients are the container masses.
  mass_cap_ = total_mass_;
  int half = bin_count_ / 2;
  std::optional<std::size_t> left, right;
  for (std::size_t r = 0; r < system.rows.size(); ++r) {
    const Row& row = system.rows[r];
    if (row.tag == RowTag::kWeight) {
      bool masses = row.terms.size() == nv;
      for (const Term& t : row.terms) {
        masses = masses && t.coef == Rational(mass_[owner[t.var]]);
      }
      if (masses && row.rhs.Floor() < mass_cap_) {
        mass_cap_ = static_cast<std::int64_t>(std::max<Int128>(row.rhs.Floor(), -1));
        weight_row_ = r;
      } else if (masses && !weight_row_) {
        weight_row_ = r;
      }
    }
    if (bin_count_ % 2 == 0 && row.index == half) {
      if (row.tag == RowTag::kShearLeft) left = r;
      if (row.tag == RowTag::kShearRight) right = r;
    }
  }
  if (left && right) {
    // Verify full coverage: every variable appears in exactly one of the two
    // rows with its mass, or in both with half its mass each.
    std::vector<Rational> sum(nv, Rational(0));
    for (std::size_t r : {*left, *right}) {
      for (const Term& t : system.rows[r].terms) sum[t.var] = sum[t.var] + t.coef;
    }
    bool ok = true;
    for (std::size_t v = 0; v < nv && ok; ++v) ok = sum[v] == Rational(mass_[owner[v]]);
    if (ok) covering_shear_ = std::make_pair(*left, *right);
  }
}

Assignment CompiledProblem::ToAssignment(const std::vector<int>& pos) const {
  Assignment y(*payload_, bin_count_);
  for (std::size_t c = 0; c < pos.size(); ++c) {
    if (pos[c] >= 0) y.Place(c, choices_[c][pos[c]].bin);
  }
  return y;
}

std::int64_t TauTarget(double tau, std::int64_t cap) {
  Rational t = Rational::FromDouble(tau) * Rational(cap);
  return static_cast<std::int64_t>(t.Ceil());
}

}  // namespace alo::internal
