#include "alo/model.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "alo/instance.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace alo {
namespace {

using testing::OracleCg;
using testing::OracleNonzeros;
using testing::OracleRowCount;
using testing::OracleShearLeft;
using testing::OracleShearRight;
using testing::PackingFeasible;
using testing::RandomAssignment;
using testing::RandomTinyInstance;

Rational Q(std::int64_t p, std::int64_t q) { return Rational(Int128(p), Int128(q)); }

std::size_t CountTag(const ConstraintSystem& s, RowTag tag) {
  std::size_t n = 0;
  for (const Row& r : s.rows) n += r.tag == tag;
  return n;
}

const Row& FindRow(const ConstraintSystem& s, RowTag tag, int index) {
  for (const Row& r : s.rows) {
    if (r.tag == tag && r.index == index) return r;
  }
  throw std::out_of_range("row not found");
}

TEST(SignedDistanceTest, Examples) {
  EXPECT_EQ(SignedDistance(ContainerSize::kOne, 1, 20), Q(-19, 40));
  EXPECT_EQ(SignedDistance(ContainerSize::kThree, 10, 20), Rational(0));
  EXPECT_EQ(SignedDistance(ContainerSize::kTwo, 20, 20), Q(19, 40));
}

TEST(SignedDistanceTest, OutOfRangeThrows) {
  EXPECT_THROW(SignedDistance(ContainerSize::kOne, 0, 20), std::out_of_range);
  EXPECT_THROW(SignedDistance(ContainerSize::kTwo, 21, 20), std::out_of_range);
  EXPECT_THROW(SignedDistance(ContainerSize::kThree, 20, 20), std::out_of_range);
}

TEST(SignedDistanceTest, MatchesBinGeometryAndIsAntisymmetric) {
  for (int n_bins = 2; n_bins <= 25; ++n_bins) {
    for (int j = 1; j <= n_bins; ++j) {
      for (ContainerSize s : {ContainerSize::kOne, ContainerSize::kTwo}) {
        EXPECT_EQ(SignedDistance(s, j, n_bins), testing::CenterOf(s, j, n_bins));
        EXPECT_EQ(SignedDistance(s, j, n_bins), -SignedDistance(s, n_bins + 1 - j, n_bins));
      }
    }
    for (int j = 1; j <= n_bins - 1; ++j) {
      EXPECT_EQ(SignedDistance(ContainerSize::kThree, j, n_bins),
                testing::CenterOf(ContainerSize::kThree, j, n_bins));
      EXPECT_EQ(SignedDistance(ContainerSize::kThree, j, n_bins),
                -SignedDistance(ContainerSize::kThree, n_bins - j, n_bins));
    }
  }
}

TEST(BuildConstraintsTest, ReferenceInstanceShape) {
  Instance ref = AirbusReferenceInstance();
  ConstraintSystem s = BuildConstraints(ref.spec, ref.payload);
  EXPECT_EQ(s.rows.size(), 73u);
  EXPECT_EQ(s.rows.size(), OracleRowCount(30, 20));
  EXPECT_EQ(s.num_variables(), 600u);
  EXPECT_EQ(CountNonzeros(s), 6300u);
  EXPECT_EQ(CountNonzeros(s), OracleNonzeros(ref.payload, 20));
  EXPECT_EQ(CountTag(s, RowTag::kPlacement), 30u);
  EXPECT_EQ(CountTag(s, RowTag::kBin), 20u);
  EXPECT_EQ(CountTag(s, RowTag::kWeight), 1u);
  EXPECT_EQ(CountTag(s, RowTag::kCgUpper), 1u);
  EXPECT_EQ(CountTag(s, RowTag::kCgLower), 1u);
  EXPECT_EQ(CountTag(s, RowTag::kShearLeft), 10u);
  EXPECT_EQ(CountTag(s, RowTag::kShearRight), 10u);
  EXPECT_EQ(FindRow(s, RowTag::kWeight, 0).rhs, Rational(40000));
  EXPECT_EQ(FindRow(s, RowTag::kShearLeft, 10).rhs, Rational(22000));
  EXPECT_EQ(FindRow(s, RowTag::kShearRight, 5).rhs, Rational(11000));
  // W_e (x_max - x_e) and W_e (x_e - x_min).
  EXPECT_EQ(FindRow(s, RowTag::kCgUpper, 1).rhs, Rational(30000));
  EXPECT_EQ(FindRow(s, RowTag::kCgLower, 2).rhs, Rational(6000));
  for (std::size_t v = 0; v < s.num_variables(); ++v) {
    auto c = ref.payload.IndexOfId(s.variables[v].container_id);
    ASSERT_TRUE(c.has_value());
    EXPECT_EQ(s.objective[v], Rational(-ref.payload[*c].mass));
  }
}

TEST(BuildConstraintsTest, VariableLayoutOrdersBySizeClass) {
  Payload p({{7, ContainerSize::kThree, 10},
             {3, ContainerSize::kOne, 20},
             {5, ContainerSize::kTwo, 30},
             {1, ContainerSize::kOne, 40}});
  AircraftSpec spec = DefaultAircraft(4);
  ConstraintSystem s = BuildConstraints(spec, p);
  ASSERT_EQ(s.num_variables(), 4u + 4u + 4u + 3u);
  EXPECT_EQ(s.variables[0], (VariableKey{3, 1}));
  EXPECT_EQ(s.variables[4], (VariableKey{1, 1}));
  EXPECT_EQ(s.variables[8], (VariableKey{5, 1}));
  EXPECT_EQ(s.variables[12], (VariableKey{7, 1}));
  EXPECT_EQ(s.variables[14], (VariableKey{7, 3}));
  VariableLayout layout(p, 4);
  for (std::size_t v = 0; v < s.num_variables(); ++v) {
    std::size_t c = *p.IndexOfId(s.variables[v].container_id);
    EXPECT_EQ(layout.Index(c, s.variables[v].bin), v);
  }
}

TEST(BuildConstraintsTest, EmptyPayload) {
  AircraftSpec spec = DefaultAircraft(4);
  ConstraintSystem s = BuildConstraints(spec, Payload());
  EXPECT_EQ(s.rows.size(), 4u + 1u + 2u + 4u);
  EXPECT_EQ(s.num_variables(), 0u);
  EXPECT_EQ(CountNonzeros(s), 0u);
  Assignment y(Payload(), 4);
  EXPECT_TRUE(CheckRows(s, y, Payload()).feasible);
}

TEST(BuildConstraintsTest, RowCountAndNonzerosOnRandomInstances) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Instance inst = RandomTinyInstance(rng, 12, 15);
    ConstraintSystem s = BuildConstraints(inst.spec, inst.payload);
    EXPECT_EQ(s.rows.size(), OracleRowCount(inst.payload.size(), inst.spec.bin_count));
    EXPECT_EQ(CountNonzeros(s), OracleNonzeros(inst.payload, inst.spec.bin_count));
  }
}

TEST(BuildConstraintsTest, OddBinCountLeavesMiddleBinUncovered) {
  Payload p({{1, ContainerSize::kOne, 100}});
  AircraftSpec spec = DefaultAircraft(5);
  ConstraintSystem s = BuildConstraints(spec, p);
  EXPECT_EQ(CountTag(s, RowTag::kShearLeft), 2u);
  const Row& left = FindRow(s, RowTag::kShearLeft, 2);
  const Row& right = FindRow(s, RowTag::kShearRight, 2);
  VariableLayout layout(p, 5);
  for (const Row* r : {&left, &right}) {
    for (const Term& t : r->terms) EXPECT_NE(t.var, layout.Index(0, 3));
  }
}

TEST(CenterOfGravityTest, Examples) {
  Instance ref = AirbusReferenceInstance();
  Assignment y(ref.payload, 20);
  EXPECT_DOUBLE_EQ(CenterOfGravity(y, ref.spec, ref.payload), -0.05);
  y.Place(0, 1);  // container 1, 2134 kg
  EXPECT_NEAR(CenterOfGravity(y, ref.spec, ref.payload), -0.057426, 5e-7);
  EXPECT_EQ(CenterOfGravityExact(y, ref.spec, ref.payload),
            (Rational(2134) * Q(-19, 40) + Rational(120000) * Q(-1, 20)) / Rational(122134));

  Payload two({{1, ContainerSize::kOne, 1000}, {2, ContainerSize::kOne, 1000}});
  Assignment z(two, 20);
  z.Place(0, 1);
  z.Place(1, 20);
  EXPECT_NEAR(CenterOfGravity(z, ref.spec, two), -6000.0 / 122000.0, 1e-12);
  EXPECT_NEAR(CenterOfGravity(z, ref.spec, two), -0.049180, 5e-7);
}

TEST(ShearProfileTest, Examples) {
  Instance ref = AirbusReferenceInstance();
  Assignment y(ref.payload, 20);
  auto profile = ShearProfile(y, ref.spec, ref.payload);
  ASSERT_EQ(profile.size(), 20u);
  for (const ShearPoint& p : profile) {
    EXPECT_EQ(p.load, Rational(0));
    if (p.j == 5) EXPECT_EQ(p.limit, Rational(11000));
    if (p.j == 10) EXPECT_EQ(p.limit, Rational(22000));
  }
}

TEST(TotalMassTest, Examples) {
  Instance ref = AirbusReferenceInstance();
  Assignment y(ref.payload, 20);
  EXPECT_EQ(TotalMass(y, ref.payload), 0);
  y.Place(0, 1);
  y.Place(1, 2);
  EXPECT_EQ(TotalMass(y, ref.payload), 5589);
  EXPECT_EQ(ref.payload.TotalMass(), 57897);
}

TEST(ValidateTest, Examples) {
  Instance ref = AirbusReferenceInstance();
  Assignment y(ref.payload, 20);
  EXPECT_TRUE(Validate(y, ref.spec, ref.payload).feasible);

  y.Place(0, 7);
  y.Place(1, 7);
  ValidationReport rep = Validate(y, ref.spec, ref.payload);
  ASSERT_EQ(rep.violations.size(), 1u);
  EXPECT_EQ(rep.violations[0].tag, RowTag::kBin);
  EXPECT_EQ(rep.violations[0].index, 7);
  EXPECT_EQ(rep.violations[0].lhs, Rational(2));
  EXPECT_EQ(rep.violations[0].rhs, Rational(1));

  Assignment z(ref.payload, 20);
  z.Place(20, 11);  // two size-2 containers share bin 11
  z.Place(21, 11);
  ValidationReport ok = Validate(z, ref.spec, ref.payload);
  EXPECT_TRUE(ok.feasible);
  EXPECT_TRUE(ok.violations.empty());
}

TEST(ValidateTest, DimensionMismatchThrows) {
  Instance ref = AirbusReferenceInstance();
  Assignment y(ref.payload, 19);
  EXPECT_THROW(Validate(y, ref.spec, ref.payload), std::invalid_argument);
}

TEST(AssignmentTest, BoundsAndPlacement) {
  Payload p({{1, ContainerSize::kOne, 5}, {2, ContainerSize::kThree, 7}});
  Assignment y(p, 4);
  EXPECT_EQ(y.positions(0), 4);
  EXPECT_EQ(y.positions(1), 3);
  EXPECT_THROW(y.Set(1, 4, true), std::out_of_range);
  EXPECT_THROW(y.Get(0, 0), std::out_of_range);
  y.Set(0, 2, true);
  y.Set(0, 3, true);
  y.Place(0, 4);
  EXPECT_EQ(y.PositionOf(0), 4);
  EXPECT_FALSE(y.Get(0, 2));
  y.Remove(0);
  EXPECT_FALSE(y.PositionOf(0).has_value());
}

TEST(PayloadTest, RejectsBadInput) {
  EXPECT_THROW(Payload({{1, ContainerSize::kOne, 5}, {1, ContainerSize::kTwo, 6}}),
               std::invalid_argument);
  EXPECT_THROW(Payload({{1, ContainerSize::kOne, 0}}), std::invalid_argument);
  EXPECT_THROW(Payload({{0, ContainerSize::kOne, 3}}), std::invalid_argument);
}

TEST(AircraftSpecTest, ValidateRejectsBrokenInvariants) {
  AircraftSpec spec = DefaultAircraft(20);
  EXPECT_NO_THROW(spec.Validate());
  AircraftSpec bad = spec;
  bad.bin_count = 1;
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
  bad = spec;
  bad.cg_min = Q(3, 10);
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
  bad = spec;
  bad.cg_max = Q(6, 10);
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
  bad = spec;
  bad.shear_limit.peak = 0;
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
}

TEST(ShearLimitTest, PiecewiseInterpolatesAtBinCenters) {
  ShearLimit lim;
  lim.shape = ShearShape::kPiecewiseLinear;
  lim.table = {{Q(-1, 2), Rational(0)}, {Rational(0), Rational(1000)}, {Q(1, 2), Rational(0)}};
  lim.peak = lim.Interpolate(0);
  EXPECT_EQ(lim.peak, Rational(1000));
  // N = 4: left row 1 sits at x = -3/8, right row 1 at x = 3/8.
  EXPECT_EQ(lim.At(ShearSide::kLeft, 1, 4), Rational(250));
  EXPECT_EQ(lim.At(ShearSide::kRight, 1, 4), Rational(250));
  EXPECT_EQ(lim.At(ShearSide::kLeft, 2, 4), Rational(750));
}

// Cross-checks the constraint rows against the independent oracles on many
// random assignments of random instances.
TEST(RandomAssignmentTest, RowsAgreeWithPhysics) {
  std::mt19937_64 rng(2024);
  int trials = 0;
  int packing_feasible = 0;
  while (trials < 2000) {
    Instance inst = RandomTinyInstance(rng, 10, 12);
    if (inst.payload.empty()) continue;
    const AircraftSpec& spec = inst.spec;
    const Payload& payload = inst.payload;
    ConstraintSystem sys = BuildConstraints(spec, payload);
    for (int k = 0; k < 10; ++k, ++trials) {
      Assignment y = RandomAssignment(rng, payload, spec.bin_count,
                                      std::uniform_real_distribution<double>(0.1, 0.9)(rng));
      ValidationReport direct = Validate(y, spec, payload);
      ValidationReport rows = CheckRows(sys, y, payload);
      ASSERT_EQ(direct.feasible, rows.feasible);
      ASSERT_EQ(direct.violations.size(), rows.violations.size());

      bool packing_ok = true;
      bool cg_upper_ok = true, cg_lower_ok = true;
      std::vector<std::pair<RowTag, int>> shear_bad;
      for (const Violation& v : rows.violations) {
        if (v.tag == RowTag::kPlacement || v.tag == RowTag::kBin) packing_ok = false;
        if (v.tag == RowTag::kCgUpper) cg_upper_ok = false;
        if (v.tag == RowTag::kCgLower) cg_lower_ok = false;
        if (v.tag == RowTag::kShearLeft || v.tag == RowTag::kShearRight) {
          shear_bad.push_back({v.tag, v.index});
        }
      }
      ASSERT_EQ(packing_ok, PackingFeasible(y, payload));
      packing_feasible += packing_ok;

      // CG rows hold exactly when the center of gravity is in the window.
      Rational cg = OracleCg(y, spec, payload);
      ASSERT_EQ(cg, CenterOfGravityExact(y, spec, payload));
      ASSERT_EQ(cg_upper_ok, cg <= spec.cg_max);
      ASSERT_EQ(cg_lower_ok, cg >= spec.cg_min);

      // Shear rows hold exactly when the cumulative load is within limits.
      auto profile = ShearProfile(y, spec, payload);
      for (const ShearPoint& p : profile) {
        Rational load = p.side == ShearSide::kLeft ? OracleShearLeft(y, payload, p.j)
                                                   : OracleShearRight(y, payload, p.j);
        ASSERT_EQ(p.load, load);
        RowTag tag = p.side == ShearSide::kLeft ? RowTag::kShearLeft : RowTag::kShearRight;
        bool row_bad = std::find(shear_bad.begin(), shear_bad.end(),
                                 std::make_pair(tag, p.j)) != shear_bad.end();
        ASSERT_EQ(row_bad, load > p.limit);
      }

      // Objective identity.
      Rational fy(0);
      for (const auto& [c, j] : y.Entries()) {
        VariableLayout layout(payload, spec.bin_count);
        fy = fy + sys.objective[layout.Index(c, j)];
      }
      ASSERT_EQ(-fy, Rational(TotalMass(y, payload)));
    }
  }
  EXPECT_GE(trials, 1000);
  EXPECT_GT(packing_feasible, 100);
}

TEST(RandomAssignmentTest, MirroredLoadingMirrorsPhysics) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    Instance inst = RandomTinyInstance(rng, 8, 10);
    inst.spec.empty_cg = 0;
    const int n_bins = inst.spec.bin_count;
    Assignment y = RandomAssignment(rng, inst.payload, n_bins);
    Assignment m(inst.payload, n_bins);
    for (const auto& [c, j] : y.Entries()) {
      int mirrored = inst.payload[c].size == ContainerSize::kThree ? n_bins - j : n_bins + 1 - j;
      m.Set(c, mirrored, true);
    }
    EXPECT_EQ(CenterOfGravityExact(m, inst.spec, inst.payload),
              -CenterOfGravityExact(y, inst.spec, inst.payload));
    for (int j = 1; j <= n_bins / 2; ++j) {
      EXPECT_EQ(OracleShearLeft(m, inst.payload, j), OracleShearRight(y, inst.payload, j));
    }
  }
}

}  // namespace
}  // namespace alo
