#ifndef ALO_TESTS_ORACLES_H_
#define ALO_TESTS_ORACLES_H_

// Independent reference implementations used by the tests. None of them
// goes through BuildConstraints or the library's physics routines.

#include <cstdint>
#include <algorithm>
#include <functional>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "alo/instance.h"
#include "alo/model.h"
#include "alo/rational.h"

namespace alo::testing {

struct Placement {
  std::size_t c = 0;
  int j = 0;  // first occupied bin
};

inline std::vector<Placement> Placements(const Assignment& y) {
  std::vector<Placement> out;
  for (const auto& [c, j] : y.Entries()) out.push_back({c, j});
  return out;
}

// Fills bins physically: a bin holds one size-1 container, or up to two
// size-2 containers, or one half of a size-3 container, and every container
// sits in at most one place.
inline bool PackingFeasible(const Assignment& y, const Payload& payload) {
  const int n_bins = y.bin_count();
  std::vector<int> ones(n_bins + 1), twos(n_bins + 1), threes(n_bins + 1);
  std::vector<int> count(payload.size());
  for (const Placement& p : Placements(y)) {
    ++count[p.c];
    switch (payload[p.c].size) {
      case ContainerSize::kOne: ++ones[p.j]; break;
      case ContainerSize::kTwo: ++twos[p.j]; break;
      case ContainerSize::kThree: ++threes[p.j]; ++threes[p.j + 1]; break;
    }
  }
  for (int c : count) {
    if (c > 1) return false;
  }
  for (int j = 1; j <= n_bins; ++j) {
    int kinds = (ones[j] > 0) + (twos[j] > 0) + (threes[j] > 0);
    if (kinds > 1 || ones[j] > 1 || twos[j] > 2 || threes[j] > 1) return false;
  }
  return true;
}

// Center of a container in fractions of L, from the bin geometry.
inline Rational CenterOf(ContainerSize size, int j, int n_bins) {
  Rational left_edge = Rational(j - 1, n_bins) - Rational(1, 2);
  Rational width = Rational(size == ContainerSize::kThree ? 2 : 1, n_bins);
  return left_edge + width / Rational(2);
}

inline Rational OracleCg(const Assignment& y, const AircraftSpec& spec,
                         const Payload& payload) {
  Rational moment = Rational(spec.empty_mass) * spec.empty_cg;
  Rational mass = Rational(spec.empty_mass);
  for (const Placement& p : Placements(y)) {
    Rational m(payload[p.c].mass);
    moment = moment + m * CenterOf(payload[p.c].size, p.j, spec.bin_count);
    mass = mass + m;
  }
  return moment / mass;
}

// Mass in each bin, size-3 containers split evenly over their two bins.
inline std::vector<Rational> BinLoads(const Assignment& y,
                                      const Payload& payload) {
  std::vector<Rational> load(y.bin_count() + 2, Rational(0));
  for (const Placement& p : Placements(y)) {
    Rational m(payload[p.c].mass);
    if (payload[p.c].size == ContainerSize::kThree) {
      load[p.j] = load[p.j] + m / Rational(2);
      load[p.j + 1] = load[p.j + 1] + m / Rational(2);
    } else {
      load[p.j] = load[p.j] + m;
    }
  }
  return load;
}

inline Rational OracleShearLeft(const Assignment& y, const Payload& payload,
                                int j) {
  auto load = BinLoads(y, payload);
  Rational s(0);
  for (int b = 1; b <= j; ++b) s = s + load[b];
  return s;
}

inline Rational OracleShearRight(const Assignment& y, const Payload& payload,
                                 int j) {
  auto load = BinLoads(y, payload);
  Rational s(0);
  const int n_bins = y.bin_count();
  for (int b = n_bins - j + 1; b <= n_bins; ++b) s = s + load[b];
  return s;
}

// Coefficient count of BuildConstraints, family by family.
inline std::size_t OracleNonzeros(const Payload& payload, int n_bins) {
  std::size_t total = 0;
  const int half = n_bins / 2;
  for (const Container& c : payload.containers()) {
    std::size_t positions = c.size == ContainerSize::kThree ? n_bins - 1 : n_bins;
    std::size_t bins = c.size == ContainerSize::kThree ? 2 : 1;
    total += positions;             // placement
    total += positions * bins;      // bin rows
    total += positions;             // weight
    total += 2 * positions;         // cg rows
    for (int j = 1; j <= half; ++j) total += 2 * j;  // shear, both sides
  }
  return total;
}

inline std::size_t OracleRowCount(std::size_t n, int n_bins) {
  return n + n_bins + 1 + 2 + 2 * (n_bins / 2);
}

// Small instance with loose limits, suited to exhaustive enumeration.
inline Instance RandomTinyInstance(std::mt19937_64& rng, int max_n,
                                   int max_bins) {
  std::uniform_int_distribution<int> n_dist(0, max_n);
  std::uniform_int_distribution<int> bins_dist(2, max_bins);
  std::uniform_int_distribution<int> size_dist(1, 3);
  std::uniform_int_distribution<int> mass_dist(1, 60);
  int n = n_dist(rng);
  int n_bins = bins_dist(rng);
  std::vector<Container> containers;
  std::int64_t sum = 0;
  for (int k = 1; k <= n; ++k) {
    Container c{k, static_cast<ContainerSize>(size_dist(rng)), mass_dist(rng)};
    sum += c.mass;
    containers.push_back(c);
  }
  Instance inst;
  inst.payload = Payload(containers);
  AircraftSpec& spec = inst.spec;
  spec.bin_count = n_bins;
  spec.max_payload = std::max<std::int64_t>(
      1, std::uniform_int_distribution<std::int64_t>(sum / 2, sum + 1)(rng));
  spec.empty_mass = std::uniform_int_distribution<std::int64_t>(20, 200)(rng);
  spec.empty_cg = Rational(std::uniform_int_distribution<int>(-10, 10)(rng), 100);
  spec.cg_min = Rational(std::uniform_int_distribution<int>(-50, -5)(rng), 100);
  spec.cg_max = Rational(std::uniform_int_distribution<int>(5, 50)(rng), 100);
  spec.cg_target = Rational(std::uniform_int_distribution<int>(-5, 5)(rng), 100);
  spec.shear_limit.peak =
      Rational(std::uniform_int_distribution<std::int64_t>(sum / 3 + 1, sum + 10)(rng));
  inst.provenance.kind = Provenance::Kind::kFile;
  return inst;
}

// Random assignment: each container is left out or placed at a random
// position, sometimes at two positions to exercise placement rows.
inline Assignment RandomAssignment(std::mt19937_64& rng, const Payload& payload,
                                   int n_bins, double place_prob = 0.5) {
  Assignment y(payload, n_bins);
  std::uniform_real_distribution<double> u(0, 1);
  for (std::size_t c = 0; c < payload.size(); ++c) {
    int positions = y.positions(c);
    if (u(rng) < place_prob) {
      y.Set(c, std::uniform_int_distribution<int>(1, positions)(rng), true);
    }
    if (u(rng) < 0.05) {
      y.Set(c, std::uniform_int_distribution<int>(1, positions)(rng), true);
    }
  }
  return y;
}

// Calls `visit` for every assignment with each container at most once.
inline void ForEachAssignment(const Payload& payload, int n_bins,
                              const std::function<void(const Assignment&)>& visit) {
  Assignment y(payload, n_bins);
  std::function<void(std::size_t)> rec = [&](std::size_t c) {
    if (c == payload.size()) {
      visit(y);
      return;
    }
    rec(c + 1);
    for (int j = 1; j <= y.positions(c); ++j) {
      y.Place(c, j);
      rec(c + 1);
      y.Remove(c);
    }
  };
  rec(0);
}

// Limit of the linear symmetric shear curve at row j.
inline Rational OracleShearLimit(const AircraftSpec& spec, int j) {
  return spec.shear_limit.peak * Rational(j, spec.bin_count / 2);
}

// Physical feasibility from first principles: packing, payload weight,
// shear on both sides and, optionally, the CG window. Linear shear only.
inline bool OracleFeasible(const Assignment& y, const Instance& inst,
                           bool check_cg_window = true) {
  if (!PackingFeasible(y, inst.payload)) return false;
  std::int64_t mass = 0;
  for (const Placement& p : Placements(y)) mass += inst.payload[p.c].mass;
  if (mass > inst.spec.max_payload) return false;
  const int n_bins = inst.spec.bin_count;
  auto load = BinLoads(y, inst.payload);
  Rational left(0), right(0);
  for (int j = 1; j <= n_bins / 2; ++j) {
    left = left + load[j];
    right = right + load[n_bins + 1 - j];
    Rational limit = OracleShearLimit(inst.spec, j);
    if (left > limit || right > limit) return false;
  }
  if (check_cg_window) {
    Rational cg = OracleCg(y, inst.spec, inst.payload);
    if (cg < inst.spec.cg_min || cg > inst.spec.cg_max) return false;
  }
  return true;
}

inline std::int64_t OracleMass(const Assignment& y, const Payload& payload) {
  std::int64_t mass = 0;
  for (const Placement& p : Placements(y)) mass += payload[p.c].mass;
  return mass;
}

// Exhaustive answers for CG optimization on a tiny instance.
struct CgOracle {
  std::int64_t w_max = -1;                 // optimal carried mass
  std::optional<Rational> with_window;     // best deviation, CG window kept
  std::optional<Rational> without_window;  // best deviation, CG window dropped
};

// Optimal mass first, then the smallest |x_cg - x_target| among loadings
// carrying at least tau times that mass.
inline CgOracle OracleCgOptimum(const Instance& inst, const Rational& tau) {
  CgOracle o;
  ForEachAssignment(inst.payload, inst.spec.bin_count, [&](const Assignment& y) {
    if (OracleFeasible(y, inst)) o.w_max = std::max(o.w_max, OracleMass(y, inst.payload));
  });
  const Rational floor = tau * Rational(o.w_max);
  ForEachAssignment(inst.payload, inst.spec.bin_count, [&](const Assignment& y) {
    if (Rational(OracleMass(y, inst.payload)) < floor) return;
    if (!OracleFeasible(y, inst, false)) return;
    Rational cg = OracleCg(y, inst.spec, inst.payload);
    Rational dev = cg >= inst.spec.cg_target ? cg - inst.spec.cg_target
                                             : inst.spec.cg_target - cg;
    if (!o.without_window || dev < *o.without_window) o.without_window = dev;
    bool in_window = cg >= inst.spec.cg_min && cg <= inst.spec.cg_max;
    if (in_window && (!o.with_window || dev < *o.with_window)) o.with_window = dev;
  });
  return o;
}

}  // namespace alo::testing

#endif  // ALO_TESTS_ORACLES_H_
