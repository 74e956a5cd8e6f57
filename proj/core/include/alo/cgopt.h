#ifndef ALO_CGOPT_H_
#define ALO_CGOPT_H_

// Center-of-gravity optimization at (nearly) maximal carried mass.
//
// Both methods fix a mass floor  -sum m_k y <= -tau * W_max  and then drive
// |x_cg - x_target| down through a series of feasibility solves:
//  - sequence: shrink the CG window past each found x_cg by epsilon;
//  - direct:   replace the window by the two remap rows at threshold b and
//              lower b to (achieved deviation - epsilon) after each solve.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alo/instance.h"
#include "alo/model.h"
#include "alo/solver.h"

namespace alo {

// Extra row -sum m_k y <= -tau * w_max over the BuildConstraints layout.
// Throws std::invalid_argument unless 0 <= tau <= 1.
Row MassFloorRow(const AircraftSpec& spec, const Payload& payload, double tau,
                 std::int64_t w_max);

Rational CgDeviationExact(const Assignment& y, const AircraftSpec& spec,
                          const Payload& payload);
double CgDeviation(const Assignment& y, const AircraftSpec& spec,
                   const Payload& payload);

// Rows (tag cg_window, index 1 and 2) that hold together iff the deviation
// is at most `threshold`. Throws std::invalid_argument for a negative
// threshold.
std::array<Row, 2> RemapCgObjective(const AircraftSpec& spec,
                                    const Payload& payload,
                                    const Rational& threshold);

struct CgOptConfig {
  double tau = 0.998;
  Rational epsilon = Rational(Int128(1), Int128(1000));
  int max_stages = 1000;
  // Overrides the W_max estimate. Without it, exact solver modes compute
  // the optimal carried mass; the heuristic mode uses min(W_p, sum m_k).
  std::optional<std::int64_t> w_max;
  // Direct method only: starting threshold. Absent means no CG rows in the
  // first stage.
  std::optional<Rational> initial_threshold;

  void Validate() const;
};

enum class CgMethod { kSequence, kDirect };
enum class CgOptStatus { kConverged, kStageLimit, kNoSolutionFound };

std::string_view CgMethodName(CgMethod method);
std::optional<CgMethod> CgMethodFromName(std::string_view name);
std::string_view CgOptStatusName(CgOptStatus status);

struct CgStage {
  // Sequence: the CG window. Direct: target -/+ threshold, absent while the
  // threshold is infinite.
  std::optional<Rational> lower;
  std::optional<Rational> upper;
  SolveStatus solve_status = SolveStatus::kNoSolutionFound;
  bool feasible = false;
  std::optional<Rational> cg;
  std::optional<Rational> deviation;
  std::int64_t mass = 0;
};

struct CgOptReport {
  CgMethod method = CgMethod::kSequence;
  CgOptStatus status = CgOptStatus::kNoSolutionFound;
  std::optional<Assignment> assignment;
  Rational cg;
  Rational deviation;
  std::int64_t mass = 0;
  std::int64_t w_max = 0;
  std::vector<CgStage> stages;
};

// W_max as described at CgOptConfig::w_max.
std::int64_t CgMassReference(const Instance& instance, const CgOptConfig& config,
                             const SolveConfig& solve_config);

CgOptReport OptimizeCgSequence(const Instance& instance,
                               const CgOptConfig& config,
                               const SolveConfig& solve_config);

CgOptReport OptimizeCgDirect(const Instance& instance,
                             const CgOptConfig& config,
                             const SolveConfig& solve_config);

// Report document, schema "alo-cgopt/1", with the full stage log. Exact
// values are written as integers, doubles or "p/q" strings.
std::string SaveCgOptReport(const CgOptReport& report, const Instance& instance,
                            const CgOptConfig& config,
                            const std::string& instance_ref);

}  // namespace alo

#endif  // ALO_CGOPT_H_
