#ifndef ALO_SOLUTION_H_
#define ALO_SOLUTION_H_

// Solution document, schema "alo-solution/1": the placements of a solve run
// plus the derived physics and the solver trace. See docs/formats.md.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "alo/instance.h"
#include "alo/model.h"
#include "alo/solver.h"

namespace alo {

struct SolutionPlacement {
  int container_id = 0;
  int bin = 0;

  friend bool operator==(const SolutionPlacement&,
                         const SolutionPlacement&) = default;
};

struct Solution {
  std::string instance;  // path or label of the instance document
  SolveStatus status = SolveStatus::kNoSolutionFound;
  std::vector<SolutionPlacement> placements;
  std::int64_t mass = 0;
  double cg = 0;
  std::vector<ShearPoint> shear_profile;
  std::vector<TracePoint> trace;
  std::size_t n_l = 0;
  double wall_time = 0;
};

// Fills the physics fields from the report's incumbent (empty loading when
// there is none).
Solution MakeSolution(const SolveReport& report, const Instance& instance,
                      std::string instance_ref);

// Throws std::invalid_argument for unknown container ids or bins out of
// range.
Assignment ToAssignment(const Solution& solution, const Instance& instance);

std::string SaveSolution(const Solution& solution);
// Throws ParseError.
Solution LoadSolution(std::string_view document);

}  // namespace alo

#endif  // ALO_SOLUTION_H_
