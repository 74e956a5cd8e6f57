#ifndef ALO_SOLVER_H_
#define ALO_SOLVER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "alo/model.h"

namespace alo {

enum class SolveMode { kExhaustive, kBranchAndBound, kThresholdDescent };

enum class SolveStatus {
  kOptimal,
  kTauReached,
  kBudgetExhausted,
  kInfeasibleProven,
  kNoSolutionFound,
};

// kSteps replaces wall-clock time by solver work (search nodes or local
// search moves), so budgets and trace times are reproducible.
enum class ClockKind { kWall, kSteps };

inline constexpr double kStepsPerVirtualSecond = 1e5;

std::string_view SolveModeName(SolveMode mode);
std::optional<SolveMode> SolveModeFromName(std::string_view name);
std::string_view SolveStatusName(SolveStatus status);
std::optional<SolveStatus> SolveStatusFromName(std::string_view name);

struct SolveConfig {
  SolveMode mode = SolveMode::kThresholdDescent;
  // Accept a loading once its mass reaches tau * WMax. tau = 1 turns the
  // exact modes into pure optimizers.
  double tau = 0.999;
  double time_budget = 60;  // seconds (virtual seconds with kSteps)
  std::uint64_t seed = 1;
  int restarts = 8;             // independent local-search walkers
  std::int64_t threshold_step = 1;  // objective units (kg)
  bool warm_start = false;      // start the threshold at tau * WMax
  ClockKind clock = ClockKind::kWall;
  int threads = 1;

  void Validate() const;
};

struct TracePoint {
  double time = 0;
  Rational objective;
  std::int64_t mass = 0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::kNoSolutionFound;
  std::optional<Assignment> incumbent;
  std::vector<TracePoint> trace;
  std::size_t n_l = 0;
  double wall_time = 0;
  std::uint64_t steps = 0;
  std::int64_t mass = 0;
  Rational objective;
};

class SearchSpaceTooLarge : public std::runtime_error {
 public:
  SearchSpaceTooLarge(double estimate);
  double estimate() const { return estimate_; }

 private:
  double estimate_;
};

inline constexpr double kExhaustiveLimit = 1e8;

// min(W_p, total payload mass).
std::int64_t WMax(const AircraftSpec& spec, const Payload& payload);

// Minimizes system.objective over all placements (each container in at most
// one of its positions) by plain enumeration.
SolveReport SolveExhaustive(const ConstraintSystem& system,
                            const Payload& payload, const AircraftSpec& spec);

// Test hook: called at every branch-and-bound node with the partial
// placement (payload-indexed; -1 undecided, 0 left out, j placed) and the
// mass bound used for pruning.
struct BranchNode {
  std::span<const int> decided;
  std::int64_t mass = 0;
  std::int64_t mass_bound = 0;
};
using BranchObserver = std::function<void(const BranchNode&)>;

SolveReport SolveBranchAndBound(const ConstraintSystem& system,
                                const Payload& payload,
                                const AircraftSpec& spec,
                                const SolveConfig& config,
                                const BranchObserver& observer = {});

SolveReport SolveThresholdDescent(const ConstraintSystem& system,
                                  const Payload& payload,
                                  const AircraftSpec& spec,
                                  const SolveConfig& config);

// Dispatches on config.mode.
SolveReport Solve(const ConstraintSystem& system, const Payload& payload,
                  const AircraftSpec& spec, const SolveConfig& config);

}  // namespace alo

#endif  // ALO_SOLVER_H_
