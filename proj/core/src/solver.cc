#include "alo/solver.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "compiled_problem.h"

namespace alo {

using internal::CompiledProblem;
using internal::ObjectiveKind;
using internal::SolveClock;

namespace {

constexpr std::pair<SolveMode, std::string_view> kModeNames[] = {
    {SolveMode::kExhaustive, "exhaustive"},
    {SolveMode::kBranchAndBound, "branch_and_bound"},
    {SolveMode::kThresholdDescent, "threshold_descent"},
};

constexpr std::pair<SolveStatus, std::string_view> kStatusNames[] = {
    {SolveStatus::kOptimal, "optimal"},
    {SolveStatus::kTauReached, "tau_reached"},
    {SolveStatus::kBudgetExhausted, "budget_exhausted"},
    {SolveStatus::kInfeasibleProven, "infeasible_proven"},
    {SolveStatus::kNoSolutionFound, "no_solution_found"},
};

// Row activities with an incrementally maintained count of violated rows.
class Activity {
 public:
  explicit Activity(const CompiledProblem& p)
      : p_(p), act_(p.row_count(), 0) {
    for (std::size_t r = 0; r < p.row_count(); ++r) {
      if (p.row(r).rhs < 0) ++violated_;
    }
  }

  void Apply(std::size_t var, int sign) {
    for (const auto& e : p_.column(var)) {
      Int128 before = act_[e.row];
      Int128 after = before + sign * e.coef;
      act_[e.row] = after;
      Int128 rhs = p_.row(e.row).rhs;
      violated_ += static_cast<int>(after > rhs) - static_cast<int>(before > rhs);
    }
  }

  Int128 operator[](std::size_t r) const { return act_[r]; }
  int violated() const { return violated_; }

 private:
  const CompiledProblem& p_;
  std::vector<Int128> act_;
  int violated_ = 0;
};

struct Incumbent {
  bool found = false;
  Int128 objective = 0;
  std::int64_t mass = 0;
  std::vector<int> pos;
};

void Record(Incumbent& inc, const std::vector<int>& pos, Int128 objective,
            std::int64_t mass, double time, const CompiledProblem& p,
            std::vector<TracePoint>& trace) {
  inc.found = true;
  inc.objective = objective;
  inc.mass = mass;
  inc.pos = pos;
  trace.push_back({time, p.ObjectiveValue(objective), mass});
}

SolveReport Finish(const CompiledProblem& p, const ConstraintSystem& system,
                   const Incumbent& inc, SolveStatus status,
                   std::vector<TracePoint> trace, const SolveClock& clock,
                   std::uint64_t steps) {
  SolveReport report;
  report.status = status;
  report.trace = std::move(trace);
  report.n_l = CountNonzeros(system);
  report.steps = steps;
  report.wall_time = clock.WallSeconds();
  if (inc.found) {
    report.incumbent = p.ToAssignment(inc.pos);
    report.mass = inc.mass;
    report.objective = p.ObjectiveValue(inc.objective);
  }
  return report;
}

class Enumerator {
 public:
  Enumerator(const CompiledProblem& p) : p_(p), act_(p), pos_(p.container_count(), -1) {}

  void Run() { Visit(0, 0, 0); }
  const Incumbent& incumbent() const { return inc_; }
  std::vector<TracePoint>& trace() { return trace_; }
  std::uint64_t leaves() const { return leaves_; }

 private:
  bool Visit(std::size_t c, Int128 obj, std::int64_t mass) {
    if (c == p_.container_count()) {
      ++leaves_;
      if (act_.violated() == 0 && (!inc_.found || obj < inc_.objective)) {
        Record(inc_, pos_, obj, mass, 0, p_, trace_);
        if (p_.objective_kind() == ObjectiveKind::kNull) return true;
      }
      return false;
    }
    pos_[c] = -1;
    if (Visit(c + 1, obj, mass)) return true;
    const auto& choices = p_.choices(c);
    for (std::size_t i = 0; i < choices.size(); ++i) {
      pos_[c] = static_cast<int>(i);
      act_.Apply(choices[i].var, 1);
      bool stop = Visit(c + 1, obj + p_.objective(choices[i].var), mass + p_.mass(c));
      act_.Apply(choices[i].var, -1);
      if (stop) return true;
    }
    pos_[c] = -1;
    return false;
  }

  const CompiledProblem& p_;
  Activity act_;
  std::vector<int> pos_;
  Incumbent inc_;
  std::vector<TracePoint> trace_;
  std::uint64_t leaves_ = 0;
};

class BranchAndBound {
 public:
  BranchAndBound(const CompiledProblem& p, const SolveConfig& config,
                 const BranchObserver& observer)
      : p_(p),
        config_(config),
        observer_(observer),
        clock_(config.clock),
        act_(p),
        pos_(p.container_count(), -1),
        decided_(p.container_count(), -1) {
    const std::size_t n = p.container_count();
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      return p.mass(a) > p.mass(b);
    });
    for (std::size_t r = 0; r < p.row_count(); ++r) {
      if (p.row(r).has_negative) neg_rows_.push_back(r);
    }
    // suffix_[d][k]: most negative contribution of containers order_[d..] to
    // negative row k.
    const std::size_t nr = neg_rows_.size();
    std::vector<std::size_t> slot(p.row_count(), SIZE_MAX);
    for (std::size_t k = 0; k < nr; ++k) slot[neg_rows_[k]] = k;
    suffix_.assign((n + 1) * nr, 0);
    obj_suffix_.assign(n + 1, 0);
    rem_mass_.assign(n + 1, 0);
    std::vector<Int128> best(nr);
    for (std::size_t d = n; d-- > 0;) {
      std::size_t c = order_[d];
      std::fill(best.begin(), best.end(), 0);
      Int128 obj_min = 0;
      for (const auto& ch : p.choices(c)) {
        std::vector<Int128> contrib(nr, 0);
        for (const auto& e : p.column(ch.var)) {
          if (slot[e.row] != SIZE_MAX) contrib[slot[e.row]] += e.coef;
        }
        for (std::size_t k = 0; k < nr; ++k) best[k] = std::min(best[k], contrib[k]);
        obj_min = std::min(obj_min, p.objective(ch.var));
      }
      for (std::size_t k = 0; k < nr; ++k) {
        suffix_[d * nr + k] = suffix_[(d + 1) * nr + k] + best[k];
      }
      obj_suffix_[d] = obj_suffix_[d + 1] + obj_min;
      rem_mass_[d] = rem_mass_[d + 1] + (p.choices(c).empty() ? 0 : p.mass(c));
    }
    cap_ = p.mass_cap();
    if (p.objective_kind() == ObjectiveKind::kMass) {
      target_ = config.tau >= 1 ? cap_ : internal::TauTarget(config.tau, cap_);
    }
  }

  SolveStatus Run() {
    bool root_ok = true;
    for (std::size_t r = 0; r < p_.row_count() && root_ok; ++r) {
      Int128 low = 0;
      auto it = std::find(neg_rows_.begin(), neg_rows_.end(), r);
      if (it != neg_rows_.end()) low = suffix_[it - neg_rows_.begin()];
      root_ok = low <= p_.row(r).rhs;
    }
    if (root_ok) Visit(0, 0, 0);
    if (stop_ == Stop::kTau) {
      return inc_.found && inc_.mass >= cap_ ? SolveStatus::kOptimal
                                             : SolveStatus::kTauReached;
    }
    if (stop_ == Stop::kBudget) {
      return inc_.found ? SolveStatus::kBudgetExhausted
                        : SolveStatus::kNoSolutionFound;
    }
    if (stop_ == Stop::kFirst) return SolveStatus::kOptimal;
    return inc_.found ? SolveStatus::kOptimal : SolveStatus::kInfeasibleProven;
  }

  const Incumbent& incumbent() const { return inc_; }
  std::vector<TracePoint>& trace() { return trace_; }
  std::uint64_t nodes() const { return nodes_; }
  const SolveClock& clock() const { return clock_; }

 private:
  enum class Stop { kNone, kTau, kBudget, kFirst };

  // Negative rows must stay satisfiable by the cheapest completion; touched
  // rows are checked by the caller.
  bool NegativeRowsOk(std::size_t d) const {
    const std::size_t nr = neg_rows_.size();
    for (std::size_t k = 0; k < nr; ++k) {
      std::size_t r = neg_rows_[k];
      if (act_[r] + suffix_[d * nr + k] > p_.row(r).rhs) return false;
    }
    return true;
  }

  bool TouchedRowsOk(std::size_t var, std::size_t d) const {
    const std::size_t nr = neg_rows_.size();
    for (const auto& e : p_.column(var)) {
      Int128 low = act_[e.row];
      if (p_.row(e.row).has_negative) {
        std::size_t k = std::find(neg_rows_.begin(), neg_rows_.end(), e.row) - neg_rows_.begin();
        low += suffix_[d * nr + k];
      }
      if (low > p_.row(e.row).rhs) return false;
    }
    return true;
  }

  std::int64_t Residual(std::size_t r) const {
    Int128 slack = p_.row(r).rhs - act_[r];
    if (slack < 0) return -1;
    return static_cast<std::int64_t>(slack / p_.row(r).scale);
  }

  std::int64_t MassBound(std::size_t d, std::int64_t mass) const {
    std::int64_t room = rem_mass_[d];
    if (auto w = p_.weight_row()) room = std::min(room, Residual(*w));
    if (auto s = p_.covering_shear_rows()) {
      std::int64_t a = Residual(s->first), b = Residual(s->second);
      if (a >= 0 && b >= 0) room = std::min(room, a + b);
    }
    return mass + std::max<std::int64_t>(room, 0);
  }

  bool Visit(std::size_t d, Int128 obj, std::int64_t mass) {
    ++nodes_;
    if ((nodes_ & 1023) == 0 && clock_.Elapsed(nodes_) >= config_.time_budget) {
      stop_ = Stop::kBudget;
      return true;
    }
    const ObjectiveKind kind = p_.objective_kind();
    if (kind == ObjectiveKind::kMass) {
      std::int64_t bound = MassBound(d, mass);
      if (observer_) observer_({decided_, mass, bound});
      if (inc_.found && bound <= inc_.mass) return false;
    } else if (kind == ObjectiveKind::kGeneral) {
      if (inc_.found && obj + obj_suffix_[d] >= inc_.objective) return false;
    }
    if (d == order_.size()) {
      if (act_.violated() != 0) return false;
      if (!inc_.found || obj < inc_.objective) {
        Record(inc_, pos_, obj, mass, clock_.Elapsed(nodes_), p_, trace_);
        if (kind == ObjectiveKind::kNull) {
          stop_ = Stop::kFirst;
          return true;
        }
        if (kind == ObjectiveKind::kMass && mass >= target_) {
          stop_ = Stop::kTau;
          return true;
        }
      }
      return false;
    }
    std::size_t c = order_[d];
    const auto& choices = p_.choices(c);
    for (std::size_t i = 0; i < choices.size(); ++i) {
      std::size_t var = choices[i].var;
      act_.Apply(var, 1);
      if (TouchedRowsOk(var, d + 1) && NegativeRowsOk(d + 1)) {
        pos_[c] = static_cast<int>(i);
        decided_[c] = choices[i].bin;
        bool stop = Visit(d + 1, obj + p_.objective(var), mass + p_.mass(c));
        pos_[c] = -1;
        decided_[c] = -1;
        if (stop) {
          act_.Apply(var, -1);
          return true;
        }
      }
      act_.Apply(var, -1);
    }
    if (NegativeRowsOk(d + 1)) {
      decided_[c] = 0;
      bool stop = Visit(d + 1, obj, mass);
      decided_[c] = -1;
      if (stop) return true;
    }
    return false;
  }

  const CompiledProblem& p_;
  const SolveConfig& config_;
  const BranchObserver& observer_;
  SolveClock clock_;
  Activity act_;
  std::vector<int> pos_;
  std::vector<int> decided_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> neg_rows_;
  std::vector<Int128> suffix_;
  std::vector<Int128> obj_suffix_;
  std::vector<std::int64_t> rem_mass_;
  std::int64_t cap_ = 0;
  std::int64_t target_ = 0;
  Incumbent inc_;
  std::vector<TracePoint> trace_;
  std::uint64_t nodes_ = 0;
  Stop stop_ = Stop::kNone;
};

}  // namespace

std::string_view SolveModeName(SolveMode mode) {
  for (const auto& [m, name] : kModeNames) {
    if (m == mode) return name;
  }
  return "unknown";
}

std::optional<SolveMode> SolveModeFromName(std::string_view name) {
  for (const auto& [m, n] : kModeNames) {
    if (n == name) return m;
  }
  return std::nullopt;
}

std::string_view SolveStatusName(SolveStatus status) {
  for (const auto& [s, name] : kStatusNames) {
    if (s == status) return name;
  }
  return "unknown";
}

std::optional<SolveStatus> SolveStatusFromName(std::string_view name) {
  for (const auto& [s, n] : kStatusNames) {
    if (n == name) return s;
  }
  return std::nullopt;
}

void SolveConfig::Validate() const {
  if (!(tau >= 0 && tau <= 1)) throw std::invalid_argument("tau must be in [0, 1]");
  if (!(time_budget > 0)) throw std::invalid_argument("time budget must be positive");
  if (restarts < 1) throw std::invalid_argument("restarts must be at least 1");
  if (threshold_step < 1) throw std::invalid_argument("threshold step must be at least 1");
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
}

SearchSpaceTooLarge::SearchSpaceTooLarge(double estimate)
    : std::runtime_error("search space of about " + std::to_string(estimate) +
                         " assignments exceeds the exhaustive limit"),
      estimate_(estimate) {}

std::int64_t WMax(const AircraftSpec& spec, const Payload& payload) {
  return std::min(spec.max_payload, payload.TotalMass());
}

SolveReport SolveExhaustive(const ConstraintSystem& system,
                            const Payload& payload, const AircraftSpec& spec) {
  CompiledProblem p(system, payload, spec);
  double log_size = 0;
  for (std::size_t c = 0; c < p.container_count(); ++c) {
    log_size += std::log10(1.0 + p.choices(c).size());
  }
  if (log_size > std::log10(kExhaustiveLimit) + 1e-12) {
    throw SearchSpaceTooLarge(std::pow(10.0, log_size));
  }
  SolveClock clock(ClockKind::kWall);
  Enumerator e(p);
  e.Run();
  SolveStatus status = e.incumbent().found ? SolveStatus::kOptimal
                                           : SolveStatus::kInfeasibleProven;
  return Finish(p, system, e.incumbent(), status, std::move(e.trace()), clock,
                e.leaves());
}

SolveReport SolveBranchAndBound(const ConstraintSystem& system,
                                const Payload& payload,
                                const AircraftSpec& spec,
                                const SolveConfig& config,
                                const BranchObserver& observer) {
  config.Validate();
  CompiledProblem p(system, payload, spec);
  BranchAndBound bb(p, config, observer);
  SolveStatus status = bb.Run();
  return Finish(p, system, bb.incumbent(), status, std::move(bb.trace()),
                bb.clock(), bb.nodes());
}

SolveReport Solve(const ConstraintSystem& system, const Payload& payload,
                  const AircraftSpec& spec, const SolveConfig& config) {
  switch (config.mode) {
    case SolveMode::kExhaustive:
      return SolveExhaustive(system, payload, spec);
    case SolveMode::kBranchAndBound:
      return SolveBranchAndBound(system, payload, spec, config);
    case SolveMode::kThresholdDescent:
      return SolveThresholdDescent(system, payload, spec, config);
  }
  throw std::invalid_argument("unknown solve mode");
}

}  // namespace alo
