#include "alo/cgopt.h"

#include <algorithm>
#include <stdexcept>

#include "json_util.h"

namespace alo {

namespace {

// Feasibility version of a system: null objective.
void ClearObjective(ConstraintSystem& system) {
  std::fill(system.objective.begin(), system.objective.end(), Rational(0));
}

struct StageResult {
  CgStage stage;
  std::optional<Assignment> y;
};

StageResult RunStage(const ConstraintSystem& system, const Instance& inst,
                     const SolveConfig& solve_config) {
  SolveReport r = Solve(system, inst.payload, inst.spec, solve_config);
  StageResult out;
  out.stage.solve_status = r.status;
  if (r.incumbent) {
    const Assignment& y = *r.incumbent;
    out.stage.feasible = true;
    out.stage.cg = CenterOfGravityExact(y, inst.spec, inst.payload);
    out.stage.deviation = CgDeviationExact(y, inst.spec, inst.payload);
    out.stage.mass = TotalMass(y, inst.payload);
    out.y = y;
  }
  return out;
}

void Keep(CgOptReport& report, const StageResult& s) {
  if (!s.y) return;
  if (report.assignment && !(*s.stage.deviation < report.deviation)) return;
  report.assignment = s.y;
  report.cg = *s.stage.cg;
  report.deviation = *s.stage.deviation;
  report.mass = s.stage.mass;
}

}  // namespace

Row MassFloorRow(const AircraftSpec& spec, const Payload& payload, double tau,
                 std::int64_t w_max) {
  if (!(tau >= 0 && tau <= 1)) throw std::invalid_argument("tau must be in [0, 1]");
  Row row{RowTag::kMassFloor, 1, {}, -Rational::FromDouble(tau) * Rational(w_max)};
  VariableLayout layout(payload, spec.bin_count);
  for (std::size_t c = 0; c < payload.size(); ++c) {
    int positions = PositionCount(payload[c].size, spec.bin_count);
    for (int j = 1; j <= positions; ++j) {
      row.terms.push_back({layout.Index(c, j), Rational(-payload[c].mass)});
    }
  }
  std::sort(row.terms.begin(), row.terms.end(),
            [](const Term& a, const Term& b) { return a.var < b.var; });
  return row;
}

Rational CgDeviationExact(const Assignment& y, const AircraftSpec& spec,
                          const Payload& payload) {
  Rational cg = CenterOfGravityExact(y, spec, payload);
  if (cg >= spec.cg_target) return cg - spec.cg_target;
  return spec.cg_target - cg;
}

double CgDeviation(const Assignment& y, const AircraftSpec& spec,
                   const Payload& payload) {
  return CgDeviationExact(y, spec, payload).ToDouble();
}

std::array<Row, 2> RemapCgObjective(const AircraftSpec& spec,
                                    const Payload& payload,
                                    const Rational& threshold) {
  if (threshold < Rational(0)) {
    throw std::invalid_argument("CG threshold must be non-negative");
  }
  const Rational& t = spec.cg_target;
  const Rational we(spec.empty_mass);
  Row upper{RowTag::kCgWindow, 1, {}, we * (t + threshold - spec.empty_cg)};
  Row lower{RowTag::kCgWindow, 2, {}, we * (spec.empty_cg - t + threshold)};
  VariableLayout layout(payload, spec.bin_count);
  std::vector<std::pair<std::size_t, std::pair<Rational, Rational>>> terms;
  for (std::size_t c = 0; c < payload.size(); ++c) {
    const Container& k = payload[c];
    Rational m(k.mass);
    int positions = PositionCount(k.size, spec.bin_count);
    for (int j = 1; j <= positions; ++j) {
      Rational d = SignedDistance(k.size, j, spec.bin_count);
      terms.push_back({layout.Index(c, j),
                       {m * (d - t - threshold), m * (t - threshold - d)}});
    }
  }
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [var, coefs] : terms) {
    upper.terms.push_back({var, coefs.first});
    lower.terms.push_back({var, coefs.second});
  }
  return {upper, lower};
}

void CgOptConfig::Validate() const {
  if (!(tau >= 0 && tau <= 1)) throw std::invalid_argument("tau must be in [0, 1]");
  if (!(epsilon > Rational(0))) throw std::invalid_argument("epsilon must be positive");
  if (max_stages < 1) throw std::invalid_argument("max_stages must be at least 1");
  if (w_max && *w_max < 0) throw std::invalid_argument("w_max must be non-negative");
  if (initial_threshold && *initial_threshold < Rational(0)) {
    throw std::invalid_argument("initial threshold must be non-negative");
  }
}

std::string_view CgMethodName(CgMethod method) {
  return method == CgMethod::kSequence ? "sequence" : "direct";
}

std::optional<CgMethod> CgMethodFromName(std::string_view name) {
  if (name == "sequence") return CgMethod::kSequence;
  if (name == "direct") return CgMethod::kDirect;
  return std::nullopt;
}

std::string_view CgOptStatusName(CgOptStatus status) {
  switch (status) {
    case CgOptStatus::kConverged: return "converged";
    case CgOptStatus::kStageLimit: return "stage_limit";
    case CgOptStatus::kNoSolutionFound: return "no_solution_found";
  }
  return "unknown";
}

std::int64_t CgMassReference(const Instance& instance, const CgOptConfig& config,
                             const SolveConfig& solve_config) {
  if (config.w_max) return *config.w_max;
  std::int64_t cap = WMax(instance.spec, instance.payload);
  if (solve_config.mode == SolveMode::kThresholdDescent) return cap;
  // Exact modes: the optimal carried mass. A run cut short by the budget
  // still gives a reachable mass, which keeps the floor satisfiable.
  SolveConfig exact = solve_config;
  exact.tau = 1;
  ConstraintSystem system = BuildConstraints(instance.spec, instance.payload);
  SolveReport r = Solve(system, instance.payload, instance.spec, exact);
  return r.incumbent ? r.mass : cap;
}

CgOptReport OptimizeCgSequence(const Instance& instance,
                               const CgOptConfig& config,
                               const SolveConfig& solve_config) {
  config.Validate();
  CgOptReport report;
  report.method = CgMethod::kSequence;
  report.w_max = CgMassReference(instance, config, solve_config);
  const Row floor = MassFloorRow(instance.spec, instance.payload, config.tau, report.w_max);
  const Rational& t = instance.spec.cg_target;
  const Rational& eps = config.epsilon;

  Rational lo = instance.spec.cg_min;
  Rational hi = instance.spec.cg_max;
  report.status = CgOptStatus::kStageLimit;
  for (int stage = 0; stage < config.max_stages; ++stage) {
    if (lo > hi) {
      report.status = CgOptStatus::kConverged;
      break;
    }
    Instance window = instance;
    window.spec.cg_min = lo;
    window.spec.cg_max = hi;
    ConstraintSystem system = BuildConstraints(window.spec, window.payload);
    system.rows.push_back(floor);
    ClearObjective(system);
    StageResult s = RunStage(system, instance, solve_config);
    s.stage.lower = lo;
    s.stage.upper = hi;
    report.stages.push_back(s.stage);
    if (!s.y) {
      report.status = report.assignment ? CgOptStatus::kConverged
                                        : CgOptStatus::kNoSolutionFound;
      break;
    }
    Keep(report, s);
    const Rational x = *s.stage.cg;
    const Rational dev = *s.stage.deviation;
    if (dev == Rational(0)) {
      report.status = CgOptStatus::kConverged;
      break;
    }
    // Step past x_cg by epsilon; the mirrored bound keeps later stages from
    // landing farther away on the other side of the target.
    if (x < t) {
      lo = x + eps;
      hi = std::min(hi, t + dev - eps);
    } else {
      hi = x - eps;
      lo = std::max(lo, t - dev + eps);
    }
  }
  return report;
}

CgOptReport OptimizeCgDirect(const Instance& instance,
                             const CgOptConfig& config,
                             const SolveConfig& solve_config) {
  config.Validate();
  CgOptReport report;
  report.method = CgMethod::kDirect;
  report.w_max = CgMassReference(instance, config, solve_config);

  ConstraintSystem base = BuildConstraints(instance.spec, instance.payload);
  std::erase_if(base.rows, [](const Row& r) {
    return r.tag == RowTag::kCgUpper || r.tag == RowTag::kCgLower;
  });
  base.rows.push_back(MassFloorRow(instance.spec, instance.payload, config.tau, report.w_max));
  ClearObjective(base);

  const Rational& t = instance.spec.cg_target;
  const Rational& eps = config.epsilon;
  std::optional<Rational> threshold = config.initial_threshold;
  report.status = CgOptStatus::kStageLimit;
  for (int stage = 0; stage < config.max_stages; ++stage) {
    ConstraintSystem system = base;
    if (threshold) {
      for (Row& r : RemapCgObjective(instance.spec, instance.payload, *threshold)) {
        system.rows.push_back(std::move(r));
      }
    }
    StageResult s = RunStage(system, instance, solve_config);
    if (threshold) {
      s.stage.lower = t - *threshold;
      s.stage.upper = t + *threshold;
    }
    report.stages.push_back(s.stage);
    if (!s.y) {
      if (report.assignment) {
        report.status = CgOptStatus::kConverged;
        break;
      }
      // No loading yet: widen the threshold (0, eps, 2 eps, 4 eps, ...).
      // Deviations never exceed 1, so past that nothing can be found.
      if (!threshold || *threshold > Rational(1)) {
        report.status = CgOptStatus::kNoSolutionFound;
        break;
      }
      threshold = *threshold == Rational(0) ? eps : *threshold * Rational(2);
      continue;
    }
    Keep(report, s);
    const Rational next = *s.stage.deviation - eps;
    if (*s.stage.deviation == Rational(0) || next < Rational(0)) {
      report.status = CgOptStatus::kConverged;
      break;
    }
    threshold = next;
  }
  return report;
}

std::string SaveCgOptReport(const CgOptReport& report, const Instance& instance,
                            const CgOptConfig& config,
                            const std::string& instance_ref) {
  using json_util::ExactToJson;
  using json_util::OrderedJson;
  auto optional_exact = [](const std::optional<Rational>& v) {
    return v ? ExactToJson(*v) : OrderedJson(nullptr);
  };
  OrderedJson doc;
  doc["schema"] = "alo-cgopt/1";
  doc["instance"] = instance_ref;
  doc["method"] = CgMethodName(report.method);
  doc["status"] = CgOptStatusName(report.status);
  doc["tau"] = config.tau;
  doc["epsilon"] = ExactToJson(config.epsilon);
  doc["w_max"] = report.w_max;
  doc["cg_target"] = ExactToJson(instance.spec.cg_target);
  auto placements = OrderedJson::array();
  if (report.assignment) {
    for (const auto& [c, j] : report.assignment->Entries()) {
      placements.push_back({{"k", instance.payload[c].id}, {"j", j}});
    }
    doc["mass"] = report.mass;
    doc["cg"] = report.cg.ToDouble();
    doc["deviation"] = report.deviation.ToDouble();
  } else {
    doc["mass"] = nullptr;
    doc["cg"] = nullptr;
    doc["deviation"] = nullptr;
  }
  doc["placements"] = std::move(placements);
  auto stages = OrderedJson::array();
  for (const CgStage& s : report.stages) {
    OrderedJson st;
    st["lower"] = optional_exact(s.lower);
    st["upper"] = optional_exact(s.upper);
    st["solve_status"] = SolveStatusName(s.solve_status);
    st["feasible"] = s.feasible;
    st["cg"] = s.cg ? OrderedJson(s.cg->ToDouble()) : OrderedJson(nullptr);
    st["deviation"] = s.deviation ? OrderedJson(s.deviation->ToDouble()) : OrderedJson(nullptr);
    st["mass"] = s.mass;
    stages.push_back(std::move(st));
  }
  doc["stages"] = std::move(stages);
  return doc.dump(2) + "\n";
}

}  // namespace alo
