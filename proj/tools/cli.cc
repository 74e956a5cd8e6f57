#include "cli.h"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "alo/bench.h"
#include "alo/cgopt.h"
#include "alo/instance.h"
#include "alo/model.h"
#include "alo/solution.h"
#include "alo/solver.h"
#include "alo/system_io.h"
#include "json.hpp"

namespace alo::cli {

namespace {

using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Global {
  std::uint64_t seed = 1;
  int threads = 1;
  int verbosity = 0;
};

struct SolverFlags {
  std::string mode = "threshold_descent";
  double tau = 0.999;
  double budget = 60;
  int restarts = 8;
  std::int64_t threshold_step = 1;
  bool warm_start = false;
  std::string clock = "wall";
};

void AddSolverFlags(CLI::App* cmd, SolverFlags& f) {
  cmd->add_option("--mode", f.mode, "exhaustive, branch_and_bound or threshold_descent")
      ->check(CLI::IsMember({"exhaustive", "branch_and_bound", "threshold_descent"}))
      ->capture_default_str();
  cmd->add_option("--budget", f.budget, "Time budget in seconds")->capture_default_str();
  cmd->add_option("--restarts", f.restarts, "Local search walkers")->capture_default_str();
  cmd->add_option("--threshold-step", f.threshold_step, "Threshold step in kg")
      ->capture_default_str();
  cmd->add_flag("--warm-start", f.warm_start, "Start the threshold at tau * W_max");
  cmd->add_option("--clock", f.clock, "wall, or steps for reproducible budgets")
      ->check(CLI::IsMember({"wall", "steps"}))
      ->capture_default_str();
}

SolveConfig MakeSolveConfig(const SolverFlags& f, const Global& g) {
  SolveConfig c;
  c.mode = *SolveModeFromName(f.mode);
  c.tau = f.tau;
  c.time_budget = f.budget;
  c.seed = g.seed;
  c.restarts = f.restarts;
  c.threshold_step = f.threshold_step;
  c.warm_start = f.warm_start;
  c.clock = f.clock == "steps" ? ClockKind::kSteps : ClockKind::kWall;
  c.threads = g.threads;
  c.Validate();
  return c;
}

Rational ParseExact(const std::string& text, const std::string& flag) {
  try {
    return Rational::Parse(text);
  } catch (const std::exception&) {
    throw UsageError(flag + ": not a number: " + text);
  }
}

Json FitJson(const ScalingFit& f) {
  return {{"r", f.r},
          {"exponent", f.exponent},
          {"log_prefactor", f.log_prefactor},
          {"r_squared", f.r_squared},
          {"points", f.points}};
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  bool reference = false;
  std::optional<int> n;
  std::optional<int> n1, n2, n3;
  int bins = 20;
  std::string out;
};

int Generate(const GenerateArgs& a, const Global& g, std::ostream& out) {
  Instance inst;
  SizeSplit split;
  if (a.reference) {
    inst = AirbusReferenceInstance();
  } else {
    if (a.n) {
      if (*a.n < 1) throw UsageError("-n must be at least 1");
      split = SplitSizes(*a.n);
    } else if (a.n1 || a.n2 || a.n3) {
      split = {a.n1.value_or(0), a.n2.value_or(0), a.n3.value_or(0)};
    } else {
      throw UsageError("give --reference, -n, or --n1/--n2/--n3");
    }
    GeneratorConfig gen;
    gen.n1 = split.n1;
    gen.n2 = split.n2;
    gen.n3 = split.n3;
    gen.bin_count = a.bins;
    gen.seed = g.seed;
    try {
      gen.Validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    inst = GenerateInstance(gen);
  }
  SizeSplit counts;
  for (const Container& k : inst.payload.containers()) {
    (k.size == ContainerSize::kOne   ? counts.n1
     : k.size == ContainerSize::kTwo ? counts.n2
                                     : counts.n3)++;
  }
  WriteFile(a.out, SaveInstance(inst));
  std::int64_t total = 0;
  for (const Container& k : inst.payload.containers()) total += k.mass;
  out << Json{{"command", "generate"},
              {"output", a.out},
              {"n", inst.payload.size()},
              {"N", inst.spec.bin_count},
              {"split", {counts.n1, counts.n2, counts.n3}},
              {"total_mass", total},
              {"w_max", WMax(inst.spec, inst.payload)}}
             .dump()
      << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------ export

struct ExportArgs {
  std::string instance;
  std::string format = "mps";
  std::string out;
};

int Export(const ExportArgs& a, std::ostream& out) {
  Instance inst = LoadInstance(ReadFile(a.instance));
  if (inst.payload.empty()) {
    throw UsageError("instance has no containers, so the model has no binary columns");
  }
  ConstraintSystem system = BuildConstraints(inst.spec, inst.payload);
  WriteFile(a.out, a.format == "mps" ? WriteMps(system) : WriteSystemJson(system));
  out << Json{{"command", "export"},
              {"output", a.out},
              {"format", a.format},
              {"rows", system.rows.size()},
              {"vars", system.num_variables()},
              {"n_l", CountNonzeros(system)}}
             .dump()
      << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------- solve

struct SolveArgs {
  std::string instance;
  std::string out;
  SolverFlags solver;
};

int SolveCommand(const SolveArgs& a, const Global& g, std::ostream& out,
                 std::ostream& err) {
  SolveConfig config = MakeSolveConfig(a.solver, g);
  Instance inst = LoadInstance(ReadFile(a.instance));
  ConstraintSystem system = BuildConstraints(inst.spec, inst.payload);
  SolveReport report = Solve(system, inst.payload, inst.spec, config);
  Solution solution = MakeSolution(report, inst, a.instance);
  // Under the step clock the recorded time is virtual, so reruns match.
  if (config.clock == ClockKind::kSteps) {
    solution.wall_time = static_cast<double>(report.steps) / kStepsPerVirtualSecond;
  }
  if (!a.out.empty()) WriteFile(a.out, SaveSolution(solution));
  bool ok = report.status == SolveStatus::kOptimal ||
            report.status == SolveStatus::kTauReached;
  if (g.verbosity > 0 || !ok) {
    err << "solve: " << SolveStatusName(report.status) << ", mass " << solution.mass
        << " of W_max " << WMax(inst.spec, inst.payload) << "\n";
  }
  out << Json{{"command", "solve"},
              {"output", a.out},
              {"status", SolveStatusName(report.status)},
              {"mass", solution.mass},
              {"w_max", WMax(inst.spec, inst.payload)},
              {"cg", solution.cg},
              {"n_l", report.n_l},
              {"wall_time", solution.wall_time}}
             .dump()
      << "\n";
  return ok ? kExitOk : kExitNotReached;
}

// ------------------------------------------------------------- optimize-cg

struct CgArgs {
  std::string instance;
  std::string out;
  std::string method = "sequence";
  double tau = 0.998;
  std::string epsilon = "0.001";
  int max_stages = 1000;
  std::optional<std::int64_t> w_max;
  std::optional<std::string> initial_threshold;
  SolverFlags solver;
};

int OptimizeCg(const CgArgs& a, const Global& g, std::ostream& out,
               std::ostream& err) {
  SolverFlags sf = a.solver;
  sf.tau = 1;  // stages are feasibility problems; tau is unused there
  SolveConfig solve = MakeSolveConfig(sf, g);
  CgOptConfig config;
  config.tau = a.tau;
  config.epsilon = ParseExact(a.epsilon, "--epsilon");
  config.max_stages = a.max_stages;
  config.w_max = a.w_max;
  if (a.initial_threshold) {
    config.initial_threshold = ParseExact(*a.initial_threshold, "--initial-threshold");
  }
  config.Validate();
  Instance inst = LoadInstance(ReadFile(a.instance));
  CgMethod method = *CgMethodFromName(a.method);
  CgOptReport report = method == CgMethod::kSequence
                           ? OptimizeCgSequence(inst, config, solve)
                           : OptimizeCgDirect(inst, config, solve);
  if (!a.out.empty()) WriteFile(a.out, SaveCgOptReport(report, inst, config, a.instance));
  if (g.verbosity > 0 || !report.assignment) {
    err << "optimize-cg: " << CgOptStatusName(report.status) << " after "
        << report.stages.size() << " stages\n";
  }
  Json summary{{"command", "optimize-cg"},
               {"output", a.out},
               {"method", a.method},
               {"status", CgOptStatusName(report.status)},
               {"stages", report.stages.size()},
               {"w_max", report.w_max}};
  if (report.assignment) {
    summary["mass"] = report.mass;
    summary["cg"] = report.cg.ToDouble();
    summary["deviation"] = report.deviation.ToDouble();
  }
  out << summary.dump() << "\n";
  return report.assignment ? kExitOk : kExitNotReached;
}

// ---------------------------------------------------------------- validate

struct ValidateArgs {
  std::string instance;
  std::string solution;
};

int ValidateCommand(const ValidateArgs& a, const Global& g, std::ostream& out,
                    std::ostream& err) {
  Instance inst = LoadInstance(ReadFile(a.instance));
  Solution solution = LoadSolution(ReadFile(a.solution));
  Assignment y = ToAssignment(solution, inst);
  ValidationReport report = Validate(y, inst.spec, inst.payload);
  std::int64_t mass = TotalMass(y, inst.payload);
  bool mass_ok = mass == solution.mass;
  if (g.verbosity > 0 || !report.feasible || !mass_ok) {
    for (const Violation& v : report.violations) {
      err << "violated " << RowTagName(v.tag) << " row " << v.index << ": lhs "
          << v.lhs.ToString() << " > rhs " << v.rhs.ToString() << "\n";
    }
    if (!mass_ok) {
      err << "recorded mass " << solution.mass << " differs from placed mass " << mass
          << "\n";
    }
  }
  out << Json{{"command", "validate"},
              {"feasible", report.feasible},
              {"violations", report.violations.size()},
              {"mass", mass},
              {"mass_matches", mass_ok}}
             .dump()
      << "\n";
  return report.feasible && mass_ok ? kExitOk : kExitNotReached;
}

// ------------------------------------------------------------ bench/report

struct BenchArgs {
  std::vector<double> r;
  std::vector<int> bins;
  int count = 1;
  std::string out;
  bool ref_curve = false;
  SolverFlags solver;
};

Json FitsJson(const std::vector<ScalingFit>& fits) {
  Json arr = Json::array();
  for (const ScalingFit& f : fits) arr.push_back(FitJson(f));
  return arr;
}

int Bench(const BenchArgs& a, const Global& g, std::ostream& out, std::ostream& err) {
  GridConfig grid;
  grid.r_values = a.r;
  grid.bin_counts = a.bins;
  grid.count = a.count;
  grid.tau = a.solver.tau;
  grid.seed = g.seed;
  SolverFlags sf = a.solver;
  sf.mode = "threshold_descent";
  grid.solve = MakeSolveConfig(sf, Global{g.seed, 1, g.verbosity});
  grid.threads = g.threads;
  try {
    grid.Validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::vector<BenchRecord> records = RunGrid(grid);
  std::vector<ScalingFit> fits = FitAll(records);
  ReportOptions opt;
  opt.out_dir = a.out;
  opt.reference_curve = a.ref_curve;
  std::vector<std::string> files = EmitReport(records, fits, opt);
  int reached = 0;
  for (const BenchRecord& r : records) reached += QualityReached(r);
  if (g.verbosity > 0) {
    for (const CellSummary& c : Summarize(records)) {
      err << "r=" << c.r << " N=" << c.bin_count << " n_l=" << c.mean_n_l
          << " reached " << c.reached << "/" << c.reached + c.censored;
      if (c.mean_time) err << " mean " << *c.mean_time << " s";
      err << "\n";
    }
  }
  out << Json{{"command", "bench"},
              {"records", records.size()},
              {"reached", reached},
              {"censored", static_cast<int>(records.size()) - reached},
              {"files", files},
              {"fits", FitsJson(fits)}}
             .dump()
      << "\n";
  return kExitOk;
}

struct ReportArgs {
  std::string csv;
  std::string out;
  bool ref_curve = false;
  bool cg_variant = false;
};

int Report(const ReportArgs& a, std::ostream& out) {
  std::vector<BenchRecord> records = ParseBenchCsv(ReadFile(a.csv));
  std::vector<ScalingFit> fits = FitAll(records);
  ReportOptions opt;
  opt.out_dir = a.out;
  opt.reference_curve = a.ref_curve;
  opt.reference_offset = a.cg_variant ? kReferenceCgOffset : kReferenceMassOffset;
  std::vector<std::string> files = EmitReport(records, fits, opt);
  out << Json{{"command", "report"},
              {"records", records.size()},
              {"files", files},
              {"fits", FitsJson(fits)}}
             .dump()
      << "\n";
  return kExitOk;
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Aircraft loading optimization: model, solvers, CG optimization, benchmarks"};
  app.name("alo");
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  Global g;
  app.add_option("--seed", g.seed, "Random seed (default from ALO_SEED, else 1)")
      ->envname("ALO_SEED");
  app.add_option("--threads", g.threads, "Worker thread cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("-v,--verbose", g.verbosity, "Human-readable progress on stderr");

  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand("generate", "Write an instance file");
  auto* ref = generate->add_flag("--reference", gen.reference, "The 30-container reference data set");
  auto* n = generate->add_option("-n", gen.n, "Total containers, split n/2, n/3, n/6");
  auto* n1 = generate->add_option("--n1", gen.n1, "Size-1 containers");
  auto* n2 = generate->add_option("--n2", gen.n2, "Size-2 containers");
  auto* n3 = generate->add_option("--n3", gen.n3, "Size-3 containers");
  auto* bins = generate->add_option("-N", gen.bins, "Bin count")->capture_default_str();
  generate->add_option("-o,--output", gen.out, "Instance file")->required();
  ref->excludes(n, n1, n2, n3, bins);
  n->excludes(n1, n2, n3);

  ExportArgs ex;
  CLI::App* exp = app.add_subcommand("export", "Write the constraint system");
  exp->add_option("instance", ex.instance, "Instance file")->required();
  exp->add_option("--format", ex.format, "mps or json")
      ->check(CLI::IsMember({"mps", "json"}))
      ->capture_default_str();
  exp->add_option("-o,--output", ex.out, "Model file")->required();

  SolveArgs sv;
  CLI::App* solve = app.add_subcommand("solve", "Maximize the carried mass");
  solve->add_option("instance", sv.instance, "Instance file")->required();
  solve->add_option("-o,--output", sv.out, "Solution file");
  solve->add_option("--tau", sv.solver.tau, "Quality threshold in [0, 1]")
      ->capture_default_str();
  AddSolverFlags(solve, sv.solver);

  CgArgs cg;
  cg.solver.budget = 10;
  CLI::App* ocg = app.add_subcommand("optimize-cg", "Move the CG toward the target");
  ocg->add_option("instance", cg.instance, "Instance file")->required();
  ocg->add_option("-o,--output", cg.out, "Report file");
  ocg->add_option("--method", cg.method, "sequence or direct")
      ->check(CLI::IsMember({"sequence", "direct"}))
      ->capture_default_str();
  ocg->add_option("--tau", cg.tau, "Mass floor as a fraction of W_max")->capture_default_str();
  ocg->add_option("--epsilon", cg.epsilon, "Shrink step, fraction of L")->capture_default_str();
  ocg->add_option("--max-stages", cg.max_stages, "Stage cap")->capture_default_str();
  ocg->add_option("--w-max", cg.w_max, "Override the mass reference");
  ocg->add_option("--initial-threshold", cg.initial_threshold, "Direct method start");
  AddSolverFlags(ocg, cg.solver);

  ValidateArgs va;
  CLI::App* val = app.add_subcommand("validate", "Check a solution against its instance");
  val->add_option("instance", va.instance, "Instance file")->required();
  val->add_option("solution", va.solution, "Solution file")->required();

  BenchArgs be;
  CLI::App* bench = app.add_subcommand("bench", "Run a scaling grid");
  bench->add_option("--r", be.r, "Values of r = n/N")->required();
  bench->add_option("--N-list", be.bins, "Bin counts")->required();
  bench->add_option("--count", be.count, "Instances per cell")->capture_default_str();
  bench->add_option("--tau", be.solver.tau, "Quality threshold")->capture_default_str();
  bench->add_option("-o,--output", be.out, "Output directory")->required();
  bench->add_flag("--ref-eq12", be.ref_curve, "Overlay the reference scaling curve");
  bench->add_option("--budget", be.solver.budget, "Budget per instance, seconds")
      ->capture_default_str();
  bench->add_option("--restarts", be.solver.restarts, "Local search walkers")
      ->capture_default_str();
  bench->add_option("--clock", be.solver.clock, "wall or steps")
      ->check(CLI::IsMember({"wall", "steps"}))
      ->capture_default_str();

  ReportArgs rp;
  CLI::App* report = app.add_subcommand("report", "Fits and plots from a bench CSV");
  report->add_option("csv", rp.csv, "bench.csv")->required();
  report->add_option("-o,--output", rp.out, "Output directory")->required();
  report->add_flag("--ref-eq12", rp.ref_curve, "Overlay the reference scaling curve");
  report->add_flag("--cg-variant", rp.cg_variant,
                   "Use the CG-optimization prefactor for the reference curve");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "alo: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*generate) return Generate(gen, g, out);
    if (*exp) return Export(ex, out);
    if (*solve) return SolveCommand(sv, g, out, err);
    if (*ocg) return OptimizeCg(cg, g, out, err);
    if (*val) return ValidateCommand(va, g, out, err);
    if (*bench) return Bench(be, g, out, err);
    if (*report) return Report(rp, out);
  } catch (const UsageError& e) {
    err << "alo: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "alo: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    err << "alo: " << e.what() << "\n";
    return kExitIo;
  } catch (const SearchSpaceTooLarge& e) {
    err << "alo: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "alo: " << e.what() << "\n";
    return kExitUsage;
  } catch (const GenerationError& e) {
    err << "alo: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace alo::cli
