#ifndef ALO_BENCH_H_
#define ALO_BENCH_H_

// Scaling harness: instance grids over (r = n/N, N), time to tau quality,
// log-log fits of time against n_l, CSV records and SVG plots.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "alo/solver.h"

namespace alo {

struct BenchRecord {
  double r = 0;  // grid value, rounded to 3 decimals
  int n = 0;
  int bin_count = 0;
  std::uint64_t seed = 0;
  std::size_t n_l = 0;
  SolveStatus status = SolveStatus::kNoSolutionFound;
  // Solver clock time at which mass >= tau * w_max first held. Present only
  // when the quality target was reached.
  std::optional<double> time_s;
  std::int64_t mass = 0;
  std::int64_t w_max = 0;

  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

struct GridConfig {
  std::vector<double> r_values;
  std::vector<int> bin_counts;
  int count = 1;  // instances per cell
  double tau = 0.999;
  std::uint64_t seed = 1;
  // Mode is forced to threshold descent, tau to the value above, threads to 1
  // (cells are the unit of parallelism).
  SolveConfig solve;
  int threads = 1;

  void Validate() const;
};

// n = round(r * N), at least 1.
int CellSize(double r, int bin_count);

// Seed of instance `index` in cell (r, N); independent of the grid layout.
std::uint64_t CellInstanceSeed(std::uint64_t seed, double r, int bin_count,
                               int index);

// Records sorted by (r, N, index). Deterministic for a fixed seed when the
// solve clock is kSteps.
std::vector<BenchRecord> RunGrid(const GridConfig& config);

bool QualityReached(const BenchRecord& record);

struct CellSummary {
  double r = 0;
  int bin_count = 0;
  int n = 0;
  double mean_n_l = 0;
  int reached = 0;
  int censored = 0;
  std::optional<double> mean_time;  // over reached records only
};

std::vector<CellSummary> Summarize(const std::vector<BenchRecord>& records);

struct LineFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
  double residual_rms = 0;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ordinary least squares y = slope * x + intercept. Needs two distinct x.
// R^2 is 1 when y is constant and fitted exactly.
LineFit FitLine(const std::vector<double>& x, const std::vector<double>& y);

struct ScalingFit {
  double r = 0;
  double exponent = 0;
  double log_prefactor = 0;  // log10 of the prefactor
  double r_squared = 0;
  double residual_rms = 0;   // in decades
  std::size_t points = 0;
};

// log10 t = log_prefactor + exponent * log10 n_l over reached records at r.
// Throws FitError with fewer than 4 usable records.
ScalingFit FitScaling(const std::vector<BenchRecord>& records, double r);

// Reference curve t = 10^(-0.65 r + offset) * n_l^(0.11 r + 1.25). The mass
// variant uses offset -4.8, the CG variant -4.2.
inline constexpr double kReferenceMassOffset = -4.8;
inline constexpr double kReferenceCgOffset = -4.2;
double ReferenceTime(double r, double n_l, double offset = kReferenceMassOffset);
double ReferenceExponent(double r);
double ReferenceLogPrefactor(double r, double offset = kReferenceMassOffset);
// The reference is stated for 0.5 <= r <= 3 only.
bool ReferenceCurveValid(double r);

// Fit of n_l against n * N^2 over the records.
LineFit NonzeroScalingFit(const std::vector<BenchRecord>& records);

// CSV columns: r,n,N,seed,n_l,status,time_s,mass,w_max. time_s is empty when
// absent. Parse throws ParseError (path "line K" or "line K.column").
std::string WriteBenchCsv(const std::vector<BenchRecord>& records);
std::vector<BenchRecord> ParseBenchCsv(std::string_view text);

struct ReportOptions {
  std::string out_dir;
  bool reference_curve = false;
  double reference_offset = kReferenceMassOffset;
};

// Writes bench.csv, time_vs_N.svg and time_vs_nl.svg into out_dir (created
// if missing) and returns the written paths. Throws IoError.
std::vector<std::string> EmitReport(const std::vector<BenchRecord>& records,
                                    const std::vector<ScalingFit>& fits,
                                    const ReportOptions& options);

// Fits for every r with enough reached records; others are skipped.
std::vector<ScalingFit> FitAll(const std::vector<BenchRecord>& records);

}  // namespace alo

#endif  // ALO_BENCH_H_
