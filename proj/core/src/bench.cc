#include "alo/bench.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <thread>

#include "alo/instance.h"
#include "compiled_problem.h"
#include "splitmix.h"

namespace alo {

using internal::SplitMix64;

namespace {

double Round3(double r) { return std::round(r * 1000) / 1000; }

bool SameR(double a, double b) { return std::abs(a - b) < 5e-4; }

std::string Shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

BenchRecord RunOne(const GridConfig& config, double r, int bin_count, int index) {
  BenchRecord rec;
  rec.r = Round3(r);
  rec.n = CellSize(r, bin_count);
  rec.bin_count = bin_count;
  rec.seed = CellInstanceSeed(config.seed, r, bin_count, index);

  SizeSplit split = SplitSizes(rec.n);
  GeneratorConfig gen;
  gen.n1 = split.n1;
  gen.n2 = split.n2;
  gen.n3 = split.n3;
  gen.bin_count = bin_count;
  gen.seed = rec.seed;
  Instance inst = GenerateInstance(gen);

  ConstraintSystem system = BuildConstraints(inst.spec, inst.payload);
  rec.n_l = CountNonzeros(system);
  rec.w_max = WMax(inst.spec, inst.payload);

  SolveConfig solve = config.solve;
  solve.mode = SolveMode::kThresholdDescent;
  solve.tau = config.tau;
  solve.threads = 1;
  solve.seed = rec.seed;
  SolveReport report = Solve(system, inst.payload, inst.spec, solve);
  rec.status = report.status;
  rec.mass = report.incumbent ? report.mass : 0;
  const std::int64_t target = internal::TauTarget(config.tau, rec.w_max);
  for (const TracePoint& p : report.trace) {
    if (p.mass >= target) {
      rec.time_s = p.time;
      break;
    }
  }
  if (!QualityReached(rec)) rec.time_s.reset();
  return rec;
}

// Minimal SVG line/scatter chart with optional log axes.
class SvgChart {
 public:
  SvgChart(std::string title, std::string x_label, std::string y_label,
           bool log_x, bool log_y)
      : title_(std::move(title)), x_label_(std::move(x_label)),
        y_label_(std::move(y_label)), log_x_(log_x), log_y_(log_y) {}

  struct Series {
    std::string label;
    std::string css_class;
    std::vector<std::pair<double, double>> points;
    bool markers = true;
    bool line = false;
    bool dashed = false;
  };

  void Add(Series s) { series_.push_back(std::move(s)); }

  std::string Render() const {
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const Series& s : series_) {
      for (auto [x, y] : s.points) {
        if (!Usable(x, log_x_) || !Usable(y, log_y_)) continue;
        x0 = std::min(x0, Tx(x));
        x1 = std::max(x1, Tx(x));
        y0 = std::min(y0, Ty(y));
        y1 = std::max(y1, Ty(y));
      }
    }
    if (x0 > x1) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;

    constexpr double kW = 640, kH = 440, kL = 80, kR = 170, kT = 40, kB = 60;
    auto px = [&](double x) { return kL + (Tx(x) - x0) / (x1 - x0) * (kW - kL - kR); };
    auto py = [&](double y) { return kH - kB - (Ty(y) - y0) / (y1 - y0) * (kH - kT - kB); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
        << "\" height=\"" << kH << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
        << title_ << "</text>\n";
    out << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << kW - kL - kR
        << "\" height=\"" << kH - kT - kB << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      double tx = x0 + (x1 - x0) * i / 4;
      double ty = y0 + (y1 - y0) * i / 4;
      double sx = kL + (kW - kL - kR) * i / 4;
      double sy = kH - kB - (kH - kT - kB) * i / 4;
      out << "<text x=\"" << Fixed(sx, 1) << "\" y=\"" << kH - kB + 16
          << "\" text-anchor=\"middle\">" << Tick(tx, log_x_) << "</text>\n";
      out << "<text x=\"" << kL - 6 << "\" y=\"" << Fixed(sy + 4, 1)
          << "\" text-anchor=\"end\">" << Tick(ty, log_y_) << "</text>\n";
    }
    out << "<text x=\"" << (kW - kR + kL) / 2 << "\" y=\"" << kH - 16
        << "\" text-anchor=\"middle\">" << x_label_ << "</text>\n";
    out << "<text x=\"16\" y=\"" << (kH - kB + kT) / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << (kH - kB + kT) / 2
        << ")\">" << y_label_ << "</text>\n";

    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf"};
    for (std::size_t i = 0; i < series_.size(); ++i) {
      const Series& s = series_[i];
      const char* color = kColors[i % 7];
      std::string cls = s.css_class.empty() ? "" : " class=\"" + s.css_class + "\"";
      if (s.line) {
        out << "<polyline" << cls << " fill=\"none\" stroke=\"" << color << "\""
            << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
        for (auto [x, y] : s.points) {
          if (!Usable(x, log_x_) || !Usable(y, log_y_)) continue;
          out << Fixed(px(x), 2) << "," << Fixed(py(y), 2) << " ";
        }
        out << "\"/>\n";
      }
      if (s.markers) {
        for (auto [x, y] : s.points) {
          if (!Usable(x, log_x_) || !Usable(y, log_y_)) continue;
          out << "<circle" << cls << " cx=\"" << Fixed(px(x), 2) << "\" cy=\""
              << Fixed(py(y), 2) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
      }
      double ly = kT + 14 + 18.0 * i;
      out << "<line x1=\"" << kW - kR + 10 << "\" y1=\"" << ly - 4 << "\" x2=\""
          << kW - kR + 30 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\""
          << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
      out << "<text x=\"" << kW - kR + 36 << "\" y=\"" << ly << "\">" << s.label
          << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
  }

 private:
  static bool Usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0); }
  double Tx(double x) const { return log_x_ ? std::log10(x) : x; }
  double Ty(double y) const { return log_y_ ? std::log10(y) : y; }
  static std::string Tick(double t, bool log) {
    if (log) return "1e" + Fixed(t, 1);
    return Fixed(t, std::abs(t) >= 100 ? 0 : 2);
  }

  std::string title_, x_label_, y_label_;
  bool log_x_, log_y_;
  std::vector<Series> series_;
};

std::vector<double> DistinctR(const std::vector<BenchRecord>& records) {
  std::vector<double> rs;
  for (const BenchRecord& rec : records) {
    bool seen = false;
    for (double r : rs) seen = seen || SameR(r, rec.r);
    if (!seen) rs.push_back(rec.r);
  }
  std::sort(rs.begin(), rs.end());
  return rs;
}

}  // namespace

void GridConfig::Validate() const {
  if (r_values.empty() || bin_counts.empty()) {
    throw std::invalid_argument("grid needs at least one r value and one N");
  }
  for (double r : r_values) {
    if (!(r > 0) || !std::isfinite(r)) throw std::invalid_argument("r must be positive");
  }
  for (int n : bin_counts) {
    if (n < 2) throw std::invalid_argument("N must be at least 2");
  }
  if (count < 1) throw std::invalid_argument("count must be at least 1");
  if (!(tau >= 0 && tau <= 1)) throw std::invalid_argument("tau must be in [0, 1]");
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
  SolveConfig s = solve;
  s.tau = tau;
  s.threads = 1;
  s.Validate();
}

int CellSize(double r, int bin_count) {
  return std::max(1, static_cast<int>(std::lround(r * bin_count)));
}

std::uint64_t CellInstanceSeed(std::uint64_t seed, double r, int bin_count,
                               int index) {
  std::uint64_t h = SplitMix64(seed);
  h = SplitMix64(h ^ static_cast<std::uint64_t>(std::llround(r * 1000)));
  h = SplitMix64(h ^ static_cast<std::uint64_t>(bin_count));
  return SplitMix64(h ^ static_cast<std::uint64_t>(index));
}

bool QualityReached(const BenchRecord& record) {
  return record.status == SolveStatus::kTauReached ||
         record.status == SolveStatus::kOptimal;
}

std::vector<BenchRecord> RunGrid(const GridConfig& config) {
  config.Validate();
  struct Job {
    double r;
    int bin_count;
    int index;
  };
  std::vector<double> rs = config.r_values;
  std::vector<int> ns = config.bin_counts;
  std::sort(rs.begin(), rs.end());
  std::sort(ns.begin(), ns.end());
  std::vector<Job> jobs;
  for (double r : rs) {
    for (int n : ns) {
      for (int i = 0; i < config.count; ++i) jobs.push_back({r, n, i});
    }
  }
  std::vector<BenchRecord> out(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      out[k] = RunOne(config, jobs[k].r, jobs[k].bin_count, jobs[k].index);
    }
  };
  int workers = std::min<int>(config.threads, static_cast<int>(jobs.size()));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  return out;
}

std::vector<CellSummary> Summarize(const std::vector<BenchRecord>& records) {
  std::vector<BenchRecord> sorted = records;
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (!SameR(a.r, b.r)) return a.r < b.r;
    return a.bin_count < b.bin_count;
  });
  std::vector<CellSummary> cells;
  double time_sum = 0;
  double nl_sum = 0;
  int total = 0;
  auto close = [&] {
    CellSummary& c = cells.back();
    c.mean_n_l = nl_sum / total;
    if (c.reached > 0) c.mean_time = time_sum / c.reached;
  };
  for (const BenchRecord& rec : sorted) {
    if (cells.empty() || !SameR(cells.back().r, rec.r) ||
        cells.back().bin_count != rec.bin_count) {
      if (!cells.empty()) close();
      cells.push_back({rec.r, rec.bin_count, rec.n, 0, 0, 0, std::nullopt});
      time_sum = nl_sum = 0;
      total = 0;
    }
    CellSummary& c = cells.back();
    ++total;
    nl_sum += static_cast<double>(rec.n_l);
    if (QualityReached(rec) && rec.time_s) {
      ++c.reached;
      time_sum += *rec.time_s;
    } else {
      ++c.censored;
    }
  }
  if (!cells.empty()) close();
  return cells;
}

LineFit FitLine(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw FitError("line fit needs at least two points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0) throw FitError("line fit needs two distinct x values");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double e = y[i] - (fit.slope * x[i] + fit.intercept);
    sse += e * e;
  }
  fit.residual_rms = std::sqrt(sse / n);
  fit.r_squared = syy > 0 ? 1 - sse / syy : (sse == 0 ? 1 : 0);
  return fit;
}

ScalingFit FitScaling(const std::vector<BenchRecord>& records, double r) {
  std::vector<double> x, y;
  for (const BenchRecord& rec : records) {
    if (!SameR(rec.r, r) || !QualityReached(rec) || !rec.time_s) continue;
    if (rec.n_l == 0 || !(*rec.time_s > 0)) continue;
    x.push_back(std::log10(static_cast<double>(rec.n_l)));
    y.push_back(std::log10(*rec.time_s));
  }
  if (x.size() < 4) {
    throw FitError("scaling fit at r=" + Fixed(r, 3) + " needs 4 reached records, have " +
                   std::to_string(x.size()));
  }
  LineFit line = FitLine(x, y);
  ScalingFit fit;
  fit.r = Round3(r);
  fit.exponent = line.slope;
  fit.log_prefactor = line.intercept;
  fit.r_squared = line.r_squared;
  fit.residual_rms = line.residual_rms;
  fit.points = x.size();
  return fit;
}

std::vector<ScalingFit> FitAll(const std::vector<BenchRecord>& records) {
  std::vector<ScalingFit> fits;
  for (double r : DistinctR(records)) {
    try {
      fits.push_back(FitScaling(records, r));
    } catch (const FitError&) {
    }
  }
  return fits;
}

double ReferenceExponent(double r) { return 0.11 * r + 1.25; }

double ReferenceLogPrefactor(double r, double offset) { return -0.65 * r + offset; }

double ReferenceTime(double r, double n_l, double offset) {
  return std::pow(10.0, ReferenceLogPrefactor(r, offset)) * std::pow(n_l, ReferenceExponent(r));
}

bool ReferenceCurveValid(double r) { return r >= 0.5 - 1e-9 && r <= 3 + 1e-9; }

LineFit NonzeroScalingFit(const std::vector<BenchRecord>& records) {
  std::vector<double> x, y;
  for (const BenchRecord& rec : records) {
    x.push_back(static_cast<double>(rec.n) * rec.bin_count * rec.bin_count);
    y.push_back(static_cast<double>(rec.n_l));
  }
  return FitLine(x, y);
}

std::string WriteBenchCsv(const std::vector<BenchRecord>& records) {
  std::string out = "r,n,N,seed,n_l,status,time_s,mass,w_max\n";
  for (const BenchRecord& rec : records) {
    out += Fixed(rec.r, 3) + "," + std::to_string(rec.n) + "," +
           std::to_string(rec.bin_count) + "," + std::to_string(rec.seed) + "," +
           std::to_string(rec.n_l) + "," + std::string(SolveStatusName(rec.status)) +
           "," + (rec.time_s ? Shortest(*rec.time_s) : "") + "," +
           std::to_string(rec.mass) + "," + std::to_string(rec.w_max) + "\n";
  }
  return out;
}

namespace {

template <typename T>
T ParseNumber(std::string_view field, const std::string& path) {
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError(path, "malformed number \"" + std::string(field) + "\"");
  }
  return value;
}

}  // namespace

std::vector<BenchRecord> ParseBenchCsv(std::string_view text) {
  static constexpr std::string_view kHeader = "r,n,N,seed,n_l,status,time_s,mass,w_max";
  static constexpr const char* kColumns[] = {"r",      "n",      "N",    "seed", "n_l",
                                             "status", "time_s", "mass", "w_max"};
  std::vector<BenchRecord> records;
  std::size_t line_no = 0;
  while (!text.empty()) {
    std::size_t end = text.find('\n');
    std::string_view line = text.substr(0, end);
    text = end == std::string_view::npos ? std::string_view() : text.substr(end + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::string where = "line " + std::to_string(line_no);
    if (line_no == 1) {
      if (line != kHeader) throw ParseError(where, "expected header " + std::string(kHeader));
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    for (std::size_t pos = 0;;) {
      std::size_t comma = line.find(',', pos);
      f.push_back(line.substr(pos, comma - pos));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (f.size() != 9) {
      throw ParseError(where, "expected 9 columns, found " + std::to_string(f.size()));
    }
    auto at = [&](int c) { return where + "." + kColumns[c]; };
    BenchRecord rec;
    rec.r = ParseNumber<double>(f[0], at(0));
    rec.n = ParseNumber<int>(f[1], at(1));
    rec.bin_count = ParseNumber<int>(f[2], at(2));
    rec.seed = ParseNumber<std::uint64_t>(f[3], at(3));
    rec.n_l = ParseNumber<std::size_t>(f[4], at(4));
    auto status = SolveStatusFromName(f[5]);
    if (!status) throw ParseError(at(5), "unknown status \"" + std::string(f[5]) + "\"");
    rec.status = *status;
    if (!f[6].empty()) rec.time_s = ParseNumber<double>(f[6], at(6));
    rec.mass = ParseNumber<std::int64_t>(f[7], at(7));
    rec.w_max = ParseNumber<std::int64_t>(f[8], at(8));
    records.push_back(rec);
  }
  if (line_no == 0) throw ParseError("line 1", "missing header");
  return records;
}

std::vector<std::string> EmitReport(const std::vector<BenchRecord>& records,
                                    const std::vector<ScalingFit>& fits,
                                    const ReportOptions& options) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(options.out_dir, ec);
  if (ec) throw IoError("cannot create " + options.out_dir + ": " + ec.message());
  const fs::path dir(options.out_dir);
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    std::string path = (dir / name).string();
    WriteFile(path, content);
    written.push_back(path);
  };
  emit("bench.csv", WriteBenchCsv(records));

  const std::vector<CellSummary> cells = Summarize(records);
  const std::vector<double> rs = DistinctR(records);

  SvgChart by_n("Mean time to quality versus N", "N", "time [s]", false, true);
  for (double r : rs) {
    SvgChart::Series s;
    s.label = "r=" + Fixed(r, 2);
    s.line = true;
    for (const CellSummary& c : cells) {
      if (SameR(c.r, r) && c.mean_time) s.points.push_back({static_cast<double>(c.bin_count), *c.mean_time});
    }
    by_n.Add(std::move(s));
  }
  emit("time_vs_N.svg", by_n.Render());

  SvgChart by_nl("Time to quality versus n_l", "n_l", "time [s]", true, true);
  for (double r : rs) {
    SvgChart::Series s;
    s.label = "r=" + Fixed(r, 2);
    s.css_class = "measured";
    double lo = 1e300, hi = 0;
    for (const BenchRecord& rec : records) {
      if (!SameR(rec.r, r)) continue;
      lo = std::min(lo, static_cast<double>(rec.n_l));
      hi = std::max(hi, static_cast<double>(rec.n_l));
      if (QualityReached(rec) && rec.time_s) s.points.push_back({static_cast<double>(rec.n_l), *rec.time_s});
    }
    by_nl.Add(std::move(s));
    for (const ScalingFit& fit : fits) {
      if (!SameR(fit.r, r)) continue;
      SvgChart::Series line;
      line.label = "fit: n_l^" + Fixed(fit.exponent, 2);
      line.css_class = "fit";
      line.markers = false;
      line.line = true;
      for (double x : {lo, hi}) {
        line.points.push_back({x, std::pow(10.0, fit.log_prefactor) * std::pow(x, fit.exponent)});
      }
      by_nl.Add(std::move(line));
    }
    if (options.reference_curve && ReferenceCurveValid(r) && hi > 0) {
      SvgChart::Series ref;
      ref.label = "reference r=" + Fixed(r, 2);
      ref.css_class = "reference";
      ref.markers = false;
      ref.line = true;
      ref.dashed = true;
      for (double x : {lo, hi}) ref.points.push_back({x, ReferenceTime(r, x, options.reference_offset)});
      by_nl.Add(std::move(ref));
    }
  }
  emit("time_vs_nl.svg", by_nl.Render());
  return written;
}

}  // namespace alo
