#include "alo/instance.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <utility>

#include "json_util.h"
#include "splitmix.h"

namespace alo {

using internal::SplitMix64;

std::array<SizeClassParams, 3> DefaultSizeClasses() {
  return {{
      {1500, 3500, (3500.0 - 1500.0) / 3, 1300, 3700},
      {700, 1800, (1800.0 - 700.0) / 3, 500, 2000},
      {3200, 7000, (7000.0 - 3200.0) / 3, 3000, 7200},
  }};
}

void GeneratorConfig::Validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("generator config: " + what);
  };
  if (n1 < 0 || n2 < 0 || n3 < 0) fail("container counts must be >= 0");
  if (n1 + n2 + n3 < 1) fail("at least one container is required");
  if (bin_count < 2) fail("bin_count must be >= 2");
  for (const SizeClassParams& p : classes) {
    if (!(p.sigma > 0)) fail("sigma must be > 0");
    if (!(p.lower < p.mode_low && p.mode_low <= p.mode_high &&
          p.mode_high < p.upper)) {
      fail("truncation interval must contain both modes");
    }
  }
}

namespace {

// Portable draws on top of mt19937_64 (the standard distributions are not
// specified bit-for-bit across library implementations).
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Marsaglia polar method.
  double Normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2 * Uniform() - 1;
      v = 2 * Uniform() - 1;
      s = u * u + v * v;
    } while (s >= 1 || s == 0);
    double f = std::sqrt(-2 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  // Uniform integer in [0, bound).
  std::uint64_t Below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0;
};

constexpr std::uint64_t kOversample = 1000;
constexpr std::uint64_t kRetryCap = 1'000'000;

std::vector<std::int64_t> DrawClass(const SizeClassParams& p, int count,
                                    int bin_count, Stream& rng, int size) {
  std::vector<std::int64_t> pool;
  if (count == 0) return pool;
  // Accept w and its scaled, rounded mass only when both are strictly inside
  // the (scaled) window.
  auto accept = [&](double w) {
    if (!(w > p.lower && w < p.upper)) return;
    const double scaled = w * 20 / bin_count;
    const double mass = std::round(scaled);
    if (mass * bin_count > p.lower * 20 && mass * bin_count < p.upper * 20 &&
        mass > 0) {
      pool.push_back(static_cast<std::int64_t>(mass));
    }
  };
  const std::uint64_t per_mode = kOversample * static_cast<std::uint64_t>(count);
  for (std::uint64_t i = 0; i < per_mode; ++i) {
    accept(p.sigma * rng.Normal() + p.mode_low);
  }
  for (std::uint64_t i = 0; i < per_mode; ++i) {
    accept(p.sigma * rng.Normal() + p.mode_high);
  }
  for (std::uint64_t extra = 0;
       pool.size() < static_cast<std::size_t>(count); extra += 2) {
    if (extra >= kRetryCap) {
      throw GenerationError("size " + std::to_string(size) +
                            ": truncation window accepted only " +
                            std::to_string(pool.size()) + " of " +
                            std::to_string(count) + " masses");
    }
    accept(p.sigma * rng.Normal() + p.mode_low);
    accept(p.sigma * rng.Normal() + p.mode_high);
  }
  // Sample without replacement: partial Fisher-Yates.
  for (int i = 0; i < count; ++i) {
    std::size_t j = i + rng.Below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace

std::uint64_t SizeClassStreamSeed(std::uint64_t seed, int size) {
  return SplitMix64(seed + static_cast<std::uint64_t>(size) * 0x9E3779B97F4A7C15ULL);
}

Payload GenerateMasses(const GeneratorConfig& config) {
  config.Validate();
  const int counts[3] = {config.n1, config.n2, config.n3};
  std::vector<Container> containers;
  int id = 1;
  for (int s = 1; s <= 3; ++s) {
    Stream rng(SizeClassStreamSeed(config.seed, s));
    for (std::int64_t mass : DrawClass(config.classes[s - 1], counts[s - 1],
                                       config.bin_count, rng, s)) {
      containers.push_back({id++, static_cast<ContainerSize>(s), mass});
    }
  }
  return Payload(std::move(containers));
}

SizeSplit SplitSizes(int n) {
  if (n < 1) throw std::invalid_argument("split_sizes needs n >= 1");
  // Quotas n*3/6, n*2/6, n*1/6.
  const int weights[3] = {3, 2, 1};
  int counts[3], rem[3];
  int assigned = 0;
  for (int h = 0; h < 3; ++h) {
    counts[h] = n * weights[h] / 6;
    rem[h] = n * weights[h] % 6;
    assigned += counts[h];
  }
  int order[3] = {0, 1, 2};
  std::stable_sort(order, order + 3, [&](int a, int b) { return rem[a] > rem[b]; });
  for (int i = 0; assigned < n; ++i, ++assigned) ++counts[order[i]];
  return {counts[0], counts[1], counts[2]};
}

AircraftSpec DefaultAircraft(int bin_count) {
  AircraftSpec spec;
  spec.bin_count = bin_count;
  spec.max_payload = 40000;
  spec.empty_mass = 120000;
  spec.empty_cg = Rational(-1, 20);
  spec.cg_min = Rational(-1, 10);
  spec.cg_max = Rational(1, 5);
  spec.cg_target = Rational(1, 10);
  spec.shear_limit = {ShearShape::kLinearSymmetric, Rational(22000), {}};
  return spec;
}

Instance AirbusReferenceInstance() {
  static constexpr std::int64_t kMasses[30] = {
      2134, 3455, 1866, 1699, 3500, 3332, 2578, 2315, 1888, 1786,
      3277, 2987, 2534, 2111, 2607, 1566, 1765, 1946, 1732, 1641,
      1800, 986,  873,  1764, 1239, 1487, 769,  836,  659,  765,
  };
  std::vector<Container> containers;
  for (int k = 1; k <= 30; ++k) {
    containers.push_back({k, k <= 20 ? ContainerSize::kOne : ContainerSize::kTwo,
                          kMasses[k - 1]});
  }
  return {DefaultAircraft(20), Payload(std::move(containers)),
          {Provenance::Kind::kReference, std::nullopt, ""}};
}

Instance GenerateInstance(const GeneratorConfig& config) {
  return {DefaultAircraft(config.bin_count), GenerateMasses(config),
          {Provenance::Kind::kGenerated, config, ""}};
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using json_util::ExactToJson;
using json_util::Indexed;
using json_util::Json;
using json_util::ObjectReader;
using json_util::OrderedJson;

constexpr std::string_view kInstanceSchema = "alo-instance/1";

OrderedJson GeneratorToJson(const GeneratorConfig& g) {
  OrderedJson j;
  j["n1"] = g.n1;
  j["n2"] = g.n2;
  j["n3"] = g.n3;
  j["bin_count"] = g.bin_count;
  auto classes = OrderedJson::array();
  for (const SizeClassParams& p : g.classes) {
    classes.push_back({{"mode_low", p.mode_low},
                       {"mode_high", p.mode_high},
                       {"sigma", p.sigma},
                       {"lower", p.lower},
                       {"upper", p.upper}});
  }
  j["classes"] = std::move(classes);
  return j;
}

GeneratorConfig GeneratorFromJson(const Json& j, const std::string& path,
                                  std::uint64_t seed) {
  ObjectReader r(j, path, {"n1", "n2", "n3", "bin_count", "classes"});
  GeneratorConfig g;
  g.n1 = static_cast<int>(r.Int("n1"));
  g.n2 = static_cast<int>(r.Int("n2"));
  g.n3 = static_cast<int>(r.Int("n3"));
  g.bin_count = static_cast<int>(r.Int("bin_count"));
  g.seed = seed;
  const std::string cpath = r.Child("classes");
  const Json& classes = json_util::RequireArray(r.Required("classes"), cpath);
  if (classes.size() != 3) throw ParseError(cpath, "expected 3 size classes");
  for (std::size_t i = 0; i < 3; ++i) {
    ObjectReader c(classes[i], Indexed(cpath, i),
                   {"mode_low", "mode_high", "sigma", "lower", "upper"});
    g.classes[i] = {c.Double("mode_low"), c.Double("mode_high"),
                    c.Double("sigma"), c.Double("lower"), c.Double("upper")};
  }
  return g;
}

}  // namespace

std::string SaveInstance(const Instance& instance) {
  const AircraftSpec& s = instance.spec;
  OrderedJson doc;
  doc["schema"] = kInstanceSchema;
  OrderedJson aircraft;
  aircraft["bin_count"] = s.bin_count;
  aircraft["max_payload"] = s.max_payload;
  aircraft["empty_mass"] = s.empty_mass;
  aircraft["empty_cg"] = ExactToJson(s.empty_cg);
  aircraft["cg_min"] = ExactToJson(s.cg_min);
  aircraft["cg_max"] = ExactToJson(s.cg_max);
  aircraft["cg_target"] = ExactToJson(s.cg_target);
  OrderedJson shear;
  if (s.shear_limit.shape == ShearShape::kLinearSymmetric) {
    shear["shape"] = "linear_symmetric";
    shear["peak"] = ExactToJson(s.shear_limit.peak);
  } else {
    shear["shape"] = "piecewise_linear";
    auto points = OrderedJson::array();
    for (const auto& [x, v] : s.shear_limit.table) {
      points.push_back({ExactToJson(x), ExactToJson(v)});
    }
    shear["points"] = std::move(points);
  }
  aircraft["shear_limit"] = std::move(shear);
  doc["aircraft"] = std::move(aircraft);

  auto containers = OrderedJson::array();
  for (const Container& c : instance.payload.containers()) {
    containers.push_back(
        {{"id", c.id}, {"size", static_cast<int>(c.size)}, {"mass", c.mass}});
  }
  doc["containers"] = std::move(containers);

  OrderedJson prov;
  switch (instance.provenance.kind) {
    case Provenance::Kind::kReference:
      prov["kind"] = "reference";
      break;
    case Provenance::Kind::kGenerated:
      prov["kind"] = "generated";
      prov["seed"] = instance.provenance.generator->seed;
      prov["generator"] = GeneratorToJson(*instance.provenance.generator);
      break;
    case Provenance::Kind::kFile:
      prov["kind"] = "file";
      if (!instance.provenance.source.empty()) {
        prov["source"] = instance.provenance.source;
      }
      break;
  }
  doc["provenance"] = std::move(prov);
  return doc.dump(2) + "\n";
}

Instance LoadInstance(std::string_view document) {
  const Json doc = json_util::ParseDocument(document);
  ObjectReader root(doc, "", {"schema", "aircraft", "containers", "provenance"});
  if (root.String("schema") != kInstanceSchema) {
    throw ParseError("schema", "unsupported schema, expected " +
                                   std::string(kInstanceSchema));
  }
  Instance inst;

  ObjectReader a(root.Required("aircraft"), "aircraft",
                 {"bin_count", "max_payload", "empty_mass", "empty_cg",
                  "cg_min", "cg_max", "cg_target", "shear_limit"});
  AircraftSpec& s = inst.spec;
  s.bin_count = static_cast<int>(a.Int("bin_count"));
  s.max_payload = a.Int("max_payload");
  s.empty_mass = a.Int("empty_mass");
  s.empty_cg = a.Exact("empty_cg");
  s.cg_min = a.Exact("cg_min");
  s.cg_max = a.Exact("cg_max");
  s.cg_target = a.Exact("cg_target");
  {
    const std::string spath = a.Child("shear_limit");
    const Json& sj = a.Required("shear_limit");
    if (!sj.is_object()) throw ParseError(spath, "expected an object");
    std::string shape = sj.value("shape", "");
    if (shape == "linear_symmetric") {
      ObjectReader sr(sj, spath, {"shape", "peak"});
      s.shear_limit = {ShearShape::kLinearSymmetric, sr.Exact("peak"), {}};
    } else if (shape == "piecewise_linear") {
      ObjectReader sr(sj, spath, {"shape", "points"});
      const std::string ppath = sr.Child("points");
      const Json& pts = json_util::RequireArray(sr.Required("points"), ppath);
      s.shear_limit.shape = ShearShape::kPiecewiseLinear;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::string ip = Indexed(ppath, i);
        if (!pts[i].is_array() || pts[i].size() != 2) {
          throw ParseError(ip, "expected an [x, S] pair");
        }
        s.shear_limit.table.emplace_back(
            ObjectReader::ExactValue(pts[i][0], ip + "[0]"),
            ObjectReader::ExactValue(pts[i][1], ip + "[1]"));
      }
      if (!pts.empty()) s.shear_limit.peak = s.shear_limit.Interpolate(Rational(0));
    } else {
      throw ParseError(spath + ".shape",
                       "expected \"linear_symmetric\" or \"piecewise_linear\"");
    }
  }
  try {
    s.Validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError("aircraft", e.what());
  }

  const Json& cj = json_util::RequireArray(root.Required("containers"), "containers");
  std::vector<Container> containers;
  for (std::size_t i = 0; i < cj.size(); ++i) {
    ObjectReader c(cj[i], Indexed("containers", i), {"id", "size", "mass"});
    std::int64_t size = c.Int("size");
    if (size < 1 || size > 3) throw ParseError(c.Child("size"), "expected 1, 2 or 3");
    std::int64_t mass = c.Int("mass");
    if (mass <= 0) throw ParseError(c.Child("mass"), "expected a positive mass");
    std::int64_t id = c.Int("id");
    if (id <= 0) throw ParseError(c.Child("id"), "expected a positive id");
    containers.push_back({static_cast<int>(id), static_cast<ContainerSize>(size), mass});
  }
  try {
    inst.payload = Payload(std::move(containers));
  } catch (const std::invalid_argument& e) {
    throw ParseError("containers", e.what());
  }

  if (root.Has("provenance")) {
    const Json& pj = root.Required("provenance");
    if (!pj.is_object()) throw ParseError("provenance", "expected an object");
    std::string kind = pj.value("kind", "");
    if (kind == "reference") {
      ObjectReader(pj, "provenance", {"kind"});
      inst.provenance = {Provenance::Kind::kReference, std::nullopt, ""};
    } else if (kind == "generated") {
      ObjectReader pr(pj, "provenance", {"kind", "seed", "generator"});
      inst.provenance = {Provenance::Kind::kGenerated,
                         GeneratorFromJson(pr.Required("generator"),
                                           "provenance.generator", pr.UInt("seed")),
                         ""};
    } else if (kind == "file") {
      ObjectReader pr(pj, "provenance", {"kind", "source"});
      inst.provenance = {Provenance::Kind::kFile, std::nullopt,
                         pr.Has("source") ? pr.String("source") : ""};
    } else {
      throw ParseError("provenance.kind",
                       "expected \"reference\", \"generated\" or \"file\"");
    }
  }
  return inst;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path);
  return ss.str();
}

void WriteFile(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("error writing " + path);
}

}  // namespace alo
