#include "alo/solution.h"

#include <stdexcept>

#include "json_util.h"

namespace alo {

namespace {

using json_util::ExactToJson;
using json_util::Indexed;
using json_util::Json;
using json_util::ObjectReader;
using json_util::OrderedJson;

constexpr std::string_view kSolutionSchema = "alo-solution/1";

}  // namespace

Solution MakeSolution(const SolveReport& report, const Instance& instance,
                      std::string instance_ref) {
  Solution s;
  s.instance = std::move(instance_ref);
  s.status = report.status;
  Assignment y = report.incumbent
                     ? *report.incumbent
                     : Assignment(instance.payload, instance.spec.bin_count);
  for (const auto& [c, j] : y.Entries()) {
    s.placements.push_back({instance.payload[c].id, j});
  }
  s.mass = TotalMass(y, instance.payload);
  s.cg = CenterOfGravity(y, instance.spec, instance.payload);
  s.shear_profile = ShearProfile(y, instance.spec, instance.payload);
  s.trace = report.trace;
  s.n_l = report.n_l;
  s.wall_time = report.wall_time;
  return s;
}

Assignment ToAssignment(const Solution& solution, const Instance& instance) {
  Assignment y(instance.payload, instance.spec.bin_count);
  for (const SolutionPlacement& p : solution.placements) {
    auto c = instance.payload.IndexOfId(p.container_id);
    if (!c) {
      throw std::invalid_argument("solution places unknown container " +
                                  std::to_string(p.container_id));
    }
    if (p.bin < 1 || p.bin > y.positions(*c)) {
      throw std::invalid_argument("solution places container " +
                                  std::to_string(p.container_id) +
                                  " outside its admissible bins");
    }
    y.Set(*c, p.bin, true);
  }
  return y;
}

std::string SaveSolution(const Solution& s) {
  OrderedJson doc;
  doc["schema"] = kSolutionSchema;
  doc["instance"] = s.instance;
  doc["status"] = SolveStatusName(s.status);
  auto placements = OrderedJson::array();
  for (const SolutionPlacement& p : s.placements) {
    placements.push_back({{"k", p.container_id}, {"j", p.bin}});
  }
  doc["placements"] = std::move(placements);
  doc["mass"] = s.mass;
  doc["cg"] = s.cg;
  auto shear = OrderedJson::array();
  for (const ShearPoint& p : s.shear_profile) {
    shear.push_back({{"side", p.side == ShearSide::kLeft ? "left" : "right"},
                     {"j", p.j},
                     {"load", ExactToJson(p.load)},
                     {"limit", ExactToJson(p.limit)}});
  }
  doc["shear_profile"] = std::move(shear);
  auto trace = OrderedJson::array();
  for (const TracePoint& t : s.trace) {
    trace.push_back({{"time", t.time},
                     {"objective", ExactToJson(t.objective)},
                     {"mass", t.mass}});
  }
  doc["trace"] = std::move(trace);
  doc["n_l"] = s.n_l;
  doc["wall_time"] = s.wall_time;
  return doc.dump(2) + "\n";
}

Solution LoadSolution(std::string_view document) {
  const Json doc = json_util::ParseDocument(document);
  ObjectReader root(doc, "",
                    {"schema", "instance", "status", "placements", "mass", "cg",
                     "shear_profile", "trace", "n_l", "wall_time"});
  if (root.String("schema") != kSolutionSchema) {
    throw ParseError("schema", "unsupported schema, expected " +
                                   std::string(kSolutionSchema));
  }
  Solution s;
  s.instance = root.String("instance");
  auto status = SolveStatusFromName(root.String("status"));
  if (!status) throw ParseError("status", "unknown status");
  s.status = *status;

  const Json& placements = json_util::RequireArray(root.Required("placements"), "placements");
  for (std::size_t i = 0; i < placements.size(); ++i) {
    ObjectReader p(placements[i], Indexed("placements", i), {"k", "j"});
    s.placements.push_back({static_cast<int>(p.Int("k")), static_cast<int>(p.Int("j"))});
  }
  s.mass = root.Int("mass");
  s.cg = root.Double("cg");

  const Json& shear = json_util::RequireArray(root.Required("shear_profile"), "shear_profile");
  for (std::size_t i = 0; i < shear.size(); ++i) {
    ObjectReader p(shear[i], Indexed("shear_profile", i), {"side", "j", "load", "limit"});
    ShearPoint point;
    std::string side = p.String("side");
    if (side == "left") {
      point.side = ShearSide::kLeft;
    } else if (side == "right") {
      point.side = ShearSide::kRight;
    } else {
      throw ParseError(p.Child("side"), "expected \"left\" or \"right\"");
    }
    point.j = static_cast<int>(p.Int("j"));
    point.load = p.Exact("load");
    point.limit = p.Exact("limit");
    s.shear_profile.push_back(point);
  }

  const Json& trace = json_util::RequireArray(root.Required("trace"), "trace");
  for (std::size_t i = 0; i < trace.size(); ++i) {
    ObjectReader t(trace[i], Indexed("trace", i), {"time", "objective", "mass"});
    s.trace.push_back({t.Double("time"), t.Exact("objective"), t.Int("mass")});
  }
  s.n_l = root.UInt("n_l");
  s.wall_time = root.Double("wall_time");
  return s;
}

}  // namespace alo
