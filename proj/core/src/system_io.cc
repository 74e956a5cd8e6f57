#include "alo/system_io.h"

#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "json_util.h"

namespace alo {

namespace {

std::string RowName(const Row& row) {
  std::string code;
  switch (row.tag) {
    case RowTag::kPlacement: code = "P"; break;
    case RowTag::kBin: code = "B"; break;
    case RowTag::kWeight: code = "W"; break;
    case RowTag::kCgUpper: code = "CU"; break;
    case RowTag::kCgLower: code = "CL"; break;
    case RowTag::kShearLeft: code = "SL"; break;
    case RowTag::kShearRight: code = "SR"; break;
    case RowTag::kMassFloor: code = "MF"; break;
    case RowTag::kCgWindow: code = "CW"; break;
  }
  return code + std::to_string(row.index);
}

bool ParseInt(std::string_view s, int& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

std::pair<RowTag, int> ParseRowName(std::string_view name) {
  static const std::pair<std::string_view, RowTag> kCodes[] = {
      {"CU", RowTag::kCgUpper},    {"CL", RowTag::kCgLower},
      {"SL", RowTag::kShearLeft},  {"SR", RowTag::kShearRight},
      {"MF", RowTag::kMassFloor},  {"CW", RowTag::kCgWindow},
      {"P", RowTag::kPlacement},   {"B", RowTag::kBin},
      {"W", RowTag::kWeight},
  };
  for (const auto& [code, tag] : kCodes) {
    if (name.substr(0, code.size()) == code) {
      int index = 0;
      if (ParseInt(name.substr(code.size()), index)) return {tag, index};
    }
  }
  throw FormatError("MPS row name '" + std::string(name) +
                    "' does not encode a row family");
}

std::string ColumnName(const VariableKey& key) {
  return "Y" + std::to_string(key.container_id) + "_" + std::to_string(key.bin);
}

VariableKey ParseColumnName(std::string_view name) {
  auto us = name.find('_');
  VariableKey key;
  if (name.empty() || name.front() != 'Y' || us == std::string_view::npos ||
      !ParseInt(name.substr(1, us - 1), key.container_id) ||
      !ParseInt(name.substr(us + 1), key.bin)) {
    throw FormatError("MPS column name '" + std::string(name) +
                      "' is not of the form Y<id>_<j>");
  }
  return key;
}

std::string Field(std::string_view s, std::size_t width) {
  std::string out(s);
  if (out.size() < width) out.append(width - out.size(), ' ');
  return out;
}

std::string EntryLine(std::string_view col, std::string_view row,
                      std::string_view value) {
  return "    " + Field(col, 8) + "  " + Field(row, 8) + "  " +
         std::string(value) + "\n";
}

}  // namespace

std::string FormatMpsNumber(const Rational& value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", value.ToDouble());
  return buf;
}

std::string WriteMps(const ConstraintSystem& system, std::string_view name) {
  if (system.num_variables() == 0) {
    throw std::invalid_argument(
        "MPS export needs at least one binary column; the payload is empty");
  }
  std::set<std::string> names;
  std::vector<std::string> row_names;
  for (const Row& row : system.rows) {
    row_names.push_back(RowName(row));
    if (!names.insert(row_names.back()).second) {
      throw std::invalid_argument("duplicate MPS row name " + row_names.back());
    }
  }
  // Column-major view.
  std::vector<std::vector<std::pair<std::size_t, const Rational*>>> columns(
      system.num_variables());
  for (std::size_t r = 0; r < system.rows.size(); ++r) {
    for (const Term& t : system.rows[r].terms) {
      columns[t.var].emplace_back(r, &t.coef);
    }
  }

  std::string out;
  out += "NAME          " + std::string(name) + "\n";
  out += "OBJSENSE\n    MIN\n";
  out += "ROWS\n N  OBJ\n";
  for (const std::string& rn : row_names) out += " L  " + rn + "\n";
  out += "COLUMNS\n";
  out += "    MARKER                 'MARKER'                 'INTORG'\n";
  for (std::size_t v = 0; v < system.num_variables(); ++v) {
    const std::string col = ColumnName(system.variables[v]);
    if (system.objective[v] != Rational(0)) {
      out += EntryLine(col, "OBJ", FormatMpsNumber(system.objective[v]));
    }
    for (const auto& [r, coef] : columns[v]) {
      out += EntryLine(col, row_names[r], FormatMpsNumber(*coef));
    }
  }
  out += "    MARKER                 'MARKER'                 'INTEND'\n";
  out += "RHS\n";
  for (std::size_t r = 0; r < system.rows.size(); ++r) {
    if (system.rows[r].rhs != Rational(0)) {
      out += EntryLine("RHS", row_names[r], FormatMpsNumber(system.rows[r].rhs));
    }
  }
  out += "BOUNDS\n";
  for (const VariableKey& key : system.variables) {
    out += " BV BND       " + ColumnName(key) + "\n";
  }
  out += "ENDATA\n";
  return out;
}

ConstraintSystem ReadMps(std::string_view text) {
  enum class Section { kNone, kName, kObjSense, kRows, kColumns, kRhs, kBounds, kEnd };
  Section section = Section::kNone;
  ConstraintSystem sys;
  std::unordered_map<std::string, std::size_t> row_index;
  std::unordered_map<std::string, std::size_t> col_index;
  std::string objective_row;
  std::set<std::string> bounded;

  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) {
    throw FormatError("MPS line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '*') continue;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (line[0] != ' ' && line[0] != '\t') {
      const std::string& head = tok[0];
      if (head == "NAME") section = Section::kName;
      else if (head == "OBJSENSE") section = Section::kObjSense;
      else if (head == "ROWS") section = Section::kRows;
      else if (head == "COLUMNS") section = Section::kColumns;
      else if (head == "RHS") section = Section::kRhs;
      else if (head == "BOUNDS") section = Section::kBounds;
      else if (head == "ENDATA") { section = Section::kEnd; break; }
      else fail("unsupported section " + head);
      continue;
    }
    switch (section) {
      case Section::kObjSense:
        if (tok[0] != "MIN" && tok[0] != "MINIMIZE") {
          fail("only minimization is supported");
        }
        break;
      case Section::kRows: {
        if (tok.size() != 2) fail("malformed ROWS entry");
        if (tok[0] == "N") {
          if (!objective_row.empty()) fail("second objective row");
          objective_row = tok[1];
        } else if (tok[0] == "L") {
          auto [tag, index] = ParseRowName(tok[1]);
          if (!row_index.emplace(tok[1], sys.rows.size()).second) {
            fail("duplicate row " + tok[1]);
          }
          sys.rows.push_back({tag, index, {}, Rational(0)});
        } else {
          fail("only <= rows are supported, got sense " + tok[0]);
        }
        break;
      }
      case Section::kColumns: {
        if (tok.size() >= 3 && tok[1] == "'MARKER'") break;
        if (tok.size() != 3 && tok.size() != 5) fail("malformed COLUMNS entry");
        auto [it, inserted] = col_index.emplace(tok[0], sys.variables.size());
        if (inserted) {
          sys.variables.push_back(ParseColumnName(tok[0]));
          sys.objective.emplace_back(0);
        } else if (it->second + 1 != sys.variables.size()) {
          fail("column " + tok[0] + " is not contiguous");
        }
        const std::size_t v = it->second;
        for (std::size_t i = 1; i + 1 < tok.size(); i += 2) {
          Rational value = Rational::Parse(tok[i + 1]);
          if (tok[i] == objective_row) {
            sys.objective[v] = value;
            continue;
          }
          auto r = row_index.find(tok[i]);
          if (r == row_index.end()) fail("unknown row " + tok[i]);
          sys.rows[r->second].terms.push_back({v, value});
        }
        break;
      }
      case Section::kRhs: {
        if (tok.size() != 3 && tok.size() != 5) fail("malformed RHS entry");
        for (std::size_t i = 1; i + 1 < tok.size(); i += 2) {
          auto r = row_index.find(tok[i]);
          if (r == row_index.end()) fail("unknown row " + tok[i]);
          sys.rows[r->second].rhs = Rational::Parse(tok[i + 1]);
        }
        break;
      }
      case Section::kBounds: {
        if (tok.size() != 3 || tok[0] != "BV") fail("only BV bounds supported");
        if (!col_index.contains(tok[2])) fail("bound on unknown column " + tok[2]);
        bounded.insert(tok[2]);
        break;
      }
      default:
        if (section != Section::kName) fail("data outside of a section");
    }
  }
  if (section != Section::kEnd) throw FormatError("MPS: missing ENDATA");
  if (bounded.size() != sys.variables.size()) {
    throw FormatError("MPS: every column must be declared binary (BV)");
  }
  return sys;
}

namespace {

using json_util::ExactToJson;

Rational RationalFromJson(const nlohmann::json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_number()) return Rational::FromDouble(j.get<double>());
  if (j.is_string()) return Rational::Parse(j.get<std::string>());
  throw FormatError("expected a number");
}

}  // namespace

std::string WriteSystemJson(const ConstraintSystem& system) {
  nlohmann::ordered_json doc;
  doc["schema"] = "alo-system/1";
  auto vars = nlohmann::ordered_json::array();
  for (const VariableKey& key : system.variables) {
    vars.push_back({{"k", key.container_id}, {"j", key.bin}});
  }
  doc["variables"] = std::move(vars);
  auto obj = nlohmann::ordered_json::array();
  for (const Rational& f : system.objective) obj.push_back(ExactToJson(f));
  doc["objective"] = std::move(obj);
  auto rows = nlohmann::ordered_json::array();
  for (const Row& row : system.rows) {
    nlohmann::ordered_json jr;
    jr["tag"] = std::string(RowTagName(row.tag));
    jr["index"] = row.index;
    jr["rhs"] = ExactToJson(row.rhs);
    auto terms = nlohmann::ordered_json::array();
    for (const Term& t : row.terms) {
      terms.push_back({t.var, ExactToJson(t.coef)});
    }
    jr["terms"] = std::move(terms);
    rows.push_back(std::move(jr));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(1) + "\n";
}

ConstraintSystem ReadSystemJson(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("system JSON: ") + e.what());
  }
  try {
    if (doc.at("schema") != "alo-system/1") {
      throw FormatError("system JSON: unsupported schema");
    }
    ConstraintSystem sys;
    for (const auto& v : doc.at("variables")) {
      sys.variables.push_back({v.at("k").get<int>(), v.at("j").get<int>()});
    }
    for (const auto& f : doc.at("objective")) {
      sys.objective.push_back(RationalFromJson(f));
    }
    if (sys.objective.size() != sys.variables.size()) {
      throw FormatError("system JSON: objective length mismatch");
    }
    for (const auto& jr : doc.at("rows")) {
      auto tag = RowTagFromName(jr.at("tag").get<std::string>());
      if (!tag) throw FormatError("system JSON: unknown row tag");
      Row row{*tag, jr.at("index").get<int>(), {}, RationalFromJson(jr.at("rhs"))};
      for (const auto& t : jr.at("terms")) {
        std::size_t var = t.at(0).get<std::size_t>();
        if (var >= sys.variables.size()) {
          throw FormatError("system JSON: term refers to unknown variable");
        }
        row.terms.push_back({var, RationalFromJson(t.at(1))});
      }
      sys.rows.push_back(std::move(row));
    }
    return sys;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("system JSON: ") + e.what());
  }
}

}  // namespace alo
