#ifndef ALO_SRC_JSON_UTIL_H_
#define ALO_SRC_JSON_UTIL_H_

// Strict JSON object reader: unknown keys and type mismatches raise
// ParseError carrying the JSON path.

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "alo/instance.h"
#include "alo/rational.h"
#include "json.hpp"

namespace alo::json_util {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path,
               std::initializer_list<std::string_view> allowed)
      : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ParseError(path_, "expected an object");
    for (const auto& [key, _] : j.items()) {
      bool ok = false;
      for (std::string_view a : allowed) ok = ok || a == key;
      if (!ok) throw ParseError(Child(key), "unknown field");
    }
  }

  std::string Child(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }
  const std::string& path() const { return path_; }

  bool Has(std::string_view key) const { return j_.contains(key); }

  const Json& Required(std::string_view key) const {
    auto it = j_.find(key);
    if (it == j_.end()) throw ParseError(Child(key), "missing required field");
    return *it;
  }

  std::int64_t Int(std::string_view key) const {
    const Json& v = Required(key);
    if (!v.is_number_integer()) throw ParseError(Child(key), "expected an integer");
    return v.get<std::int64_t>();
  }

  std::uint64_t UInt(std::string_view key) const {
    const Json& v = Required(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ParseError(Child(key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  double Double(std::string_view key) const {
    const Json& v = Required(key);
    if (!v.is_number()) throw ParseError(Child(key), "expected a number");
    return v.get<double>();
  }

  std::string String(std::string_view key) const {
    const Json& v = Required(key);
    if (!v.is_string()) throw ParseError(Child(key), "expected a string");
    return v.get<std::string>();
  }

  Rational Exact(std::string_view key) const { return ExactValue(Required(key), Child(key)); }

  static Rational ExactValue(const Json& v, const std::string& path) {
    try {
      if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
      if (v.is_number()) return Rational::FromDouble(v.get<double>());
      if (v.is_string()) return Rational::Parse(v.get<std::string>());
    } catch (const std::exception& e) {
      throw ParseError(path, e.what());
    }
    throw ParseError(path, "expected a number or a \"p/q\" string");
  }

 private:
  const Json& j_;
  std::string path_;
};

// Numbers that survive a double round trip are written as numbers, anything
// else as an exact "p/q" string.
inline OrderedJson ExactToJson(const Rational& r) {
  if (r.IsInteger() && r.num() <= INT64_MAX && r.num() >= INT64_MIN) {
    return static_cast<std::int64_t>(r.num());
  }
  double d = r.ToDouble();
  if (Rational::FromDouble(d) == r) return d;
  return r.ToString();
}

inline std::string Indexed(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

inline const Json& RequireArray(const Json& v, const std::string& path) {
  if (!v.is_array()) throw ParseError(path, "expected an array");
  return v;
}

inline Json ParseDocument(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError("$", e.what());
  }
}

}  // namespace alo::json_util

#endif  // ALO_SRC_JSON_UTIL_H_
