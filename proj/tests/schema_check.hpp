#pragma once

// Validator for the subset of JSON Schema used by schemas/report.schema.json:
// $ref into #/$defs, type, const, enum, pattern, required, properties,
// additionalProperties: false, items, minItems, maxItems, minimum, maximum,
// exclusiveMinimum and oneOf. Unknown keywords are rejected so the subset
// cannot silently drift from the schema.

#include <json.hpp>

#include <fstream>
#include <regex>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace schema_check {

using nlohmann::json;

class Validator {
 public:
  explicit Validator(json schema) : root_(std::move(schema)) {}

  static Validator from_file(const std::string &path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open schema " + path);
    return Validator(json::parse(f));
  }

  std::vector<std::string> errors(const json &doc) const {
    std::vector<std::string> out;
    check(root_, doc, "$", out);
    return out;
  }

 private:
  json root_;

  const json &resolve(const std::string &ref) const {
    const std::string prefix = "#/$defs/";
    if (ref.rfind(prefix, 0) != 0) throw std::runtime_error("unsupported $ref " + ref);
    return root_.at("$defs").at(ref.substr(prefix.size()));
  }

  static bool type_matches(const std::string &t, const json &v) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    if (t == "integer") return v.is_number_integer() || (v.is_number_float() && v.get<double>() == std::floor(v.get<double>()));
    if (t == "number") return v.is_number();
    throw std::runtime_error("unknown type " + t);
  }

  void check(const json &s, const json &v, const std::string &at, std::vector<std::string> &out) const {
    static const std::set<std::string> known{"$schema", "$id", "title", "$defs", "$ref", "type", "const", "enum",
                                             "pattern", "required", "properties", "additionalProperties", "items",
                                             "minItems", "maxItems", "minimum", "maximum", "exclusiveMinimum", "oneOf"};
    for (const auto &[k, _] : s.items())
      if (!known.count(k)) throw std::runtime_error("unsupported schema keyword " + k);

    if (s.contains("$ref")) check(resolve(s["$ref"]), v, at, out);
    if (s.contains("type")) {
      bool ok = false;
      if (s["type"].is_array()) {
        for (const auto &t : s["type"]) ok |= type_matches(t, v);
      } else {
        ok = type_matches(s["type"], v);
      }
      if (!ok) {
        out.push_back(at + ": expected type " + s["type"].dump());
        return;
      }
    }
    if (s.contains("const") && v != s["const"]) out.push_back(at + ": expected " + s["const"].dump());
    if (s.contains("enum") && std::find(s["enum"].begin(), s["enum"].end(), v) == s["enum"].end())
      out.push_back(at + ": " + v.dump() + " not in " + s["enum"].dump());
    if (s.contains("pattern") && v.is_string() && !std::regex_search(v.get<std::string>(), std::regex(s["pattern"].get<std::string>())))
      out.push_back(at + ": '" + v.get<std::string>() + "' does not match " + s["pattern"].get<std::string>());
    if (v.is_number()) {
      double x = v.get<double>();
      if (s.contains("minimum") && x < s["minimum"].get<double>()) out.push_back(at + ": below minimum");
      if (s.contains("maximum") && x > s["maximum"].get<double>()) out.push_back(at + ": above maximum");
      if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>()) out.push_back(at + ": not above exclusiveMinimum");
    }
    if (v.is_object()) {
      if (s.contains("required"))
        for (const auto &r : s["required"])
          if (!v.contains(r.get<std::string>())) out.push_back(at + ": missing " + r.get<std::string>());
      for (const auto &[k, child] : v.items()) {
        if (s.contains("properties") && s["properties"].contains(k))
          check(s["properties"][k], child, at + "." + k, out);
        else if (s.contains("additionalProperties") && s["additionalProperties"] == false)
          out.push_back(at + ": unexpected property " + k);
      }
    }
    if (v.is_array()) {
      if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>()) out.push_back(at + ": too few items");
      if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>()) out.push_back(at + ": too many items");
      if (s.contains("items"))
        for (std::size_t i = 0; i < v.size(); ++i) check(s["items"], v[i], at + "[" + std::to_string(i) + "]", out);
    }
    if (s.contains("oneOf")) {
      int matches = 0;
      std::vector<std::string> first;
      for (const auto &alt : s["oneOf"]) {
        std::vector<std::string> e;
        check(alt, v, at, e);
        if (e.empty())
          ++matches;
        else if (first.empty())
          first = e;
      }
      if (matches != 1)
        out.push_back(at + ": matches " + std::to_string(matches) + " alternatives of oneOf" +
                      (first.empty() ? "" : " (" + first.front() + ")"));
    }
  }
};

}  // namespace schema_check
