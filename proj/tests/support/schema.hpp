#pragma once
// Draft-07 subset validator: type, enum, properties, required,
// additionalProperties, items, minItems, maxItems, minimum, maximum,
// exclusiveMinimum, pattern and local $ref.

#include <regex>
#include <string>
#include <vector>

#include "json.hpp"

namespace schema {

using nlohmann::json;

class Validator {
 public:
  explicit Validator(json root) : root_(std::move(root)) {}

  /// Problems found when validating `doc` against definitions/<name>; empty means valid.
  std::vector<std::string> check(const json& doc, const std::string& definition) const {
    std::vector<std::string> out;
    walk(doc, resolve("#/definitions/" + definition), "$", out);
    return out;
  }

 private:
  const json& resolve(const std::string& ref) const {
    if (ref.rfind("#/", 0) != 0) throw std::invalid_argument("only local refs are supported: " + ref);
    return root_.at(json::json_pointer(ref.substr(1)));
  }

  static bool has_type(const json& v, const std::string& t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    if (t == "integer") return v.is_number_integer();
    if (t == "number") return v.is_number();
    throw std::invalid_argument("unknown schema type " + t);
  }

  void walk(const json& v, const json& s, const std::string& path, std::vector<std::string>& out) const {
    if (s.contains("$ref")) return walk(v, resolve(s["$ref"].get<std::string>()), path, out);
    if (s.contains("type")) {
      bool ok = false;
      if (s["type"].is_array()) {
        for (const auto& t : s["type"]) ok = ok || has_type(v, t.get<std::string>());
      } else {
        ok = has_type(v, s["type"].get<std::string>());
      }
      if (!ok) {
        out.push_back(path + ": expected type " + s["type"].dump() + ", got " + v.type_name());
        return;
      }
    }
    if (s.contains("enum")) {
      bool found = false;
      for (const auto& e : s["enum"]) found = found || e == v;
      if (!found) out.push_back(path + ": " + v.dump() + " is not one of " + s["enum"].dump());
    }
    if (v.is_number()) {
      const double x = v.get<double>();
      if (s.contains("minimum") && x < s["minimum"].get<double>()) out.push_back(path + ": below minimum");
      if (s.contains("maximum") && x > s["maximum"].get<double>()) out.push_back(path + ": above maximum");
      if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>())
        out.push_back(path + ": not above exclusiveMinimum");
    }
    if (v.is_string() && s.contains("pattern") &&
        !std::regex_search(v.get<std::string>(), std::regex(s["pattern"].get<std::string>())))
      out.push_back(path + ": does not match " + s["pattern"].get<std::string>());
    if (v.is_array()) {
      if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>()) out.push_back(path + ": too few items");
      if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>()) out.push_back(path + ": too many items");
      if (s.contains("items"))
        for (std::size_t i = 0; i < v.size(); ++i) walk(v[i], s["items"], path + "[" + std::to_string(i) + "]", out);
    }
    if (v.is_object()) {
      if (s.contains("required"))
        for (const auto& r : s["required"])
          if (!v.contains(r.get<std::string>())) out.push_back(path + ": missing " + r.get<std::string>());
      const json props = s.value("properties", json::object());
      for (const auto& [key, child] : v.items()) {
        if (props.contains(key)) {
          walk(child, props[key], path + "." + key, out);
        } else if (s.contains("additionalProperties") && s["additionalProperties"] == false) {
          out.push_back(path + ": unexpected property " + key);
        }
      }
    }
  }

  json root_;
};

}  // namespace schema
