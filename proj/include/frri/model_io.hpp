#pragma once

// Versioned JSON model file. Reals are written with enough digits to read
// back bit-exactly.
//
//   {"format": "frri-model", "version": 1,
//    "connectives": {"tnorm": "min", "implicator": "luk", "cover_tnorm": "luk"},
//    "decision": "d", "classes": ["0", "1"], "default_class": 0,
//    "attributes": [{"name": "a1", "min": 0.0, "max": 1.0}, ...],
//    "rules": [{"source": 1, "types": "UUGUUUUG", "class": 1,
//               "confidence": 0.6, "prototype": [...]}, ...]}

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"

#include "frri/error.hpp"
#include "frri/rules.hpp"

namespace frri {

inline constexpr int kModelVersion = 1;

inline nlohmann::ordered_json to_json(const Ruleset& rs) {
  using json = nlohmann::ordered_json;
  json attributes = json::array();
  for (const auto& a : rs.normalization.attributes)
    attributes.push_back({{"name", a.name}, {"min", a.observed_min}, {"max", a.observed_max}});
  json rules = json::array();
  for (const auto& r : rs.rules) {
    json rule;
    rule["source"] = r.source_index ? json(*r.source_index) : json(nullptr);
    rule["types"] = r.type_codes();
    rule["class"] = r.class_index;
    rule["confidence"] = r.confidence;
    rule["prototype"] = r.prototype;
    rules.push_back(std::move(rule));
  }
  json doc;
  doc["format"] = "frri-model";
  doc["version"] = kModelVersion;
  doc["connectives"] = {{"tnorm", to_string(rs.connectives.tnorm)},
                        {"implicator", to_string(rs.connectives.implicator)},
                        {"cover_tnorm", to_string(rs.connectives.cover_tnorm)}};
  doc["decision"] = rs.decision_name;
  doc["classes"] = rs.class_labels;
  doc["default_class"] = rs.default_class;
  doc["attributes"] = std::move(attributes);
  doc["rules"] = std::move(rules);
  return doc;
}

inline void serialize_ruleset(const Ruleset& rs, std::ostream& out) {
  out << to_json(rs).dump(1) << '\n';
}

namespace detail {

template <class T>
T field(const nlohmann::ordered_json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw ModelError(where + ": missing '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ModelError(where + "." + key + ": wrong type");
  }
}

}  // namespace detail

inline Ruleset ruleset_from_json(const nlohmann::ordered_json& doc) {
  using detail::field;
  if (field<std::string>(doc, "format", "model") != "frri-model")
    throw ModelError("model: not an frri model file");
  const int version = field<int>(doc, "version", "model");
  if (version != kModelVersion)
    throw ModelError("model: unsupported version " + std::to_string(version) + " (expected " +
                     std::to_string(kModelVersion) + ")");

  Ruleset rs;
  const auto conn = field<nlohmann::ordered_json>(doc, "connectives", "model");
  try {
    rs.connectives.tnorm = parse_tnorm(field<std::string>(conn, "tnorm", "connectives"));
    rs.connectives.implicator = parse_implicator(field<std::string>(conn, "implicator", "connectives"));
    rs.connectives.cover_tnorm = parse_tnorm(field<std::string>(conn, "cover_tnorm", "connectives"));
  } catch (const ModelError&) {
    throw;
  } catch (const Error& e) {
    throw ModelError(std::string("connectives: ") + e.what());
  }
  rs.decision_name = field<std::string>(doc, "decision", "model");
  rs.class_labels = field<std::vector<std::string>>(doc, "classes", "model");
  rs.default_class = field<std::size_t>(doc, "default_class", "model");
  if (rs.default_class >= rs.class_labels.size() && !rs.class_labels.empty())
    throw ModelError("model.default_class: out of range");

  const auto attributes = field<nlohmann::ordered_json>(doc, "attributes", "model");
  if (!attributes.is_array()) throw ModelError("model.attributes: expected an array");
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    const std::string where = "attributes[" + std::to_string(i) + "]";
    AttributeMeta a{field<std::string>(attributes[i], "name", where),
                    field<double>(attributes[i], "min", where),
                    field<double>(attributes[i], "max", where)};
    if (a.observed_min > a.observed_max) throw ModelError(where + ": min exceeds max");
    rs.normalization.attributes.push_back(std::move(a));
  }

  const auto rules = field<nlohmann::ordered_json>(doc, "rules", "model");
  if (!rules.is_array()) throw ModelError("model.rules: expected an array");
  const std::size_t m = rs.normalization.size();
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const std::string where = "rules[" + std::to_string(i) + "]";
    const auto& obj = rules[i];
    Rule r;
    if (!obj.is_object() || !obj.contains("source")) throw ModelError(where + ": missing 'source'");
    if (!obj.at("source").is_null()) r.source_index = field<std::size_t>(obj, "source", where);
    for (char c : field<std::string>(obj, "types", where)) {
      const auto t = condition_from_code(c);
      if (!t) throw ModelError(where + ".types: unknown condition type '" + std::string(1, c) + "'");
      r.types.push_back(*t);
    }
    r.class_index = field<std::size_t>(obj, "class", where);
    r.confidence = field<double>(obj, "confidence", where);
    r.prototype = field<std::vector<double>>(obj, "prototype", where);
    if (r.types.size() != m || r.prototype.size() != m)
      throw ModelError(where + ": expected " + std::to_string(m) + " attributes");
    if (r.class_index >= rs.class_labels.size()) throw ModelError(where + ".class: out of range");
    if (!(r.confidence >= 0.0 && r.confidence <= 1.0))
      throw ModelError(where + ".confidence: outside [0,1]");
    rs.rules.push_back(std::move(r));
  }
  return rs;
}

inline Ruleset parse_ruleset(std::istream& in) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelError(std::string("model: ") + e.what());
  }
  return ruleset_from_json(doc);
}

inline void save_ruleset(const Ruleset& rs, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  serialize_ruleset(rs, out);
}

inline Ruleset load_ruleset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return parse_ruleset(in);
}

}  // namespace frri
