#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "frri/dataset.hpp"
#include "frri/error.hpp"
#include "frri/fuzzy.hpp"

namespace frri {

/// Per-attribute condition of a rule. The character codes are the ones used
/// in model files.
enum class ConditionType : char {
  similar = 'S',
  dominant = 'L',   // "smaller than or similar to"
  dominated = 'G',  // "greater than or similar to"
  unused = 'U',
};

/// Order in which pruning tries types for an attribute.
inline constexpr ConditionType kPruneOrder[] = {ConditionType::unused, ConditionType::dominant,
                                                ConditionType::dominated, ConditionType::similar};

inline std::optional<ConditionType> condition_from_code(char c) {
  switch (c) {
    case 'S': return ConditionType::similar;
    case 'L': return ConditionType::dominant;
    case 'G': return ConditionType::dominated;
    case 'U': return ConditionType::unused;
    default: return std::nullopt;
  }
}

constexpr double relation(ConditionType t, double p, double x) noexcept {
  switch (t) {
    case ConditionType::similar: return similar(p, x);
    case ConditionType::dominant: return dominant(p, x);
    case ConditionType::dominated: return dominated(p, x);
    case ConditionType::unused:
    default: return 1.0;
  }
}

struct Rule {
  std::vector<double> prototype;
  std::vector<ConditionType> types;
  std::size_t class_index = 0;
  double confidence = 0.0;
  std::optional<std::size_t> source_index;

  std::size_t n_attributes() const noexcept { return types.size(); }

  /// Number of conditions actually used.
  std::size_t length() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(types.begin(), types.end(),
                      [](ConditionType t) { return t != ConditionType::unused; }));
  }

  std::string type_codes() const {
    std::string out;
    for (auto t : types) out += static_cast<char>(t);
    return out;
  }

  friend bool operator==(const Rule&, const Rule&) = default;
};

/// Minimum over all conditions of the type-dispatched relation.
inline double matching_degree(const Rule& rule, std::span<const double> x) {
  if (x.size() != rule.prototype.size())
    throw ArityError("object has " + std::to_string(x.size()) + " values, rule expects " +
                     std::to_string(rule.prototype.size()));
  double acc = 1.0;
  for (std::size_t a = 0; a < x.size(); ++a)
    acc = std::min(acc, relation(rule.types[a], rule.prototype[a], x[a]));
  return acc;
}

/// Conjunction of matching degree and rule confidence.
inline double covering_degree(const Rule& rule, std::span<const double> x,
                              TNorm cover = TNorm::lukasiewicz) {
  return apply(cover, matching_degree(rule, x), rule.confidence);
}

inline bool covers(const Rule& rule, std::span<const double> x, TNorm cover = TNorm::lukasiewicz) {
  return covering_degree(rule, x, cover) > kEpsilon;
}

/// All-SIMILAR rule built from object u; its confidence is u's membership
/// in the lower approximation of its own class.
inline Rule total_rule(const DecisionSystem& ds, std::size_t u, const ConnectiveConfig& config) {
  if (u >= ds.n_objects()) throw Error("object index out of range");
  const auto row = ds.object(u);
  return Rule{{row.begin(), row.end()},
              std::vector<ConditionType>(ds.n_attributes(), ConditionType::similar),
              ds.class_of(u),
              own_class_lower_approximation(ds, u, config),
              u};
}

/// Shortest decimal text that reads back to exactly `v`.
inline std::string shortest_text(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Decimal text with at most 6 significant digits
/// and no trailing zeros: 0.07 -> "0.07", 1.0 -> "1".
inline std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  std::string s(buf);
  if (s == "-0") s = "0";
  return s;
}

/// Human-readable rule text, conditions in attribute order:
/// "IF a2 is smaller than or similar to 0.07 AND ... THEN d is 0".
inline std::string render_rule(const Rule& rule, std::span<const std::string> attribute_names,
                               std::span<const std::string> class_labels,
                               std::string_view decision_name = "d",
                               bool show_confidence = true) {
  std::string out = "IF ";
  bool first = true;
  for (std::size_t a = 0; a < rule.types.size(); ++a) {
    const char* phrase = nullptr;
    switch (rule.types[a]) {
      case ConditionType::similar: phrase = " is similar to "; break;
      case ConditionType::dominant: phrase = " is smaller than or similar to "; break;
      case ConditionType::dominated: phrase = " is greater than or similar to "; break;
      case ConditionType::unused: continue;
    }
    if (!first) out += " AND ";
    first = false;
    out += a < attribute_names.size() ? attribute_names[a] : "a" + std::to_string(a + 1);
    out += phrase;
    out += format_value(rule.prototype[a]);
  }
  if (first) out += "(always)";
  out += " THEN ";
  out += decision_name;
  out += " is ";
  out += rule.class_index < class_labels.size() ? class_labels[rule.class_index]
                                                : std::to_string(rule.class_index);
  if (show_confidence) {
    char buf[48];
    std::snprintf(buf, sizeof buf, " (confidence %.6f)", rule.confidence);
    out += buf;
  }
  return out;
}

/// A learned model: selected rules plus everything needed to normalize and
/// label new data.
struct Ruleset {
  std::vector<Rule> rules;
  std::vector<std::string> class_labels;
  std::string decision_name = "d";
  NormalizationParams normalization;
  ConnectiveConfig connectives;
  /// Predicted when no rule covers an object (majority training class).
  std::size_t default_class = 0;

  std::size_t n_attributes() const noexcept { return normalization.size(); }
  std::size_t n_classes() const noexcept { return class_labels.size(); }

  std::vector<std::string> attribute_names() const {
    std::vector<std::string> out;
    for (const auto& a : normalization.attributes) out.push_back(a.name);
    return out;
  }

  std::string render(const Rule& rule, bool show_confidence = true) const {
    return render_rule(rule, attribute_names(), class_labels, decision_name, show_confidence);
  }

  friend bool operator==(const Ruleset&, const Ruleset&) = default;
};

}  // namespace frri
