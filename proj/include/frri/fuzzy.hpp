#pragma once

// Fuzzy connectives, per-attribute comparison relations and fuzzy-rough
// approximations.

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "frri/dataset.hpp"
#include "frri/error.hpp"
#include "frri/matrix.hpp"

namespace frri {

/// Degrees at or below this count as zero.
inline constexpr double kEpsilon = 1e-12;

enum class TNorm { minimum, lukasiewicz };
enum class Implicator { lukasiewicz, kleene_dienes };

/// Connectives used throughout learning and inference.
///
/// `tnorm` aggregates per-attribute similarities into the relation used for
/// rule confidence, `implicator` drives the lower approximation, and
/// `cover_tnorm` conjoins a rule's matching degree with its confidence.
/// Matching itself is always the minimum over conditions.
struct ConnectiveConfig {
  TNorm tnorm = TNorm::minimum;
  Implicator implicator = Implicator::lukasiewicz;
  TNorm cover_tnorm = TNorm::lukasiewicz;

  friend bool operator==(const ConnectiveConfig&, const ConnectiveConfig&) = default;
};

constexpr double apply(TNorm t, double x, double y) noexcept {
  switch (t) {
    case TNorm::lukasiewicz:
      // (hi - 1) is exact, so T(1, y) == y and T(x, y) <= min(x, y) hold bit-for-bit.
      return std::max(0.0, (std::max(x, y) - 1.0) + std::min(x, y));
    case TNorm::minimum:
    default:
      return std::min(x, y);
  }
}

constexpr double apply(Implicator i, double x, double y) noexcept {
  switch (i) {
    case Implicator::kleene_dienes:
      return std::max(1.0 - x, y);
    case Implicator::lukasiewicz:
    default:
      return std::min(1.0, (1.0 - x) + y);
  }
}

inline std::string_view to_string(TNorm t) {
  return t == TNorm::minimum ? "min" : "luk";
}
inline std::string_view to_string(Implicator i) {
  return i == Implicator::lukasiewicz ? "luk" : "kd";
}

inline TNorm parse_tnorm(std::string_view s) {
  if (s == "min" || s == "minimum") return TNorm::minimum;
  if (s == "luk" || s == "lukasiewicz") return TNorm::lukasiewicz;
  throw Error("unknown t-norm '" + std::string(s) + "' (expected min or luk)");
}

inline Implicator parse_implicator(std::string_view s) {
  if (s == "luk" || s == "lukasiewicz") return Implicator::lukasiewicz;
  if (s == "kd" || s == "kleene_dienes") return Implicator::kleene_dienes;
  throw Error("unknown implicator '" + std::string(s) + "' (expected luk or kd)");
}

// Per-attribute relations on unit-scaled values. `p` is the prototype
// (rule) value, `x` the value being compared.

/// 1 - |p - x|
constexpr double similar(double p, double x) noexcept {
  return 1.0 - (p > x ? p - x : x - p);
}

/// Degree to which x is smaller than or similar to p; 1 whenever x <= p.
constexpr double dominant(double p, double x) noexcept {
  return std::min(1.0, 1.0 - (x - p));
}

/// Degree to which x is greater than or similar to p; 1 whenever x >= p.
constexpr double dominated(double p, double x) noexcept {
  return std::min(1.0, 1.0 - (p - x));
}

using FuzzySet = std::vector<double>;

/// Square matrix of relation degrees over a universe.
class RelationMatrix {
 public:
  RelationMatrix() = default;
  explicit RelationMatrix(std::size_t n, double fill = 0.0) : degrees_(n, n, fill) {}

  static RelationMatrix identity(std::size_t n) {
    RelationMatrix r(n);
    for (std::size_t i = 0; i < n; ++i) r(i, i) = 1.0;
    return r;
  }

  std::size_t size() const noexcept { return degrees_.rows(); }
  double& operator()(std::size_t u, std::size_t v) { return degrees_(u, v); }
  double operator()(std::size_t u, std::size_t v) const { return degrees_(u, v); }
  std::span<const double> row(std::size_t u) const { return degrees_.row(u); }
  std::span<double> row(std::size_t u) { return degrees_.row(u); }

 private:
  Matrix degrees_;
};

/// R_B(u, v) for one pair: the t-norm over `attributes` of similar().
inline double relation_degree(const DecisionSystem& ds, std::span<const std::size_t> attributes,
                              TNorm t, std::size_t u, std::size_t v) {
  double acc = 1.0;
  for (auto a : attributes) acc = apply(t, acc, similar(ds.value(u, a), ds.value(v, a)));
  return acc;
}

inline std::vector<std::size_t> all_attributes(const DecisionSystem& ds) {
  std::vector<std::size_t> out(ds.n_attributes());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
  return out;
}

/// Fuzzy B-indiscernibility relation, materialized densely.
inline RelationMatrix aggregate_relation(const DecisionSystem& ds,
                                         std::span<const std::size_t> attributes, TNorm t) {
  if (attributes.empty()) throw Error("attribute subset must not be empty");
  for (auto a : attributes)
    if (a >= ds.n_attributes()) throw Error("attribute index out of range");
  const std::size_t n = ds.n_objects();
  RelationMatrix r(n);
  for (std::size_t u = 0; u < n; ++u) {
    r(u, u) = 1.0;
    for (std::size_t v = u + 1; v < n; ++v) r(u, v) = r(v, u) = relation_degree(ds, attributes, t, u, v);
  }
  return r;
}

/// min over v of I(R(u, v), A(v)).
inline FuzzySet lower_approximation(const FuzzySet& set, const RelationMatrix& r, Implicator i) {
  if (set.size() != r.size()) throw Error("fuzzy set and relation sizes differ");
  FuzzySet out(set.size(), 1.0);
  for (std::size_t u = 0; u < set.size(); ++u) {
    const auto row = r.row(u);
    double acc = 1.0;
    for (std::size_t v = 0; v < set.size(); ++v) acc = std::min(acc, apply(i, row[v], set[v]));
    out[u] = acc;
  }
  return out;
}

/// max over v of T(R(u, v), A(v)).
inline FuzzySet upper_approximation(const FuzzySet& set, const RelationMatrix& r, TNorm t) {
  if (set.size() != r.size()) throw Error("fuzzy set and relation sizes differ");
  FuzzySet out(set.size(), 0.0);
  for (std::size_t u = 0; u < set.size(); ++u) {
    const auto row = r.row(u);
    double acc = 0.0;
    for (std::size_t v = 0; v < set.size(); ++v) acc = std::max(acc, apply(t, row[v], set[v]));
    out[u] = acc;
  }
  return out;
}

/// Crisp indicator set of decision class `c`.
inline FuzzySet class_set(const DecisionSystem& ds, std::size_t c) {
  FuzzySet out(ds.n_objects());
  for (std::size_t u = 0; u < out.size(); ++u) out[u] = ds.class_of(u) == c ? 1.0 : 0.0;
  return out;
}

/// Union (pointwise max) of the lower approximations of every class.
inline FuzzySet positive_region(const DecisionSystem& ds, std::span<const std::size_t> attributes,
                                const ConnectiveConfig& config) {
  const auto r = aggregate_relation(ds, attributes, config.tnorm);
  FuzzySet out(ds.n_objects(), 0.0);
  for (std::size_t c = 0; c < ds.n_classes(); ++c) {
    const auto lower = lower_approximation(class_set(ds, c), r, config.implicator);
    for (std::size_t u = 0; u < out.size(); ++u) out[u] = std::max(out[u], lower[u]);
  }
  return out;
}

/// Membership of `u` in the lower approximation of its own class under the
/// full-attribute relation, computed from row u alone.
inline double own_class_lower_approximation(const DecisionSystem& ds, std::size_t u,
                                            const ConnectiveConfig& config) {
  const auto attributes = all_attributes(ds);
  double acc = 1.0;
  for (std::size_t v = 0; v < ds.n_objects(); ++v) {
    const double member = ds.class_of(v) == ds.class_of(u) ? 1.0 : 0.0;
    const double r = v == u ? 1.0 : relation_degree(ds, attributes, config.tnorm, u, v);
    acc = std::min(acc, apply(config.implicator, r, member));
  }
  return acc;
}

}  // namespace frri
