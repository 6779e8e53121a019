#pragma once

// The learner: shorten every object's total rule, record which shortened
// rule covers which training object, and keep a minimum subset of rules
// that still covers the training set.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "frri/dataset.hpp"
#include "frri/fuzzy.hpp"
#include "frri/rules.hpp"
#include "frri/setcover.hpp"

namespace frri {

namespace detail {

/// Runs fn(i) for i in [0, n) on up to `threads` threads. Each index is
/// handled exactly once, so writes to slot i of a pre-sized output are
/// schedule-independent.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// True iff the candidate covers no object outside the class of `u` (every
/// out-of-class covering degree is at most kEpsilon).
inline bool subset_check(const Rule& candidate, const DecisionSystem& ds, std::size_t u,
                         TNorm cover = TNorm::lukasiewicz) {
  const auto cls = ds.class_of(u);
  for (std::size_t v = 0; v < ds.n_objects(); ++v) {
    if (ds.class_of(v) == cls) continue;
    if (covering_degree(candidate, ds.object(v), cover) > kEpsilon) return false;
  }
  return true;
}

/// One trial of the pruning loop.
struct PruneStep {
  std::size_t attribute;
  ConditionType trial;
  bool passed;
};
using PruneTrace = std::vector<PruneStep>;

/// Shortens a rule built from object u. Starting from all-SIMILAR, each
/// attribute in column order takes the first of UNUSED, DOMINANT, DOMINATED,
/// SIMILAR that keeps the rule clear of other classes; if none does, the
/// attribute stays SIMILAR.
///
/// `confidence` is u's own-class lower approximation membership; pass it
/// when already known.
inline Rule rule_prune(const DecisionSystem& ds, std::size_t u, const ConnectiveConfig& config,
                       std::optional<double> confidence = std::nullopt,
                       PruneTrace* trace = nullptr) {
  if (u >= ds.n_objects()) throw Error("object index out of range");
  const std::size_t m = ds.n_attributes();
  Rule rule{{ds.object(u).begin(), ds.object(u).end()},
            std::vector<ConditionType>(m, ConditionType::similar),
            ds.class_of(u),
            confidence ? *confidence : own_class_lower_approximation(ds, u, config),
            u};

  // For every out-of-class object keep the matching degree over the
  // attributes already fixed (prefix) and over the still-SIMILAR tail
  // (suffix[j] = min over attributes >= j).
  std::vector<std::size_t> others;
  for (std::size_t v = 0; v < ds.n_objects(); ++v)
    if (ds.class_of(v) != rule.class_index) others.push_back(v);
  const std::size_t k = others.size();
  std::vector<double> suffix((m + 1) * k, 1.0);
  for (std::size_t j = m; j-- > 0;)
    for (std::size_t i = 0; i < k; ++i)
      suffix[j * k + i] = std::min(suffix[(j + 1) * k + i],
                                   similar(rule.prototype[j], ds.value(others[i], j)));
  std::vector<double> prefix(k, 1.0);

  for (std::size_t a = 0; a < m; ++a) {
    const double p = rule.prototype[a];
    bool accepted = false;
    for (auto trial : kPruneOrder) {
      bool passed = true;
      for (std::size_t i = 0; i < k && passed; ++i) {
        const double match = std::min({prefix[i], relation(trial, p, ds.value(others[i], a)),
                                       suffix[(a + 1) * k + i]});
        passed = apply(config.cover_tnorm, match, rule.confidence) <= kEpsilon;
      }
      if (trace) trace->push_back({a, trial, passed});
      if (passed) {
        rule.types[a] = trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) rule.types[a] = ConditionType::similar;
    for (std::size_t i = 0; i < k; ++i)
      prefix[i] = std::min(prefix[i], relation(rule.types[a], p, ds.value(others[i], a)));
  }
  return rule;
}

/// z[u][v] = 1 iff rule u covers object v.
class CoverMatrix {
 public:
  CoverMatrix() = default;
  explicit CoverMatrix(std::size_t n) : n_(n), z_(n * n, 0) {}

  std::size_t size() const noexcept { return n_; }
  bool operator()(std::size_t u, std::size_t v) const { return z_[u * n_ + v] != 0; }
  void set(std::size_t u, std::size_t v, bool value) { z_[u * n_ + v] = value ? 1 : 0; }

  std::vector<std::size_t> covered_by(std::size_t u) const {
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < n_; ++v)
      if ((*this)(u, v)) out.push_back(v);
    return out;
  }

  friend bool operator==(const CoverMatrix&, const CoverMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<unsigned char> z_;
};

inline CoverMatrix build_cover_matrix(const DecisionSystem& ds, std::span<const Rule> rules,
                                      TNorm cover = TNorm::lukasiewicz, unsigned threads = 1) {
  if (rules.size() != ds.n_objects()) throw Error("need exactly one rule per object");
  CoverMatrix z(rules.size());
  detail::parallel_for(rules.size(), threads, [&](std::size_t u) {
    for (std::size_t v = 0; v < ds.n_objects(); ++v) z.set(u, v, covers(rules[u], ds.object(v), cover));
  });
  return z;
}

enum class SolverMode { exact, greedy };

inline SolverMode parse_solver_mode(std::string_view s) {
  if (s == "exact") return SolverMode::exact;
  if (s == "greedy") return SolverMode::greedy;
  throw Error("unknown solver '" + std::string(s) + "' (expected exact or greedy)");
}
inline std::string_view to_string(SolverMode s) { return s == SolverMode::exact ? "exact" : "greedy"; }

struct FitOptions {
  ConnectiveConfig connectives;
  SolverMode solver = SolverMode::exact;
  std::uint64_t node_budget = 10'000'000;
  unsigned threads = 1;
};

struct FitResult {
  Ruleset ruleset;
  std::vector<Rule> pruned;  // one per training object
  CoverMatrix cover;
  bool solver_optimal = false;
  /// The exact solver ran out of budget and its best-known cover was used.
  bool budget_exhausted = false;
  std::uint64_t solver_nodes = 0;
  std::vector<std::string> warnings;
};

/// Majority class, lowest index on ties.
inline std::size_t majority_class(const DecisionSystem& ds) {
  const auto counts = ds.class_counts();
  return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

inline FitResult fit(const DecisionSystem& ds, const FitOptions& options = {}) {
  const std::size_t n = ds.n_objects();
  const auto& config = options.connectives;
  FitResult result;

  std::vector<double> confidence(n);
  detail::parallel_for(n, options.threads, [&](std::size_t u) {
    confidence[u] = own_class_lower_approximation(ds, u, config);
  });
  result.pruned.resize(n);
  detail::parallel_for(n, options.threads, [&](std::size_t u) {
    result.pruned[u] = rule_prune(ds, u, config, confidence[u]);
  });
  result.cover = build_cover_matrix(ds, result.pruned, config.cover_tnorm, options.threads);

  // Objects whose own rule has no confidence cover nothing; they leave both
  // the candidate pool and the constraint set.
  std::vector<std::size_t> candidates, element_of(n, SIZE_MAX);
  std::size_t n_elements = 0;
  for (std::size_t u = 0; u < n; ++u) {
    if (confidence[u] > kEpsilon) {
      candidates.push_back(u);
      element_of[u] = n_elements++;
    } else {
      result.warnings.push_back("object " + std::to_string(u) +
                                " has zero confidence; its rule and coverage constraint are dropped");
    }
  }
  CoverInstance instance{n_elements, {}};
  for (auto u : candidates) {
    std::vector<std::size_t> set;
    for (std::size_t v = 0; v < n; ++v)
      if (element_of[v] != SIZE_MAX && result.cover(u, v)) set.push_back(element_of[v]);
    instance.sets.push_back(std::move(set));
  }

  CoverSolution solution;
  if (options.solver == SolverMode::exact) {
    solution = solve_exact(instance, SolverOptions{options.node_budget});
    if (solution.budget_exhausted)
      result.warnings.push_back("node budget exhausted; using best cover found (" +
                                std::string(solution.optimal ? "size proven optimal" : "not proven optimal") +
                                ")");
  } else {
    solution = solve_greedy(instance);
  }
  result.solver_optimal = solution.optimal;
  result.budget_exhausted = solution.budget_exhausted;
  result.solver_nodes = solution.nodes_explored;

  auto& rs = result.ruleset;
  for (auto index : solution.chosen) rs.rules.push_back(result.pruned[candidates[index]]);
  rs.class_labels = ds.class_labels();
  rs.decision_name = ds.decision_name();
  rs.normalization = ds.normalization();
  rs.connectives = config;
  rs.default_class = majority_class(ds);
  return result;
}

}  // namespace frri
