#pragma once

// Minimum-cardinality set cover. solve_exact is a depth-first
// branch-and-bound seeded with the greedy cover; among all covers of
// minimum size it returns the lexicographically smallest sorted index
// vector, so results do not depend on search order.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "frri/error.hpp"

namespace frri {

/// Instance over elements 0..n_elements-1. A set's candidate index is its
/// position in `sets`.
struct CoverInstance {
  std::size_t n_elements = 0;
  std::vector<std::vector<std::size_t>> sets;
};

struct CoverSolution {
  std::vector<std::size_t> chosen;  // sorted candidate indices
  bool optimal = false;
  std::uint64_t nodes_explored = 0;
  bool budget_exhausted = false;
};

struct SolverOptions {
  std::uint64_t node_budget = 10'000'000;
};

class InfeasibleCover : public Error {
 public:
  explicit InfeasibleCover(std::size_t element)
      : Error("element " + std::to_string(element) + " is not contained in any set"),
        element_(element) {}
  std::size_t element() const noexcept { return element_; }

 private:
  std::size_t element_;
};

namespace detail {

class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  static Bitset full(std::size_t n) {
    Bitset b(n);
    for (std::size_t i = 0; i < n; ++i) b.set(i);
    return b;
  }

  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1; }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool none() const {
    return std::all_of(words_.begin(), words_.end(), [](auto w) { return w == 0; });
  }
  std::size_t count_and(const Bitset& o) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
      c += static_cast<std::size_t>(std::popcount(words_[i] & o.words_[i]));
    return c;
  }
  void subtract(const Bitset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
  }
  /// Index of the first set bit, or size() if none.
  std::size_t first() const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i]) return i * 64 + static_cast<std::size_t>(std::countr_zero(words_[i]));
    return n_;
  }
  std::size_t next(std::size_t after) const {
    std::size_t i = after + 1;
    if (i >= n_) return n_;
    std::size_t w = i / 64;
    std::uint64_t bits = words_[w] & (~std::uint64_t{0} << (i % 64));
    for (;;) {
      if (bits) return w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
      if (++w == words_.size()) return n_;
      bits = words_[w];
    }
  }
  void subtract_bit(std::size_t i) { words_[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }
  void intersect(const Bitset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
  }
  bool is_subset_of(const Bitset& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }
  std::size_t size() const noexcept { return n_; }

  friend bool operator==(const Bitset&, const Bitset&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

struct BudgetExhausted {};

class CoverSearch {
 public:
  CoverSearch(const CoverInstance& instance, std::uint64_t budget)
      : budget_(budget), excluded_(instance.sets.size(), 0), active_(instance.sets.size(), 0) {
    const std::size_t n = instance.n_elements, m = instance.sets.size();
    std::vector<Bitset> columns(n, Bitset(m));
    for (std::size_t s = 0; s < m; ++s) {
      Bitset b(n);
      for (auto e : instance.sets[s]) {
        b.set(e);
        columns[e].set(s);
      }
      sets_.push_back(std::move(b));
    }

    // Element e2 is implied by e1 when every set holding e1 also holds e2.
    live_ = Bitset::full(n);
    for (std::size_t e2 = 0; e2 < n; ++e2)
      for (std::size_t e1 = 0; e1 < n; ++e1) {
        if (e1 == e2 || !live_.test(e1) || !columns[e1].is_subset_of(columns[e2])) continue;
        if (e1 < e2 || !(columns[e1] == columns[e2])) {
          live_.subtract_bit(e2);
          break;
        }
      }
    containing_.resize(n);
    for (std::size_t s = 0; s < m; ++s) {
      sets_[s].intersect(live_);
      for (std::size_t e = sets_[s].first(); e < n; e = sets_[s].next(e)) containing_[e].push_back(s);
    }

    // Set s is redundant in a search over indices >= k when a superset with
    // index >= k exists (an identical set counts only if its index is lower).
    strict_dominator_.assign(m, -1);
    equal_predecessor_.assign(m, -1);
    for (std::size_t s = 0; s < m; ++s)
      for (std::size_t t = 0; t < m; ++t) {
        if (t == s || !sets_[s].is_subset_of(sets_[t])) continue;
        if (sets_[s] == sets_[t]) {
          if (t < s) equal_predecessor_[s] = static_cast<std::ptrdiff_t>(t);
        } else {
          strict_dominator_[s] = std::max(strict_dominator_[s], static_cast<std::ptrdiff_t>(t));
        }
      }
  }

  const Bitset& set(std::size_t s) const { return sets_[s]; }
  /// Elements that still need covering after implied ones are dropped.
  const Bitset& live() const { return live_; }
  std::size_t n_sets() const { return sets_.size(); }
  std::uint64_t nodes() const { return nodes_; }

  /// Searches for a cover of `uncovered` with at most `limit` sets drawn
  /// from indices >= `min_index`. On success the chosen sets are appended to
  /// `out`.
  bool find(const Bitset& uncovered, std::size_t limit, std::size_t min_index,
            std::vector<std::size_t>& out) {
    const auto k = static_cast<std::ptrdiff_t>(min_index);
    for (std::size_t s = 0; s < sets_.size(); ++s)
      active_[s] = s >= min_index && strict_dominator_[s] < k && equal_predecessor_[s] < k && !sets_[s].none();
    Bitset target = uncovered;
    target.intersect(live_);
    return search(target, limit, out);
  }

 private:
  bool allowed(std::size_t s) const { return active_[s] && !excluded_[s]; }

  bool search(const Bitset& uncovered, std::size_t limit, std::vector<std::size_t>& out) {
    if (++nodes_ > budget_) throw BudgetExhausted{};
    const std::size_t remaining = uncovered.count();
    if (remaining == 0) return true;
    if (limit == 0) return false;

    // Bound 1: the `limit` largest gains together must reach `remaining`.
    gains_.assign(sets_.size(), 0);
    std::vector<std::size_t> positive;
    for (std::size_t s = 0; s < sets_.size(); ++s)
      if (allowed(s)) {
        gains_[s] = sets_[s].count_and(uncovered);
        if (gains_[s]) positive.push_back(gains_[s]);
      }
    if (positive.empty()) return false;
    const std::size_t take = std::min(limit, positive.size());
    std::partial_sort(positive.begin(), positive.begin() + static_cast<std::ptrdiff_t>(take),
                      positive.end(), std::greater<>());
    std::size_t reach = 0;
    for (std::size_t i = 0; i < take; ++i) reach += positive[i];
    if (reach < remaining) return false;

    // Bound 2: every chosen set pays at most 1 in total when each element
    // is charged 1 / (largest gain among the sets holding it).
    // Also picks the branching element: the one with the fewest sets.
    double fractional = 0.0;
    std::size_t pivot = uncovered.size(), fewest = SIZE_MAX;
    for (std::size_t e = uncovered.first(); e < uncovered.size(); e = uncovered.next(e)) {
      std::size_t best = 0, k = 0;
      for (auto s : containing_[e])
        if (allowed(s)) {
          best = std::max(best, gains_[s]);
          ++k;
        }
      if (k == 0) return false;
      fractional += 1.0 / static_cast<double>(best);
      if (k < fewest) {
        fewest = k;
        pivot = e;
      }
    }
    if (fractional > static_cast<double>(limit) + 1e-9) return false;

    std::vector<std::pair<std::size_t, std::size_t>> branches;  // (gain, set)
    for (auto s : containing_[pivot])
      if (allowed(s)) branches.emplace_back(gains_[s], s);
    std::sort(branches.begin(), branches.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });

    // Child j excludes the sets of children 0..j-1, so the subtrees are disjoint.
    std::vector<std::size_t> newly_excluded;
    bool found = false;
    for (const auto& [gain, s] : branches) {
      Bitset rest = uncovered;
      rest.subtract(sets_[s]);
      out.push_back(s);
      if (search(rest, limit - 1, out)) {
        found = true;
        break;
      }
      out.pop_back();
      excluded_[s] = 1;
      newly_excluded.push_back(s);
    }
    for (auto s : newly_excluded) excluded_[s] = 0;
    return found;
  }

  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  std::vector<Bitset> sets_;
  Bitset live_;
  std::vector<std::vector<std::size_t>> containing_;
  std::vector<std::ptrdiff_t> strict_dominator_;
  std::vector<std::ptrdiff_t> equal_predecessor_;
  std::vector<char> excluded_;
  std::vector<char> active_;
  std::vector<std::size_t> gains_;
};

inline void check_feasible(const CoverInstance& instance) {
  std::vector<char> seen(instance.n_elements, 0);
  for (const auto& s : instance.sets)
    for (auto e : s) {
      if (e >= instance.n_elements)
        throw Error("set element " + std::to_string(e) + " out of range");
      seen[e] = 1;
    }
  for (std::size_t e = 0; e < seen.size(); ++e)
    if (!seen[e]) throw InfeasibleCover(e);
}

inline std::size_t trivial_lower_bound(const CoverInstance& instance) {
  if (instance.n_elements == 0) return 0;
  std::size_t largest = 0;
  for (const auto& s : instance.sets) {
    auto copy = s;
    std::sort(copy.begin(), copy.end());
    largest = std::max<std::size_t>(
        largest, static_cast<std::size_t>(std::unique(copy.begin(), copy.end()) - copy.begin()));
  }
  return (instance.n_elements + largest - 1) / largest;
}

}  // namespace detail

/// True when the union of the chosen sets contains every element.
inline bool is_cover(const CoverInstance& instance, std::span<const std::size_t> chosen) {
  std::vector<char> seen(instance.n_elements, 0);
  for (auto s : chosen) {
    if (s >= instance.sets.size()) return false;
    for (auto e : instance.sets[s]) seen[e] = 1;
  }
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

namespace detail {
inline CoverSolution checked(const CoverInstance& instance, CoverSolution solution) {
  std::sort(solution.chosen.begin(), solution.chosen.end());
  if (!is_cover(instance, solution.chosen)) throw Error("internal error: solver returned a non-cover");
  return solution;
}
}  // namespace detail

/// Repeatedly takes the set covering the most uncovered elements, lowest
/// index on ties.
inline CoverSolution solve_greedy(const CoverInstance& instance) {
  detail::check_feasible(instance);
  std::vector<detail::Bitset> sets;
  for (const auto& members : instance.sets) {
    detail::Bitset b(instance.n_elements);
    for (auto e : members) b.set(e);
    sets.push_back(std::move(b));
  }
  auto uncovered = detail::Bitset::full(instance.n_elements);
  CoverSolution solution;
  while (!uncovered.none()) {
    std::size_t best = 0, best_gain = 0;
    for (std::size_t s = 0; s < sets.size(); ++s) {
      const auto g = sets[s].count_and(uncovered);
      if (g > best_gain) {
        best_gain = g;
        best = s;
      }
    }
    uncovered.subtract(sets[best]);
    solution.chosen.push_back(best);
  }
  solution.optimal = solution.chosen.size() <= detail::trivial_lower_bound(instance);
  return detail::checked(instance, std::move(solution));
}

/// Exact minimum cover, lexicographically smallest among the optima.
///
/// The first phase tightens the greedy upper bound until no smaller cover
/// exists. The second fixes the answer index by index: set i is kept when
/// some optimal cover extends the sets kept so far with i and later sets.
/// When the node budget runs out during the first phase the best cover found
/// so far is returned with `optimal = false`; running out during the second
/// keeps the (optimal-size) first-phase cover.
inline CoverSolution solve_exact(const CoverInstance& instance, const SolverOptions& options = {}) {
  const CoverSolution greedy = solve_greedy(instance);
  CoverSolution best = greedy;
  best.optimal = false;
  if (instance.n_elements == 0) {
    best.optimal = true;
    return best;
  }

  detail::CoverSearch search(instance, options.node_budget);
  const auto all = search.live();
  try {
    for (;;) {
      if (best.chosen.size() <= 1) break;
      std::vector<std::size_t> found;
      if (!search.find(all, best.chosen.size() - 1, 0, found)) break;
      best.chosen = std::move(found);
      std::sort(best.chosen.begin(), best.chosen.end());
    }
  } catch (const detail::BudgetExhausted&) {
    best.nodes_explored = search.nodes();
    best.budget_exhausted = true;
    return detail::checked(instance, std::move(best));
  }
  best.optimal = true;

  const std::size_t size = best.chosen.size();
  try {
    std::vector<std::size_t> kept;
    auto uncovered = all;
    for (std::size_t s = 0; s < search.n_sets() && !uncovered.none(); ++s) {
      if (search.set(s).count_and(uncovered) == 0) continue;
      auto rest = uncovered;
      rest.subtract(search.set(s));
      std::vector<std::size_t> witness;
      if (search.find(rest, size - kept.size() - 1, s + 1, witness)) {
        kept.push_back(s);
        uncovered = std::move(rest);
      }
    }
    best.chosen = std::move(kept);
  } catch (const detail::BudgetExhausted&) {
    best.budget_exhausted = true;
  }
  best.nodes_explored = search.nodes();
  return detail::checked(instance, std::move(best));
}

}  // namespace frri
