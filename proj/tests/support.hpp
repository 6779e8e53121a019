#pragma once

// Fixtures shared by the unit tests and the acceptance binary.

#include <random>
#include <string>
#include <vector>

#include "frri/frri.hpp"

namespace frri::testing {

inline NormalizationParams unit_params(std::size_t m) {
  NormalizationParams p;
  for (std::size_t a = 0; a < m; ++a) p.attributes.push_back({"a" + std::to_string(a + 1), 0.0, 1.0});
  return p;
}

/// Decision system over values already in [0,1]; labels are "0", "1", ...
inline DecisionSystem make_ds(const std::vector<std::vector<double>>& rows,
                              const std::vector<std::size_t>& classes) {
  const std::size_t m = rows.at(0).size();
  Matrix values(rows.size(), m);
  std::size_t n_classes = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t a = 0; a < m; ++a) values(r, a) = rows[r][a];
    n_classes = std::max(n_classes, classes[r] + 1);
  }
  std::vector<std::string> labels;
  for (std::size_t c = 0; c < n_classes; ++c) labels.push_back(std::to_string(c));
  return DecisionSystem(std::move(values), classes, std::move(labels), unit_params(m));
}

inline const std::vector<std::vector<double>>& seven_rows() {
  static const std::vector<std::vector<double>> rows{
      {0.12, 0.07, 0.00, 0.04, 0.00, 0.17, 0.45, 0.11}, {1.00, 0.88, 1.00, 0.45, 0.86, 0.52, 0.37, 1.00},
      {0.88, 0.60, 0.40, 0.62, 1.00, 0.56, 0.69, 0.56}, {0.88, 1.00, 0.45, 0.55, 0.88, 0.67, 0.10, 0.53},
      {0.00, 0.05, 0.95, 1.00, 0.24, 1.00, 1.00, 0.25}, {0.00, 0.11, 0.35, 0.60, 0.35, 0.81, 0.00, 0.00},
      {0.12, 0.00, 0.40, 0.00, 0.01, 0.00, 0.20, 0.08}};
  return rows;
}

inline DecisionSystem seven() { return make_ds(seven_rows(), {0, 1, 0, 1, 0, 0, 0}); }

/// Random decision system. Values are drawn from a coarse grid so that ties,
/// exact zeros and exact ones are common.
inline DecisionSystem random_ds(std::mt19937_64& rng, std::size_t max_objects = 30,
                                std::size_t max_attributes = 6, std::size_t max_classes = 3) {
  const std::size_t n = 2 + rng() % (max_objects - 1);
  const std::size_t m = 1 + rng() % max_attributes;
  const std::size_t k = 2 + rng() % (max_classes - 1);
  const unsigned grid = (rng() % 2) ? 10 : 1000;
  std::vector<std::vector<double>> rows(n, std::vector<double>(m));
  std::vector<std::size_t> classes(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (auto& x : rows[u]) x = static_cast<double>(rng() % (grid + 1)) / grid;
    classes[u] = u < k ? u : rng() % k;
  }
  return make_ds(rows, classes);
}

}  // namespace frri::testing
