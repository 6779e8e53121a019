#pragma once

#include <algorithm>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "frri/dataset.hpp"
#include "frri/error.hpp"
#include "frri/rules.hpp"

namespace frri {

struct ClassScores {
  std::vector<double> scores;  // one per class
  std::size_t best_class = 0;
  bool fallback_used = false;
};

/// Scores an already normalized object: per class, the largest covering
/// degree among rules of that class. Ties go to the lowest class index; if
/// nothing covers the object the ruleset's default class is returned.
inline ClassScores score_normalized(const Ruleset& rs, std::span<const double> x) {
  if (x.size() != rs.n_attributes())
    throw ArityError("object has " + std::to_string(x.size()) + " values, model expects " +
                     std::to_string(rs.n_attributes()));
  ClassScores out;
  out.scores.assign(rs.n_classes(), 0.0);
  for (const auto& rule : rs.rules) {
    auto& s = out.scores[rule.class_index];
    s = std::max(s, covering_degree(rule, x, rs.connectives.cover_tnorm));
  }
  out.best_class = 0;
  for (std::size_t c = 1; c < out.scores.size(); ++c)
    if (out.scores[c] > out.scores[out.best_class]) out.best_class = c;
  if (out.scores.empty() || out.scores[out.best_class] <= kEpsilon) {
    out.fallback_used = true;
    out.best_class = rs.default_class;
  }
  return out;
}

/// Normalizes (and clips) raw values with the model's parameters, then scores.
inline ClassScores score(const Ruleset& rs, std::span<const double> raw) {
  return score_normalized(rs, apply_normalizer(raw, rs.normalization));
}

inline std::vector<ClassScores> score_batch(const Ruleset& rs, const Matrix& raw) {
  std::vector<ClassScores> out;
  out.reserve(raw.rows());
  for (std::size_t r = 0; r < raw.rows(); ++r) {
    try {
      out.push_back(score(rs, raw.row(r)));
    } catch (const ArityError& e) {
      throw ArityError("row " + std::to_string(r) + ": " + e.what());
    }
  }
  return out;
}

/// Original label text for every row.
inline std::vector<std::string> predict_batch(const Ruleset& rs, const Matrix& raw) {
  std::vector<std::string> out;
  for (const auto& s : score_batch(rs, raw)) out.push_back(rs.class_labels.at(s.best_class));
  return out;
}

/// CSV with columns row_index, predicted_label, score_<label>...
inline void write_predictions_csv(std::ostream& out, const Ruleset& rs,
                                  std::span<const ClassScores> scores) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  out << "row_index,predicted_label";
  for (const auto& label : rs.class_labels) out << ',' << quote("score_" + label);
  out << '\n';
  for (std::size_t r = 0; r < scores.size(); ++r) {
    out << r << ',' << quote(rs.class_labels.at(scores[r].best_class));
    for (double s : scores[r].scores) out << ',' << shortest_text(s);
    out << '\n';
  }
}

}  // namespace frri
