#pragma once

// Cross-validation harness and metrics.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "frri/dataset.hpp"
#include "frri/induction.hpp"
#include "frri/inference.hpp"

namespace frri {

/// Mean per-class recall over the classes present in `truth`.
inline double balanced_accuracy(std::span<const std::size_t> truth,
                                std::span<const std::size_t> predicted) {
  if (truth.size() != predicted.size()) throw Error("label vectors differ in length");
  if (truth.empty()) throw Error("balanced accuracy of an empty sample");
  std::size_t n_classes = 0;
  for (auto c : truth) n_classes = std::max(n_classes, c + 1);
  std::vector<std::size_t> total(n_classes, 0), correct(n_classes, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++total[truth[i]];
    if (predicted[i] == truth[i]) ++correct[truth[i]];
  }
  double sum = 0.0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < n_classes; ++c)
    if (total[c]) {
      sum += static_cast<double>(correct[c]) / static_cast<double>(total[c]);
      ++present;
    }
  return sum / static_cast<double>(present);
}

/// Largest class size over smallest (non-empty) class size.
inline double imbalance_ratio(std::span<const std::size_t> class_of) {
  std::size_t n_classes = 0;
  for (auto c : class_of) n_classes = std::max(n_classes, c + 1);
  std::vector<std::size_t> counts(n_classes, 0);
  for (auto c : class_of) ++counts[c];
  std::size_t lo = SIZE_MAX, hi = 0;
  for (auto k : counts)
    if (k) {
      lo = std::min(lo, k);
      hi = std::max(hi, k);
    }
  if (hi == 0) throw Error("imbalance ratio of an empty sample");
  return static_cast<double>(hi) / static_cast<double>(lo);
}

struct LengthStats {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

inline LengthStats length_stats(std::span<const std::size_t> lengths) {
  LengthStats s;
  if (lengths.empty()) return s;
  for (auto l : lengths) s.mean += static_cast<double>(l);
  s.mean /= static_cast<double>(lengths.size());
  double ss = 0.0;
  for (auto l : lengths) ss += (static_cast<double>(l) - s.mean) * (static_cast<double>(l) - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(lengths.size()));
  return s;
}

struct FoldRecord {
  std::size_t fold = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double balanced_accuracy = 0.0;
  std::size_t n_rules = 0;
  std::vector<std::size_t> rule_lengths;
  double mean_rule_length = 0.0;
  double std_rule_length = 0.0;
  bool solver_optimal = false;
  bool budget_exhausted = false;
  double fit_seconds = 0.0;
  double predict_seconds = 0.0;
};

struct CVOptions {
  std::size_t k = 10;
  std::uint64_t seed = 0;
  FitOptions fit;
  unsigned fold_threads = 1;
};

struct CVReport {
  std::string dataset;
  std::size_t n_objects = 0;
  std::size_t n_attributes = 0;
  std::size_t n_classes = 0;
  double imbalance_ratio = 1.0;
  CVOptions options;
  std::vector<FoldRecord> folds;
  std::vector<std::string> warnings;

  // Aggregates: accuracy and ruleset size are means over folds; rule-length
  // statistics pool every rule of every fold.
  double balanced_accuracy = 0.0;
  double n_rules = 0.0;
  double mean_rule_length = 0.0;
  double std_rule_length = 0.0;
  bool all_optimal = true;
};

/// k-fold stratified cross-validation. Normalization and rules of each fold
/// depend on that fold's training part only.
inline CVReport cross_validate(const RawTable& raw, const std::string& dataset_name,
                               const CVOptions& options) {
  using clock = std::chrono::steady_clock;
  const auto labels = label_table(raw.labels);
  std::vector<std::size_t> class_of;
  for (const auto& l : raw.labels)
    class_of.push_back(static_cast<std::size_t>(std::find(labels.begin(), labels.end(), l) - labels.begin()));

  CVReport report;
  report.dataset = dataset_name;
  report.n_objects = raw.n_objects();
  report.n_attributes = raw.n_attributes();
  report.n_classes = labels.size();
  report.imbalance_ratio = imbalance_ratio(class_of);
  report.options = options;

  const auto split = stratified_folds(class_of, options.k, options.seed);
  report.warnings = split.warnings;
  report.folds.resize(options.k);
  std::vector<std::vector<std::string>> fold_warnings(options.k);

  detail::parallel_for(options.k, options.fold_threads, [&](std::size_t f) {
    auto& rec = report.folds[f];
    rec.fold = f;
    const auto train_idx = split.train_indices(f);
    const auto test_idx = split.test_indices(f);
    rec.n_train = train_idx.size();
    rec.n_test = test_idx.size();
    if (train_idx.empty() || test_idx.empty()) {
      fold_warnings[f].push_back("fold " + std::to_string(f) + " is empty; skipped");
      return;
    }
    const auto train = raw.select_rows(train_idx);
    const auto params = fit_normalizer(train);
    const auto ds = make_decision_system(train, params, labels);

    const auto t0 = clock::now();
    const auto fitted = fit(ds, options.fit);
    const auto t1 = clock::now();
    std::vector<std::size_t> truth, predicted;
    for (auto i : test_idx) {
      truth.push_back(class_of[i]);
      predicted.push_back(score(fitted.ruleset, raw.values.row(i)).best_class);
    }
    const auto t2 = clock::now();

    rec.balanced_accuracy = balanced_accuracy(truth, predicted);
    rec.n_rules = fitted.ruleset.rules.size();
    for (const auto& r : fitted.ruleset.rules) rec.rule_lengths.push_back(r.length());
    const auto stats = length_stats(rec.rule_lengths);
    rec.mean_rule_length = stats.mean;
    rec.std_rule_length = stats.stddev;
    rec.solver_optimal = fitted.solver_optimal;
    rec.budget_exhausted = fitted.budget_exhausted;
    rec.fit_seconds = std::chrono::duration<double>(t1 - t0).count();
    rec.predict_seconds = std::chrono::duration<double>(t2 - t1).count();
    for (const auto& w : fitted.warnings) fold_warnings[f].push_back("fold " + std::to_string(f) + ": " + w);
  });

  std::vector<std::size_t> all_lengths;
  std::size_t used = 0;
  for (std::size_t f = 0; f < options.k; ++f) {
    const auto& rec = report.folds[f];
    report.warnings.insert(report.warnings.end(), fold_warnings[f].begin(), fold_warnings[f].end());
    if (rec.n_test == 0 || rec.n_train == 0) continue;
    ++used;
    report.balanced_accuracy += rec.balanced_accuracy;
    report.n_rules += static_cast<double>(rec.n_rules);
    report.all_optimal = report.all_optimal && rec.solver_optimal;
    all_lengths.insert(all_lengths.end(), rec.rule_lengths.begin(), rec.rule_lengths.end());
  }
  if (used) {
    report.balanced_accuracy /= static_cast<double>(used);
    report.n_rules /= static_cast<double>(used);
  }
  const auto stats = length_stats(all_lengths);
  report.mean_rule_length = stats.mean;
  report.std_rule_length = stats.stddev;
  return report;
}

/// Report CSV. Timing columns hold "NA" unless `with_timing` is set, so
/// reports without timing are byte-identical across runs.
inline void write_report_csv(std::ostream& out, const CVReport& report, bool with_timing = false) {
  auto seconds = [&](double s) { return with_timing ? shortest_text(s) : std::string("NA"); };
  out << "dataset,fold,balanced_accuracy,n_rules,mean_rule_length,std_rule_length,"
         "solver_optimal,fit_seconds,predict_seconds\n";
  double fit_total = 0.0, predict_total = 0.0;
  for (const auto& f : report.folds) {
    out << report.dataset << ',' << f.fold << ',' << shortest_text(f.balanced_accuracy) << ','
        << f.n_rules << ',' << shortest_text(f.mean_rule_length) << ','
        << shortest_text(f.std_rule_length) << ',' << (f.solver_optimal ? 1 : 0) << ','
        << seconds(f.fit_seconds) << ',' << seconds(f.predict_seconds) << '\n';
    fit_total += f.fit_seconds;
    predict_total += f.predict_seconds;
  }
  out << report.dataset << ",mean," << shortest_text(report.balanced_accuracy) << ','
      << shortest_text(report.n_rules) << ',' << shortest_text(report.mean_rule_length) << ','
      << shortest_text(report.std_rule_length) << ',' << (report.all_optimal ? 1 : 0) << ','
      << seconds(fit_total) << ',' << seconds(predict_total) << '\n';
}

/// One-line aggregate summary.
inline std::string summary_line(const CVReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%s: k=%zu seed=%llu balanced_accuracy=%.3f n_rules=%.1f rule_length=%.2f+-%.2f "
                "IR=%.2f optimal=%s",
                r.dataset.c_str(), r.options.k, static_cast<unsigned long long>(r.options.seed),
                r.balanced_accuracy, r.n_rules, r.mean_rule_length, r.std_rule_length,
                r.imbalance_ratio, r.all_optimal ? "yes" : "no");
  return buf;
}

}  // namespace frri
