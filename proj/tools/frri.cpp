// Command-line front end: fit, predict, eval, explain.
//
// Exit codes: 0 success, 1 usage error, 2 data or model error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "frri/frri.hpp"

namespace {

struct FitFlags {
  std::string format;
  std::string decision;
  std::string tnorm = "min";
  std::string implicator = "luk";
  std::string cover_tnorm = "luk";
  std::string solver = "exact";
  std::uint64_t node_budget = 10'000'000;
  unsigned threads = 1;
};

void add_fit_flags(CLI::App* cmd, FitFlags& f) {
  cmd->add_option("--format", f.format, "Input format (csv|keel); inferred from extension by default")
      ->check(CLI::IsMember({"csv", "keel"}));
  cmd->add_option("--decision", f.decision, "Decision column name or 0-based index");
  cmd->add_option("--tnorm", f.tnorm, "T-norm aggregating attribute similarities")
      ->check(CLI::IsMember({"min", "luk"}))
      ->capture_default_str();
  cmd->add_option("--implicator", f.implicator, "Implicator of the lower approximation")
      ->check(CLI::IsMember({"luk", "kd"}))
      ->capture_default_str();
  cmd->add_option("--cover-tnorm", f.cover_tnorm, "T-norm joining matching degree and confidence")
      ->check(CLI::IsMember({"min", "luk"}))
      ->capture_default_str();
  cmd->add_option("--solver", f.solver, "Rule selection solver")
      ->check(CLI::IsMember({"exact", "greedy"}))
      ->capture_default_str();
  cmd->add_option("--node-budget", f.node_budget, "Branch-and-bound node budget")->capture_default_str();
  cmd->add_option("--threads", f.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
}

std::optional<frri::TableFormat> table_format(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return frri::parse_table_format(s);
}

frri::FitOptions fit_options(const FitFlags& f) {
  frri::FitOptions o;
  o.connectives.tnorm = frri::parse_tnorm(f.tnorm);
  o.connectives.implicator = frri::parse_implicator(f.implicator);
  o.connectives.cover_tnorm = frri::parse_tnorm(f.cover_tnorm);
  o.solver = frri::parse_solver_mode(f.solver);
  o.node_budget = f.node_budget;
  o.threads = f.threads;
  return o;
}

std::string base_name(const std::string& path) {
  auto name = path.substr(path.find_last_of("/\\") + 1);
  const auto dot = name.find_last_of('.');
  return dot == std::string::npos || dot == 0 ? name : name.substr(0, dot);
}

void print_rules(const frri::Ruleset& rs) {
  std::map<std::size_t, std::size_t> per_class;
  std::vector<std::size_t> lengths;
  for (std::size_t i = 0; i < rs.rules.size(); ++i) {
    const auto& r = rs.rules[i];
    std::cout << "rule " << i + 1;
    if (r.source_index) std::cout << " (object " << *r.source_index + 1 << ")";
    std::cout << ": " << rs.render(r) << '\n';
    ++per_class[r.class_index];
    lengths.push_back(r.length());
  }
  const auto stats = frri::length_stats(lengths);
  std::printf("%zu rules, mean length %.2f (sd %.2f)\n", rs.rules.size(), stats.mean, stats.stddev);
  for (std::size_t c = 0; c < rs.n_classes(); ++c)
    std::cout << "  " << rs.decision_name << " = " << rs.class_labels[c] << ": " << per_class[c]
              << " rules\n";
  std::cout << "connectives: tnorm=" << frri::to_string(rs.connectives.tnorm)
            << " implicator=" << frri::to_string(rs.connectives.implicator)
            << " cover_tnorm=" << frri::to_string(rs.connectives.cover_tnorm) << '\n';
  std::cout << "default class: " << rs.class_labels.at(rs.default_class) << '\n';
}

int run_fit(const std::string& train, const std::string& out, const FitFlags& flags) {
  const auto raw = frri::load_table_file(train, table_format(flags.format),
                                         frri::parse_column_selector(flags.decision));
  const auto ds = frri::make_decision_system(raw);
  const auto result = frri::fit(ds, fit_options(flags));
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  frri::save_ruleset(result.ruleset, out);
  std::cout << "fitted " << result.ruleset.rules.size() << " rules from " << ds.n_objects()
            << " objects (" << (result.solver_optimal ? "optimal" : "not proven optimal")
            << ", " << result.solver_nodes << " nodes); model written to " << out << '\n';
  return 0;
}

int run_predict(const std::string& model, const std::string& data, const std::string& out,
                const std::string& format) {
  const auto rs = frri::load_ruleset(model);
  const auto table = frri::read_text_file(data, table_format(format));
  const auto names = rs.attribute_names();
  const auto raw = frri::to_feature_matrix(table, names);
  const auto scores = frri::score_batch(rs, raw);
  std::ofstream file(out, std::ios::binary);
  if (!file) throw frri::Error("cannot write '" + out + "'");
  frri::write_predictions_csv(file, rs, scores);
  std::size_t fallback = 0;
  for (const auto& s : scores) fallback += s.fallback_used ? 1 : 0;
  std::cout << "predicted " << scores.size() << " rows (" << fallback
            << " uncovered, default class used); written to " << out << '\n';
  return 0;
}

int run_eval(const std::string& data, std::size_t folds, std::uint64_t seed, const std::string& report_path,
             bool timing, unsigned fold_threads, const FitFlags& flags) {
  const auto raw = frri::load_table_file(data, table_format(flags.format),
                                         frri::parse_column_selector(flags.decision));
  frri::CVOptions options;
  options.k = folds;
  options.seed = seed;
  options.fit = fit_options(flags);
  options.fold_threads = fold_threads;
  const auto report = frri::cross_validate(raw, base_name(data), options);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  std::ofstream file(report_path, std::ios::binary);
  if (!file) throw frri::Error("cannot write '" + report_path + "'");
  frri::write_report_csv(file, report, timing);
  std::cout << frri::summary_line(report) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fuzzy-rough rule induction: learn, apply and evaluate fuzzy rule models"};
  app.require_subcommand(1);

  FitFlags fit_flags, eval_flags;
  std::string train, model_out;
  auto* fit = app.add_subcommand("fit", "Learn a ruleset and write a model file");
  fit->add_option("--train", train, "Training data (CSV or KEEL .dat)")->required();
  fit->add_option("--out", model_out, "Model file to write")->required();
  add_fit_flags(fit, fit_flags);

  std::string model, data, predictions, predict_format;
  auto* predict = app.add_subcommand("predict", "Classify rows with a model");
  predict->add_option("--model", model, "Model file")->required();
  predict->add_option("--data", data, "Rows to classify")->required();
  predict->add_option("--out", predictions, "Prediction CSV to write")->required();
  predict->add_option("--format", predict_format, "Input format (csv|keel)")
      ->check(CLI::IsMember({"csv", "keel"}));

  std::string eval_data, report;
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  bool timing = false;
  unsigned fold_threads = 1;
  auto* eval = app.add_subcommand("eval", "Stratified k-fold cross-validation");
  eval->add_option("--data", eval_data, "Dataset (CSV or KEEL .dat)")->required();
  eval->add_option("--folds", folds, "Number of folds")->capture_default_str()->check(CLI::Range(2, 1000000));
  eval->add_option("--seed", seed, "Fold assignment seed")->required();
  eval->add_option("--report", report, "Report CSV to write")->required();
  eval->add_flag("--timing", timing, "Record wall-clock seconds in the report");
  eval->add_option("--fold-threads", fold_threads, "Folds processed in parallel")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  add_fit_flags(eval, eval_flags);

  std::string explain_model;
  auto* explain = app.add_subcommand("explain", "Print the rules of a model");
  explain->add_option("--model", explain_model, "Model file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*fit) return run_fit(train, model_out, fit_flags);
    if (*predict) return run_predict(model, data, predictions, predict_format);
    if (*eval) return run_eval(eval_data, folds, seed, report, timing, fold_threads, eval_flags);
    if (*explain) {
      print_rules(frri::load_ruleset(explain_model));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
