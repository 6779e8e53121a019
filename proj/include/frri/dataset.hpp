#pragma once

// Loading, validation, min-max normalization and fold assignment for
// numerical decision tables. Everything downstream of this header sees
// unit-range values and integer class indices only.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "frri/error.hpp"
#include "frri/matrix.hpp"

namespace frri {

enum class TableFormat { csv, keel };

inline TableFormat parse_table_format(std::string_view s) {
  if (s == "csv") return TableFormat::csv;
  if (s == "keel" || s == "dat") return TableFormat::keel;
  throw Error("unknown table format '" + std::string(s) + "' (expected csv or keel)");
}

/// `.dat` files are KEEL, everything else is read as CSV.
inline TableFormat infer_table_format(std::string_view path) {
  return path.ends_with(".dat") ? TableFormat::keel : TableFormat::csv;
}

/// Selects the decision column by header name or 0-based index. The
/// default picks the format's own choice: the last `@outputs` attribute for
/// KEEL, the last column for CSV.
using ColumnSelector = std::variant<std::monostate, std::string, std::size_t>;

/// A run of only digits is taken as an index, anything else as a name.
inline ColumnSelector parse_column_selector(std::string_view s) {
  if (s.empty()) return std::monostate{};
  if (std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    std::size_t index = 0;
    std::from_chars(s.data(), s.data() + s.size(), index);
    return index;
  }
  return std::string(s);
}

/// Untyped cells as read from a CSV or KEEL source.
struct TextTable {
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  // source line of each row, 1-based
  std::optional<std::size_t> default_decision;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::string_view strip_quotes(std::string_view s) {
  if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front())
    return s.substr(1, s.size() - 2);
  return s;
}

inline void strip_bom(std::string& line) {
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
}

/// Reads one RFC-4180 record, which may span several physical lines when a
/// quoted field holds a newline. Returns false at end of input.
inline bool read_csv_record(std::istream& in, std::vector<std::string>& fields,
                            std::size_t& line_no) {
  fields.clear();
  std::string line;
  if (!std::getline(in, line)) return false;
  ++line_no;
  if (line_no == 1) strip_bom(line);
  const std::size_t start_line = line_no;

  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (;;) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field += '"';
            ++i;
          } else {
            quoted = false;
          }
        } else {
          field += c;
        }
      } else if (c == '"' && trim(field).empty()) {
        field.clear();
        quoted = true;
        was_quoted = true;
      } else if (c == ',') {
        fields.push_back(was_quoted ? field : std::string(trim(field)));
        field.clear();
        was_quoted = false;
      } else if (c != '\r' || i + 1 != line.size()) {
        field += c;
      }
    }
    if (!quoted) break;
    if (!std::getline(in, line))
      throw ParseError(start_line, "", "unterminated quoted field");
    ++line_no;
    field += '\n';
  }
  fields.push_back(was_quoted ? field : std::string(trim(field)));
  return true;
}

inline std::vector<std::string> split_trimmed(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    const auto next = s.find(sep, pos);
    out.emplace_back(trim(s.substr(pos, next == std::string_view::npos ? next : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

inline bool is_missing(std::string_view cell) { return cell.empty() || cell == "?"; }

/// Finite real or nullopt.
inline std::optional<double> parse_real(std::string_view cell) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value))
    return std::nullopt;
  return value;
}

}  // namespace detail

/// RFC-4180 CSV with a header row.
inline TextTable read_csv(std::istream& in) {
  TextTable table;
  std::size_t line_no = 0;
  std::vector<std::string> fields;
  if (!detail::read_csv_record(in, fields, line_no))
    throw ParseError(1, "", "empty input, expected a header row");
  table.names = fields;
  for (;;) {
    const std::size_t before = line_no;
    if (!detail::read_csv_record(in, fields, line_no)) break;
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != table.names.size())
      throw ParseError(before + 1, "",
                       "expected " + std::to_string(table.names.size()) + " fields, found " +
                           std::to_string(fields.size()));
    table.rows.push_back(fields);
    table.lines.push_back(before + 1);
  }
  return table;
}

/// KEEL `.dat`: `@relation`, `@attribute`, `@inputs`, `@outputs` and `@data`
/// headers followed by comma-separated rows. Declared attribute ranges are
/// not used; normalization always works from observed values.
inline TextTable read_keel(std::istream& in) {
  TextTable table;
  std::vector<std::string> outputs;
  std::string line;
  std::size_t line_no = 0;
  bool in_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) detail::strip_bom(line);
    const std::string_view text = detail::trim(line);
    if (text.empty() || text.front() == '%') continue;
    if (!in_data && text.front() == '@') {
      const auto space = text.find_first_of(" \t");
      std::string keyword(text.substr(0, space));
      std::transform(keyword.begin(), keyword.end(), keyword.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      const std::string_view rest =
          space == std::string_view::npos ? std::string_view{} : detail::trim(text.substr(space));
      if (keyword == "@attribute") {
        std::string_view name = rest;
        if (!name.empty() && (name.front() == '\'' || name.front() == '"')) {
          const auto close = name.find(name.front(), 1);
          if (close == std::string_view::npos)
            throw ParseError(line_no, "", "unterminated attribute name");
          name = name.substr(1, close - 1);
        } else {
          name = name.substr(0, name.find_first_of(" \t{["));
        }
        if (name.empty()) throw ParseError(line_no, "", "@attribute without a name");
        table.names.emplace_back(name);
      } else if (keyword == "@outputs" || keyword == "@output") {
        outputs = detail::split_trimmed(rest, ',');
      } else if (keyword == "@data") {
        in_data = true;
      } else if (keyword != "@relation" && keyword != "@inputs" && keyword != "@input") {
        throw ParseError(line_no, "", "unknown KEEL directive '" + keyword + "'");
      }
      continue;
    }
    if (!in_data) throw ParseError(line_no, "", "data row before @data");
    auto fields = detail::split_trimmed(text, ',');
    if (fields.size() != table.names.size())
      throw ParseError(line_no, "",
                       "expected " + std::to_string(table.names.size()) + " fields, found " +
                           std::to_string(fields.size()));
    for (auto& f : fields) f = std::string(detail::strip_quotes(f));
    table.rows.push_back(std::move(fields));
    table.lines.push_back(line_no);
  }
  if (table.names.empty()) throw ParseError(line_no, "", "no @attribute declarations");
  if (!in_data) throw ParseError(line_no, "", "missing @data section");
  if (!outputs.empty() && !outputs.back().empty()) {
    const std::string out = std::string(detail::strip_quotes(outputs.back()));
    const auto it = std::find(table.names.begin(), table.names.end(), out);
    if (it == table.names.end())
      throw ParseError(line_no, out, "@outputs names an undeclared attribute");
    table.default_decision = static_cast<std::size_t>(it - table.names.begin());
  }
  return table;
}

inline TextTable read_text_table(std::istream& in, TableFormat format) {
  return format == TableFormat::keel ? read_keel(in) : read_csv(in);
}

/// Unnormalized condition values plus decision labels, row order preserved.
struct RawTable {
  std::vector<std::string> attribute_names;
  std::string decision_name;
  Matrix values;
  std::vector<std::string> labels;

  std::size_t n_objects() const noexcept { return values.rows(); }
  std::size_t n_attributes() const noexcept { return attribute_names.size(); }

  RawTable select_rows(std::span<const std::size_t> indices) const {
    RawTable out{attribute_names, decision_name, values.select_rows(indices), {}};
    out.labels.reserve(indices.size());
    for (auto i : indices) out.labels.push_back(labels[i]);
    return out;
  }
};

inline std::size_t resolve_column(const TextTable& table, const ColumnSelector& selector) {
  if (const auto* index = std::get_if<std::size_t>(&selector)) {
    if (*index >= table.names.size())
      throw Error("decision column index " + std::to_string(*index) + " out of range (" +
                  std::to_string(table.names.size()) + " columns)");
    return *index;
  }
  if (const auto* name = std::get_if<std::string>(&selector)) {
    const auto it = std::find(table.names.begin(), table.names.end(), *name);
    if (it == table.names.end()) throw Error("decision column '" + *name + "' not found");
    return static_cast<std::size_t>(it - table.names.begin());
  }
  if (table.default_decision) return *table.default_decision;
  if (table.names.empty()) throw Error("table has no columns");
  return table.names.size() - 1;
}

/// Splits a text table into real-valued condition columns and a decision
/// column. Missing values ("" or "?") are rejected.
inline RawTable to_raw_table(const TextTable& table, const ColumnSelector& decision = {}) {
  const std::size_t dcol = resolve_column(table, decision);
  if (table.names.size() < 2) throw Error("need at least one condition column and a decision");
  RawTable raw;
  raw.decision_name = table.names[dcol];
  for (std::size_t c = 0; c < table.names.size(); ++c)
    if (c != dcol) raw.attribute_names.push_back(table.names[c]);

  std::vector<double> row(raw.attribute_names.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& cells = table.rows[r];
    std::size_t out = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == dcol) continue;
      if (detail::is_missing(cells[c]))
        throw ParseError(table.lines[r], table.names[c], "missing value");
      const auto value = detail::parse_real(cells[c]);
      if (!value)
        throw ParseError(table.lines[r], table.names[c],
                         "non-numeric value '" + cells[c] + "'");
      row[out++] = *value;
    }
    if (detail::is_missing(cells[dcol]))
      throw ParseError(table.lines[r], table.names[dcol], "missing decision value");
    raw.values.append_row(row);
    raw.labels.push_back(cells[dcol]);
  }
  if (raw.values.rows() == 0) {
    raw.values = Matrix(0, raw.attribute_names.size());
  }
  return raw;
}

/// Condition values only, for prediction. Columns are picked by name when
/// every expected name appears in the header; otherwise the table must have
/// exactly `expected.size()` columns, taken positionally.
inline Matrix to_feature_matrix(const TextTable& table, std::span<const std::string> expected) {
  std::vector<std::size_t> cols;
  for (const auto& name : expected) {
    const auto it = std::find(table.names.begin(), table.names.end(), name);
    if (it == table.names.end()) break;
    cols.push_back(static_cast<std::size_t>(it - table.names.begin()));
  }
  if (cols.size() != expected.size()) {
    if (table.names.size() != expected.size())
      throw ArityError("data has " + std::to_string(table.names.size()) +
                       " columns but the model expects " + std::to_string(expected.size()) +
                       " attributes");
    cols.resize(expected.size());
    for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = i;
  }
  Matrix out(0, expected.size());
  std::vector<double> row(expected.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const auto& cell = table.rows[r][cols[i]];
      if (detail::is_missing(cell))
        throw ParseError(table.lines[r], table.names[cols[i]], "missing value");
      const auto value = detail::parse_real(cell);
      if (!value)
        throw ParseError(table.lines[r], table.names[cols[i]],
                         "non-numeric value '" + cell + "'");
      row[i] = *value;
    }
    out.append_row(row);
  }
  return out;
}

inline RawTable load_table(std::istream& in, TableFormat format,
                           const ColumnSelector& decision = {}) {
  return to_raw_table(read_text_table(in, format), decision);
}

inline TextTable read_text_file(const std::string& path, std::optional<TableFormat> format = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_text_table(in, format.value_or(infer_table_format(path)));
}

inline RawTable load_table_file(const std::string& path, std::optional<TableFormat> format = {},
                                const ColumnSelector& decision = {}) {
  return to_raw_table(read_text_file(path, format), decision);
}

// ---------------------------------------------------------------------------
// Normalization

struct AttributeMeta {
  std::string name;
  double observed_min = 0.0;
  double observed_max = 0.0;

  bool zero_range() const noexcept { return observed_min == observed_max; }
  friend bool operator==(const AttributeMeta&, const AttributeMeta&) = default;
};

/// Column-wise (min, max) captured from training data.
struct NormalizationParams {
  std::vector<AttributeMeta> attributes;

  std::size_t size() const noexcept { return attributes.size(); }

  /// Maps a raw value into [0,1]; values outside the fitted range clip to
  /// the nearest end and zero-range attributes map to 0.
  double apply(std::size_t attribute, double raw) const {
    const auto& a = attributes[attribute];
    if (a.zero_range()) return 0.0;
    if (raw <= a.observed_min) return 0.0;
    if (raw >= a.observed_max) return 1.0;
    return std::clamp((raw - a.observed_min) / (a.observed_max - a.observed_min), 0.0, 1.0);
  }

  friend bool operator==(const NormalizationParams&, const NormalizationParams&) = default;
};

inline NormalizationParams fit_normalizer(const Matrix& values,
                                          std::span<const std::string> names = {}) {
  if (values.rows() == 0) throw Error("cannot fit normalization on an empty table");
  NormalizationParams params;
  params.attributes.resize(values.cols());
  for (std::size_t c = 0; c < values.cols(); ++c) {
    auto& a = params.attributes[c];
    a.name = c < names.size() ? names[c] : "a" + std::to_string(c + 1);
    a.observed_min = a.observed_max = values(0, c);
    for (std::size_t r = 1; r < values.rows(); ++r) {
      a.observed_min = std::min(a.observed_min, values(r, c));
      a.observed_max = std::max(a.observed_max, values(r, c));
    }
  }
  return params;
}

inline NormalizationParams fit_normalizer(const RawTable& raw) {
  return fit_normalizer(raw.values, raw.attribute_names);
}

inline std::vector<double> apply_normalizer(std::span<const double> raw,
                                            const NormalizationParams& params) {
  if (raw.size() != params.size())
    throw ArityError("expected " + std::to_string(params.size()) + " attribute values, got " +
                     std::to_string(raw.size()));
  std::vector<double> out(raw.size());
  for (std::size_t c = 0; c < raw.size(); ++c) out[c] = params.apply(c, raw[c]);
  return out;
}

inline Matrix apply_normalizer(const Matrix& raw, const NormalizationParams& params) {
  if (raw.cols() != params.size() && raw.rows() > 0)
    throw ArityError("table has " + std::to_string(raw.cols()) +
                     " attribute columns but normalization expects " +
                     std::to_string(params.size()));
  Matrix out(raw.rows(), params.size());
  for (std::size_t r = 0; r < raw.rows(); ++r)
    for (std::size_t c = 0; c < params.size(); ++c) out(r, c) = params.apply(c, raw(r, c));
  return out;
}

/// Distinct labels in order of first appearance.
inline std::vector<std::string> label_table(std::span<const std::string> labels) {
  std::vector<std::string> out;
  for (const auto& l : labels)
    if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
  return out;
}

// ---------------------------------------------------------------------------

/// Normalized decision system: values in [0,1], integer classes.
/// Immutable after construction.
class DecisionSystem {
 public:
  DecisionSystem(Matrix values, std::vector<std::size_t> class_of,
                 std::vector<std::string> class_labels, NormalizationParams normalization,
                 std::string decision_name = "d")
      : values_(std::move(values)),
        class_of_(std::move(class_of)),
        class_labels_(std::move(class_labels)),
        normalization_(std::move(normalization)),
        decision_name_(std::move(decision_name)) {
    if (values_.rows() == 0) throw Error("decision system has no objects");
    if (values_.cols() == 0) throw Error("decision system has no condition attributes");
    if (class_of_.size() != values_.rows())
      throw Error("class vector length does not match object count");
    if (normalization_.size() != values_.cols())
      throw Error("normalization parameters do not match attribute count");
    for (auto v : values_.data())
      if (!(v >= 0.0 && v <= 1.0)) throw Error("decision system values must lie in [0,1]");
    for (auto c : class_of_)
      if (c >= class_labels_.size()) throw Error("class index out of range");
    for (std::size_t i = 0; i < class_labels_.size(); ++i)
      for (std::size_t j = i + 1; j < class_labels_.size(); ++j)
        if (class_labels_[i] == class_labels_[j])
          throw Error("duplicate class label '" + class_labels_[i] + "'");
  }

  std::size_t n_objects() const noexcept { return values_.rows(); }
  std::size_t n_attributes() const noexcept { return values_.cols(); }
  std::size_t n_classes() const noexcept { return class_labels_.size(); }

  const Matrix& values() const noexcept { return values_; }
  std::span<const double> object(std::size_t u) const { return values_.row(u); }
  double value(std::size_t u, std::size_t a) const { return values_(u, a); }
  std::size_t class_of(std::size_t u) const { return class_of_[u]; }
  const std::vector<std::size_t>& classes() const noexcept { return class_of_; }
  const std::vector<std::string>& class_labels() const noexcept { return class_labels_; }
  const NormalizationParams& normalization() const noexcept { return normalization_; }
  const std::string& decision_name() const noexcept { return decision_name_; }

  std::vector<std::string> attribute_names() const {
    std::vector<std::string> out;
    for (const auto& a : normalization_.attributes) out.push_back(a.name);
    return out;
  }

  std::vector<std::size_t> class_counts() const {
    std::vector<std::size_t> counts(n_classes(), 0);
    for (auto c : class_of_) ++counts[c];
    return counts;
  }

 private:
  Matrix values_;
  std::vector<std::size_t> class_of_;
  std::vector<std::string> class_labels_;
  NormalizationParams normalization_;
  std::string decision_name_;
};

/// Normalizes `raw` with `params` and indexes its labels against
/// `class_labels` (first-appearance order of `raw` itself when empty).
inline DecisionSystem make_decision_system(const RawTable& raw, const NormalizationParams& params,
                                           std::vector<std::string> class_labels = {}) {
  if (class_labels.empty()) class_labels = label_table(raw.labels);
  std::vector<std::size_t> class_of;
  class_of.reserve(raw.labels.size());
  for (const auto& l : raw.labels) {
    const auto it = std::find(class_labels.begin(), class_labels.end(), l);
    if (it == class_labels.end()) throw Error("unknown class label '" + l + "'");
    class_of.push_back(static_cast<std::size_t>(it - class_labels.begin()));
  }
  return DecisionSystem(apply_normalizer(raw.values, params), std::move(class_of),
                        std::move(class_labels), params, raw.decision_name);
}

/// Fits normalization on `raw` and applies it.
inline DecisionSystem make_decision_system(const RawTable& raw) {
  return make_decision_system(raw, fit_normalizer(raw));
}

// ---------------------------------------------------------------------------
// Folds

struct FoldSplit {
  std::vector<std::size_t> fold_of;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;

  std::vector<std::size_t> test_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
      if (fold_of[i] == fold) out.push_back(i);
    return out;
  }
  std::vector<std::size_t> train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
      if (fold_of[i] != fold) out.push_back(i);
    return out;
  }
};

namespace detail {

// Bounded draws done by hand: std::uniform_int_distribution and
// std::shuffle are implementation-defined, mt19937_64's stream is not.
inline std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do x = rng();
  while (x >= limit);
  return x % bound;
}

template <class T>
void portable_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[bounded_draw(rng, i)]);
}

}  // namespace detail

/// Stratified k-fold assignment. Objects of each class are shuffled with the
/// seeded generator and dealt round-robin; the dealing position carries over
/// from one class to the next so fold sizes stay within one of each other.
inline FoldSplit stratified_folds(std::span<const std::size_t> class_of, std::size_t k,
                                  std::uint64_t seed) {
  if (k < 2) throw Error("fold count must be at least 2");
  FoldSplit split;
  split.k = k;
  split.seed = seed;
  split.fold_of.assign(class_of.size(), 0);
  std::size_t n_classes = 0;
  for (auto c : class_of) n_classes = std::max(n_classes, c + 1);

  std::mt19937_64 rng(seed);
  std::size_t next = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < class_of.size(); ++i)
      if (class_of[i] == c) members.push_back(i);
    if (members.empty()) continue;
    if (members.size() < k)
      split.warnings.push_back("class " + std::to_string(c) + " has " +
                               std::to_string(members.size()) + " members, fewer than " +
                               std::to_string(k) + " folds");
    detail::portable_shuffle(members, rng);
    for (auto i : members) {
      split.fold_of[i] = next;
      next = (next + 1) % k;
    }
  }
  return split;
}

inline FoldSplit stratified_folds(const DecisionSystem& ds, std::size_t k, std::uint64_t seed) {
  return stratified_folds(ds.classes(), k, seed);
}

}  // namespace frri
