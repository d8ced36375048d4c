#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cohortsim::data {

enum class ColumnKind { kContinuous, kCategorical };

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::kContinuous;
  // Ordered category labels; the order defines the integer coding 0..M-1
  // and, for ordinal variables, the rank order used by dependence measures.
  std::vector<std::string> categories;

  bool operator==(const ColumnSchema&) const = default;
};

// Columnar container for mixed continuous/categorical data.  Continuous
// columns hold raw values; categorical columns hold the category index
// (0..M-1) stored as double.  All rows are complete: missing values are
// rejected at load time rather than imputed.
class MixedDataset {
 public:
  MixedDataset() = default;
  MixedDataset(std::vector<ColumnSchema> schema,
               std::vector<std::vector<double>> columns);

  static MixedDataset empty(std::vector<ColumnSchema> schema);

  int n_rows() const { return n_rows_; }
  int n_cols() const { return static_cast<int>(schema_.size()); }

  const std::vector<ColumnSchema>& schema() const { return schema_; }
  const ColumnSchema& schema(int c) const { return schema_.at(c); }

  // Column index by name; throws DataError when absent.
  int col_index(const std::string& name) const;

  const std::vector<double>& column(int c) const { return cols_.at(c); }
  const std::vector<double>& column(const std::string& name) const {
    return cols_.at(col_index(name));
  }

  int category_at(int row, int c) const;
  const std::string& label_at(int row, int c) const;

  // Numeric value used when this cell enters a regression: continuous cells
  // pass through; categorical cells use the label parsed as a number when
  // every label of the column is numeric, else the category index.  This
  // keeps semantically coded categories (e.g. stages "1","2","3") on their
  // natural scale.
  double regression_value(int row, int c) const;

  // Empirical category probabilities of a categorical column.
  std::vector<double> category_probs(int c) const;

  void append_row(const std::vector<double>& row);
  void add_column(ColumnSchema schema, std::vector<double> values);

  MixedDataset select(const std::vector<std::string>& names) const;

 private:
  std::vector<ColumnSchema> schema_;
  std::vector<std::vector<double>> cols_;
  std::vector<std::vector<double>> numeric_codes_;  // per categorical column
  int n_rows_ = 0;

  void rebuild_codes();
  void validate_cell(int c, double v) const;
};

// --- CSV -------------------------------------------------------------------
// Header row must match the schema names exactly (same order).  Continuous
// cells must parse as finite numbers with '.' decimal separator; categorical
// cells must match a declared label.  The first violation raises DataError
// naming the row and column.  With `drop_incomplete_rows`, rows containing
// empty cells are skipped (count reported via `dropped_rows`) instead of
// failing; malformed non-empty cells still fail — silent imputation is out
// of scope by design.
struct CsvOptions {
  bool drop_incomplete_rows = false;
  int* dropped_rows = nullptr;
};

MixedDataset load_csv(const std::filesystem::path& path,
                      const std::vector<ColumnSchema>& schema,
                      const CsvOptions& options = {});
MixedDataset parse_csv(const std::string& text,
                       const std::vector<ColumnSchema>& schema,
                       const std::string& origin,
                       const CsvOptions& options = {});
std::string to_csv(const MixedDataset& data);
void write_csv(const std::filesystem::path& path, const MixedDataset& data);

// --- schema (de)serialization ------------------------------------------------
nlohmann::json schema_to_json(const std::vector<ColumnSchema>& schema);
std::vector<ColumnSchema> schema_from_json(const nlohmann::json& j);

// --- discretization ----------------------------------------------------------
// Maps a continuous value onto one of K+1 ordered intervals given K strictly
// ascending cut points.  Closure is declared per discretizer because source
// rules mix conventions: kLeftClosed means intervals [t_k, t_{k+1}) (a value
// exactly at a cut point lands in the upper bin); kRightClosed means
// (t_k, t_{k+1}].  Labels are free-form, so inverted scales (lower raw value
// -> higher-coded modality) are expressed by the label ordering.
enum class IntervalClosure { kLeftClosed, kRightClosed };

struct ThresholdDiscretizer {
  std::vector<double> cut_points;   // strictly ascending
  std::vector<std::string> labels;  // size cut_points.size() + 1, unique
  IntervalClosure closure = IntervalClosure::kLeftClosed;
};

// Interval index (0-based, monotone in the value).
int discretize_index(double value, const ThresholdDiscretizer& d);
// Label of the containing interval.
const std::string& discretize(double value, const ThresholdDiscretizer& d);
// Column-wise convenience: returns interval indices.
std::vector<int> discretize_column(const std::vector<double>& values,
                                   const ThresholdDiscretizer& d);

}  // namespace cohortsim::data
