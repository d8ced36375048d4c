#include "cohortsim/data/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "cohortsim/util/errors.hpp"
#include "cohortsim/util/io.hpp"

namespace cohortsim::data {

namespace {

bool parse_double(const std::string& text, double& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

void validate_schema(const std::vector<ColumnSchema>& schema) {
  if (schema.empty()) throw DataError("schema must declare at least one column");
  for (const auto& col : schema) {
    if (col.name.empty()) throw DataError("schema column with empty name");
    if (col.kind == ColumnKind::kCategorical) {
      if (col.categories.size() < 2) {
        throw DataError("categorical column '" + col.name +
                        "' needs at least two categories");
      }
      for (std::size_t i = 0; i < col.categories.size(); ++i) {
        for (std::size_t j = i + 1; j < col.categories.size(); ++j) {
          if (col.categories[i] == col.categories[j]) {
            throw DataError("categorical column '" + col.name +
                            "' has duplicate label '" + col.categories[i] +
                            "'");
          }
        }
      }
    } else if (!col.categories.empty()) {
      throw DataError("continuous column '" + col.name +
                      "' must not declare categories");
    }
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    for (std::size_t j = i + 1; j < schema.size(); ++j) {
      if (schema[i].name == schema[j].name) {
        throw DataError("duplicate column name '" + schema[i].name + "'");
      }
    }
  }
}

}  // namespace

MixedDataset::MixedDataset(std::vector<ColumnSchema> schema,
                           std::vector<std::vector<double>> columns)
    : schema_(std::move(schema)), cols_(std::move(columns)) {
  validate_schema(schema_);
  if (cols_.size() != schema_.size()) {
    throw DataError("dataset: column count does not match schema");
  }
  n_rows_ = cols_.empty() ? 0 : static_cast<int>(cols_[0].size());
  for (const auto& col : cols_) {
    if (static_cast<int>(col.size()) != n_rows_) {
      throw DataError("dataset: ragged columns");
    }
  }
  for (int c = 0; c < n_cols(); ++c) {
    for (double v : cols_[c]) validate_cell(c, v);
  }
  rebuild_codes();
}

MixedDataset MixedDataset::empty(std::vector<ColumnSchema> schema) {
  validate_schema(schema);
  std::vector<std::vector<double>> cols(schema.size());
  return MixedDataset(std::move(schema), std::move(cols));
}

void MixedDataset::validate_cell(int c, double v) const {
  const auto& cs = schema_[c];
  if (!std::isfinite(v)) {
    throw DataError("non-finite value in column '" + cs.name + "'");
  }
  if (cs.kind == ColumnKind::kCategorical) {
    const double r = std::round(v);
    if (r != v || r < 0 || r >= static_cast<double>(cs.categories.size())) {
      throw DataError("invalid category index in column '" + cs.name + "'");
    }
  }
}

void MixedDataset::rebuild_codes() {
  numeric_codes_.assign(schema_.size(), {});
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    const auto& cs = schema_[c];
    if (cs.kind != ColumnKind::kCategorical) continue;
    std::vector<double> codes(cs.categories.size());
    bool all_numeric = true;
    for (std::size_t m = 0; m < cs.categories.size(); ++m) {
      if (!parse_double(cs.categories[m], codes[m])) {
        all_numeric = false;
        break;
      }
    }
    if (!all_numeric) {
      for (std::size_t m = 0; m < cs.categories.size(); ++m) {
        codes[m] = static_cast<double>(m);
      }
    }
    numeric_codes_[c] = std::move(codes);
  }
}

int MixedDataset::col_index(const std::string& name) const {
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    if (schema_[c].name == name) return static_cast<int>(c);
  }
  throw DataError("no column named '" + name + "'");
}

int MixedDataset::category_at(int row, int c) const {
  if (schema_.at(c).kind != ColumnKind::kCategorical) {
    throw DataError("column '" + schema_[c].name + "' is not categorical");
  }
  return static_cast<int>(cols_[c][row]);
}

const std::string& MixedDataset::label_at(int row, int c) const {
  return schema_.at(c).categories.at(category_at(row, c));
}

double MixedDataset::regression_value(int row, int c) const {
  if (schema_.at(c).kind == ColumnKind::kContinuous) return cols_[c][row];
  return numeric_codes_[c][static_cast<std::size_t>(category_at(row, c))];
}

std::vector<double> MixedDataset::category_probs(int c) const {
  if (schema_.at(c).kind != ColumnKind::kCategorical) {
    throw DataError("column '" + schema_[c].name + "' is not categorical");
  }
  if (n_rows_ == 0) throw DataError("category_probs: empty dataset");
  std::vector<double> probs(schema_[c].categories.size(), 0.0);
  for (int r = 0; r < n_rows_; ++r) {
    probs[static_cast<std::size_t>(category_at(r, c))] += 1.0;
  }
  for (double& p : probs) p /= static_cast<double>(n_rows_);
  return probs;
}

void MixedDataset::append_row(const std::vector<double>& row) {
  if (row.size() != schema_.size()) {
    throw DataError("append_row: field count does not match schema");
  }
  for (std::size_t c = 0; c < row.size(); ++c) {
    validate_cell(static_cast<int>(c), row[c]);
  }
  for (std::size_t c = 0; c < row.size(); ++c) cols_[c].push_back(row[c]);
  ++n_rows_;
}

void MixedDataset::add_column(ColumnSchema schema,
                              std::vector<double> values) {
  if (static_cast<int>(values.size()) != n_rows_) {
    throw DataError("add_column: length mismatch");
  }
  for (const auto& existing : schema_) {
    if (existing.name == schema.name) {
      throw DataError("add_column: duplicate column name '" + schema.name +
                      "'");
    }
  }
  schema_.push_back(std::move(schema));
  cols_.push_back(std::move(values));
  validate_schema(schema_);
  for (double v : cols_.back()) validate_cell(n_cols() - 1, v);
  rebuild_codes();
}

MixedDataset MixedDataset::select(const std::vector<std::string>& names) const {
  std::vector<ColumnSchema> schema;
  std::vector<std::vector<double>> cols;
  schema.reserve(names.size());
  cols.reserve(names.size());
  for (const auto& name : names) {
    const int c = col_index(name);
    schema.push_back(schema_[c]);
    cols.push_back(cols_[c]);
  }
  return MixedDataset(std::move(schema), std::move(cols));
}

// --- CSV ---------------------------------------------------------------------

namespace {

// Splits one CSV record; supports RFC-style double-quoted fields.
std::vector<std::string> split_record(const std::string& line, int line_no,
                                      const std::string& origin) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty()) {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  if (quoted) {
    throw DataError(origin + ": unterminated quote on line " +
                    std::to_string(line_no));
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += "\"\"";
    else out.push_back(ch);
  }
  out += "\"";
  return out;
}

}  // namespace

MixedDataset parse_csv(const std::string& text,
                       const std::vector<ColumnSchema>& schema,
                       const std::string& origin, const CsvOptions& options) {
  validate_schema(schema);
  int dropped = 0;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;

  if (!std::getline(in, line)) throw DataError(origin + ": empty file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_record(line, line_no, origin);
  if (header.size() != schema.size()) {
    throw DataError(origin + ": header has " + std::to_string(header.size()) +
                    " fields, schema declares " +
                    std::to_string(schema.size()));
  }
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (header[c] != schema[c].name) {
      throw DataError(origin + ": header field " + std::to_string(c + 1) +
                      " is '" + header[c] + "', expected '" + schema[c].name +
                      "'");
    }
  }

  MixedDataset data = MixedDataset::empty(schema);
  std::vector<double> row(schema.size());
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.eof()) break;
    const auto fields = split_record(line, line_no, origin);
    if (fields.size() != schema.size()) {
      throw DataError(origin + ": line " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(schema.size()));
    }
    bool incomplete = false;
    for (const auto& cell : fields) {
      if (cell.empty()) {
        incomplete = true;
        break;
      }
    }
    if (incomplete) {
      if (options.drop_incomplete_rows) {
        ++dropped;
        continue;
      }
      throw DataError(origin + ": missing value at line " +
                      std::to_string(line_no));
    }
    for (std::size_t c = 0; c < schema.size(); ++c) {
      const auto& cs = schema[c];
      const auto& cell = fields[c];
      if (cs.kind == ColumnKind::kContinuous) {
        double v;
        if (!parse_double(cell, v)) {
          throw DataError(origin + ": cannot parse '" + cell +
                          "' as a number at line " + std::to_string(line_no) +
                          ", column '" + cs.name + "'");
        }
        row[c] = v;
      } else {
        const auto it =
            std::find(cs.categories.begin(), cs.categories.end(), cell);
        if (it == cs.categories.end()) {
          throw DataError(origin + ": unknown label '" + cell +
                          "' at line " + std::to_string(line_no) +
                          ", column '" + cs.name + "'");
        }
        row[c] = static_cast<double>(it - cs.categories.begin());
      }
    }
    data.append_row(row);
  }
  if (options.dropped_rows != nullptr) *options.dropped_rows = dropped;
  return data;
}

MixedDataset load_csv(const std::filesystem::path& path,
                      const std::vector<ColumnSchema>& schema,
                      const CsvOptions& options) {
  return parse_csv(io::read_file(path), schema, path.string(), options);
}

std::string to_csv(const MixedDataset& data) {
  std::string out;
  for (int c = 0; c < data.n_cols(); ++c) {
    if (c > 0) out += ',';
    out += csv_escape(data.schema(c).name);
  }
  out += '\n';
  for (int r = 0; r < data.n_rows(); ++r) {
    for (int c = 0; c < data.n_cols(); ++c) {
      if (c > 0) out += ',';
      if (data.schema(c).kind == ColumnKind::kContinuous) {
        out += io::format_double(data.column(c)[r]);
      } else {
        out += csv_escape(data.label_at(r, c));
      }
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const MixedDataset& data) {
  io::atomic_write_file(path, to_csv(data));
}

// --- schema (de)serialization --------------------------------------------------

nlohmann::json schema_to_json(const std::vector<ColumnSchema>& schema) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& col : schema) {
    nlohmann::json j;
    j["name"] = col.name;
    j["kind"] = col.kind == ColumnKind::kContinuous ? "continuous"
                                                    : "categorical";
    if (col.kind == ColumnKind::kCategorical) j["categories"] = col.categories;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::vector<ColumnSchema> schema_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw DataError("schema: expected a JSON array");
  std::vector<ColumnSchema> schema;
  for (const auto& item : j) {
    ColumnSchema col;
    if (!item.contains("name") || !item["name"].is_string()) {
      throw DataError("schema: column without a string 'name'");
    }
    col.name = item["name"].get<std::string>();
    const std::string kind = item.value("kind", "");
    if (kind == "continuous") {
      col.kind = ColumnKind::kContinuous;
    } else if (kind == "categorical") {
      col.kind = ColumnKind::kCategorical;
      if (!item.contains("categories") || !item["categories"].is_array()) {
        throw DataError("schema: categorical column '" + col.name +
                        "' without 'categories'");
      }
      for (const auto& label : item["categories"]) {
        if (!label.is_string()) {
          throw DataError("schema: non-string category label in '" +
                          col.name + "'");
        }
        col.categories.push_back(label.get<std::string>());
      }
    } else {
      throw DataError("schema: column '" + col.name +
                      "' has invalid kind '" + kind + "'");
    }
    schema.push_back(std::move(col));
  }
  validate_schema(schema);
  return schema;
}

// --- discretization -------------------------------------------------------------

namespace {
void validate_discretizer(const ThresholdDiscretizer& d) {
  if (d.cut_points.empty()) throw DataError("discretizer: no cut points");
  for (std::size_t i = 0; i + 1 < d.cut_points.size(); ++i) {
    if (!(d.cut_points[i] < d.cut_points[i + 1])) {
      throw DataError("discretizer: cut points must be strictly ascending");
    }
  }
  if (d.labels.size() != d.cut_points.size() + 1) {
    throw DataError("discretizer: need one label per interval");
  }
  for (std::size_t i = 0; i < d.labels.size(); ++i) {
    for (std::size_t j = i + 1; j < d.labels.size(); ++j) {
      if (d.labels[i] == d.labels[j]) {
        throw DataError("discretizer: duplicate label '" + d.labels[i] + "'");
      }
    }
  }
}
}  // namespace

int discretize_index(double value, const ThresholdDiscretizer& d) {
  validate_discretizer(d);
  if (!std::isfinite(value)) throw DataError("discretize: non-finite value");
  int m = 0;
  for (double t : d.cut_points) {
    if (d.closure == IntervalClosure::kLeftClosed ? value >= t : value > t) {
      ++m;
    }
  }
  return m;
}

const std::string& discretize(double value, const ThresholdDiscretizer& d) {
  return d.labels[static_cast<std::size_t>(discretize_index(value, d))];
}

std::vector<int> discretize_column(const std::vector<double>& values,
                                   const ThresholdDiscretizer& d) {
  std::vector<int> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = discretize_index(values[i], d);
  }
  return out;
}

}  // namespace cohortsim::data
