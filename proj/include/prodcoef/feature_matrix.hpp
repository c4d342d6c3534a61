#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace prodcoef {

// Row-major numeric table with named columns and optional per-row labels.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<std::string> column_names;
  std::optional<std::vector<int>> labels;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<std::string> names = {});

  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }
  std::span<double> row(std::size_t r) { return {values.data() + r * cols, cols}; }

  bool has_labels() const { return labels.has_value(); }
  const std::vector<int>& require_labels() const;

  // Shape, finiteness, name and label lengths. Throws Error.
  void validate() const;

  FeatureMatrix select_rows(std::span<const std::size_t> indices) const;
  FeatureMatrix select_columns(std::span<const std::size_t> indices) const;
  FeatureMatrix without_labels() const;
};

// Min-max rescales every column onto [0,1] in place; a constant column
// becomes 0.5.
void rescale_columns_unit(FeatureMatrix& m);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// Header row of column names (plus `label` when labeled), then one row per
// record.
void write_feature_csv(const FeatureMatrix& m, std::ostream& out);
void write_feature_csv(const FeatureMatrix& m, const std::filesystem::path& path);
std::string feature_csv_string(const FeatureMatrix& m);

// Inverse of write_feature_csv. A trailing column named `label` becomes the
// labels.
FeatureMatrix parse_feature_csv(const std::string& text, const std::string& source);
FeatureMatrix read_feature_csv(const std::filesystem::path& path);

}  // namespace prodcoef
