#include "prodcoef/feature_matrix.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "prodcoef/error.hpp"

namespace prodcoef {

FeatureMatrix::FeatureMatrix(std::size_t r, std::size_t c, std::vector<std::string> names)
    : rows(r), cols(c), values(r * c, 0.0), column_names(std::move(names)) {
  if (column_names.empty()) {
    for (std::size_t j = 0; j < c; ++j) column_names.push_back("f" + std::to_string(j + 1));
  }
}

const std::vector<int>& FeatureMatrix::require_labels() const {
  if (!labels) throw Error(ErrorCode::kLabelsRequired, "feature matrix has no labels");
  return *labels;
}

void FeatureMatrix::validate() const {
  if (values.size() != rows * cols) {
    throw Error(ErrorCode::kDimension, "feature matrix storage does not match its shape");
  }
  if (column_names.size() != cols) {
    throw Error(ErrorCode::kDimension, "feature matrix has " + std::to_string(cols) +
                                           " columns but " +
                                           std::to_string(column_names.size()) + " names");
  }
  if (labels && labels->size() != rows) {
    throw Error(ErrorCode::kDimension, "label count does not match row count");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorCode::kParse, "non-finite value at row " + std::to_string(i / cols) +
                                         ", column " + std::to_string(i % cols));
    }
  }
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const {
  FeatureMatrix out(indices.size(), cols, column_names);
  if (labels) out.labels.emplace();
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
    if (labels) out.labels->push_back((*labels)[indices[i]]);
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_columns(std::span<const std::size_t> indices) const {
  std::vector<std::string> names;
  for (const auto c : indices) {
    if (c >= cols) throw Error(ErrorCode::kDimension, "column index out of range");
    names.push_back(column_names[c]);
  }
  FeatureMatrix out(rows, indices.size(), std::move(names));
  out.labels = labels;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < indices.size(); ++j) out.at(r, j) = at(r, indices[j]);
  }
  return out;
}

FeatureMatrix FeatureMatrix::without_labels() const {
  FeatureMatrix out = *this;
  out.labels.reset();
  return out;
}

void rescale_columns_unit(FeatureMatrix& m) {
  if (m.rows == 0) return;
  for (std::size_t c = 0; c < m.cols; ++c) {
    double lo = m.at(0, c);
    double hi = lo;
    for (std::size_t r = 1; r < m.rows; ++r) {
      lo = std::min(lo, m.at(r, c));
      hi = std::max(hi, m.at(r, c));
    }
    const double span = hi - lo;
    for (std::size_t r = 0; r < m.rows; ++r) {
      m.at(r, c) = span == 0.0 ? 0.5 : (m.at(r, c) - lo) / span;
    }
  }
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_feature_csv(const FeatureMatrix& m, std::ostream& out) {
  for (std::size_t c = 0; c < m.cols; ++c) {
    if (c) out << ',';
    out << m.column_names[c];
  }
  if (m.labels) out << (m.cols ? ",label" : "label");
  out << '\n';
  std::string line;
  for (std::size_t r = 0; r < m.rows; ++r) {
    line.clear();
    for (std::size_t c = 0; c < m.cols; ++c) {
      if (c) line += ',';
      line += format_double(m.at(r, c));
    }
    if (m.labels) {
      line += ',';
      line += std::to_string((*m.labels)[r]);
    }
    line += '\n';
    out << line;
  }
}

void write_feature_csv(const FeatureMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  write_feature_csv(m, out);
  if (!out) throw Error(ErrorCode::kIo, "write to '" + path.string() + "' failed");
}

std::string feature_csv_string(const FeatureMatrix& m) {
  std::ostringstream out;
  write_feature_csv(m, out);
  return out.str();
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

FeatureMatrix parse_feature_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kParse, source + ": missing header row");
  }
  std::vector<std::string> names;
  for (const auto f : split(line)) names.emplace_back(f);
  const bool labeled = !names.empty() && names.back() == "label";
  if (labeled) names.pop_back();

  FeatureMatrix m;
  m.cols = names.size();
  m.column_names = std::move(names);
  if (labeled) m.labels.emplace();
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto fields = split(line);
    const std::size_t expected = m.cols + (labeled ? 1 : 0);
    if (fields.size() != expected) {
      throw Error(ErrorCode::kParse, source + ": row " + std::to_string(row) + ": expected " +
                                         std::to_string(expected) + " fields, found " +
                                         std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < m.cols; ++c) {
      double v = 0.0;
      const auto f = fields[c];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v)) {
        throw Error(ErrorCode::kParse, source + ": row " + std::to_string(row) +
                                           ": non-numeric value '" + std::string(f) + "'");
      }
      m.values.push_back(v);
    }
    if (labeled) {
      int label = 0;
      const auto f = fields.back();
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), label);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw Error(ErrorCode::kParse, source + ": row " + std::to_string(row) +
                                           ": non-integer label '" + std::string(f) + "'");
      }
      m.labels->push_back(label);
    }
    ++m.rows;
  }
  return m;
}

FeatureMatrix read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_feature_csv(text, path.string());
}

}  // namespace prodcoef
