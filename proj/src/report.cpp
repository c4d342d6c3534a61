#include "prodcoef/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "prodcoef/error.hpp"
#include "prodcoef/feature_matrix.hpp"

namespace prodcoef {

std::string format_score_cell(double mean, double std) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f (± %.2f)", mean, std);
  return buf;
}

namespace {

struct Cells {
  std::optional<std::string> knn;
  std::optional<std::string> rf;
};

std::string table1_row_name(const std::string& features) {
  if (features == "xyz") return "Original features (x,y,z)";
  if (features == "xyz+coefficients") return "With product coefficients";
  return features;
}

// Display width, counting each UTF-8 code point once.
std::size_t display_width(const std::string& s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

std::string render_text(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    widths.resize(std::max(widths.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], display_width(row[c]));
    }
  }
  std::ostringstream out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      if (c) out << " | ";
      out << rows[r][c];
      if (c + 1 < rows[r].size()) out << std::string(widths[c] - display_width(rows[r][c]), ' ');
    }
    out << '\n';
    if (r == 0) {
      for (std::size_t c = 0; c < widths.size(); ++c) {
        if (c) out << "-+-";
        out << std::string(widths[c], '-');
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string render_csv(const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << row[c];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace

RenderedTables render_report(const std::vector<EvaluationReport>& reports) {
  if (reports.empty()) throw Error(ErrorCode::kEmptyInput, "no reports to render");

  std::vector<std::string> table1_order;
  std::map<std::string, Cells> table1;
  std::map<std::size_t, Cells> table2;
  std::ostringstream plot;
  plot << "n,classifier,mean_f1,std_f1\n";

  for (const auto& r : reports) {
    const auto& p = r.config.at("pipeline");
    const auto classifier = p.at("classifier").get<std::string>();
    const std::string cell = format_score_cell(r.mean_f1, r.std_f1);
    Cells* cells = nullptr;
    if (p.at("pca_components").is_null()) {
      const auto features = p.at("features").get<std::string>();
      if (!table1.count(features)) table1_order.push_back(features);
      cells = &table1[features];
    } else {
      const auto n = p.at("pca_components").get<std::size_t>();
      cells = &table2[n];
      plot << n << ',' << classifier << ',' << format_double(r.mean_f1) << ','
           << format_double(r.std_f1) << '\n';
    }
    (classifier == "knn" ? cells->knn : cells->rf) = cell;
  }

  RenderedTables out;
  const auto value = [](const std::optional<std::string>& s) { return s.value_or("-"); };
  if (!table1.empty()) {
    std::vector<std::vector<std::string>> csv{{"features", "knn_f1", "rf_f1"}};
    std::vector<std::vector<std::string>> text{{"", "KNN F1-score", "RF F1-score"}};
    for (const auto& key : table1_order) {
      csv.push_back({key, value(table1[key].knn), value(table1[key].rf)});
      text.push_back({table1_row_name(key), value(table1[key].knn), value(table1[key].rf)});
    }
    out.table1_csv = render_csv(csv);
    out.table1_text = render_text(text);
    out.table1_rows = table1_order.size();
  }
  if (!table2.empty()) {
    std::vector<std::vector<std::string>> csv{{"components", "knn_f1", "rf_f1"}};
    std::vector<std::vector<std::string>> text{
        {"# of Principal Components", "KNN F1-score", "RF F1-score"}};
    for (const auto& [n, cells] : table2) {
      csv.push_back({std::to_string(n), value(cells.knn), value(cells.rf)});
      text.push_back({std::to_string(n), value(cells.knn), value(cells.rf)});
    }
    out.table2_csv = render_csv(csv);
    out.table2_text = render_text(text);
    out.table2_rows = table2.size();
  }
  out.plot_csv = plot.str();
  return out;
}

}  // namespace prodcoef
