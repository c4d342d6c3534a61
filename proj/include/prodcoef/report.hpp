#pragma once

#include <optional>
#include <string>
#include <vector>

#include "prodcoef/cross_validation.hpp"

namespace prodcoef {

// "0.85 (± 0.02)"
std::string format_score_cell(double mean, double std);

struct RenderedTables {
  // Rows: feature configuration; columns: KNN, RF. Reports without PCA.
  std::string table1_csv;
  std::string table1_text;
  // Rows: number of principal components; columns: KNN, RF.
  std::string table2_csv;
  std::string table2_text;
  // n,classifier,mean_f1,std_f1 for every PCA report.
  std::string plot_csv;

  std::size_t table1_rows = 0;
  std::size_t table2_rows = 0;
};

// Groups reports by the pipeline description in their config (features,
// pca_components, classifier).
RenderedTables render_report(const std::vector<EvaluationReport>& reports);

}  // namespace prodcoef
