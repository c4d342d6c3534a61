#pragma once

#include <cstddef>
#include <vector>

#include "json.hpp"
#include "prodcoef/feature_matrix.hpp"

namespace prodcoef {

// Covariance PCA. Components are unit eigenvectors of the sample covariance in
// descending eigenvalue order, each signed so its largest-magnitude entry is
// positive.
struct PcaModel {
  std::size_t cols = 0;
  std::size_t n = 0;
  std::vector<double> mean;         // cols
  std::vector<double> components;   // cols x n, column-major
  std::vector<double> eigenvalues;  // n, non-increasing
  std::vector<double> spectrum;     // all cols eigenvalues, non-increasing

  double component(std::size_t feature, std::size_t k) const { return components[k * cols + feature]; }
};

// Labels are never read.
PcaModel fit_pca(const FeatureMatrix& x, std::size_t n);

// Z = (X - mean) M with columns pc1..pcn; labels pass through.
FeatureMatrix transform(const PcaModel& model, const FeatureMatrix& x);

// Sample covariance (divisor rows - 1), row-major cols x cols.
std::vector<double> covariance_matrix(const FeatureMatrix& x);

void to_json(nlohmann::json& j, const PcaModel& m);
void from_json(const nlohmann::json& j, PcaModel& m);

}  // namespace prodcoef
