#include "prodcoef/pca.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "prodcoef/error.hpp"

namespace prodcoef {

namespace {

std::vector<double> column_means(const FeatureMatrix& x) {
  std::vector<double> mean(x.cols, 0.0);
  for (std::size_t r = 0; r < x.rows; ++r) {
    for (std::size_t c = 0; c < x.cols; ++c) mean[c] += x.at(r, c);
  }
  for (auto& m : mean) m /= static_cast<double>(x.rows);
  return mean;
}

}  // namespace

std::vector<double> covariance_matrix(const FeatureMatrix& x) {
  if (x.rows < 2) {
    throw Error(ErrorCode::kInsufficientData, "covariance needs at least two rows");
  }
  const auto mean = column_means(x);
  const std::size_t d = x.cols;
  std::vector<double> cov(d * d, 0.0);
  std::vector<double> centered(d);
  for (std::size_t r = 0; r < x.rows; ++r) {
    for (std::size_t c = 0; c < d; ++c) centered[c] = x.at(r, c) - mean[c];
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i; j < d; ++j) cov[i * d + j] += centered[i] * centered[j];
    }
  }
  const double denom = static_cast<double>(x.rows - 1);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      cov[i * d + j] /= denom;
      cov[j * d + i] = cov[i * d + j];
    }
  }
  return cov;
}

PcaModel fit_pca(const FeatureMatrix& x, std::size_t n) {
  if (n < 1 || n > x.cols) {
    throw Error(ErrorCode::kDimension, "cannot retain " + std::to_string(n) +
                                           " components from " + std::to_string(x.cols) +
                                           " columns");
  }
  if (x.rows < 2) {
    throw Error(ErrorCode::kInsufficientData, "PCA needs at least two rows");
  }
  const std::size_t d = x.cols;
  const auto cov = covariance_matrix(x);
  Eigen::MatrixXd c(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cov[i * d + j];
    }
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kInsufficientData, "covariance eigendecomposition did not converge");
  }
  // Eigen returns ascending order.
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();

  PcaModel model;
  model.cols = d;
  model.n = n;
  model.mean = column_means(x);
  for (std::size_t k = 0; k < d; ++k) {
    model.spectrum.push_back(values(static_cast<Eigen::Index>(d - 1 - k)));
  }
  model.eigenvalues.assign(model.spectrum.begin(),
                           model.spectrum.begin() + static_cast<std::ptrdiff_t>(n));
  model.components.resize(d * n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto col = static_cast<Eigen::Index>(d - 1 - k);
    std::size_t pivot = 0;
    for (std::size_t i = 1; i < d; ++i) {
      if (std::abs(vectors(static_cast<Eigen::Index>(i), col)) >
          std::abs(vectors(static_cast<Eigen::Index>(pivot), col))) {
        pivot = i;
      }
    }
    const double sign = vectors(static_cast<Eigen::Index>(pivot), col) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      model.components[k * d + i] = sign * vectors(static_cast<Eigen::Index>(i), col);
    }
  }
  return model;
}

FeatureMatrix transform(const PcaModel& model, const FeatureMatrix& x) {
  if (x.cols != model.cols) {
    throw Error(ErrorCode::kDimension, "PCA model expects " + std::to_string(model.cols) +
                                           " columns, got " + std::to_string(x.cols));
  }
  std::vector<std::string> names;
  for (std::size_t k = 0; k < model.n; ++k) names.push_back("pc" + std::to_string(k + 1));
  FeatureMatrix z(x.rows, model.n, std::move(names));
  z.labels = x.labels;
  std::vector<double> centered(x.cols);
  for (std::size_t r = 0; r < x.rows; ++r) {
    for (std::size_t c = 0; c < x.cols; ++c) centered[c] = x.at(r, c) - model.mean[c];
    for (std::size_t k = 0; k < model.n; ++k) {
      double s = 0.0;
      for (std::size_t c = 0; c < x.cols; ++c) s += centered[c] * model.component(c, k);
      z.at(r, k) = s;
    }
  }
  return z;
}

void to_json(nlohmann::json& j, const PcaModel& m) {
  j = nlohmann::json{{"n", m.n},
                     {"cols", m.cols},
                     {"mean", m.mean},
                     {"components", m.components},
                     {"eigenvalues", m.eigenvalues},
                     {"spectrum", m.spectrum}};
}

void from_json(const nlohmann::json& j, PcaModel& m) {
  m.n = j.at("n").get<std::size_t>();
  m.mean = j.at("mean").get<std::vector<double>>();
  m.cols = j.value("cols", m.mean.size());
  m.components = j.at("components").get<std::vector<double>>();
  m.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
  m.spectrum = j.value("spectrum", m.eigenvalues);
  if (m.mean.size() != m.cols || m.components.size() != m.cols * m.n ||
      m.eigenvalues.size() != m.n) {
    throw Error(ErrorCode::kDimension, "inconsistent PCA model shapes");
  }
}

}  // namespace prodcoef
