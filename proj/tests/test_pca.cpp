#include "doctest.h"

#include <cmath>
#include <random>

#include "prodcoef/error.hpp"
#include "prodcoef/pca.hpp"
#include "support/test_support.hpp"

using namespace prodcoef;

namespace {

// Four latent factors plus per-column noise: a few large eigenvalues and a
// tail of small ones.
FeatureMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> mix(4, std::vector<double>(cols));
  for (auto& row : mix)
    for (auto& v : row) v = g(rng);
  FeatureMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double latent[4];
    for (auto& l : latent) l = g(rng);
    for (std::size_t c = 0; c < cols; ++c) {
      double v = 0.3 * g(rng) / static_cast<double>(1 + c);
      for (int k = 0; k < 4; ++k) v += latent[k] * mix[k][c] / static_cast<double>(1 + k);
      m.at(r, c) = v;
    }
  }
  return m;
}

}  // namespace

TEST_CASE("variance along one axis") {
  FeatureMatrix m(4, 3);
  m.values = {0, 1, 1, 2, 1, 1, 4, 1, 1, 6, 1, 1};
  const auto model = fit_pca(m, 1);
  CHECK(model.component(0, 0) == doctest::Approx(1.0));
  CHECK(model.component(1, 0) == doctest::Approx(0.0));
  // Values 0,2,4,6: sum of squared deviations 20 over 3.
  CHECK(model.eigenvalues[0] == doctest::Approx(20.0 / 3.0).epsilon(1e-14));
  CHECK(model.spectrum[1] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("cube corners have an isotropic spectrum") {
  FeatureMatrix m(8, 3);
  for (std::size_t i = 0; i < 8; ++i) {
    m.at(i, 0) = (i >> 2) & 1;
    m.at(i, 1) = (i >> 1) & 1;
    m.at(i, 2) = i & 1;
  }
  const auto model = fit_pca(m, 3);
  for (const double v : model.spectrum) CHECK(v == doctest::Approx(2.0 / 7.0).epsilon(1e-14));
}

TEST_CASE("eigenvalues equal the deflated power-iteration oracle") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto m = testing::random_spectrum_matrix(150, 10, seed);
    const auto model = fit_pca(m, 10);
    const auto oracle = testing::power_iteration_eigenvalues(testing::sample_covariance(m), 10);
    for (std::size_t k = 0; k < 10; ++k) {
      CAPTURE(seed);
      CAPTURE(k);
      CHECK(std::abs(model.eigenvalues[k] - oracle[k]) <= 1e-8);
    }
  }
}

TEST_CASE("components are orthonormal with the sign convention applied") {
  const auto m = random_matrix(120, 6, 9);
  const auto model = fit_pca(m, 6);
  for (std::size_t a = 0; a < 6; ++a) {
    for (std::size_t b = 0; b < 6; ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < 6; ++i) dot += model.component(i, a) * model.component(i, b);
      CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-12));
    }
    std::size_t pivot = 0;
    for (std::size_t i = 1; i < 6; ++i)
      if (std::abs(model.component(i, a)) > std::abs(model.component(pivot, a))) pivot = i;
    CHECK(model.component(pivot, a) > 0.0);
  }
}

TEST_CASE("full-rank projection reconstructs the data") {
  const auto m = random_matrix(80, 10, 31);
  const auto model = fit_pca(m, 10);
  const auto z = transform(model, m);
  CHECK(z.column_names.front() == "pc1");
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      double v = model.mean[c];
      for (std::size_t k = 0; k < 10; ++k) v += z.at(r, k) * model.component(c, k);
      CHECK(std::abs(v - m.at(r, c)) <= 1e-8);
    }
  }
}

TEST_CASE("projected variances equal eigenvalues and the trace is conserved") {
  const auto m = random_matrix(200, 10, 77);
  const auto model = fit_pca(m, 4);
  const auto z = transform(model, m);
  for (std::size_t k = 0; k < 4; ++k) {
    double mean = 0.0, ss = 0.0;
    for (std::size_t r = 0; r < z.rows; ++r) mean += z.at(r, k);
    mean /= static_cast<double>(z.rows);
    for (std::size_t r = 0; r < z.rows; ++r) ss += (z.at(r, k) - mean) * (z.at(r, k) - mean);
    CHECK(ss / static_cast<double>(z.rows - 1) ==
          doctest::Approx(model.eigenvalues[k]).epsilon(1e-10));
  }
  const auto cov = testing::sample_covariance(m);
  double trace = 0.0, total = 0.0;
  for (std::size_t i = 0; i < 10; ++i) trace += cov[i][i];
  for (const double v : model.spectrum) total += v;
  CHECK(std::abs(trace - total) <= 1e-8);
  for (std::size_t k = 0; k + 1 < 10; ++k) CHECK(model.spectrum[k] >= model.spectrum[k + 1]);
}

TEST_CASE("a rotation of the data leaves the spectrum unchanged") {
  const auto m = random_matrix(100, 2, 5);
  FeatureMatrix rotated(m.rows, 2);
  const double t = 0.7;
  for (std::size_t r = 0; r < m.rows; ++r) {
    rotated.at(r, 0) = std::cos(t) * m.at(r, 0) - std::sin(t) * m.at(r, 1);
    rotated.at(r, 1) = std::sin(t) * m.at(r, 0) + std::cos(t) * m.at(r, 1);
  }
  const auto a = fit_pca(m, 2);
  const auto b = fit_pca(rotated, 2);
  CHECK(a.spectrum[0] == doctest::Approx(b.spectrum[0]).epsilon(1e-12));
  CHECK(a.spectrum[1] == doctest::Approx(b.spectrum[1]).epsilon(1e-12));
}

TEST_CASE("fits are deterministic and survive JSON") {
  const auto m = random_matrix(60, 5, 2);
  const nlohmann::json a = fit_pca(m, 3);
  const nlohmann::json b = fit_pca(m, 3);
  CHECK(a.dump() == b.dump());
  const auto back = a.get<PcaModel>();
  CHECK(transform(back, m).values == transform(fit_pca(m, 3), m).values);
}

TEST_CASE("labels pass through the projection") {
  auto m = random_matrix(10, 3, 1);
  m.labels = std::vector<int>(10, 4);
  CHECK(*transform(fit_pca(m, 2), m).labels == *m.labels);
}

TEST_CASE("dimension and data errors") {
  const auto m = random_matrix(10, 3, 1);
  try {
    fit_pca(m, 4);
    FAIL("expected dimension error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDimension);
    CHECK(e.exit_code() == 1);
  }
  CHECK_THROWS_AS(fit_pca(m, 0), Error);
  CHECK_THROWS_AS(fit_pca(m.select_rows(std::vector<std::size_t>{0}), 1), Error);
  CHECK_THROWS_AS(transform(fit_pca(m, 2), random_matrix(4, 2, 3)), Error);
}
