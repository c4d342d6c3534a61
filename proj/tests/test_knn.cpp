#include "doctest.h"

#include <random>

#include "prodcoef/error.hpp"
#include "prodcoef/knn.hpp"
#include "support/test_support.hpp"

using namespace prodcoef;

namespace {

FeatureMatrix random_labeled(std::size_t rows, std::size_t cols, std::uint64_t seed,
                             bool coarse) {
  std::mt19937_64 rng(seed);
  FeatureMatrix m(rows, cols);
  m.labels.emplace();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      // Coarse values produce many equal distances.
      m.at(r, c) = coarse ? static_cast<double>(rng() % 5) : static_cast<double>(rng() >> 11) * 0x1p-53;
    }
    m.labels->push_back(static_cast<int>(1 + rng() % 4));
  }
  return m;
}

}  // namespace

TEST_CASE("neighbors and votes equal the full-sort oracle") {
  for (const bool coarse : {false, true}) {
    for (const std::size_t cols : {3, 10}) {
      const auto train = random_labeled(200, cols, 7 + cols, coarse);
      const auto queries = random_labeled(40, cols, 99 + cols, coarse);
      const KnnModel model(train, 10);
      const auto predictions = model.predict(queries.without_labels());
      for (std::size_t q = 0; q < queries.rows; ++q) {
        const auto expected = testing::full_sort_neighbors(train, queries.row(q), 10);
        CHECK(model.neighbors(queries.row(q)) == expected);
        std::vector<int> votes;
        for (const auto id : expected) votes.push_back((*train.labels)[id]);
        CHECK(predictions[q].label == testing::majority_smallest_on_tie(votes));
      }
    }
  }
}

TEST_CASE("k = 1 returns the closest training label") {
  FeatureMatrix train(3, 1);
  train.values = {0.0, 1.0, 2.0};
  train.labels = std::vector<int>{5, 6, 7};
  const KnnModel model(train, 1);
  FeatureMatrix q(3, 1);
  q.values = {0.2, 1.4, 5.0};
  const auto p = labels_of(model.predict(q));
  CHECK(p == std::vector<int>{5, 6, 7});
}

TEST_CASE("distance ties go to the lower row index, vote ties to the smaller class") {
  FeatureMatrix train(2, 1);
  train.values = {-1.0, 1.0};
  train.labels = std::vector<int>{9, 3};
  FeatureMatrix q(1, 1);
  q.values = {0.0};
  CHECK(KnnModel(train, 1).neighbors(q.row(0)) == std::vector<std::size_t>{0});
  CHECK(KnnModel(train, 1).predict(q)[0].label == 9);
  const auto both = KnnModel(train, 2).predict(q)[0];
  CHECK(both.label == 3);
  CHECK(both.votes.at(3) == 1.0);
  CHECK(both.votes.at(9) == 1.0);
}

TEST_CASE("threaded prediction matches serial") {
  const auto train = random_labeled(500, 4, 1, false);
  const auto q = random_labeled(120, 4, 2, false).without_labels();
  const KnnModel model(train, 10);
  CHECK(labels_of(model.predict(q, 1)) == labels_of(model.predict(q, 4)));
}

TEST_CASE("configuration errors") {
  const auto train = random_labeled(5, 2, 1, false);
  try {
    KnnModel(train, 6);
    FAIL("expected configuration error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfiguration);
  }
  CHECK_THROWS_AS(KnnModel(train, 0), Error);
  CHECK_THROWS_AS(KnnModel(train.without_labels(), 2), Error);
  CHECK_THROWS_AS(KnnModel(train, 2).predict(random_labeled(1, 3, 1, false)), Error);
}
