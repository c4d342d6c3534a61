#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "json.hpp"
#include "prodcoef/feature_matrix.hpp"
#include "prodcoef/knn.hpp"

namespace prodcoef {

struct RandomForestConfig {
  std::size_t trees = 100;
  // Features tried per split; unset means ceil(sqrt(cols)).
  std::optional<std::size_t> max_features;
  std::size_t max_depth = 0;  // 0 = unbounded
  std::size_t min_samples_split = 2;
  std::uint64_t seed = 42;

  void validate() const;
};

void to_json(nlohmann::json& j, const RandomForestConfig& c);
void from_json(const nlohmann::json& j, RandomForestConfig& c);

// Internal nodes split on row[feature] <= threshold (left) versus > (right).
// Leaves hold per-class sample counts indexed like RandomForestModel::classes.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::vector<std::uint32_t> leaf_counts;

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // root at 0

  const TreeNode& leaf_for(std::span<const double> row) const;
  // Majority class index of the reached leaf; ties go to the lower index.
  std::size_t vote(std::span<const double> row) const;
};

struct RandomForestModel {
  RandomForestConfig config;
  std::size_t cols = 0;
  std::vector<int> classes;  // ascending class codes
  std::vector<DecisionTree> trees;
};

void to_json(nlohmann::json& j, const RandomForestModel& m);
void from_json(const nlohmann::json& j, RandomForestModel& m);

// Bootstrap + Gini CART trees. Tree t draws from its own RNG stream derived
// from (seed, t), so the forest is the same for any thread count.
RandomForestModel rf_fit(const FeatureMatrix& x, const RandomForestConfig& config,
                         unsigned threads = 1);

// Plurality of per-tree votes; ties go to the smallest class code.
std::vector<Prediction> rf_predict(const RandomForestModel& model, const FeatureMatrix& queries,
                                   unsigned threads = 1);

// Grows one tree on the given row ids (duplicates allowed). `class_index` maps
// each row of `x` to an index into the forest's classes.
DecisionTree fit_tree(const FeatureMatrix& x, std::span<const std::uint32_t> class_index,
                      std::size_t class_count, std::vector<std::uint32_t> samples,
                      const RandomForestConfig& config, std::mt19937_64& rng);

}  // namespace prodcoef
