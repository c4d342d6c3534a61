#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "prodcoef/feature_matrix.hpp"

namespace prodcoef {

struct Prediction {
  int label = 0;
  std::map<int, double> votes;  // class code -> count or weight
};

std::vector<int> labels_of(const std::vector<Prediction>& predictions);

// Picks the class with the most votes; ties go to the smallest class code.
int plurality(const std::map<int, double>& votes);

// Exact k-nearest-neighbor classifier, Euclidean distance, uniform votes.
// Distance ties are broken by lower training row index.
class KnnModel {
 public:
  KnnModel(FeatureMatrix training, std::size_t k = 10, std::size_t leaf_size = 16);

  std::size_t k() const { return k_; }
  const FeatureMatrix& training() const { return training_; }

  // Training row ids of the k nearest neighbors of `query`, nearest first.
  std::vector<std::size_t> neighbors(std::span<const double> query) const;

  std::vector<Prediction> predict(const FeatureMatrix& queries, unsigned threads = 1) const;

 private:
  struct Node {
    std::uint32_t begin;
    std::uint32_t end;
    std::int32_t left = -1;
    std::int32_t right = -1;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  double box_distance_sq(std::size_t node, std::span<const double> query) const;

  FeatureMatrix training_;
  std::size_t k_;
  std::size_t leaf_size_;
  std::vector<int> labels_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  std::vector<double> box_lo_;  // nodes x cols
  std::vector<double> box_hi_;
};

std::vector<Prediction> knn_predict(const KnnModel& model, const FeatureMatrix& queries,
                                    unsigned threads = 1);

// Squared Euclidean distance, summed in column order.
inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// A KNN model persists as its k plus a reference to the training feature CSV.
nlohmann::json knn_model_json(const KnnModel& model, const std::string& training_csv,
                              const std::string& training_digest);

}  // namespace prodcoef
