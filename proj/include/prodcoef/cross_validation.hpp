#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "prodcoef/feature_matrix.hpp"
#include "prodcoef/metrics.hpp"
#include "prodcoef/random_forest.hpp"

namespace prodcoef {

struct CrossValPlan {
  std::size_t folds = 5;
  std::uint64_t seed = 42;
  bool stratified = true;

  void validate() const;
};

// Fold number of every row. Rows are shuffled by the seed, then dealt
// round-robin within each class (stratified) or overall.
std::vector<std::size_t> assign_folds(std::span<const int> labels, const CrossValPlan& plan);

// A train-then-predict recipe. The test matrix handed to fit_predict never
// carries labels.
class Pipeline {
 public:
  virtual ~Pipeline() = default;
  virtual std::vector<int> fit_predict(const FeatureMatrix& train, const FeatureMatrix& test,
                                       unsigned threads) const = 0;
  virtual nlohmann::json describe() const = 0;
};

enum class FeatureSet { kXyz, kAll };
enum class ClassifierKind { kKnn, kRandomForest };

const char* to_string(FeatureSet set);
const char* to_string(ClassifierKind kind);
ClassifierKind parse_classifier(const std::string& name);

struct PipelineConfig {
  FeatureSet features = FeatureSet::kAll;
  std::optional<std::size_t> pca_components;
  ClassifierKind classifier = ClassifierKind::kKnn;
  std::size_t knn_k = 10;
  RandomForestConfig forest;
};

// Column subset, optional PCA fitted on the training rows, then KNN or RF.
class StandardPipeline : public Pipeline {
 public:
  explicit StandardPipeline(PipelineConfig config) : config_(std::move(config)) {}

  const PipelineConfig& config() const { return config_; }
  FeatureMatrix select(const FeatureMatrix& x) const;
  std::vector<int> fit_predict(const FeatureMatrix& train, const FeatureMatrix& test,
                               unsigned threads) const override;
  nlohmann::json describe() const override;

 private:
  PipelineConfig config_;
};

struct EvaluationReport {
  std::vector<double> per_fold_f1;
  double mean_f1 = 0.0;
  double std_f1 = 0.0;  // sample standard deviation across folds
  F1Average average = F1Average::kMacro;
  std::vector<int> classes;
  std::vector<std::vector<std::uint64_t>> confusion;  // summed over folds
  std::vector<std::size_t> fold_sizes;
  nlohmann::json config;  // pipeline, plan, and any run configuration
};

void to_json(nlohmann::json& j, const EvaluationReport& r);
void from_json(const nlohmann::json& j, EvaluationReport& r);

// Every fold trains the whole pipeline (PCA included) on the other folds only.
EvaluationReport cross_validate(const FeatureMatrix& features, const CrossValPlan& plan,
                                const Pipeline& pipeline,
                                F1Average average = F1Average::kMacro, unsigned threads = 1);

}  // namespace prodcoef
