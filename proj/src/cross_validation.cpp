#include "prodcoef/cross_validation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "prodcoef/error.hpp"
#include "prodcoef/knn.hpp"
#include "prodcoef/pca.hpp"
#include "prodcoef/rng.hpp"

namespace prodcoef {

void CrossValPlan::validate() const {
  if (folds < 2) throw Error(ErrorCode::kConfiguration, "cross-validation needs at least 2 folds");
}

std::vector<std::size_t> assign_folds(std::span<const int> labels, const CrossValPlan& plan) {
  plan.validate();
  const std::size_t n = labels.size();
  if (n < plan.folds) {
    throw Error(ErrorCode::kInsufficientData, std::to_string(n) + " rows cannot fill " +
                                                  std::to_string(plan.folds) + " folds");
  }
  if (plan.stratified) {
    std::map<int, std::size_t> sizes;
    for (const int l : labels) ++sizes[l];
    for (const auto& [label, count] : sizes) {
      if (count < plan.folds) {
        throw Error(ErrorCode::kStratification,
                    "class " + std::to_string(label) + " has " + std::to_string(count) +
                        " rows, fewer than " + std::to_string(plan.folds) + " folds");
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_stream(plan.seed, 0);
  shuffle_in_place(order, rng);

  std::vector<std::size_t> fold(n);
  std::map<int, std::size_t> dealt;
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t row = order[pos];
    const std::size_t slot = plan.stratified ? dealt[labels[row]]++ : pos;
    fold[row] = slot % plan.folds;
  }
  return fold;
}

const char* to_string(FeatureSet set) {
  return set == FeatureSet::kXyz ? "xyz" : "xyz+coefficients";
}

const char* to_string(ClassifierKind kind) {
  return kind == ClassifierKind::kKnn ? "knn" : "rf";
}

ClassifierKind parse_classifier(const std::string& name) {
  if (name == "knn") return ClassifierKind::kKnn;
  if (name == "rf" || name == "random-forest") return ClassifierKind::kRandomForest;
  throw Error(ErrorCode::kConfiguration, "unknown classifier '" + name + "'");
}

FeatureMatrix StandardPipeline::select(const FeatureMatrix& x) const {
  if (config_.features == FeatureSet::kAll) return x;
  std::vector<std::size_t> cols;
  for (const char* name : {"x", "y", "z"}) {
    const auto it = std::find(x.column_names.begin(), x.column_names.end(), name);
    if (it == x.column_names.end()) {
      throw Error(ErrorCode::kDimension, std::string("feature matrix has no '") + name + "' column");
    }
    cols.push_back(static_cast<std::size_t>(it - x.column_names.begin()));
  }
  return x.select_columns(cols);
}

std::vector<int> StandardPipeline::fit_predict(const FeatureMatrix& train,
                                               const FeatureMatrix& test,
                                               unsigned threads) const {
  FeatureMatrix train_x = select(train);
  FeatureMatrix test_x = select(test);
  if (config_.pca_components) {
    const PcaModel pca = fit_pca(train_x, *config_.pca_components);
    train_x = transform(pca, train_x);
    test_x = transform(pca, test_x);
  }
  if (config_.classifier == ClassifierKind::kKnn) {
    const KnnModel model(std::move(train_x), config_.knn_k);
    return labels_of(model.predict(test_x, threads));
  }
  const RandomForestModel forest = rf_fit(train_x, config_.forest, threads);
  return labels_of(rf_predict(forest, test_x, threads));
}

nlohmann::json StandardPipeline::describe() const {
  nlohmann::json j{{"features", to_string(config_.features)},
                   {"classifier", to_string(config_.classifier)}};
  j["pca_components"] =
      config_.pca_components ? nlohmann::json(*config_.pca_components) : nlohmann::json(nullptr);
  if (config_.classifier == ClassifierKind::kKnn) {
    j["knn"] = {{"k", config_.knn_k}, {"distance", "euclidean"}, {"weights", "uniform"}};
  } else {
    j["random_forest"] = config_.forest;
  }
  return j;
}

void to_json(nlohmann::json& j, const EvaluationReport& r) {
  j = nlohmann::json{{"per_fold_f1", r.per_fold_f1},
                     {"mean_f1", r.mean_f1},
                     {"std_f1", r.std_f1},
                     {"f1_average", to_string(r.average)},
                     {"classes", r.classes},
                     {"confusion", r.confusion},
                     {"fold_sizes", r.fold_sizes},
                     {"config", r.config}};
}

void from_json(const nlohmann::json& j, EvaluationReport& r) {
  r.per_fold_f1 = j.at("per_fold_f1").get<std::vector<double>>();
  r.mean_f1 = j.at("mean_f1").get<double>();
  r.std_f1 = j.at("std_f1").get<double>();
  r.average = parse_f1_average(j.value("f1_average", std::string("macro")));
  r.classes = j.value("classes", std::vector<int>{});
  r.confusion = j.value("confusion", std::vector<std::vector<std::uint64_t>>{});
  r.fold_sizes = j.value("fold_sizes", std::vector<std::size_t>{});
  r.config = j.value("config", nlohmann::json::object());
}

EvaluationReport cross_validate(const FeatureMatrix& features, const CrossValPlan& plan,
                                const Pipeline& pipeline, F1Average average, unsigned threads) {
  const auto& labels = features.require_labels();
  const auto fold_of = assign_folds(labels, plan);

  EvaluationReport report;
  report.average = average;
  report.classes = labels;
  std::sort(report.classes.begin(), report.classes.end());
  report.classes.erase(std::unique(report.classes.begin(), report.classes.end()),
                       report.classes.end());
  report.confusion.assign(report.classes.size(),
                          std::vector<std::uint64_t>(report.classes.size(), 0));

  for (std::size_t f = 0; f < plan.folds; ++f) {
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    for (std::size_t r = 0; r < features.rows; ++r) {
      (fold_of[r] == f ? test_rows : train_rows).push_back(r);
    }
    const FeatureMatrix train = features.select_rows(train_rows);
    const FeatureMatrix test_labeled = features.select_rows(test_rows);
    const auto predicted = pipeline.fit_predict(train, test_labeled.without_labels(), threads);
    if (predicted.size() != test_rows.size()) {
      throw Error(ErrorCode::kDimension, "pipeline returned the wrong number of predictions");
    }
    const auto& truth = *test_labeled.labels;
    report.per_fold_f1.push_back(f1_score(truth, predicted, average));
    report.fold_sizes.push_back(test_rows.size());
    const auto fold_confusion = confusion_matrix(truth, predicted, report.classes);
    for (std::size_t i = 0; i < report.classes.size(); ++i) {
      for (std::size_t j = 0; j < report.classes.size(); ++j) {
        report.confusion[i][j] += fold_confusion[i][j];
      }
    }
  }

  const double k = static_cast<double>(report.per_fold_f1.size());
  report.mean_f1 = std::accumulate(report.per_fold_f1.begin(), report.per_fold_f1.end(), 0.0) / k;
  double ss = 0.0;
  for (const double v : report.per_fold_f1) ss += (v - report.mean_f1) * (v - report.mean_f1);
  report.std_f1 = std::sqrt(ss / (k - 1.0));

  report.config = {{"pipeline", pipeline.describe()},
                   {"cross_validation",
                    {{"folds", plan.folds}, {"seed", plan.seed}, {"stratified", plan.stratified}}},
                   {"f1_average", to_string(average)}};
  return report;
}

}  // namespace prodcoef
