#include "doctest.h"

#include <map>
#include <random>
#include <set>

#include "prodcoef/cross_validation.hpp"
#include "prodcoef/error.hpp"
#include "prodcoef/metrics.hpp"
#include "prodcoef/report.hpp"

using namespace prodcoef;

namespace {

// Column 0 carries the true label, column 1 the row id.
FeatureMatrix labeled_ids(const std::vector<int>& labels) {
  FeatureMatrix m(labels.size(), 2, {"truth", "id"});
  for (std::size_t r = 0; r < labels.size(); ++r) {
    m.at(r, 0) = labels[r];
    m.at(r, 1) = static_cast<double>(r);
  }
  m.labels = labels;
  return m;
}

class ReadsTruthColumn : public Pipeline {
 public:
  std::vector<int> fit_predict(const FeatureMatrix&, const FeatureMatrix& test,
                               unsigned) const override {
    std::vector<int> out;
    for (std::size_t r = 0; r < test.rows; ++r) out.push_back(static_cast<int>(test.at(r, 0)));
    return out;
  }
  nlohmann::json describe() const override { return {{"stub", "truth"}}; }
};

class Constant : public Pipeline {
 public:
  explicit Constant(int label) : label_(label) {}
  std::vector<int> fit_predict(const FeatureMatrix&, const FeatureMatrix& test,
                               unsigned) const override {
    return std::vector<int>(test.rows, label_);
  }
  nlohmann::json describe() const override { return {{"stub", "constant"}}; }

 private:
  int label_;
};

// Fails the run if test labels leak, and records which rows each fold saw.
class Inspector : public Pipeline {
 public:
  mutable std::vector<std::pair<std::set<int>, std::set<int>>> seen;
  std::vector<int> fit_predict(const FeatureMatrix& train, const FeatureMatrix& test,
                               unsigned) const override {
    if (test.has_labels()) throw std::logic_error("test labels visible to the pipeline");
    std::set<int> tr, te;
    for (std::size_t r = 0; r < train.rows; ++r) tr.insert(static_cast<int>(train.at(r, 1)));
    for (std::size_t r = 0; r < test.rows; ++r) te.insert(static_cast<int>(test.at(r, 1)));
    seen.emplace_back(tr, te);
    return std::vector<int>(test.rows, train.labels->front());
  }
  nlohmann::json describe() const override { return {{"stub", "inspector"}}; }
};

EvaluationReport fake_report(FeatureSet set, std::optional<std::size_t> n, ClassifierKind kind,
                             double mean, double sd) {
  PipelineConfig pc;
  pc.features = set;
  pc.pca_components = n;
  pc.classifier = kind;
  EvaluationReport r;
  r.mean_f1 = mean;
  r.std_f1 = sd;
  r.config = {{"pipeline", StandardPipeline(pc).describe()}};
  return r;
}

}  // namespace

TEST_CASE("macro F1 hand fixture") {
  const std::vector<int> truth{0, 0, 0, 1}, pred{0, 0, 1, 1};
  // Class 0: P = 1, R = 2/3, F1 = 4/5. Class 1: P = 1/2, R = 1, F1 = 2/3.
  CHECK(std::abs(macro_f1(truth, pred) - 11.0 / 15.0) <= 1e-12);
  CHECK(std::abs(micro_f1(truth, pred) - 0.75) <= 1e-12);
  CHECK(std::abs(weighted_f1(truth, pred) - 23.0 / 30.0) <= 1e-12);
  CHECK(f1_score(truth, pred, F1Average::kMacro) == macro_f1(truth, pred));
}

TEST_CASE("macro F1 edge cases") {
  const std::vector<int> same{3, 3, 5};
  CHECK(macro_f1(same, same) == 1.0);
  // Classes are those present in the truth; a class that is only ever
  // predicted lowers precision but is not averaged in itself.
  const std::vector<int> truth{1, 1}, pred{1, 2};
  CHECK(std::abs(macro_f1(truth, pred) - 2.0 / 3.0) <= 1e-12);
  CHECK_THROWS_AS(macro_f1(truth, std::vector<int>{1}), Error);
}

TEST_CASE("macro F1 is invariant under relabeling classes") {
  std::mt19937_64 rng(4);
  std::vector<int> truth(200), pred(200);
  for (std::size_t i = 0; i < 200; ++i) {
    truth[i] = static_cast<int>(rng() % 4);
    pred[i] = rng() % 3 == 0 ? static_cast<int>(rng() % 4) : truth[i];
  }
  const std::map<int, int> rename{{0, 17}, {1, 2}, {2, 9}, {3, -4}};
  std::vector<int> t2, p2;
  for (std::size_t i = 0; i < 200; ++i) {
    t2.push_back(rename.at(truth[i]));
    p2.push_back(rename.at(pred[i]));
  }
  CHECK(macro_f1(truth, pred) == doctest::Approx(macro_f1(t2, p2)).epsilon(1e-15));
}

TEST_CASE("confusion matrix counts") {
  const std::vector<int> truth{2, 2, 5, 6}, pred{2, 5, 5, 2}, classes{2, 5, 6};
  const auto m = confusion_matrix(truth, pred, classes);
  CHECK(m[0] == std::vector<std::uint64_t>{1, 1, 0});
  CHECK(m[1] == std::vector<std::uint64_t>{0, 1, 0});
  CHECK(m[2] == std::vector<std::uint64_t>{1, 0, 0});
}

TEST_CASE("F1 averaging names") {
  CHECK(parse_f1_average("weighted") == F1Average::kWeighted);
  CHECK(std::string(to_string(F1Average::kMicro)) == "micro");
  CHECK_THROWS_AS(parse_f1_average("binary"), Error);
}

TEST_CASE("stratified folds partition rows and balance every class") {
  std::vector<int> labels;
  for (int c = 0; c < 4; ++c)
    for (int i = 0; i < 23 + 7 * c; ++i) labels.push_back(c * 3);
  const CrossValPlan plan{5, 42, true};
  const auto fold = assign_folds(labels, plan);
  std::map<int, std::vector<std::size_t>> per_class;
  for (std::size_t r = 0; r < labels.size(); ++r) {
    REQUIRE(fold[r] < 5);
    per_class[labels[r]].resize(5);
    ++per_class[labels[r]][fold[r]];
  }
  for (const auto& [cls, counts] : per_class) {
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    CHECK(*hi - *lo <= 1);
  }
  CHECK(assign_folds(labels, plan) == fold);
  CHECK(assign_folds(labels, {5, 43, true}) != fold);
}

TEST_CASE("too few rows of a class for stratification") {
  const std::vector<int> labels{1, 1, 1, 1, 1, 2, 2, 2, 2};
  try {
    assign_folds(labels, {5, 1, true});
    FAIL("expected stratification error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kStratification);
    CHECK(e.exit_code() == 3);
  }
  CHECK_NOTHROW(assign_folds(labels, {5, 1, false}));
  CHECK_THROWS_AS(assign_folds(labels, {1, 1, true}), Error);
}

TEST_CASE("a perfect predictor scores 1 with zero spread") {
  std::vector<int> labels;
  for (int i = 0; i < 60; ++i) labels.push_back(i % 3 + 1);
  const auto r = cross_validate(labeled_ids(labels), {}, ReadsTruthColumn{});
  CHECK(r.per_fold_f1.size() == 5);
  CHECK(r.mean_f1 == 1.0);
  CHECK(r.std_f1 == 0.0);
  CHECK(r.confusion[0][0] == 20);
  CHECK(r.config.at("pipeline").at("stub") == "truth");
}

TEST_CASE("a constant predictor on a 20-row, two-class fixture") {
  // Each stratified fold holds two rows of each class. Predicting class 1
  // everywhere: class 1 has P = 1/2, R = 1, F1 = 2/3; class 2 has F1 = 0.
  std::vector<int> labels(10, 1);
  labels.insert(labels.end(), 10, 2);
  const auto r = cross_validate(labeled_ids(labels), {}, Constant{1});
  for (const double f : r.per_fold_f1) CHECK(std::abs(f - 1.0 / 3.0) <= 1e-12);
  CHECK(r.fold_sizes == std::vector<std::size_t>(5, 4));
  CHECK(std::abs(r.mean_f1 - 1.0 / 3.0) <= 1e-12);
  CHECK(r.std_f1 <= 1e-12);
}

TEST_CASE("pipelines never see test labels and folds are disjoint") {
  std::vector<int> labels;
  for (int i = 0; i < 50; ++i) labels.push_back(i % 2);
  const Inspector inspector;
  cross_validate(labeled_ids(labels), {}, inspector);
  REQUIRE(inspector.seen.size() == 5);
  std::set<int> all_test;
  for (const auto& [train, test] : inspector.seen) {
    for (const int id : test) CHECK(train.count(id) == 0);
    CHECK(train.size() + test.size() == 50);
    all_test.insert(test.begin(), test.end());
  }
  CHECK(all_test.size() == 50);
}

TEST_CASE("cross validation of real pipelines is deterministic across threads") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  FeatureMatrix m(150, 4, {"x", "y", "z", "a_s"});
  m.labels.emplace();
  for (std::size_t r = 0; r < 150; ++r) {
    const int label = static_cast<int>(r % 3);
    for (std::size_t c = 0; c < 4; ++c) m.at(r, c) = g(rng) + (c == 3 ? label : 0.0);
    m.labels->push_back(label);
  }
  PipelineConfig pc;
  pc.classifier = ClassifierKind::kRandomForest;
  pc.forest.trees = 10;
  pc.pca_components = 3;
  const StandardPipeline p(pc);
  const nlohmann::json a = cross_validate(m, {}, p, F1Average::kMacro, 1);
  const nlohmann::json b = cross_validate(m, {}, p, F1Average::kMacro, 3);
  CHECK(a.dump() == b.dump());

  PipelineConfig xyz;
  xyz.features = FeatureSet::kXyz;
  CHECK(StandardPipeline(xyz).select(m).cols == 3);
}

TEST_CASE("report JSON round trip") {
  std::vector<int> labels;
  for (int i = 0; i < 30; ++i) labels.push_back(i % 2);
  const auto r = cross_validate(labeled_ids(labels), {}, Constant{0});
  const nlohmann::json j = r;
  const auto back = j.get<EvaluationReport>();
  CHECK(back.per_fold_f1 == r.per_fold_f1);
  CHECK(back.mean_f1 == r.mean_f1);
  CHECK(nlohmann::json(back).dump() == j.dump());
}

TEST_CASE("score cells") {
  CHECK(format_score_cell(0.85, 0.02) == "0.85 (± 0.02)");
  CHECK(format_score_cell(0.394, 0.0149) == "0.39 (± 0.01)");
}

TEST_CASE("rendering both tables") {
  std::vector<EvaluationReport> reports;
  reports.push_back(fake_report(FeatureSet::kXyz, std::nullopt, ClassifierKind::kKnn, 0.5, 0.1));
  reports.push_back(
      fake_report(FeatureSet::kXyz, std::nullopt, ClassifierKind::kRandomForest, 0.6, 0.1));
  reports.push_back(fake_report(FeatureSet::kAll, std::nullopt, ClassifierKind::kKnn, 0.7, 0.05));
  reports.push_back(
      fake_report(FeatureSet::kAll, std::nullopt, ClassifierKind::kRandomForest, 0.8, 0.04));
  for (std::size_t n = 3; n <= 10; ++n) {
    for (const auto kind : {ClassifierKind::kKnn, ClassifierKind::kRandomForest}) {
      reports.push_back(fake_report(FeatureSet::kAll, n, kind, 0.05 * static_cast<double>(n), 0.01));
    }
  }
  const auto t = render_report(reports);
  CHECK(t.table1_rows == 2);
  CHECK(t.table2_rows == 8);
  CHECK(t.table1_csv ==
        "features,knn_f1,rf_f1\n"
        "xyz,0.50 (± 0.10),0.60 (± 0.10)\n"
        "xyz+coefficients,0.70 (± 0.05),0.80 (± 0.04)\n");
  CHECK(t.table2_csv.rfind("components,knn_f1,rf_f1\n3,0.15 (± 0.01),0.15 (± 0.01)\n", 0) == 0);
  CHECK(t.table2_csv.find("\n10,0.50 (± 0.01),0.50 (± 0.01)\n") != std::string::npos);
  CHECK(t.plot_csv.rfind("n,classifier,mean_f1,std_f1\n3,knn,", 0) == 0);
  CHECK(t.table1_text.find("Original features (x,y,z)") != std::string::npos);
  CHECK(t.table2_text.find("# of Principal Components") != std::string::npos);

  CHECK_THROWS_AS(render_report({}), Error);
}

TEST_CASE("a missing classifier renders as a dash") {
  const auto t = render_report(
      {fake_report(FeatureSet::kAll, 4, ClassifierKind::kRandomForest, 0.9, 0.0)});
  CHECK(t.table1_rows == 0);
  CHECK(t.table2_csv == "components,knn_f1,rf_f1\n4,-,0.90 (± 0.00)\n");
}
