#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "prodcoef/cross_validation.hpp"
#include "prodcoef/metrics.hpp"
#include "prodcoef/pointcloud_io.hpp"
#include "prodcoef/synth.hpp"

namespace prodcoef::cli {

struct ComponentRange {
  std::size_t lo = 3;
  std::size_t hi = 10;
};

// "3..10" or "7".
ComponentRange parse_component_range(const std::string& text);

struct RunConfig {
  std::string input;
  std::string format = "auto";  // las, csv, or auto (by extension)
  bool has_label = false;
  NormalizeMode normalize = NormalizeMode::kPerAxis;
  double radius = 2.0;
  bool include_center = true;

  std::string features;  // feature CSV for pca/train/evaluate
  std::string reports;   // reports JSON for report
  ComponentRange components;
  bool components_given = false;
  int table = 0;  // 1, 2, or 0 for both
  std::vector<ClassifierKind> classifiers{ClassifierKind::kKnn, ClassifierKind::kRandomForest};
  std::size_t k = 10;
  std::size_t trees = 100;
  std::size_t max_depth = 0;
  std::size_t folds = 5;
  F1Average f1 = F1Average::kMacro;

  SceneParams scene;
  std::string output;  // explicit output file for synth

  std::uint64_t seed = 42;
  unsigned threads = 0;
  std::filesystem::path out_dir = ".";
};

// Configuration as embedded in artifacts. Leaves out the output directory and
// thread count, which never change results.
nlohmann::json describe(const RunConfig& config, const std::string& command);

// Each returns the path of its main artifact.
std::filesystem::path cmd_ingest(const RunConfig& config, std::ostream& log);
std::filesystem::path cmd_synth(const RunConfig& config, std::ostream& log);
std::filesystem::path cmd_features(const RunConfig& config, std::ostream& log);
std::filesystem::path cmd_pca(const RunConfig& config, std::ostream& log);
std::filesystem::path cmd_train(const RunConfig& config, std::ostream& log);
std::filesystem::path cmd_evaluate(const RunConfig& config, std::ostream& log);
std::filesystem::path cmd_run(const RunConfig& config, std::ostream& log);
std::filesystem::path cmd_report(const RunConfig& config, std::ostream& log);

// Parses arguments (without the program name), dispatches, and maps failures
// to exit codes: 0 success, 1 validation, 2 I/O, 3 data consistency.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace prodcoef::cli
