#include "prodcoef/metrics.hpp"

#include <algorithm>
#include <map>

#include "prodcoef/error.hpp"

namespace prodcoef {

F1Average parse_f1_average(const std::string& name) {
  if (name == "macro") return F1Average::kMacro;
  if (name == "micro") return F1Average::kMicro;
  if (name == "weighted") return F1Average::kWeighted;
  throw Error(ErrorCode::kConfiguration, "unknown F1 average '" + name + "'");
}

const char* to_string(F1Average average) {
  switch (average) {
    case F1Average::kMacro: return "macro";
    case F1Average::kMicro: return "micro";
    case F1Average::kWeighted: return "weighted";
  }
  return "macro";
}

namespace {

struct ClassCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t support = 0;
};

std::map<int, ClassCounts> tally(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorCode::kDimension, "truth and prediction lengths differ");
  }
  if (truth.empty()) throw Error(ErrorCode::kEmptyInput, "F1 of an empty label set");
  std::map<int, ClassCounts> counts;
  for (const int t : truth) ++counts[t].support;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == predicted[i]) {
      ++counts[truth[i]].tp;
    } else {
      ++counts[truth[i]].fn;
      const auto it = counts.find(predicted[i]);
      if (it != counts.end()) ++it->second.fp;
    }
  }
  return counts;
}

double class_f1(const ClassCounts& c) {
  const double precision = (c.tp + c.fp) == 0 ? 0.0 : static_cast<double>(c.tp) / (c.tp + c.fp);
  const double recall = (c.tp + c.fn) == 0 ? 0.0 : static_cast<double>(c.tp) / (c.tp + c.fn);
  return precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
}

}  // namespace

double macro_f1(std::span<const int> truth, std::span<const int> predicted) {
  const auto counts = tally(truth, predicted);
  double sum = 0.0;
  for (const auto& [label, c] : counts) sum += class_f1(c);
  return sum / static_cast<double>(counts.size());
}

double micro_f1(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorCode::kDimension, "truth and prediction lengths differ");
  }
  if (truth.empty()) throw Error(ErrorCode::kEmptyInput, "F1 of an empty label set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == predicted[i];
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

double weighted_f1(std::span<const int> truth, std::span<const int> predicted) {
  const auto counts = tally(truth, predicted);
  double sum = 0.0;
  for (const auto& [label, c] : counts) sum += class_f1(c) * static_cast<double>(c.support);
  return sum / static_cast<double>(truth.size());
}

double f1_score(std::span<const int> truth, std::span<const int> predicted, F1Average average) {
  switch (average) {
    case F1Average::kMicro: return micro_f1(truth, predicted);
    case F1Average::kWeighted: return weighted_f1(truth, predicted);
    case F1Average::kMacro: break;
  }
  return macro_f1(truth, predicted);
}

std::vector<std::vector<std::uint64_t>> confusion_matrix(std::span<const int> truth,
                                                         std::span<const int> predicted,
                                                         std::span<const int> classes) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorCode::kDimension, "truth and prediction lengths differ");
  }
  std::vector<std::vector<std::uint64_t>> m(classes.size(),
                                            std::vector<std::uint64_t>(classes.size(), 0));
  const auto index = [&](int label) -> std::ptrdiff_t {
    const auto it = std::find(classes.begin(), classes.end(), label);
    return it == classes.end() ? -1 : it - classes.begin();
  };
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto t = index(truth[i]);
    const auto p = index(predicted[i]);
    if (t >= 0 && p >= 0) ++m[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
  }
  return m;
}

}  // namespace prodcoef
