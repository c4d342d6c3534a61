#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace prodcoef {

enum class F1Average { kMacro, kMicro, kWeighted };

F1Average parse_f1_average(const std::string& name);
const char* to_string(F1Average average);

// Per class c present in `truth`: P = TP/(TP+FP), R = TP/(TP+FN), F1 the
// harmonic mean (0 when P + R = 0), averaged without weights.
double macro_f1(std::span<const int> truth, std::span<const int> predicted);

// Global TP/(TP+FP+FN) counts; equals accuracy for single-label data.
double micro_f1(std::span<const int> truth, std::span<const int> predicted);

// Per-class F1 averaged with weights proportional to true support.
double weighted_f1(std::span<const int> truth, std::span<const int> predicted);

double f1_score(std::span<const int> truth, std::span<const int> predicted, F1Average average);

// counts[i][j]: rows with truth classes[i] predicted as classes[j]. Predictions
// outside `classes` are dropped.
std::vector<std::vector<std::uint64_t>> confusion_matrix(std::span<const int> truth,
                                                         std::span<const int> predicted,
                                                         std::span<const int> classes);

}  // namespace prodcoef
