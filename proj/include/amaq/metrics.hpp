#pragma once

#include <cstddef>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "amaq/corpus.hpp"

namespace amaq {

struct RocPoint {
  double fpr = 0;
  double tpr = 0;
};

struct EvalReport {
  double auc = 0;
  std::vector<RocPoint> roc_points;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
};

/// Mann-Whitney AUC: (concordant + 0.5 * tied) / (n_pos * n_neg), from
/// mid-ranks. Labels are 0/1; both classes must be present.
double auc(std::span<const double> scores, std::span<const int> labels);

/// Threshold sweep over distinct scores in descending order, starting at
/// (0, 0) and ending at (1, 1). A block of tied scores moves diagonally.
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels);

double trapezoid_area(std::span<const RocPoint> points);

EvalReport evaluate(std::span<const double> scores, std::span<const int> labels);

void write_roc_csv(std::ostream& out, std::span<const RocPoint> points);

/// Fraction of pairs where the answered question outscores the unanswered
/// one; ties count one half. Scores are keyed by post id.
double pairwise_agreement(const std::unordered_map<std::string, double>& scores,
                          std::span<const QuestionPair> pairs);

struct RunSummary {
  std::vector<double> values;
  double mean = 0;
  double min = 0;
  double max = 0;

  static RunSummary of(std::vector<double> values);
};

}  // namespace amaq
