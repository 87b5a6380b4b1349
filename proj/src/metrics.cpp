#include "amaq/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "amaq/error.hpp"

namespace amaq {

namespace {

std::pair<std::size_t, std::size_t> class_counts(std::span<const double> scores,
                                                  std::span<const int> labels) {
  if (scores.size() != labels.size())
    fail(ErrorCode::Shape, "scores and labels differ in length (" + std::to_string(scores.size()) +
                               " vs " + std::to_string(labels.size()) + ")");
  std::size_t pos = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) fail(ErrorCode::InvalidArgument, "labels must be 0 or 1");
    pos += static_cast<std::size_t>(y);
  }
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0)
    fail(ErrorCode::InvalidArgument, "AUC needs both classes (positives=" + std::to_string(pos) +
                                         ", negatives=" + std::to_string(neg) + ")");
  return {pos, neg};
}

std::vector<std::size_t> descending_order(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace

double auc(std::span<const double> scores, std::span<const int> labels) {
  const auto [n_pos, n_neg] = class_counts(scores, labels);
  // Twice the mid-rank is an integer, so the rank sum is exact.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  unsigned long long rank_sum_x2 = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const unsigned long long mid_x2 = i + 1 + j;  // (i+1) + j = 2 * mid-rank
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] == 1) rank_sum_x2 += mid_x2;
    i = j;
  }
  const unsigned long long u_x2 =
      rank_sum_x2 - static_cast<unsigned long long>(n_pos) * (n_pos + 1);
  return static_cast<double>(u_x2) /
         (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels) {
  const auto [n_pos, n_neg] = class_counts(scores, labels);
  const auto order = descending_order(scores);
  std::vector<RocPoint> points{{0.0, 0.0}};
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]] == 1)
        ++tp;
      else
        ++fp;
      ++j;
    }
    points.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                      static_cast<double>(tp) / static_cast<double>(n_pos)});
    i = j;
  }
  return points;
}

double trapezoid_area(std::span<const RocPoint> points) {
  double area = 0;
  for (std::size_t i = 1; i < points.size(); ++i)
    area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) * 0.5;
  return area;
}

EvalReport evaluate(std::span<const double> scores, std::span<const int> labels) {
  EvalReport r;
  std::tie(r.n_pos, r.n_neg) = class_counts(scores, labels);
  r.auc = auc(scores, labels);
  r.roc_points = roc_curve(scores, labels);
  return r;
}

void write_roc_csv(std::ostream& out, std::span<const RocPoint> points) {
  out << "fpr,tpr\n";
  char buf[96];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.fpr, p.tpr);
    out << buf;
  }
}

double pairwise_agreement(const std::unordered_map<std::string, double>& scores,
                          std::span<const QuestionPair> pairs) {
  if (pairs.empty()) fail(ErrorCode::InvalidArgument, "no pairs to score");
  double credit = 0;
  auto score_of = [&](const QuestionRecord& r) {
    auto it = scores.find(r.post_id);
    if (it == scores.end())
      fail(ErrorCode::InvalidArgument,
           "missing score for record " + r.post_id + " (thread " + r.thread_id + ")");
    return it->second;
  };
  for (const auto& p : pairs) {
    const double a = score_of(p.answered);
    const double u = score_of(p.unanswered);
    credit += a > u ? 1.0 : (a == u ? 0.5 : 0.0);
  }
  return credit / static_cast<double>(pairs.size());
}

RunSummary RunSummary::of(std::vector<double> values) {
  if (values.empty()) fail(ErrorCode::InvalidArgument, "run summary of zero runs");
  RunSummary s;
  s.values = std::move(values);
  s.mean = std::accumulate(s.values.begin(), s.values.end(), 0.0) /
           static_cast<double>(s.values.size());
  const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
  s.min = *lo;
  s.max = *hi;
  // Floating-point summation can put the mean a ulp outside [min, max].
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

}  // namespace amaq
