#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "amaq/error.hpp"
#include "amaq/metrics.hpp"

using namespace amaq;

namespace {

// Every positive/negative pair, counted directly.
double pair_count_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double credit = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (y[i] == 1 && y[j] == 0) {
        pairs += 1;
        credit += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
      }
  return credit / pairs;
}

QuestionRecord rec(const std::string& id) {
  QuestionRecord r;
  r.thread_id = "t";
  r.post_id = id;
  return r;
}

}  // namespace

TEST_CASE("worked AUC example") {
  const std::vector<double> s{0.9, 0.8, 0.7, 0.6};
  const std::vector<int> y{1, 0, 1, 0};
  CHECK(auc(s, y) == 0.75);
  CHECK(trapezoid_area(roc_curve(s, y)) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("AUC against pair counting") {
  std::mt19937 gen(31);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 2 + gen() % 60;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse scores so ties are common.
      s[i] = static_cast<double>(gen() % 7) / 7.0;
      y[i] = static_cast<int>(gen() % 2);
    }
    y[0] = 1;
    y[1] = 0;
    const double want = pair_count_auc(s, y);
    CHECK(std::abs(auc(s, y) - want) < 1e-12);
    const auto roc = roc_curve(s, y);
    CHECK(std::abs(trapezoid_area(roc) - want) < 1e-12);
    CHECK(roc.front().fpr == 0.0);
    CHECK(roc.front().tpr == 0.0);
    CHECK(roc.back().fpr == 1.0);
    CHECK(roc.back().tpr == 1.0);
    for (std::size_t i = 1; i < roc.size(); ++i) {
      CHECK(roc[i].fpr >= roc[i - 1].fpr);
      CHECK(roc[i].tpr >= roc[i - 1].tpr);
    }
  }
}

TEST_CASE("degenerate scorers") {
  std::vector<int> y{1, 0, 0, 1, 1, 0};
  const std::vector<double> constant(6, 0.3);
  CHECK(auc(constant, y) == 0.5);
  // Tied block moves straight from (0,0) to (1,1).
  const auto roc = roc_curve(constant, y);
  CHECK(roc.size() == 2);
  std::vector<double> perfect;
  for (int v : y) perfect.push_back(v);
  CHECK(auc(perfect, y) == 1.0);
  std::vector<double> reversed;
  for (int v : y) reversed.push_back(-v);
  CHECK(auc(reversed, y) == 0.0);
}

TEST_CASE("AUC errors") {
  const std::vector<double> s{0.1, 0.2};
  CHECK_THROWS_AS(auc(s, std::vector<int>{1, 1}), Error);
  CHECK_THROWS_AS(auc(s, std::vector<int>{1}), Error);
  CHECK_THROWS_AS(auc(s, std::vector<int>{1, 2}), Error);
  try {
    auc(s, std::vector<int>{0, 0});
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("positives=0") != std::string::npos);
  }
}

TEST_CASE("evaluate and ROC CSV") {
  const std::vector<double> s{0.9, 0.8, 0.7, 0.6};
  const std::vector<int> y{1, 0, 1, 0};
  const EvalReport r = evaluate(s, y);
  CHECK(r.auc == 0.75);
  CHECK(r.n_pos == 2);
  CHECK(r.n_neg == 2);
  std::ostringstream out;
  write_roc_csv(out, r.roc_points);
  CHECK(out.str().rfind("fpr,tpr\n0,0\n", 0) == 0);
  CHECK(out.str().size() > 20);
}

TEST_CASE("pairwise agreement") {
  std::vector<QuestionPair> pairs{{rec("a1"), rec("u1")}, {rec("a2"), rec("u2")}, {rec("a3"), rec("u3")},
                                  {rec("a4"), rec("u4")}};
  const std::unordered_map<std::string, double> scores{{"a1", 0.9}, {"u1", 0.1}, {"a2", 0.2}, {"u2", 0.8},
                                                       {"a3", 0.5}, {"u3", 0.5}, {"a4", 0.7}, {"u4", 0.6}};
  CHECK(pairwise_agreement(scores, pairs) == (1 + 0 + 0.5 + 1) / 4.0);

  std::unordered_map<std::string, double> flat;
  for (const auto& [k, _] : scores) flat[k] = 0.4;
  CHECK(pairwise_agreement(flat, pairs) == 0.5);

  std::unordered_map<std::string, double> missing = scores;
  missing.erase("u3");
  CHECK_THROWS_AS(pairwise_agreement(missing, pairs), Error);
  CHECK_THROWS_AS(pairwise_agreement(scores, {}), Error);
}

TEST_CASE("run summary") {
  const RunSummary s = RunSummary::of({0.7, 0.9, 0.8});
  CHECK(s.mean == doctest::Approx(0.8));
  CHECK(s.min == 0.7);
  CHECK(s.max == 0.9);
  const RunSummary same = RunSummary::of({0.1, 0.1, 0.1});
  CHECK(same.mean == 0.1);
  CHECK_THROWS_AS(RunSummary::of({}), Error);
}
