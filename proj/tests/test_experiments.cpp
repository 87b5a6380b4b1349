#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "amaq/error.hpp"
#include "amaq/experiments.hpp"
#include "amaq/synthetic.hpp"

using namespace amaq;
using nlohmann::json;

namespace {

SyntheticOptions small() {
  SyntheticOptions o;
  o.count = 300;
  return o;
}

SystemSpec quick(System s, std::size_t dim) {
  json j{{"system", to_string(s)}, {"length", 12}, {"training", {{"max_epochs", 8}}}};
  if (s == System::ContextCnn) {
    j["window_sizes"] = {1, 2};
    j["filters"] = {20, 20};
  }
  return system_spec_from_json(j, dim);
}

std::set<std::string> ids(const std::vector<QuestionRecord>& rs) {
  std::set<std::string> out;
  for (const auto& r : rs) out.insert(r.post_id);
  return out;
}

}  // namespace

TEST_CASE("system names") {
  for (System s : {System::ContextCnn, System::BaselineCnn, System::LogReg}) CHECK(system_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(system_from_string("svm"), Error);
}

TEST_CASE("default spec") {
  const SystemSpec s = system_spec_from_json(json::object(), 300);
  CHECK(s.system == System::ContextCnn);
  CHECK(s.cnn_config.window_sizes == std::vector<std::size_t>{1, 2, 3, 4, 5});
  CHECK(s.cnn_config.filters == std::vector<std::size_t>{5, 100, 300, 300, 300});
  CHECK(s.cnn_config.pooled_dim() == 1005);
  CHECK(s.cnn_config.length == 60);
  const SystemSpec b = system_spec_from_json(json{{"system", "baseline-cnn"}}, 300);
  CHECK(b.cnn_config.window_sizes == std::vector<std::size_t>{3});
  CHECK(b.cnn_config.filters == std::vector<std::size_t>{100});
  const SystemSpec x1 = system_spec_from_json(json{{"allocation", {{"x", 1}}}}, 300);
  CHECK(x1.cnn_config.filters == std::vector<std::size_t>{1, 20, 60, 60, 60});
}

TEST_CASE("spec JSON round trip") {
  const json in{{"system", "context-cnn"}, {"seed", 9},          {"length", 30},
                {"dropout", 0.25},          {"activation", "tanh"}, {"class_weights", {4, 1}},
                {"window_sizes", {2, 3}},  {"filters", {7, 8}},   {"training", {{"batch_size", 10}, {"workers", 2}}}};
  const SystemSpec s = system_spec_from_json(in, 16);
  const json out = system_spec_to_json(s);
  CHECK(system_spec_to_json(system_spec_from_json(out, 16)) == out);
  CHECK(out.at("class_weights") == json{4.0, 1.0});
  CHECK(out.at("training").at("workers") == 2);
  CHECK(s.cnn_training.batch_size == 10);

  const json lr = system_spec_to_json(system_spec_from_json(json{{"system", "logreg"}, {"logreg", {{"lambda", 0.1}}}}, 4));
  CHECK(lr.at("logreg").at("lambda") == 0.1);
  CHECK(system_spec_to_json(system_spec_from_json(lr, 4)) == lr);

  CHECK_THROWS_AS(system_spec_from_json(json{{"class_weights", {1}}}, 4), Error);
  CHECK_THROWS_AS(system_spec_from_json(json{{"length", "long"}}, 4), Error);
  CHECK_THROWS_AS(system_spec_from_json(json::array(), 4), Error);
  CHECK_THROWS_AS(system_spec_from_json(json{{"allocation", {{"mode", "computed"}}}}, 4), Error);
}

TEST_CASE("run seeds are distinct") {
  std::set<std::uint64_t> seen;
  for (std::size_t r = 0; r < 50; ++r) seen.insert(run_seed(3, r));
  CHECK(seen.size() == 50);
  CHECK(run_seed(3, 1) == run_seed(3, 1));
  CHECK(run_seed(3, 1) != run_seed(4, 1));
}

TEST_CASE("every system trains and scores") {
  const SyntheticOptions o = small();
  const SyntheticData d = make_synthetic(o);
  const auto valid = synthetic_records(o, 1);
  for (System s : {System::ContextCnn, System::BaselineCnn, System::LogReg}) {
    const RunResult a = train_and_score(quick(s, o.dim), d.records, valid, d.embeddings, 5);
    const RunResult b = train_and_score(quick(s, o.dim), d.records, valid, d.embeddings, 5);
    CAPTURE(to_string(s));
    CHECK(a.valid_auc == b.valid_auc);
    CHECK(a.valid_auc > 0.75);
  }
}

TEST_CASE("grid results do not depend on scheduling") {
  const SyntheticOptions o = small();
  const SyntheticData d = make_synthetic(o);
  const auto valid = synthetic_records(o, 1);
  SystemSpec base = quick(System::BaselineCnn, o.dim);
  GridOptions g;
  g.window_sizes = {1, 2, 30};  // 30 > length: that column fails
  g.filter_counts = {2, 3};
  g.runs = 2;
  g.seed = 8;
  const auto serial = run_grid(base, g, d.records, valid, d.embeddings);
  g.threads = 3;
  g.execution_order = std::vector<std::size_t>{5, 3, 1, 0, 2, 4};
  const auto shuffled = run_grid(base, g, d.records, valid, d.embeddings);
  REQUIRE(serial.size() == 6);
  for (std::size_t c = 0; c < serial.size(); ++c) {
    CHECK(serial[c].filters == g.filter_counts[c / 3]);
    CHECK(serial[c].window == g.window_sizes[c % 3]);
    for (std::size_t r = 0; r < g.runs; ++r) {
      const double a = serial[c].aucs[r], b = shuffled[c].aucs[r];
      CHECK((a == b || (std::isnan(a) && std::isnan(b))));
    }
    CHECK(serial[c].error == shuffled[c].error);
  }
  CHECK(std::isnan(serial[2].mean_auc));
  CHECK_FALSE(serial[2].error.empty());
  CHECK(serial[0].error.empty());
  std::ostringstream out;
  write_grid_csv(out, serial);
  const std::string csv = out.str();
  CHECK(csv.rfind("filters,window,runs,mean_auc,min_auc,max_auc,error\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}

TEST_CASE("subsamples are nested and temporally spread") {
  SyntheticOptions o;
  o.count = 400;
  const auto records = synthetic_records(o);
  const auto big = subsample(records, 200, 4);
  const auto mid = subsample(records, 100, 4);
  const auto tiny = subsample(records, 10, 4);
  const auto b = ids(big), m = ids(mid);
  CHECK(std::includes(b.begin(), b.end(), m.begin(), m.end()));
  for (const auto& r : tiny) CHECK(m.contains(r.post_id));
  CHECK(std::is_sorted(big.begin(), big.end(),
                       [](const auto& x, const auto& y) { return x.created_utc < y.created_utc; }));
  CHECK(ids(subsample(records, 100, 5)) != m);
  CHECK(subsample(records, 400, 4).size() == 400);
  CHECK_THROWS_AS(subsample(records, 401, 4), Error);
}

TEST_CASE("learning curve") {
  const SyntheticOptions o = small();
  const SyntheticData d = make_synthetic(o);
  const auto valid = synthetic_records(o, 1);
  CurveOptions c;
  c.sizes = {40, 300};
  c.runs = 2;
  c.seed = 1;
  const auto pts = learning_curve(quick(System::LogReg, o.dim), c, d.records, valid, d.embeddings);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].size == 40);
  CHECK(pts[1].summary.values.size() == 2);
  // At full size every run sees the same data and logistic regression is deterministic.
  CHECK(pts[1].summary.min == pts[1].summary.max);
  const auto again = learning_curve(quick(System::LogReg, o.dim), c, d.records, valid, d.embeddings);
  CHECK(again[0].summary.values == pts[0].summary.values);
  std::ostringstream out;
  write_curve_csv(out, pts);
  CHECK(out.str().rfind("size,runs,mean_auc,min_auc,max_auc\n40,2,", 0) == 0);
}
