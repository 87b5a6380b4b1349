#include "amaq/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <thread>

#include "amaq/error.hpp"
#include "amaq/rng.hpp"

namespace amaq {

std::string to_string(System s) {
  switch (s) {
    case System::ContextCnn:
      return "context-cnn";
    case System::BaselineCnn:
      return "baseline-cnn";
    case System::LogReg:
      return "logreg";
  }
  return "context-cnn";
}

System system_from_string(const std::string& name) {
  if (name == "context-cnn" || name == "cnn") return System::ContextCnn;
  if (name == "baseline-cnn" || name == "baseline") return System::BaselineCnn;
  if (name == "logreg" || name == "lr") return System::LogReg;
  fail(ErrorCode::InvalidArgument, "unknown system '" + name + "'");
}

std::uint64_t run_seed(std::uint64_t base, std::size_t run) { return derive_seed(base, {run}); }

SystemSpec system_spec_from_json(const nlohmann::json& j, std::size_t dim) {
  using nlohmann::json;
  if (!j.is_object()) fail(ErrorCode::InvalidArgument, "run configuration must be a JSON object");
  SystemSpec spec;
  try {
    spec.system = system_from_string(j.value("system", std::string("context-cnn")));
    cnn::ModelConfig& c = spec.cnn_config;
    c.dim = dim;
    c.length = j.value("length", std::size_t{60});
    c.seed = j.value("seed", std::uint64_t{0});

    if (spec.system == System::BaselineCnn) {
      const json b = j.value("baseline", json::object());
      c.window_sizes = {b.value("window", std::size_t{3})};
      c.filters = {b.value("filters", std::size_t{100})};
    } else {
      const json a = j.value("allocation", json::object());
      const std::string mode = a.value("mode", std::string("paper"));
      if (mode != "paper")
        fail(ErrorCode::InvalidArgument,
             "allocation mode '" + mode + "' needs explicit window_sizes/filters (see the ngrams command)");
      const FilterAllocation alloc = derive_allocation({}, a.value("x", std::size_t{5}), AllocationMode::Paper);
      c.window_sizes.clear();
      c.filters.clear();
      for (const auto& [n, count] : alloc.counts) {
        c.window_sizes.push_back(n);
        c.filters.push_back(count);
      }
    }
    if (j.contains("window_sizes")) c.window_sizes = j.at("window_sizes").get<std::vector<std::size_t>>();
    if (j.contains("filters")) c.filters = j.at("filters").get<std::vector<std::size_t>>();
    if (j.contains("activation")) c.activation = cnn::activation_from_string(j.at("activation").get<std::string>());
    c.dropout = j.value("dropout", c.dropout);
    if (j.contains("class_weights")) {
      const auto w = j.at("class_weights").get<std::vector<double>>();
      if (w.size() != 2) fail(ErrorCode::InvalidArgument, "class_weights needs two values");
      c.weight_pos = w[0];
      c.weight_neg = w[1];
    }
    c.embeddings_trainable = j.value("embeddings_trainable", false);

    const json t = j.value("training", json::object());
    spec.cnn_training = cnn::train_options_from_json(t);
    spec.cnn_training.workers = t.value("workers", 1u);

    const json l = j.value("logreg", json::object());
    spec.logreg.lambda = l.value("lambda", spec.logreg.lambda);
    spec.logreg.binary = l.value("binary", spec.logreg.binary);
    spec.logreg.min_document_frequency = l.value("min_df", spec.logreg.min_document_frequency);
    spec.logreg.max_iterations = l.value("max_iterations", spec.logreg.max_iterations);
    spec.logreg.tolerance = l.value("tolerance", spec.logreg.tolerance);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("run configuration: ") + e.what());
  }
  if (spec.system != System::LogReg) spec.cnn_config.validate();
  return spec;
}

nlohmann::json system_spec_to_json(const SystemSpec& spec) {
  using nlohmann::json;
  const cnn::ModelConfig& c = spec.cnn_config;
  json j;
  j["system"] = to_string(spec.system);
  j["seed"] = c.seed;
  if (spec.system == System::LogReg) {
    j["logreg"] = json{{"lambda", spec.logreg.lambda},
                       {"binary", spec.logreg.binary},
                       {"min_df", spec.logreg.min_document_frequency},
                       {"max_iterations", spec.logreg.max_iterations},
                       {"tolerance", spec.logreg.tolerance}};
    return j;
  }
  j["length"] = c.length;
  j["dim"] = c.dim;
  j["window_sizes"] = c.window_sizes;
  j["filters"] = c.filters;
  j["activation"] = cnn::to_string(c.activation);
  j["dropout"] = c.dropout;
  j["class_weights"] = {c.weight_pos, c.weight_neg};
  j["embeddings_trainable"] = c.embeddings_trainable;
  j["training"] = cnn::train_options_to_json(spec.cnn_training);
  j["training"]["workers"] = spec.cnn_training.workers;
  return j;
}

namespace {

struct Encoded {
  std::vector<EncodedQuestion> train;
  std::vector<EncodedQuestion> valid;
};

Encoded encode_both(const std::vector<QuestionRecord>& train, const std::vector<QuestionRecord>& valid,
                    const EmbeddingTable& table, std::size_t length) {
  Encoded e;
  for (const auto& r : train) e.train.push_back(encode(std::span<const std::string>(r.tokens), table, length, r.label));
  for (const auto& r : valid) e.valid.push_back(encode(std::span<const std::string>(r.tokens), table, length, r.label));
  return e;
}

RunResult train_cnn(cnn::ModelConfig config, const cnn::TrainOptions& options, const Encoded& data,
                    std::shared_ptr<const EmbeddingTable> embeddings, std::uint64_t seed) {
  config.seed = seed;
  cnn::Model model = cnn::init_model(config, std::move(embeddings));
  const cnn::TrainResult tr = cnn::train(model, data.train, data.valid, options);
  return {tr.best_valid_auc, tr.best_epoch};
}

}  // namespace

RunResult train_and_score(const SystemSpec& spec, const std::vector<QuestionRecord>& train,
                          const std::vector<QuestionRecord>& valid,
                          std::shared_ptr<const EmbeddingTable> embeddings, std::uint64_t seed) {
  if (valid.empty()) fail(ErrorCode::InvalidArgument, "scoring needs a validation set");
  if (spec.system == System::LogReg) {
    const logreg::Model m = logreg::train_on_records(train, spec.logreg);
    std::vector<int> labels;
    for (const auto& r : valid) labels.push_back(r.label);
    return {auc(logreg::predict(m, valid), labels), 0};
  }
  if (!embeddings) fail(ErrorCode::InvalidArgument, "CNN systems need an embedding table");
  const Encoded data = encode_both(train, valid, *embeddings, spec.cnn_config.length);
  return train_cnn(spec.cnn_config, spec.cnn_training, data, std::move(embeddings), seed);
}

std::vector<GridCell> run_grid(const SystemSpec& base, const GridOptions& options,
                               const std::vector<QuestionRecord>& train,
                               const std::vector<QuestionRecord>& valid,
                               std::shared_ptr<const EmbeddingTable> embeddings) {
  if (options.window_sizes.empty() || options.filter_counts.empty())
    fail(ErrorCode::InvalidArgument, "grid needs at least one window size and one filter count");
  if (options.runs == 0) fail(ErrorCode::InvalidArgument, "grid needs at least one run");
  if (!embeddings) fail(ErrorCode::InvalidArgument, "grid needs an embedding table");

  const std::size_t n_cells = options.window_sizes.size() * options.filter_counts.size();
  std::vector<GridCell> cells(n_cells);
  for (std::size_t fi = 0; fi < options.filter_counts.size(); ++fi)
    for (std::size_t wi = 0; wi < options.window_sizes.size(); ++wi) {
      GridCell& c = cells[fi * options.window_sizes.size() + wi];
      c.window = options.window_sizes[wi];
      c.filters = options.filter_counts[fi];
      c.aucs.assign(options.runs, std::numeric_limits<double>::quiet_NaN());
    }

  std::vector<std::size_t> order(n_cells);
  std::iota(order.begin(), order.end(), 0);
  if (options.execution_order) {
    order = *options.execution_order;
    std::vector<std::size_t> check = order;
    std::sort(check.begin(), check.end());
    std::vector<std::size_t> expected(n_cells);
    std::iota(expected.begin(), expected.end(), 0);
    if (check != expected) fail(ErrorCode::InvalidArgument, "execution order must permute all grid cells");
  }

  // One encoded snapshot shared by every cell.
  const Encoded data = encode_both(train, valid, *embeddings, base.cnn_config.length);

  // Tasks are (cell, run) in execution order; workers pull the next task.
  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  for (std::size_t c : order)
    for (std::size_t r = 0; r < options.runs; ++r) tasks.emplace_back(c, r);
  std::vector<std::string> task_errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      const auto [c, r] = tasks[t];
      cnn::ModelConfig config = base.cnn_config;
      config.window_sizes = {cells[c].window};
      config.filters = {cells[c].filters};
      try {
        cells[c].aucs[r] =
            train_cnn(config, base.cnn_training, data, embeddings, derive_seed(options.seed, {c, r}))
                .valid_auc;
      } catch (const std::exception& e) {
        task_errors[t] = e.what();
      }
    }
  };
  const unsigned threads = std::max(1u, options.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t t = 0; t < tasks.size(); ++t)
    if (!task_errors[t].empty() && cells[tasks[t].first].error.empty())
      cells[tasks[t].first].error = task_errors[t];
  for (auto& c : cells) {
    if (!c.error.empty()) {
      c.mean_auc = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    c.mean_auc = std::accumulate(c.aucs.begin(), c.aucs.end(), 0.0) / static_cast<double>(c.aucs.size());
  }
  return cells;
}

void write_grid_csv(std::ostream& out, const std::vector<GridCell>& cells) {
  out << "filters,window,runs,mean_auc,min_auc,max_auc,error\n";
  char buf[256];
  for (const auto& c : cells) {
    if (!c.error.empty()) {
      std::string err = c.error;
      std::replace(err.begin(), err.end(), '"', '\'');
      out << c.filters << ',' << c.window << ',' << c.aucs.size() << ",,,,\"" << err << "\"\n";
      continue;
    }
    const auto [lo, hi] = std::minmax_element(c.aucs.begin(), c.aucs.end());
    std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%.6f,%.6f,%.6f,\n", c.filters, c.window, c.aucs.size(),
                  c.mean_auc, *lo, *hi);
    out << buf;
  }
}

std::vector<QuestionRecord> subsample(const std::vector<QuestionRecord>& records, std::size_t size,
                                      std::uint64_t seed) {
  if (size > records.size())
    fail(ErrorCode::InvalidArgument, "subsample of " + std::to_string(size) + " exceeds the " +
                                         std::to_string(records.size()) + " available records");
  std::vector<QuestionRecord> ordered = temporal_order(records, seed);
  ordered.resize(size);
  std::sort(ordered.begin(), ordered.end(), [](const QuestionRecord& a, const QuestionRecord& b) {
    return std::tie(a.created_utc, a.thread_id, a.post_id) < std::tie(b.created_utc, b.thread_id, b.post_id);
  });
  return ordered;
}

std::vector<CurvePoint> learning_curve(const SystemSpec& spec, const CurveOptions& options,
                                       const std::vector<QuestionRecord>& train,
                                       const std::vector<QuestionRecord>& valid,
                                       std::shared_ptr<const EmbeddingTable> embeddings) {
  if (options.runs == 0) fail(ErrorCode::InvalidArgument, "learning curve needs at least one run");
  for (std::size_t s : options.sizes)
    if (s > train.size())
      fail(ErrorCode::InvalidArgument, "training size " + std::to_string(s) + " exceeds the " +
                                           std::to_string(train.size()) + " available records");
  std::vector<CurvePoint> out;
  for (std::size_t s : options.sizes) {
    std::vector<double> aucs;
    for (std::size_t r = 0; r < options.runs; ++r) {
      const auto sample = subsample(train, s, derive_seed(options.seed, {r, 7}));
      aucs.push_back(train_and_score(spec, sample, valid, embeddings, run_seed(options.seed, r)).valid_auc);
    }
    out.push_back({s, RunSummary::of(std::move(aucs))});
  }
  return out;
}

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& points) {
  out << "size,runs,mean_auc,min_auc,max_auc\n";
  char buf[160];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.6f,%.6f,%.6f\n", p.size, p.summary.values.size(),
                  p.summary.mean, p.summary.min, p.summary.max);
    out << buf;
  }
}

}  // namespace amaq
