#include "amaq/cnn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "amaq/error.hpp"
#include "amaq/metrics.hpp"
#include "amaq/rng.hpp"

namespace amaq::cnn {

using nlohmann::json;

// --- configuration ------------------------------------------------------------

ModelConfig ModelConfig::context_aware(const FilterAllocation& allocation, std::size_t dim,
                                       std::size_t length) {
  ModelConfig c;
  c.window_sizes.clear();
  c.filters.clear();
  for (const auto& [n, count] : allocation.counts) {
    c.window_sizes.push_back(n);
    c.filters.push_back(count);
  }
  c.dim = dim;
  c.length = length;
  return c;
}

ModelConfig ModelConfig::baseline(std::size_t dim, std::size_t length, std::size_t window,
                                  std::size_t filters) {
  ModelConfig c;
  c.window_sizes = {window};
  c.filters = {filters};
  c.dim = dim;
  c.length = length;
  return c;
}

std::size_t ModelConfig::pooled_dim() const {
  return std::accumulate(filters.begin(), filters.end(), std::size_t{0});
}

void ModelConfig::validate() const {
  auto bad = [](const std::string& m) { fail(ErrorCode::InvalidArgument, "model config: " + m); };
  if (window_sizes.empty()) bad("no window sizes");
  if (window_sizes.size() != filters.size()) bad("window_sizes and filters differ in length");
  if (dim == 0) bad("embedding dimension must be positive");
  if (length == 0) bad("sequence length must be positive");
  for (std::size_t i = 0; i < window_sizes.size(); ++i) {
    if (window_sizes[i] < 1 || window_sizes[i] > length)
      bad("window size " + std::to_string(window_sizes[i]) + " outside [1, " +
          std::to_string(length) + "]");
    if (filters[i] < 1) bad("filter count for window " + std::to_string(window_sizes[i]) + " is 0");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) bad("dropout must be in [0, 1)");
  if (!(weight_pos > 0.0) || !(weight_neg > 0.0)) bad("class weights must be positive");
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Relu:
      return "relu";
    case Activation::Tanh:
      return "tanh";
    case Activation::Identity:
      return "identity";
  }
  return "relu";
}

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::Relu;
  if (name == "tanh") return Activation::Tanh;
  if (name == "identity") return Activation::Identity;
  fail(ErrorCode::InvalidArgument, "unknown activation '" + name + "'");
}

json config_to_json(const ModelConfig& c) {
  return json{{"window_sizes", c.window_sizes},
              {"filters", c.filters},
              {"dim", c.dim},
              {"length", c.length},
              {"activation", to_string(c.activation)},
              {"dropout", c.dropout},
              {"class_weights", {c.weight_pos, c.weight_neg}},
              {"embeddings_trainable", c.embeddings_trainable},
              {"seed", c.seed}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  try {
    if (j.contains("window_sizes")) c.window_sizes = j.at("window_sizes").get<std::vector<std::size_t>>();
    if (j.contains("filters")) c.filters = j.at("filters").get<std::vector<std::size_t>>();
    if (j.contains("dim")) c.dim = j.at("dim").get<std::size_t>();
    if (j.contains("length")) c.length = j.at("length").get<std::size_t>();
    if (j.contains("activation")) c.activation = activation_from_string(j.at("activation").get<std::string>());
    if (j.contains("dropout")) c.dropout = j.at("dropout").get<double>();
    if (j.contains("class_weights")) {
      const auto w = j.at("class_weights").get<std::vector<double>>();
      if (w.size() != 2) fail(ErrorCode::InvalidArgument, "class_weights needs two values");
      c.weight_pos = w[0];
      c.weight_neg = w[1];
    }
    if (j.contains("embeddings_trainable")) c.embeddings_trainable = j.at("embeddings_trainable").get<bool>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("model config: ") + e.what());
  }
  return c;
}

// --- model ----------------------------------------------------------------------

void Gradients::scale(double factor) {
  for (auto& g : dense)
    for (double& v : g) v *= factor;
  for (auto& [_, row] : embedding_rows)
    for (double& v : row) v *= factor;
}

void Gradients::add(const Gradients& other) {
  for (std::size_t i = 0; i < dense.size(); ++i)
    for (std::size_t k = 0; k < dense[i].size(); ++k) dense[i][k] += other.dense[i][k];
  for (const auto& [id, row] : other.embedding_rows) {
    auto& mine = embedding_rows[id];
    if (mine.empty()) mine.assign(row.size(), 0.0);
    for (std::size_t k = 0; k < row.size(); ++k) mine[k] += row[k];
  }
}

std::vector<std::span<double>> Model::parameters() {
  std::vector<std::span<double>> p;
  for (auto& b : banks_) {
    p.emplace_back(b.weights);
    p.emplace_back(b.bias);
  }
  p.emplace_back(out_w_);
  p.emplace_back(out_b_);
  if (owned_embeddings_) p.emplace_back(owned_embeddings_->mutable_data());
  return p;
}

std::vector<std::span<const double>> Model::parameters() const {
  std::vector<std::span<const double>> p;
  for (const auto& b : banks_) {
    p.emplace_back(b.weights);
    p.emplace_back(b.bias);
  }
  p.emplace_back(out_w_);
  p.emplace_back(out_b_);
  if (owned_embeddings_) p.emplace_back(owned_embeddings_->data());
  return p;
}

std::vector<std::string> Model::parameter_names() const {
  std::vector<std::string> names;
  for (const auto& b : banks_) {
    names.push_back("conv" + std::to_string(b.window) + ".weight");
    names.push_back("conv" + std::to_string(b.window) + ".bias");
  }
  names.emplace_back("output.weight");
  names.emplace_back("output.bias");
  if (owned_embeddings_) names.emplace_back("embeddings");
  return names;
}

std::vector<std::vector<std::size_t>> Model::parameter_shapes() const {
  std::vector<std::vector<std::size_t>> shapes;
  for (const auto& b : banks_) {
    shapes.push_back({b.filters, b.fan_in()});
    shapes.push_back({b.filters});
  }
  shapes.push_back({2, config_.pooled_dim()});
  shapes.push_back({2});
  if (owned_embeddings_) shapes.push_back({owned_embeddings_->size(), owned_embeddings_->dimension()});
  return shapes;
}

Gradients Model::zero_gradients() const {
  Gradients g;
  for (const auto& b : banks_) {
    g.dense.emplace_back(b.weights.size(), 0.0);
    g.dense.emplace_back(b.bias.size(), 0.0);
  }
  g.dense.emplace_back(out_w_.size(), 0.0);
  g.dense.emplace_back(2, 0.0);
  return g;
}

void Model::attach_embeddings(std::shared_ptr<const EmbeddingTable> table) {
  if (table && table->dimension() != config_.dim)
    fail(ErrorCode::Shape, "embedding dimension " + std::to_string(table->dimension()) +
                               " does not match model dimension " + std::to_string(config_.dim));
  if (config_.embeddings_trainable && table) {
    owned_embeddings_ = std::make_shared<EmbeddingTable>(*table);
    embeddings_ = owned_embeddings_;
  } else {
    owned_embeddings_.reset();
    embeddings_ = std::move(table);
  }
  touch();
}

Model make_model(const ModelConfig& config, std::shared_ptr<const EmbeddingTable> table) {
  config.validate();
  Model m;
  m.config_ = config;
  for (std::size_t i = 0; i < config.window_sizes.size(); ++i) {
    FilterBank b;
    b.window = config.window_sizes[i];
    b.filters = config.filters[i];
    b.dim = config.dim;
    b.weights.assign(b.filters * b.fan_in(), 0.0);
    b.bias.assign(b.filters, 0.0);
    m.banks_.push_back(std::move(b));
  }
  m.out_w_.assign(2 * config.pooled_dim(), 0.0);
  m.out_b_ = {0.0, 0.0};
  if (table) m.attach_embeddings(std::move(table));
  return m;
}

Model init_model(const ModelConfig& config, std::shared_ptr<const EmbeddingTable> table) {
  Model m = make_model(config, std::move(table));
  Rng rng(derive_seed(config.seed, {0}));
  for (auto& b : m.banks_) {
    const double limit = std::sqrt(6.0 / static_cast<double>(b.fan_in() + b.filters));
    for (double& w : b.weights) w = rng.uniform(-limit, limit);
  }
  const double limit = std::sqrt(6.0 / static_cast<double>(config.pooled_dim() + 2));
  for (double& w : m.out_w_) w = rng.uniform(-limit, limit);
  return m;
}

// --- forward --------------------------------------------------------------------

double activate(Activation a, double x) {
  switch (a) {
    case Activation::Relu:
      return x > 0.0 ? x : 0.0;
    case Activation::Tanh:
      return std::tanh(x);
    case Activation::Identity:
      return x;
  }
  return x;
}

double activate_grad(Activation a, double pre, double post) {
  switch (a) {
    case Activation::Relu:
      return pre > 0.0 ? 1.0 : 0.0;
    case Activation::Tanh:
      return 1.0 - post * post;
    case Activation::Identity:
      return 1.0;
  }
  return 1.0;
}

FeatureMaps convolve(const EncodedQuestion& encoded, const FilterBank& bank, Activation activation) {
  if (encoded.dim != bank.dim)
    fail(ErrorCode::Shape, "input dimension " + std::to_string(encoded.dim) +
                               " does not match filter dimension " + std::to_string(bank.dim));
  if (bank.window > encoded.rows || bank.window == 0)
    fail(ErrorCode::InvalidArgument, "window size " + std::to_string(bank.window) +
                                         " exceeds sequence length " + std::to_string(encoded.rows));
  FeatureMaps fm;
  fm.positions = encoded.rows - bank.window + 1;
  fm.pre.resize(bank.filters * fm.positions);
  fm.values.resize(bank.filters * fm.positions);
  fm.argmax.resize(bank.filters);
  const std::size_t fan_in = bank.fan_in();
  for (std::size_t f = 0; f < bank.filters; ++f) {
    const double* w = bank.weights.data() + f * fan_in;
    for (std::size_t j = 0; j < fm.positions; ++j) {
      // The window starting at row j is contiguous in the row-major matrix.
      const double* x = encoded.matrix.data() + j * encoded.dim;
      double s = bank.bias[f];
      for (std::size_t k = 0; k < fan_in; ++k) s += w[k] * x[k];
      fm.pre[f * fm.positions + j] = s;
      fm.values[f * fm.positions + j] = activate(activation, s);
    }
    fm.argmax[f] =
        max_over_time({fm.values.data() + f * fm.positions, fm.positions}).index;
  }
  return fm;
}

PoolResult max_over_time(std::span<const double> feature_map) {
  if (feature_map.empty()) fail(ErrorCode::InvalidArgument, "max-over-time of an empty feature map");
  PoolResult r{feature_map[0], 0};
  for (std::size_t j = 1; j < feature_map.size(); ++j)
    if (feature_map[j] > r.value) r = {feature_map[j], j};
  return r;
}

namespace {

void check_input(const Model& model, const EncodedQuestion& q) {
  const auto& c = model.config();
  if (q.rows != c.length || q.dim != c.dim || q.matrix.size() != q.rows * q.dim)
    fail(ErrorCode::Shape, "encoded question is " + std::to_string(q.rows) + "x" +
                               std::to_string(q.dim) + ", model expects " + std::to_string(c.length) +
                               "x" + std::to_string(c.dim));
}

std::array<double, 2> softmax(const std::array<double, 2>& z) {
  const double m = std::max(z[0], z[1]);
  const double e0 = std::exp(z[0] - m);
  const double e1 = std::exp(z[1] - m);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

}  // namespace

ForwardCache forward(const Model& model, const EncodedQuestion& encoded, bool train_mode,
                     std::uint64_t dropout_seed) {
  check_input(model, encoded);
  const auto& c = model.config();
  ForwardCache cache;
  cache.train_mode = train_mode;
  cache.model_version = model.version();
  cache.input = encoded.matrix;
  cache.row_ids = encoded.row_ids;

  const std::size_t D = c.pooled_dim();
  cache.pooled.reserve(D);
  for (const auto& bank : model.banks()) {
    FeatureMaps fm = convolve(encoded, bank, c.activation);
    for (std::size_t f = 0; f < bank.filters; ++f)
      cache.pooled.push_back(fm.values[f * fm.positions + fm.argmax[f]]);
    cache.maps.push_back(std::move(fm));
  }

  cache.mask.assign(D, 1.0);
  if (train_mode && c.dropout > 0.0) {
    Rng rng(dropout_seed);
    const double keep_scale = 1.0 / (1.0 - c.dropout);
    for (double& m : cache.mask) m = rng.bernoulli(c.dropout) ? 0.0 : keep_scale;
  }
  cache.hidden.resize(D);
  for (std::size_t i = 0; i < D; ++i) cache.hidden[i] = cache.pooled[i] * cache.mask[i];

  const auto& w = model.output_weights();
  for (std::size_t k = 0; k < 2; ++k) {
    double s = model.output_bias()[k];
    const double* row = w.data() + k * D;
    for (std::size_t i = 0; i < D; ++i) s += row[i] * cache.hidden[i];
    cache.logits[k] = s;
  }
  cache.probabilities = softmax(cache.logits);
  return cache;
}

// --- loss and backward -------------------------------------------------------------

namespace {
constexpr double kProbFloor = 1e-12;
}

double weighted_loss(const std::array<double, 2>& p, int label, double weight_pos, double weight_neg) {
  const double w = label == 1 ? weight_pos : weight_neg;
  return -w * std::log(std::max(p[label == 1 ? 1 : 0], kProbFloor));
}

double cross_entropy(const std::array<double, 2>& p, int label) {
  return -std::log(std::max(p[label == 1 ? 1 : 0], kProbFloor));
}

void backward(const Model& model, const ForwardCache& cache, int label, Gradients& grads,
              double upstream) {
  if (cache.model_version != model.version())
    fail(ErrorCode::State, "forward cache is stale: model changed after the forward pass");
  const auto& c = model.config();
  const std::size_t D = c.pooled_dim();
  if (cache.pooled.size() != D || cache.maps.size() != model.banks().size())
    fail(ErrorCode::State, "forward cache does not belong to this model");
  if (grads.dense.size() != 2 * model.banks().size() + 2)
    fail(ErrorCode::Shape, "gradient buffer does not match model");

  const int y = label == 1 ? 1 : 0;
  const double w = y == 1 ? c.weight_pos : c.weight_neg;
  std::array<double, 2> dlogits{0.0, 0.0};
  // Inside the clamped region the loss is constant.
  if (cache.probabilities[y] >= kProbFloor)
    for (int k = 0; k < 2; ++k)
      dlogits[k] = upstream * w * (cache.probabilities[k] - (k == y ? 1.0 : 0.0));

  const std::size_t nb = model.banks().size();
  auto& d_out_w = grads.dense[2 * nb];
  auto& d_out_b = grads.dense[2 * nb + 1];
  const auto& out_w = model.output_weights();
  std::vector<double> d_pooled(D);
  for (std::size_t i = 0; i < D; ++i) {
    d_out_w[i] += dlogits[0] * cache.hidden[i];
    d_out_w[D + i] += dlogits[1] * cache.hidden[i];
    d_pooled[i] = (dlogits[0] * out_w[i] + dlogits[1] * out_w[D + i]) * cache.mask[i];
  }
  d_out_b[0] += dlogits[0];
  d_out_b[1] += dlogits[1];

  grads.input.assign(cache.input.size(), 0.0);
  std::size_t offset = 0;
  for (std::size_t b = 0; b < nb; ++b) {
    const FilterBank& bank = model.banks()[b];
    const FeatureMaps& fm = cache.maps[b];
    auto& d_w = grads.dense[2 * b];
    auto& d_b = grads.dense[2 * b + 1];
    const std::size_t fan_in = bank.fan_in();
    for (std::size_t f = 0; f < bank.filters; ++f) {
      const std::size_t j = fm.argmax[f];
      const std::size_t at = f * fm.positions + j;
      const double g = d_pooled[offset + f] * activate_grad(c.activation, fm.pre[at], fm.values[at]);
      if (g == 0.0) continue;
      const double* x = cache.input.data() + j * c.dim;
      const double* wf = bank.weights.data() + f * fan_in;
      double* dwf = d_w.data() + f * fan_in;
      double* dx = grads.input.data() + j * c.dim;
      for (std::size_t k = 0; k < fan_in; ++k) {
        dwf[k] += g * x[k];
        dx[k] += g * wf[k];
      }
      d_b[f] += g;
    }
    offset += bank.filters;
  }

  if (c.embeddings_trainable && model.embeddings()) {
    for (std::size_t i = 0; i < cache.row_ids.size(); ++i) {
      const std::ptrdiff_t id = cache.row_ids[i];
      if (id < 0) continue;
      auto& row = grads.embedding_rows[static_cast<std::size_t>(id)];
      if (row.empty()) row.assign(c.dim, 0.0);
      for (std::size_t k = 0; k < c.dim; ++k) row[k] += grads.input[i * c.dim + k];
    }
  }
}

Gradients backward(const Model& model, const ForwardCache& cache, int label) {
  Gradients g = model.zero_gradients();
  backward(model, cache, label, g, 1.0);
  return g;
}

// --- encoding and prediction ----------------------------------------------------------

void refresh_input(const Model& model, EncodedQuestion& q) {
  const EmbeddingTable* table = model.embeddings();
  if (!table) return;
  for (std::size_t i = 0; i < q.row_ids.size(); ++i) {
    if (q.row_ids[i] < 0) continue;
    const auto v = table->row(static_cast<std::size_t>(q.row_ids[i]));
    std::copy(v.begin(), v.end(), q.matrix.begin() + static_cast<std::ptrdiff_t>(i * q.dim));
  }
}

EncodedQuestion encode_record(const Model& model, const QuestionRecord& record) {
  if (!model.embeddings()) fail(ErrorCode::State, "model has no embedding table attached");
  return encode(std::span<const std::string>(record.tokens), *model.embeddings(),
                model.config().length, record.label);
}

std::vector<EncodedQuestion> encode_records(const Model& model,
                                            const std::vector<QuestionRecord>& records) {
  std::vector<EncodedQuestion> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(encode_record(model, r));
  return out;
}

double predict_one(const Model& model, const EncodedQuestion& encoded) {
  return forward(model, encoded, false).probabilities[1];
}

namespace {

template <typename Fn>
void parallel_chunks(std::size_t n, unsigned workers, Fn&& fn) {
  workers = std::max(1u, workers);
  if (workers == 1 || n < 2) {
    fn(0, 0, n);
    return;
  }
  const std::size_t per = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = std::min(n, w * per);
    const std::size_t hi = std::min(n, lo + per);
    pool.emplace_back([&, w, lo, hi] { fn(w, lo, hi); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

std::vector<double> predict(const Model& model, std::span<const EncodedQuestion> questions,
                            unsigned workers) {
  std::vector<double> scores(questions.size());
  parallel_chunks(questions.size(), workers, [&](unsigned, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) scores[i] = predict_one(model, questions[i]);
  });
  return scores;
}

// --- training ---------------------------------------------------------------------

json train_options_to_json(const TrainOptions& o) {
  return json{{"learning_rate", o.learning_rate}, {"beta1", o.beta1},
              {"beta2", o.beta2},                 {"epsilon", o.epsilon},
              {"batch_size", o.batch_size},       {"max_epochs", o.max_epochs},
              {"patience", o.patience},           {"oversample", o.oversample}};
}

TrainOptions train_options_from_json(const json& j) {
  TrainOptions o;
  try {
    if (j.contains("learning_rate")) o.learning_rate = j.at("learning_rate").get<double>();
    if (j.contains("beta1")) o.beta1 = j.at("beta1").get<double>();
    if (j.contains("beta2")) o.beta2 = j.at("beta2").get<double>();
    if (j.contains("epsilon")) o.epsilon = j.at("epsilon").get<double>();
    if (j.contains("batch_size")) o.batch_size = j.at("batch_size").get<std::size_t>();
    if (j.contains("max_epochs")) o.max_epochs = j.at("max_epochs").get<std::size_t>();
    if (j.contains("patience")) o.patience = j.at("patience").get<std::size_t>();
    if (j.contains("oversample")) o.oversample = j.at("oversample").get<bool>();
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("training options: ") + e.what());
  }
  return o;
}

namespace {

struct Adam {
  std::vector<std::vector<double>> m, v;
  std::vector<double> emb_m, emb_v;
  std::uint64_t t = 0;
};

void adam_step(Model& model, Adam& state, const Gradients& g, const TrainOptions& o) {
  ++state.t;
  const double c1 = 1.0 - std::pow(o.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(o.beta2, static_cast<double>(state.t));
  auto update = [&](double& p, double& m, double& v, double grad) {
    m = o.beta1 * m + (1.0 - o.beta1) * grad;
    v = o.beta2 * v + (1.0 - o.beta2) * grad * grad;
    p -= o.learning_rate * (m / c1) / (std::sqrt(v / c2) + o.epsilon);
  };
  auto params = model.parameters();
  for (std::size_t i = 0; i < g.dense.size(); ++i)
    for (std::size_t k = 0; k < g.dense[i].size(); ++k)
      update(params[i][k], state.m[i][k], state.v[i][k], g.dense[i][k]);

  // Embedding rows follow a lazy update: only rows seen in the batch move.
  if (EmbeddingTable* table = model.mutable_embeddings(); table && !g.embedding_rows.empty()) {
    const std::size_t d = table->dimension();
    std::vector<std::size_t> rows;
    rows.reserve(g.embedding_rows.size());
    for (const auto& [id, _] : g.embedding_rows) rows.push_back(id);
    std::sort(rows.begin(), rows.end());
    for (std::size_t id : rows) {
      const auto& grad = g.embedding_rows.at(id);
      auto row = table->mutable_row(id);
      for (std::size_t k = 0; k < d; ++k)
        update(row[k], state.emb_m[id * d + k], state.emb_v[id * d + k], grad[k]);
    }
  }
  model.touch();
}

std::vector<std::vector<double>> snapshot(const Model& model) {
  std::vector<std::vector<double>> s;
  for (const auto& p : model.parameters()) s.emplace_back(p.begin(), p.end());
  return s;
}

void restore(Model& model, const std::vector<std::vector<double>>& s) {
  auto params = model.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) std::copy(s[i].begin(), s[i].end(), params[i].begin());
  model.touch();
}

double validation_auc(const Model& model, const std::vector<EncodedQuestion>& valid, unsigned workers) {
  std::vector<EncodedQuestion> refreshed;
  std::span<const EncodedQuestion> view(valid);
  if (model.config().embeddings_trainable) {
    refreshed = valid;
    for (auto& q : refreshed) refresh_input(model, q);
    view = refreshed;
  }
  const auto scores = predict(model, view, workers);
  std::vector<int> labels;
  labels.reserve(valid.size());
  for (const auto& q : valid) labels.push_back(q.label);
  return auc(scores, labels);
}

}  // namespace

TrainResult train(Model& model, std::vector<EncodedQuestion> train_set,
                  const std::vector<EncodedQuestion>& valid_set, const TrainOptions& options) {
  if (train_set.empty()) fail(ErrorCode::InvalidArgument, "training set is empty");
  if (options.batch_size == 0) fail(ErrorCode::InvalidArgument, "batch size must be positive");
  const auto& c = model.config();
  for (const auto& q : train_set) check_input(model, q);
  for (const auto& q : valid_set) check_input(model, q);
  if (!valid_set.empty()) {
    std::size_t pos = 0;
    for (const auto& q : valid_set) pos += q.label == 1 ? 1 : 0;
    if (pos == 0 || pos == valid_set.size())
      fail(ErrorCode::InvalidArgument, "validation set must contain both classes");
  }
  if (c.embeddings_trainable && !model.mutable_embeddings())
    fail(ErrorCode::State, "trainable embeddings requested but no table is attached");

  double w_pos = c.weight_pos;
  double w_neg = c.weight_neg;
  std::vector<std::size_t> base_order;
  const std::size_t replicate =
      options.oversample ? std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(w_pos / w_neg))) : 1;
  for (std::size_t i = 0; i < train_set.size(); ++i) {
    const std::size_t copies = train_set[i].label == 1 ? replicate : 1;
    for (std::size_t r = 0; r < copies; ++r) base_order.push_back(i);
  }
  // Loss weighting and oversampling are alternatives.
  if (options.oversample) w_pos = w_neg = 1.0;

  Adam adam;
  for (const auto& p : model.parameters()) {
    adam.m.emplace_back(p.size(), 0.0);
    adam.v.emplace_back(p.size(), 0.0);
  }
  if (EmbeddingTable* table = model.mutable_embeddings()) {
    adam.m.pop_back();
    adam.v.pop_back();
    adam.emb_m.assign(table->data().size(), 0.0);
    adam.emb_v.assign(table->data().size(), 0.0);
  }

  TrainResult result;
  result.best_valid_auc = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> best = snapshot(model);
  std::size_t since_best = 0;
  const unsigned workers = std::max(1u, options.workers);

  for (std::size_t epoch = 1; epoch <= options.max_epochs; ++epoch) {
    std::vector<std::size_t> order = base_order;
    Rng rng(derive_seed(c.seed, {1, epoch}));
    rng.shuffle(order);

    double epoch_loss = 0;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t end = std::min(order.size(), start + options.batch_size);
      std::vector<Gradients> partial(workers, model.zero_gradients());
      std::vector<double> partial_loss(workers, 0.0);
      std::vector<std::string> errors(workers);
      std::vector<std::array<double, 2>> batch_probs(options.on_batch ? end - start : 0);
      parallel_chunks(end - start, workers, [&](unsigned w, std::size_t lo, std::size_t hi) {
        try {
          for (std::size_t k = start + lo; k < start + hi; ++k) {
            const EncodedQuestion* q = &train_set[order[k]];
            EncodedQuestion refreshed;
            if (c.embeddings_trainable) {
              refreshed = *q;
              refresh_input(model, refreshed);
              q = &refreshed;
            }
            const ForwardCache cache =
                forward(model, *q, true, derive_seed(c.seed, {2, epoch, k}));
            const double loss = weighted_loss(cache.probabilities, q->label, w_pos, w_neg);
            if (!std::isfinite(loss)) {
              std::ostringstream msg;
              msg << "non-finite loss at epoch " << epoch << ", example " << order[k]
                  << " (logits " << cache.logits[0] << ", " << cache.logits[1] << ")";
              errors[w] = msg.str();
              return;
            }
            partial_loss[w] += loss;
            if (options.on_batch) batch_probs[k - start] = cache.probabilities;
            const double weight_fix = q->label == 1 ? w_pos / c.weight_pos : w_neg / c.weight_neg;
            backward(model, cache, q->label, partial[w], weight_fix);
          }
        } catch (const std::exception& e) {
          errors[w] = e.what();
        }
      });
      for (const auto& e : errors)
        if (!e.empty()) fail(ErrorCode::Training, "training diverged: " + e);

      Gradients total = std::move(partial[0]);
      for (unsigned w = 1; w < workers; ++w) total.add(partial[w]);
      double batch_loss = 0;
      for (unsigned w = 0; w < workers; ++w) batch_loss += partial_loss[w];
      epoch_loss += batch_loss;
      if (options.on_batch) {
        BatchRecord br;
        br.epoch = epoch;
        br.batch = start / options.batch_size;
        br.examples.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                           order.begin() + static_cast<std::ptrdiff_t>(end));
        br.probabilities = std::move(batch_probs);
        br.loss = batch_loss;
        options.on_batch(br);
      }
      total.scale(1.0 / static_cast<double>(end - start));
      for (const auto& g : total.dense)
        for (double v : g)
          if (!std::isfinite(v))
            fail(ErrorCode::Training, "training diverged: non-finite gradient at epoch " +
                                          std::to_string(epoch));
      adam_step(model, adam, total, options);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_loss / static_cast<double>(order.size());
    rec.valid_auc = std::numeric_limits<double>::quiet_NaN();
    if (!valid_set.empty()) rec.valid_auc = validation_auc(model, valid_set, workers);
    result.history.push_back(rec);

    if (valid_set.empty()) {
      result.best_epoch = epoch;
      continue;
    }
    if (rec.valid_auc > result.best_valid_auc) {
      result.best_valid_auc = rec.valid_auc;
      result.best_epoch = epoch;
      best = snapshot(model);
      since_best = 0;
    } else if (++since_best >= options.patience) {
      break;
    }
  }
  if (!valid_set.empty()) restore(model, best);
  if (valid_set.empty()) result.best_valid_auc = std::numeric_limits<double>::quiet_NaN();
  return result;
}

}  // namespace amaq::cnn
