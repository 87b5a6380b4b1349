#pragma once

#include <array>
#include <functional>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "amaq/corpus.hpp"
#include "amaq/embeddings.hpp"
#include "amaq/ngram.hpp"

namespace amaq::cnn {

/// Identity is available for analysis; training uses relu or tanh.
enum class Activation { Relu, Tanh, Identity };

struct ModelConfig {
  std::vector<std::size_t> window_sizes{1, 2, 3, 4, 5};
  std::vector<std::size_t> filters{5, 100, 300, 300, 300};  // parallel to window_sizes
  std::size_t dim = 300;
  std::size_t length = 60;
  Activation activation = Activation::Relu;
  double dropout = 0.5;
  double weight_pos = 4.0;
  double weight_neg = 1.0;
  bool embeddings_trainable = false;
  std::uint64_t seed = 0;

  /// Windows {1..5} with the given allocation.
  static ModelConfig context_aware(const FilterAllocation& allocation, std::size_t dim,
                                   std::size_t length);
  /// Flat single-window model: trigram window, 100 filters unless overridden.
  static ModelConfig baseline(std::size_t dim, std::size_t length, std::size_t window = 3,
                              std::size_t filters = 100);

  std::size_t pooled_dim() const;
  void validate() const;
};

nlohmann::json config_to_json(const ModelConfig& config);
ModelConfig config_from_json(const nlohmann::json& j);
std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

/// Filters for one window size. Row f of `weights` is the filter applied to
/// the concatenation of `window` consecutive embeddings.
struct FilterBank {
  std::size_t window = 0;
  std::size_t filters = 0;
  std::size_t dim = 0;
  std::vector<double> weights;  // filters x (window * dim), row-major
  std::vector<double> bias;     // filters

  std::size_t fan_in() const { return window * dim; }
  std::span<const double> row(std::size_t f) const { return {weights.data() + f * fan_in(), fan_in()}; }
};

/// Per-filter activations over positions for one window size.
struct FeatureMaps {
  std::size_t positions = 0;
  std::vector<double> pre;         // filters x positions, before activation
  std::vector<double> values;      // filters x positions
  std::vector<std::size_t> argmax;  // per filter, 0-based
};

struct ForwardCache {
  std::vector<FeatureMaps> maps;  // per bank
  std::vector<double> pooled;     // concatenated max-over-time values
  std::vector<double> mask;       // dropout multipliers (1 outside train mode)
  std::vector<double> hidden;     // pooled * mask
  std::array<double, 2> logits{};
  std::array<double, 2> probabilities{};
  std::vector<double> input;                 // copy of the encoded matrix
  std::vector<std::ptrdiff_t> row_ids;
  bool train_mode = false;
  std::uint64_t model_version = 0;
};

/// Gradients laid out like Model::parameters(); embedding rows are sparse.
struct Gradients {
  std::vector<std::vector<double>> dense;
  std::unordered_map<std::size_t, std::vector<double>> embedding_rows;
  std::vector<double> input;  // d loss / d encoded matrix for the last example

  void scale(double factor);
  void add(const Gradients& other);
};

class Model {
 public:
  Model() = default;

  const ModelConfig& config() const { return config_; }
  const std::vector<FilterBank>& banks() const { return banks_; }
  std::vector<FilterBank>& mutable_banks() { return banks_; }
  const std::vector<double>& output_weights() const { return out_w_; }  // 2 x D
  const std::array<double, 2>& output_bias() const { return out_b_; }
  std::vector<double>& mutable_output_weights() { return out_w_; }
  std::array<double, 2>& mutable_output_bias() { return out_b_; }

  const EmbeddingTable* embeddings() const { return embeddings_.get(); }
  EmbeddingTable* mutable_embeddings() { return owned_embeddings_.get(); }

  /// Dense parameter groups in checkpoint order: per bank weights then
  /// bias, output weights, output bias, and the embedding table last when
  /// it is trainable.
  std::vector<std::span<double>> parameters();
  std::vector<std::span<const double>> parameters() const;
  std::vector<std::string> parameter_names() const;
  std::vector<std::vector<std::size_t>> parameter_shapes() const;

  Gradients zero_gradients() const;

  std::uint64_t version() const { return version_; }
  /// Called after any parameter update so that older forward caches are rejected.
  void touch() { ++version_; }

  void attach_embeddings(std::shared_ptr<const EmbeddingTable> table);

  friend Model init_model(const ModelConfig& config, std::shared_ptr<const EmbeddingTable> table);
  friend Model make_model(const ModelConfig& config, std::shared_ptr<const EmbeddingTable> table);

 private:
  ModelConfig config_;
  std::vector<FilterBank> banks_;
  std::vector<double> out_w_;
  std::array<double, 2> out_b_{};
  std::shared_ptr<const EmbeddingTable> embeddings_;
  std::shared_ptr<EmbeddingTable> owned_embeddings_;  // set when trainable
  std::uint64_t version_ = 0;
};

/// Zero-initialized model with correct shapes.
Model make_model(const ModelConfig& config, std::shared_ptr<const EmbeddingTable> table = nullptr);

/// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero, all
/// draws determined by config.seed.
Model init_model(const ModelConfig& config, std::shared_ptr<const EmbeddingTable> table = nullptr);

double activate(Activation a, double x);
/// Derivative expressed through the pre-activation; relu has slope 0 at 0.
double activate_grad(Activation a, double pre, double post);

/// Feature maps of one bank over the padded sequence; positions = rows - n + 1.
FeatureMaps convolve(const EncodedQuestion& encoded, const FilterBank& bank, Activation activation);

struct PoolResult {
  double value = 0;
  std::size_t index = 0;  // 0-based, first index attaining the maximum
};
PoolResult max_over_time(std::span<const double> feature_map);

ForwardCache forward(const Model& model, const EncodedQuestion& encoded, bool train_mode,
                     std::uint64_t dropout_seed = 0);

/// -w_label * log(max(p_label, 1e-12)).
double weighted_loss(const std::array<double, 2>& probabilities, int label, double weight_pos,
                     double weight_neg);
double cross_entropy(const std::array<double, 2>& probabilities, int label);

/// Accumulates `upstream` * d loss / d parameters into `grads`.
void backward(const Model& model, const ForwardCache& cache, int label, Gradients& grads,
              double upstream = 1.0);
Gradients backward(const Model& model, const ForwardCache& cache, int label);

/// Re-embeds `row_ids` from the model's current table (used when embeddings train).
void refresh_input(const Model& model, EncodedQuestion& encoded);

EncodedQuestion encode_record(const Model& model, const QuestionRecord& record);
std::vector<EncodedQuestion> encode_records(const Model& model,
                                            const std::vector<QuestionRecord>& records);

/// Probability of the answered class per question, in input order.
double predict_one(const Model& model, const EncodedQuestion& encoded);
std::vector<double> predict(const Model& model, std::span<const EncodedQuestion> questions,
                            unsigned workers = 1);

// What one minibatch saw, for observers. `examples` index the training set
// (after any oversampling replication); `loss` is the summed weighted loss.
struct BatchRecord {
  std::size_t epoch = 0;
  std::size_t batch = 0;
  std::vector<std::size_t> examples;
  std::vector<std::array<double, 2>> probabilities;
  double loss = 0;
};

struct TrainOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t batch_size = 50;
  std::size_t max_epochs = 25;
  std::size_t patience = 3;
  unsigned workers = 1;
  /// Replicate positives round(w_pos / w_neg) times and train with unit weights.
  bool oversample = false;
  std::function<void(const BatchRecord&)> on_batch;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0;  // mean weighted loss over the epoch
  double valid_auc = 0;   // NaN without a validation set
};

struct TrainResult {
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_valid_auc = 0;
};

/// Minibatch Adam with early stopping on validation AUC. The model ends
/// with the parameters of the best validation epoch.
TrainResult train(Model& model, std::vector<EncodedQuestion> train_set,
                  const std::vector<EncodedQuestion>& valid_set, const TrainOptions& options = {});

nlohmann::json train_options_to_json(const TrainOptions& o);
TrainOptions train_options_from_json(const nlohmann::json& j);

}  // namespace amaq::cnn
