#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "amaq/cnn.hpp"
#include "amaq/corpus.hpp"
#include "amaq/logreg.hpp"
#include "amaq/metrics.hpp"

namespace amaq {

enum class System { ContextCnn, BaselineCnn, LogReg };

std::string to_string(System s);
System system_from_string(const std::string& name);

/// Everything needed to train one system. `cnn_config.seed` is replaced by
/// the per-run seed.
struct SystemSpec {
  System system = System::ContextCnn;
  cnn::ModelConfig cnn_config;
  cnn::TrainOptions cnn_training;
  logreg::Options logreg;
};

struct RunResult {
  double valid_auc = 0;
  std::size_t best_epoch = 0;
};

/// Reads a run configuration object:
///   system, seed, length, allocation {x, mode}, window_sizes/filters
///   (override the allocation), baseline {window, filters}, activation,
///   dropout, class_weights, embeddings_trainable,
///   training {learning_rate, beta1, beta2, epsilon, batch_size,
///             max_epochs, patience, oversample, workers},
///   logreg {lambda, binary, min_df, max_iterations, tolerance}.
/// Missing keys take their defaults; `dim` is the embedding dimension.
SystemSpec system_spec_from_json(const nlohmann::json& j, std::size_t dim);

/// Fully resolved form of a spec, accepted back by system_spec_from_json.
nlohmann::json system_spec_to_json(const SystemSpec& spec);

/// Per-run model seed derived from a base seed.
std::uint64_t run_seed(std::uint64_t base, std::size_t run);

/// Trains `spec.system` on `train` with `seed` and returns the AUC on `valid`
/// (best validation epoch for the CNNs).
RunResult train_and_score(const SystemSpec& spec, const std::vector<QuestionRecord>& train,
                          const std::vector<QuestionRecord>& valid,
                          std::shared_ptr<const EmbeddingTable> embeddings, std::uint64_t seed);

struct GridOptions {
  std::vector<std::size_t> window_sizes{1, 2, 3, 4, 5};
  std::vector<std::size_t> filter_counts{5, 100, 300};
  std::size_t runs = 5;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  /// Cell indices in the order they are executed; defaults to 0..cells-1.
  /// Results never depend on it.
  std::optional<std::vector<std::size_t>> execution_order;
};

struct GridCell {
  std::size_t window = 0;
  std::size_t filters = 0;
  std::vector<double> aucs;  // per run
  double mean_auc = 0;       // NaN when the cell failed
  std::string error;
};

/// Baseline CNN per (window, filter count) cell, `runs` runs each. Cell
/// index is filters-major: index = filter_row * windows + window_col. The
/// seed of run r in cell c is derive_seed(seed, {c, r}).
std::vector<GridCell> run_grid(const SystemSpec& base, const GridOptions& options,
                               const std::vector<QuestionRecord>& train,
                               const std::vector<QuestionRecord>& valid,
                               std::shared_ptr<const EmbeddingTable> embeddings);

void write_grid_csv(std::ostream& out, const std::vector<GridCell>& cells);

/// Temporally uniform subsample; for a fixed seed smaller sizes are subsets
/// of larger ones. Returned in (created_utc, thread_id, post_id) order.
std::vector<QuestionRecord> subsample(const std::vector<QuestionRecord>& records, std::size_t size,
                                      std::uint64_t seed);

struct CurveOptions {
  std::vector<std::size_t> sizes{1000, 10000, 25000, 50000, 100000};
  std::size_t runs = 5;
  std::uint64_t seed = 0;
};

struct CurvePoint {
  std::size_t size = 0;
  RunSummary summary;
};

/// Run r subsamples with derive_seed(seed, {r, 7}) and trains with run_seed(seed, r).
std::vector<CurvePoint> learning_curve(const SystemSpec& spec, const CurveOptions& options,
                                       const std::vector<QuestionRecord>& train,
                                       const std::vector<QuestionRecord>& valid,
                                       std::shared_ptr<const EmbeddingTable> embeddings);

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& points);

}  // namespace amaq
