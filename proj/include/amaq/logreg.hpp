#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "amaq/checkpoint.hpp"
#include "amaq/corpus.hpp"

namespace amaq::logreg {

/// Fixed English stopword list (the NLTK English set).
const std::unordered_set<std::string>& default_stopwords();

/// Closed unigram vocabulary built from training data. Words are stored
/// lowercase and indexed in lexicographic order.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> words);

  static Vocabulary build(std::span<const std::vector<std::string>> documents,
                          const std::unordered_set<std::string>& stopwords,
                          std::size_t min_document_frequency = 1);

  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  /// -1 when absent.
  std::ptrdiff_t index_of(const std::string& word) const;

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Sparse feature vector, entries sorted by index, values >= 1.
struct BowVector {
  std::vector<std::pair<std::size_t, double>> entries;

  double value(std::size_t index) const;
  bool empty() const { return entries.empty(); }
};

/// Unigram counts (or 1/0 with `binary`) over non-stopword tokens; tokens
/// outside the vocabulary are dropped.
BowVector featurize(std::span<const std::string> tokens, const Vocabulary& vocabulary,
                    const std::unordered_set<std::string>& stopwords, bool binary = false);

struct Options {
  double lambda = 1.0;
  std::size_t max_iterations = 20000;
  double tolerance = 1e-6;  // on the gradient infinity norm
  bool binary = false;
  std::size_t min_document_frequency = 1;
};

struct TrainReport {
  std::size_t iterations = 0;
  double gradient_norm = 0;        // infinity norm at the returned point
  std::vector<double> objectives;  // after each accepted step, starting at the initial point
  bool converged = false;
};

struct Model {
  std::vector<double> weights;
  double intercept = 0;
  double lambda = 1.0;
  bool binary = false;
  Vocabulary vocabulary;
};

/// Mean logistic loss + lambda/2 * ||w||^2 (intercept unpenalized).
double objective(const Model& model, std::span<const BowVector> data, std::span<const int> labels);

/// Deterministic gradient descent with backtracking line search.
Model train(std::span<const BowVector> data, std::span<const int> labels, std::size_t features,
            const Options& options = {}, TrainReport* report = nullptr);

/// Builds the vocabulary from `records`, featurizes and trains.
Model train_on_records(const std::vector<QuestionRecord>& records, const Options& options = {},
                       TrainReport* report = nullptr);

double predict(const Model& model, const BowVector& x);
double predict(const Model& model, std::span<const std::string> tokens);
std::vector<double> predict(const Model& model, const std::vector<QuestionRecord>& records);

Checkpoint to_checkpoint(const Model& model);
Model from_checkpoint(const Checkpoint& checkpoint);

}  // namespace amaq::logreg
