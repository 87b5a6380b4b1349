#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "amaq/corpus.hpp"
#include "amaq/embeddings.hpp"

namespace amaq {

/// Synthetic question sets with a known class signal. Positive questions
/// contain cue words embedded around +mu, negative questions cue words
/// around -mu; the remaining tokens are neutral words with zero-mean
/// embeddings. With cue_purity = 1 the classes are perfectly separable.
struct SyntheticOptions {
  std::size_t count = 1000;
  double positive_fraction = 0.5;
  std::size_t dim = 8;
  std::size_t cue_words = 20;       // per class
  std::size_t neutral_words = 40;
  std::size_t min_length = 4;
  std::size_t max_length = 12;
  std::size_t cues_per_question = 2;  // upper bound, at least one
  double cue_purity = 1.0;           // probability a cue word matches the label
  double mu = 1.0;                   // norm of the class direction
  double noise = 0.3;                // embedding noise stddev
  std::int64_t start_utc = 1325376000;  // 2012-01-01
  std::int64_t spacing_seconds = 3600 * 7;
  std::uint64_t seed = 1;
};

struct SyntheticData {
  std::shared_ptr<EmbeddingTable> embeddings;
  std::vector<QuestionRecord> records;
};

/// Embedding table for the synthetic vocabulary (seeded by options.seed).
std::shared_ptr<EmbeddingTable> synthetic_embeddings(const SyntheticOptions& options);

/// Records drawn against `synthetic_embeddings(options)`'s vocabulary.
/// `stream` selects an independent draw for the same vocabulary.
std::vector<QuestionRecord> synthetic_records(const SyntheticOptions& options, std::uint64_t stream = 0);

SyntheticData make_synthetic(const SyntheticOptions& options);

/// Randomly permutes labels across records (the permutation null).
void permute_labels(std::vector<QuestionRecord>& records, std::uint64_t seed);

}  // namespace amaq
