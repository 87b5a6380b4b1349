#include "amaq/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "amaq/error.hpp"
#include "amaq/rng.hpp"

namespace amaq {

namespace {

std::string word_name(const char* prefix, std::size_t i) { return prefix + std::to_string(i); }

}  // namespace

std::shared_ptr<EmbeddingTable> synthetic_embeddings(const SyntheticOptions& o) {
  if (o.dim == 0 || o.cue_words == 0) fail(ErrorCode::InvalidArgument, "synthetic vocabulary is empty");
  auto table = std::make_shared<EmbeddingTable>(o.dim);
  Rng rng(derive_seed(o.seed, {101}));
  const double unit = o.mu / std::sqrt(static_cast<double>(o.dim));
  std::vector<double> v(o.dim);
  auto add = [&](const std::string& word, double center) {
    for (double& x : v) x = center + o.noise * rng.normal();
    table->add(word, v);
  };
  for (std::size_t i = 0; i < o.cue_words; ++i) add(word_name("pos", i), unit);
  for (std::size_t i = 0; i < o.cue_words; ++i) add(word_name("neg", i), -unit);
  for (std::size_t i = 0; i < o.neutral_words; ++i) add(word_name("w", i), 0.0);
  return table;
}

std::vector<QuestionRecord> synthetic_records(const SyntheticOptions& o, std::uint64_t stream) {
  if (o.min_length == 0 || o.max_length < o.min_length)
    fail(ErrorCode::InvalidArgument, "synthetic length range is invalid");
  if (o.neutral_words == 0) fail(ErrorCode::InvalidArgument, "synthetic data needs neutral words");
  Rng rng(derive_seed(o.seed, {202, stream}));
  const auto n_pos = static_cast<std::size_t>(std::llround(o.positive_fraction * static_cast<double>(o.count)));
  std::vector<int> labels(o.count, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(std::min(n_pos, o.count)), 1);
  rng.shuffle(labels);

  std::vector<QuestionRecord> out;
  out.reserve(o.count);
  for (std::size_t i = 0; i < o.count; ++i) {
    const std::size_t len = o.min_length + rng.below(o.max_length - o.min_length + 1);
    std::vector<std::string> tokens(len);
    for (auto& t : tokens) t = word_name("w", rng.below(o.neutral_words));
    const std::size_t cues = 1 + rng.below(std::min(o.cues_per_question, len));
    for (std::size_t c = 0; c < cues; ++c) {
      const bool own = rng.bernoulli(o.cue_purity);
      const bool positive = (labels[i] == 1) == own;
      tokens[rng.below(len)] = word_name(positive ? "pos" : "neg", rng.below(o.cue_words));
    }
    QuestionRecord r;
    r.thread_id = "synthetic-" + std::to_string(stream);
    char id[32];
    std::snprintf(id, sizeof id, "s%llu-%07zu", static_cast<unsigned long long>(stream), i);
    r.post_id = id;
    for (std::size_t k = 0; k < tokens.size(); ++k) r.text += (k ? " " : "") + tokens[k];
    r.text += " ?";
    tokens.emplace_back("?");
    r.tokens = std::move(tokens);
    r.created_utc = o.start_utc + static_cast<std::int64_t>(i) * o.spacing_seconds;
    r.label = labels[i];
    out.push_back(std::move(r));
  }
  return out;
}

SyntheticData make_synthetic(const SyntheticOptions& options) {
  return {synthetic_embeddings(options), synthetic_records(options)};
}

void permute_labels(std::vector<QuestionRecord>& records, std::uint64_t seed) {
  std::vector<int> labels;
  labels.reserve(records.size());
  for (const auto& r : records) labels.push_back(r.label);
  Rng rng(derive_seed(seed, {303}));
  rng.shuffle(labels);
  for (std::size_t i = 0; i < records.size(); ++i) records[i].label = labels[i];
}

}  // namespace amaq
