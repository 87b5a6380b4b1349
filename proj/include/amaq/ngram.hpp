#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace amaq {

inline constexpr std::size_t kMaxNgramOrder = 5;

using Sentence = std::vector<std::string>;

/// Exact n-gram frequency tables for orders 1..kMaxNgramOrder. N-grams never
/// cross sentence boundaries.
class NgramCounter {
 public:
  void add(const Sentence& sentence);
  void add(std::span<const Sentence> corpus);

  /// Adds another counter's frequencies. Merge order does not matter.
  void merge(const NgramCounter& other);

  /// Distinct n-grams of order n with frequency >= min_count.
  std::uint64_t unique_count(std::size_t order, std::uint64_t min_count) const;

  const std::unordered_map<std::string, std::uint64_t>& table(std::size_t order) const;

 private:
  std::array<std::unordered_map<std::string, std::uint64_t>, kMaxNgramOrder> tables_;
};

std::uint64_t count_unique_ngrams(std::span<const Sentence> corpus, std::size_t order,
                                  std::uint64_t min_count);

/// Counts shards of the corpus on `workers` threads and merges the tables.
NgramCounter count_sharded(std::span<const Sentence> corpus, std::size_t shards, unsigned workers);

struct NgramProfile {
  std::array<std::uint64_t, kMaxNgramOrder> unique_counts{};
  std::array<std::uint64_t, kMaxNgramOrder> min_counts{};

  /// count(2) / count(1); empty when count(1) == 0.
  std::optional<double> unigram_growth() const;
  /// count(n) / count(2) for n in 3..5; empty when count(2) == 0.
  std::optional<double> bigram_growth(std::size_t order) const;

  static NgramProfile from_counts(const std::array<std::uint64_t, kMaxNgramOrder>& counts);
};

NgramProfile growth_profile(std::span<const Sentence> corpus, std::uint64_t min_count);
NgramProfile growth_profile(std::span<const Sentence> corpus,
                            const std::array<std::uint64_t, kMaxNgramOrder>& min_counts);
NgramProfile growth_profile(const NgramCounter& counter,
                            const std::array<std::uint64_t, kMaxNgramOrder>& min_counts);

enum class AllocationMode { Paper, Computed };

/// Filters per window size. Window sizes are 1-based.
struct FilterAllocation {
  std::size_t x = 1;
  std::map<std::size_t, std::size_t> counts;

  std::size_t total() const;
  friend bool operator==(const FilterAllocation&, const FilterAllocation&) = default;
};

/// Nearest multiple of 10, at least 1.
std::size_t round_multiplier(double value);

/// Paper mode: {x, 20x, 60x, 60x, 60x}. Computed mode: window 1 gets x,
/// window 2 gets round(mean unigram growth) * x, windows 3-5 get
/// round(mean unigram growth * mean bigram growth) * x, averaging over all
/// profiles (and, for bigram growth, over orders 3-5).
FilterAllocation derive_allocation(std::span<const NgramProfile> profiles, std::size_t x,
                                   AllocationMode mode);

void write_profile_csv(std::ostream& out, const NgramProfile& profile);
std::string allocation_to_json(const FilterAllocation& allocation, AllocationMode mode);

/// One sentence per line, whitespace-separated tokens.
std::vector<Sentence> read_tokenized_corpus(std::istream& in);
/// One sentence per line of raw text, tokenized with `tokenize`.
std::vector<Sentence> read_raw_corpus(std::istream& in);

}  // namespace amaq
