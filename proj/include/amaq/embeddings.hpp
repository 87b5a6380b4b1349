#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "amaq/text.hpp"

namespace amaq {

/// Word -> dense vector table. Immutable after construction apart from
/// `mutable_row`, which training uses when embeddings are fine-tuned.
class EmbeddingTable {
 public:
  static constexpr std::ptrdiff_t kOov = -1;

  explicit EmbeddingTable(std::size_t dimension);

  /// Parses the "<vocab_size> <d>" header text format. Errors name the
  /// offending 1-based line.
  static EmbeddingTable load(const std::filesystem::path& path);
  static EmbeddingTable parse(std::istream& in, const std::string& source_name = "<stream>");

  void add(std::string word, std::span<const double> vector);

  std::size_t dimension() const noexcept { return dim_; }
  std::size_t size() const noexcept { return words_.size(); }

  /// Row index for a word: exact match, then lowercase match, else kOov.
  std::ptrdiff_t index_of(std::string_view word) const;

  /// Stored vector or the all-zero OOV vector.
  std::span<const double> lookup(std::string_view word) const;
  std::span<const double> row(std::size_t index) const;
  std::span<double> mutable_row(std::size_t index);

  const std::vector<std::string>& words() const noexcept { return words_; }
  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& mutable_data() noexcept { return data_; }

 private:
  std::size_t dim_;
  std::vector<std::string> words_;
  std::vector<double> data_;  // row-major, size() x dim_
  std::vector<double> zero_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Fixed-length embedded question: `rows` x d, zero padded.
struct EncodedQuestion {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> matrix;              // row-major rows x dim
  std::vector<std::ptrdiff_t> row_ids;     // table row per position, kOov for OOV and padding
  std::size_t true_length = 0;
  int label = 0;

  std::span<const double> row(std::size_t i) const { return {matrix.data() + i * dim, dim}; }
};

/// Embeds the first min(|tokens|, length) tokens in order and zero-pads the rest.
EncodedQuestion encode(const TokenSequence& tokens, const EmbeddingTable& table,
                       std::size_t length, int label = 0);
EncodedQuestion encode(std::span<const std::string> tokens, const EmbeddingTable& table,
                       std::size_t length, int label = 0);

}  // namespace amaq
