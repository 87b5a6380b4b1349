#include "amaq/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "amaq/error.hpp"

namespace amaq {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t begin = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > begin) fields.push_back(line.substr(begin, i - begin));
  }
  return fields;
}

bool parse_double(std::string_view s, double& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool parse_size(std::string_view s, std::size_t& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

[[noreturn]] void parse_error(const std::string& source, std::size_t line, const std::string& msg) {
  fail(ErrorCode::Parse, source + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::size_t dimension) : dim_(dimension), zero_(dimension, 0.0) {
  if (dimension == 0) fail(ErrorCode::InvalidArgument, "embedding dimension must be positive");
}

void EmbeddingTable::add(std::string word, std::span<const double> vector) {
  if (vector.size() != dim_)
    fail(ErrorCode::Shape, "vector for '" + word + "' has length " + std::to_string(vector.size()) +
                               ", expected " + std::to_string(dim_));
  if (index_.contains(word)) fail(ErrorCode::InvalidArgument, "duplicate word '" + word + "'");
  index_.emplace(word, words_.size());
  words_.push_back(std::move(word));
  data_.insert(data_.end(), vector.begin(), vector.end());
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open embeddings file " + path.string());
  return parse(in, path.string());
}

EmbeddingTable EmbeddingTable::parse(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) parse_error(source, 1, "missing header");
  const auto header = split_fields(line);
  std::size_t vocab = 0;
  std::size_t dim = 0;
  if (header.size() != 2 || !parse_size(header[0], vocab) || !parse_size(header[1], dim) || dim == 0)
    parse_error(source, 1, "malformed header, expected \"<vocab_size> <dimension>\"");

  EmbeddingTable table(dim);
  table.words_.reserve(vocab);
  table.data_.reserve(vocab * dim);
  std::vector<double> vec(dim);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() != dim + 1)
      parse_error(source, line_no,
                  "vector length " + std::to_string(fields.size() - 1) + " does not match dimension " +
                      std::to_string(dim));
    for (std::size_t k = 0; k < dim; ++k)
      if (!parse_double(fields[k + 1], vec[k]))
        parse_error(source, line_no, "bad number '" + std::string(fields[k + 1]) + "'");
    std::string word(fields[0]);
    if (table.index_.contains(word)) parse_error(source, line_no, "duplicate word '" + word + "'");
    table.add(std::move(word), vec);
  }
  if (table.size() != vocab)
    parse_error(source, line_no,
                "header declares " + std::to_string(vocab) + " words but file has " +
                    std::to_string(table.size()));
  return table;
}

std::ptrdiff_t EmbeddingTable::index_of(std::string_view word) const {
  if (auto it = index_.find(std::string(word)); it != index_.end())
    return static_cast<std::ptrdiff_t>(it->second);
  if (auto it = index_.find(ascii_lower(word)); it != index_.end())
    return static_cast<std::ptrdiff_t>(it->second);
  return kOov;
}

std::span<const double> EmbeddingTable::lookup(std::string_view word) const {
  const std::ptrdiff_t idx = index_of(word);
  if (idx == kOov) return zero_;
  return row(static_cast<std::size_t>(idx));
}

std::span<const double> EmbeddingTable::row(std::size_t index) const {
  return {data_.data() + index * dim_, dim_};
}

std::span<double> EmbeddingTable::mutable_row(std::size_t index) {
  return {data_.data() + index * dim_, dim_};
}

EncodedQuestion encode(std::span<const std::string> tokens, const EmbeddingTable& table,
                       std::size_t length, int label) {
  if (length == 0) fail(ErrorCode::InvalidArgument, "sequence length must be >= 1");
  EncodedQuestion q;
  q.rows = length;
  q.dim = table.dimension();
  q.matrix.assign(length * q.dim, 0.0);
  q.row_ids.assign(length, EmbeddingTable::kOov);
  q.true_length = std::min(tokens.size(), length);
  q.label = label;
  for (std::size_t i = 0; i < q.true_length; ++i) {
    const std::ptrdiff_t idx = table.index_of(tokens[i]);
    q.row_ids[i] = idx;
    if (idx == EmbeddingTable::kOov) continue;
    const auto v = table.row(static_cast<std::size_t>(idx));
    std::copy(v.begin(), v.end(), q.matrix.begin() + static_cast<std::ptrdiff_t>(i * q.dim));
  }
  return q;
}

EncodedQuestion encode(const TokenSequence& tokens, const EmbeddingTable& table, std::size_t length,
                       int label) {
  return encode(std::span<const std::string>(tokens.tokens), table, length, label);
}

}  // namespace amaq
