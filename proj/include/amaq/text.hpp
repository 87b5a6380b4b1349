#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace amaq {

/// Byte offsets [begin, end) into the text a token came from.
struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

struct TokenSequence {
  std::vector<std::string> tokens;
  std::vector<CharSpan> spans;  // one per token
  CharSpan source_span;         // covers first to last token

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
};

/// Splits text into word tokens (maximal runs of letters, digits and
/// apostrophes) and single-character punctuation tokens. Whitespace
/// separates. Non-ASCII code points count as word characters, except a
/// small set of typographic punctuation (curly quotes, dashes, ellipsis);
/// the curly right single quote counts as an apostrophe.
TokenSequence tokenize(std::string_view text);

/// True when the token contains at least one letter or digit.
bool is_word_token(std::string_view token);

/// Rule-based sentence splitter. A boundary follows '.', '!' or '?' when the
/// next character is whitespace or the end of text. Periods that close one
/// of the abbreviations in `sentence_abbreviations()` do not end a sentence.
/// Returns the trimmed, non-empty sentences.
std::vector<std::string_view> split_sentences(std::string_view text);

const std::vector<std::string>& sentence_abbreviations();

/// Replaces markdown links `[anchor](url)` with their anchor text, drops
/// bare URLs and strips emphasis markers (`*`, `~~`, and `_` at word edges).
std::string strip_markdown(std::string_view body);

std::string_view trim(std::string_view text);

/// True iff the trimmed text ends with '?' and splits into exactly one
/// sentence. Markdown is stripped first.
bool is_single_question(std::string_view text);

std::string ascii_lower(std::string_view text);

}  // namespace amaq
