#include "amaq/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace amaq {

namespace {

enum class CharClass { Space, Word, Punct };

struct CodePoint {
  char32_t value;
  std::size_t length;  // bytes
};

// Decodes one UTF-8 sequence. Invalid bytes decode as themselves with
// length 1, which tokenizes them as punctuation.
CodePoint decode(std::string_view text, std::size_t pos) {
  const auto lead = static_cast<unsigned char>(text[pos]);
  if (lead < 0x80) return {lead, 1};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((lead & 0xE0) == 0xC0) {
    len = 2;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    len = 3;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    len = 4;
    cp = lead & 0x07;
  } else {
    return {0xFFFD, 1};
  }
  if (pos + len > text.size()) return {0xFFFD, 1};
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(text[pos + i]);
    if ((b & 0xC0) != 0x80) return {0xFFFD, 1};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len};
}

constexpr std::array<char32_t, 12> kUnicodePunct = {
    0x2018, 0x201C, 0x201D, 0x2013, 0x2014, 0x2026,
    0x00AB, 0x00BB, 0x00BF, 0x00A1, 0x201E, 0xFFFD,
};

CharClass classify(char32_t cp) {
  if (cp < 0x80) {
    const auto c = static_cast<unsigned char>(cp);
    if (std::isspace(c)) return CharClass::Space;
    if (std::isalnum(c) || c == '\'') return CharClass::Word;
    return CharClass::Punct;
  }
  if (cp == 0x00A0 || cp == 0x2002 || cp == 0x2003 || cp == 0x2009 || cp == 0x3000)
    return CharClass::Space;
  if (cp == 0x2019) return CharClass::Word;
  if (std::find(kUnicodePunct.begin(), kUnicodePunct.end(), cp) != kUnicodePunct.end())
    return CharClass::Punct;
  return CharClass::Word;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

// The whitespace-delimited word ending at `end` (exclusive), with leading
// brackets and quotes removed.
std::string_view word_ending_at(std::string_view text, std::size_t end) {
  std::size_t begin = end;
  while (begin > 0 && !is_space(text[begin - 1])) --begin;
  while (begin < end && (text[begin] == '(' || text[begin] == '"' || text[begin] == '\'' ||
                         text[begin] == '['))
    ++begin;
  return text.substr(begin, end - begin);
}

bool is_abbreviation(std::string_view word) {
  const auto& list = sentence_abbreviations();
  return std::any_of(list.begin(), list.end(),
                     [&](const std::string& abbr) { return iequals(abbr, word); });
}

bool starts_with_url(std::string_view text, std::size_t pos) {
  const std::string_view rest = text.substr(pos);
  return rest.starts_with("http://") || rest.starts_with("https://") ||
         rest.starts_with("www.");
}

}  // namespace

TokenSequence tokenize(std::string_view text) {
  TokenSequence out;
  std::size_t pos = 0;
  std::size_t word_begin = std::string_view::npos;

  auto close_word = [&](std::size_t end) {
    if (word_begin == std::string_view::npos) return;
    out.tokens.emplace_back(text.substr(word_begin, end - word_begin));
    out.spans.push_back({word_begin, end});
    word_begin = std::string_view::npos;
  };

  while (pos < text.size()) {
    const CodePoint cp = decode(text, pos);
    switch (classify(cp.value)) {
      case CharClass::Word:
        if (word_begin == std::string_view::npos) word_begin = pos;
        break;
      case CharClass::Space:
        close_word(pos);
        break;
      case CharClass::Punct:
        close_word(pos);
        out.tokens.emplace_back(text.substr(pos, cp.length));
        out.spans.push_back({pos, pos + cp.length});
        break;
    }
    pos += cp.length;
  }
  close_word(text.size());

  if (!out.spans.empty()) out.source_span = {out.spans.front().begin, out.spans.back().end};
  return out;
}

bool is_word_token(std::string_view token) {
  return std::any_of(token.begin(), token.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u >= 0x80 || std::isalnum(u);
  });
}

const std::vector<std::string>& sentence_abbreviations() {
  static const std::vector<std::string> list = {"Mr.", "Mrs.", "Dr.", "U.S.",
                                                "e.g.", "i.e.", "vs."};
  return list;
}

std::string_view trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && is_space(text[begin])) ++begin;
  while (end > begin && is_space(text[end - 1])) --end;
  return text.substr(begin, end - begin);
}

std::vector<std::string_view> split_sentences(std::string_view text) {
  std::vector<std::string_view> sentences;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    const std::string_view s = trim(text.substr(start, end - start));
    if (!s.empty()) sentences.push_back(s);
    start = end;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (!is_terminator(text[i])) continue;
    const bool at_boundary = i + 1 == text.size() || is_space(text[i + 1]);
    if (!at_boundary) continue;
    if (text[i] == '.' && is_abbreviation(word_ending_at(text, i + 1))) continue;
    emit(i + 1);
  }
  emit(text.size());
  return sentences;
}

std::string strip_markdown(std::string_view body) {
  std::string out;
  out.reserve(body.size());
  std::size_t i = 0;
  while (i < body.size()) {
    const char c = body[i];

    // [anchor](url) -> anchor
    if (c == '[') {
      const std::size_t close = body.find(']', i + 1);
      if (close != std::string_view::npos && close + 1 < body.size() && body[close + 1] == '(') {
        std::size_t j = close + 2;
        int depth = 1;
        while (j < body.size() && depth > 0) {
          if (body[j] == '(') ++depth;
          if (body[j] == ')') --depth;
          ++j;
        }
        if (depth == 0) {
          out += strip_markdown(body.substr(i + 1, close - i - 1));
          i = j;
          continue;
        }
      }
    }

    // Bare URL: dropped up to whitespace, keeping a trailing sentence terminator.
    if ((i == 0 || is_space(body[i - 1]) || body[i - 1] == '(') && starts_with_url(body, i)) {
      std::size_t j = i;
      while (j < body.size() && !is_space(body[j])) ++j;
      if (is_terminator(body[j - 1])) out += body[j - 1];
      i = j;
      continue;
    }

    if (c == '*') {
      ++i;
      continue;
    }
    if (c == '~' && i + 1 < body.size() && body[i + 1] == '~') {
      i += 2;
      continue;
    }
    if (c == '_') {
      std::size_t j = i;
      while (j < body.size() && body[j] == '_') ++j;
      const bool left_edge = i == 0 || !std::isalnum(static_cast<unsigned char>(body[i - 1]));
      const bool right_edge = j == body.size() || !std::isalnum(static_cast<unsigned char>(body[j]));
      if (left_edge || right_edge) {
        i = j;
        continue;
      }
      out.append(body.substr(i, j - i));
      i = j;
      continue;
    }
    out += c;
    ++i;
  }
  return out;
}

bool is_single_question(std::string_view text) {
  const std::string cleaned = strip_markdown(text);
  const std::string_view t = trim(cleaned);
  if (t.empty() || t.back() != '?') return false;
  return split_sentences(t).size() == 1;
}

std::string ascii_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace amaq
