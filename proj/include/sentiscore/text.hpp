#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sentiscore/corpus.hpp"
#include "sentiscore/error.hpp"

namespace sentiscore {

namespace detail {

// Decode one UTF-8 codepoint starting at position i; advances i. Invalid
// bytes are passed through as single-byte codepoints rather than rejected.
inline char32_t decode_utf8(const std::string& s, std::size_t& i) {
  const auto byte = [&](std::size_t k) {
    return static_cast<unsigned char>(s[k]);
  };
  const unsigned char b0 = byte(i);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  auto is_cont = [&](std::size_t k) {
    return k < s.size() && (byte(k) & 0xC0) == 0x80;
  };
  if ((b0 & 0xE0) == 0xC0 && is_cont(i + 1)) {
    char32_t cp = (char32_t(b0 & 0x1F) << 6) | (byte(i + 1) & 0x3F);
    i += 2;
    return cp;
  }
  if ((b0 & 0xF0) == 0xE0 && is_cont(i + 1) && is_cont(i + 2)) {
    char32_t cp = (char32_t(b0 & 0x0F) << 12) |
                  (char32_t(byte(i + 1) & 0x3F) << 6) | (byte(i + 2) & 0x3F);
    i += 3;
    return cp;
  }
  if ((b0 & 0xF8) == 0xF0 && is_cont(i + 1) && is_cont(i + 2) &&
      is_cont(i + 3)) {
    char32_t cp = (char32_t(b0 & 0x07) << 18) |
                  (char32_t(byte(i + 1) & 0x3F) << 12) |
                  (char32_t(byte(i + 2) & 0x3F) << 6) | (byte(i + 3) & 0x3F);
    i += 4;
    return cp;
  }
  ++i;
  return b0;
}

inline bool is_unicode_space(char32_t cp) {
  switch (cp) {
    case 0x09:
    case 0x0A:
    case 0x0B:
    case 0x0C:
    case 0x0D:
    case 0x20:
    case 0x85:
    case 0xA0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

// Punctuation stripped from token edges: ASCII punctuation plus common
// typographic quotes, dashes, ellipsis and full-width marks.
inline bool is_strippable_punct(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
           (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
  }
  switch (cp) {
    case 0xAB:    // left guillemet
    case 0xBB:    // right guillemet
    case 0x2013:  // en dash
    case 0x2014:  // em dash
    case 0x2018:
    case 0x2019:
    case 0x201C:
    case 0x201D:
    case 0x2026:  // ellipsis
    case 0x3001:  // ideographic comma
    case 0x3002:  // ideographic full stop
    case 0xFF01:  // full-width !
    case 0xFF0C:  // full-width ,
    case 0xFF0E:  // full-width .
    case 0xFF1A:  // full-width :
    case 0xFF1B:  // full-width ;
    case 0xFF1F:  // full-width ?
      return true;
    default:
      return false;
  }
}

inline bool is_sentence_terminator(char32_t cp) {
  return cp == '.' || cp == '!' || cp == '?' || cp == 0xFF01 ||
         cp == 0xFF1F || cp == 0x3002 || cp == 0xFF0E;
}

inline std::string ascii_lowercase(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

}  // namespace detail

// Lowercased tokens split on Unicode whitespace, with leading and trailing
// punctuation stripped; empty tokens are dropped.
inline std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    // skip whitespace
    std::size_t probe = i;
    char32_t cp = detail::decode_utf8(text, probe);
    if (detail::is_unicode_space(cp)) {
      i = probe;
      continue;
    }
    // collect one whitespace-delimited run as (codepoint, byte range)
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::vector<char32_t> cps;
    while (i < text.size()) {
      std::size_t start = i;
      cp = detail::decode_utf8(text, i);
      if (detail::is_unicode_space(cp)) break;
      spans.emplace_back(start, i);
      cps.push_back(cp);
    }
    std::size_t lo = 0;
    std::size_t hi = cps.size();
    while (lo < hi && detail::is_strippable_punct(cps[lo])) ++lo;
    while (hi > lo && detail::is_strippable_punct(cps[hi - 1])) --hi;
    if (lo < hi) {
      std::string token = text.substr(spans[lo].first,
                                      spans[hi - 1].second - spans[lo].first);
      tokens.push_back(detail::ascii_lowercase(std::move(token)));
    }
  }
  return tokens;
}

// Split on sentence-final punctuation followed by whitespace or end of
// text; whitespace-only fragments are dropped, and text without any
// terminator comes back as a single sentence.
inline std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> sentences;
  std::string current;
  std::size_t current_nonws_end = 0;

  auto flush = [&] {
    current.resize(current_nonws_end);
    if (!current.empty()) sentences.push_back(current);
    current.clear();
    current_nonws_end = 0;
  };

  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t start = i;
    char32_t cp = detail::decode_utf8(text, i);
    const bool ws = detail::is_unicode_space(cp);
    if (ws && current.empty()) continue;  // skip leading whitespace
    current.append(text, start, i - start);
    if (!ws) current_nonws_end = current.size();
    if (detail::is_sentence_terminator(cp)) {
      std::size_t probe = i;
      if (probe >= text.size() ||
          detail::is_unicode_space(detail::decode_utf8(text, probe))) {
        flush();
      }
    }
  }
  flush();
  return sentences;
}

// ---------------------------------------------------------------------------
// Vocabulary: pad and unknown at fixed slots, then tokens by descending
// corpus frequency with lexicographic tie-breaking.

struct Vocabulary {
  static constexpr std::uint32_t kPadIndex = 0;
  static constexpr std::uint32_t kUnknownIndex = 1;
  static constexpr const char* kPadToken = "<pad>";
  static constexpr const char* kUnknownToken = "<unk>";

  std::vector<std::string> tokens;  // by index, including the reserved pair
  std::unordered_map<std::string, std::uint32_t> index_of;  // real tokens

  std::size_t size() const { return tokens.size(); }

  std::uint32_t lookup(const std::string& token) const {
    auto it = index_of.find(token);
    return it == index_of.end() ? kUnknownIndex : it->second;
  }
};

inline Vocabulary build_vocab(const Corpus& corpus, std::size_t top_n) {
  if (top_n < 1) {
    throw RangeError("vocabulary size must be >= 1");
  }
  if (corpus.empty()) {
    throw EmptyInputError("cannot build a vocabulary from an empty corpus");
  }
  std::unordered_map<std::string, std::size_t> freq;
  for (const Review& r : corpus.reviews) {
    for (std::string& token : tokenize(r.text)) {
      ++freq[std::move(token)];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(),
                                                          freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > top_n) ranked.resize(top_n);

  Vocabulary vocab;
  vocab.tokens.reserve(ranked.size() + 2);
  vocab.tokens.emplace_back(Vocabulary::kPadToken);
  vocab.tokens.emplace_back(Vocabulary::kUnknownToken);
  for (auto& [token, _] : ranked) {
    vocab.index_of.emplace(token, static_cast<std::uint32_t>(vocab.tokens.size()));
    vocab.tokens.push_back(std::move(token));
  }
  return vocab;
}

// Fixed-length index sequence; pad and unknown handling per the vocabulary.
struct EncodedDoc {
  std::vector<std::uint32_t> indices;

  std::size_t length() const { return indices.size(); }
};

inline EncodedDoc encode(const std::vector<std::string>& tokens,
                         const Vocabulary& vocab, std::size_t length) {
  if (length < 1) {
    throw RangeError("encoded document length must be >= 1");
  }
  EncodedDoc doc;
  doc.indices.assign(length, Vocabulary::kPadIndex);
  const std::size_t limit = std::min(tokens.size(), length);
  for (std::size_t i = 0; i < limit; ++i) {
    doc.indices[i] = vocab.lookup(tokens[i]);
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Vocabulary file: one token per line in index order, the two reserved
// slots forming the header.

inline void save_vocabulary(const Vocabulary& vocab, const std::string& path) {
  std::string out;
  for (const std::string& token : vocab.tokens) {
    out += token;
    out += '\n';
  }
  detail::write_file(path, out);
}

inline Vocabulary load_vocabulary(const std::string& path) {
  const std::string content = detail::read_file(path);
  std::vector<std::string> lines;
  std::size_t begin = 0;
  while (begin < content.size()) {
    std::size_t end = content.find('\n', begin);
    if (end == std::string::npos) {
      lines.push_back(content.substr(begin));
      break;
    }
    lines.push_back(content.substr(begin, end - begin));
    begin = end + 1;
  }
  if (lines.size() < 2 || lines[0] != Vocabulary::kPadToken ||
      lines[1] != Vocabulary::kUnknownToken) {
    throw FormatError("vocabulary file missing reserved header: " + path);
  }
  Vocabulary vocab;
  vocab.tokens = lines;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    if (lines[i] == Vocabulary::kPadToken ||
        lines[i] == Vocabulary::kUnknownToken ||
        !vocab.index_of.emplace(lines[i], static_cast<std::uint32_t>(i)).second) {
      throw FormatError("vocabulary file has duplicate token '" + lines[i] +
                        "': " + path);
    }
  }
  return vocab;
}

}  // namespace sentiscore
