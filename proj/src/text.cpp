#include "evograph/text.hpp"

#include <algorithm>
#include <cctype>

namespace evograph {

namespace {

bool is_word_byte(unsigned char c) {
  return std::isalnum(c) || c >= 0x80;
}

bool is_space_like(unsigned char c) {
  return c == '-' || c == '_' || std::isspace(c);
}

}  // namespace

NormalizedText normalize_with_offsets(std::string_view raw) {
  NormalizedText out;
  out.text.reserve(raw.size());
  bool pending_space = false;
  size_t pending_at = 0;
  for (size_t i = 0; i < raw.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(raw[i]);
    if (is_word_byte(c)) {
      if (pending_space && !out.text.empty()) {
        out.text.push_back(' ');
        out.raw_begin.push_back(pending_at);
        out.raw_end.push_back(pending_at + 1);
      }
      pending_space = false;
      out.text.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
      out.raw_begin.push_back(i);
      out.raw_end.push_back(i + 1);
    } else if (is_space_like(c)) {
      if (!pending_space) pending_at = i;
      pending_space = true;
    }
    // other ASCII punctuation: dropped, does not break a pending space
  }
  return out;
}

std::string normalize_surface(std::string_view raw) {
  return normalize_with_offsets(raw).text;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (is_word_byte(c)) {
      cur.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

const std::set<std::string>& stopwords() {
  static const std::set<std::string> words = {
      "a",    "an",   "and",  "are",   "as",    "at",   "be",    "been",
      "but",  "by",   "can",  "for",   "from",  "had",  "has",   "have",
      "if",   "in",   "into", "is",    "it",    "its",  "more",  "most",
      "no",   "not",  "of",   "on",    "or",    "our",  "over",  "such",
      "than", "that", "the",  "their", "then",  "there", "these", "they",
      "this", "to",   "under", "was",  "we",    "were", "which", "while",
      "with", "will"};
  return words;
}

bool is_stopword(const std::string& token) {
  return stopwords().count(token) > 0;
}

std::vector<std::string> content_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : tokenize(text))
    if (!is_stopword(t)) out.push_back(std::move(t));
  return out;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  size_t inter = 0;
  for (const auto& x : a) inter += b.count(x);
  size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::set<std::string> token_set(std::string_view text) {
  auto toks = tokenize(text);
  return {toks.begin(), toks.end()};
}

std::set<std::string> token_bigrams(std::string_view text) {
  auto toks = tokenize(text);
  std::set<std::string> out;
  for (size_t i = 0; i + 1 < toks.size(); ++i)
    out.insert(toks[i] + " " + toks[i + 1]);
  return out;
}

}  // namespace evograph
