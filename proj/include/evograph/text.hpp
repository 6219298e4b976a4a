#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace evograph {

// Mention-surface normalization: lowercase ASCII letters, hyphens/underscores
// and whitespace runs become single spaces, all other ASCII punctuation is
// removed, result is trimmed. Bytes >= 0x80 pass through and count as word
// characters.
std::string normalize_surface(std::string_view raw);

// Same normalization but keeps, for every character of the normalized string,
// the byte range it came from in the raw input, so matches on normalized text
// can be reported as raw-byte spans.
struct NormalizedText {
  std::string text;
  std::vector<size_t> raw_begin;  // per normalized char
  std::vector<size_t> raw_end;    // per normalized char, exclusive
};

NormalizedText normalize_with_offsets(std::string_view raw);

// Lowercased maximal alphanumeric runs (bytes >= 0x80 count as alphanumeric).
std::vector<std::string> tokenize(std::string_view text);

// 50 common English function words dropped by the BM25 tokenizer and the
// query-term extractor.
const std::set<std::string>& stopwords();

bool is_stopword(const std::string& token);

// tokenize() minus stopwords.
std::vector<std::string> content_tokens(std::string_view text);

// Jaccard similarity of two token sets; 1.0 when both are empty.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

std::set<std::string> token_set(std::string_view text);

// Adjacent-token pairs ("a b") over the full token stream.
std::set<std::string> token_bigrams(std::string_view text);

}  // namespace evograph
