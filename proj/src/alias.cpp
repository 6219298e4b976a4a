#include "evograph/alias.hpp"

#include <algorithm>

#include "evograph/json_io.hpp"
#include "evograph/text.hpp"

namespace evograph {

using jsonio::json;

void AliasRegistry::add(const NodeId& method, const std::vector<std::string>& surfaces) {
  for (const auto& raw : surfaces) {
    std::string norm = normalize_surface(raw);
    if (norm.empty())
      throw ParseError("alias surface '" + raw + "' is empty after normalization");
    auto [it, inserted] = by_surface_.emplace(norm, method);
    if (!inserted && it->second != method)
      throw UniquenessError("alias surface '" + norm + "' is ambiguous between '" +
                            it->second + "' and '" + method + "'");
    surfaces_[method].insert(norm);
  }
}

void AliasRegistry::add_negative(const std::string& surface, const std::string& note) {
  std::string norm = normalize_surface(surface);
  if (norm.empty())
    throw ParseError("negative surface '" + surface + "' is empty after normalization");
  negatives_[norm] = note;
}

std::optional<NodeId> AliasRegistry::exact_match(std::string_view raw) const {
  std::string norm = normalize_surface(raw);
  if (norm.empty() || negatives_.count(norm)) return std::nullopt;
  auto it = by_surface_.find(norm);
  if (it == by_surface_.end()) return std::nullopt;
  return it->second;
}

void AliasRegistry::set_version_suffixes(std::vector<std::string> suffixes) {
  version_suffixes_.clear();
  for (const auto& s : suffixes) {
    std::string norm = normalize_surface(s);
    if (!norm.empty()) version_suffixes_.insert(norm);
  }
}

AliasRegistry AliasRegistry::from_json(const json& doc, const std::string& ctx) {
  jsonio::expect_object(doc, ctx);
  AliasRegistry reg;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (it.key() == "negatives") {
      if (!it.value().is_array())
        throw ParseError(ctx + ": 'negatives' must be an array");
      for (const auto& entry : it.value()) {
        jsonio::expect_object(entry, ctx + " negatives");
        jsonio::check_keys(entry, {"surface", "note"}, ctx + " negatives");
        reg.add_negative(jsonio::require_string(entry, "surface", ctx + " negatives"),
                         jsonio::get_string(entry, "note", ctx + " negatives"));
      }
      continue;
    }
    if (!it.value().is_array())
      throw ParseError(ctx + ": surfaces for '" + it.key() + "' must be an array");
    std::vector<std::string> surfaces;
    for (const auto& s : it.value()) {
      if (!s.is_string())
        throw ParseError(ctx + ": surfaces for '" + it.key() + "' must be strings");
      surfaces.push_back(s.get<std::string>());
    }
    reg.add(it.key(), surfaces);
  }
  return reg;
}

AliasRegistry AliasRegistry::load(const std::string& path) {
  return from_json(jsonio::parse(jsonio::read_file(path), path), path);
}

json AliasRegistry::to_json() const {
  json doc = json::object();
  for (const auto& [method, surfaces] : surfaces_)
    doc[method] = std::vector<std::string>(surfaces.begin(), surfaces.end());
  json negs = json::array();
  for (const auto& [surface, note] : negatives_)
    negs.push_back({{"surface", surface}, {"note", note}});
  doc["negatives"] = negs;
  return doc;
}

namespace {

struct Candidate {
  size_t start;
  size_t len;
  const std::string* surface;
  const NodeId* method;
};

bool word_boundary(const std::string& text, size_t start, size_t end) {
  bool left = start == 0 || text[start - 1] == ' ';
  bool right = end == text.size() || text[end] == ' ';
  return left && right;
}

}  // namespace

std::vector<Mention> resolve_mentions(std::string_view text,
                                      const AliasRegistry& registry) {
  NormalizedText norm = normalize_with_offsets(text);
  if (norm.text.empty()) return {};

  std::vector<Candidate> candidates;
  for (const auto& [surface, method] : registry.by_surface()) {
    if (registry.negatives().count(surface)) continue;
    size_t pos = 0;
    while ((pos = norm.text.find(surface, pos)) != std::string::npos) {
      if (word_boundary(norm.text, pos, pos + surface.size()))
        candidates.push_back({pos, surface.size(), &surface, &method});
      ++pos;
    }
  }

  // Longest match wins; earlier spans break length ties.
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.len != b.len) return a.len > b.len;
              if (a.start != b.start) return a.start < b.start;
              return *a.method < *b.method;
            });

  struct Span {
    size_t start, end;
    const NodeId* method;
  };
  std::vector<Span> selected;
  for (const auto& c : candidates) {
    bool overlaps = false;
    for (const auto& s : selected) {
      if (c.start < s.end && s.start < c.start + c.len) {
        overlaps = true;
        break;
      }
    }
    if (!overlaps) selected.push_back({c.start, c.start + c.len, c.method});
  }
  std::sort(selected.begin(), selected.end(),
            [](const Span& a, const Span& b) { return a.start < b.start; });

  // Absorb trailing version-suffix tokens into the span; the mention keeps
  // resolving to the matched (parent) method.
  const auto& suffixes = registry.version_suffixes();
  for (size_t i = 0; i < selected.size(); ++i) {
    for (;;) {
      size_t& end = selected[i].end;
      if (end >= norm.text.size() || norm.text[end] != ' ') break;
      size_t tok_start = end + 1;
      size_t tok_end = norm.text.find(' ', tok_start);
      if (tok_end == std::string::npos) tok_end = norm.text.size();
      if (tok_end == tok_start) break;
      if (i + 1 < selected.size() && tok_end > selected[i + 1].start) break;
      if (!suffixes.count(norm.text.substr(tok_start, tok_end - tok_start))) break;
      end = tok_end;
    }
  }

  std::vector<Mention> mentions;
  mentions.reserve(selected.size());
  for (const auto& s : selected) {
    Mention m;
    m.method = *s.method;
    m.surface = norm.text.substr(s.start, s.end - s.start);
    m.begin = norm.raw_begin[s.start];
    m.end = norm.raw_end[s.end - 1];
    mentions.push_back(std::move(m));
  }
  return mentions;
}

}  // namespace evograph
