#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "evograph/types.hpp"

namespace evograph {

// A resolved occurrence of a method name in raw text. begin/end are byte
// offsets into the raw text; surface is the normalized text of that span.
struct Mention {
  NodeId method;
  std::string surface;
  size_t begin = 0;
  size_t end = 0;

  bool operator==(const Mention&) const = default;
};

// Alias surfaces per method, stored normalized. A normalized surface mapping
// to two different methods is rejected at load (UniquenessError); surfaces on
// the negative list never resolve, even if also registered.
class AliasRegistry {
 public:
  AliasRegistry() = default;

  static AliasRegistry load(const std::string& path);
  static AliasRegistry from_json(const nlohmann::json& doc, const std::string& ctx);

  // Registers the normalized form of each surface. Empty-after-normalization
  // surfaces are rejected.
  void add(const NodeId& method, const std::vector<std::string>& surfaces);
  void add_negative(const std::string& surface, const std::string& note = "");

  // Method owning the normalized form of raw, unless negative-listed.
  std::optional<NodeId> exact_match(std::string_view raw) const;

  const std::map<std::string, NodeId>& by_surface() const { return by_surface_; }
  const std::map<NodeId, std::set<std::string>>& surfaces() const { return surfaces_; }
  const std::map<std::string, std::string>& negatives() const { return negatives_; }

  // Tokens treated as version suffixes during mention extension.
  const std::set<std::string>& version_suffixes() const { return version_suffixes_; }
  void set_version_suffixes(std::vector<std::string> suffixes);

  nlohmann::json to_json() const;

 private:
  std::map<std::string, NodeId> by_surface_;          // normalized -> method
  std::map<NodeId, std::set<std::string>> surfaces_;  // method -> normalized
  std::map<std::string, std::string> negatives_;      // normalized -> note
  std::set<std::string> version_suffixes_ = {"v2",    "v3", "large", "base",
                                             "small", "xl", "turbo"};
};

// Scans raw text for registered surfaces on normalized word boundaries.
// Longest match wins at overlaps; non-overlapping selected spans are extended
// over trailing version-suffix tokens (still resolving to the matched
// method); negative-listed surfaces never match. Output is ordered by span
// start and spans never overlap.
std::vector<Mention> resolve_mentions(std::string_view text,
                                      const AliasRegistry& registry);

}  // namespace evograph
