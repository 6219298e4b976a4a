#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evograph/graph.hpp"
#include "evograph/types.hpp"

namespace evograph::testutil {

inline PaperNode make_paper(const NodeId& id, std::optional<int> year,
                            const std::string& title = "",
                            const std::string& abstract_text = "") {
  PaperNode p;
  p.id = id;
  p.title = title.empty() ? "Paper " + id : title;
  p.abstract_text = abstract_text;
  p.year = year;
  return p;
}

inline MethodNode make_method(const NodeId& id, const std::string& name,
                              std::optional<NodeId> introduced_by = {}) {
  MethodNode m;
  m.id = id;
  m.canonical_name = name;
  m.introduced_by = introduced_by;
  return m;
}

inline EvidenceRecord make_evidence(
    double confidence, const std::string& tag,
    BottleneckDimension dim = BottleneckDimension::accuracy,
    std::optional<BottleneckDimension> improvement = {},
    std::optional<BottleneckDimension> sacrifice = {}) {
  EvidenceRecord ev;
  ev.bottleneck_quote = "bottleneck " + tag;
  ev.bottleneck_description = "description " + tag;
  ev.bottleneck_dimension = dim;
  ev.mechanism_quote = "mechanism " + tag;
  ev.mechanism_description = "mechanism description " + tag;
  ev.tradeoff_sentence = "tradeoff " + tag + ".";
  ev.improvement_dim = improvement;
  ev.sacrifice_dim = sacrifice;
  ev.confidence = confidence;
  return ev;
}

inline Edge make_edge(const NodeId& source, const NodeId& target, EdgeType type,
                      double confidence = 0.8, const std::string& tag = "") {
  Edge e;
  e.source = source;
  e.target = target;
  e.type = type;
  if (is_causal(type))
    e.evidence = make_evidence(confidence, tag.empty() ? source + target : tag);
  return e;
}

// Appends every quote of every causal edge sourced at each paper to that
// paper's abstract, so the built graph passes the verbatim quote check.
inline void embed_quotes(std::vector<PaperNode>& papers,
                         const std::vector<Edge>& edges) {
  for (auto& p : papers) {
    for (const auto& e : edges) {
      if (e.source != p.id || !e.evidence) continue;
      p.abstract_text += " " + e.evidence->bottleneck_quote + ". " +
                         e.evidence->mechanism_quote + ". " +
                         e.evidence->tradeoff_sentence;
    }
  }
}

// Linear chain p0 <- p1 <- ... <- p{n-1} of extends edges, one method per
// paper, years ascending from start_year.
inline Graph chain_graph(int n, int start_year = 2015, double confidence = 0.8) {
  std::vector<PaperNode> papers;
  std::vector<MethodNode> methods;
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    papers.push_back(make_paper("p" + std::to_string(i), start_year + i));
    methods.push_back(make_method("m" + std::to_string(i),
                                  "method " + std::to_string(i),
                                  "p" + std::to_string(i)));
    if (i > 0)
      edges.push_back(make_edge("p" + std::to_string(i),
                                "p" + std::to_string(i - 1), EdgeType::extends,
                                confidence));
  }
  embed_quotes(papers, edges);
  return Graph::build(std::move(papers), std::move(methods), {}, std::move(edges));
}

}  // namespace evograph::testutil
