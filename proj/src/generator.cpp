#include "evograph/generator.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "evograph/text.hpp"

namespace evograph {

namespace {

constexpr int kSacrificeMinCount = 2;

EdgeCite cite_edge(const Graph& g, size_t idx) {
  const Edge& e = g.edges()[idx];
  return {idx, e.source, e.target, e.type,
          e.evidence ? e.evidence->bottleneck_quote : ""};
}

nlohmann::json axes_to_json(const std::vector<AxisEntry>& axes) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& axis : axes) {
    nlohmann::json support = nlohmann::json::array();
    for (const auto& cite : axis.support) support.push_back(cite.to_json());
    out.push_back({{"dimension", to_string(axis.dimension)}, {"support", support}});
  }
  return out;
}

// Stable ordering shared by the three axis lists: support count descending,
// then taxonomy order (the build loop already runs in taxonomy order).
void sort_axes(std::vector<AxisEntry>& axes) {
  std::stable_sort(axes.begin(), axes.end(),
                   [](const AxisEntry& a, const AxisEntry& b) {
                     return a.support.size() > b.support.size();
                   });
}

bool within_distance(const std::map<NodeId, std::set<NodeId>>& adjacency,
                     const NodeId& from, const NodeId& to, int max_hops) {
  if (from == to) return true;
  std::map<NodeId, int> dist{{from, 0}};
  std::deque<NodeId> queue{from};
  while (!queue.empty()) {
    NodeId cur = queue.front();
    queue.pop_front();
    int d = dist[cur];
    if (d == max_hops) continue;
    auto it = adjacency.find(cur);
    if (it == adjacency.end()) continue;
    for (const auto& next : it->second) {
      if (next == to) return true;
      if (dist.emplace(next, d + 1).second) queue.push_back(next);
    }
  }
  return false;
}

std::string quote_sentence(const EdgeCite& cite) {
  return "Stored evidence on " + cite.source + " -> " + cite.target +
         " records: \"" + cite.bottleneck_quote + "\".";
}

}  // namespace

nlohmann::json EdgeCite::to_json() const {
  return {{"edge_index", edge_index},
          {"source", source},
          {"target", target},
          {"type", to_string(type)},
          {"bottleneck_quote", bottleneck_quote}};
}

bool GapSummary::empty() const {
  return open_axes.empty() && recent_directions.empty() &&
         sacrifice_axes.empty() && disconnected_pairs.empty();
}

nlohmann::json GapSummary::to_json() const {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : disconnected_pairs)
    pairs.push_back({{"first", p.first},
                     {"first_name", p.first_name},
                     {"second", p.second},
                     {"second_name", p.second_name}});
  return {{"open_axes", axes_to_json(open_axes)},
          {"recent_directions", axes_to_json(recent_directions)},
          {"sacrifice_axes", axes_to_json(sacrifice_axes)},
          {"disconnected_pairs", pairs}};
}

Strategy strategy_from_string(const std::string& s) {
  if (s == "bottleneck_resolution") return Strategy::bottleneck_resolution;
  if (s == "trend_extrapolation") return Strategy::trend_extrapolation;
  if (s == "cross_pollination") return Strategy::cross_pollination;
  if (s == "paradigm_challenge") return Strategy::paradigm_challenge;
  throw ParseError("unknown strategy '" + s + "'");
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::bottleneck_resolution: return "bottleneck_resolution";
    case Strategy::trend_extrapolation: return "trend_extrapolation";
    case Strategy::cross_pollination: return "cross_pollination";
    case Strategy::paradigm_challenge: return "paradigm_challenge";
  }
  throw ParamError("invalid strategy");
}

nlohmann::json Proposal::to_json() const {
  nlohmann::json cert;
  if (certificate)
    cert = {{"edge_source", certificate->edge_source},
            {"edge_target", certificate->edge_target},
            {"edge_type", to_string(certificate->edge_type)},
            {"bottleneck_quote", certificate->bottleneck_quote},
            {"justification", certificate->justification}};
  return {{"title", title},
          {"body", body},
          {"strategy", to_string(strategy)},
          {"certificate", cert},
          {"fallback", fallback},
          {"degenerate", degenerate}};
}

GapSummary build_gap_summary(const Context& ctx,
                             const std::vector<EvolutionChain>& chains,
                             const Graph& g, const CorpusIndex& index,
                             int now_year, const GeneratorConfig& cfg) {
  std::set<size_t> pooled(ctx.edge_indices.begin(), ctx.edge_indices.end());
  for (const auto& chain : chains)
    pooled.insert(chain.edge_indices.begin(), chain.edge_indices.end());

  std::map<BottleneckDimension, std::vector<EdgeCite>> bottleneck_cites;
  std::map<BottleneckDimension, std::vector<EdgeCite>> recent_cites;
  std::map<BottleneckDimension, std::vector<EdgeCite>> sacrifice_cites;
  std::set<BottleneckDimension> strongly_improved;
  for (size_t idx : pooled) {
    const Edge& e = g.edges()[idx];
    if (!e.evidence) continue;
    EdgeCite cite = cite_edge(g, idx);
    bottleneck_cites[e.evidence->bottleneck_dimension].push_back(cite);
    if (e.evidence->improvement_dim) {
      if (is_strong_causal(e.type)) strongly_improved.insert(*e.evidence->improvement_dim);
      auto year = g.year_of(e.source);
      if (year && *year >= now_year - cfg.recent_window_years)
        recent_cites[*e.evidence->improvement_dim].push_back(cite);
    }
    if (e.evidence->sacrifice_dim)
      sacrifice_cites[*e.evidence->sacrifice_dim].push_back(cite);
  }

  GapSummary summary;
  for (BottleneckDimension dim : all_dimensions()) {
    auto it = bottleneck_cites.find(dim);
    if (it != bottleneck_cites.end() && !strongly_improved.count(dim))
      summary.open_axes.push_back({dim, it->second});
    auto rit = recent_cites.find(dim);
    if (rit != recent_cites.end())
      summary.recent_directions.push_back({dim, rit->second});
    auto sit = sacrifice_cites.find(dim);
    if (sit != sacrifice_cites.end() &&
        sit->second.size() >= kSacrificeMinCount)
      summary.sacrifice_axes.push_back({dim, sit->second});
  }
  sort_axes(summary.open_axes);
  sort_axes(summary.recent_directions);
  sort_axes(summary.sacrifice_axes);

  // Candidate pool: the query methods plus the most-mentioned methods across
  // the context papers, capped to bound the pair scan.
  std::map<NodeId, int> context_mentions;
  for (const auto& paper : ctx.papers) {
    auto pos = index.paper_pos.find(paper);
    if (pos == index.paper_pos.end()) continue;
    for (const auto& [method, count] : index.mention_counts[pos->second])
      context_mentions[method] += count;
  }
  std::vector<std::pair<NodeId, int>> ranked(context_mentions.begin(),
                                             context_mentions.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::set<NodeId> pool(ctx.methods.begin(), ctx.methods.end());
  for (size_t i = 0; i < ranked.size() && i < static_cast<size_t>(cfg.pair_pool_cap); ++i)
    pool.insert(ranked[i].first);

  auto adjacency = project_method_relations(g, g.seed_relations()).undirected();
  for (auto a = pool.begin(); a != pool.end(); ++a)
    for (auto b = std::next(a); b != pool.end(); ++b) {
      if (index.co_utilized(*a, *b)) continue;
      if (within_distance(adjacency, *a, *b, cfg.pair_dag_distance)) continue;
      const MethodNode* ma = g.method(*a);
      const MethodNode* mb = g.method(*b);
      summary.disconnected_pairs.push_back(
          {*a, *b, ma ? ma->canonical_name : *a, mb ? mb->canonical_name : *b});
    }
  return summary;
}

StrategyChoice select_strategy(const GapSummary& summary) {
  if (!summary.open_axes.empty()) return {Strategy::bottleneck_resolution, false};
  if (!summary.sacrifice_axes.empty()) return {Strategy::paradigm_challenge, false};
  if (!summary.disconnected_pairs.empty()) return {Strategy::cross_pollination, false};
  if (!summary.recent_directions.empty()) return {Strategy::trend_extrapolation, false};
  return {Strategy::trend_extrapolation, true};
}

bool verify_certificate(const Certificate& certificate, const Graph& g) {
  if (!is_causal(certificate.edge_type)) return false;
  for (const Edge& e : g.edges()) {
    if (e.source != certificate.edge_source || e.target != certificate.edge_target ||
        e.type != certificate.edge_type)
      continue;
    return e.evidence && e.evidence->bottleneck_quote == certificate.bottleneck_quote;
  }
  return false;
}

Proposal fallback_proposal(const GapSummary& summary) {
  struct Pick {
    const AxisEntry* entry = nullptr;
    Strategy strategy = Strategy::trend_extrapolation;
    int priority = 0;
  };
  Pick best;
  auto consider = [&](const std::vector<AxisEntry>& axes, Strategy strategy,
                      int priority) {
    for (const auto& entry : axes) {
      if (entry.support.empty()) continue;
      bool better =
          !best.entry || entry.support.size() > best.entry->support.size() ||
          (entry.support.size() == best.entry->support.size() &&
           priority < best.priority);
      if (better) best = {&entry, strategy, priority};
    }
  };
  consider(summary.open_axes, Strategy::bottleneck_resolution, 0);
  consider(summary.sacrifice_axes, Strategy::paradigm_challenge, 1);
  consider(summary.recent_directions, Strategy::trend_extrapolation, 3);

  Proposal p;
  p.fallback = true;
  if (best.entry) {
    const AxisEntry& entry = *best.entry;
    const EdgeCite& cite = entry.support.front();
    std::string dim = to_string(entry.dimension);
    p.strategy = best.strategy;
    switch (best.strategy) {
      case Strategy::bottleneck_resolution:
        p.title = "Resolving the " + dim + " bottleneck";
        p.body = quote_sentence(cite) + " No method in the surveyed pool improves " +
                 dim + "; propose a successor that directly targets it.";
        break;
      case Strategy::paradigm_challenge:
        p.title = "Rethinking the " + dim + " tradeoff";
        p.body = quote_sentence(cite) + " " +
                 std::to_string(entry.support.size()) +
                 " surveyed advances sacrifice " + dim +
                 "; propose a design that refuses that tradeoff.";
        break;
      default:
        p.title = "Extending recent gains in " + dim;
        p.body = quote_sentence(cite) + " Recent work improves " + dim +
                 "; propose the next step along the same axis.";
        break;
    }
    p.certificate = Certificate{cite.source, cite.target, cite.type,
                                cite.bottleneck_quote,
                                "stored bottleneck evidence on " + cite.source +
                                    " -> " + cite.target};
  } else if (!summary.disconnected_pairs.empty()) {
    const DisconnectedPair& pair = summary.disconnected_pairs.front();
    p.strategy = Strategy::cross_pollination;
    p.degenerate = true;  // structural signal only, no quotable evidence
    p.title = "Bridging " + pair.first_name + " and " + pair.second_name;
    p.body = pair.first_name + " and " + pair.second_name +
             " are never combined and share no nearby lineage; propose a "
             "method that composes them.";
  } else {
    p.strategy = Strategy::trend_extrapolation;
    p.degenerate = true;
    p.title = "Insufficient context";
    p.body = "The retrieval context exposed no structural gaps, so no "
             "evidence-backed proposal can be made.";
  }
  return p;
}

Proposal generate_proposal(const GapSummary& summary, const StrategyChoice& strategy,
                           ProposerPort* proposer, const Graph& g) {
  if (!proposer || strategy.degenerate) return fallback_proposal(summary);

  nlohmann::json focus;
  switch (strategy.tag) {
    case Strategy::bottleneck_resolution: focus = axes_to_json(summary.open_axes); break;
    case Strategy::paradigm_challenge: focus = axes_to_json(summary.sacrifice_axes); break;
    case Strategy::trend_extrapolation:
      focus = axes_to_json(summary.recent_directions);
      break;
    case Strategy::cross_pollination:
      focus = summary.to_json()["disconnected_pairs"];
      break;
  }
  std::string payload = nlohmann::json{{"strategy", to_string(strategy.tag)},
                                       {"focus", focus},
                                       {"summary", summary.to_json()}}
                            .dump();

  // One retry on malformed output, none on a failed certificate: a parse slip
  // may be transient, a wrong quote means the content itself is ungrounded.
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string response;
    try {
      response = proposer->propose(payload);
    } catch (const std::exception&) {
      return fallback_proposal(summary);
    }
    nlohmann::json j = nlohmann::json::parse(response, nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;
    if (!j.contains("title") || !j["title"].is_string() || !j.contains("body") ||
        !j["body"].is_string() || !j.contains("certificate") ||
        !j["certificate"].is_object())
      continue;
    const auto& c = j["certificate"];
    if (!c.contains("edge_source") || !c["edge_source"].is_string() ||
        !c.contains("edge_target") || !c["edge_target"].is_string() ||
        !c.contains("edge_type") || !c["edge_type"].is_string() ||
        !c.contains("bottleneck_quote") || !c["bottleneck_quote"].is_string())
      continue;
    Certificate cert;
    cert.edge_source = c["edge_source"].get<std::string>();
    cert.edge_target = c["edge_target"].get<std::string>();
    auto type = edge_type_from_string(c["edge_type"].get<std::string>());
    if (!type) continue;
    cert.edge_type = *type;
    cert.bottleneck_quote = c["bottleneck_quote"].get<std::string>();
    if (c.contains("justification") && c["justification"].is_string())
      cert.justification = c["justification"].get<std::string>();

    if (!verify_certificate(cert, g)) return fallback_proposal(summary);

    Proposal p;
    p.title = j["title"].get<std::string>();
    p.body = j["body"].get<std::string>();
    p.strategy = strategy.tag;
    p.certificate = cert;
    return p;
  }
  return fallback_proposal(summary);
}

}  // namespace evograph
