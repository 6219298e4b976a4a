#include "evograph/retrieval.hpp"

#include <algorithm>
#include <cmath>

#include "evograph/text.hpp"

namespace evograph {

namespace {

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string candidate_doc_text(const PaperNode& p) {
  return p.abstract_text.empty() ? p.title : p.abstract_text;
}

}  // namespace

bool CorpusIndex::co_utilized(const NodeId& a, const NodeId& b) const {
  auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  return co_counts.count(key) > 0;
}

CorpusIndex CorpusIndex::build(const Graph& g, const AliasRegistry& registry) {
  CorpusIndex idx;
  for (const auto& p : g.papers()) {
    size_t pos = idx.paper_ids.size();
    idx.paper_ids.push_back(p.id);
    idx.paper_pos[p.id] = pos;
    std::string text = p.full_text();
    idx.doc_tokens.push_back(content_tokens(text));
    std::map<NodeId, int> counts;
    for (const auto& m : resolve_mentions(text, registry))
      if (g.method(m.method)) ++counts[m.method];
    for (const auto& [method, n] : counts) {
      (void)n;
      ++idx.paper_count[method];
    }
    for (auto a = counts.begin(); a != counts.end(); ++a)
      for (auto b = std::next(a); b != counts.end(); ++b)
        ++idx.co_counts[{a->first, b->first}];
    idx.mention_counts.push_back(std::move(counts));
  }
  return idx;
}

HashEmbedder::HashEmbedder(int dim, uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim <= 0) throw ParamError("embedder dimension must be positive");
}

std::vector<double> HashEmbedder::embed(const std::string& text) const {
  std::vector<double> v(static_cast<size_t>(dim_), 0.0);
  for (const auto& tok : tokenize(text)) {
    uint64_t h = splitmix64(seed_ ^ fnv1a(tok));
    size_t bucket = static_cast<size_t>(h % static_cast<uint64_t>(dim_));
    v[bucket] += (h >> 32) & 1 ? 1.0 : -1.0;
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
  }
  return v;
}

LexicalOverlapReranker::LexicalOverlapReranker(double logit_scale)
    : scale_(logit_scale) {}

double LexicalOverlapReranker::score(const std::string& query,
                                     const std::string& candidate) const {
  double j = jaccard(token_set(query), token_set(candidate));
  return scale_ * (2.0 * j - 1.0);
}

std::unique_ptr<EmbeddingProvider> make_embedder(const EmbedderConfig& cfg) {
  if (cfg.kind == "test-hash")
    return std::make_unique<HashEmbedder>(cfg.dim, cfg.seed);
  throw ParamError("unknown embedder kind '" + cfg.kind +
                   "' (external providers are adapter-defined)");
}

std::unique_ptr<RerankProvider> make_reranker(const RerankerConfig& cfg) {
  if (cfg.kind == "lexical-overlap")
    return std::make_unique<LexicalOverlapReranker>(cfg.logit_scale);
  throw ParamError("unknown reranker kind '" + cfg.kind + "'");
}

std::vector<ScoredDoc> bm25_rank(const std::vector<std::string>& query_terms,
                                 const std::vector<std::vector<std::string>>& corpus,
                                 double k1, double b) {
  const size_t n = corpus.size();
  if (n == 0) return {};

  double total_len = 0.0;
  std::vector<std::map<std::string, int>> tf(n);
  std::map<std::string, int> df;
  for (size_t d = 0; d < n; ++d) {
    total_len += static_cast<double>(corpus[d].size());
    for (const auto& t : corpus[d]) ++tf[d][t];
    for (const auto& [t, cnt] : tf[d]) {
      (void)cnt;
      ++df[t];
    }
  }
  double avgdl = total_len / static_cast<double>(n);

  std::vector<ScoredDoc> out(n);
  for (size_t d = 0; d < n; ++d) {
    out[d].doc = d;
    double dl = static_cast<double>(corpus[d].size());
    double score = 0.0;
    for (const auto& term : query_terms) {
      auto dfi = df.find(term);
      if (dfi == df.end()) continue;
      auto tfi = tf[d].find(term);
      if (tfi == tf[d].end()) continue;
      double idf = std::log(1.0 + (static_cast<double>(n) - dfi->second + 0.5) /
                                      (dfi->second + 0.5));
      double f = tfi->second;
      double denom = f + k1 * (1.0 - b + b * (avgdl > 0.0 ? dl / avgdl : 0.0));
      score += idf * f * (k1 + 1.0) / denom;
    }
    out[d].score = score;
  }
  std::sort(out.begin(), out.end(), [](const ScoredDoc& a, const ScoredDoc& b2) {
    if (a.score != b2.score) return a.score > b2.score;
    return a.doc < b2.doc;
  });
  return out;
}

std::vector<std::pair<std::string, double>> rrf_fuse(
    const std::vector<std::vector<std::string>>& rankings, int k_rrf) {
  if (k_rrf <= 0) throw ParamError("k_rrf must be positive");
  std::map<std::string, double> scores;
  for (const auto& ranking : rankings) {
    std::set<std::string> seen;
    for (size_t i = 0; i < ranking.size(); ++i) {
      if (!seen.insert(ranking[i]).second)
        throw ContractError("rrf_fuse ranking contains duplicate id '" + ranking[i] + "'");
      scores[ranking[i]] += 1.0 / (k_rrf + static_cast<double>(i + 1));
    }
  }
  std::vector<std::pair<std::string, double>> out(scores.begin(), scores.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

double step_penalty(double similarity) {
  if (similarity < 0.0 || similarity > 1.0)
    throw DomainError("step_penalty requires similarity in [0, 1]");
  if (similarity >= 0.85) return -4.0;
  if (similarity >= 0.75) return -2.5;
  if (similarity >= 0.65) return -1.5;
  if (similarity >= 0.55) return -0.5;
  return 0.0;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw ContractError("cosine requires equal-dimension vectors");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Context retrieve_context(const std::string& x, const Graph& g,
                         const AliasRegistry& registry,
                         const RetrievalConfig& cfg) {
  return retrieve_context(x, g, registry, CorpusIndex::build(g, registry), cfg);
}

Context retrieve_context(const std::string& x, const Graph& g,
                         const AliasRegistry& registry, const CorpusIndex& index,
                         const RetrievalConfig& cfg) {
  Context ctx;
  if (cfg.k <= 0) throw ParamError("retrieval k must be positive");

  auto mentions = resolve_mentions(x, registry);
  std::set<NodeId> seen_methods;
  for (const auto& m : mentions) {
    if (!g.method(m.method)) continue;
    if (seen_methods.insert(m.method).second) ctx.methods.push_back(m.method);
  }

  if (g.papers().empty()) return ctx;

  // Query terms: content words of x outside the resolved mention spans.
  std::string masked(x);
  for (const auto& m : mentions)
    for (size_t i = m.begin; i < m.end && i < masked.size(); ++i) masked[i] = ' ';
  auto query_terms = content_tokens(masked);

  auto bm25 = bm25_rank(query_terms, index.doc_tokens, cfg.bm25_k1, cfg.bm25_b);
  std::vector<double> bm25_by_doc(index.paper_ids.size(), 0.0);
  for (const auto& sd : bm25) bm25_by_doc[sd.doc] = sd.score;

  struct Ranked {
    NodeId id;
    int alias_count;
    double bm25;
  };
  std::vector<Ranked> ranked;
  for (size_t d = 0; d < index.paper_ids.size(); ++d) {
    int count = 0;
    for (const auto& m : ctx.methods) {
      auto it = index.mention_counts[d].find(m);
      if (it != index.mention_counts[d].end()) count += it->second;
    }
    if (count == 0 && bm25_by_doc[d] <= 0.0) continue;
    ranked.push_back({index.paper_ids[d], count, bm25_by_doc[d]});
  }
  if (cfg.hybrid_mode == "additive") {
    double wa = cfg.additive_alias_weight, wb = cfg.additive_bm25_weight;
    std::sort(ranked.begin(), ranked.end(), [wa, wb](const Ranked& a, const Ranked& b) {
      double sa = wa * a.alias_count + wb * a.bm25;
      double sb = wa * b.alias_count + wb * b.bm25;
      if (sa != sb) return sa > sb;
      return a.id < b.id;
    });
  } else {
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
      if (a.alias_count != b.alias_count) return a.alias_count > b.alias_count;
      if (a.bm25 != b.bm25) return a.bm25 > b.bm25;
      return a.id < b.id;
    });
  }
  std::set<NodeId> in_pool;
  for (const auto& r : ranked) {
    if (ctx.papers.size() >= static_cast<size_t>(cfg.k)) break;
    ctx.papers.push_back(r.id);
    in_pool.insert(r.id);
  }

  for (size_t i = 0; i < g.edges().size(); ++i) {
    const Edge& e = g.edges()[i];
    if (!is_causal(e.type)) continue;
    if (!in_pool.count(e.source) && !in_pool.count(e.target)) continue;
    ctx.edge_indices.push_back(i);
    ctx.bottlenecks.push_back({i, e.evidence->bottleneck_dimension,
                               e.evidence->bottleneck_quote,
                               e.evidence->bottleneck_description});
  }
  return ctx;
}

DuplicateVerdict duplicate_risk(const std::string& idea, const Graph& g,
                                const EmbeddingProvider& embedder,
                                const RerankProvider& reranker,
                                const RetrievalConfig& cfg) {
  DuplicateVerdict verdict;
  if (g.papers().empty()) return verdict;

  std::vector<NodeId> ids;
  std::vector<std::string> texts;
  for (const auto& p : g.papers()) {
    ids.push_back(p.id);
    texts.push_back(candidate_doc_text(p));
  }

  auto idea_vec = embedder.embed(idea);
  std::vector<double> dense(ids.size(), 0.0);
  for (size_t i = 0; i < ids.size(); ++i)
    dense[i] = cosine(idea_vec, embedder.embed(texts[i]));

  std::vector<size_t> order(ids.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (dense[a] != dense[b]) return dense[a] > dense[b];
    return ids[a] < ids[b];
  });
  std::vector<std::string> dense_ranking;
  for (size_t i : order) dense_ranking.push_back(ids[i]);

  std::vector<std::vector<std::string>> doc_tokens;
  doc_tokens.reserve(texts.size());
  for (const auto& t : texts) doc_tokens.push_back(content_tokens(t));
  std::vector<std::string> sparse_ranking;
  for (const auto& sd : bm25_rank(content_tokens(idea), doc_tokens, cfg.bm25_k1, cfg.bm25_b))
    sparse_ranking.push_back(ids[sd.doc]);

  auto fused_pool = rrf_fuse({dense_ranking, sparse_ranking}, cfg.rrf_k);
  size_t pool_size = std::min<size_t>(fused_pool.size(),
                                      static_cast<size_t>(std::max(cfg.stage1_pool, 0)));

  std::map<NodeId, size_t> pos;
  for (size_t i = 0; i < ids.size(); ++i) pos[ids[i]] = i;

  for (size_t i = 0; i < pool_size; ++i) {
    const NodeId& id = fused_pool[i].first;
    size_t at = pos.at(id);
    double dense01 = (dense[at] + 1.0) / 2.0;
    double logit = reranker.score(idea, texts[at]);
    double fused = 0.5 * dense01 + 0.5 * sigmoid(logit);
    verdict.top_candidates.emplace_back(id, fused);
  }
  std::sort(verdict.top_candidates.begin(), verdict.top_candidates.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return a.first < b.first;
            });
  if (!verdict.top_candidates.empty())
    verdict.best_score = verdict.top_candidates.front().second;
  verdict.penalty = step_penalty(std::clamp(verdict.best_score, 0.0, 1.0));
  return verdict;
}

}  // namespace evograph
