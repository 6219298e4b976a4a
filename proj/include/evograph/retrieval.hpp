#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "evograph/alias.hpp"
#include "evograph/config.hpp"
#include "evograph/graph.hpp"

namespace evograph {

// Bottleneck view of one context edge's evidence.
struct BottleneckView {
  size_t edge_index = 0;  // into Graph::edges()
  BottleneckDimension dimension = BottleneckDimension::accuracy;
  std::string quote;
  std::string description;
};

// Localized context around a query text: resolved methods (first-mention
// order), ranked papers, incident non-background edges (store order) and
// their bottleneck records.
struct Context {
  std::vector<NodeId> methods;
  std::vector<NodeId> papers;
  std::vector<size_t> edge_indices;
  std::vector<BottleneckView> bottlenecks;
};

// Precomputed per-paper mention statistics: tokenized texts for BM25,
// method-mention counts, per-method paper counts (popularity), and the
// co-utilization relation (methods resolving in the same paper's text).
struct CorpusIndex {
  std::vector<NodeId> paper_ids;
  std::map<NodeId, size_t> paper_pos;
  std::vector<std::vector<std::string>> doc_tokens;
  std::vector<std::map<NodeId, int>> mention_counts;
  std::map<NodeId, int> paper_count;
  std::map<std::pair<NodeId, NodeId>, int> co_counts;  // key ordered a < b

  bool co_utilized(const NodeId& a, const NodeId& b) const;

  static CorpusIndex build(const Graph& g, const AliasRegistry& registry);
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::vector<double> embed(const std::string& text) const = 0;
  virtual int dim() const = 0;
};

class RerankProvider {
 public:
  virtual ~RerankProvider() = default;
  virtual double score(const std::string& query, const std::string& candidate) const = 0;
};

// Deterministic hashing pseudo-embedder: tokens hash into +/-1 buckets of a
// fixed-dimension vector, L2-normalized. Stable across platforms (FNV-1a +
// splitmix64, no std::hash).
class HashEmbedder : public EmbeddingProvider {
 public:
  explicit HashEmbedder(int dim = 384, uint64_t seed = 0x9e3779b97f4a7c15ull);
  std::vector<double> embed(const std::string& text) const override;
  int dim() const override { return dim_; }

 private:
  int dim_;
  uint64_t seed_;
};

// Token-overlap rerank double: logit = scale * (2*jaccard - 1).
class LexicalOverlapReranker : public RerankProvider {
 public:
  explicit LexicalOverlapReranker(double logit_scale = 8.0);
  double score(const std::string& query, const std::string& candidate) const override;

 private:
  double scale_;
};

std::unique_ptr<EmbeddingProvider> make_embedder(const EmbedderConfig& cfg);
std::unique_ptr<RerankProvider> make_reranker(const RerankerConfig& cfg);

struct ScoredDoc {
  size_t doc = 0;
  double score = 0.0;

  bool operator==(const ScoredDoc&) const = default;
};

// Okapi BM25 with idf = ln(1 + (N - df + 0.5)/(df + 0.5)), which keeps
// single-document scores positive. Descending score, ties by doc index.
// Query terms are consumed as given (duplicates contribute twice).
std::vector<ScoredDoc> bm25_rank(const std::vector<std::string>& query_terms,
                                 const std::vector<std::vector<std::string>>& corpus,
                                 double k1 = 1.5, double b = 0.75);

// Reciprocal rank fusion: id score = sum over rankings of 1/(k_rrf + rank),
// ranks 1-based. Descending score, ties by id.
std::vector<std::pair<std::string, double>> rrf_fuse(
    const std::vector<std::vector<std::string>>& rankings, int k_rrf = 60);

// Duplicate-risk step penalty; thresholds applied highest-first.
double step_penalty(double similarity);

struct DuplicateVerdict {
  double best_score = 0.0;
  std::vector<std::pair<NodeId, double>> top_candidates;
  double penalty = 0.0;
};

Context retrieve_context(const std::string& x, const Graph& g,
                         const AliasRegistry& registry,
                         const RetrievalConfig& cfg = {});
Context retrieve_context(const std::string& x, const Graph& g,
                         const AliasRegistry& registry, const CorpusIndex& index,
                         const RetrievalConfig& cfg = {});

// Three-stage duplicate detector. Stage 1 pools stage1_pool candidates by
// fusing the dense-cosine and BM25 rankings with RRF; Stage 2 reranks the
// pool; Stage 3 fuses 0.5*dense01 + 0.5*sigmoid(logit). The sparse score
// never enters the fused value. Candidate document text is the paper
// abstract, falling back to the title.
DuplicateVerdict duplicate_risk(const std::string& idea, const Graph& g,
                                const EmbeddingProvider& embedder,
                                const RerankProvider& reranker,
                                const RetrievalConfig& cfg = {});

double cosine(const std::vector<double>& a, const std::vector<double>& b);
double sigmoid(double x);

}  // namespace evograph
