#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sceptre/corpus.hpp"
#include "sceptre/dataset.hpp"
#include "sceptre/evaluate.hpp"
#include "sceptre/hierarchy.hpp"
#include "sceptre/model.hpp"

namespace sceptre {

struct CullingOptions {
  bool enabled = true;
  std::size_t popularity = 1000;  // top-P products by review count per deepest category
};

// Products that pass the popularity threshold in at least one of their deepest
// categories; ties in review count go to the smaller product index.
std::vector<bool> popular_products(const Corpus& corpus, std::size_t top_per_category);

// Destinations of i's positive training edges in `graph`, sorted.
std::vector<ProductIndex> training_neighbors(const PairDataset& dataset, std::uint32_t graph, ProductIndex i);

// Admissible candidates for query i, ascending: not i, not excluded and, when
// culling, popular and with a deepest category in the immediate family of one
// of i's deepest categories.
std::vector<ProductIndex> candidate_set(const Corpus& corpus, ProductIndex i,
                                        std::span<const ProductIndex> excluded, const CullingOptions& culling,
                                        const std::vector<bool>* popular = nullptr);

struct Recommendations {
  std::vector<Scored> items;
  bool no_candidates = false;
};

// Top R candidates by F<->(psi) * F->(varphi), ties by ascending product index.
Recommendations recommend(const ModelParams& params, const TopicDistributions& dist,
                          const ManifestTable& manifests, ProductIndex i, std::uint32_t graph, std::size_t top,
                          std::span<const ProductIndex> candidates, std::size_t workers = 1);

struct FoldInOptions {
  std::size_t iterations = 50;
  double alpha = 0.01;  // added to every topic count when re-estimating theta
  std::uint64_t seed = 1;
};

struct FoldIn {
  std::vector<TopicIndex> topics;  // the active set
  std::vector<double> theta;       // aligned with topics
  bool empty_document = false;
};

// theta for a document under frozen phi: alternates sampling z proportional to
// theta_k phi_{k,w} over the active set with theta = (n_k + alpha) / (N + |A| alpha).
// An empty document yields the uniform distribution.
FoldIn fold_in(const TopicDistributions& dist, std::span<const TopicIndex> active,
               std::span<const TokenId> tokens, const FoldInOptions& options);

// Active set for a product that is not in the trained corpus.
std::vector<TopicIndex> active_set_for(const Product& product, const CategoryTree& tree,
                                       const TopicAllocation& allocation);

// Splits on '.', '!' and '?', trims whitespace and drops empty pieces.
std::vector<std::string> split_sentences(std::string_view text);

inline constexpr double kEmptySentenceScore = std::numeric_limits<double>::lowest();

struct SentenceScore {
  std::string sentence;
  double score = kEmptySentenceScore;
  std::size_t index = 0;  // position in the product's text
  bool in_vocabulary = false;
};

struct Explanation {
  std::vector<SentenceScore> sentences;  // descending score, ties by position
  bool no_vocabulary = false;            // no sentence had an in-vocabulary token
};

struct ExplainOptions {
  TextSources sources;
  TokenizerOptions tokenizer;
  FoldInOptions fold_in;
};

// Scores each sentence of j's text by the direction logit of (i, sentence),
// the sentence standing in for j through its own fold-in theta over A_j.
Explanation explain(const ModelParams& params, const TopicDistributions& dist, const ManifestTable& manifests,
                    const Corpus& corpus, const Vocabulary& vocabulary, ProductIndex i, ProductIndex j,
                    std::uint32_t graph, const ExplainOptions& options);

}  // namespace sceptre
