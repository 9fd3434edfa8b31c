#include "sceptre/recommend.hpp"

#include <algorithm>
#include <map>

#include "sceptre/errors.hpp"
#include "sceptre/parallel.hpp"
#include "sceptre/random.hpp"

namespace sceptre {

std::vector<bool> popular_products(const Corpus& corpus, std::size_t top_per_category) {
  std::map<NodeIndex, std::vector<ProductIndex>> members;
  for (std::size_t p = 0; p < corpus.size(); ++p)
    for (auto n : corpus.product_deepest[p]) members[n].push_back(static_cast<ProductIndex>(p));
  std::vector<bool> out(corpus.size(), false);
  for (auto& [node, list] : members) {
    std::stable_sort(list.begin(), list.end(), [&](ProductIndex a, ProductIndex b) {
      return corpus.products[a].reviews.size() > corpus.products[b].reviews.size();
    });
    for (std::size_t r = 0; r < std::min(top_per_category, list.size()); ++r) out[list[r]] = true;
  }
  return out;
}

std::vector<ProductIndex> training_neighbors(const PairDataset& dataset, std::uint32_t graph, ProductIndex i) {
  std::vector<ProductIndex> out;
  for (const auto& p : dataset.split(Split::train))
    if (p.graph == graph && p.label == 1 && p.i == i) out.push_back(p.j);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<ProductIndex> candidate_set(const Corpus& corpus, ProductIndex i,
                                        std::span<const ProductIndex> excluded, const CullingOptions& culling,
                                        const std::vector<bool>* popular) {
  if (i >= corpus.size()) throw Error("query product out of range");
  std::vector<bool> family(corpus.tree.size(), false);
  std::vector<bool> local_popular;
  if (culling.enabled) {
    for (auto n : corpus.product_deepest[i])
      for (auto f : corpus.tree.immediate_family(n)) family[f] = true;
    if (!popular) {
      local_popular = popular_products(corpus, culling.popularity);
      popular = &local_popular;
    }
  }
  std::vector<ProductIndex> out;
  for (std::size_t c = 0; c < corpus.size(); ++c) {
    const auto cand = static_cast<ProductIndex>(c);
    if (cand == i || std::find(excluded.begin(), excluded.end(), cand) != excluded.end()) continue;
    if (culling.enabled) {
      if (!(*popular)[c]) continue;
      const auto& deepest = corpus.product_deepest[c];
      if (std::none_of(deepest.begin(), deepest.end(), [&](NodeIndex n) { return family[n]; })) continue;
    }
    out.push_back(cand);
  }
  return out;
}

Recommendations recommend(const ModelParams& params, const TopicDistributions& dist,
                          const ManifestTable& manifests, ProductIndex i, std::uint32_t graph, std::size_t top,
                          std::span<const ProductIndex> candidates, std::size_t workers) {
  if (top == 0) throw Error("recommend needs R >= 1");
  if (graph >= params.num_graphs()) throw Error("graph not in model");
  Recommendations out;
  out.no_candidates = candidates.empty();
  std::vector<Scored> scored(candidates.size());
  parallel_chunks(candidates.size(), workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t n = begin; n < end; ++n)
      scored[n] = {candidates[n], relation_probability(params, dist, manifests, i, candidates[n], graph).edge};
  });
  sort_ranking(scored);
  if (scored.size() > top) scored.resize(top);
  out.items = std::move(scored);
  return out;
}

FoldIn fold_in(const TopicDistributions& dist, std::span<const TopicIndex> active,
               std::span<const TokenId> tokens, const FoldInOptions& options) {
  if (active.empty()) throw StructureError("fold-in needs a non-empty active topic set");
  if (options.alpha <= 0.0) throw Error("fold-in smoothing must be positive");
  FoldIn out;
  out.topics.assign(active.begin(), active.end());
  const std::size_t A = active.size();
  out.theta.assign(A, 1.0 / static_cast<double>(A));
  if (tokens.empty()) {
    out.empty_document = true;
    return out;
  }
  Rng rng(options.seed);
  std::vector<double> weights(A);
  std::vector<double> counts(A);
  for (std::size_t it = 0; it < options.iterations; ++it) {
    std::fill(counts.begin(), counts.end(), 0.0);
    for (auto w : tokens) {
      for (std::size_t a = 0; a < A; ++a) weights[a] = out.theta[a] * dist.phi(active[a])[w];
      auto k = sample_discrete(weights, rng);
      if (k >= A) k = uniform_index(rng, A);
      counts[k] += 1.0;
    }
    const double denom = static_cast<double>(tokens.size()) + static_cast<double>(A) * options.alpha;
    for (std::size_t a = 0; a < A; ++a) out.theta[a] = (counts[a] + options.alpha) / denom;
  }
  return out;
}

std::vector<TopicIndex> active_set_for(const Product& product, const CategoryTree& tree,
                                       const TopicAllocation& allocation) {
  std::vector<NodeIndex> nodes;
  for (const auto& path : product.category_paths)
    for (const auto& id : path) {
      const auto n = tree.find(id);
      if (!n) throw StructureError("unknown category node: " + id);
      nodes.push_back(*n);
    }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  if (nodes.empty()) throw StructureError("product " + product.id + " has no category path");
  return allocation.active_set(nodes);
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  const auto flush = [&](std::size_t begin, std::size_t end) {
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    if (end > begin) out.emplace_back(text.substr(begin, end - begin));
  };
  std::size_t start = 0;
  for (std::size_t n = 0; n < text.size(); ++n)
    if (text[n] == '.' || text[n] == '!' || text[n] == '?') {
      flush(start, n + 1);
      start = n + 1;
    }
  flush(start, text.size());
  return out;
}

Explanation explain(const ModelParams& params, const TopicDistributions& dist, const ManifestTable& manifests,
                    const Corpus& corpus, const Vocabulary& vocabulary, ProductIndex i, ProductIndex j,
                    std::uint32_t graph, const ExplainOptions& options) {
  if (i >= corpus.size() || j >= corpus.size()) throw Error("product out of range");
  if (graph >= params.num_graphs()) throw Error("graph not in model");
  Explanation out;
  std::vector<std::string> sentences;
  for (auto text : product_texts(corpus.products[j], options.sources))
    for (auto& s : split_sentences(text)) sentences.push_back(std::move(s));
  const auto active = params.active(j);
  const auto m = manifests(i, j);
  out.no_vocabulary = true;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    SentenceScore score{sentences[s], kEmptySentenceScore, s, false};
    const auto tokens = encode(sentences[s], vocabulary, options.tokenizer);
    if (!tokens.empty() && !active.empty()) {
      auto fold = options.fold_in;
      fold.seed = derive_seed(options.fold_in.seed, s);
      const auto theta = fold_in(dist, active, tokens, fold);
      score.score = direction_logit(dist, params.eta(graph), i, theta.topics, theta.theta, m);
      score.in_vocabulary = true;
      out.no_vocabulary = false;
    }
    out.sentences.push_back(std::move(score));
  }
  std::stable_sort(out.sentences.begin(), out.sentences.end(),
                   [](const SentenceScore& a, const SentenceScore& b) { return a.score > b.score; });
  if (out.no_vocabulary) out.sentences.clear();
  return out;
}

}  // namespace sceptre
