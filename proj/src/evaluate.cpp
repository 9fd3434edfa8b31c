#include "sceptre/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <unordered_map>

#include "sceptre/errors.hpp"
#include "sceptre/parallel.hpp"
#include "sceptre/random.hpp"

namespace sceptre {

bool predict_from_logits(double relatedness, double direction) { return relatedness > 0.0 && direction > 0.0; }

bool predict(const ModelParams& params, const TopicDistributions& dist, const ManifestTable& manifests,
             ProductIndex i, ProductIndex j, std::uint32_t graph) {
  return predict_from_logits(relatedness_logit(dist, params.beta(graph), i, j),
                             direction_logit(dist, params.eta(graph), i, j, manifests(i, j)));
}

std::vector<std::uint8_t> predict_pairs(const ModelParams& params, const TopicDistributions& dist,
                                        const ManifestTable& manifests, std::span<const TrainingPair> pairs,
                                        std::size_t workers) {
  std::vector<std::uint8_t> out(pairs.size());
  parallel_chunks(pairs.size(), workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t n = begin; n < end; ++n)
      out[n] = predict(params, dist, manifests, pairs[n].i, pairs[n].j, pairs[n].graph);
  });
  return out;
}

std::vector<std::uint8_t> labels_of(std::span<const TrainingPair> pairs) {
  std::vector<std::uint8_t> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.label);
  return out;
}

double error_reduction(double accuracy, double random_accuracy) {
  if (!(random_accuracy < 1.0)) throw Error("error reduction is undefined when random accuracy is 1");
  return (accuracy - random_accuracy) / (1.0 - random_accuracy);
}

double accuracy(std::span<const std::uint8_t> predictions, std::span<const std::uint8_t> labels) {
  if (predictions.empty() || predictions.size() != labels.size())
    throw Error("accuracy needs equally many predictions and labels, at least one");
  std::size_t correct = 0;
  for (std::size_t n = 0; n < labels.size(); ++n) correct += (predictions[n] != 0) == (labels[n] != 0);
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

Accuracy accuracy_and_error_reduction(std::span<const std::uint8_t> predictions,
                                      std::span<const std::uint8_t> labels, double random_accuracy) {
  Accuracy out;
  out.accuracy = accuracy(predictions, labels);
  out.error_reduction = error_reduction(out.accuracy, random_accuracy);
  return out;
}

Precision precision_at_k(std::span<const ProductIndex> ranked, std::span<const ProductIndex> relevant,
                         std::size_t k) {
  if (k == 0) throw Error("precision@k needs k >= 1");
  Precision out;
  const std::size_t n = std::min(k, ranked.size());
  out.truncated = n < k;
  if (n == 0) return out;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < n; ++r) hits += std::binary_search(relevant.begin(), relevant.end(), ranked[r]);
  out.precision = static_cast<double>(hits) / static_cast<double>(n);
  return out;
}

std::vector<std::uint8_t> baseline_random(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint8_t> out(count);
  for (auto& p : out) {
    const bool related = uniform01(rng) > 0.5;
    const bool direction = uniform01(rng) > 0.5;
    p = related && direction;
  }
  return out;
}

TrainResult baseline_lda_logistic(const Corpus& corpus, const DocumentSet& documents, std::size_t vocab_size,
                                  const PairDataset& dataset, const TrainConfig& config,
                                  const LdaBaselineOptions& options) {
  if (options.num_topics == 0) throw Error("LDA baseline needs at least one topic");
  std::vector<std::vector<TopicIndex>> sets(corpus.size());
  std::vector<TopicIndex> all(options.num_topics);
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = static_cast<TopicIndex>(k);
  for (std::size_t i = 0; i < corpus.size(); ++i)
    if (!corpus.product_nodes[i].empty()) sets[i] = all;
  ModelParams params(std::move(sets), options.num_topics, vocab_size, dataset.graphs);
  initialize_uniform(params, derive_seed(config.seed, 1));

  const ManifestTable manifests(corpus);
  auto result = train_from(std::move(params), manifests, documents, dataset, config, false);
  auto values = result.params.values();
  std::fill(values.begin() + static_cast<std::ptrdiff_t>(result.params.beta_begin()), values.end(), 0.0);
  if (options.logistic_iterations > 0) {
    auto logistic = config;
    logistic.inner.max_iterations = options.logistic_iterations;
    fit_logistic(result.params, documents, manifests, dataset.split(Split::train), logistic);
  }
  return result;
}

std::size_t nearest_rank_percentile(std::vector<std::size_t> values, double p) {
  if (values.empty()) throw Error("percentile of an empty list");
  if (p < 0.0 || p > 100.0) throw Error("percentile must lie in [0, 100]");
  std::sort(values.begin(), values.end());
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(values.size())));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

CategoryTreeBaseline::CategoryTreeBaseline(const Corpus& corpus, std::span<const TrainingPair> training,
                                           std::uint32_t graph, double percentile)
    : corpus_(&corpus) {
  for (const auto& p : training) {
    if (p.label != 1 || p.graph != graph) continue;
    for (auto a : corpus.product_deepest[p.i])
      for (auto b : corpus.product_deepest[p.j]) ++counts_[{a, b}];
  }
  std::vector<std::size_t> nonzero;
  for (const auto& [key, c] : counts_) nonzero.push_back(c);
  threshold_ = nonzero.empty() ? 0 : nearest_rank_percentile(std::move(nonzero), percentile);
}

std::size_t CategoryTreeBaseline::count(NodeIndex a, NodeIndex b) const {
  const auto it = counts_.find({a, b});
  return it == counts_.end() ? 0 : it->second;
}

std::size_t CategoryTreeBaseline::pair_count(ProductIndex i, ProductIndex j) const {
  std::size_t best = 0;
  for (auto a : corpus_->product_deepest[i])
    for (auto b : corpus_->product_deepest[j]) best = std::max(best, count(a, b));
  return best;
}

bool CategoryTreeBaseline::predict(ProductIndex i, ProductIndex j) const {
  const auto c = pair_count(i, j);
  return c > 0 && c >= threshold_;
}

std::vector<std::uint8_t> baseline_category_tree(const Corpus& corpus, const PairDataset& dataset,
                                                 std::span<const TrainingPair> pairs, double percentile) {
  std::vector<CategoryTreeBaseline> models;
  for (std::size_t g = 0; g < dataset.graphs.size(); ++g)
    models.emplace_back(corpus, dataset.split(Split::train), static_cast<std::uint32_t>(g), percentile);
  std::vector<std::uint8_t> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(models.at(p.graph).predict(p.i, p.j));
  return out;
}

ReviewerIndex::ReviewerIndex(const Corpus& corpus) : sets_(corpus.size()) {
  std::unordered_map<std::string, std::uint32_t> ids;
  for (std::size_t p = 0; p < corpus.size(); ++p) {
    for (const auto& user : corpus.products[p].reviewers) {
      const auto [it, inserted] = ids.try_emplace(user, static_cast<std::uint32_t>(ids.size()));
      sets_[p].push_back(it->second);
    }
    std::sort(sets_[p].begin(), sets_[p].end());
    sets_[p].erase(std::unique(sets_[p].begin(), sets_[p].end()), sets_[p].end());
  }
}

double ReviewerIndex::cosine(ProductIndex a, ProductIndex b) const {
  const auto& ua = sets_.at(a);
  const auto& ub = sets_.at(b);
  if (ua.empty() || ub.empty()) return 0.0;
  std::size_t common = 0;
  for (auto x = ua.begin(), y = ub.begin(); x != ua.end() && y != ub.end();) {
    if (*x < *y) {
      ++x;
    } else if (*y < *x) {
      ++y;
    } else {
      ++common;
      ++x;
      ++y;
    }
  }
  return static_cast<double>(common) / std::sqrt(static_cast<double>(ua.size()) * static_cast<double>(ub.size()));
}

void sort_ranking(std::vector<Scored>& ranking) {
  std::sort(ranking.begin(), ranking.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.product < b.product;
  });
}

std::vector<Scored> baseline_cf_cosine(const ReviewerIndex& index, ProductIndex query,
                                       std::span<const ProductIndex> candidates) {
  std::vector<Scored> out;
  out.reserve(candidates.size());
  for (auto c : candidates)
    if (c != query) out.push_back({c, index.cosine(query, c)});
  sort_ranking(out);
  return out;
}

std::vector<std::pair<std::string, double>> top_words(const TopicDistributions& dist,
                                                      const Vocabulary& vocabulary, TopicIndex k,
                                                      std::size_t n) {
  const auto& layout = dist.layout();
  const std::size_t K = layout.num_topics();
  const std::size_t V = layout.vocab_size();
  if (k >= K) throw Error("topic index out of range");
  if (vocabulary.size() != V) throw Error("vocabulary does not match the model");
  std::vector<double> background(V, 0.0);
  for (std::size_t t = 0; t < K; ++t) {
    const auto phi = dist.phi(static_cast<TopicIndex>(t));
    for (std::size_t w = 0; w < V; ++w) background[w] += phi[w];
  }
  const auto phi = dist.phi(k);
  std::vector<std::pair<std::string, double>> scored(V);
  for (std::size_t w = 0; w < V; ++w)
    scored[w] = {vocabulary.token(static_cast<TokenId>(w)), phi[w] - background[w] / static_cast<double>(K)};
  n = std::min(n, V);
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                    [](const auto& a, const auto& b) {
                      if (a.second != b.second) return a.second > b.second;
                      return a.first < b.first;
                    });
  scored.resize(n);
  return scored;
}

const EvalRow* EvalReport::find(std::string_view method, GraphType graph) const {
  for (const auto& r : rows)
    if (r.method == method && r.graph == graph) return &r;
  return nullptr;
}

void EvalReport::write_table(std::ostream& out) const {
  out << "method\tgraph\taccuracy\terror_reduction\tpairs\n";
  const auto cell = [&](const std::optional<double>& v) {
    if (v) {
      out << std::fixed << std::setprecision(6) << *v;
    } else {
      out << "NA";
    }
  };
  for (const auto& r : rows) {
    out << r.method << '\t' << graph_name(r.graph) << '\t';
    cell(r.accuracy);
    out << '\t';
    cell(r.error_reduction);
    out << '\t' << r.pairs << '\n';
  }
}

void EvalReport::write_precision(std::ostream& out) const {
  out << "method\tgraph\tk\tprecision\tqueries\ttruncated\n";
  for (const auto& r : precision)
    out << r.method << '\t' << graph_name(r.graph) << '\t' << r.k << '\t' << std::fixed << std::setprecision(6)
        << r.precision << '\t' << r.queries << '\t' << r.truncated << '\n';
}

namespace {

struct Query {
  ProductIndex product;
  std::vector<ProductIndex> relevant;  // sorted
  std::vector<ProductIndex> excluded;  // sorted
};

std::vector<Query> precision_queries(const PairDataset& dataset, std::uint32_t graph, std::size_t max_queries,
                                     std::uint64_t seed) {
  std::map<ProductIndex, Query> by_product;
  for (const auto& p : dataset.split(Split::test))
    if (p.graph == graph && p.label == 1) {
      auto& q = by_product[p.i];
      q.product = p.i;
      q.relevant.push_back(p.j);
    }
  for (const auto& p : dataset.split(Split::train))
    if (p.graph == graph && p.label == 1)
      if (auto it = by_product.find(p.i); it != by_product.end()) it->second.excluded.push_back(p.j);
  std::vector<Query> out;
  for (auto& [product, q] : by_product) {
    std::sort(q.relevant.begin(), q.relevant.end());
    std::sort(q.excluded.begin(), q.excluded.end());
    out.push_back(std::move(q));
  }
  if (out.size() > max_queries) {
    Rng rng(seed);
    shuffle(std::span<Query>(out), rng);
    out.resize(max_queries);
    std::sort(out.begin(), out.end(), [](const Query& a, const Query& b) { return a.product < b.product; });
  }
  return out;
}

}  // namespace

EvalReport evaluate(const EvalInputs& inputs, const EvalOptions& options) {
  if (!inputs.corpus || !inputs.documents || !inputs.dataset) throw Error("evaluation inputs incomplete");
  const auto& corpus = *inputs.corpus;
  const auto& dataset = *inputs.dataset;
  const auto& cfg = options.train;
  const auto wants = [&](std::string_view m) {
    return std::find(options.methods.begin(), options.methods.end(), m) != options.methods.end();
  };
  for (const auto& m : options.methods)
    if (std::find(kAllMethods.begin(), kAllMethods.end(), m) == kAllMethods.end())
      throw Error("unknown evaluation method: " + m);
  if (wants("sceptre") && !inputs.params) throw Error("the sceptre method needs a trained model");

  const ManifestTable manifests(corpus);
  std::optional<TopicDistributions> sceptre_dist;
  if (wants("sceptre")) sceptre_dist.emplace(*inputs.params, cfg.smoothing);

  std::optional<TrainResult> lda;
  std::optional<TopicDistributions> lda_dist;
  if (wants("lda")) {
    auto lda_options = options.lda;
    if (lda_options.num_topics == 0) lda_options.num_topics = inputs.num_topics;
    lda = baseline_lda_logistic(corpus, *inputs.documents, inputs.vocab_size, dataset, cfg, lda_options);
    lda_dist.emplace(lda->params, cfg.smoothing);
  }
  std::optional<ReviewerIndex> reviewers;
  if (wants("cf")) reviewers.emplace(corpus);

  const auto usable = usable_products(corpus, *inputs.documents);
  EvalReport report;
  const std::size_t max_k = options.k_grid.empty()
                                ? 0
                                : *std::max_element(options.k_grid.begin(), options.k_grid.end());

  for (std::size_t gi = 0; gi < dataset.graphs.size(); ++gi) {
    const auto g = static_cast<std::uint32_t>(gi);
    const auto graph = dataset.graphs[gi];
    const auto test = dataset.pairs(Split::test, g);
    if (test.empty()) continue;
    const auto labels = labels_of(test);
    const double random_accuracy = accuracy(baseline_random(test.size(), derive_seed(cfg.seed, 100, g)), labels);
    const CategoryTreeBaseline ct(corpus, dataset.split(Split::train), g, options.ct_percentile);

    for (const auto& method : options.methods) {
      EvalRow row{method, graph, std::nullopt, std::nullopt, test.size()};
      std::vector<std::uint8_t> preds;
      if (method == "sceptre") {
        preds = predict_pairs(*inputs.params, *sceptre_dist, manifests, test, cfg.workers);
      } else if (method == "lda") {
        preds = predict_pairs(lda->params, *lda_dist, manifests, test, cfg.workers);
      } else if (method == "random") {
        preds = baseline_random(test.size(), derive_seed(cfg.seed, 100, g));
      } else if (method == "ct") {
        for (const auto& p : test) preds.push_back(ct.predict(p.i, p.j));
      }
      if (!preds.empty()) {
        row.accuracy = accuracy(preds, labels);
        if (random_accuracy < 1.0) row.error_reduction = error_reduction(*row.accuracy, random_accuracy);
      }
      report.rows.push_back(row);
    }

    if (max_k == 0) continue;
    const auto queries = precision_queries(dataset, g, options.max_queries, derive_seed(cfg.seed, 300, g));
    if (queries.empty()) continue;
    for (const auto& method : options.methods) {
      std::vector<double> sums(options.k_grid.size(), 0.0);
      std::vector<std::size_t> truncated(options.k_grid.size(), 0);
      std::vector<std::vector<ProductIndex>> tops(queries.size());
      parallel_chunks(queries.size(), cfg.workers, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t qi = begin; qi < end; ++qi) {
          const auto& q = queries[qi];
          Rng rng(derive_seed(cfg.seed, 200 + g, q.product));
          std::vector<Scored> ranking;
          for (std::size_t c = 0; c < corpus.size(); ++c) {
            const auto cand = static_cast<ProductIndex>(c);
            if (!usable[c] || cand == q.product ||
                std::binary_search(q.excluded.begin(), q.excluded.end(), cand))
              continue;
            double score = 0.0;
            if (method == "sceptre") {
              score = relation_probability(*inputs.params, *sceptre_dist, manifests, q.product, cand, g).edge;
            } else if (method == "lda") {
              score = relation_probability(lda->params, *lda_dist, manifests, q.product, cand, g).edge;
            } else if (method == "random") {
              score = uniform01(rng);
            } else if (method == "ct") {
              score = static_cast<double>(ct.pair_count(q.product, cand));
            } else {
              score = reviewers->cosine(q.product, cand);
            }
            ranking.push_back({cand, score});
          }
          sort_ranking(ranking);
          ranking.resize(std::min(ranking.size(), max_k));
          for (const auto& s : ranking) tops[qi].push_back(s.product);
        }
      });
      for (std::size_t qi = 0; qi < queries.size(); ++qi)
        for (std::size_t ki = 0; ki < options.k_grid.size(); ++ki) {
          const auto p = precision_at_k(tops[qi], queries[qi].relevant, options.k_grid[ki]);
          sums[ki] += p.precision;
          truncated[ki] += p.truncated;
        }
      for (std::size_t ki = 0; ki < options.k_grid.size(); ++ki)
        report.precision.push_back({method, graph, options.k_grid[ki],
                                    sums[ki] / static_cast<double>(queries.size()), queries.size(),
                                    truncated[ki]});
    }
  }
  return report;
}

}  // namespace sceptre
