#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sceptre/dataset.hpp"
#include "sceptre/hierarchy.hpp"
#include "sceptre/model.hpp"
#include "sceptre/train.hpp"

namespace sceptre {

// Edge iff both logits are strictly positive.
bool predict_from_logits(double relatedness, double direction);
bool predict(const ModelParams& params, const TopicDistributions& dist, const ManifestTable& manifests,
             ProductIndex i, ProductIndex j, std::uint32_t graph);
std::vector<std::uint8_t> predict_pairs(const ModelParams& params, const TopicDistributions& dist,
                                        const ManifestTable& manifests, std::span<const TrainingPair> pairs,
                                        std::size_t workers = 1);

std::vector<std::uint8_t> labels_of(std::span<const TrainingPair> pairs);

struct Accuracy {
  double accuracy = 0.0;
  double error_reduction = 0.0;
};

// Throws Error on empty or mismatched inputs or when random_accuracy >= 1.
double error_reduction(double accuracy, double random_accuracy);
double accuracy(std::span<const std::uint8_t> predictions, std::span<const std::uint8_t> labels);
Accuracy accuracy_and_error_reduction(std::span<const std::uint8_t> predictions,
                                      std::span<const std::uint8_t> labels, double random_accuracy);

struct Precision {
  double precision = 0.0;
  bool truncated = false;  // fewer than k ranked items; precision is over those available
};

// |relevant ∩ top-k| / k. `relevant` must be sorted.
Precision precision_at_k(std::span<const ProductIndex> ranked, std::span<const ProductIndex> relevant,
                         std::size_t k);

// Two independent fair coins per pair; predicts an edge when both fire.
std::vector<std::uint8_t> baseline_random(std::size_t count, std::uint64_t seed);

struct LdaBaselineOptions {
  std::size_t num_topics = 0;            // 0: the caller's K
  std::size_t logistic_iterations = 200;
};

// Flat topic model trained without link terms, then beta and eta fitted with
// theta and phi frozen. beta and eta start at zero.
TrainResult baseline_lda_logistic(const Corpus& corpus, const DocumentSet& documents, std::size_t vocab_size,
                                  const PairDataset& dataset, const TrainConfig& config,
                                  const LdaBaselineOptions& options);

// Co-occurrence counts of (deepest node of i, deepest node of j) over the
// positive training edges of one graph.
class CategoryTreeBaseline {
 public:
  CategoryTreeBaseline(const Corpus& corpus, std::span<const TrainingPair> training, std::uint32_t graph,
                       double percentile = 50.0);

  std::size_t count(NodeIndex a, NodeIndex b) const;
  // Largest count over the deepest-node combinations of (i, j).
  std::size_t pair_count(ProductIndex i, ProductIndex j) const;
  std::size_t threshold() const noexcept { return threshold_; }
  bool predict(ProductIndex i, ProductIndex j) const;

 private:
  const Corpus* corpus_;
  std::map<std::pair<NodeIndex, NodeIndex>, std::size_t> counts_;
  std::size_t threshold_ = 0;
};

// Nearest-rank percentile of a non-empty list; p in [0, 100].
std::size_t nearest_rank_percentile(std::vector<std::size_t> values, double p);

std::vector<std::uint8_t> baseline_category_tree(const Corpus& corpus, const PairDataset& dataset,
                                                 std::span<const TrainingPair> pairs, double percentile);

// Reviewer sets per product as sorted integer ids.
class ReviewerIndex {
 public:
  explicit ReviewerIndex(const Corpus& corpus);
  const std::vector<std::uint32_t>& reviewers(ProductIndex p) const { return sets_.at(p); }
  // |U_a ∩ U_b| / sqrt(|U_a| |U_b|); 0 when either set is empty.
  double cosine(ProductIndex a, ProductIndex b) const;

 private:
  std::vector<std::vector<std::uint32_t>> sets_;
};

struct Scored {
  ProductIndex product = 0;
  double score = 0.0;
};

// Descending score, ties by ascending product index.
void sort_ranking(std::vector<Scored>& ranking);

std::vector<Scored> baseline_cf_cosine(const ReviewerIndex& index, ProductIndex query,
                                       std::span<const ProductIndex> candidates);

// The n words with the largest phi_k - mean_k' phi_k', descending, ties lexicographic.
std::vector<std::pair<std::string, double>> top_words(const TopicDistributions& dist,
                                                      const Vocabulary& vocabulary, TopicIndex k,
                                                      std::size_t n);

inline const std::vector<std::size_t> kDefaultPrecisionGrid = {1, 2, 5, 10, 20, 50, 100};

struct EvalRow {
  std::string method;
  GraphType graph = GraphType::substitute_viewed;
  std::optional<double> accuracy;
  std::optional<double> error_reduction;
  std::size_t pairs = 0;
};

struct PrecisionRow {
  std::string method;
  GraphType graph = GraphType::substitute_viewed;
  std::size_t k = 0;
  double precision = 0.0;
  std::size_t queries = 0;
  std::size_t truncated = 0;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::vector<PrecisionRow> precision;

  const EvalRow* find(std::string_view method, GraphType graph) const;
  // "method<TAB>graph<TAB>accuracy<TAB>error_reduction<TAB>pairs", NA where undefined.
  void write_table(std::ostream& out) const;
  // "method<TAB>graph<TAB>k<TAB>precision<TAB>queries<TAB>truncated".
  void write_precision(std::ostream& out) const;
};

inline const std::vector<std::string> kAllMethods = {"sceptre", "random", "lda", "ct", "cf"};

struct EvalOptions {
  std::vector<std::string> methods = kAllMethods;
  std::vector<std::size_t> k_grid = kDefaultPrecisionGrid;
  std::size_t max_queries = 200;  // query products per graph for precision@k
  double ct_percentile = 50.0;
  LdaBaselineOptions lda;
  TrainConfig train;  // seed, workers and solver settings shared by the baselines
};

struct EvalInputs {
  const Corpus* corpus = nullptr;
  const DocumentSet* documents = nullptr;
  std::size_t vocab_size = 0;
  const PairDataset* dataset = nullptr;
  const ModelParams* params = nullptr;  // required for "sceptre"
  std::size_t num_topics = 0;           // K for the LDA baseline when options.lda.num_topics is 0
};

// Accuracy and error reduction (against the seeded random baseline on the same
// test pairs) for every requested method and graph, plus precision@k over the
// test positives with training links excluded from the rankings.
EvalReport evaluate(const EvalInputs& inputs, const EvalOptions& options);

}  // namespace sceptre
