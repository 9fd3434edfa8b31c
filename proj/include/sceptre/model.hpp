#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sceptre/corpus.hpp"
#include "sceptre/random.hpp"

namespace sceptre {

inline constexpr std::size_t kManifestCount = 3;

enum class Provenance : std::uint8_t { edge = 0, cross_type = 1, random = 2 };
std::string_view provenance_name(Provenance p);
std::optional<Provenance> parse_provenance(std::string_view name);

// One labelled ordered pair. `graph` indexes ModelParams::graphs().
struct TrainingPair {
  ProductIndex i = 0;
  ProductIndex j = 0;
  std::uint32_t graph = 0;
  std::uint8_t label = 0;
  Provenance provenance = Provenance::edge;
};

// Observable pairwise features appended to the direction features.
struct ManifestFeatures {
  double price_diff = 0.0;     // price_j - price_i, 0 when either is unknown
  double rating_diff = 0.0;    // rating_j - rating_i, 0 when either is unknown
  double brand_differs = 0.0;  // 1 when both brands are known and differ

  std::array<double, kManifestCount> values() const { return {price_diff, rating_diff, brand_differs}; }
};

ManifestFeatures manifest(const Product& i, const Product& j);

// Per-product manifest attributes in a form cheap to combine in inner loops.
class ManifestTable {
 public:
  ManifestTable() = default;
  explicit ManifestTable(const Corpus& corpus);
  ManifestFeatures operator()(ProductIndex i, ProductIndex j) const;
  std::size_t size() const noexcept { return price_.size(); }

 private:
  std::vector<std::optional<double>> price_;
  std::vector<std::optional<double>> rating_;
  std::vector<std::int32_t> brand_;  // -1 unknown
};

double sigmoid(double x);
// log(sigmoid(x)) without overflow or cancellation.
double log_sigmoid(double x);

// Dense feature maps over a common K.
// psi: (1, theta_i[0]*theta_j[0], ..., theta_i[K-1]*theta_j[K-1]).
std::vector<double> psi(std::span<const double> theta_i, std::span<const double> theta_j);
// varphi: (1, theta_j - theta_i, price_diff, rating_diff, brand_differs).
std::vector<double> varphi(std::span<const double> theta_i, std::span<const double> theta_j,
                           const ManifestFeatures& m);

// All continuous parameters live in one flat vector:
//   [ theta logits (sparse, per product over its active set)
//   | phi logits (K x V, row-major)
//   | beta_g (1 + K) for each graph
//   | eta_g (1 + K + M) for each graph ]
class ModelParams {
 public:
  ModelParams() = default;
  ModelParams(std::vector<std::vector<TopicIndex>> active_sets, std::size_t num_topics,
              std::size_t vocab_size, std::vector<GraphType> graphs);

  std::size_t num_products() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_topics() const noexcept { return num_topics_; }
  std::size_t vocab_size() const noexcept { return vocab_size_; }
  std::size_t num_graphs() const noexcept { return graphs_.size(); }
  const std::vector<GraphType>& graphs() const noexcept { return graphs_; }
  std::optional<std::uint32_t> graph_index(GraphType g) const;

  std::span<const TopicIndex> active(ProductIndex i) const;
  std::size_t active_offset(ProductIndex i) const { return offsets_.at(i); }
  std::size_t total_active() const noexcept { return topics_.size(); }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::size_t theta_begin() const noexcept { return 0; }
  std::size_t phi_begin() const noexcept { return phi_begin_; }
  std::size_t beta_begin() const noexcept { return beta_begin_; }
  std::size_t eta_begin() const noexcept { return eta_begin_; }
  std::size_t beta_size() const noexcept { return 1 + num_topics_; }
  std::size_t eta_size() const noexcept { return 1 + num_topics_ + kManifestCount; }

  std::span<double> theta_logits(ProductIndex i);
  std::span<const double> theta_logits(ProductIndex i) const;
  std::span<double> phi_logits(TopicIndex k);
  std::span<const double> phi_logits(TopicIndex k) const;
  std::span<double> beta(std::uint32_t g);
  std::span<const double> beta(std::uint32_t g) const;
  std::span<double> eta(std::uint32_t g);
  std::span<const double> eta(std::uint32_t g) const;

  // Same layout, different values.
  bool same_layout(const ModelParams& other) const;

 private:
  std::vector<std::uint32_t> offsets_;
  std::vector<TopicIndex> topics_;
  std::vector<double> values_;
  std::vector<GraphType> graphs_;
  std::size_t num_topics_ = 0;
  std::size_t vocab_size_ = 0;
  std::size_t phi_begin_ = 0;
  std::size_t beta_begin_ = 0;
  std::size_t eta_begin_ = 0;
};

// Fills every continuous parameter with uniform draws from [0, 1).
void initialize_uniform(ModelParams& params, std::uint64_t seed);

// theta and phi implied by a parameter vector with ModelParams' layout.
// theta_i = softmax over A_i; phi_k = (softmax(l_k) + eps) / (1 + V eps).
class TopicDistributions {
 public:
  TopicDistributions() = default;
  TopicDistributions(const ModelParams& layout, std::span<const double> values, double smoothing);
  TopicDistributions(const ModelParams& params, double smoothing)
      : TopicDistributions(params, params.values(), smoothing) {}

  std::span<const double> theta(ProductIndex i) const;
  std::span<const double> phi(TopicIndex k) const;
  // softmax(l_k) before smoothing
  std::span<const double> phi_raw(TopicIndex k) const;
  std::vector<double> theta_dense(ProductIndex i) const;
  double smoothing() const noexcept { return smoothing_; }
  const ModelParams& layout() const { return *layout_; }

 private:
  const ModelParams* layout_ = nullptr;
  std::vector<double> theta_;
  std::vector<double> phi_;
  std::vector<double> phi_raw_;
  double smoothing_ = 0.0;
};

// Sparse logits; the same numbers as <beta_g, psi(i,j)> and <eta_g, varphi(i,j)>.
double relatedness_logit(const TopicDistributions& dist, std::span<const double> beta,
                         ProductIndex i, ProductIndex j);
double direction_logit(const TopicDistributions& dist, std::span<const double> eta,
                       ProductIndex i, ProductIndex j, const ManifestFeatures& m);
// Direction logit against an explicit target distribution (sparse over `target_topics`).
double direction_logit(const TopicDistributions& dist, std::span<const double> eta,
                       ProductIndex i, std::span<const TopicIndex> target_topics,
                       std::span<const double> target_theta, const ManifestFeatures& m);

struct RelationProbability {
  double related = 0.0;    // sigmoid(<beta_g, psi(i,j)>)
  double direction = 0.0;  // sigmoid(<eta_g, varphi(i,j)>)
  double edge = 0.0;       // related * direction
};

RelationProbability relation_probability(const ModelParams& params, const TopicDistributions& dist,
                                         const ManifestTable& manifests, ProductIndex i,
                                         ProductIndex j, std::uint32_t graph);

// Topic labels, index-aligned with DocumentSet::documents.
struct TopicAssignments {
  std::vector<std::vector<TopicIndex>> z;
  friend bool operator==(const TopicAssignments&, const TopicAssignments&) = default;
};

// Uniform over each document's active set.
TopicAssignments initial_assignments(const ModelParams& params, const DocumentSet& documents,
                                     std::uint64_t seed);

// Throws Error if some z lies outside its document's active set.
void check_assignments(const ModelParams& params, const DocumentSet& documents,
                       const TopicAssignments& z);

// Resamples every z[d][j] with probability proportional to theta_{d,k} phi_{k,w}
// over A_d. Document d draws from its own stream derived from (seed, d), so the
// result does not depend on `workers`.
void sample_topic_assignments(const ModelParams& params, const TopicDistributions& dist,
                              const DocumentSet& documents, TopicAssignments& z,
                              std::uint64_t seed, std::size_t workers = 1);

struct ObjectiveOptions {
  double l2 = 1e-3;          // on every logit and on beta, eta
  double smoothing = 1e-6;   // additive smoothing inside phi's normalisation
  bool corpus_term = true;
  bool link_term = true;
  std::size_t workers = 1;
};

struct ObjectiveBreakdown {
  double corpus = 0.0;
  double links = 0.0;
  double regularizer = 0.0;  // already negative
  double total() const { return corpus + links + regularizer; }
};

// The joint log-likelihood (to be maximised) with z held fixed:
//   sum_g [ sum_{E_g} log F<->(psi(i,j)) + log F->(varphi(i,j)) + log(1 - F->(varphi(j,i)))
//         + sum_{non-edges} log(1 - F<->(psi(i,j))) ]
//   + sum_d sum_j log theta_{d,z} + log phi_{z,w}  -  l2/2 ||params||^2
class Objective {
 public:
  Objective(const ModelParams& layout, const DocumentSet& documents, const ManifestTable& manifests,
            std::span<const TrainingPair> pairs, ObjectiveOptions options);

  // Recomputes the topic counts that summarise z.
  void set_assignments(const TopicAssignments& z);

  ObjectiveBreakdown breakdown(std::span<const double> values) const;
  double value(std::span<const double> values) const { return breakdown(values).total(); }
  // Writes d(objective)/d(values) into grad and returns the objective.
  double value_and_gradient(std::span<const double> values, std::span<double> grad) const;

  const ModelParams& layout() const { return *layout_; }
  const ObjectiveOptions& options() const noexcept { return options_; }

 private:
  double evaluate(std::span<const double> values, std::span<double> grad,
                  ObjectiveBreakdown* parts) const;

  const ModelParams* layout_;
  const DocumentSet* documents_;
  const ManifestTable* manifests_;
  std::span<const TrainingPair> pairs_;
  ObjectiveOptions options_;
  // n_{d,k}, CSR-aligned with the theta block
  std::vector<double> doc_topic_;
  std::vector<double> doc_length_;
  // n_{k,w}, stored sparsely per topic
  std::vector<std::vector<std::pair<TokenId, double>>> topic_word_;
};

// Link log-likelihood of `pairs` only (no corpus term, no regulariser).
double link_log_likelihood(const ModelParams& params, const TopicDistributions& dist,
                           const ManifestTable& manifests, std::span<const TrainingPair> pairs);

// Convenience wrappers around Objective. Throw DegenerateError on a non-finite result.
double log_likelihood(const ModelParams& params, const DocumentSet& documents,
                      const ManifestTable& manifests, std::span<const TrainingPair> pairs,
                      const TopicAssignments& z, const ObjectiveOptions& options = {});
std::vector<double> gradient(const ModelParams& params, const DocumentSet& documents,
                             const ManifestTable& manifests, std::span<const TrainingPair> pairs,
                             const TopicAssignments& z, const ObjectiveOptions& options = {});

}  // namespace sceptre
