#include "sceptre/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "sceptre/errors.hpp"
#include "sceptre/parallel.hpp"

namespace sceptre {

namespace {

constexpr std::array<std::string_view, 3> kProvenanceNames = {"edge", "cross_type", "random"};

void softmax_into(std::span<const double> logits, std::span<double> out) {
  if (logits.empty()) return;
  const double hi = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t t = 0; t < logits.size(); ++t) {
    out[t] = std::exp(logits[t] - hi);
    total += out[t];
  }
  for (auto& v : out) v /= total;
}

}  // namespace

std::string_view provenance_name(Provenance p) {
  return kProvenanceNames.at(static_cast<std::size_t>(p));
}

std::optional<Provenance> parse_provenance(std::string_view name) {
  for (std::size_t i = 0; i < kProvenanceNames.size(); ++i)
    if (kProvenanceNames[i] == name) return static_cast<Provenance>(i);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Manifest features

ManifestFeatures manifest(const Product& i, const Product& j) {
  ManifestFeatures m;
  if (i.price && j.price) m.price_diff = *j.price - *i.price;
  if (i.rating && j.rating) m.rating_diff = *j.rating - *i.rating;
  if (i.brand && j.brand && *i.brand != *j.brand) m.brand_differs = 1.0;
  return m;
}

ManifestTable::ManifestTable(const Corpus& corpus) {
  std::map<std::string, std::int32_t> brands;
  price_.reserve(corpus.size());
  rating_.reserve(corpus.size());
  brand_.reserve(corpus.size());
  for (const auto& p : corpus.products) {
    price_.push_back(p.price);
    rating_.push_back(p.rating);
    if (p.brand) {
      auto [it, _] = brands.emplace(*p.brand, static_cast<std::int32_t>(brands.size()));
      brand_.push_back(it->second);
    } else {
      brand_.push_back(-1);
    }
  }
}

ManifestFeatures ManifestTable::operator()(ProductIndex i, ProductIndex j) const {
  ManifestFeatures m;
  if (price_[i] && price_[j]) m.price_diff = *price_[j] - *price_[i];
  if (rating_[i] && rating_[j]) m.rating_diff = *rating_[j] - *rating_[i];
  if (brand_[i] >= 0 && brand_[j] >= 0 && brand_[i] != brand_[j]) m.brand_differs = 1.0;
  return m;
}

// ---------------------------------------------------------------------------
// Logistic pieces

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

std::vector<double> psi(std::span<const double> theta_i, std::span<const double> theta_j) {
  if (theta_i.size() != theta_j.size()) throw Error("psi: topic vectors differ in length");
  std::vector<double> out(1 + theta_i.size());
  out[0] = 1.0;
  for (std::size_t k = 0; k < theta_i.size(); ++k) out[1 + k] = theta_i[k] * theta_j[k];
  return out;
}

std::vector<double> varphi(std::span<const double> theta_i, std::span<const double> theta_j,
                           const ManifestFeatures& m) {
  if (theta_i.size() != theta_j.size()) throw Error("varphi: topic vectors differ in length");
  const std::size_t K = theta_i.size();
  std::vector<double> out(1 + K + kManifestCount);
  out[0] = 1.0;
  for (std::size_t k = 0; k < K; ++k) out[1 + k] = theta_j[k] - theta_i[k];
  out[1 + K] = m.price_diff;
  out[2 + K] = m.rating_diff;
  out[3 + K] = m.brand_differs;
  return out;
}

// ---------------------------------------------------------------------------
// Parameters

ModelParams::ModelParams(std::vector<std::vector<TopicIndex>> active_sets, std::size_t num_topics,
                         std::size_t vocab_size, std::vector<GraphType> graphs)
    : graphs_(std::move(graphs)), num_topics_(num_topics), vocab_size_(vocab_size) {
  offsets_.reserve(active_sets.size() + 1);
  offsets_.push_back(0);
  for (auto& set : active_sets) {
    if (!std::is_sorted(set.begin(), set.end()) ||
        std::adjacent_find(set.begin(), set.end()) != set.end())
      throw Error("active topic sets must be sorted and unique");
    for (auto k : set)
      if (k >= num_topics) throw Error("active topic index out of range");
    topics_.insert(topics_.end(), set.begin(), set.end());
    offsets_.push_back(static_cast<std::uint32_t>(topics_.size()));
  }
  phi_begin_ = topics_.size();
  beta_begin_ = phi_begin_ + num_topics_ * vocab_size_;
  eta_begin_ = beta_begin_ + graphs_.size() * beta_size();
  values_.assign(eta_begin_ + graphs_.size() * eta_size(), 0.0);
}

std::optional<std::uint32_t> ModelParams::graph_index(GraphType g) const {
  for (std::size_t i = 0; i < graphs_.size(); ++i)
    if (graphs_[i] == g) return static_cast<std::uint32_t>(i);
  return std::nullopt;
}

std::span<const TopicIndex> ModelParams::active(ProductIndex i) const {
  return std::span<const TopicIndex>(topics_).subspan(offsets_.at(i), offsets_.at(i + 1) - offsets_[i]);
}

std::span<double> ModelParams::theta_logits(ProductIndex i) {
  return std::span<double>(values_).subspan(offsets_.at(i), offsets_.at(i + 1) - offsets_[i]);
}
std::span<const double> ModelParams::theta_logits(ProductIndex i) const {
  return std::span<const double>(values_).subspan(offsets_.at(i), offsets_.at(i + 1) - offsets_[i]);
}
std::span<double> ModelParams::phi_logits(TopicIndex k) {
  return std::span<double>(values_).subspan(phi_begin_ + std::size_t{k} * vocab_size_, vocab_size_);
}
std::span<const double> ModelParams::phi_logits(TopicIndex k) const {
  return std::span<const double>(values_).subspan(phi_begin_ + std::size_t{k} * vocab_size_, vocab_size_);
}
std::span<double> ModelParams::beta(std::uint32_t g) {
  return std::span<double>(values_).subspan(beta_begin_ + g * beta_size(), beta_size());
}
std::span<const double> ModelParams::beta(std::uint32_t g) const {
  return std::span<const double>(values_).subspan(beta_begin_ + g * beta_size(), beta_size());
}
std::span<double> ModelParams::eta(std::uint32_t g) {
  return std::span<double>(values_).subspan(eta_begin_ + g * eta_size(), eta_size());
}
std::span<const double> ModelParams::eta(std::uint32_t g) const {
  return std::span<const double>(values_).subspan(eta_begin_ + g * eta_size(), eta_size());
}

bool ModelParams::same_layout(const ModelParams& other) const {
  return offsets_ == other.offsets_ && topics_ == other.topics_ && graphs_ == other.graphs_ &&
         num_topics_ == other.num_topics_ && vocab_size_ == other.vocab_size_;
}

void initialize_uniform(ModelParams& params, std::uint64_t seed) {
  Rng rng(seed);
  for (auto& v : params.values()) v = uniform01(rng);
}

TopicDistributions::TopicDistributions(const ModelParams& layout, std::span<const double> values,
                                       double smoothing)
    : layout_(&layout), smoothing_(smoothing) {
  if (values.size() != layout.size()) throw Error("parameter vector does not match layout");
  theta_.resize(layout.total_active());
  for (std::size_t i = 0; i < layout.num_products(); ++i) {
    const auto off = layout.active_offset(static_cast<ProductIndex>(i));
    const auto n = layout.active(static_cast<ProductIndex>(i)).size();
    softmax_into(values.subspan(off, n), std::span<double>(theta_).subspan(off, n));
  }
  const std::size_t K = layout.num_topics(), V = layout.vocab_size();
  phi_raw_.resize(K * V);
  phi_.resize(K * V);
  const double norm = 1.0 + static_cast<double>(V) * smoothing;
  for (std::size_t k = 0; k < K; ++k) {
    auto raw = std::span<double>(phi_raw_).subspan(k * V, V);
    softmax_into(values.subspan(layout.phi_begin() + k * V, V), raw);
    for (std::size_t w = 0; w < V; ++w) phi_[k * V + w] = (raw[w] + smoothing) / norm;
  }
}

std::span<const double> TopicDistributions::theta(ProductIndex i) const {
  return std::span<const double>(theta_).subspan(layout_->active_offset(i), layout_->active(i).size());
}

std::span<const double> TopicDistributions::phi(TopicIndex k) const {
  const auto V = layout_->vocab_size();
  return std::span<const double>(phi_).subspan(std::size_t{k} * V, V);
}

std::span<const double> TopicDistributions::phi_raw(TopicIndex k) const {
  const auto V = layout_->vocab_size();
  return std::span<const double>(phi_raw_).subspan(std::size_t{k} * V, V);
}

std::vector<double> TopicDistributions::theta_dense(ProductIndex i) const {
  std::vector<double> out(layout_->num_topics(), 0.0);
  const auto topics = layout_->active(i);
  const auto th = theta(i);
  for (std::size_t t = 0; t < topics.size(); ++t) out[topics[t]] = th[t];
  return out;
}

// ---------------------------------------------------------------------------
// Predictors

double relatedness_logit(const TopicDistributions& dist, std::span<const double> beta,
                         ProductIndex i, ProductIndex j) {
  const auto& L = dist.layout();
  const auto ai = L.active(i), aj = L.active(j);
  const auto ti = dist.theta(i), tj = dist.theta(j);
  double r = beta[0];
  std::size_t a = 0, b = 0;
  while (a < ai.size() && b < aj.size()) {
    if (ai[a] < aj[b]) {
      ++a;
    } else if (aj[b] < ai[a]) {
      ++b;
    } else {
      r += beta[1 + ai[a]] * ti[a] * tj[b];
      ++a;
      ++b;
    }
  }
  return r;
}

double direction_logit(const TopicDistributions& dist, std::span<const double> eta, ProductIndex i,
                       std::span<const TopicIndex> target_topics, std::span<const double> target_theta,
                       const ManifestFeatures& m) {
  const auto& L = dist.layout();
  const std::size_t K = L.num_topics();
  const auto ai = L.active(i);
  const auto ti = dist.theta(i);
  double s = eta[0];
  for (std::size_t b = 0; b < target_topics.size(); ++b) s += eta[1 + target_topics[b]] * target_theta[b];
  for (std::size_t a = 0; a < ai.size(); ++a) s -= eta[1 + ai[a]] * ti[a];
  s += eta[1 + K] * m.price_diff + eta[2 + K] * m.rating_diff + eta[3 + K] * m.brand_differs;
  return s;
}

double direction_logit(const TopicDistributions& dist, std::span<const double> eta, ProductIndex i,
                       ProductIndex j, const ManifestFeatures& m) {
  return direction_logit(dist, eta, i, dist.layout().active(j), dist.theta(j), m);
}

RelationProbability relation_probability(const ModelParams& params, const TopicDistributions& dist,
                                         const ManifestTable& manifests, ProductIndex i,
                                         ProductIndex j, std::uint32_t graph) {
  RelationProbability p;
  p.related = sigmoid(relatedness_logit(dist, params.beta(graph), i, j));
  p.direction = sigmoid(direction_logit(dist, params.eta(graph), i, j, manifests(i, j)));
  p.edge = p.related * p.direction;
  return p;
}

// ---------------------------------------------------------------------------
// Topic assignments

TopicAssignments initial_assignments(const ModelParams& params, const DocumentSet& documents,
                                     std::uint64_t seed) {
  TopicAssignments out;
  out.z.resize(documents.documents.size());
  for (std::size_t d = 0; d < documents.documents.size(); ++d) {
    const auto& doc = documents.documents[d];
    if (doc.tokens.empty()) continue;
    const auto active = params.active(doc.product);
    if (active.empty())
      throw Error("document of product " + std::to_string(doc.product) + " has no active topics");
    Rng rng(derive_seed(seed, d));
    out.z[d].resize(doc.tokens.size());
    for (auto& z : out.z[d]) z = active[uniform_index(rng, active.size())];
  }
  return out;
}

void check_assignments(const ModelParams& params, const DocumentSet& documents,
                       const TopicAssignments& z) {
  if (z.z.size() != documents.documents.size()) throw Error("assignments do not match documents");
  for (std::size_t d = 0; d < z.z.size(); ++d) {
    const auto& doc = documents.documents[d];
    if (z.z[d].size() != doc.tokens.size()) throw Error("assignment length differs from document");
    const auto active = params.active(doc.product);
    for (auto k : z.z[d])
      if (!std::binary_search(active.begin(), active.end(), k))
        throw Error("topic assignment outside the active set of document " + std::to_string(d));
  }
}

void sample_topic_assignments(const ModelParams& params, const TopicDistributions& dist,
                              const DocumentSet& documents, TopicAssignments& z,
                              std::uint64_t seed, std::size_t workers) {
  const auto& docs = documents.documents;
  z.z.resize(docs.size());
  parallel_chunks(docs.size(), workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<double> weights;
    for (std::size_t d = begin; d < end; ++d) {
      const auto& doc = docs[d];
      z.z[d].resize(doc.tokens.size());
      if (doc.tokens.empty()) continue;
      const auto active = params.active(doc.product);
      const auto theta = dist.theta(doc.product);
      weights.resize(active.size());
      Rng rng(derive_seed(seed, d));
      for (std::size_t j = 0; j < doc.tokens.size(); ++j) {
        const auto w = doc.tokens[j];
        for (std::size_t t = 0; t < active.size(); ++t) weights[t] = theta[t] * dist.phi(active[t])[w];
        const auto pick = sample_discrete(weights, rng);
        if (pick == weights.size())
          throw DegenerateError("zero sampling mass for a word of document " + std::to_string(d));
        z.z[d][j] = active[pick];
      }
    }
  });
}

// ---------------------------------------------------------------------------
// Objective

Objective::Objective(const ModelParams& layout, const DocumentSet& documents,
                     const ManifestTable& manifests, std::span<const TrainingPair> pairs,
                     ObjectiveOptions options)
    : layout_(&layout), documents_(&documents), manifests_(&manifests), pairs_(pairs),
      options_(options) {
  doc_topic_.assign(layout.total_active(), 0.0);
  doc_length_.assign(layout.num_products(), 0.0);
  topic_word_.assign(layout.num_topics(), {});
  for (const auto& p : pairs_) {
    if (p.i >= layout.num_products() || p.j >= layout.num_products() || p.graph >= layout.num_graphs())
      throw Error("training pair out of range");
  }
}

void Objective::set_assignments(const TopicAssignments& z) {
  const auto& L = *layout_;
  const auto& docs = documents_->documents;
  if (z.z.size() != docs.size()) throw Error("assignments do not match documents");
  std::fill(doc_topic_.begin(), doc_topic_.end(), 0.0);
  std::fill(doc_length_.begin(), doc_length_.end(), 0.0);
  const std::size_t K = L.num_topics(), V = L.vocab_size();
  std::vector<std::uint32_t> dense(K * V, 0);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const auto& doc = docs[d];
    if (z.z[d].size() != doc.tokens.size()) throw Error("assignment length differs from document");
    const auto active = L.active(doc.product);
    const auto off = L.active_offset(doc.product);
    for (std::size_t j = 0; j < doc.tokens.size(); ++j) {
      const auto k = z.z[d][j];
      const auto it = std::lower_bound(active.begin(), active.end(), k);
      if (it == active.end() || *it != k) throw Error("topic assignment outside the active set");
      doc_topic_[off + static_cast<std::size_t>(it - active.begin())] += 1.0;
      ++dense[std::size_t{k} * V + doc.tokens[j]];
    }
    doc_length_[doc.product] += static_cast<double>(doc.tokens.size());
  }
  for (std::size_t k = 0; k < K; ++k) {
    auto& row = topic_word_[k];
    row.clear();
    for (std::size_t w = 0; w < V; ++w)
      if (dense[k * V + w]) row.emplace_back(static_cast<TokenId>(w), dense[k * V + w]);
  }
}

ObjectiveBreakdown Objective::breakdown(std::span<const double> values) const {
  ObjectiveBreakdown parts;
  evaluate(values, {}, &parts);
  return parts;
}

double Objective::value_and_gradient(std::span<const double> values, std::span<double> grad) const {
  if (grad.size() != values.size()) throw Error("gradient buffer does not match parameters");
  return evaluate(values, grad, nullptr);
}

double Objective::evaluate(std::span<const double> values, std::span<double> grad,
                           ObjectiveBreakdown* parts) const {
  const auto& L = *layout_;
  const std::size_t K = L.num_topics(), V = L.vocab_size();
  const double eps = options_.smoothing;
  const bool want_grad = !grad.empty();
  const TopicDistributions dist(L, values, eps);
  if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);

  ObjectiveBreakdown acc;

  if (options_.corpus_term) {
    for (std::size_t i = 0; i < L.num_products(); ++i) {
      const double n_total = doc_length_[i];
      if (n_total == 0.0) continue;
      const auto off = L.active_offset(static_cast<ProductIndex>(i));
      const auto th = dist.theta(static_cast<ProductIndex>(i));
      for (std::size_t t = 0; t < th.size(); ++t) {
        const double n = doc_topic_[off + t];
        if (n > 0.0) acc.corpus += n * std::log(th[t]);
        if (want_grad) grad[off + t] += n - n_total * th[t];
      }
    }
    std::vector<double> partial(chunk_count(K, options_.workers), 0.0);
    parallel_chunks(K, options_.workers, [&](std::size_t c, std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) {
        const auto raw = dist.phi_raw(static_cast<TopicIndex>(k));
        const auto phi = dist.phi(static_cast<TopicIndex>(k));
        double weighted = 0.0;
        for (const auto& [w, n] : topic_word_[k]) {
          partial[c] += n * std::log(phi[w]);
          weighted += n * raw[w] / (raw[w] + eps);
        }
        if (!want_grad) continue;
        auto g = grad.subspan(L.phi_begin() + k * V, V);
        for (std::size_t v = 0; v < V; ++v) g[v] -= raw[v] * weighted;
        for (const auto& [w, n] : topic_word_[k]) g[w] += n * raw[w] / (raw[w] + eps);
      }
    });
    for (double p : partial) acc.corpus += p;
  }

  if (options_.link_term && !pairs_.empty()) {
    const std::size_t chunks = chunk_count(pairs_.size(), options_.workers);
    const std::size_t head = L.size() - L.beta_begin();
    struct Partial {
      double value = 0.0;
      std::vector<double> theta;  // d/d theta (probability space)
      std::vector<double> head;   // d/d beta, eta
    };
    std::vector<Partial> partials(chunks);
    parallel_chunks(pairs_.size(), options_.workers, [&](std::size_t c, std::size_t begin, std::size_t end) {
      auto& out = partials[c];
      if (want_grad) {
        out.theta.assign(L.total_active(), 0.0);
        out.head.assign(head, 0.0);
      }
      for (std::size_t p = begin; p < end; ++p) {
        const auto& pair = pairs_[p];
        const auto ai = L.active(pair.i), aj = L.active(pair.j);
        const auto ti = dist.theta(pair.i), tj = dist.theta(pair.j);
        const auto oi = L.active_offset(pair.i), oj = L.active_offset(pair.j);
        const std::size_t beta_off = L.beta_begin() + pair.graph * L.beta_size();
        const std::size_t eta_off = L.eta_begin() + pair.graph * L.eta_size();
        const double* beta = values.data() + beta_off;
        const double* eta = values.data() + eta_off;

        const double r = relatedness_logit(dist, std::span<const double>(beta, L.beta_size()), pair.i, pair.j);
        double dr;
        double da = 0.0, db = 0.0;
        double topic_diff = 0.0, manifest_anti = 0.0, manifest_sym = 0.0;
        ManifestFeatures m;
        if (pair.label) {
          m = (*manifests_)(pair.i, pair.j);
          for (std::size_t b = 0; b < aj.size(); ++b) topic_diff += eta[1 + aj[b]] * tj[b];
          for (std::size_t a = 0; a < ai.size(); ++a) topic_diff -= eta[1 + ai[a]] * ti[a];
          manifest_anti = eta[1 + K] * m.price_diff + eta[2 + K] * m.rating_diff;
          manifest_sym = eta[3 + K] * m.brand_differs;
          // forward: varphi(i,j); reverse: varphi(j,i) flips the antisymmetric parts
          const double fwd = eta[0] + topic_diff + manifest_anti + manifest_sym;
          const double rev = eta[0] - topic_diff - manifest_anti + manifest_sym;
          out.value += log_sigmoid(r) + log_sigmoid(fwd) + log_sigmoid(-rev);
          dr = sigmoid(-r);
          da = sigmoid(-fwd);
          db = -sigmoid(rev);
        } else {
          out.value += log_sigmoid(-r);
          dr = -sigmoid(r);
        }
        if (!want_grad) continue;

        double* gbeta = out.head.data() + (beta_off - L.beta_begin());
        double* geta = out.head.data() + (eta_off - L.beta_begin());
        gbeta[0] += dr;
        std::size_t a = 0, b = 0;
        while (a < ai.size() && b < aj.size()) {
          if (ai[a] < aj[b]) {
            ++a;
          } else if (aj[b] < ai[a]) {
            ++b;
          } else {
            const auto k = ai[a];
            gbeta[1 + k] += dr * ti[a] * tj[b];
            out.theta[oi + a] += dr * beta[1 + k] * tj[b];
            out.theta[oj + b] += dr * beta[1 + k] * ti[a];
            ++a;
            ++b;
          }
        }
        if (pair.label) {
          const double anti = da - db;  // coefficient of the antisymmetric block
          const double sym = da + db;   // coefficient of bias and brand
          geta[0] += sym;
          for (std::size_t t = 0; t < aj.size(); ++t) {
            geta[1 + aj[t]] += anti * tj[t];
            out.theta[oj + t] += anti * eta[1 + aj[t]];
          }
          for (std::size_t t = 0; t < ai.size(); ++t) {
            geta[1 + ai[t]] -= anti * ti[t];
            out.theta[oi + t] -= anti * eta[1 + ai[t]];
          }
          geta[1 + K] += anti * m.price_diff;
          geta[2 + K] += anti * m.rating_diff;
          geta[3 + K] += sym * m.brand_differs;
        }
      }
    });
    for (const auto& part : partials) acc.links += part.value;
    if (want_grad) {
      std::vector<double> gtheta(L.total_active(), 0.0);
      for (const auto& part : partials) {
        for (std::size_t t = 0; t < gtheta.size(); ++t) gtheta[t] += part.theta[t];
        for (std::size_t h = 0; h < head; ++h) grad[L.beta_begin() + h] += part.head[h];
      }
      // chain rule through the softmax over each active set
      for (std::size_t i = 0; i < L.num_products(); ++i) {
        const auto off = L.active_offset(static_cast<ProductIndex>(i));
        const auto th = dist.theta(static_cast<ProductIndex>(i));
        double mean = 0.0;
        for (std::size_t t = 0; t < th.size(); ++t) mean += th[t] * gtheta[off + t];
        for (std::size_t t = 0; t < th.size(); ++t) grad[off + t] += th[t] * (gtheta[off + t] - mean);
      }
    }
  }

  if (options_.l2 > 0.0) {
    double sq = 0.0;
    for (std::size_t v = 0; v < values.size(); ++v) {
      sq += values[v] * values[v];
      if (want_grad) grad[v] -= options_.l2 * values[v];
    }
    acc.regularizer = -0.5 * options_.l2 * sq;
  }

  const double total = acc.total();
  if (!std::isfinite(total)) throw DegenerateError("objective is not finite (degenerate parameters)");
  if (parts) *parts = acc;
  return total;
}

double link_log_likelihood(const ModelParams& params, const TopicDistributions& dist,
                           const ManifestTable& manifests, std::span<const TrainingPair> pairs) {
  double total = 0.0;
  for (const auto& p : pairs) {
    const double r = relatedness_logit(dist, params.beta(p.graph), p.i, p.j);
    if (!p.label) {
      total += log_sigmoid(-r);
      continue;
    }
    const auto eta = params.eta(p.graph);
    const auto m = manifests(p.i, p.j);
    ManifestFeatures back = m;
    back.price_diff = -m.price_diff;
    back.rating_diff = -m.rating_diff;
    total += log_sigmoid(r) + log_sigmoid(direction_logit(dist, eta, p.i, p.j, m)) +
             log_sigmoid(-direction_logit(dist, eta, p.j, p.i, back));
  }
  return total;
}

double log_likelihood(const ModelParams& params, const DocumentSet& documents,
                      const ManifestTable& manifests, std::span<const TrainingPair> pairs,
                      const TopicAssignments& z, const ObjectiveOptions& options) {
  Objective objective(params, documents, manifests, pairs, options);
  objective.set_assignments(z);
  return objective.value(params.values());
}

std::vector<double> gradient(const ModelParams& params, const DocumentSet& documents,
                             const ManifestTable& manifests, std::span<const TrainingPair> pairs,
                             const TopicAssignments& z, const ObjectiveOptions& options) {
  Objective objective(params, documents, manifests, pairs, options);
  objective.set_assignments(z);
  std::vector<double> grad(params.size());
  objective.value_and_gradient(params.values(), grad);
  return grad;
}

}  // namespace sceptre
