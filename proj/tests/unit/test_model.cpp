#include <cmath>
#include <numeric>

#include "doctest.h"
#include "instances.hpp"
#include "oracles.hpp"
#include "sceptre/errors.hpp"
#include "sceptre/model.hpp"

using namespace sceptre;
using namespace sceptre::testing;

TEST_CASE("sigmoid") {
  CHECK(sigmoid(0.0) == 0.5);
  for (double x : {-30.0, -2.5, -0.1, 0.7, 4.0, 33.0}) CHECK(sigmoid(x) + sigmoid(-x) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(sigmoid(50.0) - 1.0) < 1e-15);
  CHECK(std::isfinite(sigmoid(-1000.0)));
  CHECK(sigmoid(1000.0) == 1.0);
  CHECK(log_sigmoid(-1000.0) == doctest::Approx(-1000.0));
  CHECK(log_sigmoid(1000.0) == 0.0);
  CHECK(log_sigmoid(0.3) == doctest::Approx(std::log(1.0 / (1.0 + std::exp(-0.3)))).epsilon(1e-14));
}

TEST_CASE("psi") {
  const std::vector<double> half{0.5, 0.5};
  CHECK(psi(half, half) == std::vector<double>{1.0, 0.25, 0.25});
  CHECK(psi(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == std::vector<double>{1.0, 0.0, 0.0});
}

TEST_CASE("varphi") {
  const std::vector<double> a{0.3, 0.7};
  CHECK(varphi(a, a, {}) == std::vector<double>{1, 0, 0, 0, 0, 0});

  Product i, j;
  i.price = 10;
  j.price = 12;
  i.brand = j.brand = std::string("x");
  const auto m = manifest(i, j);
  CHECK(varphi(std::vector<double>{1, 0}, std::vector<double>{0, 1}, m) == std::vector<double>{1, -1, 1, 2, 0, 0});
  j.brand = std::string("y");
  CHECK(manifest(i, j).brand_differs == 1.0);
  CHECK(manifest(j, i).brand_differs == 1.0);
  j.brand.reset();
  CHECK(manifest(i, j).brand_differs == 0.0);
}

TEST_CASE("relation_probability: zero weights and oracle agreement") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto inst = random_instance(seed, {});
    const TopicDistributions dist(inst.params, 1e-6);
    const auto& pair = inst.pairs[0];
    const auto p = relation_probability(inst.params, dist, inst.manifests, pair.i, pair.j, pair.graph);
    const auto ti = dist.theta_dense(pair.i), tj = dist.theta_dense(pair.j);
    const auto beta = inst.params.beta(pair.graph), eta = inst.params.eta(pair.graph);
    const auto f = psi(ti, tj);
    const auto g = varphi(ti, tj, inst.manifests(pair.i, pair.j));
    const double r = std::inner_product(f.begin(), f.end(), beta.begin(), 0.0);
    const double d = std::inner_product(g.begin(), g.end(), eta.begin(), 0.0);
    CHECK(p.related == doctest::Approx(1.0 / (1.0 + std::exp(-r))).epsilon(1e-12));
    CHECK(p.direction == doctest::Approx(1.0 / (1.0 + std::exp(-d))).epsilon(1e-12));
    CHECK(p.edge == doctest::Approx(p.related * p.direction).epsilon(1e-14));
    const auto swapped = relation_probability(inst.params, dist, inst.manifests, pair.j, pair.i, pair.graph);
    CHECK(swapped.related == doctest::Approx(p.related).epsilon(1e-14));

    for (auto& v : inst.params.beta(pair.graph)) v = 0.0;
    for (auto& v : inst.params.eta(pair.graph)) v = 0.0;
    const TopicDistributions zero(inst.params, 1e-6);
    const auto z = relation_probability(inst.params, zero, inst.manifests, pair.i, pair.j, pair.graph);
    CHECK(z.related == 0.5);
    CHECK(z.direction == 0.5);
    CHECK(z.edge == 0.25);
  }
}

TEST_CASE("simplex invariants of theta and phi") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    InstanceShape shape;
    shape.scale = 5.0;
    const auto inst = random_instance(seed, shape);
    const TopicDistributions dist(inst.params, 1e-6);
    for (ProductIndex i = 0; i < inst.params.num_products(); ++i) {
      const auto t = dist.theta_dense(i);
      CHECK(std::accumulate(t.begin(), t.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
      const auto act = inst.params.active(i);
      for (TopicIndex k = 0; k < t.size(); ++k) {
        const bool in = std::find(act.begin(), act.end(), k) != act.end();
        if (in) CHECK(t[k] > 0.0);
        else CHECK(t[k] == 0.0);
      }
    }
    for (TopicIndex k = 0; k < inst.params.num_topics(); ++k) {
      const auto p = dist.phi(k);
      CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("log_likelihood: empty corpus and no pairs leaves the regularizer") {
  ModelParams params({}, 2, 3, {GraphType::substitute_viewed});
  for (auto& v : params.values()) v = 0.5;
  const Corpus corpus;
  const ManifestTable manifests(corpus);
  ObjectiveOptions o;
  o.l2 = 0.1;
  const double value = log_likelihood(params, DocumentSet{}, manifests, {}, TopicAssignments{}, o);
  CHECK(value == doctest::Approx(-0.5 * 0.1 * 0.25 * static_cast<double>(params.size())));
}

TEST_CASE("log_likelihood: a one-word document with a certain topic and word has zero corpus term") {
  ModelParams params({{0}}, 1, 1, {GraphType::substitute_viewed});
  DocumentSet docs;
  docs.documents.push_back({0, {0}});
  Corpus corpus;
  corpus.products.push_back(Product{});
  const ManifestTable manifests(corpus);
  TopicAssignments z{{{0}}};
  ObjectiveOptions o;
  o.l2 = 0.0;
  CHECK(std::abs(log_likelihood(params, docs, manifests, {}, z, o)) < 1e-15);
}

TEST_CASE("log_likelihood matches the straight-line oracle") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    InstanceShape shape;
    shape.products = 4;
    shape.pairs = 6;
    shape.scale = 2.0;
    const auto inst = random_instance(seed, shape);
    ObjectiveOptions o;
    o.l2 = 1e-3;
    o.smoothing = 1e-6;
    const double lib = log_likelihood(inst.params, inst.documents, inst.manifests, inst.pairs, inst.z, o);
    CHECK(std::abs(lib - oracle_log_likelihood(inst, o.l2, o.smoothing)) < 1e-10);
  }
}

TEST_CASE("log_likelihood: non-finite parameters raise a degenerate error") {
  auto inst = random_instance(3, {});
  inst.params.beta(0)[0] = std::nan("");
  CHECK_THROWS_AS(log_likelihood(inst.params, inst.documents, inst.manifests, inst.pairs, inst.z), DegenerateError);
}

TEST_CASE("gradient: stationary point of the empty problem") {
  ModelParams params({{0}}, 1, 1, {GraphType::substitute_viewed});
  const Corpus corpus;
  const ManifestTable manifests(corpus);
  DocumentSet docs;
  docs.documents.push_back({0, {}});
  TopicAssignments z{{{}}};
  for (double g : gradient(params, docs, manifests, {}, z)) CHECK(std::abs(g) < 1e-8);
}

TEST_CASE("gradient: relatedness bias is the sum of residuals") {
  // one active topic everywhere: theta = 1, so every psi equals (1, 1)
  const std::size_t n = 6;
  std::vector<std::vector<TopicIndex>> active(n, std::vector<TopicIndex>{0});
  ModelParams params(active, 1, 2, {GraphType::complement_also_bought});
  params.beta(0)[0] = 0.3;
  params.beta(0)[1] = -0.8;
  Corpus corpus;
  corpus.products.resize(n);
  const ManifestTable manifests(corpus);
  DocumentSet docs;
  TopicAssignments z;
  for (ProductIndex i = 0; i < n; ++i) {
    docs.documents.push_back({i, {}});
    z.z.emplace_back();
  }
  std::vector<TrainingPair> pairs;
  for (ProductIndex i = 0; i + 1 < n; ++i) pairs.push_back({i, static_cast<ProductIndex>(i + 1), 0, std::uint8_t(i % 2), Provenance::edge});
  ObjectiveOptions o;
  o.l2 = 0.0;
  o.corpus_term = false;
  const auto grad = gradient(params, docs, manifests, pairs, z, o);
  const double r = 0.3 - 0.8;
  double expect = 0.0;
  for (const auto& p : pairs) expect += p.label - 1.0 / (1.0 + std::exp(-r));
  CHECK(grad[params.beta_begin()] == doctest::Approx(expect).epsilon(1e-12));
  CHECK(grad[params.beta_begin() + 1] == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("gradient matches central finite differences") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    InstanceShape shape;
    shape.products = 10;
    shape.topics = 5;
    shape.vocab = 20;
    shape.pairs = 30;
    const auto inst = random_instance(seed, shape);
    const auto check = check_gradient(inst, {});
    INFO("seed " << seed << " worst coordinate " << check.worst);
    CHECK(check.max_relative_error < 1e-4);
  }
}

TEST_CASE("parallel objective agrees with the serial one") {
  const auto inst = random_instance(11, {});
  ObjectiveOptions serial, parallel;
  parallel.workers = 3;
  const auto a = gradient(inst.params, inst.documents, inst.manifests, inst.pairs, inst.z, serial);
  const auto b = gradient(inst.params, inst.documents, inst.manifests, inst.pairs, inst.z, parallel);
  for (std::size_t c = 0; c < a.size(); ++c) CHECK(a[c] == doctest::Approx(b[c]).epsilon(1e-9));
}

TEST_CASE("sampling: one-hot theta fixes every label") {
  ModelParams params({{0, 1, 2}}, 3, 4, {GraphType::substitute_viewed});
  auto logits = params.theta_logits(0);
  logits[0] = -800;
  logits[1] = 800;
  logits[2] = -800;
  DocumentSet docs;
  docs.documents.push_back({0, {0, 1, 2, 3, 3, 1}});
  const TopicDistributions dist(params, 1e-6);
  auto z = initial_assignments(params, docs, 1);
  sample_topic_assignments(params, dist, docs, z, 2);
  for (auto k : z.z[0]) CHECK(k == 1);
}

TEST_CASE("sampling: symmetric topics split evenly, deterministically and independently of workers") {
  ModelParams params({{0, 1}, {0, 1}}, 2, 1, {GraphType::substitute_viewed});
  DocumentSet docs;
  docs.documents.push_back({0, std::vector<TokenId>(5000, 0)});
  docs.documents.push_back({1, std::vector<TokenId>(5000, 0)});
  const TopicDistributions dist(params, 1e-6);
  auto z = initial_assignments(params, docs, 1);
  sample_topic_assignments(params, dist, docs, z, 9);
  std::size_t ones = 0;
  for (const auto& d : z.z)
    for (auto k : d) ones += k;
  CHECK(std::abs(static_cast<double>(ones) / 10000.0 - 0.5) < 0.03);
  check_assignments(params, docs, z);

  auto again = initial_assignments(params, docs, 1);
  sample_topic_assignments(params, dist, docs, again, 9);
  CHECK(again == z);
  auto threaded = initial_assignments(params, docs, 1);
  sample_topic_assignments(params, dist, docs, threaded, 9, 4);
  CHECK(threaded == z);
}

TEST_CASE("sampling frequencies follow theta times phi") {
  ModelParams params({{0, 1, 2}}, 3, 2, {GraphType::substitute_viewed});
  auto t = params.theta_logits(0);
  t[0] = 0.0;
  t[1] = 0.7;
  t[2] = -0.4;
  params.phi_logits(0)[0] = 0.2;
  params.phi_logits(1)[0] = -0.5;
  params.phi_logits(2)[0] = 1.1;
  DocumentSet docs;
  docs.documents.push_back({0, std::vector<TokenId>(10000, 0)});
  const TopicDistributions dist(params, 1e-6);
  auto z = initial_assignments(params, docs, 3);
  sample_topic_assignments(params, dist, docs, z, 4);
  std::vector<double> counts(3, 0.0), expect(3);
  for (auto k : z.z[0]) counts[k] += 1;
  double total = 0.0;
  for (TopicIndex k = 0; k < 3; ++k) total += expect[k] = dist.theta(0)[k] * dist.phi(k)[0];
  double chi = 0.0;
  for (TopicIndex k = 0; k < 3; ++k) {
    const double e = 10000.0 * expect[k] / total;
    chi += (counts[k] - e) * (counts[k] - e) / e;
  }
  CHECK(chi_square_sf(chi, 2) > 0.01);
}

TEST_CASE("assignments outside the active set are rejected") {
  ModelParams params({{1}}, 2, 2, {GraphType::substitute_viewed});
  DocumentSet docs;
  docs.documents.push_back({0, {0}});
  CHECK_THROWS_AS(check_assignments(params, docs, TopicAssignments{{{0}}}), Error);
}
