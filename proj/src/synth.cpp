#include "sceptre/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

#include "sceptre/errors.hpp"
#include "sceptre/random.hpp"

namespace sceptre {

namespace {

std::vector<double> zipf(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t r = 0; r < n; ++r) w[r] = 1.0 / static_cast<double>(r + 1);
  return w;
}

std::string padded(std::size_t v, int width) {
  auto s = std::to_string(v);
  if (static_cast<int>(s.size()) < width) s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
  return s;
}

double round_cents(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

SynthCorpus synthesize(const SynthOptions& o) {
  if (o.products == 0 || o.groups == 0 || o.leaves_per_group == 0 || o.topics_per_leaf == 0)
    throw Error("synthetic corpus needs products, groups, leaves and topics");
  if (o.min_tokens == 0 || o.max_tokens < o.min_tokens) throw Error("bad token length range");
  if (o.topic_share + o.leaf_share + o.group_share > 1.0) throw Error("token shares exceed 1");
  if (o.complement_share < 0.0 || o.complement_share > 1.0) throw Error("complement share must lie in [0, 1]");

  const std::size_t L = o.groups * o.leaves_per_group;
  const std::size_t T = L * o.topics_per_leaf;
  SynthCorpus out;
  auto& corpus = out.corpus;

  std::vector<TreeRecord> records{{"root", "", "All products"}};
  std::vector<std::string> leaf_ids(L);
  for (std::size_t g = 0; g < o.groups; ++g) {
    const auto gid = "g" + padded(g, 2);
    records.push_back({gid, "root", "Group " + std::to_string(g)});
    for (std::size_t l = 0; l < o.leaves_per_group; ++l) {
      const auto lid = gid + "l" + padded(l, 2);
      leaf_ids[g * o.leaves_per_group + l] = lid;
      records.push_back({lid, gid, "Leaf " + std::to_string(g) + "." + std::to_string(l)});
    }
  }
  corpus.tree = CategoryTree::build(records);

  // vocabularies
  out.planted_words.resize(T);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t w = 0; w < o.topic_words; ++w) out.planted_words[t].push_back("t" + padded(t, 3) + "w" + padded(w, 2));
  std::vector<std::vector<std::string>> leaf_words(L), group_words(o.groups);
  for (std::size_t l = 0; l < L; ++l)
    for (std::size_t w = 0; w < o.leaf_words; ++w) leaf_words[l].push_back("c" + padded(l, 3) + "w" + padded(w, 2));
  for (std::size_t g = 0; g < o.groups; ++g)
    for (std::size_t w = 0; w < o.group_words; ++w) group_words[g].push_back("g" + padded(g, 2) + "w" + padded(w, 2));
  std::vector<std::string> background;
  for (std::size_t w = 0; w < o.background_words; ++w) background.push_back("b" + padded(w, 3));
  const auto topic_weights = zipf(o.topic_words);
  const auto leaf_weights = zipf(o.leaf_words);
  const auto group_weights = zipf(o.group_words);
  const auto background_weights = zipf(o.background_words);

  // per-topic base prices; targets (odd slot of a pair) are pricier
  Rng price_rng(derive_seed(o.seed, 1));
  std::vector<double> base_price(T);
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t slot = t % o.topics_per_leaf;
    const bool target = slot % 2 == 1;
    if (!target) {
      base_price[t] = 10.0 + 20.0 * uniform01(price_rng);
      if (t + 1 < T && (t + 1) % o.topics_per_leaf != 0) base_price[t + 1] = base_price[t] * o.price_ratio;
    }
  }

  // products
  Rng rng(derive_seed(o.seed, 2));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<ProductIndex>> by_topic(T);
  out.planted_topic.resize(o.products);
  out.leaf.resize(o.products);
  std::vector<double> mix(o.topics_per_leaf);
  for (std::size_t n = 0; n < o.products; ++n) {
    const std::size_t leaf = n % L;
    const std::size_t slot = (n / L) % o.topics_per_leaf;
    const std::size_t topic = leaf * o.topics_per_leaf + slot;
    const std::size_t group = leaf / o.leaves_per_group;
    out.planted_topic[n] = static_cast<std::uint32_t>(topic);
    out.leaf[n] = static_cast<std::uint32_t>(leaf);
    by_topic[topic].push_back(static_cast<ProductIndex>(n));

    for (std::size_t s = 0; s < o.topics_per_leaf; ++s)
      mix[s] = o.topics_per_leaf == 1 ? 1.0
               : s == slot            ? o.peak
                                      : (1.0 - o.peak) / static_cast<double>(o.topics_per_leaf - 1);

    Product p;
    p.id = "p" + padded(n, 5);
    p.title = "Product " + std::to_string(n);
    p.category_paths = {{"root", "g" + padded(group, 2), leaf_ids[leaf]}};
    p.price = round_cents(base_price[topic] * std::exp(o.price_noise * normal(rng)));
    p.rating = round_cents(1.0 + 4.0 * uniform01(rng));
    p.brand = "brand" + padded(uniform_index(rng, std::max<std::size_t>(o.brands, 1)), 2);

    const std::size_t length = o.min_tokens + uniform_index(rng, o.max_tokens - o.min_tokens + 1);
    std::vector<std::string> words;
    words.reserve(length);
    for (std::size_t w = 0; w < length; ++w) {
      const double u = uniform01(rng);
      if (u < o.topic_share) {
        const auto s = sample_discrete(mix, rng);
        words.push_back(out.planted_words[leaf * o.topics_per_leaf + s][sample_discrete(topic_weights, rng)]);
      } else if (u < o.topic_share + o.leaf_share) {
        words.push_back(leaf_words[leaf][sample_discrete(leaf_weights, rng)]);
      } else if (u < o.topic_share + o.leaf_share + o.group_share) {
        words.push_back(group_words[group][sample_discrete(group_weights, rng)]);
      } else {
        words.push_back(background[sample_discrete(background_weights, rng)]);
      }
    }
    // reviews of sentences of 5 to 10 words
    const std::size_t reviews = 1 + uniform_index(rng, 6);
    std::vector<std::string> texts(std::min(reviews, words.size()));
    std::size_t pos = 0;
    for (std::size_t r = 0; r < texts.size(); ++r) {
      const std::size_t end = r + 1 == texts.size() ? words.size() : pos + words.size() / texts.size();
      while (pos < end) {
        const std::size_t len = std::min(end - pos, 5 + uniform_index(rng, 6));
        std::string sentence;
        for (std::size_t k = 0; k < len; ++k) {
          if (k) sentence += ' ';
          sentence += words[pos + k];
        }
        pos += len;
        if (!texts[r].empty()) texts[r] += ' ';
        texts[r] += sentence + '.';
      }
    }
    p.reviews = std::move(texts);
    corpus.products.push_back(std::move(p));
  }

  // reviewers: a topic pool plus a shared background pool
  Rng user_rng(derive_seed(o.seed, 3));
  for (std::size_t n = 0; n < o.products; ++n) {
    auto& p = corpus.products[n];
    std::set<std::string> users;
    std::size_t guard = 0;
    while (users.size() < p.reviews.size() && guard++ < 1000) {
      if (uniform01(user_rng) < o.topic_user_share && o.users_per_topic > 0) {
        users.insert("u" + padded(out.planted_topic[n], 3) + "x" +
                     padded(uniform_index(user_rng, o.users_per_topic), 3));
      } else if (o.background_users > 0) {
        users.insert("v" + padded(uniform_index(user_rng, o.background_users), 4));
      }
    }
    p.reviewers.assign(users.begin(), users.end());
  }

  // edges
  const auto n_complement =
      static_cast<std::size_t>(std::llround(o.complement_share * static_cast<double>(o.edges)));
  const std::size_t n_substitute = o.edges - n_complement;
  std::set<Edge> used_pairs;  // unordered, stored as (min, max)
  const auto take = [&](ProductIndex a, ProductIndex b) {
    return used_pairs.insert(Edge{std::min(a, b), std::max(a, b)}).second;
  };

  EdgeSet substitutes{GraphType::substitute_viewed, {}};
  Rng sub_rng(derive_seed(o.seed, 4));
  for (std::size_t attempts = 0; substitutes.edges.size() < n_substitute && attempts < 100 * (o.edges + 1);
       ++attempts) {
    const auto i = static_cast<ProductIndex>(uniform_index(sub_rng, o.products));
    const auto& peers = by_topic[out.planted_topic[i]];
    if (peers.size() < 2) continue;
    const auto j = peers[uniform_index(sub_rng, peers.size())];
    if (i == j || !take(i, j)) continue;
    const auto& pi = corpus.products[i];
    const auto& pj = corpus.products[j];
    substitutes.edges.push_back(*pi.rating <= *pj.rating ? Edge{i, j} : Edge{j, i});
  }

  std::vector<std::size_t> sources;
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t slot = t % o.topics_per_leaf;
    if (slot % 2 == 0 && slot + 1 < o.topics_per_leaf) sources.push_back(t);
  }
  EdgeSet complements{GraphType::complement_also_bought, {}};
  Rng comp_rng(derive_seed(o.seed, 5));
  for (std::size_t attempts = 0;
       !sources.empty() && complements.edges.size() < n_complement && attempts < 100 * (o.edges + 1);
       ++attempts) {
    const auto source = sources[uniform_index(comp_rng, sources.size())];
    std::size_t target = source + 1;
    if (o.leaves_per_group > 1 && uniform01(comp_rng) < o.cross_leaf_complements) {
      const std::size_t leaf = source / o.topics_per_leaf;
      const std::size_t group = leaf / o.leaves_per_group;
      const std::size_t sibling = group * o.leaves_per_group + (leaf % o.leaves_per_group + 1) % o.leaves_per_group;
      target = sibling * o.topics_per_leaf + (source % o.topics_per_leaf) + 1;
    }
    const auto& a = by_topic[source];
    const auto& b = by_topic[target];
    if (a.empty() || b.empty()) continue;
    const auto i = a[uniform_index(comp_rng, a.size())];
    const auto j = b[uniform_index(comp_rng, b.size())];
    if (!take(i, j)) continue;
    complements.edges.push_back(*corpus.products[i].price <= *corpus.products[j].price ? Edge{i, j} : Edge{j, i});
  }

  corpus.edge_sets.push_back(std::move(substitutes));
  corpus.edge_sets.push_back(std::move(complements));
  std::sort(corpus.edge_sets.begin(), corpus.edge_sets.end(),
            [](const EdgeSet& x, const EdgeSet& y) { return x.graph < y.graph; });
  corpus.stats.products = corpus.products.size();
  corpus.stats.nodes = corpus.tree.size();
  for (const auto& set : corpus.edge_sets) corpus.stats.edges_kept[static_cast<std::size_t>(set.graph)] = set.edges.size();
  corpus.index();
  return out;
}

}  // namespace sceptre
