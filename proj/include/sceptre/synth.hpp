#pragma once

#include <cstdint>
#include <vector>

#include "sceptre/corpus.hpp"

namespace sceptre {

// Planted-structure corpus: root -> groups -> leaves, each leaf owning
// `topics_per_leaf` planted topics. Topics pair up inside a leaf as
// (source, target); complement edges run source -> target products, oriented
// cheaper -> pricier, and targets are pricier on average. Substitute edges join
// products of the same planted topic, oriented lower -> higher rating.
struct SynthOptions {
  std::size_t products = 2000;
  std::size_t groups = 4;
  std::size_t leaves_per_group = 4;
  std::size_t topics_per_leaf = 2;
  std::size_t edges = 20000;             // over both graphs
  double complement_share = 0.5;
  double cross_leaf_complements = 0.0;   // share of complements whose target sits in a sibling leaf
  std::size_t topic_words = 30;
  std::size_t leaf_words = 15;
  std::size_t group_words = 15;
  std::size_t background_words = 300;
  std::size_t min_tokens = 100;
  std::size_t max_tokens = 200;
  double topic_share = 0.4;   // token shares; the rest is background
  double leaf_share = 0.3;
  double group_share = 0.1;
  double peak = 0.95;         // own-topic mass among the leaf's planted topics
  double price_ratio = 2.0;   // target over source base price
  double price_noise = 0.25;  // log-normal sigma
  std::size_t brands = 20;
  std::size_t users_per_topic = 40;
  std::size_t background_users = 600;
  double topic_user_share = 0.6;
  std::uint64_t seed = 1;
};

struct SynthCorpus {
  Corpus corpus;
  std::vector<std::uint32_t> planted_topic;  // per product
  std::vector<std::uint32_t> leaf;           // per product, leaf ordinal
  std::vector<std::vector<std::string>> planted_words;  // per planted topic, most frequent first
};

SynthCorpus synthesize(const SynthOptions& options);

}  // namespace sceptre
