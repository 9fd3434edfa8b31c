#pragma once

#include <cstddef>
#include <vector>

#include "sceptre/corpus.hpp"

namespace sceptre {

struct AllocationOptions {
  std::size_t threshold = 1000;   // one extra topic per this many products at a node
  std::size_t max_per_node = 8;
};

// Maps category nodes to disjoint, contiguous ranges of global topic indices.
// Node n owns [first[n], first[n] + count[n]); the ranges partition [0, K).
class TopicAllocation {
 public:
  TopicAllocation() = default;
  TopicAllocation(std::vector<std::size_t> counts);

  std::size_t num_topics() const noexcept { return num_topics_; }
  std::size_t num_nodes() const noexcept { return counts_.size(); }
  std::size_t topic_count(NodeIndex n) const { return counts_.at(n); }
  std::size_t first_topic(NodeIndex n) const { return first_.at(n); }
  std::vector<TopicIndex> topics(NodeIndex n) const;
  // Node owning topic k.
  NodeIndex owner(TopicIndex k) const { return owner_.at(k); }

  // Union of topics over the given nodes, sorted.
  std::vector<TopicIndex> active_set(const std::vector<NodeIndex>& nodes) const;

 private:
  std::vector<std::size_t> counts_;
  std::vector<std::size_t> first_;
  std::vector<NodeIndex> owner_;
  std::size_t num_topics_ = 0;
};

// count(n) = number of products whose path set contains n; each such node gets
// min(1 + count(n) / threshold, max_per_node) topics, unused nodes get none.
TopicAllocation allocate_topics(const CategoryTree& tree, const Corpus& corpus,
                                const AllocationOptions& options);

// A single node owning all K topics: the unstructured (flat) topic model.
TopicAllocation flat_allocation(std::size_t num_topics);

// Throws StructureError when the product has no category path.
std::vector<TopicIndex> active_topic_set(const Corpus& corpus, ProductIndex product,
                                         const TopicAllocation& allocation);

// Active sets for every product; products without a path get an empty set.
std::vector<std::vector<TopicIndex>> active_topic_sets(const Corpus& corpus,
                                                       const TopicAllocation& allocation);

}  // namespace sceptre
