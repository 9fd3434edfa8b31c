#include "sceptre/hierarchy.hpp"

#include <algorithm>

#include "sceptre/errors.hpp"

namespace sceptre {

TopicAllocation::TopicAllocation(std::vector<std::size_t> counts) : counts_(std::move(counts)) {
  first_.resize(counts_.size());
  for (std::size_t n = 0; n < counts_.size(); ++n) {
    first_[n] = num_topics_;
    num_topics_ += counts_[n];
    owner_.insert(owner_.end(), counts_[n], static_cast<NodeIndex>(n));
  }
}

std::vector<TopicIndex> TopicAllocation::topics(NodeIndex n) const {
  std::vector<TopicIndex> out(counts_.at(n));
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = static_cast<TopicIndex>(first_[n] + t);
  return out;
}

std::vector<TopicIndex> TopicAllocation::active_set(const std::vector<NodeIndex>& nodes) const {
  std::vector<TopicIndex> out;
  for (auto n : nodes) {
    if (n >= counts_.size()) continue;
    for (std::size_t t = 0; t < counts_[n]; ++t) out.push_back(static_cast<TopicIndex>(first_[n] + t));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

TopicAllocation allocate_topics(const CategoryTree& tree, const Corpus& corpus,
                                const AllocationOptions& options) {
  const std::size_t threshold = std::max<std::size_t>(1, options.threshold);
  const std::size_t cap = std::max<std::size_t>(1, options.max_per_node);
  std::vector<std::size_t> occupancy(tree.size(), 0);
  for (const auto& nodes : corpus.product_nodes)
    for (auto n : nodes)
      if (n < occupancy.size()) ++occupancy[n];
  std::vector<std::size_t> counts(tree.size(), 0);
  for (std::size_t n = 0; n < tree.size(); ++n)
    if (occupancy[n] > 0) counts[n] = std::min(1 + occupancy[n] / threshold, cap);
  return TopicAllocation(std::move(counts));
}

TopicAllocation flat_allocation(std::size_t num_topics) {
  return TopicAllocation(std::vector<std::size_t>{num_topics});
}

std::vector<TopicIndex> active_topic_set(const Corpus& corpus, ProductIndex product,
                                         const TopicAllocation& allocation) {
  const auto& nodes = corpus.product_nodes.at(product);
  if (nodes.empty())
    throw StructureError("product '" + corpus.products[product].id + "' has no category path");
  return allocation.active_set(nodes);
}

std::vector<std::vector<TopicIndex>> active_topic_sets(const Corpus& corpus,
                                                       const TopicAllocation& allocation) {
  std::vector<std::vector<TopicIndex>> sets(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i)
    sets[i] = allocation.active_set(corpus.product_nodes[i]);
  return sets;
}

}  // namespace sceptre
