#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sceptre/corpus.hpp"
#include "sceptre/model.hpp"

namespace sceptre {

enum class Split : std::uint8_t { train = 0, validation = 1, test = 2 };
inline constexpr std::array<Split, 3> kAllSplits = {Split::train, Split::validation, Split::test};
std::string_view split_name(Split s);

struct SplitOptions {
  std::array<double, 3> ratios{0.8, 0.1, 0.1};
  std::size_t min_reviews = 1;
  std::uint64_t seed = 1;
};

struct GraphSplit {
  GraphType graph = GraphType::substitute_viewed;
  std::array<std::vector<Edge>, 3> splits;
};

struct EdgeSplit {
  std::vector<GraphSplit> graphs;   // graphs that survived filtering, enum order
  std::vector<bool> eligible;       // per product
  std::vector<std::string> warnings;
};

// Drops products with fewer than min_reviews reviews (and any product for which
// `usable` is false), then partitions each E_g uniformly at random by ratio.
// Graph types left empty are skipped with a warning.
EdgeSplit split_edges(const Corpus& corpus, const std::vector<bool>& usable, const SplitOptions& options);

struct NegativeOptions {
  double mix = 0.5;  // fraction of negatives taken from opposite-type edges
  std::uint64_t seed = 1;
};

struct Negative {
  Edge pair;
  Provenance provenance = Provenance::random;
};

// Negatives for every split of graph `graph_pos`, as many as there are positives.
// Cross-type negatives come from the opposite relation type (substitute <-> complement);
// the rest are uniform ordered pairs of eligible products. No negative is an edge
// of E_g and no pair repeats across the three splits.
std::array<std::vector<Negative>, 3> sample_non_edges(const Corpus& corpus, const EdgeSplit& split,
                                                      std::size_t graph_pos, const NegativeOptions& options,
                                                      std::vector<std::string>* warnings = nullptr);

// Labelled pairs; TrainingPair::graph indexes `graphs`.
struct PairDataset {
  std::vector<GraphType> graphs;
  std::array<std::vector<TrainingPair>, 3> splits;

  std::span<const TrainingPair> split(Split s) const { return splits[static_cast<std::size_t>(s)]; }
  std::vector<TrainingPair> pairs(Split s, std::uint32_t graph) const;
  std::optional<std::uint32_t> graph_index(GraphType g) const;
};

struct DatasetOptions {
  SplitOptions split;
  NegativeOptions negatives;
};

struct DatasetBuild {
  PairDataset dataset;
  std::vector<bool> eligible;
  std::vector<std::string> warnings;
};

// Products are usable when they have a category path and a non-empty document.
std::vector<bool> usable_products(const Corpus& corpus, const DocumentSet& documents);

DatasetBuild build_dataset(const Corpus& corpus, const DocumentSet& documents, const DatasetOptions& options);

// Lines "graph<TAB>src<TAB>dst<TAB>label<TAB>provenance" after a header line.
void write_pairs(std::ostream& out, const Corpus& corpus, const PairDataset& dataset, Split split);
void save_dataset(const std::filesystem::path& dir, const Corpus& corpus, const PairDataset& dataset);
PairDataset load_dataset(const std::filesystem::path& dir, const Corpus& corpus);

}  // namespace sceptre
