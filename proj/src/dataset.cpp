#include "sceptre/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "sceptre/errors.hpp"
#include "sceptre/random.hpp"

namespace sceptre {

namespace {

constexpr std::array<std::string_view, 3> kSplitNames = {"train", "validation", "test"};

std::uint64_t edge_key(const Edge& e) { return (std::uint64_t{e.src} << 32) | e.dst; }

std::unordered_set<std::uint64_t> edge_keys(const EdgeSet* set) {
  std::unordered_set<std::uint64_t> keys;
  if (!set) return keys;
  keys.reserve(set->edges.size() * 2);
  for (const auto& e : set->edges) keys.insert(edge_key(e));
  return keys;
}

std::string dataset_file(Split s) { return "dataset_" + std::string(split_name(s)) + ".tsv"; }

}  // namespace

std::string_view split_name(Split s) { return kSplitNames.at(static_cast<std::size_t>(s)); }

EdgeSplit split_edges(const Corpus& corpus, const std::vector<bool>& usable, const SplitOptions& options) {
  for (double r : options.ratios)
    if (r < 0.0 || !std::isfinite(r)) throw Error("split ratios must be non-negative");
  const double sum = options.ratios[0] + options.ratios[1] + options.ratios[2];
  if (std::abs(sum - 1.0) > 1e-9) throw Error("split ratios must sum to 1");

  EdgeSplit out;
  out.eligible.assign(corpus.size(), false);
  for (std::size_t i = 0; i < corpus.size(); ++i)
    out.eligible[i] = (usable.empty() || usable.at(i)) &&
                      corpus.products[i].reviews.size() >= options.min_reviews;

  for (const auto& set : corpus.edge_sets) {
    std::vector<Edge> kept;
    for (const auto& e : set.edges)
      if (out.eligible[e.src] && out.eligible[e.dst]) kept.push_back(e);
    if (kept.empty()) {
      out.warnings.push_back("graph " + std::string(graph_name(set.graph)) +
                             " has no edges after filtering; skipped");
      continue;
    }
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(set.graph)));
    shuffle(std::span<Edge>(kept), rng);
    const std::size_t n = kept.size();
    const auto n_train = std::min<std::size_t>(n, std::llround(static_cast<double>(n) * options.ratios[0]));
    const auto n_val =
        std::min<std::size_t>(n - n_train, std::llround(static_cast<double>(n) * options.ratios[1]));
    GraphSplit g;
    g.graph = set.graph;
    g.splits[0].assign(kept.begin(), kept.begin() + n_train);
    g.splits[1].assign(kept.begin() + n_train, kept.begin() + n_train + n_val);
    g.splits[2].assign(kept.begin() + n_train + n_val, kept.end());
    out.graphs.push_back(std::move(g));
  }
  return out;
}

std::array<std::vector<Negative>, 3> sample_non_edges(const Corpus& corpus, const EdgeSplit& split,
                                                      std::size_t graph_pos, const NegativeOptions& options,
                                                      std::vector<std::string>* warnings) {
  if (options.mix < 0.0 || options.mix > 1.0) throw Error("negative mix must lie in [0, 1]");
  const auto& gs = split.graphs.at(graph_pos);
  const auto positives = edge_keys(corpus.edges(gs.graph));
  auto warn = [&](std::string msg) {
    if (warnings) warnings->push_back(std::move(msg));
  };

  // opposite-type pool, deduplicated, in a seed-determined order
  std::set<Edge> pool_set;
  for (const auto& set : corpus.edge_sets) {
    if (is_substitute(set.graph) == is_substitute(gs.graph)) continue;
    for (const auto& e : set.edges)
      if (split.eligible[e.src] && split.eligible[e.dst] && !positives.contains(edge_key(e)))
        pool_set.insert(e);
  }
  std::vector<Edge> pool(pool_set.begin(), pool_set.end());
  Rng pool_rng(derive_seed(options.seed, static_cast<std::uint64_t>(gs.graph), 1));
  shuffle(std::span<Edge>(pool), pool_rng);

  std::vector<ProductIndex> eligible;
  for (std::size_t i = 0; i < split.eligible.size(); ++i)
    if (split.eligible[i]) eligible.push_back(static_cast<ProductIndex>(i));
  Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(gs.graph), 2));

  std::unordered_set<std::uint64_t> used;
  std::size_t next_pool = 0;
  std::array<std::vector<Negative>, 3> out;
  for (std::size_t s = 0; s < 3; ++s) {
    const std::size_t wanted = gs.splits[s].size();
    const auto n_cross = static_cast<std::size_t>(std::llround(options.mix * static_cast<double>(wanted)));
    auto& negs = out[s];
    while (negs.size() < n_cross && next_pool < pool.size()) {
      const auto e = pool[next_pool++];
      if (used.insert(edge_key(e)).second) negs.push_back({e, Provenance::cross_type});
    }
    if (negs.size() < n_cross)
      warn("graph " + std::string(graph_name(gs.graph)) + ", split " + std::string(kSplitNames[s]) +
           ": only " + std::to_string(negs.size()) + " of " + std::to_string(n_cross) +
           " cross-type negatives available; backfilling with random pairs");
    std::size_t attempts = 0;
    const std::size_t max_attempts = 1000 * (wanted + 1);
    while (negs.size() < wanted && eligible.size() > 1 && attempts < max_attempts) {
      ++attempts;
      const auto a = eligible[uniform_index(rng, eligible.size())];
      const auto b = eligible[uniform_index(rng, eligible.size())];
      if (a == b) continue;
      const Edge e{a, b};
      const auto key = edge_key(e);
      if (positives.contains(key) || used.contains(key)) continue;
      used.insert(key);
      negs.push_back({e, Provenance::random});
    }
    if (negs.size() < wanted)
      warn("graph " + std::string(graph_name(gs.graph)) + ", split " + std::string(kSplitNames[s]) +
           ": could only sample " + std::to_string(negs.size()) + " of " + std::to_string(wanted) +
           " negatives");
  }
  return out;
}

std::vector<TrainingPair> PairDataset::pairs(Split s, std::uint32_t graph) const {
  std::vector<TrainingPair> out;
  for (const auto& p : split(s))
    if (p.graph == graph) out.push_back(p);
  return out;
}

std::optional<std::uint32_t> PairDataset::graph_index(GraphType g) const {
  for (std::size_t i = 0; i < graphs.size(); ++i)
    if (graphs[i] == g) return static_cast<std::uint32_t>(i);
  return std::nullopt;
}

std::vector<bool> usable_products(const Corpus& corpus, const DocumentSet& documents) {
  std::vector<bool> usable(corpus.size(), false);
  for (std::size_t i = 0; i < corpus.size(); ++i)
    usable[i] = !corpus.product_nodes[i].empty() && i < documents.documents.size() &&
                !documents.documents[i].tokens.empty();
  return usable;
}

DatasetBuild build_dataset(const Corpus& corpus, const DocumentSet& documents, const DatasetOptions& options) {
  DatasetBuild build;
  auto split = split_edges(corpus, usable_products(corpus, documents), options.split);
  build.warnings = split.warnings;
  for (std::size_t pos = 0; pos < split.graphs.size(); ++pos) {
    const auto g = static_cast<std::uint32_t>(pos);
    build.dataset.graphs.push_back(split.graphs[pos].graph);
    const auto negatives = sample_non_edges(corpus, split, pos, options.negatives, &build.warnings);
    for (std::size_t s = 0; s < 3; ++s) {
      auto& out = build.dataset.splits[s];
      for (const auto& e : split.graphs[pos].splits[s]) out.push_back({e.src, e.dst, g, 1, Provenance::edge});
      for (const auto& n : negatives[s]) out.push_back({n.pair.src, n.pair.dst, g, 0, n.provenance});
    }
  }
  build.eligible = std::move(split.eligible);
  return build;
}

void write_pairs(std::ostream& out, const Corpus& corpus, const PairDataset& dataset, Split split) {
  out << "graph\tsrc\tdst\tlabel\tprovenance\n";
  for (const auto& p : dataset.split(split))
    out << graph_name(dataset.graphs.at(p.graph)) << '\t' << corpus.products[p.i].id << '\t'
        << corpus.products[p.j].id << '\t' << int{p.label} << '\t' << provenance_name(p.provenance) << '\n';
}

void save_dataset(const std::filesystem::path& dir, const Corpus& corpus, const PairDataset& dataset) {
  std::filesystem::create_directories(dir);
  for (auto s : kAllSplits) {
    std::ofstream out(dir / dataset_file(s));
    if (!out) throw Error("cannot write " + (dir / dataset_file(s)).string());
    write_pairs(out, corpus, dataset, s);
  }
}

PairDataset load_dataset(const std::filesystem::path& dir, const Corpus& corpus) {
  struct Row {
    GraphType graph;
    TrainingPair pair;
  };
  std::array<std::vector<Row>, 3> rows;
  std::set<GraphType> graphs;
  for (auto s : kAllSplits) {
    const auto path = dir / dataset_file(s);
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (lineno == 1 || line.empty()) continue;
      std::istringstream fields(line);
      std::string g, a, b, label, prov;
      if (!std::getline(fields, g, '\t') || !std::getline(fields, a, '\t') ||
          !std::getline(fields, b, '\t') || !std::getline(fields, label, '\t') ||
          !std::getline(fields, prov, '\t'))
        throw ParseError(path.string(), lineno, "expected 5 tab-separated fields");
      const auto graph = parse_graph_type(g);
      const auto i = corpus.find(a);
      const auto j = corpus.find(b);
      const auto provenance = parse_provenance(prov);
      if (!graph || !i || !j || !provenance || (label != "0" && label != "1"))
        throw ParseError(path.string(), lineno, "unknown graph, product, label or provenance");
      graphs.insert(*graph);
      rows[static_cast<std::size_t>(s)].push_back(
          {*graph, TrainingPair{*i, *j, 0, static_cast<std::uint8_t>(label == "1"), *provenance}});
    }
  }
  PairDataset dataset;
  dataset.graphs.assign(graphs.begin(), graphs.end());
  for (std::size_t s = 0; s < 3; ++s)
    for (auto& r : rows[s]) {
      r.pair.graph = *dataset.graph_index(r.graph);
      dataset.splits[s].push_back(r.pair);
    }
  return dataset;
}

}  // namespace sceptre
