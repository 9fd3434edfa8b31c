#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sceptre {

using ProductIndex = std::uint32_t;
using NodeIndex = std::uint32_t;
using TokenId = std::uint32_t;
using TopicIndex = std::uint32_t;

enum class GraphType : std::uint8_t {
  substitute_viewed = 0,         // users who viewed x also viewed y
  substitute_bought = 1,         // users who viewed x eventually bought y
  complement_also_bought = 2,    // users who bought x also bought y
  complement_bought_together = 3 // users frequently bought x and y together
};

inline constexpr std::array<GraphType, 4> kAllGraphTypes = {
    GraphType::substitute_viewed, GraphType::substitute_bought,
    GraphType::complement_also_bought, GraphType::complement_bought_together};

std::string_view graph_name(GraphType g);
std::optional<GraphType> parse_graph_type(std::string_view name);
constexpr bool is_substitute(GraphType g) {
  return g == GraphType::substitute_viewed || g == GraphType::substitute_bought;
}

struct Product {
  std::string id;
  std::string title;
  // Each path is a list of node ids starting at the tree root.
  std::vector<std::vector<std::string>> category_paths;
  std::optional<double> price;
  std::optional<std::string> brand;
  std::optional<double> rating;
  std::vector<std::string> reviews;
  std::vector<std::string> descriptions;
  // User ids of the reviewers; only the collaborative-filtering baseline reads it.
  std::vector<std::string> reviewers;
};

struct CategoryNode {
  std::string id;
  std::string label;
  std::optional<NodeIndex> parent;
  std::vector<NodeIndex> children;
};

struct TreeRecord {
  std::string id;
  std::string parent;  // empty for the root
  std::string label;
};

class CategoryTree {
 public:
  CategoryTree() = default;
  // Throws StructureError on duplicate ids, unknown parents, several roots or cycles.
  static CategoryTree build(std::vector<TreeRecord> records);

  bool empty() const noexcept { return nodes_.empty(); }
  std::size_t size() const noexcept { return nodes_.size(); }
  NodeIndex root() const noexcept { return root_; }
  const CategoryNode& node(NodeIndex n) const { return nodes_.at(n); }
  std::optional<NodeIndex> find(std::string_view id) const;

  // Root first.
  std::vector<NodeIndex> path_from_root(NodeIndex n) const;
  bool is_ancestor(NodeIndex ancestor, NodeIndex n) const;
  std::size_t depth(NodeIndex n) const;
  // The node, its parent, its children and its siblings.
  std::vector<NodeIndex> immediate_family(NodeIndex n) const;

 private:
  std::vector<CategoryNode> nodes_;
  std::unordered_map<std::string, NodeIndex> index_;
  NodeIndex root_ = 0;
};

struct Edge {
  ProductIndex src = 0;
  ProductIndex dst = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct EdgeSet {
  GraphType graph = GraphType::substitute_viewed;
  std::vector<Edge> edges;
};

struct IngestStats {
  std::size_t products = 0;
  std::size_t nodes = 0;
  std::array<std::size_t, 4> edges_kept{};
  std::array<std::size_t, 4> dropped_unknown{};
  std::array<std::size_t, 4> dropped_self_loops{};
  std::array<std::size_t, 4> dropped_duplicates{};

  std::size_t total_dropped() const;
};

// Immutable after ingest; safe to share read-only between workers.
class Corpus {
 public:
  std::vector<Product> products;
  CategoryTree tree;
  std::vector<EdgeSet> edge_sets;  // one per supplied graph type, in enum order
  IngestStats stats;
  // Union of all nodes on the product's category paths, sorted.
  std::vector<std::vector<NodeIndex>> product_nodes;
  // Path end points that are not ancestors of another end point, sorted.
  std::vector<std::vector<NodeIndex>> product_deepest;

  std::size_t size() const noexcept { return products.size(); }
  std::optional<ProductIndex> find(std::string_view id) const;
  const EdgeSet* edges(GraphType g) const;

  // Recomputes the id index and the derived node sets. Called by ingest.
  void index();

 private:
  std::unordered_map<std::string, ProductIndex> by_id_;
};

struct EdgeStream {
  GraphType graph;
  std::istream* in;
  std::string name;
};

// Products: one JSON object per line. Tree: "node_id<TAB>parent_id<TAB>label".
// Edges: "src_id<TAB>dst_id". Edges naming unknown products, self loops and
// repeated pairs are dropped and counted in Corpus::stats.
Corpus ingest(std::istream& products, std::istream& tree, std::span<const EdgeStream> edges);

// Reads <dir>/products.jsonl, <dir>/tree.tsv and <dir>/edges/<graph>.tsv for
// every graph type whose file exists.
Corpus load_corpus(const std::filesystem::path& dir);

// Writes the layout load_corpus reads; edge files only for graphs present.
void save_corpus(const std::filesystem::path& dir, const Corpus& corpus);

// Canonical JSON-lines rendering; identical inputs give identical bytes.
std::string serialize_corpus(const Corpus& corpus);

struct TextSources {
  bool reviews = true;
  bool descriptions = true;
};

struct TokenizerOptions {
  bool bigrams = false;  // also emit "a_b" for adjacent tokens
};

// Lowercases and splits on anything that is not an ASCII letter or digit.
// Bytes >= 0x80 are kept inside tokens so UTF-8 words stay intact.
std::vector<std::string> tokenize(std::string_view text, const TokenizerOptions& options = {});

// Texts of the selected sources, reviews before descriptions, input order.
std::vector<std::string_view> product_texts(const Product& p, const TextSources& sources);

class Vocabulary {
 public:
  struct Entry {
    std::string token;
    std::uint64_t frequency = 0;
    std::uint64_t document_frequency = 0;
  };

  Vocabulary() = default;
  // Entries must already be in id order with unique tokens.
  explicit Vocabulary(std::vector<Entry> entries);

  std::size_t size() const noexcept { return entries_.size(); }
  std::optional<TokenId> id(std::string_view token) const;
  const std::string& token(TokenId id) const { return entries_.at(id).token; }
  const Entry& entry(TokenId id) const { return entries_.at(id); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, TokenId> ids_;
};

struct VocabularyOptions {
  std::uint64_t min_count = 1;
  std::size_t max_size = 100000;
  TextSources sources;
  TokenizerOptions tokenizer;
};

// Ids by descending corpus frequency, ties lexicographic.
Vocabulary build_vocabulary(const Corpus& corpus, const VocabularyOptions& options);

struct Document {
  ProductIndex product = 0;
  std::vector<TokenId> tokens;
  std::size_t length() const noexcept { return tokens.size(); }
};

struct DocumentSet {
  std::vector<Document> documents;       // index-aligned with Corpus::products
  std::vector<ProductIndex> empty;       // products with no in-vocabulary token
  std::size_t total_tokens() const;
  bool is_empty(ProductIndex p) const { return documents.at(p).tokens.empty(); }
};

std::vector<TokenId> encode(std::string_view text, const Vocabulary& vocabulary,
                            const TokenizerOptions& options = {});

DocumentSet build_documents(const Corpus& corpus, const Vocabulary& vocabulary,
                            const TextSources& sources, const TokenizerOptions& options = {});

}  // namespace sceptre
