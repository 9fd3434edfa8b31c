#include "sceptre/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sceptre/errors.hpp"

namespace sceptre {

using json = nlohmann::json;

namespace {

constexpr std::array<std::string_view, 4> kGraphNames = {
    "substitute_viewed", "substitute_bought", "complement_also_bought",
    "complement_bought_together"};

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::vector<std::string> string_list(const json& obj, const char* key, const std::string& src,
                                     std::size_t line) {
  std::vector<std::string> out;
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return out;
  if (!it->is_array()) throw ParseError(src, line, std::string("field '") + key + "' must be a list");
  for (const auto& v : *it) {
    if (!v.is_string())
      throw ParseError(src, line, std::string("field '") + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::optional<double> optional_number(const json& obj, const char* key, const std::string& src,
                                      std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number())
    throw ParseError(src, line, std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

Product parse_product(std::string_view text, const std::string& src, std::size_t line) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(src, line, std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw ParseError(src, line, "record must be a JSON object");

  Product p;
  const auto id = obj.find("id");
  if (id == obj.end() || !id->is_string() || id->get<std::string>().empty())
    throw ParseError(src, line, "missing string field 'id'");
  p.id = id->get<std::string>();
  if (const auto t = obj.find("title"); t != obj.end() && !t->is_null()) {
    if (!t->is_string()) throw ParseError(src, line, "field 'title' must be a string");
    p.title = t->get<std::string>();
  }
  if (const auto c = obj.find("categories"); c != obj.end() && !c->is_null()) {
    if (!c->is_array()) throw ParseError(src, line, "field 'categories' must be a list of paths");
    for (const auto& path : *c) {
      if (!path.is_array() || path.empty())
        throw ParseError(src, line, "each category path must be a non-empty list");
      std::vector<std::string> nodes;
      for (const auto& n : path) {
        if (!n.is_string()) throw ParseError(src, line, "category path entries must be strings");
        nodes.push_back(n.get<std::string>());
      }
      p.category_paths.push_back(std::move(nodes));
    }
  }
  p.price = optional_number(obj, "price", src, line);
  if (p.price && *p.price < 0.0) throw ParseError(src, line, "price must be non-negative");
  p.rating = optional_number(obj, "rating", src, line);
  if (p.rating && (*p.rating < 0.0 || *p.rating > 5.0))
    throw ParseError(src, line, "rating must lie in [0, 5]");
  if (const auto b = obj.find("brand"); b != obj.end() && !b->is_null()) {
    if (!b->is_string()) throw ParseError(src, line, "field 'brand' must be a string");
    p.brand = b->get<std::string>();
  }
  p.reviews = string_list(obj, "reviews", src, line);
  p.descriptions = string_list(obj, "descriptions", src, line);
  p.reviewers = string_list(obj, "reviewers", src, line);
  return p;
}

json product_json(const Product& p) {
  json obj;
  obj["id"] = p.id;
  obj["title"] = p.title;
  obj["categories"] = p.category_paths;
  obj["price"] = p.price ? json(*p.price) : json(nullptr);
  obj["brand"] = p.brand ? json(*p.brand) : json(nullptr);
  obj["rating"] = p.rating ? json(*p.rating) : json(nullptr);
  obj["reviews"] = p.reviews;
  obj["descriptions"] = p.descriptions;
  obj["reviewers"] = p.reviewers;
  return obj;
}

}  // namespace

std::string_view graph_name(GraphType g) { return kGraphNames.at(static_cast<std::size_t>(g)); }

std::optional<GraphType> parse_graph_type(std::string_view name) {
  for (std::size_t i = 0; i < kGraphNames.size(); ++i)
    if (kGraphNames[i] == name) return static_cast<GraphType>(i);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// CategoryTree

CategoryTree CategoryTree::build(std::vector<TreeRecord> records) {
  CategoryTree tree;
  if (records.empty()) return tree;
  tree.nodes_.reserve(records.size());
  for (auto& r : records) {
    if (r.id.empty()) throw StructureError("category node with empty id");
    const auto idx = static_cast<NodeIndex>(tree.nodes_.size());
    if (!tree.index_.emplace(r.id, idx).second)
      throw StructureError("duplicate category node '" + r.id + "'");
    tree.nodes_.push_back(CategoryNode{r.id, std::move(r.label), std::nullopt, {}});
  }
  std::optional<NodeIndex> root;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& parent = records[i].parent;
    if (parent.empty()) {
      if (root)
        throw StructureError("category tree has more than one root ('" + tree.nodes_[*root].id +
                             "', '" + tree.nodes_[i].id + "')");
      root = static_cast<NodeIndex>(i);
      continue;
    }
    const auto p = tree.find(parent);
    if (!p)
      throw StructureError("node '" + tree.nodes_[i].id + "' has unknown parent '" + parent + "'");
    tree.nodes_[i].parent = *p;
    tree.nodes_[*p].children.push_back(static_cast<NodeIndex>(i));
  }
  if (!root) throw StructureError("category tree has no root (cycle)");
  tree.root_ = *root;

  // Every node must reach the root; anything unreachable sits on a cycle.
  std::vector<bool> seen(tree.nodes_.size(), false);
  std::vector<NodeIndex> stack{tree.root_};
  std::size_t reached = 0;
  while (!stack.empty()) {
    const auto n = stack.back();
    stack.pop_back();
    if (seen[n]) continue;
    seen[n] = true;
    ++reached;
    for (auto c : tree.nodes_[n].children) stack.push_back(c);
  }
  if (reached != tree.nodes_.size()) {
    for (std::size_t i = 0; i < seen.size(); ++i)
      if (!seen[i]) throw StructureError("category tree has a cycle through '" + tree.nodes_[i].id + "'");
  }
  return tree;
}

std::optional<NodeIndex> CategoryTree::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<NodeIndex> CategoryTree::path_from_root(NodeIndex n) const {
  std::vector<NodeIndex> path{n};
  while (nodes_.at(path.back()).parent) path.push_back(*nodes_[path.back()].parent);
  std::reverse(path.begin(), path.end());
  return path;
}

bool CategoryTree::is_ancestor(NodeIndex ancestor, NodeIndex n) const {
  auto cur = nodes_.at(n).parent;
  while (cur) {
    if (*cur == ancestor) return true;
    cur = nodes_[*cur].parent;
  }
  return false;
}

std::size_t CategoryTree::depth(NodeIndex n) const { return path_from_root(n).size() - 1; }

std::vector<NodeIndex> CategoryTree::immediate_family(NodeIndex n) const {
  std::vector<NodeIndex> out{n};
  const auto& node = nodes_.at(n);
  out.insert(out.end(), node.children.begin(), node.children.end());
  if (node.parent) {
    out.push_back(*node.parent);
    const auto& siblings = nodes_[*node.parent].children;
    out.insert(out.end(), siblings.begin(), siblings.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Corpus

std::size_t IngestStats::total_dropped() const {
  std::size_t total = 0;
  for (std::size_t g = 0; g < 4; ++g)
    total += dropped_unknown[g] + dropped_self_loops[g] + dropped_duplicates[g];
  return total;
}

std::optional<ProductIndex> Corpus::find(std::string_view id) const {
  const auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

const EdgeSet* Corpus::edges(GraphType g) const {
  for (const auto& e : edge_sets)
    if (e.graph == g) return &e;
  return nullptr;
}

void Corpus::index() {
  by_id_.clear();
  for (std::size_t i = 0; i < products.size(); ++i)
    by_id_.emplace(products[i].id, static_cast<ProductIndex>(i));
  product_nodes.assign(products.size(), {});
  product_deepest.assign(products.size(), {});
  for (std::size_t i = 0; i < products.size(); ++i) {
    std::set<NodeIndex> nodes;
    std::vector<NodeIndex> ends;
    for (const auto& path : products[i].category_paths) {
      for (const auto& id : path)
        if (auto n = tree.find(id)) nodes.insert(*n);
      if (auto n = tree.find(path.back())) ends.push_back(*n);
    }
    product_nodes[i].assign(nodes.begin(), nodes.end());
    std::sort(ends.begin(), ends.end());
    ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
    for (auto e : ends) {
      const bool covered = std::any_of(ends.begin(), ends.end(),
                                       [&](NodeIndex o) { return o != e && tree.is_ancestor(e, o); });
      if (!covered) product_deepest[i].push_back(e);
    }
  }
}

Corpus ingest(std::istream& products_in, std::istream& tree_in, std::span<const EdgeStream> edges) {
  Corpus corpus;

  std::vector<TreeRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(tree_in, line)) {
    ++lineno;
    const auto text = strip_cr(line);
    if (blank(text)) continue;
    const auto fields = split_tabs(text);
    if (fields.size() != 3)
      throw ParseError("tree", lineno, "expected node_id<TAB>parent_id<TAB>label");
    records.push_back(TreeRecord{std::string(fields[0]), std::string(fields[1]), std::string(fields[2])});
  }
  corpus.tree = CategoryTree::build(std::move(records));

  std::unordered_map<std::string, ProductIndex> ids;
  lineno = 0;
  while (std::getline(products_in, line)) {
    ++lineno;
    const auto text = strip_cr(line);
    if (blank(text)) continue;
    Product p = parse_product(text, "products", lineno);
    for (const auto& path : p.category_paths) {
      if (corpus.tree.empty())
        throw ParseError("products", lineno, "product has categories but the tree is empty");
      std::optional<NodeIndex> prev;
      for (const auto& id : path) {
        const auto n = corpus.tree.find(id);
        if (!n) throw ParseError("products", lineno, "unknown category node '" + id + "'");
        const auto parent = corpus.tree.node(*n).parent;
        if (prev ? parent != prev : *n != corpus.tree.root())
          throw ParseError("products", lineno,
                           "category path is not a root-to-node chain at '" + id + "'");
        prev = n;
      }
    }
    if (!ids.emplace(p.id, static_cast<ProductIndex>(corpus.products.size())).second)
      throw ParseError("products", lineno, "duplicate product id '" + p.id + "'");
    corpus.products.push_back(std::move(p));
  }

  std::array<const EdgeStream*, 4> by_graph{};
  for (const auto& s : edges) by_graph.at(static_cast<std::size_t>(s.graph)) = &s;
  for (std::size_t g = 0; g < by_graph.size(); ++g) {
    const auto* stream = by_graph[g];
    if (!stream) continue;
    EdgeSet set;
    set.graph = static_cast<GraphType>(g);
    std::set<Edge> seen;
    const std::string src = stream->name.empty() ? std::string(kGraphNames[g]) : stream->name;
    lineno = 0;
    while (std::getline(*stream->in, line)) {
      ++lineno;
      const auto text = strip_cr(line);
      if (blank(text)) continue;
      const auto fields = split_tabs(text);
      if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
        throw ParseError(src, lineno, "expected src_id<TAB>dst_id");
      const auto a = ids.find(std::string(fields[0]));
      const auto b = ids.find(std::string(fields[1]));
      if (a == ids.end() || b == ids.end()) {
        ++corpus.stats.dropped_unknown[g];
        continue;
      }
      if (a->second == b->second) {
        ++corpus.stats.dropped_self_loops[g];
        continue;
      }
      const Edge e{a->second, b->second};
      if (!seen.insert(e).second) {
        ++corpus.stats.dropped_duplicates[g];
        continue;
      }
      set.edges.push_back(e);
    }
    corpus.stats.edges_kept[g] = set.edges.size();
    corpus.edge_sets.push_back(std::move(set));
  }

  corpus.stats.products = corpus.products.size();
  corpus.stats.nodes = corpus.tree.size();
  corpus.index();
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& dir) {
  std::ifstream products(dir / "products.jsonl");
  if (!products) throw Error("cannot open " + (dir / "products.jsonl").string());
  std::ifstream tree(dir / "tree.tsv");
  if (!tree) throw Error("cannot open " + (dir / "tree.tsv").string());
  std::vector<std::ifstream> files;
  files.reserve(kAllGraphTypes.size());
  std::vector<EdgeStream> streams;
  for (auto g : kAllGraphTypes) {
    const auto path = dir / "edges" / (std::string(graph_name(g)) + ".tsv");
    if (!std::filesystem::exists(path)) continue;
    files.emplace_back(path);
    if (!files.back()) throw Error("cannot open " + path.string());
    streams.push_back(EdgeStream{g, &files.back(), path.filename().string()});
  }
  return ingest(products, tree, streams);
}

void save_corpus(const std::filesystem::path& dir, const Corpus& corpus) {
  std::filesystem::create_directories(dir / "edges");
  const auto open = [](const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
  };
  {
    auto out = open(dir / "products.jsonl");
    for (const auto& p : corpus.products) out << product_json(p).dump() << '\n';
  }
  {
    auto out = open(dir / "tree.tsv");
    for (std::size_t n = 0; n < corpus.tree.size(); ++n) {
      const auto& node = corpus.tree.node(static_cast<NodeIndex>(n));
      out << node.id << '\t' << (node.parent ? corpus.tree.node(*node.parent).id : std::string()) << '\t'
          << node.label << '\n';
    }
  }
  for (const auto& set : corpus.edge_sets) {
    auto out = open(dir / "edges" / (std::string(graph_name(set.graph)) + ".tsv"));
    for (const auto& e : set.edges) out << corpus.products[e.src].id << '\t' << corpus.products[e.dst].id << '\n';
  }
}

std::string serialize_corpus(const Corpus& corpus) {
  std::ostringstream out;
  for (std::size_t n = 0; n < corpus.tree.size(); ++n) {
    const auto& node = corpus.tree.node(static_cast<NodeIndex>(n));
    json rec;
    rec["node"] = node.id;
    rec["parent"] = node.parent ? corpus.tree.node(*node.parent).id : std::string();
    rec["label"] = node.label;
    out << rec.dump() << '\n';
  }
  for (const auto& p : corpus.products) {
    json rec;
    rec["product"] = product_json(p);
    out << rec.dump() << '\n';
  }
  for (const auto& set : corpus.edge_sets) {
    for (const auto& e : set.edges) {
      json rec;
      rec["graph"] = graph_name(set.graph);
      rec["src"] = corpus.products[e.src].id;
      rec["dst"] = corpus.products[e.dst].id;
      out << rec.dump() << '\n';
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Text

std::vector<std::string> tokenize(std::string_view text, const TokenizerOptions& options) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) tokens.push_back(std::move(cur));
    cur.clear();
  };
  for (unsigned char c : text) {
    if (c >= 0x80 || std::isalnum(c))
      cur.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    else
      flush();
  }
  flush();
  if (options.bigrams && tokens.size() > 1) {
    const std::size_t n = tokens.size();
    for (std::size_t i = 0; i + 1 < n; ++i) tokens.push_back(tokens[i] + "_" + tokens[i + 1]);
  }
  return tokens;
}

std::vector<std::string_view> product_texts(const Product& p, const TextSources& sources) {
  std::vector<std::string_view> out;
  if (sources.reviews)
    for (const auto& r : p.reviews) out.emplace_back(r);
  if (sources.descriptions)
    for (const auto& d : p.descriptions) out.emplace_back(d);
  return out;
}

Vocabulary::Vocabulary(std::vector<Entry> entries) : entries_(std::move(entries)) {
  ids_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (!ids_.emplace(entries_[i].token, static_cast<TokenId>(i)).second)
      throw StructureError("duplicate vocabulary token '" + entries_[i].token + "'");
}

std::optional<TokenId> Vocabulary::id(std::string_view token) const {
  const auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocabulary(const Corpus& corpus, const VocabularyOptions& options) {
  std::unordered_map<std::string, std::pair<std::uint64_t, std::uint64_t>> counts;
  for (const auto& p : corpus.products) {
    std::set<std::string> in_doc;
    for (auto text : product_texts(p, options.sources)) {
      for (auto& tok : tokenize(text, options.tokenizer)) {
        ++counts[tok].first;
        in_doc.insert(std::move(tok));
      }
    }
    for (const auto& tok : in_doc) ++counts[tok].second;
  }
  std::vector<Vocabulary::Entry> entries;
  for (auto& [tok, c] : counts)
    if (c.first >= std::max<std::uint64_t>(1, options.min_count))
      entries.push_back({tok, c.first, c.second});
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.frequency != b.frequency ? a.frequency > b.frequency : a.token < b.token;
  });
  if (entries.size() > options.max_size) entries.resize(options.max_size);
  return Vocabulary(std::move(entries));
}

std::size_t DocumentSet::total_tokens() const {
  std::size_t n = 0;
  for (const auto& d : documents) n += d.tokens.size();
  return n;
}

std::vector<TokenId> encode(std::string_view text, const Vocabulary& vocabulary,
                            const TokenizerOptions& options) {
  std::vector<TokenId> ids;
  for (const auto& tok : tokenize(text, options))
    if (auto id = vocabulary.id(tok)) ids.push_back(*id);
  return ids;
}

DocumentSet build_documents(const Corpus& corpus, const Vocabulary& vocabulary,
                            const TextSources& sources, const TokenizerOptions& options) {
  DocumentSet set;
  set.documents.resize(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto& doc = set.documents[i];
    doc.product = static_cast<ProductIndex>(i);
    for (auto text : product_texts(corpus.products[i], sources)) {
      auto ids = encode(text, vocabulary, options);
      doc.tokens.insert(doc.tokens.end(), ids.begin(), ids.end());
    }
    if (doc.tokens.empty()) set.empty.push_back(static_cast<ProductIndex>(i));
  }
  return set;
}

}  // namespace sceptre
