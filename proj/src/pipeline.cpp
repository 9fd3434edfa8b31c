#include "sceptre/pipeline.hpp"

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sceptre/errors.hpp"
#include "sceptre/random.hpp"

namespace sceptre {

namespace {

using json = nlohmann::json;

enum SeedStream : std::uint64_t { split_stream = 10, negative_stream = 11, train_stream = 12, eval_stream = 13,
                                  fold_in_stream = 14 };

template <typename T>
void read_key(const json& obj, const char* key, T& out) {
  if (const auto it = obj.find(key); it != obj.end()) out = it->get<T>();
}

}  // namespace

DatasetOptions Config::dataset_options() const {
  DatasetOptions o;
  o.split.ratios = ratios;
  o.split.min_reviews = min_reviews;
  o.split.seed = derive_seed(seed, split_stream);
  o.negatives.mix = mix;
  o.negatives.seed = derive_seed(seed, negative_stream);
  return o;
}

TrainConfig Config::train_config() const {
  TrainConfig t;
  t.outer_rounds = outer_rounds;
  t.patience = patience;
  t.inner.max_iterations = inner_iterations;
  t.inner.function_tolerance = inner_tolerance;
  t.l2 = l2;
  t.smoothing = smoothing;
  t.seed = derive_seed(seed, train_stream);
  t.workers = workers;
  return t;
}

FoldInOptions Config::fold_in_options() const {
  FoldInOptions f;
  f.iterations = fold_in_iterations;
  f.alpha = fold_in_alpha;
  f.seed = derive_seed(seed, fold_in_stream);
  return f;
}

EvalOptions Config::eval_options() const {
  EvalOptions e;
  e.k_grid = k_grid;
  e.max_queries = max_queries;
  e.ct_percentile = ct_percentile;
  e.lda.logistic_iterations = lda_logistic_iterations;
  e.train = train_config();
  e.train.seed = derive_seed(seed, eval_stream);
  return e;
}

Config parse_config(const std::string& json_text) {
  static const std::set<std::string> known = {
      "threshold", "max_per_node", "min_count", "max_vocabulary", "reviews", "descriptions", "bigrams",
      "ratios", "min_reviews", "mix", "l2", "smoothing", "outer_rounds", "patience", "inner_iterations",
      "inner_tolerance", "lda_logistic_iterations", "popularity", "fold_in_iterations", "fold_in_alpha",
      "ct_percentile", "max_queries", "k_grid", "workers", "seed"};
  json obj;
  try {
    obj = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError("config", 0, e.what());
  }
  if (!obj.is_object()) throw ParseError("config", 0, "expected a JSON object");
  for (const auto& [key, value] : obj.items())
    if (!known.contains(key)) throw ParseError("config", 0, "unknown key '" + key + "'");
  Config c;
  try {
    read_key(obj, "threshold", c.allocation.threshold);
    read_key(obj, "max_per_node", c.allocation.max_per_node);
    read_key(obj, "min_count", c.vocabulary.min_count);
    read_key(obj, "max_vocabulary", c.vocabulary.max_size);
    read_key(obj, "reviews", c.vocabulary.sources.reviews);
    read_key(obj, "descriptions", c.vocabulary.sources.descriptions);
    read_key(obj, "bigrams", c.vocabulary.tokenizer.bigrams);
    read_key(obj, "ratios", c.ratios);
    read_key(obj, "min_reviews", c.min_reviews);
    read_key(obj, "mix", c.mix);
    read_key(obj, "l2", c.l2);
    read_key(obj, "smoothing", c.smoothing);
    read_key(obj, "outer_rounds", c.outer_rounds);
    read_key(obj, "patience", c.patience);
    read_key(obj, "inner_iterations", c.inner_iterations);
    read_key(obj, "inner_tolerance", c.inner_tolerance);
    read_key(obj, "lda_logistic_iterations", c.lda_logistic_iterations);
    read_key(obj, "popularity", c.popularity);
    read_key(obj, "fold_in_iterations", c.fold_in_iterations);
    read_key(obj, "fold_in_alpha", c.fold_in_alpha);
    read_key(obj, "ct_percentile", c.ct_percentile);
    read_key(obj, "max_queries", c.max_queries);
    read_key(obj, "k_grid", c.k_grid);
    read_key(obj, "workers", c.workers);
    read_key(obj, "seed", c.seed);
  } catch (const json::exception& e) {
    throw ParseError("config", 0, e.what());
  }
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_json(const Config& c) {
  json obj;
  obj["threshold"] = c.allocation.threshold;
  obj["max_per_node"] = c.allocation.max_per_node;
  obj["min_count"] = c.vocabulary.min_count;
  obj["max_vocabulary"] = c.vocabulary.max_size;
  obj["reviews"] = c.vocabulary.sources.reviews;
  obj["descriptions"] = c.vocabulary.sources.descriptions;
  obj["bigrams"] = c.vocabulary.tokenizer.bigrams;
  obj["ratios"] = c.ratios;
  obj["min_reviews"] = c.min_reviews;
  obj["mix"] = c.mix;
  obj["l2"] = c.l2;
  obj["smoothing"] = c.smoothing;
  obj["outer_rounds"] = c.outer_rounds;
  obj["patience"] = c.patience;
  obj["inner_iterations"] = c.inner_iterations;
  obj["inner_tolerance"] = c.inner_tolerance;
  obj["lda_logistic_iterations"] = c.lda_logistic_iterations;
  obj["popularity"] = c.popularity;
  obj["fold_in_iterations"] = c.fold_in_iterations;
  obj["fold_in_alpha"] = c.fold_in_alpha;
  obj["ct_percentile"] = c.ct_percentile;
  obj["max_queries"] = c.max_queries;
  obj["k_grid"] = c.k_grid;
  obj["workers"] = c.workers;
  obj["seed"] = c.seed;
  return obj.dump(2) + "\n";
}

Prepared prepare(const Corpus& corpus, const Config& config) {
  Prepared p;
  p.vocabulary = build_vocabulary(corpus, config.vocabulary);
  p.documents = build_documents(corpus, p.vocabulary, config.vocabulary.sources, config.vocabulary.tokenizer);
  p.allocation = allocate_topics(corpus.tree, corpus, config.allocation);
  p.dataset = build_dataset(corpus, p.documents, config.dataset_options());
  return p;
}

Checkpoint make_checkpoint(const Corpus& corpus, const Prepared& prepared, ModelParams params,
                           double smoothing) {
  Checkpoint c;
  c.params = std::move(params);
  c.allocation = prepared.allocation;
  c.vocabulary = prepared.vocabulary;
  c.smoothing = smoothing;
  for (const auto& p : corpus.products) c.product_ids.push_back(p.id);
  for (std::size_t n = 0; n < corpus.tree.size(); ++n) c.node_ids.push_back(corpus.tree.node(static_cast<NodeIndex>(n)).id);
  return c;
}

void write_trace(std::ostream& out, const std::vector<TraceEntry>& trace) {
  out << "round\tobjective_before\tobjective_after\tvalidation\tinner_iterations\timproved\n";
  out << std::setprecision(17);
  for (const auto& t : trace)
    out << t.round << '\t' << t.objective_before << '\t' << t.objective_after << '\t' << t.validation << '\t'
        << t.inner_iterations << '\t' << int{t.improved} << '\n';
}

TrainResult train_model(const Corpus& corpus, const Config& config, const std::filesystem::path& dir,
                        std::ostream* log) {
  const auto prepared = prepare(corpus, config);
  if (log)
    for (const auto& w : prepared.dataset.warnings) *log << "warning: " << w << '\n';
  if (prepared.dataset.dataset.graphs.empty()) throw Error("no graph has usable edges");
  auto train_config = config.train_config();
  if (log)
    train_config.progress = [log](const TraceEntry& e, const ModelParams&) {
      *log << "round " << e.round << "  objective " << std::setprecision(10) << e.objective_after
           << "  validation " << e.validation << (e.improved ? "  *" : "") << '\n';
    };
  auto result = train(corpus, prepared.documents, prepared.vocabulary.size(), prepared.allocation,
                      prepared.dataset.dataset, train_config);

  std::filesystem::create_directories(dir);
  save_model(dir / "model.ckpt", make_checkpoint(corpus, prepared, result.params, config.smoothing));
  save_dataset(dir, corpus, prepared.dataset.dataset);
  {
    std::ofstream out(dir / "config.json");
    out << config_json(config);
  }
  {
    std::ofstream out(dir / "trace.tsv");
    write_trace(out, result.trace);
  }
  return result;
}

Model load_model_dir(const Corpus& corpus, const std::filesystem::path& dir) {
  Model m;
  m.config = load_config(dir / "config.json");
  m.checkpoint = load_model(dir / "model.ckpt");
  const auto& ids = m.checkpoint.product_ids;
  if (ids.size() != corpus.size()) throw Error("model was trained on a different corpus (product count)");
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (ids[i] != corpus.products[i].id) throw Error("model was trained on a different corpus (product " + ids[i] + ")");
  m.documents = build_documents(corpus, m.checkpoint.vocabulary, m.config.vocabulary.sources,
                                m.config.vocabulary.tokenizer);
  m.dataset = load_dataset(dir, corpus);
  if (m.dataset.graphs != m.checkpoint.params.graphs()) throw Error("dataset graphs do not match the model");
  return m;
}

}  // namespace sceptre
