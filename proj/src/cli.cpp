#include "sceptre/cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "sceptre/errors.hpp"
#include "sceptre/pipeline.hpp"
#include "sceptre/synth.hpp"

namespace sceptre {

namespace {

// Config file plus flag overrides shared by the model subcommands.
class ConfigFlags {
 public:
  void attach(CLI::App* app) {
    app->add_option("--config", path_, "JSON config file");
    add(app, "--seed", values_.seed, "Seed for every stochastic step",
        [](Config& c, const Config& v) { c.seed = v.seed; });
    add(app, "--workers", values_.workers, "Worker threads",
        [](Config& c, const Config& v) { c.workers = v.workers; });
    add(app, "--threshold", values_.allocation.threshold, "Products per extra topic at a node",
        [](Config& c, const Config& v) { c.allocation.threshold = v.allocation.threshold; });
    add(app, "--max-per-node", values_.allocation.max_per_node, "Topic cap per node",
        [](Config& c, const Config& v) { c.allocation.max_per_node = v.allocation.max_per_node; });
    add(app, "--min-count", values_.vocabulary.min_count, "Minimum token frequency",
        [](Config& c, const Config& v) { c.vocabulary.min_count = v.vocabulary.min_count; });
    add(app, "--max-vocabulary", values_.vocabulary.max_size, "Vocabulary size cap",
        [](Config& c, const Config& v) { c.vocabulary.max_size = v.vocabulary.max_size; });
    add(app, "--l2", values_.l2, "L2 penalty", [](Config& c, const Config& v) { c.l2 = v.l2; });
    add(app, "--smoothing", values_.smoothing, "Additive smoothing of phi",
        [](Config& c, const Config& v) { c.smoothing = v.smoothing; });
    add(app, "--mix", values_.mix, "Share of cross-type negatives",
        [](Config& c, const Config& v) { c.mix = v.mix; });
    add(app, "--min-reviews", values_.min_reviews, "Minimum reviews per product",
        [](Config& c, const Config& v) { c.min_reviews = v.min_reviews; });
    add(app, "--rounds", values_.outer_rounds, "Outer alternations",
        [](Config& c, const Config& v) { c.outer_rounds = v.outer_rounds; });
    add(app, "--patience", values_.patience, "Rounds without validation gain before stopping",
        [](Config& c, const Config& v) { c.patience = v.patience; });
    add(app, "--inner-iterations", values_.inner_iterations, "Quasi-Newton iterations per round",
        [](Config& c, const Config& v) { c.inner_iterations = v.inner_iterations; });
    add(app, "--popularity", values_.popularity, "Top products per category kept as candidates",
        [](Config& c, const Config& v) { c.popularity = v.popularity; });
    auto* ratios = app->add_option("--ratios", values_.ratios, "Train, validation and test shares")->expected(3);
    overrides_.push_back({ratios, [](Config& c, const Config& v) { c.ratios = v.ratios; }});
  }

  Config resolve(const Config& base) const {
    Config c = path_.empty() ? base : load_config(path_);
    for (const auto& [opt, apply] : overrides_)
      if (opt->count() > 0) apply(c, values_);
    return c;
  }

 private:
  template <typename T>
  void add(CLI::App* app, const std::string& name, T& target, const std::string& help,
           std::function<void(Config&, const Config&)> apply) {
    overrides_.push_back({app->add_option(name, target, help), std::move(apply)});
  }

  std::string path_;
  Config values_;
  std::vector<std::pair<CLI::Option*, std::function<void(Config&, const Config&)>>> overrides_;
};

GraphType graph_arg(const std::string& name) {
  const auto g = parse_graph_type(name);
  if (!g) throw Error("unknown graph type: " + name);
  return *g;
}

ProductIndex product_arg(const Corpus& corpus, const std::string& id) {
  const auto p = corpus.find(id);
  if (!p) throw Error("unknown product: " + id);
  return *p;
}

std::uint32_t model_graph(const Model& model, GraphType g) {
  const auto idx = model.checkpoint.params.graph_index(g);
  if (!idx) throw Error("model has no graph " + std::string(graph_name(g)));
  return *idx;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learns substitute and complement product graphs from text, categories and links"};
  app.name("sceptre");
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic planted-structure corpus");
  SynthOptions synth_opts;
  std::string synth_out;
  synth->add_option("--out", synth_out, "Output data directory")->required();
  synth->add_option("--products", synth_opts.products, "Number of products");
  synth->add_option("--edges", synth_opts.edges, "Edges over both graphs");
  synth->add_option("--groups", synth_opts.groups, "Top-level categories");
  synth->add_option("--leaves", synth_opts.leaves_per_group, "Leaves per top-level category");
  synth->add_option("--topics-per-leaf", synth_opts.topics_per_leaf, "Planted topics per leaf");
  synth->add_option("--cross-leaf", synth_opts.cross_leaf_complements, "Share of complements across sibling leaves");
  synth->add_option("--seed", synth_opts.seed, "Seed");

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "Validate a data directory and report edge counts");
  std::string data_dir;
  std::string canonical_out;
  ingest_cmd->add_option("--data", data_dir, "Data directory")->required();
  ingest_cmd->add_option("--canonical", canonical_out, "Also write the canonical JSON-lines corpus here");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a model");
  std::string model_dir;
  ConfigFlags train_flags;
  train_cmd->add_option("--data", data_dir, "Data directory")->required();
  train_cmd->add_option("--model", model_dir, "Model output directory")->required();
  train_flags.attach(train_cmd);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model and the baselines on held-out pairs");
  std::string methods = "all";
  std::string report_path;
  std::string precision_path;
  eval_cmd->add_option("--data", data_dir, "Data directory")->required();
  eval_cmd->add_option("--model", model_dir, "Model directory")->required();
  eval_cmd->add_option("--method", methods, "all or a comma list of sceptre,random,lda,ct,cf");
  eval_cmd->add_option("--report", report_path, "Accuracy table path (default <model>/report.tsv)");
  eval_cmd->add_option("--precision", precision_path, "Precision@k path (default <model>/precision.tsv)");

  // recommend
  auto* rec_cmd = app.add_subcommand("recommend", "Top-R recommendations for one product");
  std::string product_id;
  std::string graph = "complement_also_bought";
  std::size_t top = 10;
  bool no_cull = false;
  rec_cmd->add_option("--data", data_dir, "Data directory")->required();
  rec_cmd->add_option("--model", model_dir, "Model directory")->required();
  rec_cmd->add_option("--product", product_id, "Query product id")->required();
  rec_cmd->add_option("--graph", graph, "Graph type");
  rec_cmd->add_option("--top", top, "Number of recommendations");
  rec_cmd->add_flag("--no-cull", no_cull, "Score every product instead of the culled candidates");

  // explain
  auto* explain_cmd = app.add_subcommand("explain", "Rank the sentences of dst that explain src -> dst");
  std::string src_id;
  std::string dst_id;
  explain_cmd->add_option("--data", data_dir, "Data directory")->required();
  explain_cmd->add_option("--model", model_dir, "Model directory")->required();
  explain_cmd->add_option("--src", src_id, "Source product id")->required();
  explain_cmd->add_option("--dst", dst_id, "Destination product id")->required();
  explain_cmd->add_option("--graph", graph, "Graph type");

  // topics
  auto* topics_cmd = app.add_subcommand("topics", "Background-subtracted top words per topic");
  std::size_t words = 10;
  topics_cmd->add_option("--model", model_dir, "Model directory")->required();
  topics_cmd->add_option("--words", words, "Words per topic");
  bool dump_allocation = false;
  topics_cmd->add_flag("--dump-allocation", dump_allocation, "Print node_id, label and topic indices instead");
  topics_cmd->add_option("--data", data_dir, "Data directory, for node labels");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) {
      const auto s = synthesize(synth_opts);
      save_corpus(synth_out, s.corpus);
      out << "products\t" << s.corpus.size() << '\n';
      for (const auto& set : s.corpus.edge_sets) out << graph_name(set.graph) << '\t' << set.edges.size() << '\n';
      return 0;
    }

    if (topics_cmd->parsed()) {
      const std::filesystem::path dir(model_dir);
      const auto checkpoint = load_model(dir / "model.ckpt");
      if (dump_allocation) {
        std::optional<Corpus> labels;
        if (!data_dir.empty()) labels = load_corpus(data_dir);
        out << "node_id\tlabel\ttopics\n";
        for (std::size_t n = 0; n < checkpoint.node_ids.size(); ++n) {
          const auto& id = checkpoint.node_ids[n];
          std::string label = id;
          if (labels)
            if (const auto found = labels->tree.find(id)) label = labels->tree.node(*found).label;
          out << id << '\t' << label << '\t';
          const auto topics = checkpoint.allocation.topics(static_cast<NodeIndex>(n));
          for (std::size_t t = 0; t < topics.size(); ++t) out << (t ? "," : "") << topics[t];
          out << '\n';
        }
        return 0;
      }
      const TopicDistributions dist(checkpoint.params, checkpoint.smoothing);
      out << "topic\tnode\trank\tword\tscore\n";
      for (std::size_t k = 0; k < checkpoint.params.num_topics(); ++k) {
        const auto node = checkpoint.node_ids.at(checkpoint.allocation.owner(static_cast<TopicIndex>(k)));
        const auto top_list = top_words(dist, checkpoint.vocabulary, static_cast<TopicIndex>(k), words);
        for (std::size_t r = 0; r < top_list.size(); ++r)
          out << k << '\t' << node << '\t' << r + 1 << '\t' << top_list[r].first << '\t' << std::setprecision(6)
              << top_list[r].second << '\n';
      }
      return 0;
    }

    const auto corpus = load_corpus(data_dir);

    if (ingest_cmd->parsed()) {
      out << "graph\tkept\tdropped_unknown\tdropped_self_loops\tdropped_duplicates\n";
      for (auto g : kAllGraphTypes) {
        const auto n = static_cast<std::size_t>(g);
        out << graph_name(g) << '\t' << corpus.stats.edges_kept[n] << '\t' << corpus.stats.dropped_unknown[n] << '\t'
            << corpus.stats.dropped_self_loops[n] << '\t' << corpus.stats.dropped_duplicates[n] << '\n';
      }
      out << "products\t" << corpus.size() << "\nnodes\t" << corpus.tree.size() << '\n';
      if (!canonical_out.empty()) open_out(canonical_out) << serialize_corpus(corpus);
      return 0;
    }

    if (train_cmd->parsed()) {
      const auto config = train_flags.resolve(Config{});
      const auto result = train_model(corpus, config, model_dir, &err);
      out << "best_round\t" << result.best_round << "\nbest_validation\t" << std::setprecision(10)
          << result.best_validation << "\nrounds\t" << result.trace.size() << '\n';
      return 0;
    }

    const auto model = load_model_dir(corpus, model_dir);
    const auto& params = model.checkpoint.params;
    const TopicDistributions dist(params, model.checkpoint.smoothing);
    const ManifestTable manifests(corpus);

    if (eval_cmd->parsed()) {
      auto options = model.config.eval_options();
      if (methods != "all") {
        options.methods.clear();
        std::stringstream list(methods);
        std::string m;
        while (std::getline(list, m, ','))
          if (!m.empty()) options.methods.push_back(m);
      }
      EvalInputs inputs;
      inputs.corpus = &corpus;
      inputs.documents = &model.documents;
      inputs.vocab_size = model.checkpoint.vocabulary.size();
      inputs.dataset = &model.dataset;
      inputs.params = &params;
      inputs.num_topics = params.num_topics();
      const auto report = evaluate(inputs, options);
      const std::filesystem::path dir(model_dir);
      const auto table_path = report_path.empty() ? dir / "report.tsv" : std::filesystem::path(report_path);
      const auto prec_path = precision_path.empty() ? dir / "precision.tsv" : std::filesystem::path(precision_path);
      {
        auto f = open_out(table_path);
        report.write_table(f);
      }
      {
        auto f = open_out(prec_path);
        report.write_precision(f);
      }
      report.write_table(out);
      return 0;
    }

    if (rec_cmd->parsed()) {
      const auto i = product_arg(corpus, product_id);
      const auto g = model_graph(model, graph_arg(graph));
      CullingOptions culling;
      culling.enabled = !no_cull;
      culling.popularity = model.config.popularity;
      const auto excluded = training_neighbors(model.dataset, g, i);
      const auto candidates = candidate_set(corpus, i, excluded, culling);
      const auto recs = recommend(params, dist, manifests, i, g, top, candidates, model.config.workers);
      if (recs.no_candidates) err << "warning: no admissible candidates for " << product_id << '\n';
      out << "rank\tproduct\ttitle\tscore\n";
      for (std::size_t r = 0; r < recs.items.size(); ++r) {
        const auto& p = corpus.products[recs.items[r].product];
        out << r + 1 << '\t' << p.id << '\t' << p.title << '\t' << std::setprecision(10) << recs.items[r].score
            << '\n';
      }
      return 0;
    }

    if (explain_cmd->parsed()) {
      const auto i = product_arg(corpus, src_id);
      const auto j = product_arg(corpus, dst_id);
      const auto g = model_graph(model, graph_arg(graph));
      ExplainOptions options;
      options.sources = model.config.vocabulary.sources;
      options.tokenizer = model.config.vocabulary.tokenizer;
      options.fold_in = model.config.fold_in_options();
      const auto ex = explain(params, dist, manifests, corpus, model.checkpoint.vocabulary, i, j, g, options);
      if (ex.no_vocabulary) err << "warning: no sentence of " << dst_id << " has an in-vocabulary token\n";
      out << "rank\tscore\tsentence\n";
      for (std::size_t r = 0; r < ex.sentences.size(); ++r) {
        const auto& s = ex.sentences[r];
        out << r + 1 << '\t';
        if (s.in_vocabulary) {
          out << std::setprecision(10) << s.score;
        } else {
          out << "NA";
        }
        out << '\t' << s.sentence << '\n';
      }
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  return 0;
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int n = 1; n < argc; ++n) args.emplace_back(argv[n]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace sceptre
