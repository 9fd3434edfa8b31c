#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "sceptre/cli.hpp"
#include "sceptre/errors.hpp"
#include "sceptre/pipeline.hpp"
#include "sceptre/synth.hpp"

namespace py = pybind11;
using namespace sceptre;

namespace {

// A corpus and a trained model directory loaded together.
class Session {
 public:
  Session(const std::filesystem::path& data, const std::filesystem::path& model)
      : corpus_(load_corpus(data)),
        model_(load_model_dir(corpus_, model)),
        dist_(model_.checkpoint.params, model_.checkpoint.smoothing),
        manifests_(corpus_) {}

  std::vector<std::pair<std::string, double>> recommend(const std::string& product, const std::string& graph,
                                                        std::size_t top, bool cull) const {
    const auto i = product_index(product);
    const auto g = graph_of(graph);
    CullingOptions culling;
    culling.enabled = cull;
    culling.popularity = model_.config.popularity;
    const auto candidates = candidate_set(corpus_, i, training_neighbors(model_.dataset, g, i), culling);
    const auto recs = sceptre::recommend(model_.checkpoint.params, dist_, manifests_, i, g, top, candidates,
                                         model_.config.workers);
    std::vector<std::pair<std::string, double>> out;
    for (const auto& r : recs.items) out.emplace_back(corpus_.products[r.product].id, r.score);
    return out;
  }

  std::vector<std::pair<std::string, std::optional<double>>> explain(const std::string& src, const std::string& dst,
                                                                     const std::string& graph) const {
    ExplainOptions options;
    options.sources = model_.config.vocabulary.sources;
    options.tokenizer = model_.config.vocabulary.tokenizer;
    options.fold_in = model_.config.fold_in_options();
    const auto ex = sceptre::explain(model_.checkpoint.params, dist_, manifests_, corpus_, model_.checkpoint.vocabulary,
                                     product_index(src), product_index(dst), graph_of(graph), options);
    std::vector<std::pair<std::string, std::optional<double>>> out;
    for (const auto& s : ex.sentences)
      out.emplace_back(s.sentence, s.in_vocabulary ? std::optional<double>(s.score) : std::nullopt);
    return out;
  }

  std::map<std::size_t, double> fold_in(const std::string& text, const std::vector<std::string>& path) const {
    Product p;
    p.category_paths = {path};
    const auto active = active_set_for(p, corpus_.tree, model_.checkpoint.allocation);
    const auto tokens = encode(text, model_.checkpoint.vocabulary, model_.config.vocabulary.tokenizer);
    const auto f = sceptre::fold_in(dist_, active, tokens, model_.config.fold_in_options());
    std::map<std::size_t, double> out;
    for (std::size_t a = 0; a < f.topics.size(); ++a) out[f.topics[a]] = f.theta[a];
    return out;
  }

  double probability(const std::string& src, const std::string& dst, const std::string& graph) const {
    return relation_probability(model_.checkpoint.params, dist_, manifests_, product_index(src), product_index(dst),
                                graph_of(graph))
        .edge;
  }

  std::vector<py::dict> evaluate(const std::vector<std::string>& methods) const {
    auto options = model_.config.eval_options();
    if (!methods.empty()) options.methods = methods;
    EvalInputs inputs;
    inputs.corpus = &corpus_;
    inputs.documents = &model_.documents;
    inputs.vocab_size = model_.checkpoint.vocabulary.size();
    inputs.dataset = &model_.dataset;
    inputs.params = &model_.checkpoint.params;
    inputs.num_topics = model_.checkpoint.params.num_topics();
    const auto report = sceptre::evaluate(inputs, options);
    std::vector<py::dict> out;
    for (const auto& r : report.rows) {
      py::dict d;
      d["method"] = r.method;
      d["graph"] = std::string(graph_name(r.graph));
      d["accuracy"] = r.accuracy;
      d["error_reduction"] = r.error_reduction;
      d["pairs"] = r.pairs;
      out.push_back(std::move(d));
    }
    return out;
  }

  std::vector<std::pair<std::string, double>> top_words(std::size_t topic, std::size_t n) const {
    if (topic >= model_.checkpoint.params.num_topics()) throw py::index_error("topic out of range");
    return sceptre::top_words(dist_, model_.checkpoint.vocabulary, static_cast<TopicIndex>(topic), n);
  }

  std::size_t num_topics() const { return model_.checkpoint.params.num_topics(); }
  std::size_t vocab_size() const { return model_.checkpoint.vocabulary.size(); }
  std::vector<std::string> graphs() const {
    std::vector<std::string> out;
    for (auto g : model_.checkpoint.params.graphs()) out.emplace_back(graph_name(g));
    return out;
  }

 private:
  ProductIndex product_index(const std::string& id) const {
    const auto p = corpus_.find(id);
    if (!p) throw py::key_error("unknown product: " + id);
    return *p;
  }
  std::uint32_t graph_of(const std::string& name) const {
    const auto g = parse_graph_type(name);
    if (!g) throw py::value_error("unknown graph type: " + name);
    const auto idx = model_.checkpoint.params.graph_index(*g);
    if (!idx) throw py::value_error("model has no graph " + name);
    return *idx;
  }

  Corpus corpus_;
  Model model_;
  TopicDistributions dist_;
  ManifestTable manifests_;
};

}  // namespace

PYBIND11_MODULE(_sceptre, m) {
  m.doc() = "Substitute and complement product graphs from text, categories and links";

  py::register_exception<Error>(m, "SceptreError", PyExc_RuntimeError);

  m.def(
      "synthesize",
      [](const std::filesystem::path& out, std::size_t products, std::size_t edges, std::uint64_t seed) {
        SynthOptions o;
        o.products = products;
        o.edges = edges;
        o.seed = seed;
        const auto s = synthesize(o);
        save_corpus(out, s.corpus);
        std::map<std::string, std::size_t> counts{{"products", s.corpus.size()}};
        for (const auto& set : s.corpus.edge_sets) counts[std::string(graph_name(set.graph))] = set.edges.size();
        return counts;
      },
      py::arg("out"), py::arg("products") = 2000, py::arg("edges") = 20000, py::arg("seed") = 1,
      "Write a synthetic planted-structure corpus to `out`; returns product and edge counts.");

  m.def(
      "train",
      [](const std::filesystem::path& data, const std::filesystem::path& model, const std::string& config_json) {
        const auto corpus = load_corpus(data);
        const auto config = parse_config(config_json);
        py::gil_scoped_release release;
        const auto r = train_model(corpus, config, model);
        return std::map<std::string, double>{{"best_round", static_cast<double>(r.best_round)},
                                             {"best_validation", r.best_validation},
                                             {"rounds", static_cast<double>(r.trace.size())}};
      },
      py::arg("data"), py::arg("model"), py::arg("config_json") = "{}");

  m.def("default_config", [] { return config_json(Config{}); });

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));

  py::class_<Checkpoint>(m, "Checkpoint")
      .def_static("load", [](const std::filesystem::path& p) { return load_model(p); }, py::arg("path"))
      .def("save", [](const Checkpoint& c, const std::filesystem::path& p) { save_model(p, c); }, py::arg("path"))
      .def_property_readonly("num_topics", [](const Checkpoint& c) { return c.params.num_topics(); })
      .def_property_readonly("vocab_size", [](const Checkpoint& c) { return c.vocabulary.size(); })
      .def_property_readonly("product_ids", [](const Checkpoint& c) { return c.product_ids; })
      .def_property_readonly("smoothing", [](const Checkpoint& c) { return c.smoothing; })
      .def_property_readonly("values", [](const Checkpoint& c) {
        return std::vector<double>(c.params.values().begin(), c.params.values().end());
      });

  py::class_<Session>(m, "Session")
      .def(py::init<const std::filesystem::path&, const std::filesystem::path&>(), py::arg("data"), py::arg("model"))
      .def_property_readonly("num_topics", &Session::num_topics)
      .def_property_readonly("vocab_size", &Session::vocab_size)
      .def_property_readonly("graphs", &Session::graphs)
      .def("recommend", &Session::recommend, py::arg("product"), py::arg("graph") = "complement_also_bought",
           py::arg("top") = 10, py::arg("cull") = true)
      .def("explain", &Session::explain, py::arg("src"), py::arg("dst"), py::arg("graph") = "complement_also_bought")
      .def("fold_in", &Session::fold_in, py::arg("text"), py::arg("category_path"))
      .def("probability", &Session::probability, py::arg("src"), py::arg("dst"),
           py::arg("graph") = "complement_also_bought")
      .def("evaluate", &Session::evaluate, py::arg("methods") = std::vector<std::string>{})
      .def("top_words", &Session::top_words, py::arg("topic"), py::arg("n") = 10);
}
