#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sceptre/checkpoint.hpp"
#include "sceptre/corpus.hpp"
#include "sceptre/dataset.hpp"
#include "sceptre/evaluate.hpp"
#include "sceptre/hierarchy.hpp"
#include "sceptre/recommend.hpp"
#include "sceptre/train.hpp"

namespace sceptre {

struct Config {
  AllocationOptions allocation;
  VocabularyOptions vocabulary;
  std::array<double, 3> ratios{0.8, 0.1, 0.1};
  std::size_t min_reviews = 1;
  double mix = 0.5;
  double l2 = 1e-3;
  double smoothing = 1e-6;
  std::size_t outer_rounds = 30;
  std::size_t patience = 5;
  std::size_t inner_iterations = 100;
  double inner_tolerance = 1e-10;
  std::size_t lda_logistic_iterations = 200;
  std::size_t popularity = 1000;
  std::size_t fold_in_iterations = 50;
  double fold_in_alpha = 0.01;
  double ct_percentile = 50.0;
  std::size_t max_queries = 200;
  std::vector<std::size_t> k_grid = kDefaultPrecisionGrid;
  std::size_t workers = 1;
  std::uint64_t seed = 1;

  DatasetOptions dataset_options() const;
  TrainConfig train_config() const;
  FoldInOptions fold_in_options() const;
  EvalOptions eval_options() const;
};

// JSON text; absent keys keep their defaults, unknown keys are an error.
Config parse_config(const std::string& json_text);
Config load_config(const std::filesystem::path& path);
std::string config_json(const Config& config);

struct Prepared {
  Vocabulary vocabulary;
  DocumentSet documents;
  TopicAllocation allocation;
  DatasetBuild dataset;
};

Prepared prepare(const Corpus& corpus, const Config& config);

struct Model {
  Checkpoint checkpoint;
  DocumentSet documents;
  PairDataset dataset;
  Config config;
};

// Trains and writes model.ckpt, config.json, dataset_*.tsv and trace.tsv into `dir`.
TrainResult train_model(const Corpus& corpus, const Config& config, const std::filesystem::path& dir,
                        std::ostream* log = nullptr);
Checkpoint make_checkpoint(const Corpus& corpus, const Prepared& prepared, ModelParams params,
                           double smoothing);

// Loads a model directory and checks that it belongs to `corpus`.
Model load_model_dir(const Corpus& corpus, const std::filesystem::path& dir);

void write_trace(std::ostream& out, const std::vector<TraceEntry>& trace);

}  // namespace sceptre
