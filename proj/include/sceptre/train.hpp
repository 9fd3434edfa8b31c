#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sceptre/dataset.hpp"
#include "sceptre/hierarchy.hpp"
#include "sceptre/model.hpp"

namespace sceptre {

struct SolverOptions {
  std::size_t max_iterations = 100;
  double function_tolerance = 1e-10;  // relative change of the objective
  double gradient_tolerance = 1e-10;
};

struct SolverReport {
  double initial = 0.0;
  double final = 0.0;
  std::size_t iterations = 0;
  std::string message;
};

// Quasi-Newton ascent (L-BFGS with a Wolfe line search) on values[begin, end)
// with every other coordinate held fixed. The returned point never has a lower
// objective than the starting point.
SolverReport maximize(const Objective& objective, std::span<double> values, std::size_t begin,
                      std::size_t end, const SolverOptions& options);

struct TraceEntry {
  std::size_t round = 0;
  double objective_before = 0.0;  // z-fixed objective before the parameter update
  double objective_after = 0.0;   // ... and after it
  double validation = 0.0;        // link log-likelihood of the validation pairs
  std::size_t inner_iterations = 0;
  bool improved = false;
};

struct TrainConfig {
  std::size_t outer_rounds = 30;
  std::size_t patience = 5;
  SolverOptions inner;
  double l2 = 1e-3;
  double smoothing = 1e-6;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::function<void(const TraceEntry&, const ModelParams&)> progress;  // after each round
};

struct TrainResult {
  ModelParams params;
  TopicAssignments assignments;
  std::vector<TraceEntry> trace;
  std::size_t best_round = 0;  // 0: the initialisation
  double best_validation = 0.0;
};

// Every product with a category path gets theta over its active set.
ModelParams make_params(const Corpus& corpus, const TopicAllocation& allocation, std::size_t vocab_size,
                        std::vector<GraphType> graphs);

// Alternates (a) maximisation of the joint objective in (theta, phi, beta, eta)
// with z fixed and (b) one resampling sweep of z. Continuous parameters start
// uniform in [0, 1) and z uniform over each active set. Stops after
// `patience` rounds without validation improvement and returns the best
// validation snapshot.
TrainResult train(const Corpus& corpus, const DocumentSet& documents, std::size_t vocab_size,
                  const TopicAllocation& allocation, const PairDataset& dataset, const TrainConfig& config);

// Same loop from explicit starting parameters. With `link_terms` false the
// link likelihood is dropped, only theta and phi move and no validation early
// stopping applies.
TrainResult train_from(ModelParams initial, const ManifestTable& manifests, const DocumentSet& documents,
                       const PairDataset& dataset, const TrainConfig& config, bool link_terms = true);

// Fits beta and eta only, theta and phi frozen: maximises the link likelihood
// of `pairs` plus the L2 term.
SolverReport fit_logistic(ModelParams& params, const DocumentSet& documents, const ManifestTable& manifests,
                          std::span<const TrainingPair> pairs, const TrainConfig& config);

}  // namespace sceptre
