#include "sceptre/train.hpp"

#include <ceres/gradient_problem.h>
#include <ceres/gradient_problem_solver.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "sceptre/errors.hpp"
#include "sceptre/random.hpp"

namespace sceptre {

namespace {

// Ceres minimises; hand it the negated objective over one block of coordinates.
class BlockFunction final : public ceres::FirstOrderFunction {
 public:
  BlockFunction(const Objective& objective, std::vector<double>& full, std::size_t begin, std::size_t end)
      : objective_(objective), full_(full), begin_(begin), size_(end - begin), grad_(full.size()) {}

  bool Evaluate(const double* x, double* cost, double* gradient) const override {
    std::copy(x, x + size_, full_.begin() + static_cast<std::ptrdiff_t>(begin_));
    try {
      double value;
      if (gradient) {
        value = objective_.value_and_gradient(full_, grad_);
        for (std::size_t i = 0; i < size_; ++i) gradient[i] = -grad_[begin_ + i];
      } else {
        value = objective_.value(full_);
      }
      *cost = -value;
      return std::isfinite(value);
    } catch (const DegenerateError&) {
      return false;
    }
  }

  int NumParameters() const override { return static_cast<int>(size_); }

 private:
  const Objective& objective_;
  std::vector<double>& full_;
  std::size_t begin_;
  std::size_t size_;
  mutable std::vector<double> grad_;
};

double validation_objective(const ModelParams& params, const ManifestTable& manifests,
                            std::span<const TrainingPair> pairs, double smoothing) {
  const TopicDistributions dist(params, smoothing);
  return link_log_likelihood(params, dist, manifests, pairs);
}

}  // namespace

SolverReport maximize(const Objective& objective, std::span<double> values, std::size_t begin,
                      std::size_t end, const SolverOptions& options) {
  if (begin > end || end > values.size()) throw Error("solver block out of range");
  SolverReport report;
  std::vector<double> full(values.begin(), values.end());
  report.initial = objective.value(full);
  report.final = report.initial;
  if (begin == end || options.max_iterations == 0) return report;

  std::vector<double> x(values.begin() + static_cast<std::ptrdiff_t>(begin),
                        values.begin() + static_cast<std::ptrdiff_t>(end));
  ceres::GradientProblem problem(new BlockFunction(objective, full, begin, end));
  ceres::GradientProblemSolver::Options opts;
  opts.line_search_direction_type = ceres::LBFGS;
  opts.line_search_type = ceres::WOLFE;
  opts.max_num_iterations = static_cast<int>(options.max_iterations);
  opts.function_tolerance = options.function_tolerance;
  opts.gradient_tolerance = options.gradient_tolerance;
  opts.parameter_tolerance = 1e-14;
  opts.logging_type = ceres::SILENT;
  opts.minimizer_progress_to_stdout = false;
  ceres::GradientProblemSolver::Summary summary;
  ceres::Solve(opts, problem, x.data(), &summary);

  report.iterations = summary.iterations.empty() ? 0 : summary.iterations.size() - 1;
  report.message = summary.message;
  std::copy(x.begin(), x.end(), full.begin() + static_cast<std::ptrdiff_t>(begin));
  const double final_value = objective.value(full);
  if (final_value >= report.initial) {
    std::copy(x.begin(), x.end(), values.begin() + static_cast<std::ptrdiff_t>(begin));
    report.final = final_value;
  }
  return report;
}

ModelParams make_params(const Corpus& corpus, const TopicAllocation& allocation, std::size_t vocab_size,
                        std::vector<GraphType> graphs) {
  return ModelParams(active_topic_sets(corpus, allocation), allocation.num_topics(), vocab_size,
                     std::move(graphs));
}

TrainResult train_from(ModelParams initial, const ManifestTable& manifests, const DocumentSet& documents,
                       const PairDataset& dataset, const TrainConfig& config, bool link_terms) {
  TrainResult result;
  result.params = std::move(initial);
  auto& params = result.params;
  result.assignments = initial_assignments(params, documents, derive_seed(config.seed, 2));

  ObjectiveOptions objective_options;
  objective_options.l2 = config.l2;
  objective_options.smoothing = config.smoothing;
  objective_options.link_term = link_terms;
  objective_options.workers = config.workers;
  const auto train_pairs = dataset.split(Split::train);
  const auto validation_pairs = dataset.split(Split::validation);
  const bool early_stopping = link_terms && !validation_pairs.empty();

  Objective objective(params, documents, manifests, train_pairs, objective_options);
  objective.set_assignments(result.assignments);

  auto best_params = params;
  auto best_z = result.assignments;
  result.best_validation = early_stopping
                               ? validation_objective(params, manifests, validation_pairs, config.smoothing)
                               : -std::numeric_limits<double>::infinity();
  std::size_t stale = 0;

  for (std::size_t round = 1; round <= config.outer_rounds; ++round) {
    TraceEntry entry;
    entry.round = round;
    const auto report =
        maximize(objective, params.values(), 0, link_terms ? params.size() : params.beta_begin(), config.inner);
    entry.objective_before = report.initial;
    entry.objective_after = report.final;
    entry.inner_iterations = report.iterations;
    if (!std::isfinite(entry.objective_after))
      throw DegenerateError("objective became non-finite in round " + std::to_string(round));

    if (early_stopping) {
      entry.validation = validation_objective(params, manifests, validation_pairs, config.smoothing);
      entry.improved = entry.validation > result.best_validation;
    } else {
      entry.validation = entry.objective_after;
      entry.improved = true;
    }
    if (entry.improved) {
      best_params = params;
      best_z = result.assignments;
      result.best_validation = entry.validation;
      result.best_round = round;
      stale = 0;
    } else {
      ++stale;
    }
    result.trace.push_back(entry);
    if (config.progress) config.progress(entry, params);
    if (stale >= config.patience) break;
    if (round == config.outer_rounds) break;

    const TopicDistributions dist(params, config.smoothing);
    sample_topic_assignments(params, dist, documents, result.assignments, derive_seed(config.seed, 3, round),
                             config.workers);
    objective.set_assignments(result.assignments);
  }

  result.params = std::move(best_params);
  result.assignments = std::move(best_z);
  return result;
}

TrainResult train(const Corpus& corpus, const DocumentSet& documents, std::size_t vocab_size,
                  const TopicAllocation& allocation, const PairDataset& dataset, const TrainConfig& config) {
  auto params = make_params(corpus, allocation, vocab_size, dataset.graphs);
  initialize_uniform(params, derive_seed(config.seed, 1));
  const ManifestTable manifests(corpus);
  return train_from(std::move(params), manifests, documents, dataset, config, true);
}

SolverReport fit_logistic(ModelParams& params, const DocumentSet& documents, const ManifestTable& manifests,
                          std::span<const TrainingPair> pairs, const TrainConfig& config) {
  ObjectiveOptions options;
  options.l2 = config.l2;
  options.smoothing = config.smoothing;
  options.corpus_term = false;
  options.workers = config.workers;
  Objective objective(params, documents, manifests, pairs, options);
  return maximize(objective, params.values(), params.beta_begin(), params.size(), config.inner);
}

}  // namespace sceptre
