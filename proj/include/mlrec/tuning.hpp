#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlrec/dynamics.hpp"
#include "mlrec/evaluation.hpp"
#include "mlrec/graph.hpp"
#include "mlrec/recommender.hpp"

namespace mlrec {

struct ParamSample {
  SalienceMatrix salience;
  double rho = 0.12;
  std::size_t trial_id = 0;
  std::uint64_t rng_seed = 0;
};

// Structural blocks grouped by source role: one Dirichlet column each.
struct SalienceColumn {
  std::string source;
  std::vector<BlockKey> blocks;
};
std::vector<SalienceColumn> salience_columns(const RoleSchema& schema);

// One flat Dirichlet draw per column (normalised unit-rate gammas) and
// rho ~ U(0, 1) with 0 excluded.
ParamSample sample_parameters(const RoleSchema& schema, std::mt19937_64& rng);

// Per-trial seeds derive from the master seed, so trial i is reproducible on
// its own.
ParamSample sample_trial(const RoleSchema& schema, std::uint64_t master_seed, std::size_t trial_id);

// cutoff -> NMRG (percent)
using TrialScores = std::map<std::size_t, double>;
using Evaluator = std::function<TrialScores(const ParamSample&)>;

struct Trial {
  ParamSample params;
  TrialScores scores;
  std::string error;  // set when the evaluator failed
  double seconds = 0.0;
};

struct SearchResult {
  std::size_t objective_k = 10;
  std::vector<Trial> trials;
  std::optional<std::size_t> best;                    // index into trials
  std::vector<std::optional<double>> cumulative_best;  // best objective up to each trial
};

// Trials run one after another; `on_trial` sees each as soon as it finishes.
SearchResult random_search(std::size_t n_trials, const Evaluator& evaluator, const RoleSchema& schema,
                           std::uint64_t master_seed, std::size_t objective_k = 10,
                           const std::function<void(const Trial&)>& on_trial = {});

// One JSON object per trial.
std::string trial_to_json(const Trial& trial);

struct SweepPoint {
  double rho = 0.0;
  TrialScores scores;
  std::string error;
};

struct SweepResult {
  std::size_t objective_k = 10;
  std::vector<SweepPoint> points;
  std::optional<std::size_t> best;
};

SweepResult teleport_sweep(const ParamSample& base, std::span<const double> grid, const Evaluator& evaluator,
                           std::size_t objective_k = 10);

// 20 log-spaced points from 0.01 to 0.9.
std::vector<double> default_sweep_grid();

// "a:b:n" is n evenly spaced points from a to b inclusive; otherwise a comma
// separated list. Every value must lie in (0, 1).
std::vector<double> parse_grid(std::string_view text);

// Two-stage objective: precompute one ranking per relevant item, then NMRG
// over the users. With a subsample, a fixed random subset of users is used.
class NmrgObjective {
 public:
  NmrgObjective(const SupraAdjacency& graph, std::vector<UserRelevance> users, RecommenderConfig base,
                std::vector<std::size_t> cutoffs, std::size_t user_subsample = 0, std::uint64_t rng_seed = 0);

  TrialScores operator()(const ParamSample& sample) const;
  std::span<const UserRelevance> users() const { return users_; }
  std::span<const std::string> seed_items() const { return seed_items_; }

 private:
  const SupraAdjacency* graph_;
  std::vector<UserRelevance> users_;
  RecommenderConfig base_;
  std::vector<std::size_t> cutoffs_;
  std::vector<std::string> seed_items_;
};

}  // namespace mlrec
