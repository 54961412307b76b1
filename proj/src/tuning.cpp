#include "mlrec/tuning.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "log.hpp"
#include "mlrec/error.hpp"
#include "mlrec/text.hpp"

namespace mlrec {

std::vector<SalienceColumn> salience_columns(const RoleSchema& schema) {
  std::vector<SalienceColumn> columns;
  for (const auto& role : schema.roles) columns.push_back({role.id, {}});
  for (const auto& key : structural_blocks(schema)) {
    columns[*schema.role_index(key.source)].blocks.push_back(key);
  }
  for (const auto& c : columns) {
    if (c.blocks.empty()) throw InputError("role '" + c.source + "' has no outgoing blocks to sample saliences for");
  }
  return columns;
}

ParamSample sample_parameters(const RoleSchema& schema, std::mt19937_64& rng) {
  ParamSample sample;
  std::gamma_distribution<double> gamma(1.0, 1.0);
  for (const auto& column : salience_columns(schema)) {
    std::vector<double> draws(column.blocks.size());
    double total = 0.0;
    while (!(total > 0.0)) {
      total = 0.0;
      for (double& d : draws) {
        d = gamma(rng);
        total += d;
      }
    }
    for (std::size_t i = 0; i < draws.size(); ++i) sample.salience.blocks[column.blocks[i]] = draws[i] / total;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  do {
    sample.rho = unit(rng);
  } while (sample.rho == 0.0);
  return sample;
}

ParamSample sample_trial(const RoleSchema& schema, std::uint64_t master_seed, std::size_t trial_id) {
  const std::uint64_t seed = mix_seed(master_seed, trial_id);
  std::mt19937_64 rng(seed);
  ParamSample sample = sample_parameters(schema, rng);
  sample.trial_id = trial_id;
  sample.rng_seed = seed;
  return sample;
}

SearchResult random_search(std::size_t n_trials, const Evaluator& evaluator, const RoleSchema& schema,
                           std::uint64_t master_seed, std::size_t objective_k,
                           const std::function<void(const Trial&)>& on_trial) {
  if (n_trials < 1) throw InputError("random search needs at least one trial");
  SearchResult result;
  result.objective_k = objective_k;
  std::optional<double> best;
  for (std::size_t t = 0; t < n_trials; ++t) {
    Trial trial;
    trial.params = sample_trial(schema, master_seed, t);
    const auto start = std::chrono::steady_clock::now();
    try {
      trial.scores = evaluator(trial.params);
    } catch (const std::exception& e) {
      trial.error = e.what();
      detail::logger().warn("trial {} failed: {}", t, trial.error);
    }
    trial.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (trial.error.empty()) {
      const auto it = trial.scores.find(objective_k);
      if (it == trial.scores.end()) {
        trial.error = "evaluator returned no score at cutoff " + std::to_string(objective_k);
      } else if (!best || it->second > *best) {
        best = it->second;
        result.best = t;
      }
    }
    result.cumulative_best.push_back(best);
    if (on_trial) on_trial(trial);
    result.trials.push_back(std::move(trial));
  }
  return result;
}

std::string trial_to_json(const Trial& trial) {
  nlohmann::ordered_json rec;
  rec["trial"] = trial.params.trial_id;
  rec["rng_seed"] = trial.params.rng_seed;
  rec["rho"] = trial.params.rho;
  nlohmann::ordered_json salience = nlohmann::ordered_json::object();
  for (const auto& [key, value] : trial.params.salience.blocks) salience[key.target + "," + key.source] = value;
  rec["salience"] = salience;
  nlohmann::ordered_json scores = nlohmann::ordered_json::object();
  for (const auto& [k, v] : trial.scores) scores["nmrg@" + std::to_string(k)] = v;
  rec["scores"] = scores;
  if (!trial.error.empty()) rec["error"] = trial.error;
  rec["seconds"] = trial.seconds;
  return rec.dump();
}

SweepResult teleport_sweep(const ParamSample& base, std::span<const double> grid, const Evaluator& evaluator,
                           std::size_t objective_k) {
  if (grid.empty()) throw InputError("teleport sweep needs a non-empty grid");
  SweepResult result;
  result.objective_k = objective_k;
  std::optional<double> best;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0 && grid[i] < 1.0)) throw InputError("sweep values must lie in (0, 1)");
    SweepPoint point;
    point.rho = grid[i];
    ParamSample sample = base;
    sample.rho = grid[i];
    try {
      point.scores = evaluator(sample);
    } catch (const std::exception& e) {
      point.error = e.what();
      detail::logger().warn("sweep point rho={} failed: {}", grid[i], point.error);
    }
    const auto it = point.scores.find(objective_k);
    if (point.error.empty() && it != point.scores.end() && (!best || it->second > *best)) {
      best = it->second;
      result.best = i;
    }
    result.points.push_back(std::move(point));
  }
  return result;
}

std::vector<double> default_sweep_grid() {
  constexpr int kPoints = 20;
  const double lo = std::log(0.01);
  const double hi = std::log(0.9);
  std::vector<double> grid;
  for (int i = 0; i < kPoints; ++i) grid.push_back(std::exp(lo + (hi - lo) * i / (kPoints - 1)));
  grid.front() = 0.01;
  grid.back() = 0.9;
  return grid;
}

std::vector<double> parse_grid(std::string_view text) {
  std::vector<double> grid;
  if (std::count(text.begin(), text.end(), ':') == 2) {
    const std::size_t c1 = text.find(':');
    const std::size_t c2 = text.find(':', c1 + 1);
    const double a = parse_double(text.substr(0, c1));
    const double b = parse_double(text.substr(c1 + 1, c2 - c1 - 1));
    const auto n = parse_int(text.substr(c2 + 1));
    if (n < 1) throw InputError("grid point count must be at least 1");
    for (std::int64_t i = 0; i < n; ++i) {
      grid.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    if (n > 1) grid.back() = b;
  } else {
    for (const auto& field : split_record(text, ',')) grid.push_back(parse_double(field));
  }
  if (grid.empty()) throw InputError("empty grid");
  for (double r : grid) {
    if (!(r > 0.0 && r < 1.0)) throw InputError("grid value " + format_double(r) + " is outside (0, 1)");
  }
  return grid;
}

NmrgObjective::NmrgObjective(const SupraAdjacency& graph, std::vector<UserRelevance> users, RecommenderConfig base,
                             std::vector<std::size_t> cutoffs, std::size_t user_subsample, std::uint64_t rng_seed)
    : graph_(&graph), users_(std::move(users)), base_(std::move(base)), cutoffs_(std::move(cutoffs)) {
  std::sort(users_.begin(), users_.end(),
            [](const UserRelevance& a, const UserRelevance& b) { return a.user_id < b.user_id; });
  if (user_subsample > 0 && user_subsample < users_.size()) {
    std::mt19937_64 rng(mix_seed(rng_seed, 0x73756273));
    std::shuffle(users_.begin(), users_.end(), rng);
    users_.resize(user_subsample);
    std::sort(users_.begin(), users_.end(),
              [](const UserRelevance& a, const UserRelevance& b) { return a.user_id < b.user_id; });
  }
  std::set<std::string> items;
  for (const auto& u : users_) {
    if (u.items.size() < 2) continue;
    for (const auto& [id, tau] : u.items) items.insert(id);
  }
  seed_items_.assign(items.begin(), items.end());
}

TrialScores NmrgObjective::operator()(const ParamSample& sample) const {
  RecommenderConfig config = base_;
  config.pagerank.rho = sample.rho;
  const Recommender rec(*graph_, sample.salience, std::move(config));
  const PrecomputeResult pre = precompute_seed_rankings(rec, seed_items_);
  const EvalReport report = nmrg_corpus(users_, pre.rankings, cutoffs_);
  TrialScores scores;
  for (const auto& c : report.cutoffs) scores[c.k] = c.mean;
  return scores;
}

}  // namespace mlrec
