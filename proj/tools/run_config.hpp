#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mlrec/recommender.hpp"

namespace mlrec::cli {

// Shared settings for every subcommand. JSON layout:
//   {"paths": {"graph", "salience", "dataset", "cache", "output"},
//    "pagerank": {"rho", "tolerance", "solver", "max_iterations"},
//    "filter": {"theta", "top_k"},
//    "seed_mass", "item_roles", "cutoffs", "train_fraction",
//    "rng_seed", "workers", "user_subsample"}
// Relative paths resolve against the config file's directory.
struct RunConfig {
  struct Paths {
    std::filesystem::path graph;
    std::filesystem::path salience;
    std::filesystem::path dataset;
    std::filesystem::path cache;
    std::filesystem::path output;
  } paths;
  RecommenderConfig recommender;
  std::vector<std::size_t> cutoffs{1, 10, 20};
  double train_fraction = 0.75;
  std::uint64_t rng_seed = 0;
  int workers = 0;  // 0: OpenMP default
  std::size_t user_subsample = 0;

  void validate() const;
  // Covers every setting that can change results; workers and paths are
  // excluded.
  std::string settings_hash() const;
};

RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);
std::string run_config_to_json(const RunConfig& config);

// MLREC_CACHE_DIR when set, else paths.cache, else nothing.
std::optional<std::filesystem::path> cache_dir(const RunConfig& config);

std::vector<std::size_t> parse_cutoffs(std::string_view text);

}  // namespace mlrec::cli
