#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlrec/dynamics.hpp"
#include "mlrec/graph.hpp"

namespace mlrec {

struct Seed {
  std::string entity;
  std::optional<std::string> role;  // unset: spread over all roles of the entity
  double weight = 1.0;
};

struct SeedSpec {
  std::vector<Seed> seeds;
  double seed_mass = 1.0;  // beta
};

// `entity[:role][@weight]`. The part after the last ':' is read as a role only
// when `known_roles` contains it, so entity ids may themselves contain ':'.
Seed parse_seed(std::string_view text, std::span<const std::string> known_roles);

struct FilterConfig {
  double theta = 0.0;
  std::size_t top_k = 300;

  void validate() const;
};

struct RankedEntry {
  std::size_t index = 0;  // node or entity index, depending on the list
  std::string id;
  double score = 0.0;
  double log10_gain = 0.0;  // log10(score / unseeded score)

  bool operator==(const RankedEntry&) const = default;
};

struct RankedList {
  std::string seed;
  double theta = 0.0;
  double rho = 0.0;
  std::vector<RankedEntry> entries;

  bool operator==(const RankedList&) const = default;
};

// beta spread over the seeds in proportion to their weights, 1 - beta spread
// uniformly over all nodes.
std::vector<double> make_teleport_vector(const SeedSpec& seeds, const SupraAdjacency& graph);

// All nodes by descending score, ties by ascending node index. Entries carry
// node labels (`entity@role`).
RankedList rank_nodes(const SupraAdjacency& graph, std::span<const double> scores);

// Keeps entries with score >= unseeded * 10^theta, in order, skipping the
// excluded indices, then truncates to top_k. `unseeded` is indexed by
// RankedEntry::index. theta = +inf keeps nothing; an unseeded score of zero
// counts as an infinite gain.
RankedList filter_thematic(const RankedList& ranked, std::span<const double> unseeded, const FilterConfig& config,
                           std::span<const std::size_t> excluded = {});

struct RecommenderConfig {
  PageRankConfig pagerank;
  FilterConfig filter;
  double seed_mass = 1.0;
  // Roles whose nodes make up the recommendable items. Empty: every role.
  std::vector<std::string> item_roles;

  void validate() const;
};

// Item projection: the entities that own at least one node in an item role,
// with their item-role nodes.
class ItemProjection {
 public:
  ItemProjection(const SupraAdjacency& graph, std::span<const std::string> item_roles);

  std::size_t size() const { return entities_.size(); }
  std::span<const std::size_t> entities() const { return entities_; }
  std::optional<std::size_t> position(std::size_t entity) const;
  // Scores of each item entity: sum over its item-role nodes.
  std::vector<double> project(std::span<const double> node_scores) const;

 private:
  std::vector<std::size_t> entities_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> nodes_;
  std::vector<std::size_t> position_;  // entity -> item position, npos when not an item
};

// Caches T and pi* for one (graph, salience, config) and answers seeded
// queries. Queries only read shared state, so they may run concurrently.
class Recommender {
 public:
  Recommender(const SupraAdjacency& graph, const SalienceMatrix& salience, RecommenderConfig config);

  const SupraAdjacency& graph() const { return *graph_; }
  const RecommenderConfig& config() const { return config_; }
  const TransitionMatrix& transition() const { return transition_; }
  const PageRankSolution& unseeded() const { return unseeded_; }
  const ItemProjection& items() const { return items_; }
  const std::vector<double>& unseeded_items() const { return unseeded_items_; }

  // Seeded PageRank over nodes.
  PageRankSolution solve(const SeedSpec& seeds) const;

  // teleport -> PageRank -> project to items -> rank -> filter. Seeded
  // entities and `also_exclude` entities never appear.
  RankedList recommend(const SeedSpec& seeds, std::span<const std::size_t> also_exclude = {}) const;

  // Single seed on every role of one entity.
  RankedList recommend_entity(std::string_view entity_id, std::span<const std::size_t> also_exclude = {}) const;

  // Items ranked by pi*, unfiltered, excluding the given entities.
  RankedList rank_unseeded(std::span<const std::size_t> excluded, std::size_t top_k) const;

  // Identifies the inputs: graph, salience, every config field.
  std::string cache_key() const;

 private:
  const SupraAdjacency* graph_;
  RecommenderConfig config_;
  std::string salience_hash_;
  TransitionMatrix transition_;
  PageRankSolution unseeded_;
  ItemProjection items_;
  std::vector<double> unseeded_items_;
};

RankedList recommend(const SupraAdjacency& graph, const SalienceMatrix& salience, const SeedSpec& seeds,
                     const PageRankConfig& pagerank, const FilterConfig& filter,
                     std::span<const std::string> item_roles);

using RankingMap = std::map<std::string, RankedList, std::less<>>;

struct PrecomputeResult {
  RankingMap rankings;
  std::map<std::string, std::string, std::less<>> errors;  // seed -> message
};

// One entity-seeded ranking per seed, in parallel over seeds. Failures are
// collected per seed.
PrecomputeResult precompute_seed_rankings(const Recommender& recommender, std::span<const std::string> seed_items);

// Text cache with a version header. read returns nothing when the file is
// missing or was written for a different key.
void write_precompute_cache(const std::filesystem::path& path, std::string_view key, const PrecomputeResult& result);
std::optional<PrecomputeResult> read_precompute_cache(const std::filesystem::path& path, std::string_view key);

}  // namespace mlrec
