#include "mlrec/recommender.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "mlrec/error.hpp"
#include "mlrec/text.hpp"

namespace mlrec {

namespace {

constexpr std::size_t kNotItem = std::numeric_limits<std::size_t>::max();

std::string describe(const SeedSpec& seeds) {
  std::string out;
  for (const auto& s : seeds.seeds) {
    if (!out.empty()) out += '+';
    out += s.entity;
    if (s.role) out += ':' + *s.role;
  }
  return out;
}

bool contains_sorted(const std::vector<std::size_t>& sorted, std::size_t value) {
  return std::binary_search(sorted.begin(), sorted.end(), value);
}

}  // namespace

Seed parse_seed(std::string_view text, std::span<const std::string> known_roles) {
  Seed seed;
  const std::size_t at = text.rfind('@');
  if (at != std::string_view::npos) {
    seed.weight = parse_double(text.substr(at + 1));
    if (!(seed.weight >= 0.0) || !std::isfinite(seed.weight)) {
      throw InputError("seed weight must be finite and non-negative: '" + std::string(text) + "'");
    }
    text = text.substr(0, at);
  }
  const std::size_t colon = text.rfind(':');
  if (colon != std::string_view::npos) {
    const std::string_view role = text.substr(colon + 1);
    if (std::find(known_roles.begin(), known_roles.end(), role) != known_roles.end()) {
      seed.role = std::string(role);
      text = text.substr(0, colon);
    }
  }
  if (text.empty()) throw InputError("empty seed entity");
  seed.entity = std::string(text);
  return seed;
}

void FilterConfig::validate() const {
  if (std::isnan(theta)) throw InputError("theta must be a number");
  if (top_k < 1) throw InputError("top_k must be at least 1");
}

std::vector<double> make_teleport_vector(const SeedSpec& seeds, const SupraAdjacency& graph) {
  const double beta = seeds.seed_mass;
  if (!(beta > 0.0 && beta <= 1.0)) throw InputError("seed mass must be in (0, 1]");
  if (seeds.seeds.empty()) throw InputError("at least one seed is required");
  double total = 0.0;
  for (const auto& s : seeds.seeds) {
    if (!(s.weight >= 0.0) || !std::isfinite(s.weight)) {
      throw InputError("seed weight for '" + s.entity + "' must be finite and non-negative");
    }
    total += s.weight;
  }
  if (!(total > 0.0)) throw InputError("seed weights must not all be zero");

  const std::size_t n = graph.size();
  std::vector<double> v(n, (1.0 - beta) / static_cast<double>(n));
  for (const auto& s : seeds.seeds) {
    std::vector<std::size_t> nodes;
    if (s.role) {
      nodes.push_back(graph.node(s.entity, *s.role));
    } else {
      const auto entity = graph.entities().find(s.entity);
      if (!entity) {
        std::vector<std::string> ids;
        for (const auto& e : graph.entities()) ids.push_back(e.id);
        throw UnknownEntityError("unknown entity '" + s.entity + "'", near_misses(s.entity, ids));
      }
      nodes = graph.entity_nodes(*entity);
    }
    const double share = beta * (s.weight / total) / static_cast<double>(nodes.size());
    for (std::size_t node : nodes) v[node] += share;
  }
  return v;
}

RankedList rank_nodes(const SupraAdjacency& graph, std::span<const double> scores) {
  if (scores.size() != graph.size()) throw InputError("score vector does not match the graph");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  RankedList out;
  out.entries.reserve(order.size());
  for (std::size_t i : order) out.entries.push_back({i, graph.node_label(i), scores[i], 0.0});
  return out;
}

RankedList filter_thematic(const RankedList& ranked, std::span<const double> unseeded, const FilterConfig& config,
                           std::span<const std::size_t> excluded) {
  config.validate();
  RankedList out;
  out.seed = ranked.seed;
  out.theta = config.theta;
  out.rho = ranked.rho;
  if (config.theta == std::numeric_limits<double>::infinity()) return out;
  std::vector<std::size_t> skip(excluded.begin(), excluded.end());
  std::sort(skip.begin(), skip.end());
  // Ratio form keeps theta = 0 exact: pi_i >= pi*_i.
  const double factor = std::pow(10.0, config.theta);
  for (const auto& e : ranked.entries) {
    if (out.entries.size() >= config.top_k) break;
    if (contains_sorted(skip, e.index)) continue;
    if (e.index >= unseeded.size()) throw InputError("unseeded scores do not cover ranked entry " + e.id);
    const double base = unseeded[e.index];
    const bool keep = base == 0.0 ? (e.score > 0.0 || factor == 0.0) : e.score >= base * factor;
    if (!keep) continue;
    RankedEntry kept = e;
    kept.log10_gain = base == 0.0 ? std::numeric_limits<double>::infinity() : std::log10(e.score / base);
    out.entries.push_back(std::move(kept));
  }
  return out;
}

void RecommenderConfig::validate() const {
  pagerank.validate();
  filter.validate();
  if (!(seed_mass > 0.0 && seed_mass <= 1.0)) throw InputError("seed mass must be in (0, 1]");
}

ItemProjection::ItemProjection(const SupraAdjacency& graph, std::span<const std::string> item_roles) {
  const RoleSchema& schema = graph.schema();
  std::vector<char> is_item(schema.roles.size(), item_roles.empty() ? 1 : 0);
  for (const auto& id : item_roles) {
    const auto r = schema.role_index(id);
    if (!r) throw InputError("unknown item role '" + id + "'");
    is_item[*r] = 1;
  }
  const EntitySet& entities = graph.entities();
  position_.assign(entities.size(), kNotItem);
  offsets_.push_back(0);
  for (std::size_t e = 0; e < entities.size(); ++e) {
    const std::size_t before = nodes_.size();
    for (std::size_t r = 0; r < schema.roles.size(); ++r) {
      if (is_item[r] && schema.roles[r].entity_type == entities[e].type) {
        nodes_.push_back(graph.role_offset(r) + entities.local_index(e));
      }
    }
    if (nodes_.size() == before) continue;
    position_[e] = entities_.size();
    entities_.push_back(e);
    offsets_.push_back(nodes_.size());
  }
}

std::optional<std::size_t> ItemProjection::position(std::size_t entity) const {
  if (entity >= position_.size() || position_[entity] == kNotItem) return std::nullopt;
  return position_[entity];
}

std::vector<double> ItemProjection::project(std::span<const double> node_scores) const {
  std::vector<double> out(entities_.size(), 0.0);
  for (std::size_t i = 0; i < entities_.size(); ++i) {
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) out[i] += node_scores[nodes_[k]];
  }
  return out;
}

Recommender::Recommender(const SupraAdjacency& graph, const SalienceMatrix& salience, RecommenderConfig config)
    : graph_(&graph),
      config_(std::move(config)),
      salience_hash_(salience.hash()),
      transition_((config_.validate(), column_normalize(apply_salience(graph, salience)))),
      unseeded_(unseeded_pagerank(transition_, config_.pagerank)),
      items_(graph, config_.item_roles),
      unseeded_items_(items_.project(unseeded_.scores)) {}

PageRankSolution Recommender::solve(const SeedSpec& seeds) const {
  const auto v = make_teleport_vector(seeds, *graph_);
  return pagerank(transition_, v, config_.pagerank);
}

RankedList Recommender::recommend(const SeedSpec& seeds, std::span<const std::size_t> also_exclude) const {
  const PageRankSolution solution = solve(seeds);
  const std::vector<double> scores = items_.project(solution.scores);

  std::vector<std::size_t> excluded;
  for (const auto& s : seeds.seeds) {
    if (auto pos = items_.position(*graph_->entities().find(s.entity))) excluded.push_back(*pos);
  }
  for (std::size_t e : also_exclude) {
    if (auto pos = items_.position(e)) excluded.push_back(*pos);
  }

  RankedList ranked;
  ranked.seed = describe(seeds);
  ranked.rho = config_.pagerank.rho;
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  ranked.entries.reserve(order.size());
  for (std::size_t i : order) ranked.entries.push_back({i, {}, scores[i], 0.0});

  RankedList out = filter_thematic(ranked, unseeded_items_, config_.filter, excluded);
  for (auto& e : out.entries) {
    e.index = items_.entities()[e.index];
    e.id = graph_->entities()[e.index].id;
  }
  return out;
}

RankedList Recommender::recommend_entity(std::string_view entity_id, std::span<const std::size_t> also_exclude) const {
  SeedSpec seeds;
  seeds.seeds.push_back({std::string(entity_id), std::nullopt, 1.0});
  seeds.seed_mass = config_.seed_mass;
  return recommend(seeds, also_exclude);
}

RankedList Recommender::rank_unseeded(std::span<const std::size_t> excluded, std::size_t top_k) const {
  std::vector<std::size_t> skip;
  for (std::size_t e : excluded) {
    if (auto pos = items_.position(e)) skip.push_back(*pos);
  }
  std::sort(skip.begin(), skip.end());
  std::vector<std::size_t> order(unseeded_items_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return unseeded_items_[a] > unseeded_items_[b]; });
  RankedList out;
  out.seed = "unseeded";
  out.theta = config_.filter.theta;
  out.rho = config_.pagerank.rho;
  for (std::size_t i : order) {
    if (out.entries.size() >= top_k) break;
    if (contains_sorted(skip, i)) continue;
    const std::size_t entity = items_.entities()[i];
    out.entries.push_back({entity, graph_->entities()[entity].id, unseeded_items_[i], 0.0});
  }
  return out;
}

std::string Recommender::cache_key() const {
  Hasher h;
  h.update(std::string_view("recommender-v1")).update(graph_->hash()).update(salience_hash_);
  h.update(config_.pagerank.rho).update(to_string(config_.pagerank.solver)).update(config_.pagerank.tolerance);
  h.update(static_cast<std::uint64_t>(config_.pagerank.max_iterations));
  h.update(config_.filter.theta).update(static_cast<std::uint64_t>(config_.filter.top_k));
  h.update(config_.seed_mass);
  for (const auto& r : config_.item_roles) h.update(r);
  return h.hex();
}

RankedList recommend(const SupraAdjacency& graph, const SalienceMatrix& salience, const SeedSpec& seeds,
                     const PageRankConfig& pagerank, const FilterConfig& filter,
                     std::span<const std::string> item_roles) {
  RecommenderConfig config;
  config.pagerank = pagerank;
  config.filter = filter;
  config.seed_mass = seeds.seed_mass;
  config.item_roles.assign(item_roles.begin(), item_roles.end());
  return Recommender(graph, salience, std::move(config)).recommend(seeds);
}

PrecomputeResult precompute_seed_rankings(const Recommender& recommender, std::span<const std::string> seed_items) {
  const std::size_t count = seed_items.size();
  std::vector<std::optional<RankedList>> lists(count);
  std::vector<std::string> errors(count);
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      lists[k] = recommender.recommend_entity(seed_items[k]);
    } catch (const std::exception& e) {
      errors[k] = e.what();
      if (errors[k].empty()) errors[k] = "unknown error";
    }
  }
  PrecomputeResult out;
  for (std::size_t k = 0; k < count; ++k) {
    if (lists[k]) {
      out.rankings.insert_or_assign(seed_items[k], std::move(*lists[k]));
    } else {
      out.errors.insert_or_assign(seed_items[k], errors[k]);
    }
  }
  return out;
}

}  // namespace mlrec
