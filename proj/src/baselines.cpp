#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

#include "log.hpp"
#include "mlrec/error.hpp"
#include "mlrec/evaluation.hpp"
#include "mlrec/text.hpp"

namespace mlrec {

std::string_view to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::popularity: return "popularity";
    case BaselineKind::random_seed: return "random_seed";
    case BaselineKind::random_item: return "random_item";
    case BaselineKind::unseeded: return "unseeded";
    case BaselineKind::keyword_dice: return "keyword_dice";
  }
  return "unknown";
}

BaselineKind parse_baseline(std::string_view text) {
  for (auto kind : {BaselineKind::popularity, BaselineKind::random_seed, BaselineKind::random_item,
                    BaselineKind::unseeded, BaselineKind::keyword_dice}) {
    if (to_string(kind) == text) return kind;
  }
  throw InputError("unknown baseline '" + std::string(text) + "'");
}

PopularityIndex::PopularityIndex(const PopularityTable& table) {
  for (const auto& [item, p] : table) {
    items_.push_back(item);
    popularity_.push_back(p);
  }
  ascending_.resize(items_.size());
  std::iota(ascending_.begin(), ascending_.end(), 0);
  std::stable_sort(ascending_.begin(), ascending_.end(),
                   [&](std::size_t a, std::size_t b) { return popularity_[a] < popularity_[b]; });
  rank_of_.resize(items_.size());
  for (std::size_t r = 0; r < ascending_.size(); ++r) rank_of_[ascending_[r]] = r;
  ranked_.resize(items_.size());
  std::iota(ranked_.begin(), ranked_.end(), 0);
  std::stable_sort(ranked_.begin(), ranked_.end(),
                   [&](std::size_t a, std::size_t b) { return popularity_[a] > popularity_[b]; });
}

std::optional<std::size_t> PopularityIndex::find(std::string_view item) const {
  const auto it = std::lower_bound(items_.begin(), items_.end(), item);
  if (it == items_.end() || *it != item) return std::nullopt;
  return static_cast<std::size_t>(it - items_.begin());
}

std::vector<std::size_t> PopularityIndex::nearest(std::size_t i, std::size_t n) const {
  std::vector<std::size_t> out;
  const double p = popularity_[i];
  std::size_t lo = rank_of_[i];  // next candidate below is ascending_[lo - 1]
  std::size_t hi = rank_of_[i] + 1;
  while (out.size() < n && (lo > 0 || hi < ascending_.size())) {
    bool take_low;
    if (lo == 0) {
      take_low = false;
    } else if (hi == ascending_.size()) {
      take_low = true;
    } else {
      const std::size_t a = ascending_[lo - 1];
      const std::size_t b = ascending_[hi];
      const double da = p - popularity_[a];
      const double db = popularity_[b] - p;
      take_low = da < db || (da == db && a < b);
    }
    if (take_low) {
      out.push_back(ascending_[--lo]);
    } else {
      out.push_back(ascending_[hi++]);
    }
  }
  return out;
}

double dice(const std::set<std::string, std::less<>>& a, const std::set<std::string, std::less<>>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& x : a) common += b.contains(x) ? 1 : 0;
  return 2.0 * static_cast<double>(common) / static_cast<double>(a.size() + b.size());
}

namespace {

std::mt19937_64 seed_rng(std::uint64_t base, std::string_view seed) {
  return std::mt19937_64(mix_seed(base, Hasher().update(seed).digest()));
}

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

const Recommender& need_recommender(const BaselineContext& ctx, BaselineKind kind) {
  if (!ctx.recommender) throw InputError(std::string(to_string(kind)) + " baseline needs a recommender");
  return *ctx.recommender;
}

const PopularityTable& need_popularity(const BaselineContext& ctx, BaselineKind kind) {
  if (!ctx.popularity) throw InputError(std::string(to_string(kind)) + " baseline needs popularity data");
  return *ctx.popularity;
}

// Restricts the table to items the recommender can seed.
PopularityTable graph_items(const PopularityTable& table, const Recommender& rec) {
  PopularityTable out;
  const EntitySet& entities = rec.graph().entities();
  for (const auto& [item, p] : table) {
    const auto e = entities.find(item);
    if (e && rec.items().position(*e)) out.emplace(item, p);
  }
  return out;
}

std::vector<std::size_t> entity_of(const Recommender& rec, std::string_view id) {
  if (auto e = rec.graph().entities().find(id)) return {*e};
  return {};
}

template <class Fn>
RankingMap per_seed(std::span<const std::string> seeds, BaselineKind kind, Fn fn) {
  const std::size_t n = seeds.size();
  std::vector<std::optional<RankedList>> lists(n);
  std::vector<std::string> errors(n);
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      lists[k] = fn(seeds[k]);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  }
  RankingMap out;
  std::size_t failed = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (lists[k]) {
      out.insert_or_assign(seeds[k], std::move(*lists[k]));
    } else {
      ++failed;
      detail::logger().debug("{} baseline, seed {}: {}", to_string(kind), seeds[k], errors[k]);
    }
  }
  if (failed > 0) detail::logger().warn("{} baseline produced no ranking for {} seed(s)", to_string(kind), failed);
  return out;
}

}  // namespace

RankingMap baseline_rankings(BaselineKind kind, const BaselineContext& ctx, std::span<const std::string> seeds) {
  if (ctx.top_k < 1) throw InputError("top_k must be at least 1");
  switch (kind) {
    case BaselineKind::popularity: {
      const PopularityIndex index(need_popularity(ctx, kind));
      return per_seed(seeds, kind, [&](const std::string& seed) {
        RankedList list;
        list.seed = seed;
        for (std::size_t i : index.by_popularity()) {
          if (list.entries.size() >= ctx.top_k) break;
          if (index.item(i) == seed) continue;
          list.entries.push_back({i, index.item(i), ctx.popularity->at(index.item(i)), 0.0});
        }
        return list;
      });
    }
    case BaselineKind::unseeded: {
      const Recommender& rec = need_recommender(ctx, kind);
      return per_seed(seeds, kind, [&](const std::string& seed) {
        RankedList list = rec.rank_unseeded(entity_of(rec, seed), ctx.top_k);
        list.seed = seed;
        return list;
      });
    }
    case BaselineKind::random_seed: {
      const Recommender& rec = need_recommender(ctx, kind);
      const PopularityTable table = graph_items(need_popularity(ctx, kind), rec);
      const PopularityIndex index(table);
      return per_seed(seeds, kind, [&](const std::string& seed) {
        const auto pos = index.find(seed);
        if (!pos) throw InputError("no popularity for seed '" + seed + "'");
        const auto candidates = index.nearest(*pos, ctx.neighbours);
        if (candidates.empty()) throw InputError("no replacement candidates for '" + seed + "'");
        auto rng = seed_rng(ctx.rng_seed, seed);
        const std::string& replacement = index.item(candidates[pick(rng, candidates.size())]);
        RankedList list = rec.recommend_entity(replacement, entity_of(rec, seed));
        list.seed = seed;
        return list;
      });
    }
    case BaselineKind::random_item: {
      const PopularityIndex index(need_popularity(ctx, kind));
      if (!ctx.thematic) need_recommender(ctx, kind);
      return per_seed(seeds, kind, [&](const std::string& seed) {
        RankedList base;
        if (ctx.thematic) {
          const auto it = ctx.thematic->find(seed);
          if (it == ctx.thematic->end()) throw InputError("no thematic ranking for '" + seed + "'");
          base = it->second;
        } else {
          base = ctx.recommender->recommend_entity(seed);
        }
        auto rng = seed_rng(ctx.rng_seed, seed);
        std::set<std::string, std::less<>> used{seed};
        for (const auto& e : base.entries) used.insert(e.id);
        RankedList list;
        list.seed = seed;
        list.theta = base.theta;
        list.rho = base.rho;
        for (const auto& e : base.entries) {
          const auto pos = index.find(e.id);
          if (!pos) {
            list.entries.push_back(e);
            continue;
          }
          const auto candidates = index.nearest(*pos, ctx.neighbours);
          std::vector<std::size_t> fresh;
          for (std::size_t c : candidates) {
            if (!used.contains(index.item(c))) fresh.push_back(c);
          }
          const auto& pool = fresh.empty() ? candidates : fresh;
          if (pool.empty()) {
            list.entries.push_back(e);
            continue;
          }
          const std::size_t chosen = pool[pick(rng, pool.size())];
          used.insert(index.item(chosen));
          list.entries.push_back({chosen, index.item(chosen), e.score, e.log10_gain});
        }
        return list;
      });
    }
    case BaselineKind::keyword_dice: {
      if (!ctx.keywords) throw InputError("keyword_dice baseline needs keyword data");
      const KeywordTable& table = *ctx.keywords;
      std::vector<const std::string*> items;
      std::unordered_map<std::string, std::vector<std::size_t>> postings;
      for (const auto& [item, words] : table) {
        for (const auto& w : words) postings[w].push_back(items.size());
        items.push_back(&item);
      }
      std::vector<std::size_t> sizes;
      for (const auto& [item, words] : table) sizes.push_back(words.size());
      return per_seed(seeds, kind, [&](const std::string& seed) {
        const auto it = table.find(seed);
        if (it == table.end()) throw InputError("no keywords for seed '" + seed + "'");
        std::unordered_map<std::size_t, std::size_t> common;
        for (const auto& w : it->second) {
          for (std::size_t j : postings.at(w)) ++common[j];
        }
        std::vector<std::pair<double, std::size_t>> scored;
        for (const auto& [j, c] : common) {
          if (*items[j] == seed) continue;
          scored.emplace_back(2.0 * static_cast<double>(c) / static_cast<double>(it->second.size() + sizes[j]), j);
        }
        std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
          return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        RankedList list;
        list.seed = seed;
        for (std::size_t r = 0; r < scored.size() && r < ctx.top_k; ++r) {
          list.entries.push_back({scored[r].second, *items[scored[r].second], scored[r].first, 0.0});
        }
        return list;
      });
    }
  }
  throw InputError("unknown baseline");
}

}  // namespace mlrec
