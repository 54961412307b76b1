#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlrec/graph.hpp"
#include "mlrec/recommender.hpp"

namespace mlrec {

// Items a user finds relevant, with relevance tau > 0.
struct UserRelevance {
  std::string user_id;
  std::map<std::string, double, std::less<>> items;
};

struct MaxRelevance {
  std::string item;
  std::size_t rank = 0;  // 1-based
};

// Highest-ranked item of M_u other than the seed within the first k entries.
// Nothing when none of them is relevant. Throws when the seed is not in M_u.
std::optional<MaxRelevance> max_relevance_item(const RankedList& ranking, std::size_t k, const UserRelevance& user,
                                               std::string_view seed);

// Normalised maximum relevance gain at cutoff k. Seeds without a ranking
// contribute 0 and are counted in `missing`.
double nmrg_user(const UserRelevance& user, const RankingMap& rankings, std::size_t k,
                 std::size_t* missing = nullptr);

struct CutoffSummary {
  std::size_t k = 0;
  double mean = 0.0;             // percent
  double ci_half_width = 0.0;    // percent, 99% normal approximation
  std::size_t users = 0;
};

struct EvalReport {
  std::string method;
  std::uint64_t rng_seed = 0;
  std::vector<CutoffSummary> cutoffs;
  std::vector<std::string> user_ids;             // sorted
  std::vector<std::vector<double>> user_scores;  // [cutoff][user], in [0, 1]
  std::size_t skipped_users = 0;                 // fewer than two relevant items
  std::size_t missing_rankings = 0;              // per user-seed pair, first cutoff

  const CutoffSummary& at(std::size_t k) const;
};

// Users are evaluated in parallel and summed in user-id order.
EvalReport nmrg_corpus(std::span<const UserRelevance> users, const RankingMap& rankings,
                       std::span<const std::size_t> cutoffs);

// Human table followed by one JSON record per cutoff, each line of the header
// prefixed with '#'.
std::string format_report(const EvalReport& report, std::string_view config_hash);

// --- datasets -------------------------------------------------------------

struct RatingRecord {
  std::string user_id;
  std::string item_id;
  double rating = 0.0;
  std::int64_t timestamp = 0;
};

// user_id,item_id,rating,timestamp
std::vector<RatingRecord> load_rating_records(const std::filesystem::path& path);
void write_rating_records(const std::filesystem::path& path, std::span<const RatingRecord> records);

// Groups records by user, tau = rating. Users come out sorted by id.
std::vector<UserRelevance> relevance_from_ratings(std::span<const RatingRecord> records);

using PopularityTable = std::map<std::string, double, std::less<>>;
using KeywordTable = std::map<std::string, std::set<std::string, std::less<>>, std::less<>>;

// item_id,popularity
PopularityTable load_popularity(const std::filesystem::path& path);
void write_popularity(const std::filesystem::path& path, const PopularityTable& table);
// item_id,keyword
KeywordTable load_keywords(const std::filesystem::path& path);
void write_keywords(const std::filesystem::path& path, const KeywordTable& table);

// --- baselines ------------------------------------------------------------

enum class BaselineKind { popularity, random_seed, random_item, unseeded, keyword_dice };

std::string_view to_string(BaselineKind kind);
BaselineKind parse_baseline(std::string_view text);

// Items ordered by popularity; answers "the n items closest in popularity".
class PopularityIndex {
 public:
  explicit PopularityIndex(const PopularityTable& table);

  std::size_t size() const { return items_.size(); }
  const std::string& item(std::size_t i) const { return items_[i]; }
  std::optional<std::size_t> find(std::string_view item) const;
  // Up to n other items nearest by |p - p_item|, ties by item id.
  std::vector<std::size_t> nearest(std::size_t i, std::size_t n) const;
  // Descending popularity, ties by item id.
  std::span<const std::size_t> by_popularity() const { return ranked_; }

 private:
  std::vector<std::string> items_;   // sorted by id
  std::vector<double> popularity_;
  std::vector<std::size_t> ascending_;  // item positions by popularity, ties by id
  std::vector<std::size_t> rank_of_;
  std::vector<std::size_t> ranked_;
};

struct BaselineContext {
  const PopularityTable* popularity = nullptr;
  const KeywordTable* keywords = nullptr;
  const Recommender* recommender = nullptr;
  // Thematic rankings that random_item perturbs; computed when absent.
  const RankingMap* thematic = nullptr;
  std::uint64_t rng_seed = 0;
  std::size_t top_k = 300;
  std::size_t neighbours = 25;
};

// Per-seed randomness comes from mix_seed(rng_seed, hash(seed)), so results do
// not depend on seed order or thread count.
RankingMap baseline_rankings(BaselineKind kind, const BaselineContext& context, std::span<const std::string> seeds);

double dice(const std::set<std::string, std::less<>>& a, const std::set<std::string, std::less<>>& b);

// --- thematic signal ------------------------------------------------------

struct DistanceSummary {
  std::string label;
  std::vector<std::uint32_t> distances;  // finite pairwise hop counts
  std::size_t unreachable = 0;
  double mean = 0.0;
  std::map<std::uint32_t, std::size_t> histogram;
};

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p_less = 1.0;       // one-sided, mean(a) < mean(b)
  double p_two_sided = 1.0;
};

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

struct SignalTestConfig {
  std::size_t users = 1000;
  std::uint64_t rng_seed = 0;
  std::size_t neighbours = 25;
  std::vector<std::string> item_roles;  // empty: every role
};

struct SignalTestResult {
  DistanceSummary user_sets;
  DistanceSummary popularity_matched;
  DistanceSummary uniform;
  WelchResult user_vs_uniform;
  WelchResult user_vs_popularity;
  std::size_t users_sampled = 0;
  std::size_t users_skipped = 0;
};

// Pairwise geodesics within each sampled user's item set, within
// popularity-matched replacement sets, and within uniform random sets.
SignalTestResult thematic_signal_test(std::span<const UserRelevance> users, const SupraAdjacency& graph,
                                      const PopularityTable& popularity, const SignalTestConfig& config);

std::string format_signal_report(const SignalTestResult& result, std::string_view config_hash);

}  // namespace mlrec
