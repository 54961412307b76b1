#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mlrec/evaluation.hpp"
#include "mlrec/graph.hpp"
#include "mlrec/graph_io.hpp"

namespace mlrec {

struct CastCredit {
  std::string person;
  std::int64_t order = 1;  // 1 = top billed
};

struct CrewCredit {
  std::string person;
  std::string job;
};

struct MovieMetadata {
  std::string id;  // TMDb id
  double popularity = 0.0;
  std::vector<CastCredit> cast;
  std::vector<CrewCredit> crew;
  std::vector<std::string> keywords;
};

// movies.jsonl, one object per line:
//   {"id": "603", "popularity": 41.2,
//    "cast": [{"person": "6384", "order": 1}, ...],
//    "crew": [{"person": "9339", "job": "Director"}, ...],
//    "keywords": ["4565", ...]}
std::vector<MovieMetadata> load_metadata(const std::filesystem::path& path);

struct WeightingConfig {
  double gamma = 1.0;          // popularity exponent
  bool credit_order = true;    // divide acting weights by log2(order + 1)
  std::set<std::string, std::less<>> director_jobs{"Director"};
  std::set<std::string, std::less<>> producer_jobs{"Producer"};
};

std::string movie_entity(std::string_view tmdb_id);
std::string person_entity(std::string_view id);
std::string keyword_entity(std::string_view id);

// Roles act, dir, prod (person), desc (keyword) and a single movie role;
// undirected layers acts_in, directs, produces, describes.
RoleSchema movie_kg_schema();

struct MovieKg {
  GraphInput input;
  std::size_t pruned_edges = 0;   // zero weight, e.g. popularity 0
  std::size_t dropped_movies = 0; // no edges left
};

MovieKg build_movie_kg(const std::vector<MovieMetadata>& movies, const WeightingConfig& weighting);

struct RawRating {
  std::string user_id;
  std::string movie_id;  // MovieLens id
  double rating = 0.0;
  std::int64_t timestamp = 0;
};

struct LoadedRatings {
  std::vector<RawRating> records;
  std::size_t malformed = 0;
};

// MovieLens ratings.csv: userId,movieId,rating,timestamp. Ratings must lie in
// [0.5, 5]; malformed rows are counted and skipped.
LoadedRatings load_movielens_ratings(const std::filesystem::path& path);

// MovieLens links.csv: movieId,imdbId,tmdbId -> movieId to KG movie entity.
std::map<std::string, std::string, std::less<>> load_links(const std::filesystem::path& path);

struct PipelineConfig {
  bool median_strict = true;         // keep ratings > median (else >=)
  std::size_t min_item_ratings = 3;  // movies with fewer are dropped
  std::size_t max_per_user = 250;
};

struct PipelineStep {
  std::string description;
  std::size_t ratings = 0;
  std::size_t movies = 0;
};

struct PipelineReport {
  std::size_t input_ratings = 0;
  std::size_t malformed = 0;
  std::vector<PipelineStep> steps;
};

struct PreprocessResult {
  std::vector<RatingRecord> ratings;  // item_id is the KG entity id
  PipelineReport report;
};

// (1) no KG id, (2) duplicates keep latest, (3) no metadata, (4) at or below
// the user's median, (5) movies with too few ratings, (6) per-user top N by
// rating then recency. Output sorted by user, then item.
PreprocessResult preprocess_ratings(std::span<const RawRating> records,
                                    const std::map<std::string, std::string, std::less<>>& links,
                                    const std::set<std::string, std::less<>>& kg_items, const PipelineConfig& config);

std::string format_pipeline_report(const PipelineReport& report);

// Shuffles the sorted ids and puts floor(fraction * n) in train.
std::pair<std::vector<std::string>, std::vector<std::string>> split_train_test(std::vector<std::string> users,
                                                                               double train_fraction,
                                                                               std::uint64_t rng_seed);

}  // namespace mlrec
