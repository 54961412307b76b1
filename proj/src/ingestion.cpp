#include "mlrec/ingestion.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>

#include "log.hpp"
#include "mlrec/error.hpp"
#include "mlrec/text.hpp"

namespace mlrec {

namespace {

std::string id_text(const nlohmann::json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  throw InputError(where + ": ids must be strings or integers");
}

}  // namespace

std::vector<MovieMetadata> load_metadata(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<MovieMetadata> movies;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(where + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("id")) throw InputError(where + ": movie record needs an id");
    MovieMetadata m;
    m.id = id_text(doc["id"], where);
    if (!doc.contains("popularity") || !doc["popularity"].is_number()) {
      throw InputError(where + ": movie " + m.id + " has no popularity");
    }
    m.popularity = doc["popularity"].get<double>();
    for (const auto& c : doc.value("cast", nlohmann::json::array())) {
      if (!c.contains("person") || !c.contains("order") || !c["order"].is_number_integer()) {
        throw InputError(where + ": cast entries need person and integer order");
      }
      m.cast.push_back({id_text(c["person"], where), c["order"].get<std::int64_t>()});
    }
    for (const auto& c : doc.value("crew", nlohmann::json::array())) {
      if (!c.contains("person") || !c.contains("job") || !c["job"].is_string()) {
        throw InputError(where + ": crew entries need person and job");
      }
      m.crew.push_back({id_text(c["person"], where), c["job"].get<std::string>()});
    }
    for (const auto& k : doc.value("keywords", nlohmann::json::array())) m.keywords.push_back(id_text(k, where));
    movies.push_back(std::move(m));
  }
  return movies;
}

std::string movie_entity(std::string_view tmdb_id) { return "movie:" + std::string(tmdb_id); }
std::string person_entity(std::string_view id) { return "person:" + std::string(id); }
std::string keyword_entity(std::string_view id) { return "keyword:" + std::string(id); }

RoleSchema movie_kg_schema() {
  RoleSchema s;
  s.entity_types = {"person", "keyword", "movie"};
  s.roles = {{"act", "person"}, {"dir", "person"}, {"prod", "person"}, {"desc", "keyword"}, {"movie", "movie"}};
  s.layers = {{"acts_in", "act", "movie", false},
              {"directs", "dir", "movie", false},
              {"produces", "prod", "movie", false},
              {"describes", "desc", "movie", false}};
  return s;
}

MovieKg build_movie_kg(const std::vector<MovieMetadata>& movies, const WeightingConfig& weighting) {
  struct Edge {
    std::size_t layer;
    std::string source;  // entity id
    std::string source_type;
    double weight;
  };
  MovieKg kg;
  kg.input.schema = movie_kg_schema();
  EntitySet& entities = kg.input.entities;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> coords(4);  // (movie, source) entity ids
  std::vector<std::vector<double>> weights(4);
  std::set<std::string, std::less<>> seen;

  for (const auto& m : movies) {
    const std::string movie_id = movie_entity(m.id);
    if (!seen.insert(movie_id).second) throw InputError("duplicate metadata for movie " + m.id);
    if (!std::isfinite(m.popularity) || m.popularity < 0.0) {
      throw InputError("movie " + m.id + ": popularity must be finite and non-negative");
    }
    const double base = std::pow(m.popularity, weighting.gamma);
    std::vector<Edge> edges;

    std::map<std::string, std::int64_t, std::less<>> billing;
    for (const auto& c : m.cast) {
      if (c.order <= 0) throw InputError("movie " + m.id + ": credit order must be positive");
      auto [it, fresh] = billing.emplace(c.person, c.order);
      if (!fresh) it->second = std::min(it->second, c.order);
    }
    // Cast keeps billing order; ties by person id.
    std::vector<std::pair<std::int64_t, std::string>> cast;
    for (const auto& [person, order] : billing) cast.emplace_back(order, person);
    std::sort(cast.begin(), cast.end());
    for (const auto& [order, person] : cast) {
      const double w = weighting.credit_order ? base / std::log2(static_cast<double>(order) + 1.0) : base;
      edges.push_back({0, person_entity(person), "person", w});
    }
    std::set<std::string, std::less<>> directors, producers, keywords;
    for (const auto& c : m.crew) {
      if (weighting.director_jobs.contains(c.job) && directors.insert(c.person).second) {
        edges.push_back({1, person_entity(c.person), "person", base});
      }
      if (weighting.producer_jobs.contains(c.job) && producers.insert(c.person).second) {
        edges.push_back({2, person_entity(c.person), "person", base});
      }
    }
    for (const auto& k : m.keywords) {
      if (keywords.insert(k).second) edges.push_back({3, keyword_entity(k), "keyword", base});
    }

    std::vector<Edge> kept;
    for (auto& e : edges) {
      if (!std::isfinite(e.weight)) {
        throw InputError("movie " + m.id + ": edge weight is not finite (popularity " + format_double(m.popularity) +
                         ", gamma " + format_double(weighting.gamma) + ")");
      }
      if (e.weight > 0.0 && m.popularity > 0.0) {
        kept.push_back(std::move(e));
      } else {
        ++kg.pruned_edges;
      }
    }
    if (kept.empty()) {
      ++kg.dropped_movies;
      continue;
    }
    const std::size_t movie = entities.add(movie_id, "movie");
    for (const auto& e : kept) {
      std::size_t source;
      if (auto found = entities.find(e.source)) {
        source = *found;
      } else {
        source = entities.add(e.source, e.source_type);
      }
      coords[e.layer].emplace_back(movie, source);
      weights[e.layer].push_back(e.weight);
    }
  }
  if (kg.pruned_edges > 0) detail::logger().warn("pruned {} zero-weight edge(s)", kg.pruned_edges);
  if (kg.dropped_movies > 0) detail::logger().warn("dropped {} movie(s) left without edges", kg.dropped_movies);

  const RoleSchema& schema = kg.input.schema;
  for (std::size_t l = 0; l < schema.layers.size(); ++l) {
    const Layer& layer = schema.layers[l];
    std::vector<Triplet> t;
    t.reserve(coords[l].size());
    for (std::size_t i = 0; i < coords[l].size(); ++i) {
      t.push_back({entities.local_index(coords[l][i].first), entities.local_index(coords[l][i].second), weights[l][i]});
    }
    kg.input.blocks.push_back(
        {layer.id, CscMatrix::from_triplets(entities.count(schema.role(layer.target_role).entity_type),
                                            entities.count(schema.role(layer.source_role).entity_type), std::move(t))});
  }
  return kg;
}

LoadedRatings load_movielens_ratings(const std::filesystem::path& path) {
  LoadedRatings out;
  std::vector<std::string> header;
  read_delimited(
      path, ',',
      [&](std::size_t, const std::vector<std::string>& f) {
        if (f.size() != 4 || f[0].empty() || f[1].empty()) {
          ++out.malformed;
          return;
        }
        try {
          const double r = parse_double(f[2]);
          if (!(r >= 0.5 && r <= 5.0)) {
            ++out.malformed;
            return;
          }
          out.records.push_back({f[0], f[1], r, parse_int(f[3])});
        } catch (const InputError&) {
          ++out.malformed;
        }
      },
      &header);
  if (header.size() != 4) throw InputError(path.string() + ": header must be userId,movieId,rating,timestamp");
  if (out.malformed > 0) detail::logger().warn("{}: skipped {} malformed rating row(s)", path.string(), out.malformed);
  return out;
}

std::map<std::string, std::string, std::less<>> load_links(const std::filesystem::path& path) {
  std::map<std::string, std::string, std::less<>> links;
  std::vector<std::string> header;
  std::size_t tmdb_col = 2;
  bool header_checked = false;
  read_delimited(
      path, ',',
      [&](std::size_t line, const std::vector<std::string>& f) {
        if (!header_checked) {
          const auto it = std::find(header.begin(), header.end(), "tmdbId");
          if (header.empty() || header[0] != "movieId" || it == header.end()) {
            throw InputError(path.string() + ": header needs movieId and tmdbId columns");
          }
          tmdb_col = static_cast<std::size_t>(it - header.begin());
          header_checked = true;
        }
        if (f.size() <= tmdb_col) throw InputError(path.string() + ":" + std::to_string(line) + ": too few fields");
        if (f[tmdb_col].empty()) return;
        links.insert_or_assign(f[0], movie_entity(f[tmdb_col]));
      },
      &header);
  return links;
}

namespace {

std::size_t distinct_items(std::span<const RatingRecord> r) {
  std::set<std::string_view> items;
  for (const auto& x : r) items.insert(x.item_id);
  return items.size();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace

PreprocessResult preprocess_ratings(std::span<const RawRating> records,
                                    const std::map<std::string, std::string, std::less<>>& links,
                                    const std::set<std::string, std::less<>>& kg_items, const PipelineConfig& config) {
  PreprocessResult out;
  out.report.input_ratings = records.size();
  auto step = [&](std::string description, const std::vector<RatingRecord>& current) {
    out.report.steps.push_back({std::move(description), current.size(), distinct_items(current)});
  };

  std::vector<RatingRecord> cur;
  for (const auto& r : records) {
    const auto it = links.find(r.movie_id);
    if (it != links.end()) cur.push_back({r.user_id, it->second, r.rating, r.timestamp});
  }
  step("Remove ratings without TMDb id", cur);

  {
    // Latest timestamp wins; among equal timestamps the later record does.
    std::map<std::pair<std::string, std::string>, std::size_t> latest;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      auto [it, fresh] = latest.emplace(std::pair{cur[i].user_id, cur[i].item_id}, i);
      if (!fresh && cur[i].timestamp >= cur[it->second].timestamp) it->second = i;
    }
    std::vector<RatingRecord> next;
    next.reserve(latest.size());
    for (const auto& [key, i] : latest) next.push_back(std::move(cur[i]));
    cur = std::move(next);
  }
  step("Remove duplicates (keeping latest)", cur);

  std::erase_if(cur, [&](const RatingRecord& r) { return !kg_items.contains(r.item_id); });
  step("Remove movies without metadata", cur);

  {
    // cur is sorted by (user, item) from here on.
    std::vector<RatingRecord> next;
    for (std::size_t begin = 0; begin < cur.size();) {
      std::size_t end = begin;
      std::vector<double> ratings;
      while (end < cur.size() && cur[end].user_id == cur[begin].user_id) ratings.push_back(cur[end++].rating);
      const double m = median(std::move(ratings));
      for (std::size_t i = begin; i < end; ++i) {
        if (config.median_strict ? cur[i].rating > m : cur[i].rating >= m) next.push_back(std::move(cur[i]));
      }
      begin = end;
    }
    cur = std::move(next);
  }
  step(config.median_strict ? "Remove ratings at or below user median" : "Remove ratings below user median", cur);

  {
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& r : cur) ++counts[r.item_id];
    std::erase_if(cur, [&](const RatingRecord& r) { return counts[r.item_id] < config.min_item_ratings; });
  }
  step("Remove movies with " + std::to_string(config.min_item_ratings - 1) + " or fewer ratings", cur);

  {
    std::vector<RatingRecord> next;
    for (std::size_t begin = 0; begin < cur.size();) {
      std::size_t end = begin;
      while (end < cur.size() && cur[end].user_id == cur[begin].user_id) ++end;
      std::vector<std::size_t> idx(end - begin);
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = begin + i;
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (cur[a].rating != cur[b].rating) return cur[a].rating > cur[b].rating;
        if (cur[a].timestamp != cur[b].timestamp) return cur[a].timestamp > cur[b].timestamp;
        return cur[a].item_id < cur[b].item_id;
      });
      if (idx.size() > config.max_per_user) idx.resize(config.max_per_user);
      std::sort(idx.begin(), idx.end());
      for (std::size_t i : idx) next.push_back(std::move(cur[i]));
      begin = end;
    }
    cur = std::move(next);
  }
  step("Keep only top " + std::to_string(config.max_per_user) + " ratings per user", cur);

  out.ratings = std::move(cur);
  return out;
}

std::string format_pipeline_report(const PipelineReport& report) {
  std::ostringstream out;
  out << "step\tdescription\tratings\tmovies\n";
  out << "0\tInput (" << report.malformed << " malformed rows skipped)\t" << report.input_ratings << "\t-\n";
  for (std::size_t i = 0; i < report.steps.size(); ++i) {
    out << i + 1 << '\t' << report.steps[i].description << '\t' << report.steps[i].ratings << '\t'
        << report.steps[i].movies << '\n';
  }
  return out.str();
}

std::pair<std::vector<std::string>, std::vector<std::string>> split_train_test(std::vector<std::string> users,
                                                                               double train_fraction,
                                                                               std::uint64_t rng_seed) {
  if (users.empty()) throw InputError("cannot split an empty user set");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InputError("train fraction must be in (0, 1)");
  std::sort(users.begin(), users.end());
  users.erase(std::unique(users.begin(), users.end()), users.end());
  std::mt19937_64 rng(mix_seed(rng_seed, 0x73706c6974));
  std::shuffle(users.begin(), users.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(users.size())));
  std::vector<std::string> train(users.begin(), users.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::string> test(users.begin() + static_cast<std::ptrdiff_t>(n_train), users.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

}  // namespace mlrec
