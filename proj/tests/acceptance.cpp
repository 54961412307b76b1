// Acceptance suite: one PASS/FAIL/SKIP line per criterion. Exits non-zero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "mlrec/dynamics.hpp"
#include "mlrec/evaluation.hpp"
#include "mlrec/graph.hpp"
#include "mlrec/graph_io.hpp"
#include "mlrec/ingestion.hpp"
#include "mlrec/kernels.hpp"
#include "mlrec/log.hpp"
#include "mlrec/recommender.hpp"
#include "mlrec/text.hpp"
#include "mlrec/tuning.hpp"
#include "support/fixtures.hpp"
#include "support/nmrg_oracle.hpp"
#include "support/temp_dir.hpp"

namespace fs = std::filesystem;
using namespace mlrec;
using testing::Dense;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
  Status status;
  std::string detail;
};

Outcome pass(std::string d) { return {Status::pass, std::move(d)}; }
Outcome fail(std::string d) { return {Status::fail, std::move(d)}; }
Outcome skip(std::string d) { return {Status::skip, std::move(d)}; }

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

Dense dense(const SupraAdjacency& g) { return testing::to_rows(g.matrix().to_dense(), g.size(), g.size()); }
Dense dense(const TransitionMatrix& t) { return testing::to_rows(t.to_dense(), t.size(), t.size()); }

PageRankConfig pr_config(double rho, Solver solver) {
  PageRankConfig c;
  c.rho = rho;
  c.solver = solver;
  return c;
}

std::vector<double> random_teleport(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> v(n);
  double s = 0.0;
  for (auto& x : v) s += (x = unit(rng) < 0.2 ? unit(rng) : 0.0);
  if (s == 0.0) {
    v[0] = 1.0;
    s = 1.0;
  }
  for (auto& x : v) x /= s;
  return v;
}

// --- 1 --------------------------------------------------------------------

Outcome solver_correctness() {
  std::mt19937_64 rng(1001);
  double worst_l1 = 0.0;
  double worst_mass = 0.0;
  double slowest = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto raw = testing::random_multilayer(rng, 20, 200, 2, 4);
    const SupraAdjacency g = testing::build(raw);
    const SalienceMatrix s = testing::random_salience(g.schema(), rng);
    const TransitionMatrix t = column_normalize(apply_salience(g, s));
    const auto v = random_teleport(rng, g.size());
    const double rho = 0.05 + 0.9 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const auto oracle = testing::oracle_pagerank(testing::oracle_transition(raw, s), v, rho);
    for (Solver solver : {Solver::power, Solver::linear}) {
      const auto start = std::chrono::steady_clock::now();
      const auto r = solver == Solver::power ? pagerank_power(t, v, pr_config(rho, solver))
                                             : pagerank_linear(t, v, pr_config(rho, solver));
      slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
      worst_l1 = std::max(worst_l1, testing::l1(r.scores, oracle));
      worst_mass = std::max(worst_mass, std::abs(1.0 - kernels::reference::sum(r.scores)));
    }
  }
  const std::string detail = "200 graphs, max L1 vs dense solve " + sci(worst_l1) + ", max |1-sum| " +
                             sci(worst_mass) + ", slowest solve " + sci(slowest) + " s";
  return worst_l1 <= 1e-10 && worst_mass <= 1e-10 && slowest < 1.0 ? pass(detail) : fail(detail);
}

// --- 2 --------------------------------------------------------------------

Outcome trivial_limits() {
  std::mt19937_64 rng(1002);
  for (int trial = 0; trial < 20; ++trial) {
    const SupraAdjacency g = testing::build(testing::random_multilayer(rng, 20, 100));
    const TransitionMatrix t = column_normalize(g.matrix());
    const auto v = random_teleport(rng, g.size());
    for (Solver s : {Solver::power, Solver::linear}) {
      if (pagerank(t, v, pr_config(1.0, s)).scores != v) return fail("rho=1 did not return v");
    }
  }
  std::vector<TransitionMatrix> symmetric;
  symmetric.push_back(column_normalize(CscMatrix::from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}})));
  symmetric.push_back(column_normalize(CscMatrix::from_triplets(3, 3, {{1, 0, 1.0}, {2, 1, 1.0}, {0, 2, 1.0}})));
  for (std::size_t n : {8u, 31u}) {
    std::vector<Triplet> ring;
    for (std::size_t i = 0; i < n; ++i) {
      ring.push_back({(i + 1) % n, i, 1.0});
      ring.push_back({(i + n - 1) % n, i, 1.0});
    }
    symmetric.push_back(column_normalize(CscMatrix::from_triplets(n, n, ring)));
  }
  std::vector<Triplet> biclique;  // K_{5,5}
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 5; j < 10; ++j) {
      biclique.push_back({i, j, 1.0});
      biclique.push_back({j, i, 1.0});
    }
  }
  symmetric.push_back(column_normalize(CscMatrix::from_triplets(10, 10, biclique)));
  for (const auto& t : symmetric) {
    const auto u = uniform_vector(t.size());
    for (double rho : {0.01, 0.12, 0.5, 0.99}) {
      for (Solver s : {Solver::power, Solver::linear}) {
        if (pagerank(t, u, pr_config(rho, s)).scores != u) return fail("symmetric instance not exactly uniform");
      }
    }
  }
  return pass("rho=1 returns v on 20 graphs; " + std::to_string(symmetric.size()) +
              " symmetric instances exactly uniform for both solvers");
}

// --- 3 --------------------------------------------------------------------

Outcome scale_invariance() {
  std::mt19937_64 rng(1003);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const SupraAdjacency g = testing::build(testing::random_multilayer(rng, 20, 100));
    const SalienceMatrix s = testing::random_salience(g.schema(), rng);
    const Dense base = dense(column_normalize(apply_salience(g, s)));
    for (const auto& role : g.schema().roles) {
      for (double c : {0.1, 7.0, 1000.0}) {
        SalienceMatrix scaled = s;
        for (auto& [key, value] : scaled.blocks) {
          if (key.source == role.id) value *= c;
        }
        const Dense t = dense(column_normalize(apply_salience(g, scaled)));
        for (std::size_t i = 0; i < t.size(); ++i) {
          for (std::size_t j = 0; j < t.size(); ++j) worst = std::max(worst, std::abs(t[i][j] - base[i][j]));
        }
      }
    }
  }
  const std::string detail = "20 graphs, every source-role column, c in {0.1, 7, 1000}: max |dT| " + sci(worst);
  return worst <= 1e-12 ? pass(detail) : fail(detail);
}

// --- 4 --------------------------------------------------------------------

Outcome structure_round_trip() {
  const testing::RawGraph raw = testing::toy_film_kg();
  const SupraAdjacency g = testing::build(raw);
  const auto& ents = g.entities();
  for (const auto& e : raw.edges) {
    const Layer& layer = g.schema().layers[*g.schema().layer_index(e.layer)];
    const CscMatrix b = g.extract_block({layer.target_role, layer.source_role});
    if (b.coeff(ents.local_index(*ents.find(e.target)), ents.local_index(*ents.find(e.source))) != e.weight) {
      return fail("edge " + e.source + " -> " + e.target + " not recovered");
    }
  }
  if (dense(g) != testing::oracle_supra(raw)) return fail("toy supra-adjacency differs from the dense oracle");

  // film roles merged into one: same edges on a hand-written schema
  const SupraAdjacency films = merge_roles(g, {{"f-act", "film"}, {"f-dir", "film"}, {"f-prod", "film"}});
  testing::RawGraph hand = raw;
  hand.schema.roles = {{"film", "film"}, {"p-act", "person"}, {"p-dir", "person"}, {"p-inf", "person"},
                       {"c-prod", "company"}};
  for (auto& layer : hand.schema.layers) {
    if (layer.target_role.starts_with("f-")) layer.target_role = "film";
  }
  if (dense(films) != testing::oracle_supra(hand)) return fail("film-merged form differs from the hand-built matrix");

  // one role per entity type
  const SupraAdjacency single = merge_roles(g, {{"f-act", "film"},
                                                {"f-dir", "film"},
                                                {"f-prod", "film"},
                                                {"p-act", "person"},
                                                {"p-dir", "person"},
                                                {"p-inf", "person"},
                                                {"c-prod", "company"}});
  const Dense expected{
      {0, 0, 0, 1.25, 0.75, 0, 1, 0}, {0, 0, 0, 0.5, 0, 1, 0, 1}, {0, 0, 0, 1, 1, 0, 1, 0},
      {1.25, 0.5, 1, 0, 0, 0, 0, 0},  {0.75, 0, 1, 0, 0, 0, 0, 0}, {0, 1, 0, 1, 0, 0, 0, 0},
      {1, 0, 1, 0, 0, 0, 0, 0},       {0, 1, 0, 0, 0, 0, 0, 0},
  };
  if (dense(single) != expected) return fail("single-role form differs from the hand-built matrix");
  return pass(std::to_string(raw.edges.size()) + " toy edges recovered exactly; both merged forms match entry-wise");
}

// --- 5 --------------------------------------------------------------------

Outcome filter_semantics() {
  std::mt19937_64 rng(1005);
  std::size_t retained = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto raw = testing::random_multilayer(rng, 20, 120);
    const SupraAdjacency g = testing::build(raw);
    const SalienceMatrix salience = testing::random_salience(g.schema(), rng);
    const std::string seed =
        raw.entities[std::uniform_int_distribution<std::size_t>(0, raw.entities.size() - 1)(rng)].id;
    const std::size_t seed_entity = *g.entities().find(seed);

    std::vector<std::set<std::string>> kept;
    for (double theta : {-1.0, 0.0, 0.5, 1.0}) {
      RecommenderConfig c;
      c.filter.theta = theta;
      c.filter.top_k = 1u << 20;
      const Recommender rec(g, salience, c);
      std::set<std::string> ids;
      for (const auto& e : rec.recommend_entity(seed).entries) ids.insert(e.id);
      if (theta == 0.0) {
        SeedSpec spec;
        spec.seeds = {{seed, std::nullopt, 1.0}};
        const auto pi = rec.items().project(rec.solve(spec).scores);
        const auto& star = rec.unseeded_items();
        std::set<std::string> expected;
        for (std::size_t p = 0; p < rec.items().size(); ++p) {
          const std::size_t entity = rec.items().entities()[p];
          if (entity != seed_entity && pi[p] >= star[p]) expected.insert(g.entities()[entity].id);
        }
        if (ids != expected) return fail("theta=0 retained set differs from {i : pi_i >= pi*_i} (trial " +
                                         std::to_string(trial) + ")");
        retained += ids.size();
      }
      kept.push_back(std::move(ids));
    }
    for (std::size_t i = 1; i < kept.size(); ++i) {
      if (!std::includes(kept[i - 1].begin(), kept[i - 1].end(), kept[i].begin(), kept[i].end())) {
        return fail("retained set grew with theta (trial " + std::to_string(trial) + ")");
      }
    }
  }
  return pass("50 instances: theta=0 set matches exactly (" + std::to_string(retained) +
              " items), nested over theta in {-1, 0, 0.5, 1}");
}

// --- 6 --------------------------------------------------------------------

Outcome nmrg_oracle() {
  std::mt19937_64 rng(1006);
  std::size_t cases = 0;
  while (cases < 10000) {
    const testing::NmrgCase c = testing::random_nmrg_case(rng, 50, 40);
    for (const auto& u : c.users) {
      for (std::size_t k : {1u, 3u, 10u, 20u}) {
        if (nmrg_user(u, c.rankings, k) != testing::oracle_nmrg(u, c.rankings, k)) {
          return fail("case " + std::to_string(cases) + " differs from the brute-force value");
        }
        ++cases;
      }
    }
  }
  // Labelled stand-in for the worked example: the user's items, seed n28, and
  // n26 as the best relevant hit at rank 4.
  const UserRelevance u{"u", {{"n28", 4}, {"n26", 5}, {"n21", 3}, {"n23", 1}}};
  const RankedList z = testing::ranking("n28", {"n27", "n30", "n25", "n26", "n21", "n29"});
  const auto best = max_relevance_item(z, 20, u, "n28");
  if (!best || best->item != "n26" || best->rank != 4) return fail("worked-example fixture: wrong max-relevance item");
  return pass(std::to_string(cases) + " random cases bit-identical; fixture gives item n26 at rank 4");
}

// --- 7 --------------------------------------------------------------------

Outcome dirichlet_sampling() {
  const RoleSchema schema = movie_kg_schema();
  const auto columns = salience_columns(schema);
  std::mt19937_64 rng(1007);
  constexpr int kDraws = 10000;
  std::vector<std::vector<double>> mean(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) mean[c].assign(columns[c].blocks.size(), 0.0);
  double worst_sum = 0.0;
  for (int i = 0; i < kDraws; ++i) {
    const ParamSample s = sample_parameters(schema, rng);
    for (std::size_t c = 0; c < columns.size(); ++c) {
      double total = 0.0;
      for (std::size_t b = 0; b < columns[c].blocks.size(); ++b) {
        const double x = s.salience.at(columns[c].blocks[b]);
        total += x;
        mean[c][b] += x / kDraws;
      }
      worst_sum = std::max(worst_sum, std::abs(total - 1.0));
    }
  }
  double worst_mean = 0.0;
  for (const auto& m : mean) {
    for (double x : m) worst_mean = std::max(worst_mean, std::abs(x - 1.0 / static_cast<double>(m.size())));
  }
  for (std::size_t t = 0; t < 100; ++t) {
    const ParamSample a = sample_trial(schema, 20200101, t);
    const ParamSample b = sample_trial(schema, 20200101, t);
    if (a.salience.blocks != b.salience.blocks || a.rho != b.rho) return fail("trial " + std::to_string(t) + " not reproducible");
  }
  const std::string detail = std::to_string(columns.size()) + " columns x 10000 draws: max |sum-1| " +
                             sci(worst_sum) + ", max |mean-1/d| " + sci(worst_mean) + "; 100 trials reproduce";
  return worst_sum <= 1e-12 && worst_mean <= 0.01 ? pass(detail) : fail(detail);
}

// --- 8 --------------------------------------------------------------------

Outcome thematic_signal() {
  const testing::PlantedKg kg = testing::planted_kg(1008, 10, 300);
  const SupraAdjacency g = testing::build(kg.raw);
  SignalTestConfig config;
  config.users = 200;
  config.rng_seed = 8;
  config.item_roles = {"movie"};
  const SignalTestResult r = thematic_signal_test(kg.users, g, kg.popularity, config);
  char buf[200];
  std::snprintf(buf, sizeof buf, "%zu-node planted KG, %zu users: mean geodesic %.3f vs uniform %.3f, Welch p=%.2e",
                g.size(), r.users_sampled, r.user_sets.mean, r.uniform.mean, r.user_vs_uniform.p_less);
  const bool ok = g.size() == 500 && r.user_sets.mean < r.uniform.mean && r.user_vs_uniform.p_less < 0.01;
  return ok ? pass(buf) : fail(buf);
}

// --- 9 --------------------------------------------------------------------

std::optional<fs::path> env_path(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return fs::path(v);
}

Outcome pipeline_reproduction() {
  const auto ratings = env_path("MLREC_ML20M_RATINGS");
  const auto metadata = env_path("MLREC_TMDB_METADATA");
  if (!ratings || !metadata) {
    return skip("needs MovieLens 20M ratings and a TMDb snapshot (set MLREC_ML20M_RATINGS and MLREC_TMDB_METADATA)");
  }
  const std::vector<std::size_t> expected{19987681, 19987649, 19950334, 13032003, 13028453, 10563717};
  const auto movies = load_metadata(*metadata / "movies.jsonl");
  MovieKg kg = build_movie_kg(movies, {});
  const SupraAdjacency g =
      build_supra_adjacency(std::move(kg.input.entities), std::move(kg.input.schema), std::move(kg.input.blocks));
  std::set<std::string, std::less<>> items;
  for (const auto& e : g.entities()) {
    if (e.type == "movie") items.insert(e.id);
  }
  const LoadedRatings raw = load_movielens_ratings(*ratings);
  const auto links = load_links(*metadata / "links.csv");
  std::string detail;
  for (bool strict : {true, false}) {
    PipelineConfig c;
    c.median_strict = strict;
    const auto report = preprocess_ratings(raw.records, links, items, c).report;
    std::vector<std::size_t> got;
    for (const auto& step : report.steps) got.push_back(step.ratings);
    detail += std::string(strict ? "strict:" : " inclusive:");
    for (std::size_t n : got) detail += " " + std::to_string(n);
    if (got == expected) return pass("counts match with median_strict=" + std::string(strict ? "true" : "false"));
  }
  return fail("no median setting reproduces the table; " + detail);
}

// --- 10 -------------------------------------------------------------------

double nmrg10(const std::string& report) {
  std::istringstream in(report);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] != '{') continue;
    const auto rec = nlohmann::json::parse(line);
    if (rec["k"] == 10) return rec["nmrg"].get<double>();
  }
  throw std::runtime_error("no nmrg@10 record");
}

// Thematic vs each baseline at NMRG@10, via the CLI.
std::vector<std::pair<std::string, double>> method_scores(const std::vector<std::string>& prefix, std::string& error) {
  std::vector<std::pair<std::string, double>> out;
  for (const char* method : {"thematic", "popularity", "random_seed", "random_item", "unseeded"}) {
    std::vector<std::string> args = prefix;
    args.insert(args.end(), {"evaluate", "--method", method, "--split", "test"});
    std::ostringstream o, e;
    if (cli::run(args, o, e) != 0) {
      error = std::string(method) + ": " + e.str();
      return {};
    }
    out.emplace_back(method, nmrg10(o.str()));
  }
  return out;
}

std::string describe(const std::vector<std::pair<std::string, double>>& scores) {
  std::string s;
  for (const auto& [m, v] : scores) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%s %.2f", s.empty() ? "" : ", ", m.c_str(), v);
    s += buf;
  }
  return s;
}

bool thematic_wins(const std::vector<std::pair<std::string, double>>& scores) {
  return std::all_of(scores.begin() + 1, scores.end(), [&](const auto& p) { return scores[0].second > p.second; });
}

void write_planted_dataset(const fs::path& root, const testing::PlantedKg& kg) {
  write_graph_artifacts(root / "graph", testing::build(kg.raw), {});
  const auto ratings = testing::planted_ratings(kg);
  std::vector<RatingRecord> train, test;
  for (const auto& r : ratings) (std::hash<std::string>{}(r.user_id) % 4 == 0 ? test : train).push_back(r);
  write_rating_records(root / "ratings.csv", ratings);
  write_rating_records(root / "train.csv", train);
  write_rating_records(root / "test.csv", test);
  write_popularity(root / "popularity.csv", kg.popularity);
  write_keywords(root / "keywords.csv", kg.keywords);
  write_file(root / "config.json",
             R"({"paths": {"graph": "graph", "dataset": "."}, "item_roles": ["movie"], "pagerank": {"rho": 0.12},)"
             R"( "filter": {"top_k": 300}, "cutoffs": [1, 10, 20], "rng_seed": 10})");
}

Outcome table_ordering() {
  const fs::path config = fs::path(MLREC_SOURCE_DIR) / "data" / "tmdb" / "config.json";
  const bool have_data = fs::exists(fs::path(MLREC_SOURCE_DIR) / "work" / "tmdb" / "graph" / "schema.json");
  if (have_data) {
    std::string error;
    const auto scores = method_scores({"--config", config.string()}, error);
    if (scores.empty()) return fail(error);
    return thematic_wins(scores) ? pass(describe(scores)) : fail(describe(scores));
  }
  // Not the criterion: the same ordering check on a planted KG, reported for
  // information only.
  testing::TempDir dir;
  write_planted_dataset(dir.path(), testing::planted_kg(1010, 10, 300));
  std::string error;
  const auto scores = method_scores({"--config", (dir.path() / "config.json").string()}, error);
  const std::string standin = scores.empty() ? "stand-in failed: " + error
                                             : std::string("planted-KG stand-in ") +
                                                   (thematic_wins(scores) ? "orders correctly" : "does NOT order") +
                                                   " (" + describe(scores) + ")";
  return skip("needs the ingested MovieLens/TMDb dataset under work/tmdb; " + standin);
}

// --- 11 -------------------------------------------------------------------

std::string run_cli(std::vector<std::string> args, int workers) {
  args.insert(args.begin(), {"--workers", std::to_string(workers)});
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  if (code != 0) throw std::runtime_error("exit " + std::to_string(code) + ": " + e.str());
  return o.str();
}

Outcome determinism() {
  testing::TempDir dir;
  write_planted_dataset(dir.path(), testing::planted_kg(1011, 6, 120));
  const std::string planted = (dir.path() / "config.json").string();
  const std::string toy = (fs::path(MLREC_SOURCE_DIR) / "data" / "toy" / "config.json").string();
  const std::vector<std::vector<std::string>> commands{
      {"--config", toy, "recommend", "--seed", "Quentin Tarantino", "--seed", "Samuel L. Jackson"},
      {"--config", planted, "recommend", "--seed", "m2_3"},
      {"--config", planted, "evaluate", "--method", "thematic", "--per-user"},
      {"--config", planted, "evaluate", "--method", "random_item"},
  };
  for (const auto& cmd : commands) {
    const std::string reference = run_cli(cmd, 1);
    for (int workers : {1, 8, 8}) {
      if (run_cli(cmd, workers) != reference) {
        return fail(cmd[2] + " output differs at workers=" + std::to_string(workers));
      }
    }
  }
  return pass(std::to_string(commands.size()) + " recommend/evaluate runs byte-identical across repeats and workers {1, 8}");
}

}  // namespace

int main() {
  set_log_level("error");
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"solver correctness", solver_correctness},
      {"trivial limits", trivial_limits},
      {"salience column-scale invariance", scale_invariance},
      {"structure round-trip", structure_round_trip},
      {"filter semantics", filter_semantics},
      {"NMRG oracle equivalence", nmrg_oracle},
      {"Dirichlet sampling", dirichlet_sampling},
      {"thematic signal", thematic_signal},
      {"pipeline reproduction", pipeline_reproduction},
      {"baseline ordering", table_ordering},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = fail(std::string("threw: ") + e.what());
    }
    const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "SKIP";
    failures += o.status == Status::fail;
    std::cout << "[" << tag << "] " << (i + 1) << " " << criteria[i].first << ": " << o.detail << std::endl;
  }
  return failures ? 1 : 0;
}
