#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "mlrec/dynamics.hpp"
#include "mlrec/error.hpp"
#include "mlrec/evaluation.hpp"
#include "mlrec/graph.hpp"
#include "mlrec/graph_io.hpp"
#include "mlrec/ingestion.hpp"
#include "mlrec/log.hpp"
#include "mlrec/parallel.hpp"
#include "mlrec/recommender.hpp"
#include "mlrec/text.hpp"
#include "mlrec/tuning.hpp"
#include "run_config.hpp"

namespace mlrec::cli {

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::string config;
  std::optional<std::string> graph;
  std::optional<std::string> salience;
  std::optional<std::string> dataset;
  std::optional<std::string> cache;
  std::optional<std::uint64_t> seed_rng;
  std::optional<int> workers;
  std::optional<std::string> theta;
  std::optional<double> rho;
  std::optional<std::size_t> top_k;
  std::optional<std::string> cutoffs;
  std::optional<std::string> solver;
  std::string log_level = "warn";
};

RunConfig resolve_config(const Globals& g) {
  RunConfig c = g.config.empty() ? RunConfig{} : load_run_config(g.config);
  if (g.graph) c.paths.graph = *g.graph;
  if (g.salience) c.paths.salience = *g.salience;
  if (g.dataset) c.paths.dataset = *g.dataset;
  if (g.cache) c.paths.cache = *g.cache;
  if (g.seed_rng) c.rng_seed = *g.seed_rng;
  if (g.workers) c.workers = *g.workers;
  if (g.theta) c.recommender.filter.theta = parse_double(*g.theta);
  if (g.rho) c.recommender.pagerank.rho = *g.rho;
  if (g.top_k) c.recommender.filter.top_k = *g.top_k;
  if (g.cutoffs) c.cutoffs = parse_cutoffs(*g.cutoffs);
  if (g.solver) c.recommender.pagerank.solver = parse_solver(*g.solver);
  c.validate();
  return c;
}

const fs::path& require_path(const fs::path& p, const char* what) {
  if (p.empty()) throw InputError(std::string("no ") + what + " path given (set it in the config or pass --" + what + ")");
  return p;
}

SupraAdjacency load_run_graph(const RunConfig& c) { return load_graph_dir(require_path(c.paths.graph, "graph")); }

SalienceMatrix load_run_salience(const RunConfig& c, const SupraAdjacency& graph) {
  if (c.paths.salience.empty()) return uniform_salience(graph.schema());
  return load_salience(c.paths.salience);
}

std::string config_hash(const RunConfig& c, const std::string& graph_hash, const std::string& salience_hash) {
  Hasher h;
  h.update(c.settings_hash()).update(graph_hash).update(salience_hash);
  return h.hex();
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    write_file(p, text);
  }
}

std::vector<UserRelevance> load_users(const RunConfig& c, const std::string& split) {
  static const std::set<std::string> kSplits{"train", "test", "all"};
  if (!kSplits.contains(split)) throw InputError("unknown split '" + split + "' (train, test or all)");
  const fs::path dir = require_path(c.paths.dataset, "dataset");
  const fs::path file = dir / (split == "all" ? "ratings.csv" : split + ".csv");
  return relevance_from_ratings(load_rating_records(file));
}

// Thematic rankings for the given seeds, read from or written to the
// precompute cache when a cache directory is configured.
RankingMap thematic_rankings(const Recommender& rec, std::span<const std::string> seeds, const RunConfig& c) {
  Hasher seed_hash;
  for (const auto& s : seeds) seed_hash.update(s);
  const std::string key = rec.cache_key() + ":" + seed_hash.hex();
  std::optional<fs::path> file;
  if (auto dir = cache_dir(c)) {
    Hasher name;
    name.update(key);
    file = *dir / ("thematic-" + name.hex() + ".tsv");
    if (auto cached = read_precompute_cache(*file, key)) return std::move(cached->rankings);
  }
  PrecomputeResult pre = precompute_seed_rankings(rec, seeds);
  if (!pre.errors.empty()) {
    log_warning(std::to_string(pre.errors.size()) + " seeds failed; first: " + pre.errors.begin()->first + ": " +
                pre.errors.begin()->second);
  }
  if (file) {
    fs::create_directories(file->parent_path());
    write_precompute_cache(*file, key, pre);
  }
  return std::move(pre.rankings);
}

std::string join(std::span<const std::string> parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// --- build ----------------------------------------------------------------

struct BuildArgs {
  std::string schema;
  std::string edges;
  std::string from;
  std::string out;
  std::string merge;
};

int cmd_build(const Globals& g, const BuildArgs& a, std::ostream& out) {
  const RunConfig c = resolve_config(g);
  if (a.from.empty() == (a.schema.empty() || a.edges.empty())) {
    if (a.from.empty()) throw InputError("build needs --schema and --edges, or --from");
    throw InputError("build takes either --from or --schema/--edges, not both");
  }
  SupraAdjacency graph = a.from.empty() ? load_graph(a.schema, a.edges) : load_graph_dir(a.from);
  if (!a.merge.empty()) graph = merge_roles(graph, parse_merge_spec(a.merge));
  const fs::path dir = a.out.empty() ? require_path(c.paths.output, "out") : fs::path(a.out);
  const std::string hash = config_hash(c, graph.hash(), "");
  write_graph_artifacts(dir, graph, {{"config_hash", hash}});
  out << "graph_hash=" << graph.hash() << " nodes=" << graph.size() << " nonzeros=" << graph.matrix().nnz()
      << " config_hash=" << hash << "\n";
  return 0;
}

// --- recommend ------------------------------------------------------------

struct RecommendArgs {
  std::vector<std::string> seeds;
  std::string output;
};

int cmd_recommend(const Globals& g, const RecommendArgs& a, std::ostream& out) {
  const RunConfig c = resolve_config(g);
  if (a.seeds.empty()) throw InputError("recommend needs at least one --seed");
  const SupraAdjacency graph = load_run_graph(c);
  const SalienceMatrix salience = load_run_salience(c, graph);
  std::vector<std::string> roles;
  for (const auto& r : graph.schema().roles) roles.push_back(r.id);
  SeedSpec spec;
  spec.seed_mass = c.recommender.seed_mass;
  for (const auto& s : a.seeds) spec.seeds.push_back(parse_seed(s, roles));
  const Recommender rec(graph, salience, c.recommender);
  const RankedList list = rec.recommend(spec);

  std::string text = "# seed=" + join(a.seeds, ";") + " theta=" + format_double(c.recommender.filter.theta) +
                     " rho=" + format_double(c.recommender.pagerank.rho) +
                     " config_hash=" + config_hash(c, graph.hash(), salience.hash()) + "\n";
  text += "rank\tentity\tscore\tlog10_gain\n";
  for (std::size_t i = 0; i < list.entries.size(); ++i) {
    const auto& e = list.entries[i];
    text += std::to_string(i + 1) + "\t" + e.id + "\t" + format_double(e.score) + "\t" + format_double(e.log10_gain) +
            "\n";
  }
  emit(a.output, text, out);
  return 0;
}

// --- evaluate -------------------------------------------------------------

struct EvaluateArgs {
  std::string method = "thematic";
  std::string split = "test";
  bool per_user = false;
  std::string output;
};

int cmd_evaluate(const Globals& g, const EvaluateArgs& a, std::ostream& out) {
  const RunConfig c = resolve_config(g);
  const bool thematic = a.method == "thematic";
  const std::optional<BaselineKind> kind = thematic ? std::nullopt : std::optional(parse_baseline(a.method));
  const SupraAdjacency graph = load_run_graph(c);
  const SalienceMatrix salience = load_run_salience(c, graph);
  const NmrgObjective subset(graph, load_users(c, a.split), c.recommender, c.cutoffs, c.user_subsample, c.rng_seed);
  const auto users = subset.users();
  const auto seeds = subset.seed_items();

  const Recommender rec(graph, salience, c.recommender);
  RankingMap rankings;
  if (thematic) {
    rankings = thematic_rankings(rec, seeds, c);
  } else {
    const fs::path dir = require_path(c.paths.dataset, "dataset");
    PopularityTable popularity;
    KeywordTable keywords;
    RankingMap base;
    BaselineContext ctx;
    ctx.recommender = &rec;
    ctx.rng_seed = c.rng_seed;
    ctx.top_k = c.recommender.filter.top_k;
    if (*kind != BaselineKind::unseeded && *kind != BaselineKind::keyword_dice) {
      popularity = load_popularity(dir / "popularity.csv");
      ctx.popularity = &popularity;
    }
    if (*kind == BaselineKind::keyword_dice) {
      keywords = load_keywords(dir / "keywords.csv");
      ctx.keywords = &keywords;
    }
    if (*kind == BaselineKind::random_item) {
      base = thematic_rankings(rec, seeds, c);
      ctx.thematic = &base;
    }
    rankings = baseline_rankings(*kind, ctx, seeds);
  }

  EvalReport report = nmrg_corpus(users, rankings, c.cutoffs);
  report.method = a.method;
  report.rng_seed = c.rng_seed;
  std::string text = "# split=" + a.split + "\n" + format_report(report, config_hash(c, graph.hash(), salience.hash()));
  if (a.per_user) {
    text += "# per-user\nuser_id";
    for (std::size_t k : c.cutoffs) text += "\tnmrg@" + std::to_string(k);
    text += "\n";
    for (std::size_t u = 0; u < report.user_ids.size(); ++u) {
      text += report.user_ids[u];
      for (const auto& scores : report.user_scores) text += "\t" + format_double(scores[u]);
      text += "\n";
    }
  }
  emit(a.output, text, out);
  return 0;
}

// --- tune / sweep ---------------------------------------------------------

struct TuneArgs {
  std::size_t trials = 1;
  std::size_t objective_k = 10;
  std::string split = "train";
  std::string log;
  std::string best;
  std::string output;
};

std::vector<std::size_t> with_cutoff(std::vector<std::size_t> cutoffs, std::size_t k) {
  if (std::find(cutoffs.begin(), cutoffs.end(), k) == cutoffs.end()) cutoffs.push_back(k);
  std::sort(cutoffs.begin(), cutoffs.end());
  return cutoffs;
}

std::string score_columns(std::span<const std::size_t> cutoffs) {
  std::string s;
  for (std::size_t k : cutoffs) s += "\tnmrg@" + std::to_string(k);
  return s;
}

std::string score_cells(const TrialScores& scores, std::span<const std::size_t> cutoffs) {
  std::string s;
  for (std::size_t k : cutoffs) {
    const auto it = scores.find(k);
    s += "\t" + (it == scores.end() ? std::string("nan") : format_double(it->second));
  }
  return s;
}

int cmd_tune(const Globals& g, const TuneArgs& a, std::ostream& out) {
  const RunConfig c = resolve_config(g);
  if (a.trials < 1) throw InputError("--trials must be at least 1");
  const SupraAdjacency graph = load_run_graph(c);
  const auto cutoffs = with_cutoff(c.cutoffs, a.objective_k);
  const NmrgObjective objective(graph, load_users(c, a.split), c.recommender, cutoffs, c.user_subsample, c.rng_seed);
  const std::string hash = config_hash(c, graph.hash(), "tune");

  std::ofstream log;
  if (!a.log.empty()) {
    log.open(a.log, std::ios::app);
    if (!log) throw InputError("cannot open " + a.log);
  }
  const SearchResult result = random_search(
      a.trials, [&](const ParamSample& p) { return objective(p); }, graph.schema(), c.rng_seed, a.objective_k,
      [&](const Trial& t) {
        if (!log.is_open()) return;
        auto rec = nlohmann::ordered_json::parse(trial_to_json(t));
        rec["config_hash"] = hash;
        log << rec.dump() << "\n";
        log.flush();
      });

  std::string text = "# tune trials=" + std::to_string(a.trials) + " objective=nmrg@" + std::to_string(a.objective_k) +
                     " split=" + a.split + " config_hash=" + hash + "\n";
  text += "trial\trho" + score_columns(cutoffs) + "\tbest_so_far\terror\n";
  for (std::size_t i = 0; i < result.trials.size(); ++i) {
    const Trial& t = result.trials[i];
    const auto& best = result.cumulative_best[i];
    text += std::to_string(t.params.trial_id) + "\t" + format_double(t.params.rho) + score_cells(t.scores, cutoffs) +
            "\t" + (best ? format_double(*best) : std::string("nan")) + "\t" + (t.error.empty() ? "-" : t.error) + "\n";
  }
  if (result.best) {
    const Trial& best = result.trials[*result.best];
    text += "# best_trial=" + std::to_string(best.params.trial_id) + " rho=" + format_double(best.params.rho) + "\n";
    if (!a.best.empty()) {
      auto doc = nlohmann::ordered_json::parse(salience_to_json(best.params.salience));
      doc["#config_hash"] = hash;
      doc["#rho"] = best.params.rho;
      doc["#trial"] = best.params.trial_id;
      emit(a.best, doc.dump(2) + "\n", out);
    }
  } else {
    text += "# no trial succeeded\n";
  }
  emit(a.output, text, out);
  return result.best ? 0 : 1;
}

struct SweepArgs {
  std::string grid;
  std::size_t objective_k = 10;
  std::string split = "train";
  std::string output;
};

int cmd_sweep(const Globals& g, const SweepArgs& a, std::ostream& out) {
  const RunConfig c = resolve_config(g);
  const std::vector<double> grid = a.grid.empty() ? default_sweep_grid() : parse_grid(a.grid);
  const SupraAdjacency graph = load_run_graph(c);
  ParamSample base;
  base.salience = load_run_salience(c, graph);
  base.rho = c.recommender.pagerank.rho;
  base.rng_seed = c.rng_seed;
  const auto cutoffs = with_cutoff(c.cutoffs, a.objective_k);
  const NmrgObjective objective(graph, load_users(c, a.split), c.recommender, cutoffs, c.user_subsample, c.rng_seed);
  const SweepResult result =
      teleport_sweep(base, grid, [&](const ParamSample& p) { return objective(p); }, a.objective_k);

  std::string text = "# sweep points=" + std::to_string(grid.size()) + " objective=nmrg@" +
                     std::to_string(a.objective_k) + " split=" + a.split +
                     " config_hash=" + config_hash(c, graph.hash(), base.salience.hash()) + "\n";
  text += "rho" + score_columns(cutoffs) + "\terror\n";
  for (const auto& p : result.points) {
    text += format_double(p.rho) + score_cells(p.scores, cutoffs) + "\t" + (p.error.empty() ? "-" : p.error) + "\n";
  }
  if (result.best) text += "# best_rho=" + format_double(result.points[*result.best].rho) + "\n";
  emit(a.output, text, out);
  return result.best ? 0 : 1;
}

// --- signal-test ----------------------------------------------------------

struct SignalArgs {
  std::size_t users = 1000;
  std::size_t neighbours = 25;
  std::string split = "all";
  std::string output;
};

int cmd_signal_test(const Globals& g, const SignalArgs& a, std::ostream& out) {
  const RunConfig c = resolve_config(g);
  const SupraAdjacency graph = load_run_graph(c);
  const auto users = load_users(c, a.split);
  const PopularityTable popularity = load_popularity(require_path(c.paths.dataset, "dataset") / "popularity.csv");
  SignalTestConfig cfg;
  cfg.users = a.users;
  cfg.neighbours = a.neighbours;
  cfg.rng_seed = c.rng_seed;
  cfg.item_roles = c.recommender.item_roles;
  const SignalTestResult result = thematic_signal_test(users, graph, popularity, cfg);
  emit(a.output, format_signal_report(result, config_hash(c, graph.hash(), "signal-test")), out);
  return 0;
}

// --- ingest ---------------------------------------------------------------

struct IngestArgs {
  std::string ratings;
  std::string metadata;
  double gamma = 1.0;
  std::string out;
  bool no_credit_order = false;
  bool median_inclusive = false;
};

int cmd_ingest(const Globals& g, const IngestArgs& a, std::ostream& out) {
  const RunConfig c = resolve_config(g);
  const fs::path dir = a.out.empty() ? require_path(c.paths.output, "out") : fs::path(a.out);
  const fs::path meta_dir(a.metadata);

  WeightingConfig weighting;
  weighting.gamma = a.gamma;
  weighting.credit_order = !a.no_credit_order;
  PipelineConfig pipeline;
  pipeline.median_strict = !a.median_inclusive;

  Hasher settings;
  settings.update(c.settings_hash()).update(a.gamma).update(static_cast<std::uint64_t>(weighting.credit_order));
  settings.update(static_cast<std::uint64_t>(pipeline.median_strict));
  settings.update(read_file(a.ratings)).update(read_file(meta_dir / "movies.jsonl"));
  settings.update(read_file(meta_dir / "links.csv"));
  const std::string hash = settings.hex();

  const std::vector<MovieMetadata> movies = load_metadata(meta_dir / "movies.jsonl");
  MovieKg kg = build_movie_kg(movies, weighting);
  const SupraAdjacency graph =
      build_supra_adjacency(std::move(kg.input.entities), std::move(kg.input.schema), std::move(kg.input.blocks));

  std::set<std::string, std::less<>> kg_items;
  for (const auto& e : graph.entities()) {
    if (e.type == "movie") kg_items.insert(e.id);
  }
  PopularityTable popularity;
  KeywordTable keywords;
  for (const auto& m : movies) {
    const std::string id = movie_entity(m.id);
    if (!kg_items.contains(id)) continue;
    popularity[id] = m.popularity;
    auto& kw = keywords[id];
    for (const auto& k : m.keywords) kw.insert(keyword_entity(k));
  }

  const LoadedRatings raw = load_movielens_ratings(a.ratings);
  const auto links = load_links(meta_dir / "links.csv");
  PreprocessResult pre = preprocess_ratings(raw.records, links, kg_items, pipeline);
  pre.report.malformed = raw.malformed;

  std::vector<std::string> user_ids;
  for (const auto& r : pre.ratings) {
    if (user_ids.empty() || user_ids.back() != r.user_id) user_ids.push_back(r.user_id);
  }
  const auto [train_users, test_users] = split_train_test(user_ids, c.train_fraction, c.rng_seed);
  const std::set<std::string> train_set(train_users.begin(), train_users.end());
  std::vector<RatingRecord> train;
  std::vector<RatingRecord> test;
  for (const auto& r : pre.ratings) (train_set.contains(r.user_id) ? train : test).push_back(r);

  fs::create_directories(dir);
  write_rating_records(dir / "ratings.csv", pre.ratings);
  write_rating_records(dir / "train.csv", train);
  write_rating_records(dir / "test.csv", test);
  write_popularity(dir / "popularity.csv", popularity);
  write_keywords(dir / "keywords.csv", keywords);
  const std::string report = "# config_hash=" + hash + "\n" + format_pipeline_report(pre.report);
  write_file(dir / "pipeline_report.txt", report);
  write_graph_artifacts(dir / "graph", graph,
                        {{"config_hash", hash},
                         {"pruned_edges", std::to_string(kg.pruned_edges)},
                         {"dropped_movies", std::to_string(kg.dropped_movies)}});

  nlohmann::ordered_json manifest;
  manifest["config_hash"] = hash;
  manifest["gamma"] = a.gamma;
  manifest["credit_order"] = weighting.credit_order;
  manifest["median_strict"] = pipeline.median_strict;
  manifest["train_fraction"] = c.train_fraction;
  manifest["rng_seed"] = c.rng_seed;
  manifest["train_users"] = train_users.size();
  manifest["test_users"] = test_users.size();
  nlohmann::ordered_json files = nlohmann::ordered_json::object();
  for (const char* name : {"ratings.csv", "train.csv", "test.csv", "popularity.csv", "keywords.csv",
                           "pipeline_report.txt"}) {
    Hasher h;
    h.update(read_file(dir / name));
    files[name] = h.hex();
  }
  manifest["files"] = files;
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");

  out << report;
  return 0;
}

void add_output(CLI::App* sub, std::string& target, const char* help = "write to this file instead of stdout") {
  sub->add_option("-o,--output", target, help);
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thematic recommendations on multilayer knowledge graphs", "mlrec"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "run configuration (JSON)");
  app.add_option("--graph", g.graph, "graph artifact directory");
  app.add_option("--salience", g.salience, "salience file (JSON)");
  app.add_option("--dataset", g.dataset, "dataset directory written by ingest");
  app.add_option("--cache", g.cache, "precompute cache directory");
  app.add_option("--seed-rng", g.seed_rng, "rng seed");
  app.add_option("--workers", g.workers, "worker threads (0: OpenMP default)");
  app.add_option("--theta", g.theta, "thematic filter threshold (log10 gain, inf allowed)");
  app.add_option("--rho", g.rho, "teleportation probability");
  app.add_option("--top-k", g.top_k, "maximum list length");
  app.add_option("--cutoffs", g.cutoffs, "evaluation cutoffs, e.g. 1,10,20");
  app.add_option("--solver", g.solver, "power or linear");
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error or off");

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("build", "assemble a supra-adjacency and write graph artifacts");
  build_cmd->add_option("--schema", build.schema, "schema file (JSON)");
  build_cmd->add_option("--edges", build.edges, "edge list (CSV)");
  build_cmd->add_option("--from", build.from, "existing artifact directory");
  build_cmd->add_option("--merge", build.merge, "role merges, e.g. a=b,c=b");
  build_cmd->add_option("--out", build.out, "output directory");

  RecommendArgs recommend;
  auto* rec_cmd = app.add_subcommand("recommend", "rank items for one or more seeds");
  rec_cmd->add_option("--seed", recommend.seeds, "entity[:role][@weight], repeatable")->take_all();
  add_output(rec_cmd, recommend.output);

  EvaluateArgs evaluate;
  auto* eval_cmd = app.add_subcommand("evaluate", "NMRG of a method on a dataset split");
  eval_cmd->add_option("--method", evaluate.method, "thematic, popularity, random_seed, random_item, unseeded, keyword_dice");
  eval_cmd->add_option("--split", evaluate.split, "train, test or all");
  eval_cmd->add_flag("--per-user", evaluate.per_user, "append per-user scores");
  add_output(eval_cmd, evaluate.output);

  TuneArgs tune;
  auto* tune_cmd = app.add_subcommand("tune", "random search over saliences and rho");
  tune_cmd->add_option("--trials", tune.trials, "number of trials");
  tune_cmd->add_option("--objective-k", tune.objective_k, "cutoff to maximise");
  tune_cmd->add_option("--split", tune.split, "train, test or all");
  tune_cmd->add_option("--log", tune.log, "append one JSON line per trial to this file");
  tune_cmd->add_option("--best-salience", tune.best, "write the best trial's saliences here");
  add_output(tune_cmd, tune.output);

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "NMRG across a grid of rho values");
  sweep_cmd->add_option("--grid", sweep.grid, "a:b:n or a comma list (default: 20 log-spaced points)");
  sweep_cmd->add_option("--objective-k", sweep.objective_k, "cutoff used to pick the best rho");
  sweep_cmd->add_option("--split", sweep.split, "train, test or all");
  add_output(sweep_cmd, sweep.output, "write the curve to this file instead of stdout");

  SignalArgs signal;
  auto* signal_cmd = app.add_subcommand("signal-test", "geodesic distances within user item sets vs random sets");
  signal_cmd->add_option("--users", signal.users, "users to sample");
  signal_cmd->add_option("--neighbours", signal.neighbours, "popularity neighbourhood size");
  signal_cmd->add_option("--split", signal.split, "train, test or all");
  add_output(signal_cmd, signal.output);

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "build the movie KG and rating datasets from raw files");
  ingest_cmd->add_option("--ratings", ingest.ratings, "MovieLens ratings.csv")->required();
  ingest_cmd->add_option("--metadata", ingest.metadata, "directory with movies.jsonl and links.csv")->required();
  ingest_cmd->add_option("--gamma", ingest.gamma, "popularity exponent");
  ingest_cmd->add_option("--out", ingest.out, "output directory");
  ingest_cmd->add_flag("--no-credit-order", ingest.no_credit_order, "do not discount acting weights by billing");
  ingest_cmd->add_flag("--median-inclusive", ingest.median_inclusive, "keep ratings equal to the user median");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    std::ostringstream help_out;
    std::ostringstream err_out;
    const int code = app.exit(e, help_out, err_out);
    out << help_out.str();
    err << err_out.str();
    return code == 0 ? 0 : 2;
  }

  try {
    set_log_level(g.log_level);
    const int workers = g.workers ? *g.workers : (g.config.empty() ? 0 : load_run_config(g.config).workers);
    ThreadScope threads(workers);
    if (*build_cmd) return cmd_build(g, build, out);
    if (*rec_cmd) return cmd_recommend(g, recommend, out);
    if (*eval_cmd) return cmd_evaluate(g, evaluate, out);
    if (*tune_cmd) return cmd_tune(g, tune, out);
    if (*sweep_cmd) return cmd_sweep(g, sweep, out);
    if (*signal_cmd) return cmd_signal_test(g, signal, out);
    if (*ingest_cmd) return cmd_ingest(g, ingest, out);
    return 1;
  } catch (const UnknownEntityError& e) {
    err << "error: " << e.what() << "\n";
    if (!e.near_misses().empty()) {
      err << "did you mean: " << join(e.near_misses(), ", ") << "\n";
    }
    return 3;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace mlrec::cli
