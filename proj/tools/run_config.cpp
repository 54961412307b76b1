#include "run_config.hpp"

#include <json.hpp>

#include <cstdlib>
#include <set>

#include "mlrec/error.hpp"
#include "mlrec/text.hpp"

namespace mlrec::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::set<std::string> kTopLevel{"paths",     "pagerank", "filter",  "seed_mass",      "item_roles",
                                      "cutoffs",   "train_fraction", "rng_seed", "workers", "user_subsample"};

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw InputError("config: unknown field '" + where + key + "'");
  }
}

template <class T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError("config: field '" + where + key + "' has the wrong type");
  }
}

}  // namespace

void RunConfig::validate() const {
  recommender.validate();
  if (cutoffs.empty()) throw InputError("at least one cutoff is required");
  for (std::size_t k : cutoffs) {
    if (k < 1) throw InputError("cutoffs must be at least 1");
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InputError("train_fraction must be in (0, 1)");
  if (workers < 0) throw InputError("workers must be >= 0");
}

std::string RunConfig::settings_hash() const {
  Hasher h;
  h.update(std::string_view("run-config-v1"));
  const auto& pr = recommender.pagerank;
  h.update(pr.rho).update(pr.tolerance).update(to_string(pr.solver));
  h.update(static_cast<std::uint64_t>(pr.max_iterations));
  h.update(recommender.filter.theta).update(static_cast<std::uint64_t>(recommender.filter.top_k));
  h.update(recommender.seed_mass);
  h.update(static_cast<std::uint64_t>(recommender.item_roles.size()));
  for (const auto& r : recommender.item_roles) h.update(r);
  h.update(static_cast<std::uint64_t>(cutoffs.size()));
  for (std::size_t k : cutoffs) h.update(static_cast<std::uint64_t>(k));
  h.update(train_fraction).update(rng_seed).update(static_cast<std::uint64_t>(user_subsample));
  return h.hex();
}

RunConfig parse_run_config(std::string_view json_text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("config: top level must be an object");
  reject_unknown(doc, kTopLevel, "");
  RunConfig c;
  auto resolve = [&](const std::string& p) { return p.empty() ? fs::path() : base_dir / fs::path(p); };
  if (doc.contains("paths")) {
    const json& p = doc["paths"];
    reject_unknown(p, {"graph", "salience", "dataset", "cache", "output"}, "paths.");
    if (p.contains("graph")) c.paths.graph = resolve(get<std::string>(p, "graph", "paths."));
    if (p.contains("salience")) c.paths.salience = resolve(get<std::string>(p, "salience", "paths."));
    if (p.contains("dataset")) c.paths.dataset = resolve(get<std::string>(p, "dataset", "paths."));
    if (p.contains("cache")) c.paths.cache = resolve(get<std::string>(p, "cache", "paths."));
    if (p.contains("output")) c.paths.output = resolve(get<std::string>(p, "output", "paths."));
  }
  auto& pr = c.recommender.pagerank;
  if (doc.contains("pagerank")) {
    const json& p = doc["pagerank"];
    reject_unknown(p, {"rho", "tolerance", "solver", "max_iterations"}, "pagerank.");
    if (p.contains("rho")) pr.rho = get<double>(p, "rho", "pagerank.");
    if (p.contains("tolerance")) pr.tolerance = get<double>(p, "tolerance", "pagerank.");
    if (p.contains("solver")) pr.solver = parse_solver(get<std::string>(p, "solver", "pagerank."));
    if (p.contains("max_iterations")) pr.max_iterations = get<int>(p, "max_iterations", "pagerank.");
  }
  auto& f = c.recommender.filter;
  if (doc.contains("filter")) {
    const json& p = doc["filter"];
    reject_unknown(p, {"theta", "top_k"}, "filter.");
    if (p.contains("theta")) {
      // JSON has no infinity; accept it as a string.
      f.theta = p["theta"].is_string() ? parse_double(p["theta"].get<std::string>()) : get<double>(p, "theta", "filter.");
    }
    if (p.contains("top_k")) f.top_k = get<std::size_t>(p, "top_k", "filter.");
  }
  if (doc.contains("seed_mass")) c.recommender.seed_mass = get<double>(doc, "seed_mass", "");
  if (doc.contains("item_roles")) c.recommender.item_roles = get<std::vector<std::string>>(doc, "item_roles", "");
  if (doc.contains("cutoffs")) c.cutoffs = get<std::vector<std::size_t>>(doc, "cutoffs", "");
  if (doc.contains("train_fraction")) c.train_fraction = get<double>(doc, "train_fraction", "");
  if (doc.contains("rng_seed")) c.rng_seed = get<std::uint64_t>(doc, "rng_seed", "");
  if (doc.contains("workers")) c.workers = get<int>(doc, "workers", "");
  if (doc.contains("user_subsample")) c.user_subsample = get<std::size_t>(doc, "user_subsample", "");
  c.validate();
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  try {
    return parse_run_config(read_file(path), path.parent_path());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string run_config_to_json(const RunConfig& c) {
  nlohmann::ordered_json doc;
  doc["paths"] = {{"graph", c.paths.graph.string()},
                  {"salience", c.paths.salience.string()},
                  {"dataset", c.paths.dataset.string()},
                  {"cache", c.paths.cache.string()},
                  {"output", c.paths.output.string()}};
  const auto& pr = c.recommender.pagerank;
  doc["pagerank"] = {{"rho", pr.rho},
                     {"tolerance", pr.tolerance},
                     {"solver", std::string(to_string(pr.solver))},
                     {"max_iterations", pr.max_iterations}};
  const double theta = c.recommender.filter.theta;
  doc["filter"] = {{"theta", std::isfinite(theta) ? nlohmann::ordered_json(theta) : nlohmann::ordered_json(format_double(theta))},
                   {"top_k", c.recommender.filter.top_k}};
  doc["seed_mass"] = c.recommender.seed_mass;
  doc["item_roles"] = c.recommender.item_roles;
  doc["cutoffs"] = c.cutoffs;
  doc["train_fraction"] = c.train_fraction;
  doc["rng_seed"] = c.rng_seed;
  doc["workers"] = c.workers;
  doc["user_subsample"] = c.user_subsample;
  return doc.dump(2) + "\n";
}

std::optional<fs::path> cache_dir(const RunConfig& config) {
  if (const char* env = std::getenv("MLREC_CACHE_DIR"); env && *env) return fs::path(env);
  if (!config.paths.cache.empty()) return config.paths.cache;
  return std::nullopt;
}

std::vector<std::size_t> parse_cutoffs(std::string_view text) {
  std::vector<std::size_t> out;
  for (const auto& field : split_record(text, ',')) {
    const auto k = parse_int(field);
    if (k < 1) throw InputError("cutoffs must be positive integers");
    out.push_back(static_cast<std::size_t>(k));
  }
  if (out.empty()) throw InputError("at least one cutoff is required");
  return out;
}

}  // namespace mlrec::cli
