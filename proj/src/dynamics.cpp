#include "mlrec/dynamics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "log.hpp"
#include "mlrec/error.hpp"
#include "mlrec/kernels.hpp"
#include "mlrec/text.hpp"

namespace mlrec {

void SalienceMatrix::set(std::string target, std::string source, double value) {
  blocks[BlockKey{std::move(target), std::move(source)}] = value;
}

double SalienceMatrix::at(const BlockKey& key) const {
  const auto it = blocks.find(key);
  if (it == blocks.end()) throw InputError("no salience for block (" + key.target + "," + key.source + ")");
  return it->second;
}

std::string SalienceMatrix::hash() const {
  Hasher h;
  for (const auto& [key, value] : blocks) h.update(key.target).update(key.source).update(value);
  return h.hex();
}

SalienceMatrix uniform_salience(const RoleSchema& schema, double value) {
  SalienceMatrix s;
  for (const auto& key : structural_blocks(schema)) s.blocks[key] = value;
  return s;
}

SalienceMatrix parse_salience(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("salience: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("salience: top level must be an object");
  SalienceMatrix s;
  for (const auto& [key, value] : doc.items()) {
    if (key.starts_with('#')) continue;  // annotations such as "#config_hash"
    const auto comma = key.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 == key.size() ||
        key.find(',', comma + 1) != std::string::npos) {
      throw InputError("salience: key '" + key + "' must look like target_role,source_role");
    }
    if (!value.is_number()) throw InputError("salience: value for '" + key + "' must be a number");
    s.set(key.substr(0, comma), key.substr(comma + 1), value.get<double>());
  }
  return s;
}

SalienceMatrix load_salience(const std::filesystem::path& path) {
  try {
    return parse_salience(read_file(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string salience_to_json(const SalienceMatrix& salience) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& [key, value] : salience.blocks) doc[key.target + "," + key.source] = value;
  return doc.dump(2) + "\n";
}

namespace {

std::vector<std::size_t> node_roles(const SupraAdjacency& graph) {
  std::vector<std::size_t> roles(graph.size());
  for (std::size_t r = 0; r < graph.schema().roles.size(); ++r) {
    std::fill_n(roles.begin() + static_cast<std::ptrdiff_t>(graph.role_offset(r)), graph.role_size(r), r);
  }
  return roles;
}

}  // namespace

void validate_salience(const SupraAdjacency& graph, const SalienceMatrix& salience) {
  const auto structural = structural_blocks(graph.schema());
  const std::set<BlockKey> allowed(structural.begin(), structural.end());
  for (const auto& [key, value] : salience.blocks) {
    if (!allowed.contains(key)) {
      throw InputError("salience block (" + key.target + "," + key.source + ") is not a block of the graph structure");
    }
    if (!std::isfinite(value) || value < 0.0) {
      throw InputError("salience for (" + key.target + "," + key.source + ") must be finite and non-negative");
    }
  }
  const auto roles = node_roles(graph);
  const std::size_t r = graph.schema().roles.size();
  std::vector<char> populated(r * r, 0);
  const CscMatrix& a = graph.matrix();
  for (std::size_t j = 0; j < a.cols(); ++j) {
    for (std::size_t i : a.column_rows(j)) populated[roles[i] * r + roles[j]] = 1;
  }
  for (std::size_t t = 0; t < r; ++t) {
    for (std::size_t s = 0; s < r; ++s) {
      if (!populated[t * r + s]) continue;
      const BlockKey key{graph.schema().roles[t].id, graph.schema().roles[s].id};
      if (!salience.contains(key)) {
        throw InputError("missing salience for populated block (" + key.target + "," + key.source + ")");
      }
    }
  }
}

CscMatrix apply_salience(const SupraAdjacency& graph, const SalienceMatrix& salience) {
  validate_salience(graph, salience);
  const auto roles = node_roles(graph);
  const std::size_t r = graph.schema().roles.size();
  std::vector<double> factor(r * r, 0.0);
  for (std::size_t t = 0; t < r; ++t) {
    for (std::size_t s = 0; s < r; ++s) {
      const auto it = salience.blocks.find({graph.schema().roles[t].id, graph.schema().roles[s].id});
      if (it != salience.blocks.end()) factor[t * r + s] = it->second;
    }
  }
  const CscMatrix& a = graph.matrix();
  std::vector<Triplet> out;
  out.reserve(a.nnz());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const auto rows = a.column_rows(j);
    const auto vals = a.column_values(j);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const double w = vals[k] * factor[roles[rows[k]] * r + roles[j]];
      if (w != 0.0) out.push_back({rows[k], j, w});
    }
  }
  return CscMatrix::from_triplets(a.rows(), a.cols(), std::move(out));
}

TransitionMatrix::TransitionMatrix(CscMatrix normalized, std::vector<std::size_t> dangling)
    : matrix_(std::move(normalized)), rows_(matrix_.to_csr()), dangling_(std::move(dangling)) {}

void TransitionMatrix::apply(std::span<const double> x, std::span<double> y) const {
  kernels::spmv(rows_, x, y);
  if (dangling_.empty()) return;
  double mass = 0.0;
  for (std::size_t j : dangling_) mass += x[j];
  const double share = mass / static_cast<double>(size());
  kernels::lincomb(1.0, y, 0.0, y, share, y);
}

void TransitionMatrix::apply_reference(std::span<const double> x, std::span<double> y) const {
  kernels::reference::spmv(matrix_, x, y);
  if (dangling_.empty()) return;
  double mass = 0.0;
  for (std::size_t j : dangling_) mass += x[j];
  const double share = mass / static_cast<double>(size());
  for (double& v : y) v += share;
}

std::vector<double> TransitionMatrix::to_dense() const {
  std::vector<double> dense = matrix_.to_dense();
  const std::size_t n = size();
  for (std::size_t j : dangling_) {
    for (std::size_t i = 0; i < n; ++i) dense[i * n + j] = 1.0 / static_cast<double>(n);
  }
  return dense;
}

TransitionMatrix column_normalize(const CscMatrix& weights) {
  if (weights.rows() != weights.cols()) throw InputError("transition matrix must be square");
  for (double w : weights.values()) {
    if (std::isnan(w) || w < 0.0 || std::isinf(w)) {
      throw InputError("cannot normalise a matrix with negative, infinite or NaN entries");
    }
  }
  CscMatrix t = weights;
  const auto col_ptr = t.col_ptr();
  auto values = t.mutable_values();
  std::vector<std::size_t> dangling;
  for (std::size_t j = 0; j < t.cols(); ++j) {
    double sum = 0.0;
    for (std::size_t k = col_ptr[j]; k < col_ptr[j + 1]; ++k) sum += values[k];
    if (sum == 0.0) {
      dangling.push_back(j);
      continue;
    }
    for (std::size_t k = col_ptr[j]; k < col_ptr[j + 1]; ++k) values[k] /= sum;
  }
  if (!dangling.empty()) {
    detail::logger().warn("{} dangling column(s) replaced by the uniform distribution", dangling.size());
  }
  return TransitionMatrix(std::move(t), std::move(dangling));
}

std::string_view to_string(Solver solver) { return solver == Solver::power ? "power" : "linear"; }

Solver parse_solver(std::string_view text) {
  if (text == "power") return Solver::power;
  if (text == "linear") return Solver::linear;
  throw InputError("unknown solver '" + std::string(text) + "' (expected power or linear)");
}

void PageRankConfig::validate() const {
  if (!(rho > 0.0 && rho <= 1.0)) throw InputError("teleport probability rho must be in (0, 1]");
  if (!(tolerance > 0.0) || !std::isfinite(tolerance)) throw InputError("tolerance must be positive");
  if (max_iterations < 1) throw InputError("max_iterations must be at least 1");
}

std::string diagnostics_json(const PageRankSolution& solution) {
  nlohmann::ordered_json doc;
  doc["solver"] = std::string(to_string(solution.solver));
  doc["iterations"] = solution.iterations;
  doc["residual"] = solution.residual;
  doc["error_bound"] = solution.error_bound;
  doc["seconds"] = solution.seconds;
  return doc.dump();
}

std::vector<double> uniform_vector(std::size_t n) {
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

PageRankSolution pagerank(const TransitionMatrix& t, std::span<const double> v, const PageRankConfig& config) {
  return config.solver == Solver::power ? pagerank_power(t, v, config) : pagerank_linear(t, v, config);
}

PageRankSolution unseeded_pagerank(const TransitionMatrix& t, const PageRankConfig& config) {
  const auto v = uniform_vector(t.size());
  return pagerank(t, v, config);
}

}  // namespace mlrec
