#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlrec/graph.hpp"
#include "mlrec/sparse.hpp"

namespace mlrec {

// Block-constant saliences keyed by (target role, source role).
struct SalienceMatrix {
  std::map<BlockKey, double> blocks;

  void set(std::string target, std::string source, double value);
  double at(const BlockKey& key) const;
  bool contains(const BlockKey& key) const { return blocks.contains(key); }
  std::string hash() const;
};

// Every structural block gets `value`.
SalienceMatrix uniform_salience(const RoleSchema& schema, double value = 1.0);

// File layout: {"target_role,source_role": value, ...}. Keys starting with
// '#' are annotations and are ignored.
SalienceMatrix parse_salience(std::string_view json_text);
SalienceMatrix load_salience(const std::filesystem::path& path);
std::string salience_to_json(const SalienceMatrix& salience);

// Keys must name structural blocks of the schema, values must be finite and
// non-negative, and every block of A that holds entries needs a value.
void validate_salience(const SupraAdjacency& graph, const SalienceMatrix& salience);

// Element-wise product of A with the block-constant salience matrix. Entries
// whose salience is zero are dropped.
CscMatrix apply_salience(const SupraAdjacency& graph, const SalienceMatrix& salience);

// Column-stochastic transition matrix. Dangling columns are not stored: the
// product treats each as the uniform column 1/N.
class TransitionMatrix {
 public:
  TransitionMatrix() = default;
  TransitionMatrix(CscMatrix normalized, std::vector<std::size_t> dangling);

  std::size_t size() const { return matrix_.rows(); }
  const CscMatrix& matrix() const { return matrix_; }
  std::span<const std::size_t> dangling() const { return dangling_; }

  // y = T x
  void apply(std::span<const double> x, std::span<double> y) const;
  // Serial column-oriented y = T x, used as a test reference.
  void apply_reference(std::span<const double> x, std::span<double> y) const;

  // Row-major dense copy with dangling columns filled in.
  std::vector<double> to_dense() const;

 private:
  CscMatrix matrix_;
  CsrMatrix rows_;
  std::vector<std::size_t> dangling_;
};

TransitionMatrix column_normalize(const CscMatrix& weights);

enum class Solver { power, linear };

std::string_view to_string(Solver solver);
Solver parse_solver(std::string_view text);

struct PageRankConfig {
  double rho = 0.12;  // teleport probability
  Solver solver = Solver::linear;
  double tolerance = 1e-10;  // L1 bound on the distance to the exact solution
  int max_iterations = 10000;

  void validate() const;
};

struct PageRankSolution {
  std::vector<double> scores;
  Solver solver = Solver::linear;
  int iterations = 0;
  double residual = 0.0;     // ||x - (1-rho) T x - rho v||_1
  double error_bound = 0.0;  // bound on ||x - pi||_1
  double seconds = 0.0;
};

std::string diagnostics_json(const PageRankSolution& solution);

// x(t+1) = (1 - rho) T x(t) + rho v, started at v. Stops once the contraction
// bound (1 - rho) / rho * ||x(t+1) - x(t)||_1 is below tolerance / 2.
PageRankSolution pagerank_power(const TransitionMatrix& t, std::span<const double> v, const PageRankConfig& config);

// BiCGSTAB on (I - (1 - rho) T) x = rho v. Stops once the true residual is
// below rho * tolerance / 2, which bounds the error by tolerance / 2.
PageRankSolution pagerank_linear(const TransitionMatrix& t, std::span<const double> v, const PageRankConfig& config);

PageRankSolution pagerank(const TransitionMatrix& t, std::span<const double> v, const PageRankConfig& config);

// Uniform teleport vector, pi*.
PageRankSolution unseeded_pagerank(const TransitionMatrix& t, const PageRankConfig& config);

std::vector<double> uniform_vector(std::size_t n);

}  // namespace mlrec
