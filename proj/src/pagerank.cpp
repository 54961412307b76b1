#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "mlrec/dynamics.hpp"
#include "mlrec/error.hpp"
#include "mlrec/kernels.hpp"

namespace mlrec {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_teleport(const TransitionMatrix& t, std::span<const double> v) {
  if (v.size() != t.size()) {
    throw InputError("teleport vector has " + std::to_string(v.size()) + " entries, graph has " +
                     std::to_string(t.size()) + " nodes");
  }
  if (v.empty()) throw InputError("cannot solve PageRank on an empty graph");
  for (double x : v) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InputError("teleport vector entries must be finite and non-negative");
  }
  const double total = kernels::sum(v);
  if (std::abs(total - 1.0) > 1e-9) throw InputError("teleport vector must sum to 1");
}

// out = x - (1 - rho) T x
void apply_system(const TransitionMatrix& t, double rho, std::span<const double> x, std::span<double> scratch,
                  std::span<double> out) {
  t.apply(x, scratch);
  kernels::lincomb(1.0, x, -(1.0 - rho), scratch, 0.0, out);
}

double true_residual(const TransitionMatrix& t, double rho, std::span<const double> x, std::span<const double> b,
                     std::span<double> scratch, std::span<double> r) {
  apply_system(t, rho, x, scratch, r);
  kernels::lincomb(1.0, b, -1.0, r, 0.0, r);
  return kernels::l1_norm(r);
}

PageRankSolution teleport_limit(std::span<const double> v, Solver solver, Clock::time_point start) {
  PageRankSolution out;
  out.scores.assign(v.begin(), v.end());
  out.solver = solver;
  out.seconds = seconds_since(start);
  return out;
}

// T v == v makes v the solution for every rho. Equality is checked to a few
// ulp, since a symmetric instance such as K(5,5) has entries like 0.2 and
// reproduces v only up to rounding; v is then closer than any iterate.
bool teleport_is_fixed_point(const TransitionMatrix& t, std::span<const double> v) {
  std::vector<double> tv(v.size());
  t.apply(v, tv);
  constexpr double kUlps = 8 * std::numeric_limits<double>::epsilon();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::abs(tv[i] - v[i]) > kUlps * std::max(std::abs(v[i]), std::abs(tv[i]))) return false;
  }
  return true;
}

}  // namespace

PageRankSolution pagerank_power(const TransitionMatrix& t, std::span<const double> v, const PageRankConfig& config) {
  const auto start = Clock::now();
  config.validate();
  check_teleport(t, v);
  const double rho = config.rho;
  if (rho == 1.0 || teleport_is_fixed_point(t, v)) return teleport_limit(v, Solver::power, start);

  const std::size_t n = t.size();
  std::vector<double> x(v.begin(), v.end());
  std::vector<double> y(n);
  const double contraction = (1.0 - rho) / rho;
  double bound = std::numeric_limits<double>::infinity();
  int iterations = 0;
  while (iterations < config.max_iterations) {
    t.apply(x, y);
    kernels::lincomb(1.0 - rho, y, rho, v, 0.0, y);
    const double delta = kernels::l1_distance(x, y);
    x.swap(y);
    ++iterations;
    bound = contraction * delta;
    if (bound <= config.tolerance / 2) break;
  }
  std::vector<double> scratch(n);
  std::vector<double> b(n);
  kernels::lincomb(rho, v, 0.0, v, 0.0, b);
  const double residual = true_residual(t, rho, x, b, scratch, y);
  if (bound > config.tolerance / 2) {
    throw ConvergenceError("power iteration did not converge in " + std::to_string(iterations) +
                               " iterations (error bound " + std::to_string(bound) + ")",
                           iterations, residual);
  }
  PageRankSolution out;
  out.scores = std::move(x);
  out.solver = Solver::power;
  out.iterations = iterations;
  out.residual = residual;
  out.error_bound = bound;
  out.seconds = seconds_since(start);
  return out;
}

PageRankSolution pagerank_linear(const TransitionMatrix& t, std::span<const double> v, const PageRankConfig& config) {
  const auto start = Clock::now();
  config.validate();
  check_teleport(t, v);
  const double rho = config.rho;
  if (rho == 1.0 || teleport_is_fixed_point(t, v)) return teleport_limit(v, Solver::linear, start);

  // ||x - pi||_1 <= ||M^-1||_1 ||r||_1 <= ||r||_1 / rho for M = I - (1-rho) T.
  const double target = rho * config.tolerance / 2;
  const std::size_t n = t.size();
  std::vector<double> b(n), x(v.begin(), v.end()), r(n), r_hat(n), p(n), q(n), s(n), u(n), scratch(n);
  kernels::lincomb(rho, v, 0.0, v, 0.0, b);

  int iterations = 0;
  double residual = true_residual(t, rho, x, b, scratch, r);
  while (residual > target && iterations < config.max_iterations) {
    // (Re)start from the true residual.
    r_hat = r;
    double rho_prev = 1.0, alpha = 1.0, omega = 1.0;
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(q.begin(), q.end(), 0.0);
    while (iterations < config.max_iterations) {
      ++iterations;
      const double rho_next = kernels::dot(r_hat, r);
      if (rho_next == 0.0 || !std::isfinite(rho_next)) break;
      const double beta = (rho_next / rho_prev) * (alpha / omega);
      kernels::lincomb(1.0, p, -omega, q, 0.0, p);
      kernels::lincomb(1.0, r, beta, p, 0.0, p);
      apply_system(t, rho, p, scratch, q);
      const double denom = kernels::dot(r_hat, q);
      if (denom == 0.0 || !std::isfinite(denom)) break;
      alpha = rho_next / denom;
      kernels::lincomb(1.0, r, -alpha, q, 0.0, s);
      if (kernels::l1_norm(s) <= target) {
        kernels::axpy(alpha, p, x);
        break;
      }
      apply_system(t, rho, s, scratch, u);
      const double uu = kernels::dot(u, u);
      if (uu == 0.0 || !std::isfinite(uu)) {
        kernels::axpy(alpha, p, x);
        break;
      }
      omega = kernels::dot(u, s) / uu;
      kernels::axpy(alpha, p, x);
      kernels::axpy(omega, s, x);
      kernels::lincomb(1.0, s, -omega, u, 0.0, r);
      rho_prev = rho_next;
      if (omega == 0.0 || kernels::l1_norm(r) <= target) break;
    }
    residual = true_residual(t, rho, x, b, scratch, r);
  }
  if (residual > target) {
    throw ConvergenceError("linear solver did not reach residual " + std::to_string(target) + " in " +
                               std::to_string(iterations) + " iterations (residual " + std::to_string(residual) + ")",
                           iterations, residual);
  }
  PageRankSolution out;
  out.scores = std::move(x);
  out.solver = Solver::linear;
  out.iterations = iterations;
  out.residual = residual;
  out.error_bound = residual / rho;
  out.seconds = seconds_since(start);
  return out;
}

}  // namespace mlrec
