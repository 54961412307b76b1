#pragma once

#include <cstddef>
#include <span>

#include "mlrec/sparse.hpp"

// Data-parallel vector and sparse kernels used by the PageRank solvers.
//
// Every kernel produces bit-identical results for any OpenMP thread count:
// element-wise loops write disjoint outputs, sparse products gather rows in a
// fixed order, and reductions sum fixed-size chunks whose partials are then
// combined serially. The `reference` namespace holds straightforward serial
// versions that the tests and the benchmark compare against.
namespace mlrec::kernels {

inline constexpr std::size_t kReductionChunk = 4096;

// y = A x
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);

// out[i] = a * x[i] + b * y[i] + c
void lincomb(double a, std::span<const double> x, double b, std::span<const double> y, double c,
             std::span<double> out);

// y[i] += a * x[i]
void axpy(double a, std::span<const double> x, std::span<double> y);

double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
double l1_norm(std::span<const double> x);
double l1_distance(std::span<const double> x, std::span<const double> y);

namespace reference {

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
void spmv(const CscMatrix& a, std::span<const double> x, std::span<double> y);
void lincomb(double a, std::span<const double> x, double b, std::span<const double> y, double c,
             std::span<double> out);
void axpy(double a, std::span<const double> x, std::span<double> y);
double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
double l1_norm(std::span<const double> x);
double l1_distance(std::span<const double> x, std::span<const double> y);

}  // namespace reference
}  // namespace mlrec::kernels
