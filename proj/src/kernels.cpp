#include "mlrec/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace mlrec::kernels {

namespace {

using Index = std::int64_t;

// Fixed chunking makes the summation tree independent of the thread count.
template <class Term>
double chunked_reduce(std::size_t n, Term term) {
  const Index chunks = static_cast<Index>((n + kReductionChunk - 1) / kReductionChunk);
  if (chunks <= 1) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += term(i);
    return s;
  }
  std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < chunks; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kReductionChunk;
    const std::size_t end = std::min(n, begin + kReductionChunk);
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += term(i);
    partial[static_cast<std::size_t>(c)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

constexpr Index kParallelThreshold = 8192;

}  // namespace

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  const auto row_ptr = a.row_ptr();
  const auto col_idx = a.col_idx();
  const auto values = a.values();
  const Index rows = static_cast<Index>(a.rows());
#pragma omp parallel for schedule(static) if (rows >= kParallelThreshold)
  for (Index r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t k = row_ptr[static_cast<std::size_t>(r)]; k < row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
      s += values[k] * x[col_idx[k]];
    }
    y[static_cast<std::size_t>(r)] = s;
  }
}

void lincomb(double a, std::span<const double> x, double b, std::span<const double> y, double c,
             std::span<double> out) {
  const Index n = static_cast<Index>(out.size());
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = a * x[k] + b * y[k] + c;
  }
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  const Index n = static_cast<Index>(y.size());
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    y[k] += a * x[k];
  }
}

double sum(std::span<const double> x) {
  return chunked_reduce(x.size(), [&](std::size_t i) { return x[i]; });
}

double dot(std::span<const double> x, std::span<const double> y) {
  return chunked_reduce(x.size(), [&](std::size_t i) { return x[i] * y[i]; });
}

double l1_norm(std::span<const double> x) {
  return chunked_reduce(x.size(), [&](std::size_t i) { return std::abs(x[i]); });
}

double l1_distance(std::span<const double> x, std::span<const double> y) {
  return chunked_reduce(x.size(), [&](std::size_t i) { return std::abs(x[i] - y[i]); });
}

namespace reference {

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  const auto row_ptr = a.row_ptr();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double s = 0.0;
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += a.values()[k] * x[a.col_idx()[k]];
    y[r] = s;
  }
}

void spmv(const CscMatrix& a, std::span<const double> x, std::span<double> y) {
  for (std::size_t r = 0; r < a.rows(); ++r) y[r] = 0.0;
  for (std::size_t c = 0; c < a.cols(); ++c) {
    const auto rows = a.column_rows(c);
    const auto vals = a.column_values(c);
    for (std::size_t k = 0; k < rows.size(); ++k) y[rows[k]] += vals[k] * x[c];
  }
}

void lincomb(double a, std::span<const double> x, double b, std::span<const double> y, double c,
             std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * x[i] + b * y[i] + c;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

double sum(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double l1_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

double l1_distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
  return s;
}

}  // namespace reference
}  // namespace mlrec::kernels
