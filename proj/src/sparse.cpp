#include "mlrec/sparse.hpp"

#include <algorithm>
#include <stdexcept>

#include "mlrec/error.hpp"

namespace mlrec {

CscMatrix::CscMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), col_ptr_(cols + 1, 0) {}

CscMatrix CscMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols) throw InputError("sparse entry out of bounds");
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });

  CscMatrix m(rows, cols);
  m.row_idx_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  std::size_t i = 0;
  while (i < triplets.size()) {
    const std::size_t row = triplets[i].row;
    const std::size_t col = triplets[i].col;
    double value = 0.0;
    for (; i < triplets.size() && triplets[i].row == row && triplets[i].col == col; ++i) {
      value += triplets[i].value;
    }
    if (value == 0.0) continue;
    m.row_idx_.push_back(row);
    m.values_.push_back(value);
    ++m.col_ptr_[col + 1];
  }
  for (std::size_t c = 0; c < cols; ++c) m.col_ptr_[c + 1] += m.col_ptr_[c];
  return m;
}

std::span<const std::size_t> CscMatrix::column_rows(std::size_t col) const {
  return std::span<const std::size_t>(row_idx_).subspan(col_ptr_[col], col_ptr_[col + 1] - col_ptr_[col]);
}

std::span<const double> CscMatrix::column_values(std::size_t col) const {
  return std::span<const double>(values_).subspan(col_ptr_[col], col_ptr_[col + 1] - col_ptr_[col]);
}

double CscMatrix::coeff(std::size_t row, std::size_t col) const {
  if (row >= rows_ || col >= cols_) throw std::out_of_range("CscMatrix::coeff");
  const auto rows = column_rows(col);
  const auto it = std::lower_bound(rows.begin(), rows.end(), row);
  if (it == rows.end() || *it != row) return 0.0;
  return values_[col_ptr_[col] + static_cast<std::size_t>(it - rows.begin())];
}

std::vector<double> CscMatrix::column_sums() const {
  std::vector<double> sums(cols_, 0.0);
  for (std::size_t c = 0; c < cols_; ++c) {
    for (std::size_t k = col_ptr_[c]; k < col_ptr_[c + 1]; ++k) sums[c] += values_[k];
  }
  return sums;
}

double CscMatrix::total() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

CscMatrix CscMatrix::block(std::size_t row_begin, std::size_t row_end, std::size_t col_begin,
                           std::size_t col_end) const {
  if (row_begin > row_end || row_end > rows_ || col_begin > col_end || col_end > cols_) {
    throw std::out_of_range("CscMatrix::block");
  }
  CscMatrix out(row_end - row_begin, col_end - col_begin);
  for (std::size_t c = col_begin; c < col_end; ++c) {
    const auto rows = column_rows(c);
    const auto first = std::lower_bound(rows.begin(), rows.end(), row_begin);
    const auto last = std::lower_bound(first, rows.end(), row_end);
    for (auto it = first; it != last; ++it) {
      out.row_idx_.push_back(*it - row_begin);
      out.values_.push_back(values_[col_ptr_[c] + static_cast<std::size_t>(it - rows.begin())]);
    }
    out.col_ptr_[c - col_begin + 1] = out.row_idx_.size();
  }
  return out;
}

CscMatrix CscMatrix::transpose() const {
  CscMatrix t(cols_, rows_);
  std::vector<std::size_t> counts(rows_ + 1, 0);
  for (std::size_t r : row_idx_) ++counts[r + 1];
  for (std::size_t r = 0; r < rows_; ++r) counts[r + 1] += counts[r];
  t.col_ptr_ = counts;
  t.row_idx_.resize(nnz());
  t.values_.resize(nnz());
  std::vector<std::size_t> cursor(counts.begin(), counts.end() - 1);
  for (std::size_t c = 0; c < cols_; ++c) {
    for (std::size_t k = col_ptr_[c]; k < col_ptr_[c + 1]; ++k) {
      const std::size_t pos = cursor[row_idx_[k]]++;
      t.row_idx_[pos] = c;
      t.values_[pos] = values_[k];
    }
  }
  return t;
}

CsrMatrix CscMatrix::to_csr() const {
  // The CSR arrays of A are the CSC arrays of A^T.
  const CscMatrix t = transpose();
  CsrMatrix out;
  out.rows_ = rows_;
  out.cols_ = cols_;
  out.row_ptr_ = t.col_ptr_;
  out.col_idx_ = t.row_idx_;
  out.values_ = t.values_;
  return out;
}

std::vector<Triplet> CscMatrix::triplets() const {
  std::vector<Triplet> out;
  out.reserve(nnz());
  for (std::size_t c = 0; c < cols_; ++c) {
    for (std::size_t k = col_ptr_[c]; k < col_ptr_[c + 1]; ++k) out.push_back({row_idx_[k], c, values_[k]});
  }
  return out;
}

std::vector<double> CscMatrix::to_dense() const {
  std::vector<double> dense(rows_ * cols_, 0.0);
  for (std::size_t c = 0; c < cols_; ++c) {
    for (std::size_t k = col_ptr_[c]; k < col_ptr_[c + 1]; ++k) dense[row_idx_[k] * cols_ + c] = values_[k];
  }
  return dense;
}

}  // namespace mlrec
