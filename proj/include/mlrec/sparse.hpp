#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mlrec {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

class CsrMatrix;

// Compressed sparse column storage. Row indices are sorted within each column
// and no explicit zeros are stored.
class CscMatrix {
 public:
  CscMatrix() = default;
  CscMatrix(std::size_t rows, std::size_t cols);

  // Duplicate coordinates are summed; entries that end up exactly zero are
  // dropped.
  static CscMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const std::size_t> col_ptr() const { return col_ptr_; }
  std::span<const std::size_t> row_idx() const { return row_idx_; }
  std::span<const double> values() const { return values_; }
  std::span<double> mutable_values() { return values_; }

  std::span<const std::size_t> column_rows(std::size_t col) const;
  std::span<const double> column_values(std::size_t col) const;

  double coeff(std::size_t row, std::size_t col) const;
  std::vector<double> column_sums() const;
  double total() const;

  // Sub-matrix [row_begin,row_end) x [col_begin,col_end), re-based at 0.
  CscMatrix block(std::size_t row_begin, std::size_t row_end, std::size_t col_begin,
                  std::size_t col_end) const;
  CscMatrix transpose() const;
  CsrMatrix to_csr() const;
  std::vector<Triplet> triplets() const;

  // Row-major dense copy, rows() * cols() entries.
  std::vector<double> to_dense() const;

  friend bool operator==(const CscMatrix&, const CscMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> col_ptr_{0};
  std::vector<std::size_t> row_idx_;
  std::vector<double> values_;
};

// Compressed sparse row storage, used for gather-style products where each
// output entry is owned by exactly one thread.
class CsrMatrix {
 public:
  CsrMatrix() = default;

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::size_t> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

 private:
  friend class CscMatrix;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

}  // namespace mlrec
