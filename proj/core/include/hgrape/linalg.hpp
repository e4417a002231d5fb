// Copyright 2026 The hgrape Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HGRAPE_LINALG_HPP_
#define HGRAPE_LINALG_HPP_

#include <complex>
#include <concepts>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hgrape {

using Complex = std::complex<double>;

// Dense operators (eigensolver backend, targets, oracles). Column-major.
using DenseMatrix = Eigen::MatrixXcd;

// Complex state vector. Construction and destruction are reported to the
// live-vector census so that memory contracts can be checked exactly.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(std::size_t dim);
  explicit StateVector(std::vector<Complex> entries);
  StateVector(std::initializer_list<Complex> entries);

  StateVector(const StateVector& other);
  StateVector(StateVector&& other) noexcept;
  StateVector& operator=(const StateVector& other);
  StateVector& operator=(StateVector&& other) noexcept;
  ~StateVector();

  static StateVector basis(std::size_t dim, std::size_t index);

  std::size_t dim() const noexcept { return data_.size(); }
  Complex& operator[](std::size_t i) { return data_[i]; }
  const Complex& operator[](std::size_t i) const { return data_[i]; }
  std::span<Complex> entries() noexcept { return data_; }
  std::span<const Complex> entries() const noexcept { return data_; }

  double norm() const noexcept;
  bool all_finite() const noexcept;

  StateVector& operator+=(const StateVector& other);
  StateVector& operator-=(const StateVector& other);
  StateVector& operator*=(Complex factor) noexcept;

  void swap(StateVector& other) noexcept;

 private:
  void sync_census(bool was_tracked) noexcept;

  std::vector<Complex> data_;
  bool tracked_ = false;
};

StateVector operator+(StateVector lhs, const StateVector& rhs);
StateVector operator-(StateVector lhs, const StateVector& rhs);
StateVector operator*(Complex factor, StateVector v);

// <a|b>, conjugate-linear in the first argument.
Complex inner(const StateVector& a, const StateVector& b);
// y += alpha * x
void axpy(Complex alpha, const StateVector& x, StateVector& y);

StateVector to_state(const Eigen::VectorXcd& v);
Eigen::VectorXcd to_eigen(const StateVector& v);

struct Triplet {
  std::size_t row;
  std::size_t col;
  Complex value;
};

// Compressed sparse rows. Column indices are strictly increasing within a
// row, no stored value is an exact zero, and every value is finite.
class SparseComplexMatrix {
 public:
  SparseComplexMatrix() : row_offsets_(1, 0) {}

  static SparseComplexMatrix identity(std::size_t n);
  static SparseComplexMatrix zero(std::size_t rows, std::size_t cols);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }
  bool square() const noexcept { return rows_ == cols_; }

  std::span<const std::size_t> row_offsets() const noexcept { return row_offsets_; }
  std::span<const std::size_t> col_indices() const noexcept { return col_indices_; }
  std::span<const Complex> values() const noexcept { return values_; }

  // Entry (i, j), zero if not stored. O(log row length).
  Complex coeff(std::size_t i, std::size_t j) const;

  SparseComplexMatrix scaled(Complex factor) const;
  SparseComplexMatrix adjoint() const;

  friend SparseComplexMatrix build_csr(std::vector<Triplet> triplets, std::size_t n_rows,
                                       std::size_t n_cols);

 private:
  SparseComplexMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> offsets,
                      std::vector<std::size_t> cols_idx, std::vector<Complex> values);

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_offsets_;
  std::vector<std::size_t> col_indices_;
  std::vector<Complex> values_;
};

// Duplicates are summed and entries that sum to exactly zero are dropped.
// Throws DimensionError on out-of-range indices and PreconditionError on
// non-finite values.
SparseComplexMatrix build_csr(std::vector<Triplet> triplets, std::size_t n_rows,
                              std::size_t n_cols);

StateVector matvec(const SparseComplexMatrix& m, const StateVector& v);
StateVector matvec(const DenseMatrix& m, const StateVector& v);

// y = scale * (M x). x and y must not alias.
void multiply_into(const SparseComplexMatrix& m, std::span<const Complex> x, std::span<Complex> y,
                   Complex scale = 1.0);
void multiply_into(const DenseMatrix& m, std::span<const Complex> x, std::span<Complex> y,
                   Complex scale = 1.0);

template <typename Op>
concept LinearOperator = requires(const Op& op, std::span<const Complex> x, std::span<Complex> y) {
  { op.rows() } -> std::convertible_to<std::size_t>;
  { op.cols() } -> std::convertible_to<std::size_t>;
  multiply_into(op, x, y, Complex{1.0});
};

// Max column sum of moduli.
double one_norm(const SparseComplexMatrix& m);
double one_norm(const DenseMatrix& m);
// Max row sum of moduli.
double inf_norm(const SparseComplexMatrix& m);
double inf_norm(const DenseMatrix& m);

// sigma': largest number of stored nonzeros in any row.
std::size_t max_row_nnz(const SparseComplexMatrix& m);
std::size_t max_row_nnz(const DenseMatrix& m);

// sum_i coeffs[i] * mats[i]; exact zeros are dropped from the result.
SparseComplexMatrix linear_combine(std::span<const Complex> coeffs,
                                   std::span<const SparseComplexMatrix> mats);

// a * b; exact zeros are dropped from the result.
SparseComplexMatrix multiply(const SparseComplexMatrix& a, const SparseComplexMatrix& b);

// Kronecker product a (x) b; row index of the result is i_a * b.rows() + i_b.
SparseComplexMatrix kron(const SparseComplexMatrix& a, const SparseComplexMatrix& b);

// [[-i H dt, -i h_c dt], [0, -i H dt]], size 2d x 2d.
SparseComplexMatrix aux_embed(const SparseComplexMatrix& hamiltonian,
                              const SparseComplexMatrix& control, double dt);

// max |M - M^dagger| <= tol
bool is_hermitian(const SparseComplexMatrix& m, double tol);
// max |M + M^dagger| <= tol
bool is_anti_hermitian(const SparseComplexMatrix& m, double tol);
bool is_unitary(const DenseMatrix& u, double tol);

DenseMatrix to_dense(const SparseComplexMatrix& m);
SparseComplexMatrix from_dense(const DenseMatrix& m);

// Line-based text format: header "rows cols nnz", then "row col re im".
void write_matrix(std::ostream& os, const SparseComplexMatrix& m);
SparseComplexMatrix read_matrix(std::istream& is);
// Header "dim", then "re im" per entry.
void write_vector(std::ostream& os, const StateVector& v);
StateVector read_vector(std::istream& is);

SparseComplexMatrix load_matrix(const std::string& path);
StateVector load_vector(const std::string& path);
void save_matrix(const std::string& path, const SparseComplexMatrix& m);
void save_vector(const std::string& path, const StateVector& v);

}  // namespace hgrape

#endif  // HGRAPE_LINALG_HPP_
