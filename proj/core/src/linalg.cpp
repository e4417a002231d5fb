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

#include "hgrape/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "hgrape/error.hpp"
#include "hgrape/instrument.hpp"

namespace hgrape {

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(std::size_t dim) : data_(dim) { sync_census(false); }

StateVector::StateVector(std::vector<Complex> entries) : data_(std::move(entries)) {
  sync_census(false);
}

StateVector::StateVector(std::initializer_list<Complex> entries) : data_(entries) {
  sync_census(false);
}

StateVector::StateVector(const StateVector& other) : data_(other.data_) { sync_census(false); }

StateVector::StateVector(StateVector&& other) noexcept
    : data_(std::move(other.data_)), tracked_(other.tracked_) {
  other.data_.clear();
  other.data_.shrink_to_fit();
  other.tracked_ = false;
}

StateVector& StateVector::operator=(const StateVector& other) {
  if (this != &other) {
    data_ = other.data_;
    sync_census(tracked_);
  }
  return *this;
}

StateVector& StateVector::operator=(StateVector&& other) noexcept {
  if (this != &other) {
    if (tracked_) instrument::on_vector_released();
    data_ = std::move(other.data_);
    tracked_ = other.tracked_;
    other.data_.clear();
    other.data_.shrink_to_fit();
    other.tracked_ = false;
  }
  return *this;
}

StateVector::~StateVector() {
  if (tracked_) instrument::on_vector_released();
}

void StateVector::sync_census(bool was_tracked) noexcept {
  const bool should = !data_.empty();
  if (should && !was_tracked) instrument::on_vector_acquired();
  if (!should && was_tracked) instrument::on_vector_released();
  tracked_ = should;
}

void StateVector::swap(StateVector& other) noexcept {
  data_.swap(other.data_);
  std::swap(tracked_, other.tracked_);
}

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw DimensionError("basis index out of range");
  StateVector v(dim);
  v[index] = 1.0;
  return v;
}

double StateVector::norm() const noexcept {
  double acc = 0.0;
  for (const auto& z : data_) acc += std::norm(z);
  return std::sqrt(acc);
}

bool StateVector::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

StateVector& StateVector::operator+=(const StateVector& other) {
  if (other.dim() != dim()) throw DimensionError("vector addition: dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

StateVector& StateVector::operator-=(const StateVector& other) {
  if (other.dim() != dim()) throw DimensionError("vector subtraction: dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

StateVector& StateVector::operator*=(Complex factor) noexcept {
  for (auto& z : data_) z *= factor;
  return *this;
}

StateVector operator+(StateVector lhs, const StateVector& rhs) { return lhs += rhs; }
StateVector operator-(StateVector lhs, const StateVector& rhs) { return lhs -= rhs; }
StateVector operator*(Complex factor, StateVector v) { return v *= factor; }

Complex inner(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw DimensionError("inner product: dimension mismatch");
  Complex acc = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

void axpy(Complex alpha, const StateVector& x, StateVector& y) {
  if (x.dim() != y.dim()) throw DimensionError("axpy: dimension mismatch");
  auto ys = y.entries();
  auto xs = x.entries();
  for (std::size_t i = 0; i < ys.size(); ++i) ys[i] += alpha * xs[i];
}

StateVector to_state(const Eigen::VectorXcd& v) {
  return StateVector(std::vector<Complex>(v.data(), v.data() + v.size()));
}

Eigen::VectorXcd to_eigen(const StateVector& v) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(v.dim()));
  for (std::size_t i = 0; i < v.dim(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

// ---------------------------------------------------------------------------
// SparseComplexMatrix

SparseComplexMatrix::SparseComplexMatrix(std::size_t rows, std::size_t cols,
                                         std::vector<std::size_t> offsets,
                                         std::vector<std::size_t> cols_idx,
                                         std::vector<Complex> values)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(offsets)),
      col_indices_(std::move(cols_idx)),
      values_(std::move(values)) {}

SparseComplexMatrix SparseComplexMatrix::identity(std::size_t n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return build_csr(std::move(t), n, n);
}

SparseComplexMatrix SparseComplexMatrix::zero(std::size_t rows, std::size_t cols) {
  return build_csr({}, rows, cols);
}

Complex SparseComplexMatrix::coeff(std::size_t i, std::size_t j) const {
  if (i >= rows_ || j >= cols_) throw DimensionError("coeff: index out of range");
  const auto first = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
  const auto last = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

SparseComplexMatrix SparseComplexMatrix::scaled(Complex factor) const {
  std::vector<std::size_t> offsets(rows_ + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<Complex> vals;
  cols.reserve(nnz());
  vals.reserve(nnz());
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      const Complex v = factor * values_[p];
      if (v != Complex{0.0}) {
        cols.push_back(col_indices_[p]);
        vals.push_back(v);
      }
    }
    offsets[i + 1] = cols.size();
  }
  return SparseComplexMatrix(rows_, cols_, std::move(offsets), std::move(cols), std::move(vals));
}

SparseComplexMatrix SparseComplexMatrix::adjoint() const {
  // Counting sort by column keeps the transposed rows sorted.
  std::vector<std::size_t> offsets(cols_ + 1, 0);
  for (const auto c : col_indices_) ++offsets[c + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<std::size_t> cols(nnz());
  std::vector<Complex> vals(nnz());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      const std::size_t dst = cursor[col_indices_[p]]++;
      cols[dst] = i;
      vals[dst] = std::conj(values_[p]);
    }
  }
  return SparseComplexMatrix(cols_, rows_, std::move(offsets), std::move(cols), std::move(vals));
}

SparseComplexMatrix build_csr(std::vector<Triplet> triplets, std::size_t n_rows,
                              std::size_t n_cols) {
  for (const auto& t : triplets) {
    if (t.row >= n_rows || t.col >= n_cols) {
      throw DimensionError("build_csr: triplet (" + std::to_string(t.row) + ", " +
                           std::to_string(t.col) + ") outside " + std::to_string(n_rows) + "x" +
                           std::to_string(n_cols));
    }
    if (!std::isfinite(t.value.real()) || !std::isfinite(t.value.imag())) {
      throw PreconditionError("build_csr: non-finite value");
    }
  }
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  std::vector<std::size_t> offsets(n_rows + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<Complex> vals;
  cols.reserve(triplets.size());
  vals.reserve(triplets.size());

  std::size_t k = 0;
  for (std::size_t i = 0; i < n_rows; ++i) {
    while (k < triplets.size() && triplets[k].row == i) {
      const std::size_t c = triplets[k].col;
      Complex sum = 0.0;
      while (k < triplets.size() && triplets[k].row == i && triplets[k].col == c) {
        sum += triplets[k].value;
        ++k;
      }
      if (sum != Complex{0.0}) {
        cols.push_back(c);
        vals.push_back(sum);
      }
    }
    offsets[i + 1] = cols.size();
  }
  return SparseComplexMatrix(n_rows, n_cols, std::move(offsets), std::move(cols),
                             std::move(vals));
}

// ---------------------------------------------------------------------------
// Products and norms

void multiply_into(const SparseComplexMatrix& m, std::span<const Complex> x, std::span<Complex> y,
                   Complex scale) {
  if (x.size() != m.cols() || y.size() != m.rows()) {
    throw DimensionError("matvec: dimension mismatch");
  }
  const auto offsets = m.row_offsets();
  const auto cols = m.col_indices();
  const auto vals = m.values();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Complex acc = 0.0;
    for (std::size_t p = offsets[i]; p < offsets[i + 1]; ++p) acc += vals[p] * x[cols[p]];
    y[i] = scale * acc;
  }
}

void multiply_into(const DenseMatrix& m, std::span<const Complex> x, std::span<Complex> y,
                   Complex scale) {
  if (x.size() != static_cast<std::size_t>(m.cols()) ||
      y.size() != static_cast<std::size_t>(m.rows())) {
    throw DimensionError("matvec: dimension mismatch");
  }
  Eigen::Map<const Eigen::VectorXcd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::Map<Eigen::VectorXcd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  yv.noalias() = m * xv;
  if (scale != Complex{1.0}) yv *= scale;
}

StateVector matvec(const SparseComplexMatrix& m, const StateVector& v) {
  if (m.cols() != v.dim()) throw DimensionError("matvec: dimension mismatch");
  StateVector out(m.rows());
  multiply_into(m, v.entries(), out.entries());
  return out;
}

StateVector matvec(const DenseMatrix& m, const StateVector& v) {
  if (static_cast<std::size_t>(m.cols()) != v.dim()) {
    throw DimensionError("matvec: dimension mismatch");
  }
  StateVector out(static_cast<std::size_t>(m.rows()));
  multiply_into(m, v.entries(), out.entries());
  return out;
}

double one_norm(const SparseComplexMatrix& m) {
  std::vector<double> col_sums(m.cols(), 0.0);
  const auto cols = m.col_indices();
  const auto vals = m.values();
  for (std::size_t p = 0; p < m.nnz(); ++p) col_sums[cols[p]] += std::abs(vals[p]);
  return col_sums.empty() ? 0.0 : *std::max_element(col_sums.begin(), col_sums.end());
}

double one_norm(const DenseMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

double inf_norm(const SparseComplexMatrix& m) {
  double best = 0.0;
  const auto offsets = m.row_offsets();
  const auto vals = m.values();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double row = 0.0;
    for (std::size_t p = offsets[i]; p < offsets[i + 1]; ++p) row += std::abs(vals[p]);
    best = std::max(best, row);
  }
  return best;
}

double inf_norm(const DenseMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

std::size_t max_row_nnz(const SparseComplexMatrix& m) {
  std::size_t best = 0;
  const auto offsets = m.row_offsets();
  for (std::size_t i = 0; i < m.rows(); ++i) best = std::max(best, offsets[i + 1] - offsets[i]);
  return best;
}

std::size_t max_row_nnz(const DenseMatrix& m) {
  std::size_t best = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::size_t row = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) row += (m(i, j) != Complex{0.0}) ? 1 : 0;
    best = std::max(best, row);
  }
  return best;
}

SparseComplexMatrix linear_combine(std::span<const Complex> coeffs,
                                   std::span<const SparseComplexMatrix> mats) {
  if (coeffs.size() != mats.size()) {
    throw DimensionError("linear_combine: coefficient count differs from matrix count");
  }
  if (mats.empty()) throw DimensionError("linear_combine: no matrices");
  const std::size_t rows = mats.front().rows();
  const std::size_t cols = mats.front().cols();
  std::size_t total = 0;
  for (const auto& m : mats) {
    if (m.rows() != rows || m.cols() != cols) {
      throw DimensionError("linear_combine: shape mismatch");
    }
    total += m.nnz();
  }

  std::vector<Triplet> triplets;
  triplets.reserve(total);
  for (std::size_t t = 0; t < mats.size(); ++t) {
    if (coeffs[t] == Complex{0.0}) continue;
    const auto& m = mats[t];
    const auto offsets = m.row_offsets();
    const auto idx = m.col_indices();
    const auto vals = m.values();
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t p = offsets[i]; p < offsets[i + 1]; ++p) {
        triplets.push_back({i, idx[p], coeffs[t] * vals[p]});
      }
    }
  }
  return build_csr(std::move(triplets), rows, cols);
}

SparseComplexMatrix multiply(const SparseComplexMatrix& a, const SparseComplexMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("multiply: inner dimensions differ");
  const auto ao = a.row_offsets();
  const auto ai = a.col_indices();
  const auto av = a.values();
  const auto bo = b.row_offsets();
  const auto bi = b.col_indices();
  const auto bv = b.values();
  std::vector<Triplet> triplets;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t p = ao[i]; p < ao[i + 1]; ++p) {
      const std::size_t k = ai[p];
      for (std::size_t q = bo[k]; q < bo[k + 1]; ++q) {
        triplets.push_back({i, bi[q], av[p] * bv[q]});
      }
    }
  }
  return build_csr(std::move(triplets), a.rows(), b.cols());
}

SparseComplexMatrix kron(const SparseComplexMatrix& a, const SparseComplexMatrix& b) {
  std::vector<Triplet> triplets;
  triplets.reserve(a.nnz() * b.nnz());
  const auto ao = a.row_offsets();
  const auto ai = a.col_indices();
  const auto av = a.values();
  const auto bo = b.row_offsets();
  const auto bi = b.col_indices();
  const auto bv = b.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t p = ao[i]; p < ao[i + 1]; ++p) {
      for (std::size_t k = 0; k < b.rows(); ++k) {
        for (std::size_t q = bo[k]; q < bo[k + 1]; ++q) {
          triplets.push_back({i * b.rows() + k, ai[p] * b.cols() + bi[q], av[p] * bv[q]});
        }
      }
    }
  }
  return build_csr(std::move(triplets), a.rows() * b.rows(), a.cols() * b.cols());
}

SparseComplexMatrix aux_embed(const SparseComplexMatrix& hamiltonian,
                              const SparseComplexMatrix& control, double dt) {
  if (!hamiltonian.square() || !control.square() || hamiltonian.rows() != control.rows()) {
    throw DimensionError("aux_embed: blocks must be square with equal dimension");
  }
  const std::size_t d = hamiltonian.rows();
  const Complex factor{0.0, -dt};
  std::vector<Triplet> t;
  t.reserve(2 * hamiltonian.nnz() + control.nnz());
  auto emit = [&](const SparseComplexMatrix& m, std::size_t r0, std::size_t c0) {
    const auto offsets = m.row_offsets();
    const auto idx = m.col_indices();
    const auto vals = m.values();
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t p = offsets[i]; p < offsets[i + 1]; ++p) {
        t.push_back({r0 + i, c0 + idx[p], factor * vals[p]});
      }
    }
  };
  emit(hamiltonian, 0, 0);
  emit(control, 0, d);
  emit(hamiltonian, d, d);
  return build_csr(std::move(t), 2 * d, 2 * d);
}

namespace {

// max |M_ij - sign * conj(M_ji)| over all stored positions of M and M^dagger.
double adjoint_deviation(const SparseComplexMatrix& m, double sign) {
  if (!m.square()) return std::numeric_limits<double>::infinity();
  const SparseComplexMatrix adj = m.adjoint();
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::size_t p = m.row_offsets()[i];
    std::size_t q = adj.row_offsets()[i];
    const std::size_t pe = m.row_offsets()[i + 1];
    const std::size_t qe = adj.row_offsets()[i + 1];
    while (p < pe || q < qe) {
      const std::size_t cp = p < pe ? m.col_indices()[p] : m.cols();
      const std::size_t cq = q < qe ? adj.col_indices()[q] : m.cols();
      Complex diff;
      if (cp == cq) {
        diff = m.values()[p++] - sign * adj.values()[q++];
      } else if (cp < cq) {
        diff = m.values()[p++];
      } else {
        diff = sign * adj.values()[q++];
      }
      worst = std::max(worst, std::abs(diff));
    }
  }
  return worst;
}

}  // namespace

bool is_hermitian(const SparseComplexMatrix& m, double tol) {
  return adjoint_deviation(m, 1.0) <= tol;
}

bool is_anti_hermitian(const SparseComplexMatrix& m, double tol) {
  return adjoint_deviation(m, -1.0) <= tol;
}

bool is_unitary(const DenseMatrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  const DenseMatrix gram = u.adjoint() * u;
  return (gram - DenseMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

DenseMatrix to_dense(const SparseComplexMatrix& m) {
  DenseMatrix out = DenseMatrix::Zero(static_cast<Eigen::Index>(m.rows()),
                                      static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t p = m.row_offsets()[i]; p < m.row_offsets()[i + 1]; ++p) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m.col_indices()[p])) =
          m.values()[p];
    }
  }
  return out;
}

SparseComplexMatrix from_dense(const DenseMatrix& m) {
  std::vector<Triplet> t;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != Complex{0.0}) {
        t.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), m(i, j)});
      }
    }
  }
  return build_csr(std::move(t), static_cast<std::size_t>(m.rows()),
                   static_cast<std::size_t>(m.cols()));
}

}  // namespace hgrape
