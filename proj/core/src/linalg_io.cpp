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

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "hgrape/error.hpp"
#include "hgrape/linalg.hpp"

namespace hgrape {
namespace {

// Next line that is neither blank nor a '#' comment.
bool next_record(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

}  // namespace

void write_matrix(std::ostream& os, const SparseComplexMatrix& m) {
  const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
  os << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t p = m.row_offsets()[i]; p < m.row_offsets()[i + 1]; ++p) {
      os << i << ' ' << m.col_indices()[p] << ' ' << m.values()[p].real() << ' '
         << m.values()[p].imag() << '\n';
    }
  }
  os.precision(old_precision);
}

SparseComplexMatrix read_matrix(std::istream& is) {
  std::string line;
  if (!next_record(is, line)) throw ParseError("matrix: missing header");
  std::istringstream header(line);
  std::size_t rows = 0, cols = 0, nnz = 0;
  if (!(header >> rows >> cols >> nnz)) throw ParseError("matrix: malformed header '" + line + "'");
  std::vector<Triplet> triplets;
  triplets.reserve(nnz);
  for (std::size_t k = 0; k < nnz; ++k) {
    if (!next_record(is, line)) {
      throw ParseError("matrix: expected " + std::to_string(nnz) + " entries, got " +
                       std::to_string(k));
    }
    std::istringstream rec(line);
    std::size_t r = 0, c = 0;
    double re = 0.0, im = 0.0;
    if (!(rec >> r >> c >> re >> im)) throw ParseError("matrix: malformed entry '" + line + "'");
    triplets.push_back({r, c, Complex{re, im}});
  }
  return build_csr(std::move(triplets), rows, cols);
}

void write_vector(std::ostream& os, const StateVector& v) {
  const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
  os << v.dim() << '\n';
  for (std::size_t i = 0; i < v.dim(); ++i) os << v[i].real() << ' ' << v[i].imag() << '\n';
  os.precision(old_precision);
}

StateVector read_vector(std::istream& is) {
  std::string line;
  if (!next_record(is, line)) throw ParseError("vector: missing header");
  std::istringstream header(line);
  std::size_t dim = 0;
  if (!(header >> dim)) throw ParseError("vector: malformed header '" + line + "'");
  std::vector<Complex> entries(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    if (!next_record(is, line)) throw ParseError("vector: truncated after " + std::to_string(i));
    std::istringstream rec(line);
    double re = 0.0, im = 0.0;
    if (!(rec >> re >> im)) throw ParseError("vector: malformed entry '" + line + "'");
    entries[i] = Complex{re, im};
  }
  return StateVector(std::move(entries));
}

SparseComplexMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file '" + path + "'");
  return read_matrix(in);
}

StateVector load_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open vector file '" + path + "'");
  return read_vector(in);
}

void save_matrix(const std::string& path, const SparseComplexMatrix& m) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write matrix file '" + path + "'");
  write_matrix(out, m);
}

void save_vector(const std::string& path, const StateVector& v) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write vector file '" + path + "'");
  write_vector(out, v);
}

}  // namespace hgrape
