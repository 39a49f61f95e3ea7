// Copyright 2026 The qlll developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QLLL_TEST_HELPERS_HPP
#define QLLL_TEST_HELPERS_HPP

#include "qlll/instance.hpp"
#include "qlll/rng.hpp"

namespace qlll::testing {

inline ComplexMatrix random_matrix(Eigen::Index dim, Rng &rng) {
  ComplexMatrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      m(i, j) = Complex(rng.gaussian(), rng.gaussian());
    }
  }
  return m;
}

inline ComplexMatrix random_hermitian(Eigen::Index dim, Rng &rng) {
  const ComplexMatrix m = random_matrix(dim, rng);
  return (m + m.adjoint()) / 2.0;
}

inline ComplexMatrix random_psd(Eigen::Index dim, Rng &rng) {
  const ComplexMatrix m = random_matrix(dim, rng);
  return m * m.adjoint();
}

inline ComplexMatrix ket_bra(const Eigen::VectorXcd &v) {
  return v * v.adjoint();
}

inline ComplexMatrix basis_state(Eigen::Index dim, Eigen::Index index) {
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  rho(index, index) = 1.0;
  return rho;
}

inline ComplexMatrix projector_one() { // |1><1|
  return (ComplexMatrix(2, 2) << 0, 0, 0, 1).finished();
}

inline ComplexMatrix projector_plus() { // |+><+|
  return (ComplexMatrix(2, 2) << 0.5, 0.5, 0.5, 0.5).finished();
}

inline ComplexMatrix pauli_x() {
  return (ComplexMatrix(2, 2) << 0, 1, 1, 0).finished();
}

// Single flaw |1><1| on one qubit of an n-qubit register.
inline QsatInstance single_flaw_instance(int n = 1, int qubit = 0) {
  std::vector<Flaw> flaws;
  flaws.push_back({"f0", {qubit}, projector_one()});
  return QsatInstance(n, std::move(flaws));
}

// Two adjacent diagonal rank-1 flaws with p = 1/4 each (|11><11| on
// overlapping pairs of a 3-qubit chain).
inline QsatInstance two_adjacent_quarter_instance() {
  const ComplexMatrix ones = tensor(projector_one(), projector_one());
  std::vector<Flaw> flaws;
  flaws.push_back({"a", {0, 1}, ones});
  flaws.push_back({"b", {1, 2}, ones});
  return QsatInstance(3, std::move(flaws));
}

// Two adjacent single-qubit flaws with p = 1/2 each (same qubit).
inline QsatInstance two_adjacent_half_instance() {
  std::vector<Flaw> flaws;
  flaws.push_back({"a", {0}, projector_one()});
  flaws.push_back({"b", {0}, projector_plus()});
  return QsatInstance(1, std::move(flaws));
}

} // namespace qlll::testing

#endif
