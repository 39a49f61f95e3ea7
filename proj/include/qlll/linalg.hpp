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

#ifndef QLLL_LINALG_HPP
#define QLLL_LINALG_HPP

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qlll {

using Complex = std::complex<double>;

// Dense square complex matrix in row-major layout. The universal carrier for
// states, projectors and Hamiltonians.
using ComplexMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RealVector = Eigen::VectorXd;

class Error : public std::runtime_error {
public:
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

// Shape mismatch or invalid index arguments.
class DimensionError : public Error {
public:
  using Error::Error;
};

// Instance larger than the configured simulation ceiling.
class SizeLimitError : public Error {
public:
  using Error::Error;
};

// Structurally invalid input (non-Hermitian, bad projector, parse failure).
class ValidationError : public Error {
public:
  using Error::Error;
};

// Input violates a numerical assumption (e.g. negative eigenvalue where a
// positive semidefinite operator was required).
class NumericalError : public Error {
public:
  using Error::Error;
};

// A channel precondition does not hold for the supplied state.
class PreconditionError : public Error {
public:
  using Error::Error;
};

// Largest simulable qubit count. Defaults to 14 and may be overridden with
// the QLLL_MAX_QUBITS environment variable (read once per process).
int max_qubits();
Eigen::Index max_dim();

// Throws SizeLimitError if dim exceeds max_dim() or is not positive.
void require_dim(Eigen::Index dim);

// Basis-index convention used everywhere: qubit 0 is the most significant
// bit of the computational basis index.
inline Eigen::Index basis_dim(int n) { return Eigen::Index{1} << n; }

constexpr double kInfiniteGap = std::numeric_limits<double>::infinity();

// Kronecker product with a's indices outermost.
ComplexMatrix tensor(const ComplexMatrix &a, const ComplexMatrix &b);

// Embeds a local operator acting on the given (sorted, distinct) qubits into
// the full 2^n-dimensional space, identity elsewhere. Within the local
// operator, support[0] is the most significant bit of the local basis index.
ComplexMatrix embed_local(const ComplexMatrix &op,
                          const std::vector<int> &support, int n);

// Traces out the listed qubits; remaining qubits keep their relative order.
ComplexMatrix partial_trace(const ComplexMatrix &rho,
                            const std::vector<int> &traced, int n);

// Replaces the listed qubits of an (n - |positions|)-qubit operator by
// maximally mixed qubits at the given positions of the full register.
ComplexMatrix insert_maximally_mixed(const ComplexMatrix &rest,
                                     const std::vector<int> &positions, int n);

// Sum of singular values.
double trace_norm(const ComplexMatrix &a);

bool is_hermitian(const ComplexMatrix &a, double tol = 1e-10);

// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const ComplexMatrix &hermitian);

// Semidefinite comparison a <= b: true iff the minimum eigenvalue of (b - a)
// is >= -tol * max(1, ||b - a||_1). Inputs must be Hermitian within 1e-10.
bool psd_leq(const ComplexMatrix &a, const ComplexMatrix &b,
             double tol = 1e-8);

// Signed residual of the comparison above: min eigenvalue of (b - a).
double psd_leq_residual(const ComplexMatrix &a, const ComplexMatrix &b);

struct HermitianEig {
  RealVector eigenvalues;     // ascending
  ComplexMatrix eigenvectors; // columns, unitary
};

HermitianEig hermitian_eig(const ComplexMatrix &a);

// a = w * sigma.asDiagonal() * u.adjoint(), sigma nonnegative descending.
struct Svd {
  ComplexMatrix w;
  RealVector sigma;
  ComplexMatrix u;
};

Svd svd(const ComplexMatrix &a);

// Orthogonal projector onto the span of eigenvectors with eigenvalue at most
// zero_tol (scaled by the spectral norm when that exceeds 1). Throws
// NumericalError when an eigenvalue lies below the negative tolerance.
ComplexMatrix kernel_projector(const ComplexMatrix &h, double zero_tol = 1e-8);

// Smallest eigenvalue above the zero threshold, or +infinity when the
// operator is (numerically) zero on its whole spectrum.
double smallest_nonzero_eig(const ComplexMatrix &h, double zero_tol = 1e-8);

} // namespace qlll

#endif
