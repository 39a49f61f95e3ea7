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

#include "qlll/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace qlll {

namespace {

int read_max_qubits() {
  const char *env = std::getenv("QLLL_MAX_QUBITS");
  if (env == nullptr) {
    return 14;
  }
  const long value = std::strtol(env, nullptr, 10);
  if (value < 1 || value > 30) {
    throw ValidationError("QLLL_MAX_QUBITS must be between 1 and 30");
  }
  return static_cast<int>(value);
}

void require_square(const ComplexMatrix &a, const char *what) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw DimensionError(std::string(what) + ": matrix must be square and non-empty");
  }
}

void require_sorted_distinct(const std::vector<int> &qubits, int n,
                             const char *what) {
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    if (qubits[i] < 0 || qubits[i] >= n) {
      throw DimensionError(std::string(what) + ": qubit index " +
                           std::to_string(qubits[i]) + " out of range for n=" +
                           std::to_string(n));
    }
    if (i > 0 && qubits[i] <= qubits[i - 1]) {
      throw DimensionError(std::string(what) +
                           ": qubit indices must be sorted and distinct");
    }
  }
}

// Table mapping the compact index over `qubits` (first listed qubit most
// significant) to its scattered bit pattern inside the full basis index.
std::vector<Eigen::Index> scatter_table(const std::vector<int> &qubits, int n) {
  const int s = static_cast<int>(qubits.size());
  std::vector<Eigen::Index> table(Eigen::Index{1} << s, 0);
  for (Eigen::Index v = 0; v < static_cast<Eigen::Index>(table.size()); ++v) {
    Eigen::Index full = 0;
    for (int i = 0; i < s; ++i) {
      if ((v >> (s - 1 - i)) & 1) {
        full |= Eigen::Index{1} << (n - 1 - qubits[i]);
      }
    }
    table[v] = full;
  }
  return table;
}

std::vector<int> complement_qubits(const std::vector<int> &qubits, int n) {
  std::vector<int> rest;
  rest.reserve(n - qubits.size());
  std::size_t k = 0;
  for (int q = 0; q < n; ++q) {
    if (k < qubits.size() && qubits[k] == q) {
      ++k;
    } else {
      rest.push_back(q);
    }
  }
  return rest;
}

double spectral_scale(const RealVector &eigenvalues) {
  double scale = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    scale = std::max(scale, std::abs(eigenvalues[i]));
  }
  return std::max(1.0, scale);
}

} // namespace

int max_qubits() {
  static const int value = read_max_qubits();
  return value;
}

Eigen::Index max_dim() { return Eigen::Index{1} << max_qubits(); }

void require_dim(Eigen::Index dim) {
  if (dim < 1) {
    throw DimensionError("matrix dimension must be positive");
  }
  if (dim > max_dim()) {
    throw SizeLimitError("dimension " + std::to_string(dim) +
                         " exceeds the simulation ceiling 2^" +
                         std::to_string(max_qubits()) +
                         " (set QLLL_MAX_QUBITS to override)");
  }
}

ComplexMatrix tensor(const ComplexMatrix &a, const ComplexMatrix &b) {
  require_square(a, "tensor");
  require_square(b, "tensor");
  const Eigen::Index ad = a.rows();
  const Eigen::Index bd = b.rows();
  if (ad > max_dim() / bd) {
    throw SizeLimitError("tensor product dimension exceeds the simulation ceiling");
  }
  ComplexMatrix out(ad * bd, ad * bd);
  for (Eigen::Index i = 0; i < ad; ++i) {
    for (Eigen::Index j = 0; j < ad; ++j) {
      out.block(i * bd, j * bd, bd, bd) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix embed_local(const ComplexMatrix &op,
                          const std::vector<int> &support, int n) {
  require_square(op, "embed_local");
  require_sorted_distinct(support, n, "embed_local");
  const int s = static_cast<int>(support.size());
  if (op.rows() != (Eigen::Index{1} << s)) {
    throw DimensionError("embed_local: operator dimension " +
                         std::to_string(op.rows()) +
                         " does not match 2^" + std::to_string(s));
  }
  require_dim(basis_dim(n));

  const auto sub = scatter_table(support, n);
  const auto rest = scatter_table(complement_qubits(support, n), n);
  const Eigen::Index sub_dim = static_cast<Eigen::Index>(sub.size());

  ComplexMatrix out = ComplexMatrix::Zero(basis_dim(n), basis_dim(n));
  for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(rest.size()); ++r) {
    const Eigen::Index base = rest[r];
    for (Eigen::Index i = 0; i < sub_dim; ++i) {
      for (Eigen::Index j = 0; j < sub_dim; ++j) {
        out(base | sub[i], base | sub[j]) = op(i, j);
      }
    }
  }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix &rho,
                            const std::vector<int> &traced, int n) {
  require_square(rho, "partial_trace");
  require_sorted_distinct(traced, n, "partial_trace");
  if (rho.rows() != basis_dim(n)) {
    throw DimensionError("partial_trace: state dimension does not match 2^n");
  }

  const auto tr = scatter_table(traced, n);
  const auto kept = scatter_table(complement_qubits(traced, n), n);
  const Eigen::Index kept_dim = static_cast<Eigen::Index>(kept.size());

  ComplexMatrix out = ComplexMatrix::Zero(kept_dim, kept_dim);
  for (Eigen::Index i = 0; i < kept_dim; ++i) {
    for (Eigen::Index j = 0; j < kept_dim; ++j) {
      Complex sum = 0.0;
      for (const Eigen::Index t : tr) {
        sum += rho(t | kept[i], t | kept[j]);
      }
      out(i, j) = sum;
    }
  }
  return out;
}

ComplexMatrix insert_maximally_mixed(const ComplexMatrix &rest,
                                     const std::vector<int> &positions,
                                     int n) {
  require_square(rest, "insert_maximally_mixed");
  require_sorted_distinct(positions, n, "insert_maximally_mixed");
  const int s = static_cast<int>(positions.size());
  if (rest.rows() != basis_dim(n - s)) {
    throw DimensionError(
        "insert_maximally_mixed: state dimension does not match 2^(n-s)");
  }
  require_dim(basis_dim(n));

  const auto mixed = scatter_table(positions, n);
  const auto kept = scatter_table(complement_qubits(positions, n), n);
  const double weight = 1.0 / static_cast<double>(Eigen::Index{1} << s);

  ComplexMatrix out = ComplexMatrix::Zero(basis_dim(n), basis_dim(n));
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(kept.size()); ++i) {
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(kept.size()); ++j) {
      const Complex value = weight * rest(i, j);
      for (const Eigen::Index m : mixed) {
        out(m | kept[i], m | kept[j]) = value;
      }
    }
  }
  return out;
}

double trace_norm(const ComplexMatrix &a) {
  require_square(a, "trace_norm");
  if (a.rows() <= 32) {
    Eigen::JacobiSVD<ComplexMatrix> solver(a);
    return solver.singularValues().sum();
  }
  Eigen::BDCSVD<ComplexMatrix> solver(a);
  return solver.singularValues().sum();
}

bool is_hermitian(const ComplexMatrix &a, double tol) {
  if (a.rows() != a.cols()) {
    return false;
  }
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

HermitianEig hermitian_eig(const ComplexMatrix &a) {
  require_square(a, "hermitian_eig");
  if (!is_hermitian(a)) {
    throw ValidationError("hermitian_eig: input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver((a + a.adjoint()) / 2.0);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Hermitian eigendecomposition failed to converge");
  }
  return HermitianEig{solver.eigenvalues(), solver.eigenvectors()};
}

double min_eigenvalue(const ComplexMatrix &hermitian) {
  return hermitian_eig(hermitian).eigenvalues.minCoeff();
}

double psd_leq_residual(const ComplexMatrix &a, const ComplexMatrix &b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("psd_leq: dimension mismatch");
  }
  return min_eigenvalue(b - a);
}

bool psd_leq(const ComplexMatrix &a, const ComplexMatrix &b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("psd_leq: dimension mismatch");
  }
  if (!is_hermitian(a) || !is_hermitian(b)) {
    throw ValidationError("psd_leq: inputs must be Hermitian");
  }
  const HermitianEig eig = hermitian_eig(b - a);
  const double norm1 = eig.eigenvalues.cwiseAbs().sum();
  return eig.eigenvalues.minCoeff() >= -tol * std::max(1.0, norm1);
}

Svd svd(const ComplexMatrix &a) {
  require_square(a, "svd");
  Eigen::JacobiSVD<ComplexMatrix> solver(a, Eigen::ComputeFullU |
                                                Eigen::ComputeFullV);
  return Svd{solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

ComplexMatrix kernel_projector(const ComplexMatrix &h, double zero_tol) {
  const HermitianEig eig = hermitian_eig(h);
  const double tol = zero_tol * spectral_scale(eig.eigenvalues);
  if (eig.eigenvalues.minCoeff() < -tol) {
    throw NumericalError("kernel_projector: input has eigenvalue " +
                         std::to_string(eig.eigenvalues.minCoeff()) +
                         " below the PSD tolerance");
  }
  ComplexMatrix proj = ComplexMatrix::Zero(h.rows(), h.cols());
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
    if (eig.eigenvalues[i] <= tol) {
      proj += eig.eigenvectors.col(i) * eig.eigenvectors.col(i).adjoint();
    }
  }
  return proj;
}

double smallest_nonzero_eig(const ComplexMatrix &h, double zero_tol) {
  const HermitianEig eig = hermitian_eig(h);
  const double tol = zero_tol * spectral_scale(eig.eigenvalues);
  if (eig.eigenvalues.minCoeff() < -tol) {
    throw NumericalError("smallest_nonzero_eig: input has eigenvalue below "
                         "the PSD tolerance");
  }
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
    if (eig.eigenvalues[i] > tol) {
      return eig.eigenvalues[i];
    }
  }
  return kInfiniteGap;
}

} // namespace qlll
