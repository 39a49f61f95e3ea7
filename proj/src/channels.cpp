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

#include "qlll/channels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace qlll {

namespace {

constexpr double kSupportTol = 1e-8;
constexpr double kSgnZeroTol = 1e-8;
constexpr long kDirectIterationCap = 4096;

// sum_{i=0}^{m-1} x^i for x in [0,1], stable near x = 1.
double geometric_series_sum(double x, long m) {
  if (m <= 0) {
    return 0.0;
  }
  x = std::clamp(x, 0.0, 1.0);
  if (x == 1.0) {
    return static_cast<double>(m);
  }
  const double log_x = std::log1p(x - 1.0);
  return -std::expm1(static_cast<double>(m) * log_x) / (1.0 - x);
}

// x^m for x in [0,1].
double stable_power(double x, long m) {
  if (m == 0) {
    return 1.0;
  }
  x = std::clamp(x, 0.0, 1.0);
  if (x == 0.0) {
    return 0.0;
  }
  return std::exp(static_cast<double>(m) * std::log1p(x - 1.0));
}

ComplexMatrix identity_like(Eigen::Index dim) {
  return ComplexMatrix::Identity(dim, dim);
}

// Superoperator of rho -> K rho K^adj over row-major vec(rho).
ComplexMatrix sandwich_superop(const ComplexMatrix &k) {
  const Eigen::Index d = k.rows();
  ComplexMatrix out(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) {
          out(i * d + j, a * d + b) = k(i, a) * std::conj(k(j, b));
        }
      }
    }
  }
  return out;
}

Eigen::VectorXcd vec_state(const ComplexMatrix &rho) {
  return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

ComplexMatrix unvec_state(const Eigen::VectorXcd &x, Eigen::Index dim) {
  ComplexMatrix out(dim, dim);
  Eigen::Map<Eigen::VectorXcd>(out.data(), out.size()) = x;
  return out;
}

// (Psi^t, sum_{i<t} Psi^i) by binary doubling.
std::pair<ComplexMatrix, ComplexMatrix> power_and_sum(const ComplexMatrix &psi,
                                                      long t) {
  const Eigen::Index d = psi.rows();
  ComplexMatrix power = identity_like(d);
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  if (t <= 0) {
    return {power, sum};
  }
  const int bits = 64 - std::countl_zero(static_cast<std::uint64_t>(t));
  for (int b = bits - 1; b >= 0; --b) {
    sum = sum + power * sum;
    power = power * power;
    if ((t >> b) & 1) {
      sum += power;
      power = power * psi;
    }
  }
  return {power, sum};
}

ComplexMatrix matrix_power_by_squaring(ComplexMatrix base, long exponent) {
  ComplexMatrix result = identity_like(base.rows());
  while (exponent > 0) {
    if (exponent & 1) {
      result = result * base;
    }
    base = base * base;
    exponent >>= 1;
  }
  return result;
}

std::vector<int> mask_to_indices(FlawMask mask, int count) {
  std::vector<int> out;
  for (int f = 0; f < count; ++f) {
    if ((mask >> f) & 1) {
      out.push_back(f);
    }
  }
  return out;
}

ComplexMatrix weak_good_operator(const ComplexMatrix &projector,
                                 double theta) {
  const double shrink = 1.0 - std::sqrt(1.0 - theta);
  return identity_like(projector.rows()) - shrink * projector;
}

void require_theta(double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw ValidationError("theta must lie in (0, 1]");
  }
}

// (Id - P) rho (Id - P) in two multiplications, valid for any input.
ComplexMatrix project_out(const ComplexMatrix &rho,
                          const ComplexMatrix &projector) {
  const ComplexMatrix left = rho - projector * rho;
  return left - left * projector;
}

RealVector sgn_vector(const RealVector &sigma) {
  const double sigma_max = sigma.size() > 0 ? sigma.maxCoeff() : 0.0;
  RealVector sgn = RealVector::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    sgn[i] = sigma[i] > kSgnZeroTol * std::max(1.0, sigma_max) ? 1.0 : 0.0;
  }
  return sgn;
}

std::uint64_t theta_key(double theta) {
  return std::bit_cast<std::uint64_t>(theta);
}

// Averaged single-round map of the approximate kernel projection as a
// superoperator; the identity when the subset is empty.
ComplexMatrix averaged_projection_superop(SubspaceCache &cache,
                                          FlawMask subset) {
  const Eigen::Index dim = cache.dim();
  const std::vector<int> flaws =
      mask_to_indices(subset, cache.instance().flaw_count());
  if (flaws.empty()) {
    return ComplexMatrix::Identity(dim * dim, dim * dim);
  }
  ComplexMatrix phi = ComplexMatrix::Zero(dim * dim, dim * dim);
  for (const int f : flaws) {
    phi += sandwich_superop(identity_like(dim) - cache.flaw_projector(f));
  }
  return phi / static_cast<double>(flaws.size());
}

} // namespace

const char *outcome_name(Outcome o) {
  switch (o) {
  case Outcome::Good:
    return "G";
  case Outcome::Bad:
    return "B";
  case Outcome::Error:
    return "E";
  case Outcome::Error1:
    return "E1";
  case Outcome::Error2:
    return "E2";
  case Outcome::Projected:
    return "P";
  case Outcome::Depolarized:
    return "D";
  case Outcome::WeakGood:
    return "g";
  case Outcome::WeakBad:
    return "b";
  }
  return "?";
}

double branch_trace(const LabeledState &state, Outcome o) {
  auto it = state.find(o);
  return it == state.end() ? 0.0 : it->second.trace().real();
}

double total_trace(const LabeledState &state) {
  double sum = 0.0;
  for (const auto &[label, rho] : state) {
    sum += rho.trace().real();
  }
  return sum;
}

double error_trace(const LabeledState &state) {
  return branch_trace(state, Outcome::Error) +
         branch_trace(state, Outcome::Error1) +
         branch_trace(state, Outcome::Error2);
}

// Cached per-(C, f) data for the exact channel.
struct SubspaceCache::ExactOps {
  ComplexMatrix rotation;
};

// Cached per-(C, f, theta) data for the ideal Zeno channel.
struct SubspaceCache::ZenoDiag {
  ComplexMatrix good_op;      // M_g
  ComplexMatrix basis;        // eigenvectors of P_V M_g P_V
  RealVector contraction;     // its eigenvalues
};

// Cached per-(C, f, theta, t, tau) data for the implementable Zeno channel.
struct SubspaceCache::ZenoSuperOps {
  ComplexMatrix survivor_sum;      // sum_{i<t} Psi^i
  ComplexMatrix survivor_power;    // Psi^t
  ComplexMatrix final_projection;  // Phi_{C+f}^tau
  Eigen::RowVectorXcd error1_functional;
};

SubspaceCache::SubspaceCache(const QsatInstance &inst)
    : inst_(inst), graph_(dependency_graph(inst)) {}

SubspaceCache::~SubspaceCache() = default;

FlawMask SubspaceCache::all_flaws() const {
  return inst_.flaw_count() >= 32 ? ~FlawMask{0}
                                  : (FlawMask{1} << inst_.flaw_count()) - 1;
}

SubspaceCache::SubsetData &SubspaceCache::subset(FlawMask mask) {
  auto it = subsets_.find(mask);
  if (it != subsets_.end()) {
    return it->second;
  }
  SubsetData data;
  if (mask == 0) {
    data.kernel = identity_like(inst_.dim());
    data.gap = kInfiniteGap;
  } else {
    const ComplexMatrix h = sub_hamiltonian(inst_, mask);
    const HermitianEig eig = hermitian_eig(h);
    const double scale = std::max(
        1.0, std::max(std::abs(eig.eigenvalues.minCoeff()),
                      std::abs(eig.eigenvalues.maxCoeff())));
    const double tol = 1e-8 * scale;
    data.kernel = ComplexMatrix::Zero(inst_.dim(), inst_.dim());
    data.gap = kInfiniteGap;
    for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
      if (eig.eigenvalues[i] <= tol) {
        data.kernel +=
            eig.eigenvectors.col(i) * eig.eigenvectors.col(i).adjoint();
      } else if (eig.eigenvalues[i] < data.gap) {
        data.gap = eig.eigenvalues[i];
      }
    }
  }
  return subsets_.emplace(mask, std::move(data)).first->second;
}

const ComplexMatrix &SubspaceCache::kernel(FlawMask mask) {
  return subset(mask).kernel;
}

double SubspaceCache::gap(FlawMask mask) { return subset(mask).gap; }

const SubspaceCache::ExactOps &SubspaceCache::exact_ops(FlawMask checked,
                                                        int f) {
  const auto key = std::make_pair(checked, f);
  auto it = exact_.find(key);
  if (it != exact_.end()) {
    return *it->second;
  }
  auto ops = std::make_shared<ExactOps>();
  const ComplexMatrix product = flaw_projector(f) * kernel(checked);
  const Svd decomposition = svd(product);
  const RealVector sgn = sgn_vector(decomposition.sigma);
  const Eigen::Index dim = product.rows();
  const ComplexMatrix core =
      decomposition.w * sgn.asDiagonal() * decomposition.u.adjoint();
  const ComplexMatrix left =
      identity_like(dim) -
      decomposition.w * sgn.asDiagonal() * decomposition.w.adjoint();
  const ComplexMatrix right =
      identity_like(dim) -
      decomposition.u * sgn.asDiagonal() * decomposition.u.adjoint();
  ops->rotation = core + left * right;
  return *exact_.emplace(key, std::move(ops)).first->second;
}

const SubspaceCache::ZenoDiag &SubspaceCache::zeno_diag(FlawMask checked,
                                                        int f, double theta) {
  const auto key = std::make_tuple(checked, f, theta_key(theta));
  auto it = zeno_diag_.find(key);
  if (it != zeno_diag_.end()) {
    return *it->second;
  }
  auto diag = std::make_shared<ZenoDiag>();
  diag->good_op = weak_good_operator(flaw_projector(f), theta);
  const ComplexMatrix &p_v = kernel(checked);
  const HermitianEig eig = hermitian_eig(p_v * diag->good_op * p_v);
  diag->basis = eig.eigenvectors;
  diag->contraction = eig.eigenvalues;
  return *zeno_diag_.emplace(key, std::move(diag)).first->second;
}

const SubspaceCache::ZenoSuperOps &
SubspaceCache::zeno_superops(FlawMask checked, int f,
                             const ZenoParams &params) {
  const auto key = std::make_tuple(checked, f, theta_key(params.theta),
                                   params.rounds, params.tau);
  auto it = zeno_super_.find(key);
  if (it != zeno_super_.end()) {
    return *it->second;
  }
  const Eigen::Index dim = inst_.dim();
  auto ops = std::make_shared<ZenoSuperOps>();

  const ComplexMatrix good_op =
      weak_good_operator(flaw_projector(f), params.theta);
  const ComplexMatrix weak_super = sandwich_superop(good_op);
  const ComplexMatrix phi_tau = matrix_power_by_squaring(
      averaged_projection_superop(*this, checked), params.tau);
  const ComplexMatrix psi = phi_tau * weak_super;

  auto [power, sum] = power_and_sum(psi, params.rounds);
  ops->survivor_power = std::move(power);
  ops->survivor_sum = std::move(sum);
  ops->final_projection = matrix_power_by_squaring(
      averaged_projection_superop(*this, checked | (FlawMask{1} << f)),
      params.tau);

  // Mass leaking into the mid-loop depolarized branch, as a functional of
  // sum_{i<t} Psi^i vec(rho).
  Eigen::RowVectorXcd trace_functional =
      Eigen::RowVectorXcd::Zero(dim * dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    trace_functional(i * dim + i) = 1.0;
  }
  ops->error1_functional =
      trace_functional * weak_super - (trace_functional * phi_tau) * weak_super;
  return *zeno_super_.emplace(key, std::move(ops)).first->second;
}

ComplexMatrix resample(const ComplexMatrix &rho, const QsatInstance &inst,
                       int f) {
  if (rho.rows() != inst.dim()) {
    throw DimensionError("resample: state dimension does not match instance");
  }
  const std::vector<int> &support = inst.flaw(f).support;
  return insert_maximally_mixed(
      partial_trace(rho, support, inst.qubit_count()), support,
      inst.qubit_count());
}

LabeledState weak_measure(const ComplexMatrix &rho, SubspaceCache &cache,
                          int f, double theta) {
  require_theta(theta);
  const ComplexMatrix &proj = cache.flaw_projector(f);
  const ComplexMatrix good_op = weak_good_operator(proj, theta);
  LabeledState out;
  out[Outcome::WeakBad] = theta * (proj * rho * proj);
  out[Outcome::WeakGood] = good_op * rho * good_op;
  return out;
}

LabeledState projective_channel(const ComplexMatrix &rho, SubspaceCache &cache,
                                int f) {
  const ComplexMatrix &proj = cache.flaw_projector(f);
  LabeledState out;
  out[Outcome::Bad] = proj * rho * proj;
  out[Outcome::Good] = project_out(rho, proj);
  return out;
}

LabeledState exact_channel(const ComplexMatrix &rho, SubspaceCache &cache,
                           FlawMask checked, int f) {
  const ComplexMatrix &p_v = cache.kernel(checked);
  const double trace = rho.trace().real();
  if (trace > 0.0) {
    const double leaked = trace - (p_v * rho * p_v).trace().real();
    if (leaked > kSupportTol * trace) {
      throw PreconditionError(
          "exact_channel: input state leaks out of the checked subspace");
    }
  }
  const ComplexMatrix &p_vf = cache.kernel(checked | (FlawMask{1} << f));
  const ComplexMatrix &rotation = cache.exact_ops(checked, f).rotation;

  const ComplexMatrix bad_raw = project_out(rho, p_vf);
  LabeledState out;
  out[Outcome::Good] = p_vf * rho * p_vf;
  out[Outcome::Bad] = rotation * bad_raw * rotation.adjoint();
  return out;
}

SubspaceIdentityReport subspace_identities_check(SubspaceCache &cache,
                                                 FlawMask checked, int f) {
  const ComplexMatrix &p_v = cache.kernel(checked);
  const ComplexMatrix &p_vf = cache.kernel(checked | (FlawMask{1} << f));
  const ComplexMatrix product = cache.flaw_projector(f) * p_v;
  const Svd decomposition = svd(product);
  const RealVector sgn = sgn_vector(decomposition.sigma);
  const ComplexMatrix w_sgn_w =
      decomposition.w * sgn.asDiagonal() * decomposition.w.adjoint();
  const ComplexMatrix u_sgn_u =
      decomposition.u * sgn.asDiagonal() * decomposition.u.adjoint();

  // Independent route to the image projector: complement of ker(A A^adj).
  const ComplexMatrix gram = product * product.adjoint();
  const ComplexMatrix image_oracle =
      identity_like(product.rows()) -
      kernel_projector((gram + gram.adjoint()) / 2.0);

  SubspaceIdentityReport report;
  report.image_projector_residual = trace_norm(w_sgn_w - image_oracle);
  report.difference_residual = trace_norm((p_v - p_vf) - u_sgn_u);

  const FlawMask stripped = checked & ~cache.graph().inclusive_neighbourhood(f);
  const ComplexMatrix bound = cache.flaw_projector(f) * cache.kernel(stripped);
  report.order_min_eigenvalue =
      min_eigenvalue((bound + bound.adjoint()) / 2.0 - w_sgn_w);
  return report;
}

LabeledState kernel_projection_ideal(const ComplexMatrix &rho,
                                     SubspaceCache &cache, FlawMask subset) {
  const ComplexMatrix &p_v = cache.kernel(subset);
  const ComplexMatrix projected = p_v * rho * p_v;
  const double leaked = rho.trace().real() - projected.trace().real();
  LabeledState out;
  out[Outcome::Projected] = projected;
  out[Outcome::Depolarized] =
      leaked * identity_like(rho.rows()) / static_cast<double>(rho.rows());
  return out;
}

LabeledState kernel_projection_approx(const ComplexMatrix &rho,
                                      SubspaceCache &cache, FlawMask subset,
                                      long tau) {
  if (tau < 0) {
    throw ValidationError("tau must be nonnegative");
  }
  const Eigen::Index dim = rho.rows();
  const std::vector<int> flaws =
      mask_to_indices(subset, cache.instance().flaw_count());
  LabeledState out;
  if (flaws.empty() || tau == 0) {
    out[Outcome::Projected] = rho;
    out[Outcome::Depolarized] = ComplexMatrix::Zero(dim, dim);
    return out;
  }

  ComplexMatrix current;
  if (tau <= kDirectIterationCap) {
    current = rho;
    const double weight = 1.0 / static_cast<double>(flaws.size());
    for (long round = 0; round < tau; ++round) {
      ComplexMatrix next = ComplexMatrix::Zero(dim, dim);
      for (const int f : flaws) {
        next += weight * project_out(current, cache.flaw_projector(f));
      }
      current = next;
    }
  } else {
    const ComplexMatrix phi_tau = matrix_power_by_squaring(
        averaged_projection_superop(cache, subset), tau);
    current = unvec_state(phi_tau * vec_state(rho), dim);
  }

  const double leaked = rho.trace().real() - current.trace().real();
  out[Outcome::Projected] = current;
  out[Outcome::Depolarized] =
      leaked * identity_like(dim) / static_cast<double>(dim);
  return out;
}

Outcome kernel_projection_trajectory(ComplexMatrix &rho, SubspaceCache &cache,
                                     FlawMask subset, long tau, Rng &rng) {
  const Eigen::Index dim = rho.rows();
  const std::vector<int> flaws =
      mask_to_indices(subset, cache.instance().flaw_count());
  if (flaws.empty()) {
    return Outcome::Projected;
  }
  for (long round = 0; round < tau; ++round) {
    const int f = flaws[rng.uniform_int(static_cast<int>(flaws.size()))];
    const ComplexMatrix &proj = cache.flaw_projector(f);
    const double p_present = (proj * rho).trace().real();
    if (rng.uniform() < p_present) {
      rho = identity_like(dim) / static_cast<double>(dim);
      return Outcome::Depolarized;
    }
    rho = project_out(rho, proj);
    const double trace = rho.trace().real();
    if (trace <= 0.0) {
      throw NumericalError("kernel projection trajectory lost all mass");
    }
    rho /= trace;
  }
  return Outcome::Projected;
}

double zeno_min_rounds(double theta, double gamma) {
  require_theta(theta);
  return std::log(3.0 / theta) / (theta * std::min(gamma, 1.0));
}

LabeledState zeno_channel(const ComplexMatrix &rho, SubspaceCache &cache,
                          FlawMask checked, int f, const ZenoParams &params) {
  require_theta(params.theta);
  if (params.rounds < 1) {
    throw ValidationError("zeno channel needs at least one round");
  }
  const Eigen::Index dim = rho.rows();
  const ComplexMatrix id = identity_like(dim);
  const ComplexMatrix &proj = cache.flaw_projector(f);
  const long t = params.rounds;

  LabeledState out;
  if (params.tau <= 0) {
    // Ideal non-local measurements. After the first round the surviving
    // branch is supported on V, so powers of the Hermitian contraction
    // D = P_V M_g P_V give the exact t-round branch formulas for any input.
    const ComplexMatrix &p_v = cache.kernel(checked);
    const ComplexMatrix &p_vf = cache.kernel(checked | (FlawMask{1} << f));
    const SubspaceCache::ZenoDiag &diag =
        cache.zeno_diag(checked, f, params.theta);
    const ComplexMatrix &good_op = diag.good_op;

    const ComplexMatrix mg_rho_mg = good_op * rho * good_op;
    ComplexMatrix bad = params.theta * (proj * rho * proj);
    ComplexMatrix error1 = (id - p_v) * mg_rho_mg * (id - p_v);
    const ComplexMatrix survivor0 = p_v * mg_rho_mg * p_v;

    ComplexMatrix survivor_t;
    if (t == 1) {
      survivor_t = survivor0;
    } else {
      const ComplexMatrix tilde =
          diag.basis.adjoint() * survivor0 * diag.basis;
      ComplexMatrix running_sum(dim, dim);
      ComplexMatrix final_power(dim, dim);
      for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
          const double x = diag.contraction[i] * diag.contraction[j];
          running_sum(i, j) = tilde(i, j) * geometric_series_sum(x, t - 1);
          final_power(i, j) = tilde(i, j) * stable_power(x, t - 1);
        }
      }
      const ComplexMatrix summed =
          diag.basis * running_sum * diag.basis.adjoint();
      survivor_t = diag.basis * final_power * diag.basis.adjoint();
      bad += params.theta * (proj * summed * proj);
      error1 += (id - p_v) * good_op * summed * good_op * (id - p_v);
    }
    out[Outcome::Good] = p_vf * survivor_t * p_vf;
    out[Outcome::Bad] = std::move(bad);
    out[Outcome::Error1] = std::move(error1);
    out[Outcome::Error2] = (id - p_vf) * survivor_t * (id - p_vf);
    return out;
  }

  // Implementable variant: the V and V_f measurements are replaced by the
  // averaged approximate kernel projection, evaluated through vectorized
  // superoperators with binary doubling over the round count.
  const SubspaceCache::ZenoSuperOps &ops =
      cache.zeno_superops(checked, f, params);
  const Eigen::VectorXcd x = vec_state(rho);
  const Eigen::VectorXcd summed = ops.survivor_sum * x;
  const Eigen::VectorXcd survived = ops.survivor_power * x;
  const ComplexMatrix summed_mat = unvec_state(summed, dim);
  const ComplexMatrix survivor_mat = unvec_state(survived, dim);
  const ComplexMatrix good = unvec_state(ops.final_projection * survived, dim);

  out[Outcome::Bad] = params.theta * (proj * summed_mat * proj);
  const double e1_mass = (ops.error1_functional * summed).value().real();
  out[Outcome::Error1] = e1_mass * id / static_cast<double>(dim);
  out[Outcome::Good] = good;
  const double e2_mass = survivor_mat.trace().real() - good.trace().real();
  out[Outcome::Error2] = e2_mass * id / static_cast<double>(dim);
  return out;
}

ProgressiveCheckReport verify_progressive(const ChannelFn &channel,
                                          MeasureKind measure, double theta,
                                          SubspaceCache &cache, int trials,
                                          Rng &rng, double tol,
                                          bool weak_error_criterion) {
  const QsatInstance &inst = cache.instance();
  const Eigen::Index dim = inst.dim();
  ProgressiveCheckReport report;
  report.trials = trials;

  for (int trial = 0; trial < trials; ++trial) {
    const int f = rng.uniform_int(inst.flaw_count());
    FlawMask checked = 0;
    for (int g = 0; g < inst.flaw_count(); ++g) {
      if (g != f && rng.uniform() < 0.5) {
        checked |= FlawMask{1} << g;
      }
    }

    const ComplexMatrix measure_in = measure == MeasureKind::Exact
                                         ? cache.kernel(checked)
                                         : ComplexMatrix::Identity(dim, dim);
    const LabeledState on_uniform = channel(measure_in, checked, f);

    const ComplexMatrix good_bound =
        measure == MeasureKind::Exact
            ? cache.kernel(checked | (FlawMask{1} << f))
            : ComplexMatrix::Identity(dim, dim);
    const double good_residual =
        psd_leq_residual(on_uniform.at(Outcome::Good), good_bound);
    report.worst_good_residual =
        std::min(report.worst_good_residual, good_residual);
    if (!psd_leq(on_uniform.at(Outcome::Good), good_bound, tol)) {
      report.violations.push_back({checked, f, '2', good_residual});
    }

    const FlawMask stripped =
        checked & ~cache.graph().inclusive_neighbourhood(f);
    const ComplexMatrix stripped_kernel =
        measure == MeasureKind::Exact ? cache.kernel(stripped)
                                      : ComplexMatrix::Identity(dim, dim);
    const ComplexMatrix bad_bound_raw =
        cache.flaw_projector(f) * stripped_kernel;
    const ComplexMatrix bad_bound =
        (bad_bound_raw + bad_bound_raw.adjoint()) / 2.0;
    const double bad_residual =
        psd_leq_residual(on_uniform.at(Outcome::Bad), bad_bound);
    report.worst_bad_residual =
        std::min(report.worst_bad_residual, bad_residual);
    if (!psd_leq(on_uniform.at(Outcome::Bad), bad_bound, tol)) {
      report.violations.push_back({checked, f, '3', bad_residual});
    }

    const ComplexMatrix support = measure == MeasureKind::Exact
                                      ? cache.kernel(checked)
                                      : ComplexMatrix::Identity(dim, dim);
    const ComplexMatrix rho = random_density_matrix_on(support, rng);
    const LabeledState on_state = channel(rho, checked, f);
    const double reference = weak_error_criterion
                                 ? total_trace(on_state)
                                 : branch_trace(on_state, Outcome::Bad);
    const double excess = error_trace(on_state) - 2.0 * theta * reference;
    report.worst_error_excess = std::max(report.worst_error_excess, excess);
    if (excess > tol) {
      report.violations.push_back({checked, f, '4', excess});
    }
  }
  return report;
}

namespace {

// Apply a PSD-only channel to a Hermitian input through its positive and
// negative parts.
LabeledState apply_to_hermitian(const SimpleChannelFn &channel,
                                const ComplexMatrix &input) {
  const HermitianEig eig = hermitian_eig(input);
  const Eigen::Index dim = input.rows();
  ComplexMatrix positive = ComplexMatrix::Zero(dim, dim);
  ComplexMatrix negative = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const ComplexMatrix outer =
        eig.eigenvectors.col(i) * eig.eigenvectors.col(i).adjoint();
    if (eig.eigenvalues[i] >= 0) {
      positive += eig.eigenvalues[i] * outer;
    } else {
      negative += -eig.eigenvalues[i] * outer;
    }
  }
  LabeledState plus = channel(positive);
  const LabeledState minus = channel(negative);
  for (const auto &[label, rho] : minus) {
    auto it = plus.find(label);
    if (it == plus.end()) {
      plus[label] = -rho;
    } else {
      it->second -= rho;
    }
  }
  return plus;
}

} // namespace

double channel_distance_lower_bound(const SimpleChannelFn &a,
                                    const SimpleChannelFn &b,
                                    Eigen::Index dim, int trials, Rng &rng) {
  double best = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    ComplexMatrix input;
    if (trial % 2 == 0) {
      input = random_pure_state(dim, rng);
    } else {
      const ComplexMatrix diff =
          random_pure_state(dim, rng) - random_pure_state(dim, rng);
      const double norm = trace_norm(diff);
      if (norm <= 1e-12) {
        continue;
      }
      input = diff / norm;
    }
    const LabeledState out_a = apply_to_hermitian(a, input);
    const LabeledState out_b = apply_to_hermitian(b, input);
    double distance = 0.0;
    for (const auto &[label, rho] : out_a) {
      auto it = out_b.find(label);
      if (it == out_b.end()) {
        distance += trace_norm(rho);
      } else {
        distance += trace_norm(rho - it->second);
      }
    }
    for (const auto &[label, rho] : out_b) {
      if (out_a.find(label) == out_a.end()) {
        distance += trace_norm(rho);
      }
    }
    best = std::max(best, distance);
  }
  return best;
}

bool geometric_sum_check(double theta, double sigma, long t) {
  require_theta(theta);
  if (!(sigma > 0.0 && sigma <= 1.0) || t < 1) {
    throw ValidationError("geometric_sum_check needs sigma in (0,1] and t >= 1");
  }
  const double ratio = 1.0 - (1.0 - std::sqrt(1.0 - theta)) * sigma * sigma;
  const double sum = geometric_series_sum(ratio * ratio, t);
  return sum <= 1.0 / (sigma * sigma * theta) + 1e-12;
}

ComplexMatrix random_pure_state(Eigen::Index dim, Rng &rng) {
  Eigen::VectorXcd psi(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    psi[i] = Complex(rng.gaussian(), rng.gaussian());
  }
  psi.normalize();
  return psi * psi.adjoint();
}

ComplexMatrix random_density_matrix(Eigen::Index dim, Rng &rng) {
  ComplexMatrix g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      g(i, j) = Complex(rng.gaussian(), rng.gaussian());
    }
  }
  ComplexMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

ComplexMatrix random_density_matrix_on(const ComplexMatrix &projector,
                                       Rng &rng) {
  const Eigen::Index dim = projector.rows();
  const ComplexMatrix raw = random_density_matrix(dim, rng);
  ComplexMatrix rho = projector * raw * projector;
  const double trace = rho.trace().real();
  if (trace <= 1e-12) {
    return ComplexMatrix::Zero(dim, dim);
  }
  return rho / trace;
}

} // namespace qlll
