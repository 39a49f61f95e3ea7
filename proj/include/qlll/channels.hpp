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

#ifndef QLLL_CHANNELS_HPP
#define QLLL_CHANNELS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <tuple>

#include "qlll/instance.hpp"
#include "qlll/rng.hpp"

namespace qlll {

// Classical outcome labels attached to channel branches.
enum class Outcome {
  Good,
  Bad,
  Error,
  Error1,
  Error2,
  Projected,
  Depolarized,
  WeakGood,
  WeakBad,
};

const char *outcome_name(Outcome o);

// Unnormalized density operator per classical label.
using LabeledState = std::map<Outcome, ComplexMatrix>;

double branch_trace(const LabeledState &state, Outcome o);
double total_trace(const LabeledState &state);

// Trace of the error output, accepting either a merged Error entry or the
// split Error1/Error2 diagnostics.
double error_trace(const LabeledState &state);

struct ZenoParams {
  double theta = 0.05;
  long rounds = 1; // t
  // tau <= 0 selects ideal non-local measurements; a positive tau substitutes
  // the approximate kernel projection with that iteration count.
  long tau = 0;
};

// Per-instance cache of kernel projectors, subset gaps and derived channel
// operators keyed by flaw masks. Channels take the cache instead of the raw
// instance so repeated (C, f) pairs stay cheap.
class SubspaceCache {
public:
  explicit SubspaceCache(const QsatInstance &inst);
  explicit SubspaceCache(QsatInstance &&) = delete; // cache refers to the instance
  ~SubspaceCache();

  SubspaceCache(const SubspaceCache &) = delete;
  SubspaceCache &operator=(const SubspaceCache &) = delete;

  const QsatInstance &instance() const { return inst_; }
  const DependencyGraph &graph() const { return graph_; }
  Eigen::Index dim() const { return inst_.dim(); }
  FlawMask all_flaws() const;

  // Projector onto V^S, the common kernel of the flaws in S.
  const ComplexMatrix &kernel(FlawMask subset);

  // gamma^S: smallest nonzero eigenvalue of H^S.
  double gap(FlawMask subset);

  const ComplexMatrix &flaw_projector(int f) {
    return inst_.full_projector(f);
  }

  // Channel operator caches (implementation details of channels.cpp).
  struct ExactOps;
  struct ZenoDiag;
  struct ZenoSuperOps;
  const ExactOps &exact_ops(FlawMask checked, int f);
  const ZenoDiag &zeno_diag(FlawMask checked, int f, double theta);
  const ZenoSuperOps &zeno_superops(FlawMask checked, int f,
                                    const ZenoParams &params);

private:
  struct SubsetData {
    ComplexMatrix kernel;
    double gap = kInfiniteGap;
  };
  SubsetData &subset(FlawMask mask);

  const QsatInstance &inst_;
  DependencyGraph graph_;
  std::map<FlawMask, SubsetData> subsets_;
  std::map<std::pair<FlawMask, int>, std::shared_ptr<ExactOps>> exact_;
  std::map<std::tuple<FlawMask, int, std::uint64_t>,
           std::shared_ptr<ZenoDiag>>
      zeno_diag_;
  std::map<std::tuple<FlawMask, int, std::uint64_t, long, long>,
           std::shared_ptr<ZenoSuperOps>>
      zeno_super_;
};

// Replaces the qubits of b(f) by maximally mixed ones.
ComplexMatrix resample(const ComplexMatrix &rho, const QsatInstance &inst,
                       int f);

// Weak measurement with intensity theta:
//   M_b = sqrt(theta) P_f,  M_g = Id - (1 - sqrt(1-theta)) P_f.
LabeledState weak_measure(const ComplexMatrix &rho, SubspaceCache &cache,
                          int f, double theta);

// Projective measurement of P_f, labelled Good (absent) / Bad (present).
LabeledState projective_channel(const ComplexMatrix &rho, SubspaceCache &cache,
                                int f);

// Exact channel: measure V^{C+f} (Good keeps the state there); on the Bad
// outcome rotate with W sgn(S) U^adj from the SVD of P_f P_{V^C}, completed
// by the identity on the orthogonal complement. Requires the input to be
// supported on V^C within 1e-8 relative trace.
LabeledState exact_channel(const ComplexMatrix &rho, SubspaceCache &cache,
                           FlawMask checked, int f);

struct SubspaceIdentityReport {
  double image_projector_residual = 0.0; // || P_im(P_f P_V) - W sgn W^adj ||_1
  double difference_residual = 0.0;      // || (P_V - P_Vf) - U sgn U^adj ||_1
  double order_min_eigenvalue = 0.0;     // min eig of P_f P_Vfbar - P_im
};

SubspaceIdentityReport subspace_identities_check(SubspaceCache &cache,
                                                 FlawMask checked, int f);

// Destructive non-local measurement: Projected keeps P_V rho P_V, the
// complement's weight is fully depolarized.
LabeledState kernel_projection_ideal(const ComplexMatrix &rho,
                                     SubspaceCache &cache, FlawMask subset);

// tau rounds of uniformly random local flaw measurements, as the exact
// averaged channel.
LabeledState kernel_projection_approx(const ComplexMatrix &rho,
                                      SubspaceCache &cache, FlawMask subset,
                                      long tau);

// One sampled trajectory of the same procedure; rho is replaced by the
// normalized branch state and the branch label is returned.
Outcome kernel_projection_trajectory(ComplexMatrix &rho, SubspaceCache &cache,
                                     FlawMask subset, long tau, Rng &rng);

// Minimum round count for the progressive-channel guarantee:
// ln(3/theta) / (theta * min(gamma, 1)).
double zeno_min_rounds(double theta, double gamma);

// Weak-measurement Zeno channel for checked flaws. Branches: Good, Bad and
// the split diagnostics Error1 (left V mid-loop) / Error2 (failed the final
// V_f check).
LabeledState zeno_channel(const ComplexMatrix &rho, SubspaceCache &cache,
                          FlawMask checked, int f, const ZenoParams &params);

enum class MeasureKind { Exact, Trivial };

// A labelled channel as a function of (rho, checked set, flaw).
using ChannelFn =
    std::function<LabeledState(const ComplexMatrix &, FlawMask, int)>;

struct ProgressiveViolation {
  FlawMask checked = 0;
  int flaw = 0;
  char property = '?'; // '2', '3' or '4' for properties (ii)-(iv)
  double value = 0.0;
};

struct ProgressiveCheckReport {
  int trials = 0;
  std::vector<ProgressiveViolation> violations;
  double worst_good_residual = 0.0; // most negative PSD residual, property (ii)
  double worst_bad_residual = 0.0;  // property (iii)
  double worst_error_excess = 0.0;  // max of tr E - 2 theta tr B, property (iv)
  bool ok() const { return violations.empty(); }
};

// Samples (C, f) pairs and random supported states and checks the
// progressive-channel properties at tolerance tol. When weak_error_criterion
// is set, property (iv) compares against the total output trace instead of
// the Bad branch.
ProgressiveCheckReport verify_progressive(const ChannelFn &channel,
                                          MeasureKind measure, double theta,
                                          SubspaceCache &cache, int trials,
                                          Rng &rng, double tol = 1e-8,
                                          bool weak_error_criterion = false);

// Certified lower bound on the sup trace distance between two labelled
// channels over Hermitian trace-norm-one inputs.
using SimpleChannelFn = std::function<LabeledState(const ComplexMatrix &)>;
double channel_distance_lower_bound(const SimpleChannelFn &a,
                                    const SimpleChannelFn &b,
                                    Eigen::Index dim, int trials, Rng &rng);

// Exact evaluation of the geometric sum inequality
// sum_{i<t} (1 - (1-sqrt(1-theta)) sigma^2)^{2i} <= 1/(sigma^2 theta).
bool geometric_sum_check(double theta, double sigma, long t);

// Random state helpers shared by tests and experiment drivers.
ComplexMatrix random_pure_state(Eigen::Index dim, Rng &rng);
ComplexMatrix random_density_matrix(Eigen::Index dim, Rng &rng);
ComplexMatrix random_density_matrix_on(const ComplexMatrix &projector,
                                       Rng &rng);

} // namespace qlll

#endif
