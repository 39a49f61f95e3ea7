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

#ifndef QLLL_SOLVER_HPP
#define QLLL_SOLVER_HPP

#include <optional>
#include <string>

#include "qlll/channels.hpp"
#include "qlll/shearer.hpp"

namespace qlll {

enum class ChannelKind { Projective, Exact, ZenoIdeal, ZenoImplementable };

const char *channel_kind_name(ChannelKind kind);
std::optional<ChannelKind> channel_kind_from_name(const std::string &name);

enum class Terminal { Success, Error, Timeout };

const char *terminal_name(Terminal t);

struct SolverParams {
  ChannelKind kind = ChannelKind::Projective;
  double theta = 0.05;
  // Zeno repetition count t; 0 derives it per call from
  // ceil(ln(3/theta) / (theta * min(gamma^{C+f}, 1))).
  long zeno_rounds = 0;
  // Approximate kernel projection length; 0 derives it from beta and the
  // uniform gap (implementable kind only).
  long tau = 0;
  double beta = 0.0;
  long max_resamplings = 1000;
  std::uint64_t seed = 0;
};

// Classical replay of Algorithm 2's bookkeeping for a given outcome string.
struct MeasurementLog {
  std::string outcomes;             // over {G, B, E}
  std::vector<FlawMask> rounds;     // completed non-empty independent sets
  FlawMask current_round = 0;       // the round still forming
  std::vector<int> resampled_flaws; // flaw index per B outcome
  FlawMask checked = 0;             // C after processing the log
  double probability_weight = 1.0;  // p_L
  bool terminated_error = false;

  // Completed rounds plus the forming one (when non-empty).
  StableSetSequence stable_sequence() const;
};

// Deterministic reconstruction of the inner variables from the outcome
// string alone. Throws ValidationError on logs the algorithm cannot produce.
MeasurementLog reconstruct_log(const QsatInstance &inst,
                               const std::string &outcomes);

struct RunRecord {
  Terminal terminal = Terminal::Timeout;
  MeasurementLog log;
  long resample_count = 0;
  long channel_applications = 0;
  ComplexMatrix final_state; // normalized
  double residual_energy = 0.0;
  double ground_overlap = 0.0;
  std::uint64_t seed = 0;
};

// Trajectory driver for Algorithm 2 over a shared operator cache.
class SolverEngine {
public:
  SolverEngine(SubspaceCache &cache, SolverParams params);

  const SolverParams &params() const { return params_; }
  SubspaceCache &cache() { return cache_; }

  RunRecord run(Rng &rng);
  RunRecord run_trial(std::uint64_t trial_index);

  // Branch outputs of the configured channel for a checked set and flaw.
  LabeledState apply_channel(const ComplexMatrix &rho, FlawMask checked,
                             int f);

  long zeno_rounds_for(FlawMask checked, int f);
  long tau_for(long rounds);

private:
  SubspaceCache &cache_;
  SolverParams params_;
};

struct LogTreeParams {
  ChannelKind kind = ChannelKind::Exact;
  double theta = 0.05;
  long zeno_rounds = 0; // 0 = per-call formula
  long tau = 0;
  long max_resamplings = 4;
  std::optional<MeasureKind> measure; // default: per channel kind
  double psd_tol = 1e-8;
  double error_ratio_tol = 1e-10;
  double prune_mass = 1e-14;
};

struct LogTreeReport {
  long nodes = 0;
  long edges = 0;
  long rhosub_checks = 0;
  long rhosub_violations = 0;
  double worst_rhosub_residual = 0.0; // most negative min eig of (bound - rho)
  long lowerr_checks = 0;
  long lowerr_violations = 0;
  double max_error_excess = 0.0; // max tr(E) - 2 theta tr(B)
  double expected_resamplings = 0.0; // truncated at the budget
  double frontier_mass = 0.0;        // mass needing resampling #budget+1
  double success_mass = 0.0;
  double error_mass = 0.0;
  double pruned_mass = 0.0;

  bool ok() const { return rhosub_violations == 0 && lowerr_violations == 0; }
};

// Exhaustively expands all valid measurement logs up to the resampling
// budget, carrying exact unnormalized branch states, and checks the
// semidefinite domination and error-ratio relations at every node. An
// override channel may replace the built-in kinds (negative controls).
LogTreeReport enumerate_log_tree(SubspaceCache &cache,
                                 const LogTreeParams &params,
                                 const ChannelFn &override_channel = nullptr);

struct SelectedParameters {
  SolverParams params; // theta, t, tau, budget for the main procedure
  double resampling_bound_core = 0.0;
  double resampling_bound_scaled = 0.0; // the R the formulas use
  double beta = 0.0;
  double gamma_uniform = 0.0;
  double gamma_full = 0.0;
  int degree = 0;        // d = max |Gamma^+(f)|
  long repetitions = 0;  // ceil(4 ln(1/epsilon))
  long final_tau = 0;    // ceil((|F|/gamma^F) ln(8/delta))
};

// theta = 1/(12R), beta = 1/(6(|F| + 6Rd)), t and tau from the round
// formulas with the uniform gap, budget 6R; R is the n-scaled bound.
SelectedParameters select_parameters(SubspaceCache &cache,
                                     const ConditionReport &report,
                                     double delta, double epsilon,
                                     ChannelKind kind =
                                         ChannelKind::ZenoImplementable);

struct BoostedRecord {
  bool success = false;
  RunRecord record;
  long repetitions_used = 0;
  SelectedParameters selection;
};

// Repeats the selected procedure up to ceil(4 ln(1/epsilon)) times; each
// successful run is purified with a final approximate kernel projection of
// length (|F|/gamma^F) ln(8/delta). Returns the first success.
BoostedRecord boosted_run(SubspaceCache &cache, const ConditionReport &report,
                          double delta, double epsilon, Rng &rng,
                          ChannelKind kind = ChannelKind::ZenoImplementable);

struct AlternativeRunRecord {
  Terminal terminal = Terminal::Timeout;
  long iterations_used = 0;
  long resample_count = 0;
  ComplexMatrix final_state;
  double residual_energy = 0.0;
  double ground_overlap = 0.0;
  double max_invariant_leak = 0.0; // worst tr((Id - P_V^C) rho) at loop entry
};

// The measure-then-resample loop that fails to make progress on entangled
// projectors; kept as a cautionary baseline.
AlternativeRunRecord alternative_algorithm_run(
    SubspaceCache &cache, long max_iterations, Rng &rng,
    const ComplexMatrix *initial_state = nullptr);

} // namespace qlll

#endif
