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

#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "qlll/experiments.hpp"
#include "qlll/solver.hpp"
#include "test_helpers.hpp"

using namespace qlll;
using namespace qlll::testing;

namespace {

QsatInstance single_half_flaw() {
  std::vector<Flaw> flaws;
  flaws.push_back({"f", {0}, projector_one()});
  return QsatInstance(1, std::move(flaws));
}

bool no_long_good_run(const std::string &outcomes, int flaw_count) {
  int streak = 0;
  for (const char c : outcomes) {
    streak = c == 'G' ? streak + 1 : 0;
    if (streak > flaw_count) {
      return false;
    }
  }
  return true;
}

} // namespace

TEST_CASE("log reconstruction replays the automaton") {
  const QsatInstance inst = generate_instance("appendix-e", {});
  SubspaceCache cache(inst);
  SolverParams params;
  params.kind = ChannelKind::Projective;
  params.max_resamplings = 50;
  params.seed = 77;
  SolverEngine engine(cache, params);

  for (std::uint64_t trial = 0; trial < 25; ++trial) {
    const RunRecord record = engine.run_trial(trial);
    const MeasurementLog replay = reconstruct_log(inst, record.log.outcomes);
    CHECK(replay.rounds == record.log.rounds);
    CHECK(replay.current_round == record.log.current_round);
    CHECK(replay.resampled_flaws == record.log.resampled_flaws);
    CHECK(replay.checked == record.log.checked);
    CHECK(replay.probability_weight ==
          doctest::Approx(record.log.probability_weight).epsilon(1e-12));

    // Log structure constraints.
    const auto first_e = record.log.outcomes.find('E');
    if (first_e != std::string::npos) {
      CHECK(first_e == record.log.outcomes.size() - 1);
    }
    CHECK(no_long_good_run(record.log.outcomes, inst.flaw_count()));

    // The produced round sets always form a stable set sequence.
    CHECK(valid_stable_sequence(dependency_graph(inst),
                                record.log.stable_sequence()));
    for (const FlawMask round : record.log.rounds) {
      CHECK(round != 0);
    }
  }

  CHECK_THROWS_AS(reconstruct_log(inst, "EG"), ValidationError);
  CHECK_THROWS_AS(reconstruct_log(inst, "X"), ValidationError);
}

TEST_CASE("distinct logs with equal resample counts give distinct sequences") {
  const QsatInstance inst = generate_instance("appendix-e", {});
  SubspaceCache cache(inst);
  SolverParams params;
  params.kind = ChannelKind::Projective;
  params.max_resamplings = 30;
  params.seed = 123;
  SolverEngine engine(cache, params);

  std::map<int, std::map<std::string, std::vector<FlawMask>>> by_count;
  for (std::uint64_t trial = 0; trial < 60; ++trial) {
    const RunRecord record = engine.run_trial(trial);
    // All prefixes of the outcome string ending in B are valid logs in L^B.
    const std::string &outcomes = record.log.outcomes;
    for (std::size_t len = 1; len <= outcomes.size(); ++len) {
      if (outcomes[len - 1] != 'B') {
        continue;
      }
      const std::string prefix = outcomes.substr(0, len);
      const MeasurementLog log = reconstruct_log(inst, prefix);
      const int count = static_cast<int>(log.resampled_flaws.size());
      by_count[count][prefix] = log.stable_sequence().sets;
    }
  }
  for (const auto &[count, logs] : by_count) {
    std::set<std::vector<FlawMask>> distinct;
    for (const auto &[prefix, sequence] : logs) {
      CHECK(static_cast<int>(sequence.size()) >= 1);
      distinct.insert(sequence);
    }
    CHECK(distinct.size() == logs.size()); // injective per B-count
  }
}

TEST_CASE("single commuting flaw: geometric resampling statistics") {
  const QsatInstance inst = single_half_flaw();
  SubspaceCache cache(inst);

  // Exact enumeration: E[#resamplings] = 1 for p = 1/2.
  LogTreeParams tree;
  tree.kind = ChannelKind::Projective;
  tree.max_resamplings = 40;
  const LogTreeReport report = enumerate_log_tree(cache, tree);
  CHECK(report.ok());
  CHECK(report.expected_resamplings == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(report.frontier_mass ==
        doctest::Approx(std::pow(0.5, 40)).epsilon(1e-6));
  CHECK(report.success_mass + report.frontier_mass + report.pruned_mass ==
        doctest::Approx(1.0).epsilon(1e-9));

  // Monte Carlo mean within a wide confidence band of 1.
  SolverParams params;
  params.kind = ChannelKind::Projective;
  params.max_resamplings = 1000;
  params.seed = 9;
  SolverEngine engine(cache, params);
  double total = 0.0;
  const int trials = 2000;
  for (int trial = 0; trial < trials; ++trial) {
    const RunRecord record = engine.run_trial(trial);
    CHECK(record.terminal == Terminal::Success);
    CHECK(record.residual_energy < 1e-8);
    total += static_cast<double>(record.resample_count);
  }
  CHECK(std::abs(total / trials - 1.0) < 0.12); // ~3.8 sigma at 2000 trials
}

TEST_CASE("commuting instances end in the kernel") {
  const QsatInstance inst = two_adjacent_quarter_instance();
  SubspaceCache cache(inst);
  SolverParams params;
  params.kind = ChannelKind::Projective;
  params.max_resamplings = 500;
  params.seed = 4;
  SolverEngine engine(cache, params);
  for (int trial = 0; trial < 50; ++trial) {
    const RunRecord record = engine.run_trial(trial);
    REQUIRE(record.terminal == Terminal::Success);
    CHECK(record.residual_energy <= 1e-8);
    CHECK(record.ground_overlap == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(record.resample_count ==
          static_cast<long>(record.log.resampled_flaws.size()));
  }
}

TEST_CASE("trajectory runs are deterministic given the seed") {
  const QsatInstance inst = generate_instance("appendix-f", {.epsilon = 0.01});
  SubspaceCache cache(inst);
  SolverParams params;
  params.kind = ChannelKind::Exact;
  params.max_resamplings = 400;
  params.seed = 31;
  SolverEngine engine(cache, params);

  const RunRecord a = engine.run_trial(5);
  const RunRecord b = engine.run_trial(5);
  CHECK(a.log.outcomes == b.log.outcomes);
  CHECK(a.resample_count == b.resample_count);
  CHECK((a.final_state - b.final_state).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.ground_overlap == b.ground_overlap);

  // Different trial indices draw from independent streams; across a batch
  // the outcome strings cannot all coincide.
  std::set<std::string> distinct;
  for (std::uint64_t trial = 0; trial < 12; ++trial) {
    distinct.insert(engine.run_trial(trial).log.outcomes);
  }
  CHECK(distinct.size() > 1);
}

TEST_CASE("exact channel solves the appendix-f instance") {
  const QsatInstance inst = generate_instance("appendix-f", {.epsilon = 0.01});
  SubspaceCache cache(inst);
  SolverParams params;
  params.kind = ChannelKind::Exact;
  params.max_resamplings = 2000;
  params.seed = 12;
  SolverEngine engine(cache, params);
  for (int trial = 0; trial < 20; ++trial) {
    const RunRecord record = engine.run_trial(trial);
    REQUIRE(record.terminal == Terminal::Success);
    CHECK(record.ground_overlap >= 1.0 - 1e-6);
  }
}

TEST_CASE("log tree with the exact channel on a non-commuting fixture") {
  const QsatInstance inst = generate_instance("appendix-f", {.epsilon = 0.05});
  SubspaceCache cache(inst);
  LogTreeParams params;
  params.kind = ChannelKind::Exact;
  params.max_resamplings = 5;
  const LogTreeReport report = enumerate_log_tree(cache, params);
  CHECK(report.ok());
  CHECK(report.rhosub_checks == report.nodes);
  CHECK(report.success_mass + report.frontier_mass + report.error_mass +
            report.pruned_mass ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("log tree detects a broken channel") {
  const QsatInstance inst = generate_instance("appendix-f", {.epsilon = 0.05});
  SubspaceCache cache(inst);
  LogTreeParams params;
  params.kind = ChannelKind::Exact;
  params.max_resamplings = 2;
  // A channel that reports Good without measuring anything: the uniform
  // state is certainly not dominated by the shrunken kernel projector.
  const ChannelFn lazy = [](const ComplexMatrix &rho, FlawMask, int) {
    LabeledState out;
    out[Outcome::Good] = rho;
    out[Outcome::Bad] = ComplexMatrix::Zero(rho.rows(), rho.cols());
    return out;
  };
  const LogTreeReport report = enumerate_log_tree(cache, params, lazy);
  CHECK_FALSE(report.ok());
  CHECK(report.rhosub_violations > 0);
}

TEST_CASE("zeno log tree respects the error-ratio relation") {
  const QsatInstance inst = generate_instance("appendix-f", {.epsilon = 0.25});
  SubspaceCache cache(inst);
  LogTreeParams params;
  params.kind = ChannelKind::ZenoIdeal;
  params.theta = 0.05;
  params.zeno_rounds = 0; // per-call formula
  params.max_resamplings = 3;
  const LogTreeReport report = enumerate_log_tree(cache, params);
  CHECK(report.ok());
  CHECK(report.lowerr_checks > 0);
  CHECK(report.max_error_excess <= 1e-10);
}

TEST_CASE("parameter selection follows the closed forms") {
  const QsatInstance inst = generate_instance("appendix-f", {.epsilon = 0.01});
  SubspaceCache cache(inst);
  const ConditionReport shc = check_shc(inst);
  REQUIRE(shc.satisfied);

  const double delta = 1.0 / 8.0;
  const double epsilon = 1.0 / std::exp(1.0);
  const SelectedParameters sel =
      select_parameters(cache, shc, delta, epsilon);

  const double big_r = sel.resampling_bound_scaled;
  CHECK(big_r == doctest::Approx(2.0 * sel.resampling_bound_core));
  CHECK(sel.params.theta == doctest::Approx(1.0 / (12.0 * big_r)));
  CHECK(sel.beta ==
        doctest::Approx(1.0 / (6.0 * (2.0 + 6.0 * big_r * sel.degree))));
  CHECK(sel.params.max_resamplings ==
        static_cast<long>(std::ceil(6.0 * big_r)));

  const double gamma = std::min(sel.gamma_uniform, 1.0);
  CHECK(sel.params.zeno_rounds ==
        static_cast<long>(std::ceil(std::log(3.0 / sel.params.theta) /
                                    (sel.params.theta * gamma))));
  const double tau_expected =
      2.0 / gamma *
      (std::log(1.0 / sel.beta) +
       std::log(static_cast<double>(sel.params.zeno_rounds) + 1.0) +
       std::log(4.0));
  CHECK(sel.params.tau ==
        static_cast<long>(std::ceil(tau_expected)));

  // 4 ln(1/epsilon) = 4 repetitions at epsilon = 1/e.
  CHECK(sel.repetitions == 4);
  // Final purification length (|F|/gamma^F) ln(8/delta) = (2/gamma^F) ln 64.
  const double gamma_full = std::min(sel.gamma_full, 1.0);
  CHECK(sel.final_tau ==
        static_cast<long>(
            std::ceil(2.0 / gamma_full * std::log(64.0))));
}

TEST_CASE("boosted run succeeds on an easy commuting instance") {
  const QsatInstance inst = two_adjacent_quarter_instance();
  SubspaceCache cache(inst);
  const ConditionReport shc = check_shc(inst);
  REQUIRE(shc.satisfied);
  Rng rng(21);
  const BoostedRecord boosted = boosted_run(cache, shc, 0.1, 0.1, rng);
  CHECK(boosted.success);
  CHECK(boosted.repetitions_used == 1);
  CHECK(boosted.record.ground_overlap >= 0.9);
}

TEST_CASE("alternative algorithm stalls where the main solver succeeds") {
  // The walk leaks toward the ground state at rate ~epsilon/2 per
  // check-resample cycle, so a small epsilon keeps essentially every
  // 100-iteration trajectory pinned near the initial states.
  const QsatInstance inst = generate_instance("appendix-f", {.epsilon = 0.001});
  SubspaceCache cache(inst);

  // Start from |00> (basis index 0) as in the cautionary example.
  ComplexMatrix start = ComplexMatrix::Zero(4, 4);
  start(0, 0) = 1.0;
  double overlap_total = 0.0;
  int stuck = 0;
  const int trials = 40;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng = Rng::for_trial(99, trial);
    const AlternativeRunRecord record =
        alternative_algorithm_run(cache, 100, rng, &start);
    overlap_total += record.ground_overlap;
    CHECK(record.max_invariant_leak < 1e-9);
    if (record.terminal != Terminal::Success) {
      ++stuck;
      CHECK(record.ground_overlap < 0.05);
      CHECK(record.resample_count > 10); // it keeps resampling fruitlessly
    }
  }
  CHECK(overlap_total / trials < 0.05);
  CHECK(stuck > trials / 2);

  // The main solver with the exact channel has no trouble at any epsilon.
  const QsatInstance harder_inst =
      generate_instance("appendix-f", {.epsilon = 0.01});
  SubspaceCache harder(harder_inst);
  SolverParams params;
  params.kind = ChannelKind::Exact;
  params.max_resamplings = 2000;
  params.seed = 100;
  SolverEngine engine(harder, params);
  const RunRecord record = engine.run_trial(0);
  CHECK(record.terminal == Terminal::Success);
  CHECK(record.ground_overlap >= 1.0 - 1e-6);
}

TEST_CASE("timeout terminal fires when the budget is exhausted") {
  const QsatInstance inst = single_half_flaw();
  SubspaceCache cache(inst);
  SolverParams params;
  params.kind = ChannelKind::Projective;
  params.max_resamplings = 0; // first resampling attempt times out
  params.seed = 5;
  SolverEngine engine(cache, params);
  int timeouts = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const RunRecord record = engine.run_trial(trial);
    if (record.terminal == Terminal::Timeout) {
      ++timeouts;
      CHECK(record.resample_count == 1);
    }
  }
  CHECK(timeouts > 5); // p = 1/2 per trial
}

TEST_CASE("zeno runs reconstruct and terminate consistently across kinds") {
  const QsatInstance inst = generate_instance("appendix-f", {.epsilon = 0.25});
  SubspaceCache cache(inst);
  SolverParams params;
  params.kind = ChannelKind::ZenoIdeal;
  params.theta = 0.4; // strong enough that E terminals actually occur
  params.zeno_rounds = 2;
  params.max_resamplings = 50;
  params.seed = 5150;
  SolverEngine engine(cache, params);

  int errors = 0;
  for (std::uint64_t trial = 0; trial < 40; ++trial) {
    const RunRecord record = engine.run_trial(trial);
    const MeasurementLog replay = reconstruct_log(inst, record.log.outcomes);
    CHECK(replay.checked == record.log.checked);
    CHECK(replay.resampled_flaws == record.log.resampled_flaws);
    CHECK(replay.terminated_error ==
          (record.terminal == Terminal::Error));
    if (record.terminal == Terminal::Error) {
      ++errors;
      CHECK(record.log.outcomes.back() == 'E');
    }
  }
  CHECK(errors > 0);
}

TEST_CASE("log-tree domination residual shrinks with the projection length") {
  // The implementable channel only beta-approximates a progressive channel,
  // so the domination relation holds up to a residual that decays with tau.
  const QsatInstance inst = generate_instance("appendix-f", {.epsilon = 0.25});
  SubspaceCache cache(inst);

  const auto worst_residual = [&](long tau) {
    LogTreeParams params;
    params.kind = ChannelKind::ZenoImplementable;
    params.theta = 0.1;
    params.zeno_rounds = 5;
    params.tau = tau;
    params.max_resamplings = 2;
    const LogTreeReport report = enumerate_log_tree(cache, params);
    return -report.worst_rhosub_residual;
  };

  const double coarse = worst_residual(1);
  const double fine = worst_residual(400);
  CHECK(coarse > 1e-6);   // visibly non-progressive at one round
  CHECK(fine < 1e-8);     // within the domination tolerance when converged
  CHECK(fine < coarse / 100.0);
}

TEST_CASE("total error mass is bounded by the resampling mass") {
  // Summing the per-node error-ratio relation over the tree: the E mass is
  // at most 2 theta times the B mass, budgeted or not.
  const QsatInstance inst = generate_instance("appendix-f", {.epsilon = 0.25});
  SubspaceCache cache(inst);
  LogTreeParams params;
  params.kind = ChannelKind::ZenoIdeal;
  params.theta = 0.05;
  params.zeno_rounds = 0;
  params.max_resamplings = 4;
  const LogTreeReport report = enumerate_log_tree(cache, params);
  REQUIRE(report.ok());
  CHECK(report.error_mass <=
        2.0 * params.theta *
                (report.expected_resamplings + report.frontier_mass) +
            1e-9);
}

TEST_CASE("trajectory sampling matches a fine-grained measurement simulation") {
  // The engine samples a channel outcome once per application and keeps the
  // averaged conditional branch state; channels are linear, so the law of
  // every outcome sequence must match a simulation that samples each weak
  // and strong measurement individually.
  const QsatInstance inst = generate_instance("appendix-f", {.epsilon = 0.25});
  SubspaceCache cache(inst);
  const Eigen::Index dim = inst.dim();
  const ComplexMatrix id = ComplexMatrix::Identity(dim, dim);
  const double theta = 0.3;
  const long rounds = 3;
  const int trials = 4000;

  SolverParams params;
  params.kind = ChannelKind::ZenoIdeal;
  params.theta = theta;
  params.zeno_rounds = rounds;
  params.max_resamplings = 3;
  params.seed = 2024;
  SolverEngine engine(cache, params);

  std::map<std::string, int> coarse;
  for (int trial = 0; trial < trials; ++trial) {
    ++coarse[engine.run_trial(trial).log.outcomes];
  }

  // Fine-grained run: every weak measurement and every subspace measurement
  // is sampled separately on a pure-state-free density-matrix trajectory.
  const DependencyGraph &graph = cache.graph();
  const FlawMask all = cache.all_flaws();
  std::map<std::string, int> fine;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng = Rng::for_trial(77777, trial);
    ComplexMatrix rho = id / static_cast<double>(dim);
    FlawMask checked = 0;
    FlawMask round_set = 0;
    std::string outcomes;
    long resamples = 0;
    bool done = false;
    while (!done) {
      while ((checked | graph.inclusive_neighbourhood(round_set)) == all) {
        if (checked == all) {
          done = true;
          break;
        }
        round_set = 0;
      }
      if (done) {
        break;
      }
      const int f = __builtin_ctz(all & ~(checked | graph.inclusive_neighbourhood(round_set)));
      const ComplexMatrix &p_v = cache.kernel(checked);
      const ComplexMatrix &p_vf = cache.kernel(checked | (FlawMask{1} << f));
      const ComplexMatrix &proj = cache.flaw_projector(f);
      const ComplexMatrix good_op =
          id - (1.0 - std::sqrt(1.0 - theta)) * proj;

      char outcome = 0;
      for (long i = 0; i < rounds && outcome == 0; ++i) {
        const double p_bad = theta * (proj * rho).trace().real();
        if (rng.uniform() < p_bad) {
          rho = theta * (proj * rho * proj) / p_bad;
          outcome = 'B';
          break;
        }
        rho = good_op * rho * good_op;
        rho /= rho.trace().real();
        const double p_in = (p_v * rho).trace().real();
        if (rng.uniform() >= p_in) {
          outcome = 'E';
          break;
        }
        rho = p_v * rho * p_v / p_in;
      }
      if (outcome == 0) {
        const double p_in = (p_vf * rho).trace().real();
        if (rng.uniform() < p_in) {
          rho = p_vf * rho * p_vf / p_in;
          outcome = 'G';
        } else {
          outcome = 'E';
        }
      }

      outcomes.push_back(outcome);
      if (outcome == 'G') {
        checked |= FlawMask{1} << f;
      } else if (outcome == 'B') {
        rho = resample(rho, inst, f);
        round_set |= FlawMask{1} << f;
        checked &= ~graph.neighbourhood(f);
        if (++resamples > params.max_resamplings) {
          done = true;
        }
      } else {
        done = true;
      }
    }
    ++fine[outcomes];
  }

  // Compare the frequencies of the common outcome strings.
  int compared = 0;
  for (const auto &[log, count] : coarse) {
    if (count < 200) {
      continue;
    }
    ++compared;
    const double p_coarse = static_cast<double>(count) / trials;
    const double p_fine = static_cast<double>(fine[log]) / trials;
    const double sigma =
        std::sqrt(2.0 * p_coarse * (1.0 - p_coarse) / trials);
    CHECK(std::abs(p_coarse - p_fine) < 5.0 * sigma + 0.01);
  }
  CHECK(compared >= 2);
}
