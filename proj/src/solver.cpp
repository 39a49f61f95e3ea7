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

#include "qlll/solver.hpp"

#include <algorithm>
#include <cmath>

namespace qlll {

namespace {

int lowest_bit(FlawMask mask) { return __builtin_ctz(mask); }

ComplexMatrix merged_error_state(const LabeledState &branches,
                                 Eigen::Index dim) {
  ComplexMatrix error = ComplexMatrix::Zero(dim, dim);
  for (const Outcome label : {Outcome::Error, Outcome::Error1, Outcome::Error2}) {
    auto it = branches.find(label);
    if (it != branches.end()) {
      error += it->second;
    }
  }
  return error;
}

double state_trace(const ComplexMatrix &rho) { return rho.trace().real(); }

} // namespace

const char *channel_kind_name(ChannelKind kind) {
  switch (kind) {
  case ChannelKind::Projective:
    return "projective";
  case ChannelKind::Exact:
    return "exact";
  case ChannelKind::ZenoIdeal:
    return "zeno-ideal";
  case ChannelKind::ZenoImplementable:
    return "zeno-implementable";
  }
  return "?";
}

std::optional<ChannelKind> channel_kind_from_name(const std::string &name) {
  if (name == "projective") return ChannelKind::Projective;
  if (name == "exact") return ChannelKind::Exact;
  if (name == "zeno-ideal") return ChannelKind::ZenoIdeal;
  if (name == "zeno-implementable") return ChannelKind::ZenoImplementable;
  return std::nullopt;
}

const char *terminal_name(Terminal t) {
  switch (t) {
  case Terminal::Success:
    return "SUCCESS";
  case Terminal::Error:
    return "ERROR";
  case Terminal::Timeout:
    return "TIMEOUT";
  }
  return "?";
}

StableSetSequence MeasurementLog::stable_sequence() const {
  StableSetSequence seq;
  seq.sets = rounds;
  if (current_round != 0) {
    seq.sets.push_back(current_round);
  }
  return seq;
}

MeasurementLog reconstruct_log(const QsatInstance &inst,
                               const std::string &outcomes) {
  const DependencyGraph graph = dependency_graph(inst);
  const std::vector<double> p = inst.flaw_probabilities();
  const FlawMask all = inst.flaw_count() >= 32
                           ? ~FlawMask{0}
                           : (FlawMask{1} << inst.flaw_count()) - 1;

  MeasurementLog log;
  log.outcomes = outcomes;
  FlawMask checked = 0;
  FlawMask round = 0;

  for (const char outcome : outcomes) {
    if (log.terminated_error) {
      throw ValidationError("log continues past a terminal E outcome");
    }
    // Close finished rounds before selecting the next flaw.
    while ((checked | graph.inclusive_neighbourhood(round)) == all) {
      if (checked == all) {
        throw ValidationError("log continues past termination");
      }
      if (round != 0) {
        log.rounds.push_back(round);
      }
      round = 0;
    }
    const FlawMask eligible =
        all & ~(checked | graph.inclusive_neighbourhood(round));
    const int f = lowest_bit(eligible);
    switch (outcome) {
    case 'G':
      checked |= FlawMask{1} << f;
      break;
    case 'B':
      round |= FlawMask{1} << f;
      checked &= ~graph.neighbourhood(f);
      log.resampled_flaws.push_back(f);
      log.probability_weight *= p[f];
      break;
    case 'E':
      log.terminated_error = true;
      break;
    default:
      throw ValidationError("log outcomes must be G, B or E");
    }
  }
  if (!log.terminated_error && round != 0 &&
      (checked | graph.inclusive_neighbourhood(round)) == all) {
    log.rounds.push_back(round);
    round = 0;
  }
  log.checked = checked;
  log.current_round = round;
  return log;
}

SolverEngine::SolverEngine(SubspaceCache &cache, SolverParams params)
    : cache_(cache), params_(params) {
  if (params_.kind == ChannelKind::ZenoIdeal ||
      params_.kind == ChannelKind::ZenoImplementable) {
    if (!(params_.theta > 0.0 && params_.theta <= 1.0)) {
      throw ValidationError("theta must lie in (0, 1]");
    }
  }
  if (params_.max_resamplings < 0) {
    throw ValidationError("max_resamplings must be nonnegative");
  }
}

long SolverEngine::zeno_rounds_for(FlawMask checked, int f) {
  if (params_.zeno_rounds > 0) {
    return params_.zeno_rounds;
  }
  const double gamma = cache_.gap(checked | (FlawMask{1} << f));
  return std::max<long>(
      1, static_cast<long>(std::ceil(zeno_min_rounds(params_.theta, gamma))));
}

long SolverEngine::tau_for(long rounds) {
  if (params_.tau > 0) {
    return params_.tau;
  }
  if (!(params_.beta > 0.0)) {
    throw ValidationError(
        "implementable channel needs tau or beta to derive it");
  }
  const double gamma =
      std::min(uniform_gap(cache_.instance()), 1.0);
  const double value = cache_.instance().flaw_count() / gamma *
                       (std::log(1.0 / params_.beta) +
                        std::log(static_cast<double>(rounds) + 1.0) +
                        std::log(4.0));
  return std::max<long>(1, static_cast<long>(std::ceil(value)));
}

LabeledState SolverEngine::apply_channel(const ComplexMatrix &rho,
                                         FlawMask checked, int f) {
  switch (params_.kind) {
  case ChannelKind::Projective:
    return projective_channel(rho, cache_, f);
  case ChannelKind::Exact:
    return exact_channel(rho, cache_, checked, f);
  case ChannelKind::ZenoIdeal: {
    ZenoParams zeno{params_.theta, zeno_rounds_for(checked, f), 0};
    return zeno_channel(rho, cache_, checked, f, zeno);
  }
  case ChannelKind::ZenoImplementable: {
    const long rounds = zeno_rounds_for(checked, f);
    ZenoParams zeno{params_.theta, rounds, tau_for(rounds)};
    return zeno_channel(rho, cache_, checked, f, zeno);
  }
  }
  throw ValidationError("unknown channel kind");
}

RunRecord SolverEngine::run(Rng &rng) {
  const QsatInstance &inst = cache_.instance();
  const DependencyGraph &graph = cache_.graph();
  const Eigen::Index dim = inst.dim();
  const FlawMask all = cache_.all_flaws();
  const std::vector<double> p = inst.flaw_probabilities();

  RunRecord record;
  record.seed = params_.seed;
  ComplexMatrix rho =
      ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim);
  FlawMask checked = 0;
  FlawMask round = 0;
  bool done = false;

  while (!done) {
    // Close finished rounds; terminate once everything is checked.
    while ((checked | graph.inclusive_neighbourhood(round)) == all) {
      if (round != 0) {
        record.log.rounds.push_back(round);
        round = 0;
      }
      if (checked == all) {
        record.terminal = Terminal::Success;
        done = true;
        break;
      }
    }
    if (done) {
      break;
    }

    const FlawMask eligible =
        all & ~(checked | graph.inclusive_neighbourhood(round));
    const int f = lowest_bit(eligible);
    const LabeledState branches = apply_channel(rho, checked, f);
    ++record.channel_applications;

    const double good_mass = branch_trace(branches, Outcome::Good);
    const double bad_mass = branch_trace(branches, Outcome::Bad);
    const double error_mass = error_trace(branches);
    const double total = good_mass + bad_mass + error_mass;
    if (!(total > 0.0)) {
      throw NumericalError("channel produced no output mass");
    }

    const double draw = rng.uniform() * total;
    if (draw < good_mass) {
      record.log.outcomes.push_back('G');
      rho = branches.at(Outcome::Good) / good_mass;
      checked |= FlawMask{1} << f;
    } else if (draw < good_mass + bad_mass) {
      record.log.outcomes.push_back('B');
      record.log.resampled_flaws.push_back(f);
      record.log.probability_weight *= p[f];
      rho = resample(branches.at(Outcome::Bad) / bad_mass, inst, f);
      round |= FlawMask{1} << f;
      checked &= ~graph.neighbourhood(f);
      ++record.resample_count;
      if (record.resample_count > params_.max_resamplings) {
        record.terminal = Terminal::Timeout;
        done = true;
      }
    } else {
      record.log.outcomes.push_back('E');
      record.log.terminated_error = true;
      rho = merged_error_state(branches, dim) / error_mass;
      record.terminal = Terminal::Error;
      done = true;
    }
  }

  if (record.terminal != Terminal::Error && round != 0 &&
      (checked | graph.inclusive_neighbourhood(round)) == all) {
    record.log.rounds.push_back(round);
    round = 0;
  }
  record.log.checked = checked;
  record.log.current_round = round;
  record.final_state = rho;
  const ComplexMatrix h = sub_hamiltonian(inst, all);
  record.residual_energy = (h * rho).trace().real();
  record.ground_overlap = (cache_.kernel(all) * rho).trace().real();
  return record;
}

RunRecord SolverEngine::run_trial(std::uint64_t trial_index) {
  Rng rng = Rng::for_trial(params_.seed, trial_index);
  RunRecord record = run(rng);
  record.seed = params_.seed;
  return record;
}

namespace {

struct TreeContext {
  SubspaceCache &cache;
  const LogTreeParams &params;
  const ChannelFn &channel;
  const std::vector<double> &p;
  FlawMask all = 0;
  MeasureKind measure = MeasureKind::Exact;
  LogTreeReport report;
};

void check_rhosub(TreeContext &ctx, const ComplexMatrix &rho, FlawMask checked,
                  double weight) {
  const Eigen::Index dim = ctx.cache.dim();
  const ComplexMatrix bound =
      ctx.measure == MeasureKind::Exact
          ? ComplexMatrix(weight / static_cast<double>(dim) *
                          ctx.cache.kernel(checked))
          : ComplexMatrix(weight / static_cast<double>(dim) *
                          ComplexMatrix::Identity(dim, dim));
  ++ctx.report.rhosub_checks;
  const double residual = psd_leq_residual(rho, bound);
  ctx.report.worst_rhosub_residual =
      std::min(ctx.report.worst_rhosub_residual, residual);
  if (!psd_leq(rho, bound, ctx.params.psd_tol)) {
    ++ctx.report.rhosub_violations;
  }
}

// Expands the node reached after processing a log with state rho (not an E
// leaf). `checked`/`round` are the replayed inner variables, weight is p_L.
void expand(TreeContext &ctx, const ComplexMatrix &rho, FlawMask checked,
            FlawMask round, double weight, long resamples) {
  ++ctx.report.nodes;
  check_rhosub(ctx, rho, checked, weight);

  const DependencyGraph &graph = ctx.cache.graph();
  while ((checked | graph.inclusive_neighbourhood(round)) == ctx.all) {
    if (checked == ctx.all) {
      ctx.report.success_mass += state_trace(rho);
      return;
    }
    round = 0;
  }

  const FlawMask eligible =
      ctx.all & ~(checked | graph.inclusive_neighbourhood(round));
  const int f = lowest_bit(eligible);
  const LabeledState branches = ctx.channel(rho, checked, f);

  const double bad_mass = branch_trace(branches, Outcome::Bad);
  const double err_mass = error_trace(branches);

  // (L, E) leaf: error-ratio relation against the sibling B branch.
  if (err_mass > 0.0 || ctx.params.theta > 0.0) {
    ++ctx.report.lowerr_checks;
    const double excess = err_mass - 2.0 * ctx.params.theta * bad_mass;
    ctx.report.max_error_excess =
        std::max(ctx.report.max_error_excess, excess);
    if (excess > ctx.params.error_ratio_tol) {
      ++ctx.report.lowerr_violations;
    }
  }
  ctx.report.error_mass += err_mass;

  // (L, G) child.
  const ComplexMatrix &good = branches.at(Outcome::Good);
  ++ctx.report.edges;
  if (state_trace(good) > ctx.params.prune_mass) {
    expand(ctx, good, checked | (FlawMask{1} << f), round, weight, resamples);
  } else {
    ctx.report.pruned_mass += state_trace(good);
  }

  // (L, B) child.
  ++ctx.report.edges;
  if (bad_mass > ctx.params.prune_mass) {
    if (resamples + 1 > ctx.params.max_resamplings) {
      ctx.report.frontier_mass += bad_mass;
    } else {
      ctx.report.expected_resamplings += bad_mass;
      const ComplexMatrix resampled =
          resample(branches.at(Outcome::Bad), ctx.cache.instance(), f);
      expand(ctx, resampled, checked & ~graph.neighbourhood(f),
             round | (FlawMask{1} << f), weight * ctx.p[f], resamples + 1);
    }
  } else {
    ctx.report.pruned_mass += bad_mass;
  }
}

} // namespace

LogTreeReport enumerate_log_tree(SubspaceCache &cache,
                                 const LogTreeParams &params,
                                 const ChannelFn &override_channel) {
  const QsatInstance &inst = cache.instance();
  ChannelFn channel = override_channel;
  double theta = params.theta;
  if (!channel) {
    switch (params.kind) {
    case ChannelKind::Projective:
      theta = 0.0;
      channel = [&cache](const ComplexMatrix &rho, FlawMask, int f) {
        return projective_channel(rho, cache, f);
      };
      break;
    case ChannelKind::Exact:
      theta = 0.0;
      channel = [&cache](const ComplexMatrix &rho, FlawMask checked, int f) {
        return exact_channel(rho, cache, checked, f);
      };
      break;
    case ChannelKind::ZenoIdeal:
    case ChannelKind::ZenoImplementable: {
      const bool ideal = params.kind == ChannelKind::ZenoIdeal;
      const double theta_ = params.theta;
      const long rounds = params.zeno_rounds;
      const long tau = ideal ? 0 : params.tau;
      channel = [&cache, theta_, rounds, tau](const ComplexMatrix &rho,
                                              FlawMask checked, int f) {
        long t = rounds;
        if (t <= 0) {
          const double gamma = cache.gap(checked | (FlawMask{1} << f));
          t = std::max<long>(
              1, static_cast<long>(std::ceil(zeno_min_rounds(theta_, gamma))));
        }
        return zeno_channel(rho, cache, checked, f, ZenoParams{theta_, t, tau});
      };
      break;
    }
    }
  }

  LogTreeParams effective = params;
  effective.theta = theta;
  const MeasureKind default_measure =
      params.kind == ChannelKind::Projective && !inst.commuting()
          ? MeasureKind::Trivial
          : MeasureKind::Exact;

  const std::vector<double> probabilities = inst.flaw_probabilities();
  TreeContext context{cache,
                      effective,
                      channel,
                      probabilities,
                      cache.all_flaws(),
                      params.measure.value_or(default_measure),
                      {}};

  const Eigen::Index dim = inst.dim();
  const ComplexMatrix root =
      ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim);
  expand(context, root, 0, 0, 1.0, 0);
  return context.report;
}

SelectedParameters select_parameters(SubspaceCache &cache,
                                     const ConditionReport &report,
                                     double delta, double epsilon,
                                     ChannelKind kind) {
  if (!(delta > 0.0 && delta <= 1.0) || !(epsilon > 0.0 && epsilon <= 1.0)) {
    throw ValidationError("delta and epsilon must lie in (0, 1]");
  }
  const QsatInstance &inst = cache.instance();
  const ResamplingBound bound = resampling_bound(inst, report);
  const DependencyGraph &graph = cache.graph();

  int degree = 0;
  for (int f = 0; f < graph.flaw_count; ++f) {
    degree = std::max(degree,
                      __builtin_popcount(graph.inclusive_neighbourhood(f)));
  }

  SelectedParameters out;
  out.resampling_bound_core = bound.core;
  out.resampling_bound_scaled = bound.n_scaled;
  out.gamma_uniform = uniform_gap(inst);
  out.gamma_full = cache.gap(cache.all_flaws());
  out.degree = degree;

  const double big_r = bound.n_scaled;
  out.params.kind = kind;
  out.params.theta = 1.0 / (12.0 * big_r);
  out.beta =
      1.0 / (6.0 * (inst.flaw_count() + 6.0 * big_r * degree));
  out.params.beta = out.beta;
  out.params.max_resamplings =
      static_cast<long>(std::ceil(6.0 * big_r));

  const double gamma = std::min(out.gamma_uniform, 1.0);
  out.params.zeno_rounds = std::max<long>(
      1,
      static_cast<long>(std::ceil(zeno_min_rounds(out.params.theta, gamma))));
  const double tau_value =
      inst.flaw_count() / gamma *
      (std::log(1.0 / out.beta) +
       std::log(static_cast<double>(out.params.zeno_rounds) + 1.0) +
       std::log(4.0));
  out.params.tau = std::max<long>(1, static_cast<long>(std::ceil(tau_value)));

  out.repetitions = std::max<long>(
      1, static_cast<long>(std::ceil(4.0 * std::log(1.0 / epsilon))));
  const double gamma_full = std::min(out.gamma_full, 1.0);
  out.final_tau = std::max<long>(
      1, static_cast<long>(std::ceil(inst.flaw_count() / gamma_full *
                                     std::log(8.0 / delta))));
  return out;
}

BoostedRecord boosted_run(SubspaceCache &cache, const ConditionReport &report,
                          double delta, double epsilon, Rng &rng,
                          ChannelKind kind) {
  BoostedRecord out;
  out.selection = select_parameters(cache, report, delta, epsilon, kind);

  SolverEngine engine(cache, out.selection.params);
  const FlawMask all = cache.all_flaws();
  const QsatInstance &inst = cache.instance();
  const ComplexMatrix h = sub_hamiltonian(inst, all);

  for (long rep = 0; rep < out.selection.repetitions; ++rep) {
    RunRecord record = engine.run(rng);
    ++out.repetitions_used;
    if (record.terminal != Terminal::Success) {
      out.record = std::move(record);
      continue;
    }
    // Final purification: a sampled approximate kernel projection of the
    // full flaw set.
    ComplexMatrix rho = record.final_state;
    const Outcome purified = kernel_projection_trajectory(
        rho, cache, all, out.selection.final_tau, rng);
    if (purified != Outcome::Projected) {
      record.terminal = Terminal::Error;
      out.record = std::move(record);
      continue;
    }
    record.final_state = rho;
    record.residual_energy = (h * rho).trace().real();
    record.ground_overlap = (cache.kernel(all) * rho).trace().real();
    out.success = true;
    out.record = std::move(record);
    return out;
  }
  out.success = false;
  return out;
}

AlternativeRunRecord alternative_algorithm_run(SubspaceCache &cache,
                                               long max_iterations, Rng &rng,
                                               const ComplexMatrix *initial) {
  const QsatInstance &inst = cache.instance();
  const DependencyGraph &graph = cache.graph();
  const Eigen::Index dim = inst.dim();
  const FlawMask all = cache.all_flaws();

  AlternativeRunRecord record;
  ComplexMatrix rho =
      initial != nullptr
          ? *initial
          : ComplexMatrix(ComplexMatrix::Identity(dim, dim) /
                          static_cast<double>(dim));
  const double initial_trace = rho.trace().real();
  if (!(initial_trace > 0.0)) {
    throw ValidationError("initial state must have positive trace");
  }
  rho /= initial_trace;

  FlawMask checked = 0;
  for (long iter = 0; iter < max_iterations; ++iter) {
    if (checked == all) {
      record.terminal = Terminal::Success;
      break;
    }
    ++record.iterations_used;

    const ComplexMatrix &invariant = cache.kernel(checked);
    record.max_invariant_leak =
        std::max(record.max_invariant_leak,
                 1.0 - (invariant * rho).trace().real());

    const int f = lowest_bit(all & ~checked);
    const ComplexMatrix &target = cache.kernel(checked | (FlawMask{1} << f));
    const ComplexMatrix kept = target * rho * target;
    const double p_good = kept.trace().real();
    if (rng.uniform() < p_good) {
      rho = kept / p_good;
      checked |= FlawMask{1} << f;
    } else {
      const ComplexMatrix complement =
          ComplexMatrix::Identity(dim, dim) - target;
      ComplexMatrix violated = complement * rho * complement;
      violated /= violated.trace().real();
      rho = resample(violated, inst, f);
      checked &= ~graph.inclusive_neighbourhood(f);
      ++record.resample_count;
    }
  }
  if (checked == all) {
    record.terminal = Terminal::Success;
  }

  record.final_state = rho;
  record.residual_energy =
      (sub_hamiltonian(inst, all) * rho).trace().real();
  record.ground_overlap = (cache.kernel(all) * rho).trace().real();
  return record;
}

} // namespace qlll
