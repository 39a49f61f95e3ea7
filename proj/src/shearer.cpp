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

#include "qlll/shearer.hpp"

#include <cmath>
#include <map>

namespace qlll {

namespace {

constexpr std::size_t kSequenceCountCap = 8u * 1024u * 1024u;

int popcount(FlawMask mask) { return __builtin_popcount(mask); }

std::vector<FlawMask> nonempty_independent_sets(const DependencyGraph &graph) {
  std::vector<FlawMask> sets = independent_sets(graph);
  sets.erase(sets.begin()); // drop the empty set (mask order puts it first)
  return sets;
}

void check_limits(const DependencyGraph &graph, int total_size, int size_limit,
                  int flaw_limit) {
  if (total_size < 0) {
    throw ValidationError("sequence size must be nonnegative");
  }
  if (total_size > size_limit) {
    throw SizeLimitError("sequence enumeration limited to total size " +
                         std::to_string(size_limit));
  }
  if (graph.flaw_count > flaw_limit) {
    throw SizeLimitError("sequence enumeration limited to " +
                         std::to_string(flaw_limit) + " flaws");
  }
}

void glc_witness_or_reduction(const ConditionReport &report,
                              std::vector<double> &x, int flaw_count) {
  if (report.condition == Condition::GLC) {
    if (!report.witness_x.has_value()) {
      throw ValidationError("GLC report carries no witness");
    }
    x = *report.witness_x;
  } else {
    if (!report.witness_d.has_value()) {
      throw ValidationError("SLC report carries no degree witness");
    }
    x.assign(flaw_count, *report.witness_d >= 2 ? 1.0 / *report.witness_d
                                                : 0.5);
  }
}

} // namespace

int StableSetSequence::total_size() const {
  int size = 0;
  for (const FlawMask set : sets) {
    size += popcount(set);
  }
  return size;
}

bool valid_stable_sequence(const DependencyGraph &graph,
                           const StableSetSequence &seq) {
  for (std::size_t i = 0; i < seq.sets.size(); ++i) {
    if (seq.sets[i] == 0 || !is_independent(graph, seq.sets[i])) {
      return false;
    }
    if (i > 0) {
      const FlawMask allowed = graph.inclusive_neighbourhood(seq.sets[i - 1]);
      if (seq.sets[i] & ~allowed) {
        return false;
      }
    }
  }
  return true;
}

double sequence_probability(const std::vector<double> &p,
                            const StableSetSequence &seq) {
  double prob = 1.0;
  for (const FlawMask set : seq.sets) {
    for (std::size_t f = 0; f < p.size(); ++f) {
      if ((set >> f) & 1) {
        prob *= p[f];
      }
    }
  }
  return prob;
}

std::vector<StableSetSequence> enumerate_sequences(const DependencyGraph &graph,
                                                   int total_size,
                                                   int size_limit,
                                                   int flaw_limit) {
  check_limits(graph, total_size, size_limit, flaw_limit);
  const std::vector<FlawMask> candidates = nonempty_independent_sets(graph);

  std::vector<StableSetSequence> out;
  StableSetSequence current;

  // Depth-first extension; sets are tried in ascending mask order, which is
  // lexicographic in the flaw indices.
  auto extend = [&](auto &&self, int remaining, bool has_prev,
                    FlawMask prev) -> void {
    if (remaining == 0) {
      out.push_back(current);
      return;
    }
    const FlawMask allowed =
        has_prev ? graph.inclusive_neighbourhood(prev) : ~FlawMask{0};
    for (const FlawMask set : candidates) {
      if (popcount(set) > remaining || (set & ~allowed)) {
        continue;
      }
      if (out.size() > kSequenceCountCap) {
        throw SizeLimitError("stable set sequence enumeration too large");
      }
      current.sets.push_back(set);
      self(self, remaining - popcount(set), true, set);
      current.sets.pop_back();
    }
  };
  extend(extend, total_size, false, 0);
  return out;
}

double weighted_sum(const DependencyGraph &graph, const std::vector<double> &p,
                    int total_size, int size_limit, int flaw_limit) {
  check_limits(graph, total_size, size_limit, flaw_limit);
  if (static_cast<int>(p.size()) != graph.flaw_count) {
    throw DimensionError("probability vector length does not match flaw count");
  }
  if (total_size == 0) {
    return 1.0; // the empty sequence
  }
  const std::vector<FlawMask> candidates = nonempty_independent_sets(graph);
  std::vector<double> set_probability(candidates.size(), 1.0);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (int f = 0; f < graph.flaw_count; ++f) {
      if ((candidates[i] >> f) & 1) {
        set_probability[i] *= p[f];
      }
    }
  }

  // tail[i][t]: weighted sum over continuations that start with candidate i
  // and use exactly t flaws in total (including candidate i itself).
  std::map<std::pair<std::size_t, int>, double> memo;
  auto tail = [&](auto &&self, std::size_t i, int t) -> double {
    const int size = popcount(candidates[i]);
    if (size > t) {
      return 0.0;
    }
    if (size == t) {
      return set_probability[i];
    }
    const auto key = std::make_pair(i, t);
    auto it = memo.find(key);
    if (it != memo.end()) {
      return it->second;
    }
    const FlawMask allowed = graph.inclusive_neighbourhood(candidates[i]);
    double sum = 0.0;
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      if (candidates[j] & ~allowed) {
        continue;
      }
      sum += self(self, j, t - size);
    }
    const double value = set_probability[i] * sum;
    memo.emplace(key, value);
    return value;
  };

  double total = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    total += tail(tail, i, total_size);
  }
  return total;
}

double path_estimate(const DependencyGraph &graph,
                     const std::vector<double> &p,
                     const ConditionReport &report) {
  if (!report.satisfied) {
    throw ValidationError("path_estimate requires a satisfied condition");
  }
  switch (report.condition) {
  case Condition::SHC: {
    const double q_empty = indep_polynomial(graph, p, 0);
    if (!(q_empty > 0.0)) {
      throw NumericalError("q_empty must be positive");
    }
    return 1.0 / q_empty;
  }
  case Condition::CEC: {
    if (!report.witness_y.has_value()) {
      throw ValidationError("CEC report carries no witness");
    }
    double product = 1.0;
    for (double y : *report.witness_y) {
      product *= 1.0 + y;
    }
    return product;
  }
  case Condition::GLC:
  case Condition::SLC: {
    std::vector<double> x;
    glc_witness_or_reduction(report, x, graph.flaw_count);
    double product = 1.0;
    for (double v : x) {
      product *= 1.0 / (1.0 - v);
    }
    return product;
  }
  }
  throw ValidationError("unknown condition");
}

SlackTail tail_bound_slack(const DependencyGraph &graph,
                           const std::vector<double> &p, double epsilon,
                           const ConditionReport &report, double r) {
  if (!(epsilon > 0.0)) {
    throw ValidationError("epsilon must be positive");
  }
  std::vector<double> inflated = p;
  for (double &v : inflated) {
    v *= 1.0 + epsilon;
  }

  SlackTail tail;
  tail.epsilon = epsilon;
  tail.bound = std::pow(1.0 + epsilon, -r);

  switch (report.condition) {
  case Condition::SHC: {
    const ConditionReport inflated_report = check_shc(graph, inflated);
    if (!inflated_report.satisfied) {
      throw ValidationError("inflated probabilities no longer satisfy SHC");
    }
    const double q_empty = indep_polynomial(graph, inflated, 0);
    tail.threshold = -std::log(q_empty) / std::log1p(epsilon);
    return tail;
  }
  case Condition::CEC: {
    if (!report.witness_y.has_value()) {
      throw ValidationError("CEC report carries no witness");
    }
    if (!check_cec(graph, inflated, *report.witness_y).satisfied) {
      throw ValidationError("inflated probabilities no longer satisfy CEC");
    }
    double sum = 0.0;
    for (double y : *report.witness_y) {
      sum += std::log1p(y);
    }
    tail.threshold = sum / std::log1p(epsilon);
    return tail;
  }
  case Condition::GLC:
  case Condition::SLC: {
    std::vector<double> x;
    glc_witness_or_reduction(report, x, graph.flaw_count);
    if (!check_glc(graph, inflated, x).satisfied) {
      throw ValidationError("inflated probabilities no longer satisfy GLC");
    }
    double sum = 0.0;
    for (double v : x) {
      sum += -std::log1p(-v);
    }
    tail.threshold = sum / std::log1p(epsilon);
    return tail;
  }
  }
  throw ValidationError("unknown condition");
}

double tail_bound_noslack(const DependencyGraph &graph,
                          const std::vector<double> &p,
                          const ConditionReport &report, double t) {
  if (!report.satisfied) {
    throw ValidationError("tail_bound_noslack requires a satisfied condition");
  }
  const double q_empty = indep_polynomial(graph, p, 0);
  if (!(q_empty > 0.0)) {
    throw NumericalError("q_empty must be positive");
  }

  double ratio_sum = 0.0;
  double log_sum = 0.0;
  switch (report.condition) {
  case Condition::SHC: {
    for (int f = 0; f < graph.flaw_count; ++f) {
      const double q_f = indep_polynomial(graph, p, FlawMask{1} << f);
      ratio_sum += q_f / q_empty;
      log_sum += std::log1p(q_f / q_empty);
    }
    break;
  }
  case Condition::CEC: {
    if (!report.witness_y.has_value()) {
      throw ValidationError("CEC report carries no witness");
    }
    for (double y : *report.witness_y) {
      ratio_sum += y;
      log_sum += std::log1p(y);
    }
    break;
  }
  case Condition::GLC:
  case Condition::SLC: {
    std::vector<double> x;
    glc_witness_or_reduction(report, x, graph.flaw_count);
    for (double v : x) {
      ratio_sum += v / (1.0 - v);
      log_sum += -std::log1p(-v);
    }
    break;
  }
  }

  const double extra = std::min(std::log(1.0 / q_empty), log_sum);
  return 4.0 * ratio_sum * (t + 1.0 + extra);
}

} // namespace qlll
