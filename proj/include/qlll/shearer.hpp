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

#ifndef QLLL_SHEARER_HPP
#define QLLL_SHEARER_HPP

#include <vector>

#include "qlll/instance.hpp"

namespace qlll {

inline constexpr int kSequenceSizeLimit = 10;
inline constexpr int kSequenceFlawLimit = 8;

// Chain of non-empty independent sets with each contained in the previous
// one's inclusive neighbourhood.
struct StableSetSequence {
  std::vector<FlawMask> sets;

  int total_size() const;
};

bool valid_stable_sequence(const DependencyGraph &graph,
                           const StableSetSequence &seq);

double sequence_probability(const std::vector<double> &p,
                            const StableSetSequence &seq);

// All stable set sequences with total size exactly k, depth first with
// independent sets in ascending mask order.
std::vector<StableSetSequence> enumerate_sequences(
    const DependencyGraph &graph, int total_size,
    int size_limit = kSequenceSizeLimit, int flaw_limit = kSequenceFlawLimit);

// Exact weighted sum over sequences of total size k. This is the oracle the
// closed-form bounds are tested against.
double weighted_sum(const DependencyGraph &graph, const std::vector<double> &p,
                    int total_size, int size_limit = kSequenceSizeLimit,
                    int flaw_limit = kSequenceFlawLimit);

// Closed-form upper bound on the weighted sum over all stable set sequences.
double path_estimate(const DependencyGraph &graph,
                     const std::vector<double> &p,
                     const ConditionReport &report);

struct SlackTail {
  double threshold = 0.0; // T
  double bound = 0.0;     // (1+epsilon)^{-r}
  double epsilon = 0.0;
};

// Tail threshold under an epsilon-inflated condition: the weighted sum over
// sequences of size >= T + r is at most (1+epsilon)^{-r}. Throws when the
// inflated probabilities no longer satisfy the condition.
SlackTail tail_bound_slack(const DependencyGraph &graph,
                           const std::vector<double> &p, double epsilon,
                           const ConditionReport &report, double r);

// Tail threshold without slack: the weighted sum over sequences of size >= T
// is at most e^{-t}.
double tail_bound_noslack(const DependencyGraph &graph,
                          const std::vector<double> &p,
                          const ConditionReport &report, double t);

} // namespace qlll

#endif
