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

#ifndef QLLL_INSTANCE_HPP
#define QLLL_INSTANCE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qlll/linalg.hpp"

namespace qlll {

// Subsets of flaws are carried as bitmasks over the instance's flaw order.
using FlawMask = std::uint32_t;

inline constexpr int kIndependentSetLimit = 20;
inline constexpr int kGapSubsetLimit = 16;

// A local orthogonal projector whose image is the subspace to avoid.
struct Flaw {
  std::string id;
  std::vector<int> support;      // sorted qubit indices
  ComplexMatrix local_projector; // dim 2^|support|
};

// Probability of seeing the flaw on a maximally mixed state:
// Tr(local projector) / 2^|support|.
double flaw_probability(const Flaw &flaw);

class QsatInstance;

// Product rule p_S = prod_{f in S} p_f.
double flaw_set_probability(const QsatInstance &inst, FlawMask subset);

class QsatInstance {
public:
  // Validates every flaw (projector tolerance 1e-9 on ||P^2 - P||_1 and
  // ||P - P'||_1, non-empty sorted support, unique ids) and the qubit count.
  QsatInstance(int qubit_count, std::vector<Flaw> flaws);

  int qubit_count() const { return n_; }
  int flaw_count() const { return static_cast<int>(flaws_.size()); }
  const std::vector<Flaw> &flaws() const { return flaws_; }
  const Flaw &flaw(int index) const { return flaws_.at(index); }
  Eigen::Index dim() const { return basis_dim(n_); }

  int flaw_index(const std::string &id) const; // -1 when absent

  // Projector embedded into the full register (cached).
  const ComplexMatrix &full_projector(int index) const;

  std::vector<double> flaw_probabilities() const;

  // True when all pairs of embedded projectors commute within 1e-9.
  bool commuting() const;

private:
  int n_;
  std::vector<Flaw> flaws_;
  mutable std::vector<ComplexMatrix> embedded_;
  mutable std::optional<bool> commuting_;
};

struct DependencyGraph {
  int flaw_count = 0;
  std::vector<std::vector<int>> adjacency; // sorted neighbour lists
  std::vector<FlawMask> neighbour_masks;   // Gamma(f)

  bool adjacent(int a, int b) const;
  FlawMask neighbourhood(int f) const { return neighbour_masks[f]; }
  FlawMask inclusive_neighbourhood(int f) const {
    return neighbour_masks[f] | (FlawMask{1} << f);
  }
  FlawMask inclusive_neighbourhood(FlawMask set) const;
};

// Flaws adjacent iff their supports intersect.
DependencyGraph dependency_graph(const QsatInstance &inst);

bool is_independent(const DependencyGraph &graph, FlawMask set);

// All independent sets (including the empty set), ascending mask order.
std::vector<FlawMask> independent_sets(const DependencyGraph &graph,
                                       int limit = kIndependentSetLimit);

// q_I(x) = sum over independent supersets S of I of (-1)^{|S|-|I|} prod x_f.
double indep_polynomial(const DependencyGraph &graph,
                        const std::vector<double> &x, FlawMask I,
                        int limit = kIndependentSetLimit);

enum class Condition { SLC, GLC, CEC, SHC };

const char *condition_name(Condition c);
std::optional<Condition> condition_from_name(const std::string &name);

struct ConditionReport {
  Condition condition = Condition::SHC;
  bool satisfied = false;
  std::optional<int> witness_d;                  // SLC
  std::optional<std::vector<double>> witness_x;  // GLC
  std::optional<std::vector<double>> witness_y;  // CEC
  std::map<FlawMask, double> q_values;           // SHC
  std::string detail;
};

// Condition checkers on (graph, probabilities); instance-level wrappers below.
ConditionReport check_slc(const DependencyGraph &graph,
                          const std::vector<double> &p);
ConditionReport check_glc(const DependencyGraph &graph,
                          const std::vector<double> &p,
                          std::optional<std::vector<double>> x = std::nullopt);
ConditionReport check_cec(const DependencyGraph &graph,
                          const std::vector<double> &p,
                          const std::vector<double> &y);
ConditionReport check_shc(const DependencyGraph &graph,
                          const std::vector<double> &p);

ConditionReport check_slc(const QsatInstance &inst);
ConditionReport check_glc(const QsatInstance &inst,
                          std::optional<std::vector<double>> x = std::nullopt);
ConditionReport check_cec(const QsatInstance &inst,
                          const std::vector<double> &y);
ConditionReport check_shc(const QsatInstance &inst);

// H^S = sum of embedded projectors over the subset.
ComplexMatrix sub_hamiltonian(const QsatInstance &inst, FlawMask subset);

// Smallest nonzero eigenvalue of H^S (+infinity when H^S = 0).
double subset_gap(const QsatInstance &inst, FlawMask subset);

// Exact minimum of subset_gap over all subsets.
double uniform_gap(const QsatInstance &inst, int limit = kGapSubsetLimit);

struct ResamplingBound {
  double core = 0.0;     // explicit closed-form bound
  double n_scaled = 0.0; // core multiplied by the qubit count
};

// Expected-resampling bound for a verified condition report.
ResamplingBound resampling_bound(const QsatInstance &inst,
                                 const ConditionReport &report);

} // namespace qlll

#endif
