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

#include "qlll/instance.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

namespace qlll {

namespace {

constexpr double kProjectorTol = 1e-9;
constexpr double kEulerE = 2.718281828459045235360287471353;

// Boundary instances (q_empty exactly zero, e.g. qubit instances where
// q_empty is an integer multiple of 2^-n) must not be accepted through
// roundoff of the alternating sums, and true zeros of q_I must not be
// rejected for landing slightly negative.
constexpr double kShearerTol = 1e-12;

int popcount(FlawMask mask) { return __builtin_popcount(mask); }

// Alternating sum over independent subsets of `allowed`:
//   Z(allowed) = sum_{T independent, T subseteq allowed} (-1)^{|T|} prod x_f.
// Deletion-contraction recursion with memoisation on the allowed mask.
class AlternatingSum {
public:
  AlternatingSum(const DependencyGraph &graph, const std::vector<double> &x)
      : graph_(graph), x_(x) {}

  double operator()(FlawMask allowed) {
    if (allowed == 0) {
      return 1.0;
    }
    auto it = memo_.find(allowed);
    if (it != memo_.end()) {
      return it->second;
    }
    const int v = __builtin_ctz(allowed);
    const double without = (*this)(allowed & ~(FlawMask{1} << v));
    const double with =
        (*this)(allowed & ~graph_.inclusive_neighbourhood(v));
    const double value = without - x_[v] * with;
    memo_.emplace(allowed, value);
    return value;
  }

private:
  const DependencyGraph &graph_;
  const std::vector<double> &x_;
  std::unordered_map<FlawMask, double> memo_;
};

FlawMask full_mask(int count) {
  return count >= 32 ? ~FlawMask{0} : (FlawMask{1} << count) - 1;
}

void require_probability_vector(const DependencyGraph &graph,
                                const std::vector<double> &p) {
  if (static_cast<int>(p.size()) != graph.flaw_count) {
    throw DimensionError("probability vector length does not match flaw count");
  }
}

} // namespace

double flaw_probability(const Flaw &flaw) {
  const double dim = static_cast<double>(flaw.local_projector.rows());
  return flaw.local_projector.trace().real() / dim;
}

double flaw_set_probability(const QsatInstance &inst, FlawMask subset) {
  double product = 1.0;
  for (int f = 0; f < inst.flaw_count(); ++f) {
    if ((subset >> f) & 1) {
      product *= flaw_probability(inst.flaw(f));
    }
  }
  return product;
}

QsatInstance::QsatInstance(int qubit_count, std::vector<Flaw> flaws)
    : n_(qubit_count), flaws_(std::move(flaws)) {
  if (n_ < 1) {
    throw ValidationError("instance must have at least one qubit");
  }
  require_dim(basis_dim(n_));
  std::set<std::string> ids;
  for (const Flaw &flaw : flaws_) {
    if (flaw.id.empty()) {
      throw ValidationError("flaw id must be non-empty");
    }
    if (!ids.insert(flaw.id).second) {
      throw ValidationError("duplicate flaw id '" + flaw.id + "'");
    }
    if (flaw.support.empty()) {
      throw ValidationError("flaw '" + flaw.id + "' has empty support");
    }
    for (std::size_t i = 0; i < flaw.support.size(); ++i) {
      if (flaw.support[i] < 0 || flaw.support[i] >= n_) {
        throw ValidationError("flaw '" + flaw.id +
                              "' has a support index out of range");
      }
      if (i > 0 && flaw.support[i] <= flaw.support[i - 1]) {
        throw ValidationError("flaw '" + flaw.id +
                              "' support must be sorted and distinct");
      }
    }
    const Eigen::Index want = Eigen::Index{1}
                              << static_cast<int>(flaw.support.size());
    const ComplexMatrix &proj = flaw.local_projector;
    if (proj.rows() != want || proj.cols() != want) {
      throw ValidationError("flaw '" + flaw.id +
                            "' projector dimension does not match 2^|support|");
    }
    if (trace_norm(proj - proj.adjoint()) > kProjectorTol) {
      throw ValidationError("flaw '" + flaw.id + "' projector is not Hermitian");
    }
    if (trace_norm(proj * proj - proj) > kProjectorTol) {
      throw ValidationError("flaw '" + flaw.id +
                            "' projector is not idempotent");
    }
  }
  embedded_.resize(flaws_.size());
}

int QsatInstance::flaw_index(const std::string &id) const {
  for (int i = 0; i < flaw_count(); ++i) {
    if (flaws_[i].id == id) {
      return i;
    }
  }
  return -1;
}

const ComplexMatrix &QsatInstance::full_projector(int index) const {
  ComplexMatrix &slot = embedded_.at(index);
  if (slot.rows() == 0) {
    slot = embed_local(flaws_[index].local_projector, flaws_[index].support, n_);
  }
  return slot;
}

std::vector<double> QsatInstance::flaw_probabilities() const {
  std::vector<double> p;
  p.reserve(flaws_.size());
  for (const Flaw &flaw : flaws_) {
    p.push_back(flaw_probability(flaw));
  }
  return p;
}

bool QsatInstance::commuting() const {
  if (!commuting_.has_value()) {
    bool ok = true;
    for (int a = 0; a < flaw_count() && ok; ++a) {
      for (int b = a + 1; b < flaw_count() && ok; ++b) {
        const std::vector<int> &sa = flaws_[a].support;
        const std::vector<int> &sb = flaws_[b].support;
        const bool overlap =
            std::find_first_of(sa.begin(), sa.end(), sb.begin(), sb.end()) !=
            sa.end();
        if (!overlap) {
          continue;
        }
        const ComplexMatrix &pa = full_projector(a);
        const ComplexMatrix &pb = full_projector(b);
        ok = trace_norm(pa * pb - pb * pa) <= kProjectorTol;
      }
    }
    commuting_ = ok;
  }
  return *commuting_;
}

bool DependencyGraph::adjacent(int a, int b) const {
  return (neighbour_masks[a] >> b) & 1;
}

FlawMask DependencyGraph::inclusive_neighbourhood(FlawMask set) const {
  FlawMask out = 0;
  for (int f = 0; f < flaw_count; ++f) {
    if ((set >> f) & 1) {
      out |= inclusive_neighbourhood(f);
    }
  }
  return out;
}

DependencyGraph dependency_graph(const QsatInstance &inst) {
  const int m = inst.flaw_count();
  if (m > 31) {
    throw SizeLimitError("dependency graph limited to 31 flaws");
  }
  DependencyGraph graph;
  graph.flaw_count = m;
  graph.adjacency.assign(m, {});
  graph.neighbour_masks.assign(m, 0);
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      const std::vector<int> &sa = inst.flaw(a).support;
      const std::vector<int> &sb = inst.flaw(b).support;
      const bool overlap =
          std::find_first_of(sa.begin(), sa.end(), sb.begin(), sb.end()) !=
          sa.end();
      if (overlap) {
        graph.adjacency[a].push_back(b);
        graph.adjacency[b].push_back(a);
        graph.neighbour_masks[a] |= FlawMask{1} << b;
        graph.neighbour_masks[b] |= FlawMask{1} << a;
      }
    }
  }
  return graph;
}

bool is_independent(const DependencyGraph &graph, FlawMask set) {
  for (int f = 0; f < graph.flaw_count; ++f) {
    if (((set >> f) & 1) && (graph.neighbour_masks[f] & set)) {
      return false;
    }
  }
  return true;
}

std::vector<FlawMask> independent_sets(const DependencyGraph &graph,
                                       int limit) {
  if (graph.flaw_count > limit) {
    throw SizeLimitError("independent set enumeration limited to " +
                         std::to_string(limit) + " flaws");
  }
  std::vector<FlawMask> out;
  const FlawMask all = full_mask(graph.flaw_count);
  for (FlawMask mask = 0;; ++mask) {
    if (is_independent(graph, mask)) {
      out.push_back(mask);
    }
    if (mask == all) {
      break;
    }
  }
  return out;
}

double indep_polynomial(const DependencyGraph &graph,
                        const std::vector<double> &x, FlawMask I, int limit) {
  require_probability_vector(graph, x);
  if (graph.flaw_count > limit) {
    throw SizeLimitError("independent set enumeration limited to " +
                         std::to_string(limit) + " flaws");
  }
  if (!is_independent(graph, I)) {
    throw ValidationError("indep_polynomial: the index set is not independent");
  }
  double weight = 1.0;
  for (int f = 0; f < graph.flaw_count; ++f) {
    if ((I >> f) & 1) {
      weight *= x[f];
    }
  }
  AlternatingSum z(graph, x);
  const FlawMask allowed =
      full_mask(graph.flaw_count) & ~graph.inclusive_neighbourhood(I);
  return weight * z(allowed);
}

const char *condition_name(Condition c) {
  switch (c) {
  case Condition::SLC:
    return "SLC";
  case Condition::GLC:
    return "GLC";
  case Condition::CEC:
    return "CEC";
  case Condition::SHC:
    return "SHC";
  }
  return "?";
}

std::optional<Condition> condition_from_name(const std::string &name) {
  std::string upper = name;
  std::transform(upper.begin(), upper.end(), upper.begin(), ::toupper);
  if (upper == "SLC") return Condition::SLC;
  if (upper == "GLC") return Condition::GLC;
  if (upper == "CEC") return Condition::CEC;
  if (upper == "SHC") return Condition::SHC;
  return std::nullopt;
}

ConditionReport check_slc(const DependencyGraph &graph,
                          const std::vector<double> &p) {
  require_probability_vector(graph, p);
  ConditionReport report;
  report.condition = Condition::SLC;
  int d = 0;
  for (int f = 0; f < graph.flaw_count; ++f) {
    d = std::max(d, popcount(graph.inclusive_neighbourhood(f)));
  }
  report.witness_d = d;
  report.satisfied = true;
  const double threshold = d > 0 ? 1.0 / (d * kEulerE) : 1.0;
  for (int f = 0; f < graph.flaw_count; ++f) {
    if (p[f] > threshold) {
      report.satisfied = false;
      report.detail = "flaw " + std::to_string(f) + " has p=" +
                      std::to_string(p[f]) + " > 1/(d e)=" +
                      std::to_string(threshold);
      break;
    }
  }
  return report;
}

ConditionReport check_glc(const DependencyGraph &graph,
                          const std::vector<double> &p,
                          std::optional<std::vector<double>> x) {
  require_probability_vector(graph, p);
  ConditionReport report;
  report.condition = Condition::GLC;
  std::vector<double> witness;
  if (x.has_value()) {
    witness = *x;
    if (static_cast<int>(witness.size()) != graph.flaw_count) {
      throw DimensionError("GLC witness length does not match flaw count");
    }
    for (double v : witness) {
      if (!(v > 0.0 && v < 1.0)) {
        throw ValidationError("GLC witness entries must lie in (0,1)");
      }
    }
  } else {
    // Default witness x_f = 1/d, the reduction behind the symmetric
    // condition. Isolated flaws (d = 1) would put x on the boundary, so they
    // fall back to x_f = 1/2.
    int d = 0;
    for (int f = 0; f < graph.flaw_count; ++f) {
      d = std::max(d, popcount(graph.inclusive_neighbourhood(f)));
    }
    witness.assign(graph.flaw_count, d >= 2 ? 1.0 / d : 0.5);
  }
  report.witness_x = witness;
  report.satisfied = true;
  for (int f = 0; f < graph.flaw_count; ++f) {
    double product = 1.0;
    for (int g : graph.adjacency[f]) {
      product *= 1.0 - witness[g];
    }
    if (p[f] > witness[f] * product) {
      report.satisfied = false;
      report.detail = "flaw " + std::to_string(f) + " violates p/x <= prod(1-x)";
      break;
    }
  }
  return report;
}

ConditionReport check_cec(const DependencyGraph &graph,
                          const std::vector<double> &p,
                          const std::vector<double> &y) {
  require_probability_vector(graph, p);
  if (static_cast<int>(y.size()) != graph.flaw_count) {
    throw DimensionError("CEC witness length does not match flaw count");
  }
  for (double v : y) {
    if (!(v > 0.0)) {
      throw ValidationError("CEC witness entries must be positive");
    }
  }
  ConditionReport report;
  report.condition = Condition::CEC;
  report.witness_y = y;
  report.satisfied = true;
  for (int f = 0; f < graph.flaw_count; ++f) {
    const FlawMask closed = graph.inclusive_neighbourhood(f);
    // Sum of prod y over independent subsets of the inclusive neighbourhood.
    double sum = 0.0;
    FlawMask sub = closed;
    while (true) {
      if (is_independent(graph, sub)) {
        double term = 1.0;
        for (int g = 0; g < graph.flaw_count; ++g) {
          if ((sub >> g) & 1) {
            term *= y[g];
          }
        }
        sum += term;
      }
      if (sub == 0) {
        break;
      }
      sub = (sub - 1) & closed;
    }
    if (y[f] < p[f] * sum) {
      report.satisfied = false;
      report.detail = "flaw " + std::to_string(f) + " violates y/p >= sum";
      break;
    }
  }
  return report;
}

ConditionReport check_shc(const DependencyGraph &graph,
                          const std::vector<double> &p) {
  require_probability_vector(graph, p);
  ConditionReport report;
  report.condition = Condition::SHC;
  AlternatingSum z(graph, p);
  const FlawMask all = full_mask(graph.flaw_count);
  const std::vector<FlawMask> independents = independent_sets(graph);
  report.satisfied = true;
  for (const FlawMask I : independents) {
    double weight = 1.0;
    for (int f = 0; f < graph.flaw_count; ++f) {
      if ((I >> f) & 1) {
        weight *= p[f];
      }
    }
    const double q = weight * z(all & ~graph.inclusive_neighbourhood(I));
    report.q_values[I] = q;
    if (I == 0 ? q <= kShearerTol : q < -kShearerTol) {
      report.satisfied = false;
    }
  }
  if (!report.satisfied) {
    report.detail = "some q_I is negative or q_empty is not positive";
  }
  return report;
}

ConditionReport check_slc(const QsatInstance &inst) {
  return check_slc(dependency_graph(inst), inst.flaw_probabilities());
}

ConditionReport check_glc(const QsatInstance &inst,
                          std::optional<std::vector<double>> x) {
  return check_glc(dependency_graph(inst), inst.flaw_probabilities(),
                   std::move(x));
}

ConditionReport check_cec(const QsatInstance &inst,
                          const std::vector<double> &y) {
  return check_cec(dependency_graph(inst), inst.flaw_probabilities(), y);
}

ConditionReport check_shc(const QsatInstance &inst) {
  return check_shc(dependency_graph(inst), inst.flaw_probabilities());
}

ComplexMatrix sub_hamiltonian(const QsatInstance &inst, FlawMask subset) {
  require_dim(inst.dim());
  ComplexMatrix h = ComplexMatrix::Zero(inst.dim(), inst.dim());
  for (int f = 0; f < inst.flaw_count(); ++f) {
    if ((subset >> f) & 1) {
      h += inst.full_projector(f);
    }
  }
  return h;
}

double subset_gap(const QsatInstance &inst, FlawMask subset) {
  return smallest_nonzero_eig(sub_hamiltonian(inst, subset));
}

double uniform_gap(const QsatInstance &inst, int limit) {
  if (inst.flaw_count() > limit) {
    throw SizeLimitError("uniform gap enumeration limited to " +
                         std::to_string(limit) + " flaws");
  }
  const FlawMask all = full_mask(inst.flaw_count());
  double gap = kInfiniteGap;
  for (FlawMask mask = 1; mask <= all && all != 0; ++mask) {
    gap = std::min(gap, subset_gap(inst, mask));
    if (mask == all) {
      break;
    }
  }
  return gap;
}

ResamplingBound resampling_bound(const QsatInstance &inst,
                                 const ConditionReport &report) {
  if (!report.satisfied) {
    throw ValidationError("resampling_bound requires a satisfied condition");
  }
  const DependencyGraph graph = dependency_graph(inst);
  const std::vector<double> p = inst.flaw_probabilities();
  AlternatingSum z(graph, p);
  const FlawMask all = full_mask(graph.flaw_count);
  const double q_empty = z(all);
  if (!(q_empty > 0.0)) {
    throw NumericalError("q_empty must be positive for the bound formulas");
  }

  double ratio_sum = 0.0; // the leading factor in the closed form
  double log_sum = 0.0;   // the alternative to ln(1/q_empty) inside min(...)
  switch (report.condition) {
  case Condition::SHC: {
    for (int f = 0; f < graph.flaw_count; ++f) {
      const double q_f =
          p[f] * z(all & ~graph.inclusive_neighbourhood(f));
      ratio_sum += q_f / q_empty;
      log_sum += std::log1p(q_f / q_empty);
    }
    break;
  }
  case Condition::GLC: {
    if (!report.witness_x.has_value()) {
      throw ValidationError("GLC bound requires the x witness");
    }
    for (double x : *report.witness_x) {
      ratio_sum += x / (1.0 - x);
      log_sum += -std::log1p(-x);
    }
    break;
  }
  case Condition::CEC: {
    if (!report.witness_y.has_value()) {
      throw ValidationError("CEC bound requires the y witness");
    }
    for (double y : *report.witness_y) {
      ratio_sum += y;
      log_sum += std::log1p(y);
    }
    break;
  }
  case Condition::SLC: {
    if (!report.witness_d.has_value()) {
      throw ValidationError("SLC bound requires the degree witness");
    }
    const double x = *report.witness_d >= 2 ? 1.0 / *report.witness_d : 0.5;
    for (int f = 0; f < graph.flaw_count; ++f) {
      ratio_sum += x / (1.0 - x);
      log_sum += -std::log1p(-x);
    }
    break;
  }
  }

  const double extra = std::min(std::log(1.0 / q_empty), log_sum);
  ResamplingBound bound;
  bound.core = 1.0 + 4.0 * ratio_sum * (1.0 + extra);
  bound.n_scaled = inst.qubit_count() * bound.core;
  return bound;
}

} // namespace qlll
