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

#include "qlll/experiments.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace qlll {

namespace {

Json complex_to_json(const Complex &value) {
  return Json::array({value.real(), value.imag()});
}

Json matrix_to_json(const ComplexMatrix &m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(complex_to_json(m(i, j)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const Json &doc, const std::string &where) {
  if (!doc.is_array() || doc.empty()) {
    throw ValidationError(where + ": projector must be a non-empty array");
  }
  const Eigen::Index dim = static_cast<Eigen::Index>(doc.size());
  ComplexMatrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const Json &row = doc.at(i);
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
      throw ValidationError(where + ": projector rows must have equal length");
    }
    for (Eigen::Index j = 0; j < dim; ++j) {
      const Json &cell = row.at(j);
      if (!cell.is_array() || cell.size() != 2 ||
          !cell.at(0).is_number() || !cell.at(1).is_number()) {
        throw ValidationError(where +
                              ": entries must be [re, im] number pairs");
      }
      const double re = cell.at(0).get<double>();
      const double im = cell.at(1).get<double>();
      if (!std::isfinite(re) || !std::isfinite(im)) {
        throw ValidationError(where + ": entries must be finite");
      }
      m(i, j) = Complex(re, im);
    }
  }
  return m;
}

std::string mask_to_ids(const QsatInstance &inst, FlawMask mask) {
  std::string out;
  for (int f = 0; f < inst.flaw_count(); ++f) {
    if ((mask >> f) & 1) {
      if (!out.empty()) {
        out += ",";
      }
      out += inst.flaw(f).id;
    }
  }
  return out;
}

Json condition_report_to_json(const QsatInstance &inst,
                              const ConditionReport &report) {
  Json out;
  out["condition"] = condition_name(report.condition);
  out["satisfied"] = report.satisfied;
  if (report.witness_d.has_value()) {
    out["witness"] = Json{{"d", *report.witness_d}};
  } else if (report.witness_x.has_value()) {
    out["witness"] = Json{{"x", *report.witness_x}};
  } else if (report.witness_y.has_value()) {
    out["witness"] = Json{{"y", *report.witness_y}};
  }
  if (!report.q_values.empty()) {
    // Full listing for desk-sized instances; a summary beyond that.
    constexpr std::size_t kQListLimit = 4096;
    if (report.q_values.size() <= kQListLimit) {
      Json q = Json::array();
      for (const auto &[mask, value] : report.q_values) {
        q.push_back(Json{{"set", mask_to_ids(inst, mask)}, {"q", value}});
      }
      out["q_values"] = std::move(q);
    } else {
      double minimum = std::numeric_limits<double>::infinity();
      for (const auto &[mask, value] : report.q_values) {
        if (mask != 0) {
          minimum = std::min(minimum, value);
        }
      }
      out["q_summary"] = Json{{"count", report.q_values.size()},
                              {"q_empty", report.q_values.at(0)},
                              {"min_nonempty", minimum}};
    }
  }
  if (!report.detail.empty()) {
    out["detail"] = report.detail;
  }
  return out;
}

Json gap_to_json(double gap) {
  if (std::isinf(gap)) {
    return Json("infinity");
  }
  return Json(gap);
}

// Measure every flaw projectively (dephasing in the flaw basis), in flaw
// order.
ComplexMatrix measure_all_flaws(const ComplexMatrix &rho,
                                const QsatInstance &inst) {
  ComplexMatrix out = rho;
  for (int f = 0; f < inst.flaw_count(); ++f) {
    const ComplexMatrix &proj = inst.full_projector(f);
    const ComplexMatrix pr = proj * out;
    const ComplexMatrix xp = out * proj;
    out = out - pr - xp + 2.0 * (pr * proj);
  }
  return out;
}

struct TrialSummary {
  long trial = 0;
  Terminal terminal = Terminal::Timeout;
  long resamplings = 0;
  long channel_applications = 0;
  double residual_energy = 0.0;
  double ground_overlap = 0.0;
  std::string outcomes;
};

Json summary_to_json(const TrialSummary &summary) {
  Json out;
  out["trial"] = summary.trial;
  out["terminal"] = terminal_name(summary.terminal);
  out["resamplings"] = summary.resamplings;
  out["channel_applications"] = summary.channel_applications;
  out["residual_energy"] = summary.residual_energy;
  out["ground_overlap"] = summary.ground_overlap;
  out["log"] = summary.outcomes;
  return out;
}

Json aggregate_summaries(const std::vector<TrialSummary> &rows) {
  const double count = static_cast<double>(rows.size());
  double successes = 0.0;
  double mean_resamplings = 0.0;
  double mean_apps = 0.0;
  double mean_energy = 0.0;
  double mean_overlap = 0.0;
  double success_overlap = 0.0;
  for (const TrialSummary &row : rows) {
    successes += row.terminal == Terminal::Success ? 1.0 : 0.0;
    mean_resamplings += static_cast<double>(row.resamplings);
    mean_apps += static_cast<double>(row.channel_applications);
    mean_energy += row.residual_energy;
    mean_overlap += row.ground_overlap;
    if (row.terminal == Terminal::Success) {
      success_overlap += row.ground_overlap;
    }
  }
  mean_resamplings /= count;
  mean_apps /= count;
  double variance = 0.0;
  for (const TrialSummary &row : rows) {
    const double delta = static_cast<double>(row.resamplings) - mean_resamplings;
    variance += delta * delta;
  }
  variance = rows.size() > 1 ? variance / (count - 1.0) : 0.0;
  const double stderr_resamplings = std::sqrt(variance / count);

  Json out;
  out["trials"] = rows.size();
  out["success_rate"] = successes / count;
  out["mean_resamplings"] = mean_resamplings;
  out["stderr_resamplings"] = stderr_resamplings;
  out["ci95_resamplings"] =
      Json::array({mean_resamplings - 1.96 * stderr_resamplings,
                   mean_resamplings + 1.96 * stderr_resamplings});
  out["mean_channel_applications"] = mean_apps;
  out["mean_residual_energy"] = mean_energy / count;
  out["mean_ground_overlap"] = mean_overlap / count;
  out["mean_ground_overlap_on_success"] =
      successes > 0 ? success_overlap / successes : 0.0;
  return out;
}

} // namespace

Json instance_to_json(const QsatInstance &inst) {
  Json out;
  out["n"] = inst.qubit_count();
  Json flaws = Json::array();
  for (const Flaw &flaw : inst.flaws()) {
    Json entry;
    entry["id"] = flaw.id;
    entry["support"] = flaw.support;
    entry["projector"] = matrix_to_json(flaw.local_projector);
    flaws.push_back(std::move(entry));
  }
  out["flaws"] = std::move(flaws);
  return out;
}

QsatInstance instance_from_json(const Json &doc) {
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("flaws")) {
    throw ValidationError("instance document needs 'n' and 'flaws'");
  }
  const int n = doc.at("n").get<int>();
  std::vector<Flaw> flaws;
  for (const Json &entry : doc.at("flaws")) {
    Flaw flaw;
    flaw.id = entry.at("id").get<std::string>();
    flaw.support = entry.at("support").get<std::vector<int>>();
    flaw.local_projector =
        matrix_from_json(entry.at("projector"), "flaw '" + flaw.id + "'");
    flaws.push_back(std::move(flaw));
  }
  return QsatInstance(n, std::move(flaws));
}

QsatInstance instance_from_string(const std::string &text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error &err) {
    throw ValidationError(std::string("instance parse error: ") + err.what());
  }
  return instance_from_json(doc);
}

QsatInstance load_instance_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open instance file: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return instance_from_string(buffer.str());
}

void save_instance_file(const QsatInstance &inst, const std::string &path) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot write instance file: " + path);
  }
  out << instance_to_json(inst).dump(2) << "\n";
}

namespace {

std::vector<int> random_support(int n, int k, Rng &rng) {
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) {
    all[i] = i;
  }
  for (int i = 0; i < k; ++i) {
    const int j = i + rng.uniform_int(n - i);
    std::swap(all[i], all[j]);
  }
  std::vector<int> support(all.begin(), all.begin() + k);
  std::sort(support.begin(), support.end());
  return support;
}

ComplexMatrix haar_rank_projector(Eigen::Index dim, int rank, Rng &rng) {
  ComplexMatrix g(dim, rank);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (int j = 0; j < rank; ++j) {
      g(i, j) = Complex(rng.gaussian(), rng.gaussian());
    }
  }
  const Eigen::HouseholderQR<ComplexMatrix> qr(g);
  const ComplexMatrix q =
      qr.householderQ() * ComplexMatrix::Identity(dim, rank);
  return q * q.adjoint();
}

ComplexMatrix diagonal_rank_projector(Eigen::Index dim, int rank, Rng &rng) {
  std::vector<int> slots(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    slots[i] = static_cast<int>(i);
  }
  for (int i = 0; i < rank; ++i) {
    const int j = i + rng.uniform_int(static_cast<int>(dim) - i);
    std::swap(slots[i], slots[j]);
  }
  ComplexMatrix proj = ComplexMatrix::Zero(dim, dim);
  for (int i = 0; i < rank; ++i) {
    proj(slots[i], slots[i]) = 1.0;
  }
  return proj;
}

QsatInstance generate_appendix_e() {
  const ComplexMatrix one = (ComplexMatrix(2, 2) << 0, 0, 0, 1).finished();
  const ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
  Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(4);
  phi[0] = 3.0 / 5.0; // |00>
  phi[3] = 4.0 / 5.0; // |11>
  std::vector<Flaw> flaws;
  flaws.push_back({"a", {0, 1}, tensor(one, id2)});
  flaws.push_back({"b", {2, 3}, tensor(id2, one)});
  flaws.push_back({"c", {1, 2}, ComplexMatrix(phi * phi.adjoint())});
  return QsatInstance(4, std::move(flaws));
}

QsatInstance generate_appendix_f(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ValidationError("appendix-f epsilon must lie in (0, 1)");
  }
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
  psi[0] = std::sqrt(epsilon);       // |00>
  psi[3] = std::sqrt(1.0 - epsilon); // |11>
  const ComplexMatrix one = (ComplexMatrix(2, 2) << 0, 0, 0, 1).finished();
  std::vector<Flaw> flaws;
  flaws.push_back({"f1", {0, 1}, ComplexMatrix(psi * psi.adjoint())});
  flaws.push_back({"f2", {1}, one});
  return QsatInstance(2, std::move(flaws));
}

} // namespace

QsatInstance generate_instance(const std::string &kind,
                               const GeneratorOptions &options) {
  if (kind == "appendix-e") {
    return generate_appendix_e();
  }
  if (kind == "appendix-f") {
    return generate_appendix_f(options.epsilon);
  }

  Rng rng(options.seed);
  const Eigen::Index local_dim = Eigen::Index{1} << options.locality;
  if (options.rank < 1 || options.rank >= local_dim) {
    throw ValidationError("projector rank must lie in [1, 2^locality)");
  }

  std::vector<Flaw> flaws;
  if (kind == "random-local" || kind == "random-commuting") {
    if (options.locality > options.n) {
      throw ValidationError("locality exceeds qubit count");
    }
    for (int f = 0; f < options.flaws; ++f) {
      Flaw flaw;
      flaw.id = "f" + std::to_string(f);
      flaw.support = random_support(options.n, options.locality, rng);
      flaw.local_projector =
          kind == "random-local"
              ? haar_rank_projector(local_dim, options.rank, rng)
              : diagonal_rank_projector(local_dim, options.rank, rng);
      flaws.push_back(std::move(flaw));
    }
    return QsatInstance(options.n, std::move(flaws));
  }
  if (kind == "chain" || kind == "cycle") {
    if (options.n < 2) {
      throw ValidationError("chain/cycle topologies need at least two qubits");
    }
    const int count = kind == "chain" ? options.n - 1 : options.n;
    for (int f = 0; f < count; ++f) {
      Flaw flaw;
      flaw.id = "f" + std::to_string(f);
      const int next = (f + 1) % options.n;
      flaw.support = {std::min(f, next), std::max(f, next)};
      flaw.local_projector = haar_rank_projector(4, options.rank, rng);
      flaws.push_back(std::move(flaw));
    }
    return QsatInstance(options.n, std::move(flaws));
  }
  throw ValidationError("unknown generator kind: " + kind);
}

Json check_report(const QsatInstance &inst, const std::optional<Json> &witness) {
  std::optional<std::vector<double>> x;
  std::optional<std::vector<double>> y;
  if (witness.has_value()) {
    if (witness->contains("x")) {
      x = witness->at("x").get<std::vector<double>>();
    }
    if (witness->contains("y")) {
      y = witness->at("y").get<std::vector<double>>();
    }
  }

  const ConditionReport slc = check_slc(inst);
  const ConditionReport glc = check_glc(inst, x);
  const ConditionReport shc = check_shc(inst);
  std::optional<ConditionReport> cec;
  if (y.has_value()) {
    cec = check_cec(inst, *y);
  }

  // The implication chain from the theory: SLC -> GLC(1/d) -> SHC, and
  // CEC -> SHC when a witness was supplied.
  bool chain_ok = true;
  if (slc.satisfied) {
    chain_ok = chain_ok && check_glc(inst).satisfied;
  }
  if (glc.satisfied || (cec.has_value() && cec->satisfied)) {
    chain_ok = chain_ok && shc.satisfied;
  }

  Json out;
  out["n"] = inst.qubit_count();
  out["flaw_count"] = inst.flaw_count();
  out["commuting"] = inst.commuting();
  Json conditions;
  conditions["SLC"] = condition_report_to_json(inst, slc);
  conditions["GLC"] = condition_report_to_json(inst, glc);
  if (cec.has_value()) {
    conditions["CEC"] = condition_report_to_json(inst, *cec);
  }
  conditions["SHC"] = condition_report_to_json(inst, shc);
  out["conditions"] = std::move(conditions);
  out["implication_chain_ok"] = chain_ok;
  out["satisfied"] = shc.satisfied;
  return out;
}

Json gap_report(const QsatInstance &inst,
                const std::optional<std::vector<std::string>> &subset_ids) {
  Json out;
  out["n"] = inst.qubit_count();
  out["flaw_count"] = inst.flaw_count();
  if (subset_ids.has_value()) {
    FlawMask mask = 0;
    for (const std::string &id : *subset_ids) {
      const int index = inst.flaw_index(id);
      if (index < 0) {
        throw ValidationError("unknown flaw id: " + id);
      }
      mask |= FlawMask{1} << index;
    }
    out["subset"] = mask_to_ids(inst, mask);
    out["gamma"] = gap_to_json(subset_gap(inst, mask));
    return out;
  }
  out["uniform_gap"] = gap_to_json(uniform_gap(inst));
  Json subsets = Json::array();
  const FlawMask all =
      inst.flaw_count() >= 32 ? ~FlawMask{0}
                              : (FlawMask{1} << inst.flaw_count()) - 1;
  for (FlawMask mask = 1; all != 0 && mask <= all; ++mask) {
    Json entry;
    entry["set"] = mask_to_ids(inst, mask);
    entry["gamma"] = gap_to_json(subset_gap(inst, mask));
    subsets.push_back(std::move(entry));
    if (mask == all) {
      break;
    }
  }
  out["subsets"] = std::move(subsets);
  return out;
}

Json bounds_report(const QsatInstance &inst, Condition condition,
                   const std::optional<Json> &witness) {
  const DependencyGraph graph = dependency_graph(inst);
  const std::vector<double> p = inst.flaw_probabilities();

  ConditionReport report;
  switch (condition) {
  case Condition::SLC:
    report = check_slc(inst);
    break;
  case Condition::GLC: {
    std::optional<std::vector<double>> x;
    if (witness.has_value() && witness->contains("x")) {
      x = witness->at("x").get<std::vector<double>>();
    }
    report = check_glc(inst, x);
    break;
  }
  case Condition::CEC: {
    if (!witness.has_value() || !witness->contains("y")) {
      throw ValidationError("CEC bounds need a y witness");
    }
    report = check_cec(inst, witness->at("y").get<std::vector<double>>());
    break;
  }
  case Condition::SHC:
    report = check_shc(inst);
    break;
  }

  Json out;
  out["condition"] = condition_name(condition);
  out["satisfied"] = report.satisfied;
  if (!report.satisfied) {
    out["detail"] = report.detail;
    return out;
  }

  const ResamplingBound bound = resampling_bound(inst, report);
  out["resampling_bound_core"] = bound.core;
  out["resampling_bound_n_scaled"] = bound.n_scaled;
  out["path_estimate"] = path_estimate(graph, p, report);
  Json tails;
  for (const double t : {0.0, 1.0, 2.0}) {
    tails["t" + std::to_string(static_cast<int>(t))] =
        tail_bound_noslack(graph, p, report, t);
  }
  out["tail_noslack_T"] = std::move(tails);
  try {
    const SlackTail slack = tail_bound_slack(graph, p, 0.5, report, 1.0);
    out["tail_slack"] = Json{{"epsilon", slack.epsilon},
                             {"T", slack.threshold},
                             {"bound_at_r1", slack.bound}};
  } catch (const Error &) {
    out["tail_slack"] = nullptr; // inflated condition failed
  }
  return out;
}

Json run_report(const QsatInstance &inst, const RunOptions &options) {
  const auto start = std::chrono::steady_clock::now();
  SubspaceCache cache(inst);

  Json out;
  out["mode"] = options.mode;
  out["seed"] = options.seed;
  out["trials"] = options.trials;

  std::vector<TrialSummary> rows;
  rows.reserve(options.trials);

  if (options.mode == "boosted") {
    const ConditionReport shc = check_shc(inst);
    if (!shc.satisfied) {
      throw ValidationError("boosted mode requires SHC to hold");
    }
    out["delta"] = options.delta;
    out["epsilon"] = options.epsilon;
    long repetitions_total = 0;
    for (long trial = 0; trial < options.trials; ++trial) {
      Rng rng = Rng::for_trial(options.seed, trial);
      const BoostedRecord boosted =
          boosted_run(cache, shc, options.delta, options.epsilon, rng);
      repetitions_total += boosted.repetitions_used;
      TrialSummary row;
      row.trial = trial;
      row.terminal =
          boosted.success ? Terminal::Success : boosted.record.terminal;
      row.resamplings = boosted.record.resample_count;
      row.channel_applications = boosted.record.channel_applications;
      row.residual_energy = boosted.record.residual_energy;
      row.ground_overlap = boosted.record.ground_overlap;
      row.outcomes = boosted.record.log.outcomes;
      rows.push_back(std::move(row));
      if (trial == 0) {
        const SelectedParameters &sel = boosted.selection;
        out["selected_parameters"] =
            Json{{"theta", sel.params.theta},
                 {"beta", sel.beta},
                 {"t", sel.params.zeno_rounds},
                 {"tau", sel.params.tau},
                 {"max_resamplings", sel.params.max_resamplings},
                 {"repetitions", sel.repetitions},
                 {"final_tau", sel.final_tau},
                 {"R_core", sel.resampling_bound_core},
                 {"R_n_scaled", sel.resampling_bound_scaled}};
      }
    }
    out["mean_repetitions"] =
        static_cast<double>(repetitions_total) /
        static_cast<double>(options.trials);
  } else if (options.mode == "appendix-f-alt") {
    std::optional<ComplexMatrix> initial;
    if (options.initial_basis >= 0) {
      if (options.initial_basis >= inst.dim()) {
        throw ValidationError("initial basis index out of range");
      }
      ComplexMatrix rho = ComplexMatrix::Zero(inst.dim(), inst.dim());
      rho(options.initial_basis, options.initial_basis) = 1.0;
      initial = rho;
    }
    out["iterations"] = options.iterations;
    for (long trial = 0; trial < options.trials; ++trial) {
      Rng rng = Rng::for_trial(options.seed, trial);
      const AlternativeRunRecord record = alternative_algorithm_run(
          cache, options.iterations, rng,
          initial.has_value() ? &*initial : nullptr);
      TrialSummary row;
      row.trial = trial;
      row.terminal = record.terminal;
      row.resamplings = record.resample_count;
      row.channel_applications = record.iterations_used;
      row.residual_energy = record.residual_energy;
      row.ground_overlap = record.ground_overlap;
      rows.push_back(std::move(row));
    }
  } else {
    const std::optional<ChannelKind> kind =
        channel_kind_from_name(options.mode);
    if (!kind.has_value()) {
      throw ValidationError("unknown run mode: " + options.mode);
    }
    SolverParams params;
    params.kind = *kind;
    params.theta = options.theta;
    params.zeno_rounds = options.zeno_rounds;
    params.tau = options.tau;
    params.max_resamplings = options.max_resamplings;
    params.seed = options.seed;
    SolverEngine engine(cache, params);
    for (long trial = 0; trial < options.trials; ++trial) {
      const RunRecord record = engine.run_trial(trial);
      TrialSummary row;
      row.trial = trial;
      row.terminal = record.terminal;
      row.resamplings = record.resample_count;
      row.channel_applications = record.channel_applications;
      row.residual_energy = record.residual_energy;
      row.ground_overlap = record.ground_overlap;
      row.outcomes = record.log.outcomes;
      rows.push_back(std::move(row));
    }
  }

  Json trials = Json::array();
  for (const TrialSummary &row : rows) {
    trials.push_back(summary_to_json(row));
  }
  out["per_trial"] = std::move(trials);
  out["aggregate"] = aggregate_summaries(rows);
  const auto stop = std::chrono::steady_clock::now();
  out["wall_clock_seconds"] =
      std::chrono::duration<double>(stop - start).count();
  return out;
}

Json enumerate_report(const QsatInstance &inst,
                      const EnumerateOptions &options) {
  SubspaceCache cache(inst);
  const std::optional<ChannelKind> kind = channel_kind_from_name(options.mode);
  if (!kind.has_value()) {
    throw ValidationError("unknown enumerate mode: " + options.mode);
  }
  LogTreeParams params;
  params.kind = *kind;
  params.theta = options.theta;
  params.zeno_rounds = options.zeno_rounds;
  params.tau = options.tau;
  params.max_resamplings = options.max_resamplings;
  const LogTreeReport report = enumerate_log_tree(cache, params);

  Json out;
  out["mode"] = options.mode;
  out["max_resamplings"] = options.max_resamplings;
  out["nodes"] = report.nodes;
  out["rhosub_checks"] = report.rhosub_checks;
  out["rhosub_violations"] = report.rhosub_violations;
  out["worst_rhosub_residual"] = report.worst_rhosub_residual;
  out["lowerr_checks"] = report.lowerr_checks;
  out["lowerr_violations"] = report.lowerr_violations;
  out["max_error_excess"] = report.max_error_excess;
  out["expected_resamplings_truncated"] = report.expected_resamplings;
  out["frontier_mass"] = report.frontier_mass;
  out["success_mass"] = report.success_mass;
  out["error_mass"] = report.error_mass;
  out["pruned_mass"] = report.pruned_mass;
  out["ok"] = report.ok();
  return out;
}

Json commutativity_report(const QsatInstance &inst, const std::string &a,
                          const std::string &b, long rho_basis) {
  const int fa = inst.flaw_index(a);
  const int fb = inst.flaw_index(b);
  if (fa < 0 || fb < 0) {
    throw ValidationError("unknown flaw id in commutativity demo");
  }
  const Eigen::Index dim = inst.dim();
  const long basis = rho_basis < 0 ? dim - 1 : rho_basis;
  if (basis >= dim) {
    throw ValidationError("basis index out of range");
  }
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  rho(basis, basis) = 1.0;

  const auto composite = [&inst](const ComplexMatrix &state, int first,
                                 int second) {
    ComplexMatrix out = measure_all_flaws(state, inst);
    out = resample(out, inst, first);
    out = measure_all_flaws(out, inst);
    out = resample(out, inst, second);
    return measure_all_flaws(out, inst);
  };

  const ComplexMatrix ab = composite(rho, fa, fb);
  const ComplexMatrix ba = composite(rho, fb, fa);

  Json out;
  out["a"] = a;
  out["b"] = b;
  out["rho_basis"] = basis;
  out["trace_distance"] = trace_norm(ab - ba);
  return out;
}

std::string run_report_to_csv(const Json &report) {
  std::ostringstream out;
  out << "row_type,trial,terminal,resamplings,channel_applications,"
         "residual_energy,ground_overlap\n";
  for (const Json &row : report.at("per_trial")) {
    out << "trial," << row.at("trial").get<long>() << ","
        << row.at("terminal").get<std::string>() << ","
        << row.at("resamplings").get<long>() << ","
        << row.at("channel_applications").get<long>() << ","
        << row.at("residual_energy").get<double>() << ","
        << row.at("ground_overlap").get<double>() << "\n";
  }
  const Json &agg = report.at("aggregate");
  out << "aggregate,mean,," << agg.at("mean_resamplings").get<double>() << ","
      << agg.at("mean_channel_applications").get<double>() << ","
      << agg.at("mean_residual_energy").get<double>() << ","
      << agg.at("mean_ground_overlap").get<double>() << "\n";
  out << "aggregate,success_rate," << agg.at("success_rate").get<double>()
      << ",,,,\n";
  return out.str();
}

} // namespace qlll
