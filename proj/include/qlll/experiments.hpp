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

#ifndef QLLL_EXPERIMENTS_HPP
#define QLLL_EXPERIMENTS_HPP

#include <optional>
#include <string>

#include <json.hpp>

#include "qlll/solver.hpp"

namespace qlll {

using Json = nlohmann::ordered_json;

// Instance file schema:
// { "n": int, "flaws": [ { "id": str, "support": [int],
//                          "projector": [[[re, im], ...], ...] } ] }
Json instance_to_json(const QsatInstance &inst);
QsatInstance instance_from_json(const Json &doc);
QsatInstance instance_from_string(const std::string &text);
QsatInstance load_instance_file(const std::string &path);
void save_instance_file(const QsatInstance &inst, const std::string &path);

struct GeneratorOptions {
  int n = 4;
  int flaws = 2;
  int locality = 2;  // qubits per flaw
  int rank = 1;      // projector rank
  std::uint64_t seed = 1;
  double epsilon = 0.01; // appendix-f weight
};

// Kinds: random-local, random-commuting, chain, cycle, appendix-e,
// appendix-f.
QsatInstance generate_instance(const std::string &kind,
                               const GeneratorOptions &options);

// All four condition checkers plus the implication-chain cross-check.
Json check_report(const QsatInstance &inst,
                  const std::optional<Json> &witness = std::nullopt);

// Uniform gap and per-subset gaps (all subsets when the flaw count allows,
// or the single requested subset).
Json gap_report(const QsatInstance &inst,
                const std::optional<std::vector<std::string>> &subset_ids =
                    std::nullopt);

// Resampling bound, path estimate and tail thresholds for one condition.
Json bounds_report(const QsatInstance &inst, Condition condition,
                   const std::optional<Json> &witness = std::nullopt);

struct RunOptions {
  std::string mode = "projective"; // projective | exact | zeno-ideal |
                                   // zeno-implementable | boosted |
                                   // appendix-f-alt
  long trials = 1;
  std::uint64_t seed = 1;
  double theta = 0.05;
  long zeno_rounds = 0;
  long tau = 0;
  long max_resamplings = 1000;
  double delta = 0.1;    // boosted
  double epsilon = 0.1;  // boosted
  long iterations = 100; // appendix-f-alt
  long initial_basis = -1; // appendix-f-alt start state (-1: maximally mixed)
};

Json run_report(const QsatInstance &inst, const RunOptions &options);

struct EnumerateOptions {
  std::string mode = "exact";
  double theta = 0.05;
  long zeno_rounds = 0;
  long tau = 0;
  long max_resamplings = 4;
};

Json enumerate_report(const QsatInstance &inst,
                      const EnumerateOptions &options);

// Evaluates both orderings of resample-then-remeasure composites for flaws a
// and b on a basis state (default all-ones) and reports the trace distance.
Json commutativity_report(const QsatInstance &inst, const std::string &a,
                          const std::string &b, long rho_basis = -1);

// Flattens a run report into CSV (per-trial rows followed by aggregates).
std::string run_report_to_csv(const Json &report);

} // namespace qlll

#endif
