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
#include <sstream>

#include "qlll/experiments.hpp"
#include "test_helpers.hpp"

using namespace qlll;
using namespace qlll::testing;

TEST_CASE("instance JSON round-trip is byte stable") {
  const QsatInstance inst = generate_instance(
      "random-local", {.n = 3, .flaws = 3, .locality = 2, .rank = 1, .seed = 7});
  const std::string first = instance_to_json(inst).dump(2);
  const QsatInstance reloaded = instance_from_string(first);
  const std::string second = instance_to_json(reloaded).dump(2);
  CHECK(first == second);
}

TEST_CASE("instance parsing rejects malformed documents") {
  CHECK_THROWS_AS(instance_from_string("{"), ValidationError);
  CHECK_THROWS_AS(instance_from_string("{\"n\": 2}"), ValidationError);
  CHECK_THROWS_AS(
      instance_from_string(
          R"({"n":1,"flaws":[{"id":"x","support":[0],"projector":[[[0.5,0],[0,0]],[[0,0],[0,0]]]}]})"),
      ValidationError); // not idempotent
  CHECK_THROWS_AS(
      instance_from_string(
          R"({"n":1,"flaws":[{"id":"x","support":[0],"projector":[[[1,0]],[[0,0]]]}]})"),
      ValidationError); // ragged rows
}

TEST_CASE("appendix fixtures") {
  const QsatInstance e = generate_instance("appendix-e", {});
  CHECK(e.qubit_count() == 4);
  CHECK(e.flaw_count() == 3);
  CHECK(e.commuting());
  const Flaw &c = e.flaw(2);
  CHECK(c.support == std::vector<int>{1, 2});
  // 3/5 |00> + 4/5 |11>.
  CHECK(c.local_projector(0, 0).real() == doctest::Approx(0.36));
  CHECK(c.local_projector(3, 3).real() == doctest::Approx(0.64));
  CHECK(c.local_projector(0, 3).real() == doctest::Approx(0.48));

  const QsatInstance f = generate_instance("appendix-f", {.epsilon = 0.01});
  CHECK(f.qubit_count() == 2);
  CHECK_FALSE(f.commuting());
  CHECK(f.flaw(0).local_projector.trace().real() == doctest::Approx(1.0));
  CHECK(flaw_probability(f.flaw(0)) == doctest::Approx(0.25));
  CHECK(flaw_probability(f.flaw(1)) == doctest::Approx(0.5));
}

TEST_CASE("generated random instances validate on reload") {
  for (const std::string kind :
       {"random-local", "random-commuting", "chain", "cycle"}) {
    const QsatInstance inst = generate_instance(
        kind, {.n = 4, .flaws = 3, .locality = 2, .rank = 1, .seed = 11});
    const QsatInstance reloaded =
        instance_from_string(instance_to_json(inst).dump());
    CHECK(reloaded.flaw_count() == inst.flaw_count());
    if (kind == "random-commuting") {
      CHECK(reloaded.commuting());
    }
  }
  CHECK_THROWS_AS(generate_instance("bogus", {}), ValidationError);
}

TEST_CASE("check report") {
  // Single flaw with p = 1/4: all four conditions hold (CEC with y = 1/2).
  std::vector<Flaw> flaws;
  flaws.push_back({"f", {0, 1}, tensor(projector_one(), projector_one())});
  const QsatInstance single(2, std::move(flaws));
  const Json witness{{"y", {0.5}}};
  const Json report = check_report(single, witness);
  CHECK(report.at("satisfied").get<bool>());
  CHECK(report.at("conditions").at("SLC").at("satisfied").get<bool>());
  CHECK(report.at("conditions").at("GLC").at("satisfied").get<bool>());
  CHECK(report.at("conditions").at("CEC").at("satisfied").get<bool>());
  CHECK(report.at("conditions").at("SHC").at("satisfied").get<bool>());
  CHECK(report.at("implication_chain_ok").get<bool>());

  // Two adjacent p = 1/2 flaws sit exactly on the Shearer boundary.
  const QsatInstance boundary = two_adjacent_half_instance();
  const Json failed = check_report(boundary);
  CHECK_FALSE(failed.at("satisfied").get<bool>());
  CHECK_FALSE(failed.at("conditions").at("SHC").at("satisfied").get<bool>());

  // The appendix-e fixture passes Shearer.
  const Json appendix = check_report(generate_instance("appendix-e", {}));
  CHECK(appendix.at("conditions").contains("SHC"));
}

TEST_CASE("gap report") {
  const Json commuting_gap = gap_report(two_adjacent_quarter_instance());
  CHECK(commuting_gap.at("uniform_gap").get<double>() == doctest::Approx(1.0));

  const Json crowded = gap_report(two_adjacent_half_instance());
  CHECK(crowded.at("uniform_gap").get<double>() ==
        doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)));

  // An explicitly empty subset has an infinite gap.
  const Json empty_subset = gap_report(two_adjacent_half_instance(),
                                       std::vector<std::string>{});
  CHECK(empty_subset.at("gamma").is_string());
  CHECK(empty_subset.at("gamma").get<std::string>() == "infinity");

  const Json one_subset = gap_report(two_adjacent_half_instance(),
                                     std::vector<std::string>{"a"});
  CHECK(one_subset.at("gamma").get<double>() == doctest::Approx(1.0));
}

TEST_CASE("bounds report") {
  std::vector<Flaw> flaws;
  flaws.push_back({"f", {0, 1}, tensor(projector_one(), projector_one())});
  const QsatInstance single(2, std::move(flaws));
  const Json report = bounds_report(single, Condition::SHC);
  CHECK(report.at("satisfied").get<bool>());
  const double expected = 1.0 + 4.0 / 3.0 * (1.0 + std::log(4.0 / 3.0));
  CHECK(report.at("resampling_bound_core").get<double>() ==
        doctest::Approx(expected).epsilon(1e-9));
  CHECK(report.at("path_estimate").get<double>() ==
        doctest::Approx(4.0 / 3.0));

  // A failed condition reports unsatisfied instead of numbers.
  const Json failed = bounds_report(two_adjacent_half_instance(), Condition::SLC);
  CHECK_FALSE(failed.at("satisfied").get<bool>());
}

TEST_CASE("run report aggregates and determinism") {
  const QsatInstance inst = two_adjacent_quarter_instance();
  RunOptions options;
  options.mode = "projective";
  options.trials = 40;
  options.seed = 5;
  options.max_resamplings = 200;

  const Json a = run_report(inst, options);
  const Json b = run_report(inst, options);
  CHECK(a.at("per_trial").dump() == b.at("per_trial").dump());
  CHECK(a.at("aggregate").dump() == b.at("aggregate").dump());

  // Aggregates recompute from the per-trial rows.
  double mean = 0.0;
  for (const Json &row : a.at("per_trial")) {
    mean += row.at("resamplings").get<double>();
  }
  mean /= static_cast<double>(a.at("per_trial").size());
  CHECK(a.at("aggregate").at("mean_resamplings").get<double>() ==
        doctest::Approx(mean).epsilon(1e-12));
  CHECK(a.at("aggregate").at("success_rate").get<double>() ==
        doctest::Approx(1.0));

  // CSV flattening carries the same aggregates.
  const std::string csv = run_report_to_csv(a);
  std::stringstream stream(csv);
  std::string line;
  double csv_mean = -1.0;
  long rows = 0;
  double csv_sum = 0.0;
  while (std::getline(stream, line)) {
    if (line.rfind("trial,", 0) == 0) {
      ++rows;
      // resamplings is the fourth column
      std::size_t pos = 0;
      for (int i = 0; i < 3; ++i) {
        pos = line.find(',', pos) + 1;
      }
      csv_sum += std::stod(line.substr(pos, line.find(',', pos) - pos));
    }
    if (line.rfind("aggregate,mean,", 0) == 0) {
      const std::size_t pos = line.find(",,") + 2;
      csv_mean = std::stod(line.substr(pos, line.find(',', pos) - pos));
    }
  }
  CHECK(rows == 40);
  CHECK(csv_mean == doctest::Approx(csv_sum / rows).epsilon(1e-9));
}

TEST_CASE("enumerate report") {
  const QsatInstance inst = generate_instance("appendix-f", {.epsilon = 0.05});
  EnumerateOptions options;
  options.mode = "exact";
  options.max_resamplings = 3;
  const Json report = enumerate_report(inst, options);
  CHECK(report.at("ok").get<bool>());
  CHECK(report.at("rhosub_violations").get<long>() == 0);
  CHECK(report.at("nodes").get<long>() > 1);
}

TEST_CASE("commutativity demo") {
  const QsatInstance e = generate_instance("appendix-e", {});
  const Json crossed = commutativity_report(e, "a", "b");
  CHECK(crossed.at("trace_distance").get<double>() > 0.01);

  const Json same = commutativity_report(e, "a", "a");
  CHECK(same.at("trace_distance").get<double>() <= 1e-9);

  // Disjoint commuting control.
  std::vector<Flaw> flaws;
  flaws.push_back({"a", {0}, projector_one()});
  flaws.push_back({"b", {1}, projector_one()});
  const QsatInstance disjoint(2, std::move(flaws));
  const Json control = commutativity_report(disjoint, "a", "b");
  CHECK(control.at("trace_distance").get<double>() <= 1e-9);
}

TEST_CASE("boosted and alternative modes through the report surface") {
  const QsatInstance f = generate_instance("appendix-f", {.epsilon = 0.01});
  RunOptions boosted;
  boosted.mode = "boosted";
  boosted.trials = 3;
  boosted.seed = 8;
  boosted.delta = 0.2;
  boosted.epsilon = 0.2;
  const Json report = run_report(f, boosted);
  CHECK(report.contains("selected_parameters"));
  CHECK(report.at("aggregate").at("success_rate").get<double>() > 0.0);

  const QsatInstance sharp =
      generate_instance("appendix-f", {.epsilon = 0.001});
  RunOptions alt;
  alt.mode = "appendix-f-alt";
  alt.trials = 5;
  alt.seed = 9;
  alt.iterations = 100;
  alt.initial_basis = 0;
  const Json alt_report = run_report(sharp, alt);
  CHECK(alt_report.at("aggregate").at("mean_ground_overlap").get<double>() <
        0.05);
}
