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

#include <json.hpp>
#include <string>

#include "qlll/qlll.h"

namespace {

using Json = nlohmann::json;

struct StringGuard {
  char *value = nullptr;
  ~StringGuard() { qlll_string_free(value); }
};

struct InstanceGuard {
  qlll_instance *value = nullptr;
  ~InstanceGuard() { qlll_instance_free(value); }
};

} // namespace

TEST_CASE("C API lifecycle and basic calls") {
  CHECK(std::string(qlll_version()) == "1.0.0");

  StringGuard generated;
  REQUIRE(qlll_generate("appendix-e", nullptr, &generated.value) == QLLL_OK);

  InstanceGuard inst;
  REQUIRE(qlll_instance_from_json(generated.value, &inst.value) == QLLL_OK);
  CHECK(qlll_instance_qubits(inst.value) == 4);
  CHECK(qlll_instance_flaws(inst.value) == 3);

  StringGuard round_trip;
  REQUIRE(qlll_instance_to_json(inst.value, &round_trip.value) == QLLL_OK);
  CHECK(Json::parse(round_trip.value) == Json::parse(generated.value));

  StringGuard check;
  REQUIRE(qlll_check(inst.value, nullptr, &check.value) == QLLL_OK);
  const Json check_doc = Json::parse(check.value);
  CHECK(check_doc.at("conditions").contains("SHC"));

  StringGuard gap;
  REQUIRE(qlll_gap(inst.value, nullptr, &gap.value) == QLLL_OK);
  CHECK(Json::parse(gap.value).contains("uniform_gap"));

  // The appendix-e probabilities sit exactly on the Shearer boundary
  // (q_empty = 0), so the bounds report flags the condition as unsatisfied.
  StringGuard bounds;
  REQUIRE(qlll_bounds(inst.value, "SHC", nullptr, &bounds.value) == QLLL_OK);
  CHECK_FALSE(Json::parse(bounds.value).at("satisfied").get<bool>());

  StringGuard f_generated;
  REQUIRE(qlll_generate("appendix-f", R"({"epsilon":0.01})",
                        &f_generated.value) == QLLL_OK);
  InstanceGuard f_inst;
  REQUIRE(qlll_instance_from_json(f_generated.value, &f_inst.value) ==
          QLLL_OK);
  StringGuard f_bounds;
  REQUIRE(qlll_bounds(f_inst.value, "SHC", nullptr, &f_bounds.value) ==
          QLLL_OK);
  const Json f_doc = Json::parse(f_bounds.value);
  CHECK(f_doc.at("satisfied").get<bool>());
  CHECK(f_doc.at("resampling_bound_core").get<double>() > 1.0);

  StringGuard run;
  const std::string run_options =
      R"({"mode":"projective","trials":5,"seed":3,"max_resamplings":200})";
  REQUIRE(qlll_run(inst.value, run_options.c_str(), &run.value) == QLLL_OK);
  CHECK(Json::parse(run.value).at("aggregate").at("success_rate").get<double>() ==
        doctest::Approx(1.0));

  StringGuard commute;
  REQUIRE(qlll_commutativity_demo(inst.value, R"({"a":"a","b":"b"})",
                                  &commute.value) == QLLL_OK);
  CHECK(Json::parse(commute.value).at("trace_distance").get<double>() > 0.01);
}

TEST_CASE("C API enumerate") {
  StringGuard generated;
  REQUIRE(qlll_generate("appendix-f", R"({"epsilon":0.05})",
                        &generated.value) == QLLL_OK);
  InstanceGuard inst;
  REQUIRE(qlll_instance_from_json(generated.value, &inst.value) == QLLL_OK);

  StringGuard report;
  REQUIRE(qlll_enumerate(inst.value,
                         R"({"mode":"exact","max_resamplings":3})",
                         &report.value) == QLLL_OK);
  CHECK(Json::parse(report.value).at("ok").get<bool>());
}

TEST_CASE("C API error handling") {
  CHECK(qlll_instance_from_json(nullptr, nullptr) ==
        QLLL_ERROR_INVALID_ARGUMENT);

  qlll_instance *inst = nullptr;
  CHECK(qlll_instance_from_json("{ not json", &inst) ==
        QLLL_ERROR_VALIDATION);
  CHECK(inst == nullptr);
  CHECK(std::string(qlll_last_error()).size() > 0);

  CHECK(qlll_instance_load("/nonexistent/file.json", &inst) ==
        QLLL_ERROR_VALIDATION);

  StringGuard generated;
  REQUIRE(qlll_generate("appendix-e", nullptr, &generated.value) == QLLL_OK);
  InstanceGuard good;
  REQUIRE(qlll_instance_from_json(generated.value, &good.value) == QLLL_OK);

  StringGuard out;
  CHECK(qlll_bounds(good.value, "XYZ", nullptr, &out.value) ==
        QLLL_ERROR_VALIDATION);
  CHECK(qlll_generate("no-such-kind", nullptr, &out.value) ==
        QLLL_ERROR_VALIDATION);
  CHECK(qlll_commutativity_demo(good.value, R"({"a":"zzz","b":"b"})",
                                &out.value) == QLLL_ERROR_VALIDATION);
  CHECK(std::string(qlll_status_name(QLLL_ERROR_VALIDATION)) ==
        "validation error");

  qlll_string_free(nullptr); // must be a no-op
}
