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

#include "qlll/qlll.h"

#include <cstring>
#include <new>
#include <string>

#include "qlll/experiments.hpp"

using qlll::Json;

struct qlll_instance {
  qlll::QsatInstance value;
};

namespace {

thread_local std::string g_last_error;

char *copy_string(const std::string &text) {
  char *out = new (std::nothrow) char[text.size() + 1];
  if (out != nullptr) {
    std::memcpy(out, text.c_str(), text.size() + 1);
  }
  return out;
}

qlll_status fail(qlll_status status, const std::string &message) {
  g_last_error = message;
  return status;
}

qlll_status run_guarded(char **out_json, const std::function<Json()> &body) {
  if (out_json == nullptr) {
    return fail(QLLL_ERROR_INVALID_ARGUMENT, "null output parameter");
  }
  *out_json = nullptr;
  try {
    const Json report = body();
    *out_json = copy_string(report.dump(2));
    if (*out_json == nullptr) {
      return fail(QLLL_ERROR_INTERNAL, "allocation failed");
    }
    return QLLL_OK;
  } catch (const qlll::SizeLimitError &err) {
    return fail(QLLL_ERROR_LIMIT, err.what());
  } catch (const qlll::NumericalError &err) {
    return fail(QLLL_ERROR_NUMERICAL, err.what());
  } catch (const qlll::PreconditionError &err) {
    return fail(QLLL_ERROR_VALIDATION, err.what());
  } catch (const qlll::DimensionError &err) {
    return fail(QLLL_ERROR_VALIDATION, err.what());
  } catch (const qlll::ValidationError &err) {
    return fail(QLLL_ERROR_VALIDATION, err.what());
  } catch (const nlohmann::json::exception &err) {
    return fail(QLLL_ERROR_PARSE, err.what());
  } catch (const std::exception &err) {
    return fail(QLLL_ERROR_INTERNAL, err.what());
  }
}

Json parse_or_empty(const char *text, const char *what) {
  if (text == nullptr || *text == '\0') {
    return Json::object();
  }
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error &err) {
    throw qlll::ValidationError(std::string(what) + ": " + err.what());
  }
}

} // namespace

extern "C" {

const char *qlll_version(void) { return "1.0.0"; }

const char *qlll_status_name(qlll_status status) {
  switch (status) {
  case QLLL_OK:
    return "ok";
  case QLLL_ERROR_INVALID_ARGUMENT:
    return "invalid argument";
  case QLLL_ERROR_PARSE:
    return "parse error";
  case QLLL_ERROR_VALIDATION:
    return "validation error";
  case QLLL_ERROR_LIMIT:
    return "size limit exceeded";
  case QLLL_ERROR_NUMERICAL:
    return "numerical error";
  case QLLL_ERROR_IO:
    return "io error";
  case QLLL_ERROR_INTERNAL:
    return "internal error";
  }
  return "unknown";
}

const char *qlll_last_error(void) { return g_last_error.c_str(); }

void qlll_string_free(char *text) { delete[] text; }

qlll_status qlll_instance_from_json(const char *json, qlll_instance **out) {
  if (json == nullptr || out == nullptr) {
    return fail(QLLL_ERROR_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  try {
    qlll::QsatInstance inst = qlll::instance_from_string(json);
    *out = new qlll_instance{std::move(inst)};
    return QLLL_OK;
  } catch (const qlll::SizeLimitError &err) {
    return fail(QLLL_ERROR_LIMIT, err.what());
  } catch (const qlll::ValidationError &err) {
    return fail(QLLL_ERROR_VALIDATION, err.what());
  } catch (const std::exception &err) {
    return fail(QLLL_ERROR_INTERNAL, err.what());
  }
}

qlll_status qlll_instance_load(const char *path, qlll_instance **out) {
  if (path == nullptr || out == nullptr) {
    return fail(QLLL_ERROR_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  try {
    qlll::QsatInstance inst = qlll::load_instance_file(path);
    *out = new qlll_instance{std::move(inst)};
    return QLLL_OK;
  } catch (const qlll::SizeLimitError &err) {
    return fail(QLLL_ERROR_LIMIT, err.what());
  } catch (const qlll::ValidationError &err) {
    return fail(QLLL_ERROR_VALIDATION, err.what());
  } catch (const std::exception &err) {
    return fail(QLLL_ERROR_INTERNAL, err.what());
  }
}

qlll_status qlll_instance_to_json(const qlll_instance *inst, char **out_json) {
  if (inst == nullptr) {
    return fail(QLLL_ERROR_INVALID_ARGUMENT, "null instance");
  }
  return run_guarded(out_json,
                     [&] { return qlll::instance_to_json(inst->value); });
}

void qlll_instance_free(qlll_instance *inst) { delete inst; }

int32_t qlll_instance_qubits(const qlll_instance *inst) {
  return inst == nullptr ? -1 : inst->value.qubit_count();
}

int32_t qlll_instance_flaws(const qlll_instance *inst) {
  return inst == nullptr ? -1 : inst->value.flaw_count();
}

qlll_status qlll_generate(const char *kind, const char *params_json,
                          char **out_instance_json) {
  if (kind == nullptr) {
    return fail(QLLL_ERROR_INVALID_ARGUMENT, "null generator kind");
  }
  return run_guarded(out_instance_json, [&] {
    const Json params = parse_or_empty(params_json, "generator params");
    qlll::GeneratorOptions options;
    options.n = params.value("n", options.n);
    options.flaws = params.value("flaws", options.flaws);
    options.locality = params.value("locality", options.locality);
    options.rank = params.value("rank", options.rank);
    options.seed = params.value("seed", options.seed);
    options.epsilon = params.value("epsilon", options.epsilon);
    return qlll::instance_to_json(qlll::generate_instance(kind, options));
  });
}

qlll_status qlll_check(const qlll_instance *inst, const char *witness_json,
                       char **out_report_json) {
  if (inst == nullptr) {
    return fail(QLLL_ERROR_INVALID_ARGUMENT, "null instance");
  }
  return run_guarded(out_report_json, [&] {
    std::optional<Json> witness;
    const Json parsed = parse_or_empty(witness_json, "witness");
    if (!parsed.empty()) {
      witness = parsed;
    }
    return qlll::check_report(inst->value, witness);
  });
}

qlll_status qlll_gap(const qlll_instance *inst, const char *subset_json,
                     char **out_report_json) {
  if (inst == nullptr) {
    return fail(QLLL_ERROR_INVALID_ARGUMENT, "null instance");
  }
  return run_guarded(out_report_json, [&] {
    std::optional<std::vector<std::string>> subset;
    const Json parsed = parse_or_empty(subset_json, "subset");
    if (parsed.contains("ids")) {
      subset = parsed.at("ids").get<std::vector<std::string>>();
    }
    return qlll::gap_report(inst->value, subset);
  });
}

qlll_status qlll_bounds(const qlll_instance *inst, const char *condition,
                        const char *witness_json, char **out_report_json) {
  if (inst == nullptr || condition == nullptr) {
    return fail(QLLL_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return run_guarded(out_report_json, [&] {
    const auto parsed_condition = qlll::condition_from_name(condition);
    if (!parsed_condition.has_value()) {
      throw qlll::ValidationError(std::string("unknown condition: ") +
                                  condition);
    }
    std::optional<Json> witness;
    const Json parsed = parse_or_empty(witness_json, "witness");
    if (!parsed.empty()) {
      witness = parsed;
    }
    return qlll::bounds_report(inst->value, *parsed_condition, witness);
  });
}

qlll_status qlll_run(const qlll_instance *inst, const char *options_json,
                     char **out_report_json) {
  if (inst == nullptr) {
    return fail(QLLL_ERROR_INVALID_ARGUMENT, "null instance");
  }
  return run_guarded(out_report_json, [&] {
    const Json params = parse_or_empty(options_json, "run options");
    qlll::RunOptions options;
    options.mode = params.value("mode", options.mode);
    options.trials = params.value("trials", options.trials);
    options.seed = params.value("seed", options.seed);
    options.theta = params.value("theta", options.theta);
    options.zeno_rounds = params.value("t", options.zeno_rounds);
    options.tau = params.value("tau", options.tau);
    options.max_resamplings =
        params.value("max_resamplings", options.max_resamplings);
    options.delta = params.value("delta", options.delta);
    options.epsilon = params.value("epsilon", options.epsilon);
    options.iterations = params.value("iterations", options.iterations);
    options.initial_basis = params.value("initial_basis", options.initial_basis);
    return qlll::run_report(inst->value, options);
  });
}

qlll_status qlll_enumerate(const qlll_instance *inst, const char *options_json,
                           char **out_report_json) {
  if (inst == nullptr) {
    return fail(QLLL_ERROR_INVALID_ARGUMENT, "null instance");
  }
  return run_guarded(out_report_json, [&] {
    const Json params = parse_or_empty(options_json, "enumerate options");
    qlll::EnumerateOptions options;
    options.mode = params.value("mode", options.mode);
    options.theta = params.value("theta", options.theta);
    options.zeno_rounds = params.value("t", options.zeno_rounds);
    options.tau = params.value("tau", options.tau);
    options.max_resamplings =
        params.value("max_resamplings", options.max_resamplings);
    return qlll::enumerate_report(inst->value, options);
  });
}

qlll_status qlll_commutativity_demo(const qlll_instance *inst,
                                    const char *options_json,
                                    char **out_report_json) {
  if (inst == nullptr) {
    return fail(QLLL_ERROR_INVALID_ARGUMENT, "null instance");
  }
  return run_guarded(out_report_json, [&] {
    const Json params = parse_or_empty(options_json, "commute options");
    if (!params.contains("a") || !params.contains("b")) {
      throw qlll::ValidationError("commutativity demo needs flaw ids a and b");
    }
    return qlll::commutativity_report(
        inst->value, params.at("a").get<std::string>(),
        params.at("b").get<std::string>(), params.value("rho_basis", -1L));
  });
}

} // extern "C"
