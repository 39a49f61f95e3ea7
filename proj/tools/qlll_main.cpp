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

// Command line driver. Talks to the core exclusively through the C API in
// qlll/qlll.h; reports pass through as JSON and are optionally flattened to
// CSV here.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qlll/qlll.h"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;   // condition failed / run failed
constexpr int kExitBadInput = 2; // parse or validation problem

struct StringGuard {
  char *value = nullptr;
  ~StringGuard() { qlll_string_free(value); }
};

struct InstanceGuard {
  qlll_instance *value = nullptr;
  ~InstanceGuard() { qlll_instance_free(value); }
};

int report_error(qlll_status status) {
  std::cerr << "error (" << qlll_status_name(status)
            << "): " << qlll_last_error() << "\n";
  return kExitBadInput;
}

int load_instance(const std::string &path, InstanceGuard &guard) {
  const qlll_status status = qlll_instance_load(path.c_str(), &guard.value);
  if (status != QLLL_OK) {
    return report_error(status);
  }
  return kExitOk;
}

std::string read_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open file: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool ends_with(const std::string &text, const std::string &suffix) {
  return text.size() >= suffix.size() &&
         text.compare(text.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Flatten a run report to CSV: per-trial rows followed by aggregate rows.
std::string run_report_csv(const Json &report) {
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

int write_output(const std::string &text, const std::string &out_path) {
  if (out_path.empty()) {
    std::cout << text << "\n";
    return kExitOk;
  }
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "error: cannot write " << out_path << "\n";
    return kExitBadInput;
  }
  out << text << "\n";
  return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Quantum Lovasz Local Lemma simulation laboratory"};
  app.require_subcommand(1);

  // --- check ---
  std::string check_path;
  std::string check_witness;
  auto *check = app.add_subcommand(
      "check", "Evaluate the SLC/GLC/CEC/SHC conditions for an instance");
  check->add_option("path", check_path, "instance JSON file")->required();
  check->add_option("--witness", check_witness,
                    "JSON file with {\"x\": [...]} and/or {\"y\": [...]}");

  // --- gap ---
  std::string gap_path;
  std::vector<std::string> gap_subset;
  auto *gap = app.add_subcommand("gap", "Uniform gap and per-subset gaps");
  gap->add_option("path", gap_path, "instance JSON file")->required();
  gap->add_option("--subset", gap_subset, "flaw ids of one subset");

  // --- bounds ---
  std::string bounds_path;
  std::string bounds_condition = "SHC";
  std::string bounds_witness;
  auto *bounds = app.add_subcommand(
      "bounds", "Resampling bound, path estimate and tail thresholds");
  bounds->add_option("path", bounds_path, "instance JSON file")->required();
  bounds->add_option("--condition", bounds_condition, "SLC|GLC|CEC|SHC");
  bounds->add_option("--witness", bounds_witness, "JSON witness file");

  // --- run ---
  std::string run_path;
  std::string run_mode = "projective";
  long run_trials = 1;
  std::uint64_t run_seed = 1;
  double run_theta = 0.05;
  long run_t = 0;
  long run_tau = 0;
  long run_max_resamples = 1000;
  double run_delta = 0.1;
  double run_epsilon = 0.1;
  long run_iterations = 100;
  long run_initial_basis = -1;
  std::string run_out;
  auto *run = app.add_subcommand("run", "Monte Carlo solver trials");
  run->add_option("path", run_path, "instance JSON file")->required();
  run->add_option("--mode", run_mode,
                  "projective|exact|zeno-ideal|zeno-implementable|boosted|"
                  "appendix-f-alt");
  run->add_option("--trials", run_trials, "number of trials");
  run->add_option("--seed", run_seed, "base RNG seed");
  run->add_option("--theta", run_theta, "weak measurement intensity");
  run->add_option("--t", run_t, "zeno rounds (0: formula)");
  run->add_option("--tau", run_tau, "projection length (0: formula)");
  run->add_option("--max-resamples", run_max_resamples, "resampling budget");
  run->add_option("--delta", run_delta, "boosted: target trace distance");
  run->add_option("--epsilon", run_epsilon, "boosted: failure probability");
  run->add_option("--iterations", run_iterations,
                  "appendix-f-alt: loop iterations");
  run->add_option("--initial-basis", run_initial_basis,
                  "appendix-f-alt: initial basis state index");
  run->add_option("--out", run_out, "write report to file (.json or .csv)");

  // --- enumerate ---
  std::string enum_path;
  std::string enum_mode = "exact";
  double enum_theta = 0.05;
  long enum_t = 0;
  long enum_tau = 0;
  long enum_max_resamples = 4;
  auto *enumerate = app.add_subcommand(
      "enumerate", "Exhaustive log-tree domination check");
  enumerate->add_option("path", enum_path, "instance JSON file")->required();
  enumerate->add_option("--mode", enum_mode,
                        "projective|exact|zeno-ideal|zeno-implementable");
  enumerate->add_option("--theta", enum_theta, "weak measurement intensity");
  enumerate->add_option("--t", enum_t, "zeno rounds (0: formula)");
  enumerate->add_option("--tau", enum_tau, "projection length");
  enumerate->add_option("--max-resamples", enum_max_resamples,
                        "resampling budget");

  // --- gen ---
  std::string gen_kind;
  int gen_n = 4;
  int gen_flaws = 2;
  int gen_locality = 2;
  int gen_rank = 1;
  std::uint64_t gen_seed = 1;
  double gen_epsilon = 0.01;
  std::string gen_out;
  auto *gen = app.add_subcommand("gen", "Generate an instance file");
  gen->add_option("kind", gen_kind,
                  "random-local|random-commuting|chain|cycle|appendix-e|"
                  "appendix-f")
      ->required();
  gen->add_option("--n", gen_n, "qubit count");
  gen->add_option("--flaws", gen_flaws, "flaw count");
  gen->add_option("--k", gen_locality, "qubits per flaw");
  gen->add_option("--rank", gen_rank, "projector rank");
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--epsilon", gen_epsilon, "appendix-f epsilon");
  gen->add_option("--out", gen_out, "output path (default stdout)");

  // --- commute ---
  std::string commute_path;
  std::string commute_a;
  std::string commute_b;
  long commute_basis = -1;
  auto *commute = app.add_subcommand(
      "commute", "Trace distance between the two resampling orderings");
  commute->add_option("path", commute_path, "instance JSON file")->required();
  commute->add_option("--a", commute_a, "first flaw id")->required();
  commute->add_option("--b", commute_b, "second flaw id")->required();
  commute->add_option("--rho-basis", commute_basis,
                      "initial basis state (default all ones)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) {
      InstanceGuard inst;
      if (int rc = load_instance(check_path, inst)) return rc;
      std::string witness;
      if (!check_witness.empty()) {
        witness = read_file(check_witness);
      }
      StringGuard report;
      const qlll_status status = qlll_check(
          inst.value, witness.empty() ? nullptr : witness.c_str(),
          &report.value);
      if (status != QLLL_OK) return report_error(status);
      std::cout << report.value << "\n";
      const Json doc = Json::parse(report.value);
      return doc.at("satisfied").get<bool>() ? kExitOk : kExitFailed;
    }

    if (gap->parsed()) {
      InstanceGuard inst;
      if (int rc = load_instance(gap_path, inst)) return rc;
      std::string subset;
      if (!gap_subset.empty()) {
        subset = Json{{"ids", gap_subset}}.dump();
      }
      StringGuard report;
      const qlll_status status = qlll_gap(
          inst.value, subset.empty() ? nullptr : subset.c_str(), &report.value);
      if (status != QLLL_OK) return report_error(status);
      std::cout << report.value << "\n";
      return kExitOk;
    }

    if (bounds->parsed()) {
      InstanceGuard inst;
      if (int rc = load_instance(bounds_path, inst)) return rc;
      std::string witness;
      if (!bounds_witness.empty()) {
        witness = read_file(bounds_witness);
      }
      StringGuard report;
      const qlll_status status = qlll_bounds(
          inst.value, bounds_condition.c_str(),
          witness.empty() ? nullptr : witness.c_str(), &report.value);
      if (status != QLLL_OK) return report_error(status);
      std::cout << report.value << "\n";
      const Json doc = Json::parse(report.value);
      return doc.at("satisfied").get<bool>() ? kExitOk : kExitFailed;
    }

    if (run->parsed()) {
      InstanceGuard inst;
      if (int rc = load_instance(run_path, inst)) return rc;
      const Json options{{"mode", run_mode},
                         {"trials", run_trials},
                         {"seed", run_seed},
                         {"theta", run_theta},
                         {"t", run_t},
                         {"tau", run_tau},
                         {"max_resamplings", run_max_resamples},
                         {"delta", run_delta},
                         {"epsilon", run_epsilon},
                         {"iterations", run_iterations},
                         {"initial_basis", run_initial_basis}};
      StringGuard report;
      const qlll_status status =
          qlll_run(inst.value, options.dump().c_str(), &report.value);
      if (status != QLLL_OK) return report_error(status);
      const Json doc = Json::parse(report.value);
      int rc;
      if (ends_with(run_out, ".csv")) {
        rc = write_output(run_report_csv(doc), run_out);
      } else {
        rc = write_output(doc.dump(2), run_out);
      }
      if (rc != kExitOk) return rc;
      const double success_rate =
          doc.at("aggregate").at("success_rate").get<double>();
      return success_rate > 0.0 ? kExitOk : kExitFailed;
    }

    if (enumerate->parsed()) {
      InstanceGuard inst;
      if (int rc = load_instance(enum_path, inst)) return rc;
      const Json options{{"mode", enum_mode},
                         {"theta", enum_theta},
                         {"t", enum_t},
                         {"tau", enum_tau},
                         {"max_resamplings", enum_max_resamples}};
      StringGuard report;
      const qlll_status status =
          qlll_enumerate(inst.value, options.dump().c_str(), &report.value);
      if (status != QLLL_OK) return report_error(status);
      std::cout << report.value << "\n";
      const Json doc = Json::parse(report.value);
      return doc.at("ok").get<bool>() ? kExitOk : kExitFailed;
    }

    if (gen->parsed()) {
      const Json params{{"n", gen_n},          {"flaws", gen_flaws},
                        {"locality", gen_locality}, {"rank", gen_rank},
                        {"seed", gen_seed},    {"epsilon", gen_epsilon}};
      StringGuard instance_json;
      const qlll_status status = qlll_generate(
          gen_kind.c_str(), params.dump().c_str(), &instance_json.value);
      if (status != QLLL_OK) return report_error(status);
      return write_output(std::string(instance_json.value), gen_out);
    }

    if (commute->parsed()) {
      InstanceGuard inst;
      if (int rc = load_instance(commute_path, inst)) return rc;
      const Json options{
          {"a", commute_a}, {"b", commute_b}, {"rho_basis", commute_basis}};
      StringGuard report;
      const qlll_status status = qlll_commutativity_demo(
          inst.value, options.dump().c_str(), &report.value);
      if (status != QLLL_OK) return report_error(status);
      std::cout << report.value << "\n";
      return kExitOk;
    }
  } catch (const std::exception &err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadInput;
}
