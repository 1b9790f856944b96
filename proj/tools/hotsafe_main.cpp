/*
 * Copyright 2026 the hotsafe authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end. Links only the C API.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hotsafe.h"

namespace {

int fail_usage(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return 1;
}

bool write_out(const std::string& path, const char* data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return false;
  out << data;
  return static_cast<bool>(out);
}

std::string slurp(const std::string& path, bool& ok) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ok = false;
    return {};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  ok = true;
  return ss.str();
}

int cmd_run(const std::string& scenario_path, const std::string& trace_path,
            const std::string& report_path, bool seed_given, uint64_t seed) {
  char err[512] = {0};
  hsf_scenario* sc = nullptr;
  if (hsf_scenario_load(scenario_path.c_str(), &sc, err, sizeof err) != HSF_OK)
    return fail_usage(err);
  if (seed_given) hsf_scenario_set_seed(sc, seed);

  hsf_run* run = nullptr;
  if (hsf_scenario_run(sc, &run, err, sizeof err) != HSF_OK) {
    hsf_scenario_free(sc);
    return fail_usage(err);
  }
  bool io_ok = true;
  if (!trace_path.empty() && !write_out(trace_path, hsf_run_trace(run)))
    io_ok = false;
  if (!report_path.empty() && !write_out(report_path, hsf_run_report(run)))
    io_ok = false;

  const hsf_verdict v = hsf_run_verdict(run);
  const char* name = v == HSF_VERDICT_SAFE                ? "safe"
                     : v == HSF_VERDICT_CONFLICTING_COMMITS ? "conflicting_commits"
                     : v == HSF_VERDICT_INJECTIVITY_FAILURE ? "injectivity_failure"
                                                            : "rule_violation";
  std::cout << "verdict=" << name << "\n";
  hsf_run_free(run);
  hsf_scenario_free(sc);
  if (!io_ok) return fail_usage("cannot write output file");
  return static_cast<int>(v);
}

int cmd_verify_commit(const std::string& cert_path,
                      const std::string& config_path) {
  bool ok = true;
  const std::string cert = slurp(cert_path, ok);
  if (!ok) return fail_usage("cannot read certificate: " + cert_path);
  const std::string config = slurp(config_path, ok);
  if (!ok) return fail_usage("cannot read config: " + config_path);

  char id_hex[65] = {0};
  char err[512] = {0};
  const hsf_status st = hsf_verify_commit(cert.c_str(), config.c_str(), id_hex,
                                          sizeof id_hex, err, sizeof err);
  switch (st) {
    case HSF_OK:
      std::cout << id_hex << "\n";
      return 0;
    case HSF_ERR_INVALID:
      std::cerr << err << "\n";
      return 2;
    default:
      return fail_usage(err[0] ? err : "verification failed");
  }
}

int cmd_check_bft(uint32_t n, uint64_t f, const std::vector<uint64_t>& powers,
                  bool byz_power_given, uint64_t byz_power) {
  char report[1024] = {0};
  hsf_status st;
  if (!powers.empty() || byz_power_given) {
    if (powers.empty())
      return fail_usage("--byz-power requires --powers");
    st = hsf_check_bft(n, f, powers.data(), powers.size(), byz_power, report,
                       sizeof report);
  } else {
    st = hsf_check_bft(n, f, nullptr, 0, 0, report, sizeof report);
  }
  switch (st) {
    case HSF_OK:
      std::cout << report << "\n";
      return 0;
    case HSF_ERR_INVALID:
      std::cout << report << "\n";
      return 2;
    default:
      return fail_usage(report[0] ? report : "check failed");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hotsafe: consensus safety kernel"};
  app.require_subcommand(1);

  // run
  std::string scenario_path, trace_path, report_path;
  uint64_t seed_override = 0;
  auto* run = app.add_subcommand("run", "simulate a scenario and audit it");
  run->add_option("--scenario", scenario_path, "scenario file")->required();
  run->add_option("--trace", trace_path, "trace output file")->required();
  run->add_option("--report", report_path, "audit report output file")
      ->required();
  auto* seed_opt = run->add_option("--seed", seed_override, "seed override");

  // verify-commit
  std::string cert_path, config_path;
  auto* verify =
      app.add_subcommand("verify-commit", "verify a commit certificate");
  verify->add_option("--cert", cert_path, "certificate file")->required();
  verify->add_option("--config", config_path, "epoch config file")->required();

  // check-bft
  uint32_t n = 0;
  uint64_t f = 0;
  uint64_t byz_power = 0;
  std::vector<uint64_t> powers;
  auto* check = app.add_subcommand(
      "check-bft", "exhaustively check the quorum intersection assumption");
  check->add_option("--n", n, "number of members")->required();
  check->add_option("--f", f, "byzantine member budget (count model)");
  check->add_option("--powers", powers, "per-member voting power (weighted)")
      ->delimiter(',');
  auto* bp_opt =
      check->add_option("--byz-power", byz_power, "byzantine power budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints its own message
    return code == 0 ? 0 : 1;
  }

  if (run->parsed())
    return cmd_run(scenario_path, trace_path, report_path,
                   seed_opt->count() > 0, seed_override);
  if (verify->parsed()) return cmd_verify_commit(cert_path, config_path);
  if (check->parsed())
    return cmd_check_bft(n, f, powers, bp_opt->count() > 0, byz_power);
  return fail_usage("no subcommand");
}
