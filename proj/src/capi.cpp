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

#include "hotsafe.h"

#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "hotsafe/audit.hpp"
#include "hotsafe/scenario.hpp"
#include "hotsafe/sim.hpp"

using namespace hotsafe;

struct hsf_scenario {
  scenario sc;
};

struct hsf_run {
  run_result result;
};

namespace {

void put_str(char* dst, size_t cap, const std::string& s) {
  if (!dst || cap == 0) return;
  const size_t n = std::min(cap - 1, s.size());
  std::memcpy(dst, s.data(), n);
  dst[n] = '\0';
}

}  // namespace

extern "C" {

const char* hsf_version(void) { return "0.1.0"; }

hsf_status hsf_scenario_parse(const char* text, hsf_scenario** out, char* err,
                              size_t errcap) {
  if (!text || !out) return HSF_ERR_ARG;
  auto sc = parse_scenario(text);
  if (!sc) {
    put_str(err, errcap, sc.error());
    return HSF_ERR_PARSE;
  }
  *out = new (std::nothrow) hsf_scenario{std::move(sc).value()};
  return *out ? HSF_OK : HSF_ERR_ARG;
}

hsf_status hsf_scenario_load(const char* path, hsf_scenario** out, char* err,
                             size_t errcap) {
  if (!path || !out) return HSF_ERR_ARG;
  std::string text;
  auto rd = read_file(path, text);
  if (!rd) {
    put_str(err, errcap, rd.error());
    return HSF_ERR_PARSE;
  }
  return hsf_scenario_parse(text.c_str(), out, err, errcap);
}

void hsf_scenario_set_seed(hsf_scenario* sc, uint64_t seed) {
  if (sc) sc->sc.seed = seed;
}

void hsf_scenario_free(hsf_scenario* sc) { delete sc; }

hsf_status hsf_scenario_run(const hsf_scenario* sc, hsf_run** out, char* err,
                            size_t errcap) {
  if (!sc || !out) return HSF_ERR_ARG;
  try {
    auto r = run_scenario(sc->sc);
    *out = new hsf_run{std::move(r)};
    return HSF_OK;
  } catch (const std::exception& e) {
    put_str(err, errcap, e.what());
    return HSF_ERR_INVALID;
  }
}

hsf_verdict hsf_run_verdict(const hsf_run* r) {
  switch (r->result.verdict.k) {
    case audit_verdict::kind::safe: return HSF_VERDICT_SAFE;
    case audit_verdict::kind::conflicting_commits:
      return HSF_VERDICT_CONFLICTING_COMMITS;
    case audit_verdict::kind::injectivity_failure:
      return HSF_VERDICT_INJECTIVITY_FAILURE;
    case audit_verdict::kind::rule_violation:
      return HSF_VERDICT_RULE_VIOLATION;
  }
  return HSF_VERDICT_SAFE;
}

const char* hsf_run_trace(const hsf_run* r) { return r->result.trace.c_str(); }

const char* hsf_run_report(const hsf_run* r) {
  return r->result.report.c_str();
}

void hsf_run_free(hsf_run* r) { delete r; }

hsf_status hsf_verify_commit(const char* cert_text, const char* config_text,
                             char* id_hex, size_t idcap, char* err,
                             size_t errcap) {
  if (!cert_text || !config_text) return HSF_ERR_ARG;
  auto settings = parse_epoch_settings(config_text);
  if (!settings) {
    put_str(err, errcap, settings.error());
    return HSF_ERR_PARSE;
  }
  auto cert = parse_certificate(cert_text);
  if (!cert) {
    put_str(err, errcap, cert.error());
    return HSF_ERR_PARSE;
  }
  // No message log is available to a non-participant; vote authenticity is
  // assumed checked out of band (the signature layer this model abstracts).
  auto verdict =
      verify_commit_certificate(cert.value(), settings.value().cfg,
                                settings.value().mode, accept_all_votes());
  if (!verdict) {
    put_str(err, errcap, verdict.error().name());
    return HSF_ERR_INVALID;
  }
  put_str(id_hex, idcap, verdict.value().hex());
  return HSF_OK;
}

hsf_status hsf_check_bft(uint32_t n, uint64_t f, const uint64_t* powers,
                         size_t npowers, uint64_t byz_power, char* report,
                         size_t repcap) {
  result<epoch_config, std::string> cfg = std::string("unset");
  if (powers) {
    std::vector<uint64_t> pw(powers, powers + npowers);
    if (npowers != n) {
      put_str(report, repcap, "powers list length must equal n");
      return HSF_ERR_PARSE;
    }
    cfg = epoch_config::make_weighted(0, std::move(pw), byz_power);
  } else {
    cfg = epoch_config::make_count(0, n, f);
  }
  if (!cfg) {
    put_str(report, repcap, cfg.error());
    return HSF_ERR_PARSE;
  }
  auto rep = check_bft_assumption(cfg.value());
  switch (rep.st) {
    case bft_check_report::status::ok:
      put_str(report, repcap, "ok: every quorum pair shares a non-byzantine member");
      return HSF_OK;
    case bft_check_report::status::too_large:
      put_str(report, repcap, "too large: exhaustive check capped at 12 members");
      return HSF_ERR_CAPACITY;
    case bft_check_report::status::violated: {
      std::ostringstream os;
      auto list = [&os](const char* name, const std::vector<member_t>& ms) {
        os << name << "={";
        for (size_t i = 0; i < ms.size(); ++i) {
          if (i) os << ',';
          os << ms[i];
        }
        os << "}";
      };
      os << "violated: ";
      list("quorum1", rep.counterexample->quorum1);
      os << ' ';
      list("quorum2", rep.counterexample->quorum2);
      os << ' ';
      list("byzantine", rep.counterexample->byzantine);
      put_str(report, repcap, os.str());
      return HSF_ERR_INVALID;
    }
  }
  return HSF_ERR_ARG;
}

}  // extern "C"
