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

/* C interface to the hotsafe consensus safety kernel. All objects are opaque
 * handles owned by the library; strings returned by accessors stay valid
 * until the owning handle is freed. Functions that can fail take an error
 * buffer and return an hsf_status. */

#ifndef HOTSAFE_H
#define HOTSAFE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct hsf_scenario hsf_scenario;
typedef struct hsf_run hsf_run;

typedef enum {
  HSF_OK = 0,
  HSF_ERR_PARSE = 1,    /* malformed input text or unreadable file */
  HSF_ERR_INVALID = 2,  /* semantically rejected (bad certificate, violated
                           assumption, config invariant failure) */
  HSF_ERR_CAPACITY = 3, /* input too large for an exhaustive check */
  HSF_ERR_ARG = 4       /* null/short argument */
} hsf_status;

/* Values double as CLI exit codes. */
typedef enum {
  HSF_VERDICT_SAFE = 0,
  HSF_VERDICT_CONFLICTING_COMMITS = 2,
  HSF_VERDICT_INJECTIVITY_FAILURE = 3,
  HSF_VERDICT_RULE_VIOLATION = 4
} hsf_verdict;

const char* hsf_version(void);

/* --- scenarios ---------------------------------------------------------- */

hsf_status hsf_scenario_parse(const char* text, hsf_scenario** out, char* err,
                              size_t errcap);
hsf_status hsf_scenario_load(const char* path, hsf_scenario** out, char* err,
                             size_t errcap);
void hsf_scenario_set_seed(hsf_scenario* sc, uint64_t seed);
void hsf_scenario_free(hsf_scenario* sc);

/* --- simulation + audit ------------------------------------------------- */

hsf_status hsf_scenario_run(const hsf_scenario* sc, hsf_run** out, char* err,
                            size_t errcap);
hsf_verdict hsf_run_verdict(const hsf_run* r);
const char* hsf_run_trace(const hsf_run* r);
const char* hsf_run_report(const hsf_run* r);
void hsf_run_free(hsf_run* r);

/* --- commit certificate verification ------------------------------------ */

/* cert_text: record-dump lines plus a claim= line. config_text: epoch
 * settings in scenario format. On HSF_OK writes the committed block id (64
 * hex chars, NUL-terminated; idcap >= 65). On HSF_ERR_INVALID writes the
 * certificate error name into err. */
hsf_status hsf_verify_commit(const char* cert_text, const char* config_text,
                             char* id_hex, size_t idcap, char* err,
                             size_t errcap);

/* --- quorum intersection assumption check ------------------------------- */

/* Count model when powers is NULL (budget = f); weighted model otherwise
 * (budget = byz_power). Writes a human-readable verdict or counterexample
 * into report. Returns HSF_OK when the assumption holds, HSF_ERR_INVALID
 * with the counterexample when violated, HSF_ERR_CAPACITY above 12 members,
 * HSF_ERR_PARSE for configs failing their invariants. */
hsf_status hsf_check_bft(uint32_t n, uint64_t f, const uint64_t* powers,
                         size_t npowers, uint64_t byz_power, char* report,
                         size_t repcap);

#ifdef __cplusplus
}
#endif

#endif
