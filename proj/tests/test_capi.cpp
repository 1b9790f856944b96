#include <cstring>
#include <string>

#include "doctest.h"
#include "fixtures.hpp"
#include "hotsafe.h"
#include "hotsafe/audit.hpp"

using namespace hotsafe;
using namespace hotsafe::testing;

namespace {

const char* kScenario =
    "authors_n=4\n"
    "f=1\n"
    "steps=400\n"
    "seed=42\n"
    "drop_prob=0.1\n"
    "dup_prob=0.05\n"
    "max_delay=5\n";

const char* kConfig = "authors_n=4\nf=1\n";

}  // namespace

TEST_CASE("c api: version and scenario lifecycle") {
  CHECK(std::string(hsf_version()) == "0.1.0");

  char err[256] = {0};
  hsf_scenario* sc = nullptr;
  REQUIRE(hsf_scenario_parse(kScenario, &sc, err, sizeof err) == HSF_OK);
  REQUIRE(sc != nullptr);
  hsf_scenario_free(sc);

  hsf_scenario* bad = nullptr;
  CHECK(hsf_scenario_parse("authors_n=4\n", &bad, err, sizeof err) ==
        HSF_ERR_PARSE);
  CHECK(std::strlen(err) > 0);
  CHECK(hsf_scenario_load("/nonexistent/file", &bad, err, sizeof err) ==
        HSF_ERR_PARSE);
}

TEST_CASE("c api: run with deterministic traces and verdict") {
  char err[256] = {0};
  hsf_scenario* sc = nullptr;
  REQUIRE(hsf_scenario_parse(kScenario, &sc, err, sizeof err) == HSF_OK);

  hsf_run* r1 = nullptr;
  hsf_run* r2 = nullptr;
  REQUIRE(hsf_scenario_run(sc, &r1, err, sizeof err) == HSF_OK);
  REQUIRE(hsf_scenario_run(sc, &r2, err, sizeof err) == HSF_OK);
  CHECK(hsf_run_verdict(r1) == HSF_VERDICT_SAFE);
  CHECK(std::string(hsf_run_trace(r1)) == hsf_run_trace(r2));
  CHECK(std::string(hsf_run_report(r1)).find("verdict=safe") == 0);

  hsf_scenario_set_seed(sc, 43);
  hsf_run* r3 = nullptr;
  REQUIRE(hsf_scenario_run(sc, &r3, err, sizeof err) == HSF_OK);
  CHECK(std::string(hsf_run_trace(r1)) != hsf_run_trace(r3));

  hsf_run_free(r1);
  hsf_run_free(r2);
  hsf_run_free(r3);
  hsf_scenario_free(sc);
}

TEST_CASE("c api: commit certificate verification") {
  fig1 f;
  auto cr = detect_commit(f.store, f.q[3]);
  REQUIRE(cr.has_value());
  const std::string cert = format_certificate(make_certificate(*cr));

  char id_hex[65] = {0};
  char err[256] = {0};
  REQUIRE(hsf_verify_commit(cert.c_str(), kConfig, id_hex, sizeof id_hex, err,
                            sizeof err) == HSF_OK);
  CHECK(std::string(id_hex) == f.b[0].id.hex());

  // drop one vote line fragment: reject with the named reason
  auto broken_cert = make_certificate(*cr);
  std::get<qc>(broken_cert.records[3]).votes.pop_back();
  const std::string broken = format_certificate(broken_cert);
  CHECK(hsf_verify_commit(broken.c_str(), kConfig, id_hex, sizeof id_hex, err,
                          sizeof err) == HSF_ERR_INVALID);
  CHECK(std::string(err).find("NotAQuorum") != std::string::npos);

  // malformed config
  CHECK(hsf_verify_commit(cert.c_str(), "authors_n=4\nf=2\n", id_hex,
                          sizeof id_hex, err, sizeof err) == HSF_ERR_PARSE);
  // malformed certificate text
  CHECK(hsf_verify_commit("claim=zz\n", kConfig, id_hex, sizeof id_hex, err,
                          sizeof err) == HSF_ERR_PARSE);
}

TEST_CASE("c api: quorum assumption checks") {
  char report[512] = {0};
  CHECK(hsf_check_bft(4, 1, nullptr, 0, 0, report, sizeof report) == HSF_OK);
  CHECK(std::string(report).find("ok") == 0);

  CHECK(hsf_check_bft(4, 2, nullptr, 0, 0, report, sizeof report) ==
        HSF_ERR_PARSE);  // violates n > 3f at config build

  CHECK(hsf_check_bft(13, 4, nullptr, 0, 0, report, sizeof report) ==
        HSF_ERR_CAPACITY);

  const uint64_t powers[] = {3, 1, 1, 1};
  CHECK(hsf_check_bft(4, 0, powers, 4, 1, report, sizeof report) == HSF_OK);

  CHECK(hsf_check_bft(4, 0, powers, 3, 1, report, sizeof report) ==
        HSF_ERR_PARSE);  // length mismatch
}
