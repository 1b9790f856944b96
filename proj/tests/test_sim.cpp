#include <set>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "hotsafe/scenario.hpp"
#include "hotsafe/sim.hpp"

using namespace hotsafe;
using namespace hotsafe::testing;

namespace {

scenario honest_scenario(member_t n, std::uint64_t f, std::uint64_t steps,
                         std::uint64_t seed) {
  scenario sc;
  sc.cfg = epoch_config::make_count(1, n, f).value();
  sc.honesty = honesty_map(n);
  sc.steps = steps;
  sc.seed = seed;
  return sc;
}

bool prefix_consistent(const std::vector<uid>& a, const std::vector<uid>& b) {
  const auto& shorter = a.size() <= b.size() ? a : b;
  const auto& longer = a.size() <= b.size() ? b : a;
  return std::equal(shorter.begin(), shorter.end(), longer.begin());
}

}  // namespace

TEST_CASE("identical scenario and seed give byte-identical traces") {
  auto sc = honest_scenario(4, 1, 400, 42);
  sc.drop_prob = 0.2;
  sc.dup_prob = 0.1;
  sc.max_delay = 5;
  auto r1 = run_scenario(sc);
  auto r2 = run_scenario(sc);
  CHECK(r1.trace == r2.trace);
  CHECK(r1.report == r2.report);

  sc.seed = 43;
  auto r3 = run_scenario(sc);
  CHECK(r1.trace != r3.trace);
}

TEST_CASE("total loss: nothing delivers, nothing commits, vacuously safe") {
  auto sc = honest_scenario(4, 1, 300, 7);
  sc.drop_prob = 1.0;
  auto r = run_scenario(sc);
  CHECK(r.trace.find("evt=DELIVER") == std::string::npos);
  CHECK(r.commits.empty());
  for (const auto& ids : r.committed_by_peer) CHECK(ids.empty());
  CHECK(r.verdict.k == audit_verdict::kind::safe);
}

TEST_CASE("synchronous honest run commits early and consistently") {
  auto sc = honest_scenario(4, 1, 500, 1);
  auto r = run_scenario(sc);

  CHECK(r.verdict.k == audit_verdict::kind::safe);
  CHECK(r.votes_once.empty());
  CHECK(r.preferred_round.violations.empty());
  CHECK(r.complete.empty());
  CHECK(!r.commits.empty());

  // first commit: the contiguous 3-chain over rounds 1..3 commits round 1
  round_t lowest = ~0ull;
  for (const auto& cr : r.commits) lowest = std::min(lowest, cr.committed.round);
  CHECK(lowest == 1);

  // every peer committed something and all agree up to length
  for (const auto& ids : r.committed_by_peer) CHECK(!ids.empty());
  for (std::size_t i = 0; i < r.committed_by_peer.size(); ++i)
    for (std::size_t j = i + 1; j < r.committed_by_peer.size(); ++j)
      CHECK(prefix_consistent(r.committed_by_peer[i], r.committed_by_peer[j]));

  // commit history per peer only ever extends
  for (const auto& history : r.commit_history) {
    for (std::size_t i = 1; i < history.size(); ++i) {
      CHECK(history[i].size() > history[i - 1].size());
      CHECK(std::equal(history[i - 1].begin(), history[i - 1].end(),
                       history[i].begin()));
    }
  }
}

TEST_CASE("lossy honest runs stay safe and prefix-consistent") {
  for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
    auto sc = honest_scenario(4, 1, 1000, seed);
    sc.drop_prob = 0.15;
    sc.dup_prob = 0.1;
    sc.max_delay = 10;
    auto r = run_scenario(sc);
    CHECK(r.verdict.k == audit_verdict::kind::safe);
    CHECK(r.round_uniqueness.st != round_uniqueness_result::status::conflict);
    for (std::size_t i = 0; i < r.committed_by_peer.size(); ++i)
      for (std::size_t j = i + 1; j < r.committed_by_peer.size(); ++j)
        CHECK(prefix_consistent(r.committed_by_peer[i], r.committed_by_peer[j]));
    // committed history only extends
    for (const auto& history : r.commit_history) {
      for (std::size_t i = 1; i < history.size(); ++i) {
        CHECK(history[i].size() > history[i - 1].size());
        CHECK(std::equal(history[i - 1].begin(), history[i - 1].end(),
                         history[i].begin()));
      }
    }
  }
}

TEST_CASE("vote messages for honest members only come from those members") {
  auto sc = honest_scenario(4, 1, 600, 21);
  sc.adversaries[1] = adversary_kind::double_vote;
  sc.honesty.set_byzantine(1);
  sc.drop_prob = 0.1;
  auto r = run_scenario(sc);
  for (const auto& m : r.log) {
    if (const auto* vm = std::get_if<vote_msg>(&m.body)) {
      if (sc.honesty.honest(vm->v.member)) CHECK(m.sender == vm->v.member);
    }
  }
}

TEST_CASE("trace format: header then fixed-order key=value events") {
  auto sc = honest_scenario(4, 1, 200, 5);
  sc.drop_prob = 0.3;
  sc.dup_prob = 0.2;
  sc.max_delay = 4;
  auto r = run_scenario(sc);
  std::istringstream in(r.trace);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "# prng=splitmix64 seed=5");
  const std::set<std::string> events = {"SEND", "DELIVER", "DROP",   "DUP",
                                        "REFUSE", "QCFORM", "COMMIT",
                                        "VIOLATION"};
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    REQUIRE(line.rfind("step=", 0) == 0);
    const char* keys[] = {" evt=", " peer=", " kind=", " round=", " id=",
                          " detail="};
    std::size_t pos = 0;
    for (const char* k : keys) {
      auto at = line.find(k, pos);
      REQUIRE(at != std::string::npos);
      pos = at;
    }
    auto evt_at = line.find(" evt=") + 5;
    seen.insert(line.substr(evt_at, line.find(' ', evt_at) - evt_at));
  }
  for (const auto& e : seen) CHECK(events.count(e) == 1);
  CHECK(seen.count("SEND") == 1);
  CHECK(seen.count("DELIVER") == 1);
  CHECK(seen.count("DROP") == 1);
  CHECK(r.trace.back() == '\n');
  CHECK(r.report.back() == '\n');
}

TEST_CASE("within-budget adversaries never break safety (spot checks)") {
  const adversary_kind kinds[] = {
      adversary_kind::equivocate, adversary_kind::double_vote,
      adversary_kind::ignore_preferred_round, adversary_kind::silent};
  for (auto kind : kinds) {
    for (std::uint64_t seed : {3ull, 4ull}) {
      auto sc = honest_scenario(4, 1, 800, seed);
      sc.honesty.set_byzantine(1);
      sc.adversaries[1] = kind;
      sc.drop_prob = 0.1;
      sc.dup_prob = 0.05;
      sc.max_delay = 8;
      auto r = run_scenario(sc);
      CHECK(r.verdict.k == audit_verdict::kind::safe);
      CHECK(r.votes_once.empty());
      CHECK(r.preferred_round.violations.empty());
      // one certified block per round whenever the budget is respected
      CHECK(r.round_uniqueness.st != round_uniqueness_result::status::conflict);
    }
  }
}

TEST_CASE("silent byzantine peer does not stall progress") {
  auto sc = honest_scenario(4, 1, 500, 9);
  sc.honesty.set_byzantine(2);
  sc.adversaries[2] = adversary_kind::silent;
  auto r = run_scenario(sc);
  CHECK(!r.commits.empty());  // three honest peers are a quorum
  CHECK(r.verdict.k == audit_verdict::kind::safe);
}

TEST_CASE("scenario validation") {
  auto sc = honest_scenario(4, 1, 1, 0);
  sc.steps = 0;
  CHECK_THROWS_AS(run_scenario(sc), std::invalid_argument);
  sc.steps = 10;
  sc.drop_prob = 1.5;
  CHECK_THROWS_AS(run_scenario(sc), std::invalid_argument);
}

TEST_CASE("scenario files parse with strict keys") {
  const char* good =
      "# comment\n"
      "epoch_id=1\n"
      "authors_n=4\n"
      "quorum_model=count\n"
      "f=1\n"
      "byzantine=1,2\n"
      "adversary=double_vote,silent\n"
      "steps=100\n"
      "drop_prob=0.1\n"
      "dup_prob=0.05\n"
      "max_delay=20\n"
      "seed=42\n"
      "hash_mode=strong\n";
  auto sc = parse_scenario(good);
  REQUIRE(sc.ok());
  CHECK(sc.value().cfg.authors_n() == 4);
  CHECK(sc.value().steps == 100);
  CHECK(sc.value().seed == 42);
  CHECK(!sc.value().honesty.honest(1));
  CHECK(!sc.value().honesty.honest(2));
  CHECK(sc.value().adversaries.at(1) == adversary_kind::double_vote);
  CHECK(sc.value().adversaries.at(2) == adversary_kind::silent);

  auto missing = parse_scenario("f=1\nsteps=10\nseed=1\n");
  REQUIRE(!missing.ok());
  CHECK(missing.error().find("authors_n") != std::string::npos);

  auto unknown = parse_scenario("authors_n=4\nf=1\nsteps=10\nseed=1\nbogus=1\n");
  REQUIRE(!unknown.ok());
  CHECK(unknown.error().find("bogus") != std::string::npos);

  auto zero_steps = parse_scenario("authors_n=4\nf=1\nsteps=0\nseed=1\n");
  REQUIRE(!zero_steps.ok());

  auto misaligned = parse_scenario(
      "authors_n=4\nf=1\nsteps=10\nseed=1\nbyzantine=1\nadversary=silent,silent\n");
  REQUIRE(!misaligned.ok());

  auto bad_member = parse_scenario(
      "authors_n=4\nf=1\nsteps=10\nseed=1\nbyzantine=7\nadversary=silent\n");
  REQUIRE(!bad_member.ok());

  auto weak = parse_scenario(
      "authors_n=4\nf=1\nsteps=10\nseed=1\nhash_mode=weak:1\n");
  REQUIRE(weak.ok());
  CHECK(weak.value().mode == hash_mode::weak(1));

  auto weighted = parse_scenario(
      "authors_n=4\nquorum_model=weighted\nvoting_power=3,1,1,1\n"
      "byz_power=1\nsteps=10\nseed=1\n");
  REQUIRE(weighted.ok());
  CHECK(weighted.value().cfg.model() == quorum_model::weighted_two_thirds);
  CHECK(weighted.value().cfg.power(0) == 3);
}

TEST_CASE("epoch settings subset parses without sim keys") {
  auto s = parse_epoch_settings("authors_n=4\nf=1\nhash_mode=weak:2\n");
  REQUIRE(s.ok());
  CHECK(s.value().cfg.authors_n() == 4);
  CHECK(s.value().mode == hash_mode::weak(2));
  // invariant violations surface here
  auto bad = parse_epoch_settings("authors_n=4\nf=2\n");
  REQUIRE(!bad.ok());
}

TEST_CASE("refusals are traced in adversarial runs") {
  // a double-voting byzantine member creates competing proposals, so honest
  // peers regularly refuse something
  auto sc = honest_scenario(4, 1, 1500, 17);
  sc.honesty.set_byzantine(1);
  sc.adversaries[1] = adversary_kind::double_vote;
  sc.drop_prob = 0.25;
  sc.max_delay = 12;
  auto r = run_scenario(sc);
  CHECK(r.trace.find("evt=REFUSE") != std::string::npos);
}

TEST_CASE("weak hashing floods the pool with collisions and is reported") {
  auto sc = honest_scenario(4, 1, 4000, 3);
  sc.honesty.set_byzantine(1);
  sc.adversaries[1] = adversary_kind::equivocate;
  sc.mode = hash_mode::weak(1);
  auto r = run_scenario(sc);
  REQUIRE(r.collision.has_value());
  CHECK(r.collision->b0.id == r.collision->b1.id);
  CHECK(!(r.collision->b0 == r.collision->b1));
  CHECK(r.verdict.k == audit_verdict::kind::injectivity_failure);
}
