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

#ifndef HOTSAFE_SIM_HPP
#define HOTSAFE_SIM_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "hotsafe/audit.hpp"
#include "hotsafe/chains.hpp"
#include "hotsafe/quorum.hpp"
#include "hotsafe/voter.hpp"

namespace hotsafe {

enum class adversary_kind { equivocate, double_vote, ignore_preferred_round, silent };
const char* to_string(adversary_kind a);

struct scenario {
  epoch_config cfg;
  honesty_map honesty;
  std::map<member_t, adversary_kind> adversaries;  // per byzantine member
  std::uint64_t steps = 0;
  double drop_prob = 0.0;
  double dup_prob = 0.0;
  std::uint32_t max_delay = 0;
  std::uint64_t seed = 0;
  hash_mode mode = hash_mode::strong();
};

/// splitmix64; all simulation randomness flows through one seeded instance.
class splitmix64 {
 public:
  explicit splitmix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform01();                       // in [0, 1)
  std::uint64_t below(std::uint64_t n);     // in [0, n)
  splitmix64 split() { return splitmix64(next()); }

 private:
  std::uint64_t state_;
};

struct proposal_msg {
  block b;
  std::vector<uid> supporting;  // certificate ids the proposer relies on
};
struct vote_msg {
  vote v;
};
struct qc_msg {
  qc q;
};
using message_body = std::variant<proposal_msg, vote_msg, qc_msg>;

struct sent_message {
  message_body body;
  member_t sender = 0;
  std::uint64_t send_step = 0;
};

/**
 * Deterministic discrete-event execution: one event per step, every message
 * append-only logged at send time (the log defines what is "in the system"),
 * drop/duplicate/delay decided by the seeded generator at send time.
 * Strictly single-threaded.
 */
class world {
 public:
  explicit world(const scenario& sc);

  void step();
  void run_all();  // step() until the scenario's step budget is exhausted

  std::uint64_t steps_executed() const { return step_count_; }
  const std::vector<sent_message>& log() const { return log_; }
  const std::string& trace() const { return trace_; }
  std::string& trace_mut() { return trace_; }
  const std::vector<std::vector<uid>>& committed_by_peer() const {
    return committed_;
  }
  /// Every committed-chain snapshot per peer, in commit order.
  const std::vector<std::vector<std::vector<uid>>>& commit_history() const {
    return commit_history_;
  }
  const scenario& config() const { return sc_; }

 private:
  struct peer {
    record_store store;
    voter_safety_state safety;
    round_t current_round = 1;
    round_t last_proposed = 0;
    // votes collected per (round, block id), keyed by voter
    std::map<std::pair<round_t, uid>, std::map<member_t, vote>> acc;
    std::set<std::pair<round_t, uid>> formed;
    std::deque<record> parked;  // orphans awaiting parents, bounded

    explicit peer(const record_store& s) : store(s) {}
  };

  struct inflight {
    std::uint64_t due;
    std::uint64_t seq;
    member_t to;
    std::size_t log_index;  // message content lives in log_
  };

  bool honest(member_t m) const { return sc_.honesty.honest(m); }
  adversary_kind behavior(member_t m) const;
  member_t leader_of(round_t r) const;

  void trace_event(const char* evt, member_t p, char kind,
                   std::optional<round_t> round, const uid* id,
                   const std::string& detail);
  void trace_msg(const char* evt, member_t p, const message_body& body,
                 const std::string& detail);
  void broadcast(member_t sender, message_body body);
  void send_to(member_t sender, member_t to, message_body body);
  void enqueue_network(member_t sender, member_t to, std::size_t log_index);
  std::size_t append_log(member_t sender, message_body body);

  void deliver(const inflight& ev);
  // Takes the message by value: handlers can grow the log underneath us.
  void handle_message(member_t p, sent_message m);
  void honest_proposal(member_t p, const block& b);
  void honest_vote_msg(member_t p, const vote& v);
  void honest_qc_msg(member_t p, const qc& q);
  void adversary_message(member_t p, const sent_message& m);

  void insert_or_park(member_t p, const record& r, bool quiet_refuse);
  void on_inserted(member_t p, const record& r);
  void retry_parked(member_t p);
  void try_vote(member_t p, const block& b);
  void accumulate_vote(member_t p, const vote& v);
  void try_form_qc(member_t p, round_t round, const uid& id);
  void note_commit(member_t p, const qc& q);

  void timeout_propose();
  round_t propose(member_t p, round_t r);
  round_t adversary_propose(member_t p, round_t r);

  scenario sc_;
  std::vector<peer> peers_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, inflight> queue_;  // (due, seq)
  std::vector<sent_message> log_;
  std::set<vote> evidence_;  // votes carried by vote messages from their member
  std::uint64_t step_count_ = 0;
  std::uint64_t seq_ = 0;
  round_t next_timeout_round_ = 1;
  splitmix64 rng_;
  std::string trace_;
  std::vector<std::vector<uid>> committed_;
  std::vector<std::vector<std::vector<uid>>> commit_history_;
};

struct run_result {
  std::string trace;
  std::string report;
  record_pool pool;
  audit_verdict verdict;
  std::vector<rule_violation> votes_once;
  preferred_round_audit preferred_round;
  round_uniqueness_result round_uniqueness;
  std::vector<complete_violation> complete;
  std::optional<injectivity_failure> collision;
  std::optional<conflict_explanation> crosscheck;
  std::vector<commit_rule> commits;
  std::vector<std::vector<uid>> committed_by_peer;
  std::vector<std::vector<std::vector<uid>>> commit_history;
  std::vector<sent_message> log;
  std::uint64_t steps_executed = 0;
};

/// Runs the scenario to exhaustion, extracts the pool from the sent-message
/// log, runs every audit, and renders the trace and report.
run_result run_scenario(const scenario& sc);

}  // namespace hotsafe

#endif
