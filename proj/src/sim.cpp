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

#include "hotsafe/sim.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

namespace hotsafe {

const char* to_string(adversary_kind a) {
  switch (a) {
    case adversary_kind::equivocate: return "equivocate";
    case adversary_kind::double_vote: return "double_vote";
    case adversary_kind::ignore_preferred_round: return "ignore_preferred_round";
    case adversary_kind::silent: return "silent";
  }
  return "?";
}

std::uint64_t splitmix64::next() {
  state_ += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double splitmix64::uniform01() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t splitmix64::below(std::uint64_t n) {
  return n == 0 ? 0 : next() % n;
}

namespace {

std::vector<std::uint8_t> text_payload(const std::string& s) {
  return std::vector<std::uint8_t>(s.begin(), s.end());
}

char kind_char(const message_body& body) {
  switch (body.index()) {
    case 0: return 'P';
    case 1: return 'V';
    default: return 'Q';
  }
}

round_t body_round(const message_body& body) {
  if (const auto* p = std::get_if<proposal_msg>(&body)) return p->b.round;
  if (const auto* v = std::get_if<vote_msg>(&body)) return v->v.round;
  return std::get<qc_msg>(body).q.round;
}

uid body_id(const message_body& body) {
  if (const auto* p = std::get_if<proposal_msg>(&body)) return p->b.id;
  if (const auto* v = std::get_if<vote_msg>(&body)) return v->v.block_uid;
  return std::get<qc_msg>(body).q.cert_block_id;
}

}  // namespace

world::world(const scenario& sc) : sc_(sc), rng_(sc.seed) {
  const member_t n = sc_.cfg.authors_n();
  // Send evidence is membership in the append-only log, looked up live.
  vote_evidence_fn ev = [this](const vote& v) { return evidence_.count(v) > 0; };
  record_store proto(sc_.cfg, sc_.mode, ev);
  peers_.reserve(n);
  for (member_t m = 0; m < n; ++m) peers_.emplace_back(proto);
  committed_.resize(n);
  commit_history_.resize(n);
  trace_ = "# prng=splitmix64 seed=" + std::to_string(sc_.seed) + "\n";
}

adversary_kind world::behavior(member_t m) const {
  auto it = sc_.adversaries.find(m);
  return it == sc_.adversaries.end() ? adversary_kind::silent : it->second;
}

member_t world::leader_of(round_t r) const {
  return static_cast<member_t>(r % sc_.cfg.authors_n());
}

void world::trace_event(const char* evt, member_t p, char kind,
                        std::optional<round_t> round, const uid* id,
                        const std::string& detail) {
  std::ostringstream os;
  os << "step=" << step_count_ << " evt=" << evt << " peer=" << p
     << " kind=" << kind << " round=";
  if (round)
    os << *round;
  else
    os << '-';
  os << " id=";
  if (id)
    os << id->short_hex();
  else
    os << '-';
  os << " detail=" << (detail.empty() ? "-" : detail) << "\n";
  trace_ += os.str();
}

void world::trace_msg(const char* evt, member_t p, const message_body& body,
                      const std::string& detail) {
  const uid id = body_id(body);
  trace_event(evt, p, kind_char(body), body_round(body), &id, detail);
}

std::size_t world::append_log(member_t sender, message_body body) {
  if (const auto* vm = std::get_if<vote_msg>(&body)) {
    // Non-forgeability: nothing in the system can emit a vote message for an
    // honest member other than that member's own handler.
    assert(vm->v.member == sender || !honest(vm->v.member));
    if (vm->v.member == sender) evidence_.insert(vm->v);
  }
  log_.push_back(sent_message{std::move(body), sender, step_count_});
  return log_.size() - 1;
}

void world::enqueue_network(member_t sender, member_t to,
                            std::size_t log_index) {
  const message_body& body = log_[log_index].body;
  if (rng_.uniform01() < sc_.drop_prob) {
    trace_msg("DROP", to, body, "from:" + std::to_string(sender));
    return;
  }
  const std::uint64_t delay =
      sc_.max_delay == 0 ? 0 : rng_.below(sc_.max_delay + 1);
  queue_.emplace(std::make_pair(step_count_ + 1 + delay, seq_),
                 inflight{step_count_ + 1 + delay, seq_, to, log_index});
  ++seq_;
  if (rng_.uniform01() < sc_.dup_prob) {
    const std::uint64_t delay2 =
        sc_.max_delay == 0 ? 0 : rng_.below(sc_.max_delay + 1);
    queue_.emplace(std::make_pair(step_count_ + 1 + delay2, seq_),
                   inflight{step_count_ + 1 + delay2, seq_, to, log_index});
    ++seq_;
    trace_msg("DUP", to, body, "from:" + std::to_string(sender));
  }
}

void world::broadcast(member_t sender, message_body body) {
  const std::size_t idx = append_log(sender, std::move(body));
  trace_msg("SEND", sender, log_[idx].body, "to:all");
  for (member_t t = 0; t < sc_.cfg.authors_n(); ++t) {
    if (t == sender) continue;
    enqueue_network(sender, t, idx);
  }
  // Senders process their own messages locally, outside the lossy network.
  handle_message(sender, log_[idx]);
}

void world::send_to(member_t sender, member_t to, message_body body) {
  const std::size_t idx = append_log(sender, std::move(body));
  trace_msg("SEND", sender, log_[idx].body, "to:" + std::to_string(to));
  if (to == sender) {
    handle_message(sender, log_[idx]);
    return;
  }
  enqueue_network(sender, to, idx);
}

void world::step() {
  if (step_count_ >= sc_.steps) return;
  ++step_count_;
  if (!queue_.empty() && queue_.begin()->second.due <= step_count_) {
    inflight ev = queue_.begin()->second;
    queue_.erase(queue_.begin());
    deliver(ev);
    return;
  }
  if (queue_.empty()) timeout_propose();
  // Otherwise every in-flight message is still in transit; the step idles.
}

void world::run_all() {
  while (step_count_ < sc_.steps) step();
}

void world::deliver(const inflight& ev) {
  sent_message m = log_[ev.log_index];  // copy: handlers grow the log
  trace_msg("DELIVER", ev.to, m.body, "from:" + std::to_string(m.sender));
  handle_message(ev.to, std::move(m));
}

void world::handle_message(member_t p, sent_message m) {
  if (!honest(p)) {
    adversary_message(p, m);
    return;
  }
  if (const auto* pm = std::get_if<proposal_msg>(&m.body)) {
    honest_proposal(p, pm->b);
  } else if (const auto* vm = std::get_if<vote_msg>(&m.body)) {
    honest_vote_msg(p, vm->v);
  } else {
    honest_qc_msg(p, std::get<qc_msg>(m.body).q);
  }
}

void world::honest_proposal(member_t p, const block& b) {
  if (!block_id_consistent(b, sc_.mode)) {
    trace_event("REFUSE", p, 'P', b.round, &b.id, "bad_id");
    return;
  }
  insert_or_park(p, record{b}, false);
  try_vote(p, b);
}

void world::honest_vote_msg(member_t p, const vote& v) {
  accumulate_vote(p, v);
  try_form_qc(p, v.round, v.block_uid);
}

void world::honest_qc_msg(member_t p, const qc& q) {
  insert_or_park(p, record{q}, false);
}

void world::insert_or_park(member_t p, const record& r, bool quiet_refuse) {
  peer& me = peers_[p];
  if (me.store.contains(r)) return;
  auto res = me.store.insert(r);
  if (res.ok()) {
    on_inserted(p, r);
    retry_parked(p);
    return;
  }
  if (res.error().code == insert_error_code::orphan) {
    // Parents may still be in flight; hold a bounded backlog.
    if (me.parked.size() >= 128) me.parked.pop_front();
    me.parked.push_back(r);
    return;
  }
  if (!quiet_refuse) {
    const uid id = id_of(r);
    const char kind = kind_of(r) == record_kind::block ? 'P' : 'Q';
    trace_event("REFUSE", p, kind, round_of(r), &id, to_string(res.error()));
  }
}

void world::retry_parked(member_t p) {
  peer& me = peers_[p];
  bool progress = true;
  while (progress && !me.parked.empty()) {
    progress = false;
    std::deque<record> still;
    while (!me.parked.empty()) {
      record r = me.parked.front();
      me.parked.pop_front();
      if (me.store.contains(r)) {
        progress = true;
        continue;
      }
      auto res = me.store.insert(r);
      if (res.ok()) {
        on_inserted(p, r);
        progress = true;
      } else if (res.error().code == insert_error_code::orphan) {
        still.push_back(std::move(r));
      }
      // Invalid parked records are silently abandoned.
    }
    me.parked = std::move(still);
  }
}

void world::on_inserted(member_t p, const record& r) {
  peer& me = peers_[p];
  if (const auto* b = std::get_if<block>(&r)) {
    // Votes may have raced ahead of the proposal.
    for (const auto& [key, votes] : me.acc) {
      if (key.second == b->id && key.first == b->round)
        try_form_qc(p, key.first, key.second);
    }
    return;
  }
  if (const auto* q = std::get_if<qc>(&r)) {
    note_commit(p, *q);
    if (q->round >= me.current_round) {
      me.current_round = q->round + 1;
      const member_t lead = leader_of(me.current_round);
      if (lead == p && me.last_proposed < me.current_round) {
        if (honest(p))
          propose(p, me.current_round);
        else if (behavior(p) != adversary_kind::silent)
          adversary_propose(p, me.current_round);
      }
    }
  }
}

void world::try_vote(member_t p, const block& b) {
  peer& me = peers_[p];
  if (!me.store.contains(record{b})) return;  // parked: no chain, no vote
  auto sv = should_vote(me.safety, p, b, me.store);
  if (!sv) {
    trace_event("REFUSE", p, 'P', b.round, &b.id, to_string(sv.error().code));
    return;
  }
  me.safety = update_safety_state(me.safety, b, me.store);
  broadcast(p, vote_msg{sv.value()});
}

void world::accumulate_vote(member_t p, const vote& v) {
  peers_[p].acc[{v.round, v.block_uid}].emplace(v.member, v);
}

void world::try_form_qc(member_t p, round_t round, const uid& id) {
  peer& me = peers_[p];
  const auto key = std::make_pair(round, id);
  if (me.formed.count(key)) return;
  auto it = me.acc.find(key);
  if (it == me.acc.end()) return;
  if (!me.store.block_with_id_round(id, round)) return;  // unvalidated block

  std::vector<member_t> members;
  for (const auto& [m, v] : it->second) members.push_back(m);
  if (!is_quorum(members, sc_.cfg)) return;

  qc q;
  q.round = round;
  q.cert_block_id = id;
  for (const auto& [m, v] : it->second) q.votes.push_back(v);  // member order
  if (!validate_qc(q, sc_.cfg, me.store.evidence()).ok()) return;

  me.formed.insert(key);
  trace_event("QCFORM", p, 'Q', round, &id,
              "votes:" + std::to_string(q.votes.size()));
  insert_or_park(p, record{q}, false);
  broadcast(p, qc_msg{q});
}

void world::note_commit(member_t p, const qc& q) {
  peer& me = peers_[p];
  auto cr = detect_commit(me.store, q);
  if (!cr) return;
  // Committed: the 3-chain head and its ancestors. The final two blocks of
  // the 3-chain are certified but not yet committed.
  std::vector<uid> chain_ids;
  for (const auto& rec : cr->chain.records) {
    if (const auto* b = std::get_if<block>(&rec)) {
      chain_ids.push_back(b->id);
      if (*b == cr->committed) break;
    }
  }
  // Committed prefix must only ever grow; diverging commits are recorded for
  // the audits but do not replace the local chain.
  auto& committed = committed_[p];
  const bool extends_current =
      chain_ids.size() >= committed.size() &&
      std::equal(committed.begin(), committed.end(), chain_ids.begin());
  const bool stale = chain_ids.size() < committed.size() &&
                     std::equal(chain_ids.begin(), chain_ids.end(),
                                committed.begin());
  if (stale || chain_ids == committed) return;
  std::string detail = "chain:" + std::to_string(chain_ids.size());
  if (!extends_current) detail += ",diverged";
  trace_event("COMMIT", p, 'B', cr->committed.round, &cr->committed.id, detail);
  commit_history_[p].push_back(chain_ids);
  if (extends_current) committed = std::move(chain_ids);
}

void world::timeout_propose() {
  round_t r = next_timeout_round_;
  for (const auto& pe : peers_) r = std::max(r, pe.current_round);
  const member_t lead = leader_of(r);
  round_t actual = r;
  if (honest(lead)) {
    actual = propose(lead, r);
  } else if (behavior(lead) != adversary_kind::silent) {
    actual = adversary_propose(lead, r);
  }
  next_timeout_round_ = std::max(next_timeout_round_, actual) + 1;
}

round_t world::propose(member_t p, round_t r) {
  peer& me = peers_[p];
  auto parent = me.store.highest_qc();
  round_t round = std::max<round_t>(r, 1);
  std::optional<uid> prev;
  if (parent) {
    round = std::max(round, parent->round + 1);
    prev = parent->cert_block_id;
  }
  if (me.last_proposed >= round) return round;
  const std::string payload =
      "tx-" + std::to_string(round) + "-" + std::to_string(p);
  block b = make_block(round, prev, text_payload(payload), sc_.mode);
  me.last_proposed = round;
  me.current_round = std::max(me.current_round, round);
  std::vector<uid> supporting;
  if (prev) supporting.push_back(*prev);
  broadcast(p, proposal_msg{b, supporting});
  return round;
}

round_t world::adversary_propose(member_t p, round_t r) {
  peer& me = peers_[p];
  // Half the turns continue the best chain, half extend some older
  // certificate: enough continuity for 3-chains to form, enough forking to
  // stress the voter rules.
  auto qcs = me.store.all_qcs();
  std::optional<uid> prev;
  round_t parent_round = 0;
  if (!qcs.empty()) {
    const bool fork = rng_.below(2) == 0;
    const qc pick = fork ? qcs[rng_.below(qcs.size())] : *me.store.highest_qc();
    prev = pick.cert_block_id;
    parent_round = pick.round;
  }
  round_t round = std::max<round_t>(std::max(r, parent_round + 1), 1);
  if (me.last_proposed >= round) round = me.last_proposed + 1;
  me.last_proposed = round;
  me.current_round = std::max(me.current_round, round);

  if (behavior(p) == adversary_kind::equivocate) {
    // One distinct payload per recipient.
    for (member_t t = 0; t < sc_.cfg.authors_n(); ++t) {
      if (t == p) continue;
      const std::string payload = "evil-" + std::to_string(round) + "-" +
                                  std::to_string(p) + "-" + std::to_string(t);
      block b = make_block(round, prev, text_payload(payload), sc_.mode);
      send_to(p, t, proposal_msg{b, {}});
    }
    return round;
  }
  const std::string payload =
      "byz-" + std::to_string(round) + "-" + std::to_string(p);
  block b = make_block(round, prev, text_payload(payload), sc_.mode);
  broadcast(p, proposal_msg{b, {}});
  return round;
}

void world::adversary_message(member_t p, const sent_message& m) {
  peer& me = peers_[p];
  const adversary_kind kind = behavior(p);
  if (kind == adversary_kind::silent) return;

  if (const auto* pm = std::get_if<proposal_msg>(&m.body)) {
    insert_or_park(p, record{pm->b}, true);
    const block& b = pm->b;
    bool cast = false;
    switch (kind) {
      case adversary_kind::double_vote:
      case adversary_kind::equivocate:
        cast = true;  // votes for everything, any round, any branch
        break;
      case adversary_kind::ignore_preferred_round:
        if (b.round > me.safety.last_voted_round) {
          me.safety.last_voted_round = b.round;
          cast = true;
        }
        break;
      case adversary_kind::silent:
        break;
    }
    if (cast) broadcast(p, vote_msg{vote{b.round, p, b.id}});
    return;
  }
  if (const auto* vm = std::get_if<vote_msg>(&m.body)) {
    accumulate_vote(p, vm->v);
    try_form_qc(p, vm->v.round, vm->v.block_uid);
    return;
  }
  insert_or_park(p, record{std::get<qc_msg>(m.body).q}, true);
}

namespace {

std::string render_report(const scenario& sc, const world& w,
                          const record_pool& pool,
                          const audit_verdict& verdict,
                          const std::vector<rule_violation>& votes_once,
                          const preferred_round_audit& pr,
                          const round_uniqueness_result& uniq,
                          const std::vector<complete_violation>& complete,
                          const std::optional<injectivity_failure>& collision,
                          const std::optional<conflict_explanation>& crosscheck,
                          const std::vector<commit_rule>& commits) {
  std::ostringstream os;
  os << "verdict=" << to_string(verdict.k) << "\n";
  os << "epoch=" << sc.cfg.epoch_id() << " authors_n=" << sc.cfg.authors_n()
     << " model="
     << (sc.cfg.model() == quorum_model::count_two_thirds ? "count" : "weighted")
     << "\n";
  os << "prng=splitmix64 seed=" << sc.seed << "\n";
  os << "steps=" << sc.steps << " executed=" << w.steps_executed() << "\n";
  os << "hash_mode="
     << (sc.mode.is_strong() ? std::string("strong")
                             : "weak:" + std::to_string(sc.mode.kept))
     << "\n";
  os << "pool_blocks=" << pool.blocks().size()
     << " pool_qcs=" << pool.qcs().size() << "\n";
  os << "commits=" << commits.size() << "\n";
  os << "votes_only_once_violations=" << votes_once.size() << "\n";
  os << "preferred_round_violations=" << pr.violations.size() << "\n";
  os << "preferred_round_collisions=" << pr.collisions.size() << "\n";
  os << "complete_violations=" << complete.size() << "\n";
  os << "certified_round_uniqueness=";
  switch (uniq.st) {
    case round_uniqueness_result::status::ok: os << "ok"; break;
    case round_uniqueness_result::status::conflict: os << "conflict"; break;
    case round_uniqueness_result::status::injectivity:
      os << "injectivity_failure";
      break;
  }
  os << "\n";
  os << "injectivity=" << (collision ? "found" : "none") << "\n";

  auto emit_violation = [&os](const rule_violation& v) {
    os << "violation member=" << v.member << " rule=" << to_string(v.rule)
       << " round=" << v.round << " uid1=" << v.v1.block_uid.hex()
       << " uid2=" << v.v2.block_uid.hex() << " qc1=" << v.qc1_cert.hex()
       << " qc2=" << v.qc2_cert.hex();
    if (v.rule == voter_rule::preferred_round)
      os << " committed_round=" << v.committed_round
         << " observed_prev=" << v.observed_prev;
    os << "\n";
  };
  for (const auto& v : votes_once) emit_violation(v);
  for (const auto& v : pr.violations) emit_violation(v);

  if (verdict.conflict) {
    const auto& c = *verdict.conflict;
    os << "conflict committed1=" << c.cr1.committed.id.hex()
       << " round1=" << c.cr1.committed.round
       << " qc1_round=" << c.cr1.three.pairs.back().second.round
       << " committed2=" << c.cr2.committed.id.hex()
       << " round2=" << c.cr2.committed.round
       << " qc2_round=" << c.cr2.three.pairs.back().second.round << "\n";
  }
  if (crosscheck) {
    os << "crosscheck member=";
    if (crosscheck->member)
      os << *crosscheck->member;
    else
      os << "none";
    os << " rule=" << (crosscheck->rule ? to_string(*crosscheck->rule) : "-")
       << " reason=";
    if (!crosscheck->member)
      os << "byzantine_budget_exceeded";
    else
      os << "honest_rule_violation";
    os << "\n";
  }
  if (collision) {
    os << "collision id=" << collision->b0.id.hex()
       << " b0_round=" << collision->b0.round
       << " b0_sender=" << collision->p0.sender
       << " b0_step=" << collision->p0.step
       << " b1_round=" << collision->b1.round
       << " b1_sender=" << collision->p1.sender
       << " b1_step=" << collision->p1.step << "\n";
  }
  for (member_t p = 0;
       p < static_cast<member_t>(w.committed_by_peer().size()); ++p) {
    os << "committed peer=" << p << " chain=";
    const auto& ids = w.committed_by_peer()[p];
    if (ids.empty()) {
      os << "-";
    } else {
      for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) os << ',';
        os << ids[i].short_hex();
      }
    }
    os << "\n";
  }
  os << "pool:\n" << pool.dump();
  return os.str();
}

}  // namespace

run_result run_scenario(const scenario& sc) {
  if (sc.steps < 1) throw std::invalid_argument("scenario: steps must be >= 1");
  if (sc.drop_prob < 0 || sc.drop_prob > 1 || sc.dup_prob < 0 ||
      sc.dup_prob > 1)
    throw std::invalid_argument("scenario: probabilities must be in [0,1]");

  world w(sc);
  w.run_all();

  record_pool pool;
  for (std::size_t i = 0; i < w.log().size(); ++i) {
    const sent_message& m = w.log()[i];
    const provenance prov{m.sender, m.send_step};
    if (const auto* pm = std::get_if<proposal_msg>(&m.body))
      pool.add_block(pm->b, prov);
    else if (const auto* vm = std::get_if<vote_msg>(&m.body))
      pool.add_vote_message(m.sender, vm->v, prov);
    else
      pool.add_qc(std::get<qc_msg>(m.body).q, prov);
  }

  pool_analysis analysis(pool, sc.cfg, sc.mode);

  run_result out;
  out.votes_once = audit_votes_only_once(analysis, sc.honesty);
  out.preferred_round = audit_preferred_round(analysis, sc.honesty);
  out.round_uniqueness = certified_round_uniqueness(analysis);
  out.complete = audit_complete(analysis, sc.honesty);
  out.collision = find_injectivity_failure(pool);
  out.commits = analysis.commits();

  audit_verdict verdict = commits_do_not_conflict(analysis);
  if (verdict.k == audit_verdict::kind::safe) {
    if (out.collision) {
      verdict.k = audit_verdict::kind::injectivity_failure;
      verdict.collision = out.collision;
    } else if (!out.votes_once.empty()) {
      verdict.k = audit_verdict::kind::rule_violation;
      verdict.violation = out.votes_once.front();
    } else if (!out.preferred_round.violations.empty()) {
      verdict.k = audit_verdict::kind::rule_violation;
      verdict.violation = out.preferred_round.violations.front();
    }
  }
  out.verdict = verdict;

  if (verdict.k == audit_verdict::kind::conflicting_commits)
    out.crosscheck = cross_check_conflict_pair(
        verdict.conflict->cr1, verdict.conflict->cr2, analysis, sc.honesty);

  // Violations become trailing trace events.
  for (const auto& v : out.votes_once) {
    std::ostringstream os;
    os << "step=" << w.steps_executed() << " evt=VIOLATION peer=" << v.member
       << " kind=- round=" << v.round << " id=" << v.v1.block_uid.short_hex()
       << " detail=" << to_string(v.rule) << "\n";
    w.trace_mut() += os.str();
  }
  for (const auto& v : out.preferred_round.violations) {
    std::ostringstream os;
    os << "step=" << w.steps_executed() << " evt=VIOLATION peer=" << v.member
       << " kind=- round=" << v.round << " id=" << v.v2.block_uid.short_hex()
       << " detail=" << to_string(v.rule) << "\n";
    w.trace_mut() += os.str();
  }

  out.report = render_report(sc, w, pool, verdict, out.votes_once,
                             out.preferred_round, out.round_uniqueness,
                             out.complete, out.collision, out.crosscheck,
                             out.commits);
  out.trace = w.trace();
  out.pool = std::move(pool);
  out.committed_by_peer = w.committed_by_peer();
  out.commit_history = w.commit_history();
  out.log = w.log();
  out.steps_executed = w.steps_executed();
  return out;
}

}  // namespace hotsafe
