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

#include "hotsafe/audit.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace hotsafe {

void record_pool::add_block(const block& b, provenance p) {
  for (const auto& [existing, prov] : blocks_)
    if (existing == b) return;  // first provenance wins
  blocks_.emplace_back(b, p);
}

void record_pool::add_qc(const qc& q, provenance p) {
  for (const auto& [existing, prov] : qcs_)
    if (existing == q) return;
  qcs_.emplace_back(q, p);
}

void record_pool::add_vote_message(member_t sender, const vote& v,
                                   provenance p) {
  (void)p;
  // Only a vote carried by its own member's message counts as evidence;
  // relayed copies prove nothing about the member.
  if (sender == v.member) evidence_.insert(v);
}

vote_evidence_fn record_pool::evidence_fn() const {
  // Snapshot so the predicate stays valid independent of this pool object.
  auto ev = evidence_;
  return [ev = std::move(ev)](const vote& v) { return ev.count(v) > 0; };
}

std::vector<block> record_pool::blocks_with_id(const uid& id) const {
  std::vector<block> out;
  for (const auto& [b, prov] : blocks_)
    if (b.id == id) out.push_back(b);
  return out;
}

std::string record_pool::dump() const {
  std::string out;
  for (const auto& [b, prov] : blocks_) {
    out += format_record_line(record{b});
    out += " sender=" + std::to_string(prov.sender) +
           " step=" + std::to_string(prov.step) + "\n";
  }
  for (const auto& [q, prov] : qcs_) {
    out += format_record_line(record{q});
    out += " sender=" + std::to_string(prov.sender) +
           " step=" + std::to_string(prov.step) + "\n";
  }
  return out;
}

const char* to_string(voter_rule r) {
  switch (r) {
    case voter_rule::votes_only_once: return "VotesOnlyOnce";
    case voter_rule::preferred_round: return "PreferredRound";
  }
  return "?";
}

const char* to_string(audit_verdict::kind k) {
  switch (k) {
    case audit_verdict::kind::safe: return "safe";
    case audit_verdict::kind::rule_violation: return "rule_violation";
    case audit_verdict::kind::conflicting_commits: return "conflicting_commits";
    case audit_verdict::kind::injectivity_failure: return "injectivity_failure";
  }
  return "?";
}

pool_analysis::pool_analysis(const record_pool& pool, const epoch_config& cfg,
                             hash_mode mode)
    : pool_(pool), cfg_(cfg), mode_(mode),
      store_(cfg, mode, pool.evidence_fn()) {
  // Rebuild the record tree from the pool. Messages may arrive child-first,
  // so iterate to a fixpoint; records that never find a parent stay out.
  std::vector<record> todo;
  for (const auto& [b, prov] : pool.blocks()) todo.push_back(record{b});
  for (const auto& [q, prov] : pool.qcs()) todo.push_back(record{q});
  bool progress = true;
  while (progress && !todo.empty()) {
    progress = false;
    std::vector<record> next;
    for (const auto& r : todo) {
      if (store_.insert(r).ok())
        progress = true;
      else
        next.push_back(r);
    }
    todo = std::move(next);
  }

  const auto evidence = pool.evidence_fn();
  for (const auto& [q, prov] : pool.qcs()) {
    if (!validate_qc(q, cfg_, evidence).ok()) continue;
    qc_facts f;
    f.in_store = store_.contains(record{q});
    if (f.in_store) {
      record_chain rc = store_.chain_to(record{q});
      f.prev = prev_round(rc);
      for (const auto& rec : rc.records)
        if (const auto* b = std::get_if<block>(&rec))
          if (pool.blocks_with_id(b->id).size() > 1) f.chain_has_collision = true;
      if (auto c3 = find_kchain(store_, q, 3, chain_relation::contig))
        f.commit_head = c3->block_from_end(2).round;
    }
    valid_qcs_.push_back(q);
    facts_.push_back(std::move(f));
  }

  // One commit rule per committed block: duplicates cannot change any
  // pairwise containment answer.
  std::vector<block> committed_seen;
  for (std::size_t i = 0; i < valid_qcs_.size(); ++i) {
    if (!facts_[i].in_store || !facts_[i].commit_head) continue;
    auto cr = detect_commit(store_, valid_qcs_[i]);
    if (!cr) continue;
    bool seen = false;
    for (const auto& b : committed_seen)
      if (b == cr->committed) seen = true;
    if (seen) continue;
    committed_seen.push_back(cr->committed);
    commits_.push_back(std::move(*cr));
  }
}

std::vector<rule_violation> audit_votes_only_once(const pool_analysis& a,
                                                  const honesty_map& honesty) {
  // (member, round) -> first vote seen per distinct block id, with the
  // certificate that carried it. Framing-proof: only votes the member really
  // sent count.
  std::map<std::pair<member_t, round_t>, std::map<uid, std::pair<vote, uid>>>
      buckets;
  for (const auto& [q, prov] : a.pool().qcs()) {
    for (const auto& v : q.votes) {
      if (!honesty.honest(v.member)) continue;
      if (!a.pool().vote_evidence(v)) continue;
      auto& bucket = buckets[{v.member, v.round}];
      bucket.emplace(v.block_uid, std::make_pair(v, q.cert_block_id));
    }
  }
  std::vector<rule_violation> out;
  for (const auto& [key, bucket] : buckets) {
    if (bucket.size() < 2) continue;
    auto it = bucket.begin();
    const auto& [uid1, first] = *it;
    ++it;
    const auto& [uid2, second] = *it;
    rule_violation viol;
    viol.member = key.first;
    viol.rule = voter_rule::votes_only_once;
    viol.round = key.second;
    viol.v1 = first.first;
    viol.v2 = second.first;
    viol.qc1_cert = first.second;
    viol.qc2_cert = second.second;
    out.push_back(viol);
  }
  return out;
}

namespace {

std::optional<vote> vote_by(const qc& q, member_t m) {
  for (const auto& v : q.votes)
    if (v.member == m) return v;
  return std::nullopt;
}

std::optional<injectivity_failure> collision_for_id(const record_pool& pool,
                                                    const uid& id) {
  const auto& blocks = pool.blocks();
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].first.id != id) continue;
    for (std::size_t j = i + 1; j < blocks.size(); ++j) {
      if (blocks[j].first.id != id) continue;
      if (!(blocks[i].first == blocks[j].first))
        return injectivity_failure{blocks[i].first, blocks[j].first,
                                   blocks[i].second, blocks[j].second};
    }
  }
  return std::nullopt;
}

std::optional<injectivity_failure> chain_collision(const pool_analysis& a,
                                                   const record_chain& rc) {
  for (const auto& rec : rc.records)
    if (const auto* b = std::get_if<block>(&rec))
      if (auto f = collision_for_id(a.pool(), b->id)) return f;
  return std::nullopt;
}

}  // namespace

preferred_round_audit audit_preferred_round(const pool_analysis& a,
                                            const honesty_map& honesty) {
  preferred_round_audit out;
  const auto& qcs = a.valid_qcs();
  for (member_t m = 0; m < honesty.size(); ++m) {
    if (!honesty.honest(m)) continue;
    std::vector<std::size_t> with_vote;
    for (std::size_t i = 0; i < qcs.size(); ++i)
      if (a.facts(i).in_store && vote_by(qcs[i], m)) with_vote.push_back(i);
    for (std::size_t i : with_vote) {
      if (!a.facts(i).commit_head) continue;
      const round_t committed_round = *a.facts(i).commit_head;
      for (std::size_t j : with_vote) {
        if (!(qcs[j].round > qcs[i].round)) continue;
        const round_t prev = a.facts(j).prev;
        if (committed_round <= prev) continue;
        if (a.facts(i).chain_has_collision || a.facts(j).chain_has_collision) {
          auto f = chain_collision(a, a.store().chain_to(record{qcs[i]}));
          if (!f) f = chain_collision(a, a.store().chain_to(record{qcs[j]}));
          if (f) {
            out.collisions.push_back(*f);
            continue;
          }
        }
        rule_violation viol;
        viol.member = m;
        viol.rule = voter_rule::preferred_round;
        viol.round = qcs[j].round;
        viol.v1 = *vote_by(qcs[i], m);
        viol.v2 = *vote_by(qcs[j], m);
        viol.qc1_cert = qcs[i].cert_block_id;
        viol.qc2_cert = qcs[j].cert_block_id;
        viol.committed_round = committed_round;
        viol.observed_prev = prev;
        out.violations.push_back(viol);
      }
    }
  }
  return out;
}

round_uniqueness_result certified_round_uniqueness(const pool_analysis& a) {
  const auto& qcs = a.valid_qcs();
  std::optional<injectivity_failure> collision;
  std::optional<std::pair<qc, qc>> conflict;
  std::map<round_t, std::vector<std::size_t>> by_round;
  for (std::size_t i = 0; i < qcs.size(); ++i)
    by_round[qcs[i].round].push_back(i);
  for (const auto& [round, idxs] : by_round) {
    for (std::size_t x = 0; x < idxs.size(); ++x) {
      for (std::size_t y = x + 1; y < idxs.size(); ++y) {
        const qc& q0 = qcs[idxs[x]];
        const qc& q1 = qcs[idxs[y]];
        if (q0.cert_block_id != q1.cert_block_id) {
          if (!conflict) conflict = std::make_pair(q0, q1);
        } else if (!collision) {
          collision = collision_for_id(a.pool(), q0.cert_block_id);
        }
      }
    }
  }
  // Collision evidence preempts a conflict report.
  if (collision)
    return {round_uniqueness_result::status::injectivity, collision,
            std::nullopt};
  if (conflict)
    return {round_uniqueness_result::status::conflict, std::nullopt, conflict};
  return {};
}

std::optional<injectivity_failure> find_injectivity_failure(
    const record_pool& pool) {
  const auto& blocks = pool.blocks();
  std::map<uid, std::size_t> first_with_id;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    auto [it, inserted] = first_with_id.emplace(blocks[i].first.id, i);
    if (!inserted) {
      const auto& prior = blocks[it->second];
      if (!(prior.first == blocks[i].first))
        return injectivity_failure{prior.first, blocks[i].first, prior.second,
                                   blocks[i].second};
    }
  }
  return std::nullopt;
}

audit_verdict commits_do_not_conflict(const pool_analysis& a) {
  const auto& commits = a.commits();
  for (std::size_t i = 0; i < commits.size(); ++i) {
    for (std::size_t j = i + 1; j < commits.size(); ++j) {
      if (block_in_chain(commits[i].committed, commits[j].chain)) continue;
      if (block_in_chain(commits[j].committed, commits[i].chain)) continue;
      audit_verdict v;
      if (auto f = find_injectivity_failure(a.pool())) {
        v.k = audit_verdict::kind::injectivity_failure;
        v.collision = *f;
      } else {
        v.k = audit_verdict::kind::conflicting_commits;
        v.conflict = conflicting_commits{commits[i], commits[j]};
      }
      return v;
    }
  }
  return {};
}

std::vector<complete_violation> audit_complete(const pool_analysis& a,
                                               const honesty_map& honesty) {
  std::vector<complete_violation> out;
  for (std::size_t i = 0; i < a.valid_qcs().size(); ++i) {
    const qc& q = a.valid_qcs()[i];
    for (const auto& v : q.votes) {
      if (!honesty.honest(v.member)) continue;
      // The voted block must sit in the pool-derived tree, which by
      // construction means a full chain of sent records reaches it.
      if (!a.store().block_with_id_round(v.block_uid, q.round))
        out.push_back(complete_violation{v.member, v, q.cert_block_id});
    }
  }
  return out;
}

conflict_explanation cross_check_conflict_pair(const commit_rule& cr1,
                                               const commit_rule& cr2,
                                               const pool_analysis& a,
                                               const honesty_map& honesty) {
  if (block_in_chain(cr1.committed, cr2.chain) ||
      block_in_chain(cr2.committed, cr1.chain))
    throw std::invalid_argument(
        "cross_check_conflict_pair: commits do not conflict");

  const qc& h1 = cr1.three.pairs.back().second;
  const qc& h2 = cr2.three.pairs.back().second;
  std::vector<member_t> m1, m2;
  for (const auto& v : h1.votes) m1.push_back(v.member);
  for (const auto& v : h2.votes) m2.push_back(v.member);

  conflict_explanation ex;
  auto honest = quorum_intersection_honest(m1, m2, honesty, a.config());
  if (!honest) {
    ex.text = "no honest member in quorum intersection; byzantine budget exceeded";
    return ex;
  }
  ex.member = *honest;
  for (const auto& viol : audit_votes_only_once(a, honesty))
    if (viol.member == *honest) ex.rule = voter_rule::votes_only_once;
  if (!ex.rule) {
    for (const auto& viol : audit_preferred_round(a, honesty).violations)
      if (viol.member == *honest) ex.rule = voter_rule::preferred_round;
  }
  std::ostringstream os;
  if (ex.rule) {
    os << "honest member " << *honest << " in both commit quorums violated "
       << to_string(*ex.rule);
  } else {
    // The shared member is clean: the intersection assumption failed for a
    // deeper pair of certificates along the diverging chains, which only an
    // exceeded byzantine budget makes possible.
    os << "honest member " << *honest
       << " is in both commit quorums but violated no rule; "
       << "byzantine budget exceeded deeper in the diverging chains";
  }
  ex.text = os.str();
  return ex;
}

// ---------------------------------------------------------------------------
// Commit certificates.

std::string cert_error::name() const {
  std::ostringstream os;
  switch (code) {
    case cert_error_code::too_short: return "TooShort";
    case cert_error_code::not_contiguous: return "NotContiguous";
    case cert_error_code::wrong_claimed_block: return "WrongClaimedBlock";
    case cert_error_code::bad_shape:
      os << "BadShape position=" << position;
      return os.str();
    case cert_error_code::bad_block_id:
      os << "BadBlockId position=" << position;
      return os.str();
    case cert_error_code::bad_link:
      os << "BadLink position=" << position
         << " clause=" << (clause ? to_string(*clause) : "?");
      return os.str();
    case cert_error_code::bad_qc:
      os << "BadQC position=" << position
         << " reason=" << (qc_reason ? to_string(qc_reason->code) : "?");
      return os.str();
  }
  return "?";
}

result<uid, cert_error> verify_commit_certificate(
    const commit_certificate& cert, const epoch_config& cfg, hash_mode mode,
    const vote_evidence_fn& evidence) {
  const auto& rs = cert.records;
  if (rs.empty()) return cert_error{cert_error_code::too_short};

  std::size_t start = 0;
  if (kind_of(rs[0]) == record_kind::genesis) start = 1;
  const std::size_t n = rs.size() - start;
  for (std::size_t i = 0; i < n; ++i) {
    const auto expect = i % 2 == 0 ? record_kind::block : record_kind::qc;
    if (kind_of(rs[start + i]) != expect)
      return cert_error{cert_error_code::bad_shape, start + i};
  }
  if (n % 2 != 0)  // must end in a QC
    return cert_error{cert_error_code::bad_shape, rs.size() - 1};
  if (n < 6) return cert_error{cert_error_code::too_short};

  // Ids are digests of content in any concrete instantiation; re-derive them
  // so content edits below the certificate origin cannot hide.
  for (std::size_t i = start; i < rs.size(); i += 2) {
    if (!block_id_consistent(std::get<block>(rs[i]), mode))
      return cert_error{cert_error_code::bad_block_id, i};
  }

  for (std::size_t i = 1; i < rs.size(); ++i) {
    auto w = extends_check(rs[i - 1], rs[i]);
    if (!w)
      return cert_error{cert_error_code::bad_link, i, w.error(), std::nullopt};
  }

  for (std::size_t i = start + 1; i < rs.size(); i += 2) {
    auto ok = validate_qc(std::get<qc>(rs[i]), cfg, evidence);
    if (!ok)
      return cert_error{cert_error_code::bad_qc, i, std::nullopt, ok.error()};
  }

  const block& b2 = std::get<block>(rs[rs.size() - 2]);
  const block& b1 = std::get<block>(rs[rs.size() - 4]);
  const block& b0 = std::get<block>(rs[rs.size() - 6]);
  if (b0.round + 1 != b1.round || b1.round + 1 != b2.round)
    return cert_error{cert_error_code::not_contiguous};

  if (cert.claim != b0.id)
    return cert_error{cert_error_code::wrong_claimed_block};
  return b0.id;
}

commit_certificate make_certificate(const commit_rule& cr) {
  commit_certificate cert;
  for (const auto& [b, q] : cr.three.pairs) {
    cert.records.push_back(record{b});
    cert.records.push_back(record{q});
  }
  cert.claim = cr.committed.id;
  return cert;
}

std::string format_certificate(const commit_certificate& cert) {
  std::string out;
  for (const auto& r : cert.records) {
    out += format_record_line(r);
    out += '\n';
  }
  out += "claim=" + cert.claim.hex() + "\n";
  return out;
}

result<commit_certificate, std::string> parse_certificate(
    std::string_view text) {
  commit_certificate cert;
  bool claim_seen = false;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (line.rfind("claim=", 0) == 0) {
      auto u = uid::from_hex(std::string_view(line).substr(6));
      if (!u) return std::string("bad claim hex");
      cert.claim = *u;
      claim_seen = true;
    } else {
      auto rec = parse_record_line(line);
      if (!rec) return rec.error();
      cert.records.push_back(rec.value());
    }
  }
  if (!claim_seen) return std::string("missing claim= line");
  if (cert.records.empty()) return std::string("certificate has no records");
  return cert;
}

}  // namespace hotsafe
