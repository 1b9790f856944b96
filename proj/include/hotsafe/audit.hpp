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

#ifndef HOTSAFE_AUDIT_HPP
#define HOTSAFE_AUDIT_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hotsafe/chains.hpp"
#include "hotsafe/core.hpp"
#include "hotsafe/quorum.hpp"
#include "hotsafe/types.hpp"

namespace hotsafe {

/// Where a pool record came from: who sent the containing message, and when.
struct provenance {
  member_t sender = 0;
  std::uint64_t step = 0;
};

/**
 * The abstract records carried by messages that were actually sent, with
 * per-record provenance. Safety verdicts are rendered over this set, never
 * over any single peer's view. Identical records are kept once (first
 * provenance wins); the vote index records which votes each member really
 * emitted.
 */
class record_pool {
 public:
  void add_block(const block& b, provenance p);
  void add_qc(const qc& q, provenance p);
  void add_vote_message(member_t sender, const vote& v, provenance p);

  const std::vector<std::pair<block, provenance>>& blocks() const {
    return blocks_;
  }
  const std::vector<std::pair<qc, provenance>>& qcs() const { return qcs_; }

  /// True iff this exact vote appears in a vote message sent by its member.
  bool vote_evidence(const vote& v) const { return evidence_.count(v) > 0; }
  vote_evidence_fn evidence_fn() const;

  std::vector<block> blocks_with_id(const uid& id) const;

  std::size_t record_count() const { return blocks_.size() + qcs_.size(); }

  std::string dump() const;

 private:
  std::vector<std::pair<block, provenance>> blocks_;
  std::vector<std::pair<qc, provenance>> qcs_;
  std::set<vote> evidence_;
};

enum class voter_rule { votes_only_once, preferred_round };
const char* to_string(voter_rule r);

struct rule_violation {
  member_t member = 0;
  voter_rule rule = voter_rule::votes_only_once;
  round_t round = 0;      // vote round (votes_only_once) / later vote round
  vote v1{}, v2{};        // the offending vote pair
  uid qc1_cert{}, qc2_cert{};
  round_t committed_round = 0;   // preferred_round evidence
  round_t observed_prev = 0;     // preferred_round evidence
};

struct injectivity_failure {
  block b0, b1;        // distinct content, equal id, both in the pool
  provenance p0, p1;
};

struct complete_violation {
  member_t member = 0;
  vote v{};
  uid qc_cert{};
};

/**
 * Pool-wide analysis shared by the audit passes: the deterministic record
 * tree rebuilt from the pool, the set of coherent QCs, per-QC chain facts and
 * every commit decision derivable with all records in the pool.
 */
class pool_analysis {
 public:
  pool_analysis(const record_pool& pool, const epoch_config& cfg,
                hash_mode mode);

  const record_store& store() const { return store_; }
  const std::vector<qc>& valid_qcs() const { return valid_qcs_; }
  const std::vector<commit_rule>& commits() const { return commits_; }

  struct qc_facts {
    bool in_store = false;
    round_t prev = 0;                   // prev_round of the chain to this QC
    std::optional<round_t> commit_head; // round committed by the 3-suffix here
    bool chain_has_collision = false;   // some chain id maps to >1 pool block
  };
  /// Facts for valid_qcs()[i].
  const qc_facts& facts(std::size_t i) const { return facts_.at(i); }

  const record_pool& pool() const { return pool_; }
  const epoch_config& config() const { return cfg_; }
  hash_mode mode() const { return mode_; }

 private:
  const record_pool& pool_;
  epoch_config cfg_;
  hash_mode mode_;
  record_store store_;
  std::vector<qc> valid_qcs_;
  std::vector<qc_facts> facts_;
  std::vector<commit_rule> commits_;
};

/// Honest members must never emit two different votes for one round.
std::vector<rule_violation> audit_votes_only_once(const pool_analysis& a,
                                                  const honesty_map& honesty);

struct preferred_round_audit {
  std::vector<rule_violation> violations;
  std::vector<injectivity_failure> collisions;  // ambiguity met during walks
};

/// After contributing to a certificate that heads a contiguous 3-chain, an
/// honest member's later votes must extend a certificate whose round is at
/// least the committed block's round.
preferred_round_audit audit_preferred_round(const pool_analysis& a,
                                            const honesty_map& honesty);

struct round_uniqueness_result {
  enum class status { ok, injectivity, conflict } st = status::ok;
  std::optional<injectivity_failure> collision;
  std::optional<std::pair<qc, qc>> conflict;
};

/// At most one certified block per round, with collision evidence preferred
/// over a conflict report when both readings exist.
round_uniqueness_result certified_round_uniqueness(const pool_analysis& a);

/// Two distinct pool blocks sharing one id, if any, with both provenances.
std::optional<injectivity_failure> find_injectivity_failure(
    const record_pool& pool);

struct conflicting_commits {
  commit_rule cr1, cr2;
};

struct audit_verdict {
  enum class kind {
    safe,
    rule_violation,
    conflicting_commits,
    injectivity_failure,
  } k = kind::safe;
  std::optional<rule_violation> violation;
  std::optional<conflicting_commits> conflict;
  std::optional<injectivity_failure> collision;
};

const char* to_string(audit_verdict::kind k);

/**
 * Pairwise containment over every commit derivable from the pool: for each
 * pair, one committed block must lie on the other's chain. A failing pair is
 * reported as collision evidence when the pool holds one, else as conflicting
 * commits. Safe when all pairs pass.
 */
audit_verdict commits_do_not_conflict(const pool_analysis& a);

/// Every honest vote inside a coherent pool QC must be backed by a full
/// in-pool chain to the voted block.
std::vector<complete_violation> audit_complete(const pool_analysis& a,
                                               const honesty_map& honesty);

struct conflict_explanation {
  std::optional<member_t> member;     // honest member shared by both quorums
  std::optional<voter_rule> rule;     // rule that member's votes violated
  std::string text;
};

/**
 * Diagnostic for an already-rendered conflicting-commits verdict: names the
 * honest member common to the two commit-heading certificates and the rule
 * that member broke, or reports that no honest member exists in the
 * intersection (the assumption breach itself).
 *
 * @pre the two commit rules genuinely conflict (throws std::invalid_argument)
 */
conflict_explanation cross_check_conflict_pair(const commit_rule& cr1,
                                               const commit_rule& cr2,
                                               const pool_analysis& a,
                                               const honesty_map& honesty);

// ---------------------------------------------------------------------------
// Commit certificates: the non-participant verification path.

/// Self-contained alternating partial chain ending in a QC, plus the id the
/// presenter claims is committed.
struct commit_certificate {
  std::vector<record> records;
  uid claim{};
};

enum class cert_error_code {
  too_short,
  bad_shape,
  bad_block_id,
  bad_link,
  bad_qc,
  not_contiguous,
  wrong_claimed_block,
};

struct cert_error {
  cert_error_code code;
  std::size_t position = 0;             // record index in the certificate
  std::optional<extends_error> clause;  // bad_link
  std::optional<qc_error> qc_reason;    // bad_qc
  std::string name() const;             // e.g. "BadQC position=3 reason=NotAQuorum"
};

/**
 * Validates a certificate without any chain to genesis: record alternation,
 * block id digests, every extends witness, every QC's coherence, contiguity
 * of the final three block rounds, and the claimed head.
 *
 * @post on success the returned id is the committed block's id (the head of
 *       the certificate's final 3-chain)
 */
result<uid, cert_error> verify_commit_certificate(
    const commit_certificate& cert, const epoch_config& cfg, hash_mode mode,
    const vote_evidence_fn& evidence);

/// Minimal certificate for a commit: the final three (block, QC) pairs.
commit_certificate make_certificate(const commit_rule& cr);

std::string format_certificate(const commit_certificate& cert);
result<commit_certificate, std::string> parse_certificate(std::string_view text);

}  // namespace hotsafe

#endif
