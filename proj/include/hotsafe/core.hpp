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

#ifndef HOTSAFE_CORE_HPP
#define HOTSAFE_CORE_HPP

#include <functional>
#include <span>

#include "hotsafe/quorum.hpp"
#include "hotsafe/result.hpp"
#include "hotsafe/types.hpp"

namespace hotsafe {

/**
 * Canonical block encoding. Layout is bit-exact and stable:
 *   0x42 | round (8B big-endian) | prev flag (0x00/0x01) [| 32B prev id]
 *        | payload length (4B big-endian) | payload
 * The block's own id is not part of the encoding.
 *
 * @throws std::length_error if the payload exceeds 2^32 - 1 bytes
 */
std::vector<std::uint8_t> canonical_encode(const block& b);

/// SHA-256 of the encoding; weak modes zero all but the first `kept` bytes.
uid assign_id(std::span<const std::uint8_t> enc, hash_mode mode);

/// Builds a block whose id is derived from its content under `mode`.
block make_block(round_t round, std::optional<uid> prev_qc,
                 std::vector<std::uint8_t> payload, hash_mode mode);

/// True iff the block's id field matches the digest of its content.
bool block_id_consistent(const block& b, hash_mode mode);

// ---------------------------------------------------------------------------
// The extends relation between records: genesis<-block, qc<-block, block<-qc.

enum class extends_kind { genesis_block, qc_block, block_qc };

enum class extends_error {
  round_not_greater,
  prev_qc_mismatch,
  round_mismatch,
  id_mismatch,
  shape_mismatch,
};

const char* to_string(extends_kind k);
const char* to_string(extends_error e);

/**
 * Decides whether `next` extends `prev`, naming the witnessing constructor.
 *
 * @post at most one constructor shape can match a given (prev, next) pair;
 *       on failure the error names the first violated clause
 */
result<extends_kind, extends_error> extends_check(const record& prev,
                                                  const record& next);

// ---------------------------------------------------------------------------
// QC coherence.

enum class qc_error_code {
  duplicate_member,      // C1
  member_out_of_range,   // C1
  not_a_quorum,          // C1
  wrong_block_id,        // C2
  wrong_round,           // C3
  no_send_evidence,      // C4
};

struct qc_error {
  qc_error_code code;
  member_t member = 0;  // offending member for the per-vote codes
};

const char* to_string(qc_error_code c);

/// Predicate telling whether a vote was genuinely emitted by its member.
using vote_evidence_fn = std::function<bool(const vote&)>;

/// Evidence that accepts every vote (for fixtures and non-participant paths
/// where authenticity is established out of band).
vote_evidence_fn accept_all_votes();

/**
 * Checks the four QC coherence clauses in order: the voters form a quorum of
 * distinct members, every vote names the certified block, every vote carries
 * the QC's round, and every vote has send evidence.
 */
result<void, qc_error> validate_qc(const qc& q, const epoch_config& cfg,
                                   const vote_evidence_fn& evidence);

}  // namespace hotsafe

#endif
