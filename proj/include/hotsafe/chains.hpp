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

#ifndef HOTSAFE_CHAINS_HPP
#define HOTSAFE_CHAINS_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hotsafe/core.hpp"
#include "hotsafe/quorum.hpp"
#include "hotsafe/result.hpp"
#include "hotsafe/types.hpp"

namespace hotsafe {

/// Path of records with an extends witness between each adjacent pair.
/// `full` marks chains whose origin is genesis; partial chains start at an
/// arbitrary record.
struct record_chain {
  std::vector<record> records;  // origin first
  bool full = true;

  std::size_t length() const { return records.size(); }
  const record& last() const { return records.back(); }
};

enum class insert_error_code { orphan, invalid_extends, invalid_qc };

struct insert_error {
  insert_error_code code;
  std::optional<extends_error> clause;  // for invalid_extends
  std::optional<qc_error> qc_reason;    // for invalid_qc
};

std::string to_string(const insert_error& e);

/**
 * Tree of validated records rooted at genesis. Each stored record keeps the
 * single extends witness under which it was inserted, so parent walks are
 * deterministic. Under strong hashing block ids are unique keys; under weak
 * hashing distinct blocks sharing an id are stored side by side and surfaced
 * through collision evidence rather than branching the walk.
 *
 * Single writer; reads are safe between writes.
 */
class record_store {
 public:
  record_store(epoch_config cfg, hash_mode mode,
               vote_evidence_fn evidence = accept_all_votes());

  /**
   * Stores `r` iff an extends witness to an already-stored record validates
   * (QCs must additionally pass coherence). Re-inserting an identical record
   * is a no-op success.
   */
  result<void, insert_error> insert(const record& r);

  bool contains(const record& r) const;
  std::size_t size() const { return nodes_.size(); }  // includes genesis

  /**
   * @pre r is stored (throws std::invalid_argument otherwise)
   * @post the unique parent path from genesis to r; [genesis] for genesis
   */
  record_chain chain_to(const record& r) const;

  /// Blocks stored under this id (more than one only with weak hashing).
  std::vector<block> blocks_with_id(const uid& id) const;
  std::optional<block> block_with_id_round(const uid& id, round_t round) const;

  /// QCs whose certified round is the highest in the store.
  std::optional<qc> highest_qc() const;

  /// Stored records that `r` could validly extend, in insertion order. More
  /// than one block entry is only possible under weak hashing.
  std::vector<record> valid_parent_alternatives(const record& r) const;

  std::vector<record> all_records() const;  // insertion order, genesis first
  std::vector<qc> all_qcs() const;

  /// One line per record: kind, id, round, parent id, then full payload/votes.
  std::string dump() const;

  const epoch_config& config() const { return cfg_; }
  hash_mode mode() const { return mode_; }
  const vote_evidence_fn& evidence() const { return evidence_; }

 private:
  struct node {
    record rec;
    std::size_t parent = 0;  // index into nodes_; genesis is node 0
    extends_kind link = extends_kind::genesis_block;
  };

  std::optional<std::size_t> find_node(const record& r) const;
  // Parent candidates a record could attach to, in insertion order.
  std::vector<std::size_t> parent_candidates(const record& r) const;

  epoch_config cfg_;
  hash_mode mode_;
  vote_evidence_fn evidence_;
  std::vector<node> nodes_;                         // nodes_[0] is genesis
  std::map<uid, std::vector<std::size_t>> blocks_by_id_;
  std::map<uid, std::vector<std::size_t>> qcs_by_cert_;
};

/**
 * Round of the certificate the final block of `rc` extends; 0 when that block
 * extends genesis.
 *
 * @pre rc ends in a QC preceded by its block (throws std::invalid_argument)
 */
round_t prev_round(const record_chain& rc);

enum class chain_relation { simple, contig };

/// Suffix of k (block, certificate) pairs ending a chain; `contig` additionally
/// requires consecutive block rounds.
struct k_chain {
  chain_relation relation = chain_relation::contig;
  std::vector<std::pair<block, qc>> pairs;  // earliest first

  std::size_t k() const { return pairs.size(); }
  /// n-th block counted from the end (0 = newest).
  const block& block_from_end(std::size_t n) const {
    return pairs.at(pairs.size() - 1 - n).first;
  }
};

/**
 * The k-suffix interpretation ending at `q`: the last k (block, QC) pairs of
 * the stored chain to q, if they exist and satisfy the relation.
 *
 * @pre q is stored (throws std::invalid_argument otherwise)
 */
std::optional<k_chain> find_kchain(const record_store& store, const qc& q,
                                   std::size_t k, chain_relation rel);

/// A contiguous 3-chain; its head block (and ancestors) are committed.
struct commit_rule {
  record_chain chain;  // chain ending at the 3-chain's final QC
  k_chain three;
  block committed;  // == three.block_from_end(2)
};

/**
 * Commit decision for `q`: a contiguous 3-suffix ending at q commits the
 * suffix's head block.
 *
 * @pre q is stored (throws std::invalid_argument otherwise)
 */
std::optional<commit_rule> detect_commit(const record_store& store, const qc& q);

/// Pointwise equivalence: equal length, equal blocks, and certificates that
/// certify the same block id (vote sets may differ).
bool chains_equivalent(const record_chain& a, const record_chain& b);

/// True iff some block position of `rc` holds `b`. Equivalent chains carry
/// identical blocks pointwise, so membership through an equivalent chain
/// reduces to this positional scan.
bool block_in_chain(const block& b, const record_chain& rc);

struct injectivity_evidence {
  block b0;
  block b1;  // distinct content, equal id
};

/**
 * Verifies that every way of resolving same-id parent ambiguity along the
 * chain to `r` yields pointwise-equivalent chains; otherwise returns the two
 * distinct blocks sharing an id. Always clean under strong hashing.
 *
 * @pre r is stored (throws std::invalid_argument otherwise)
 */
std::optional<injectivity_evidence> check_rc_irrelevance(
    const record_store& store, const record& r);

// Record dump lines shared by store dumps and certificate files.
std::string format_record_line(const record& r);
result<record, std::string> parse_record_line(std::string_view line);

}  // namespace hotsafe

#endif
