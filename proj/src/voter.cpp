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

#include "hotsafe/voter.hpp"

#include <stdexcept>

namespace hotsafe {

const char* to_string(refusal_code c) {
  switch (c) {
    case refusal_code::already_voted_this_round: return "AlreadyVotedThisRound";
    case refusal_code::below_preferred_round: return "BelowPreferredRound";
    case refusal_code::unknown_parent: return "UnknownParent";
    case refusal_code::invalid_proposal: return "InvalidProposal";
  }
  return "?";
}

namespace {

// Round of the certificate the proposal extends (0 for a genesis link), or a
// refusal when the link cannot be resolved and validated against the store.
result<round_t, refusal> resolve_parent_round(const block& proposal,
                                              const record_store& store) {
  if (!proposal.prev_qc) {
    auto w = extends_check(record{genesis_t{}}, record{proposal});
    if (!w)
      return refusal{refusal_code::invalid_proposal, w.error()};
    return round_t{0};
  }
  auto parents = store.valid_parent_alternatives(record{proposal});
  if (!parents.empty()) return std::get<qc>(parents.front()).round;
  // No valid parent: distinguish a missing certificate from a bad link.
  std::optional<extends_error> first_clause;
  bool saw_candidate = false;
  for (const qc& q : store.all_qcs()) {
    if (q.cert_block_id == *proposal.prev_qc) {
      saw_candidate = true;
      auto w = extends_check(record{q}, record{proposal});
      if (!w && !first_clause) first_clause = w.error();
    }
  }
  if (!saw_candidate) return refusal{refusal_code::unknown_parent, std::nullopt};
  return refusal{refusal_code::invalid_proposal, first_clause};
}

}  // namespace

result<vote, refusal> should_vote(const voter_safety_state& state,
                                  member_t self, const block& proposal,
                                  const record_store& store) {
  auto parent_round = resolve_parent_round(proposal, store);
  if (!parent_round) return parent_round.error();
  if (!(proposal.round > state.last_voted_round))
    return refusal{refusal_code::already_voted_this_round, std::nullopt};
  if (!(parent_round.value() >= state.preferred_round))
    return refusal{refusal_code::below_preferred_round, std::nullopt};
  return vote{proposal.round, self, proposal.id};
}

voter_safety_state update_safety_state(voter_safety_state state,
                                       const block& voted,
                                       const record_store& store) {
  state.last_voted_round = voted.round;

  // Two steps back: the block certified by the certificate that the voted
  // block's parent extends. The rounds need not be contiguous.
  round_t grandparent_round = 0;
  if (voted.prev_qc) {
    auto parents = store.valid_parent_alternatives(record{voted});
    if (parents.empty())
      throw std::logic_error("update_safety_state: parent lineage missing");
    const qc& parent_qc = std::get<qc>(parents.front());
    auto parent_block =
        store.block_with_id_round(parent_qc.cert_block_id, parent_qc.round);
    if (!parent_block)
      throw std::logic_error("update_safety_state: parent block missing");
    if (parent_block->prev_qc) {
      auto gp = store.valid_parent_alternatives(record{*parent_block});
      if (gp.empty())
        throw std::logic_error("update_safety_state: grandparent missing");
      grandparent_round = std::get<qc>(gp.front()).round;
    }
  }
  if (grandparent_round > state.preferred_round)
    state.preferred_round = grandparent_round;
  return state;
}

}  // namespace hotsafe
