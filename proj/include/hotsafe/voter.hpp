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

#ifndef HOTSAFE_VOTER_HPP
#define HOTSAFE_VOTER_HPP

#include "hotsafe/chains.hpp"
#include "hotsafe/result.hpp"
#include "hotsafe/types.hpp"

namespace hotsafe {

/// Per-peer voting safety state; both rounds only ever increase.
struct voter_safety_state {
  round_t last_voted_round = 0;
  round_t preferred_round = 0;
};

enum class refusal_code {
  already_voted_this_round,
  below_preferred_round,
  unknown_parent,
  invalid_proposal,
};

struct refusal {
  refusal_code code;
  std::optional<extends_error> clause;  // for invalid_proposal
};

const char* to_string(refusal_code c);

/**
 * Voting decision for an honest peer. Produces a vote iff the proposal's
 * round is strictly above the last voted round (one vote per round,
 * increasing) and the round of the certificate the proposal extends (0 for
 * genesis) is at least the preferred round.
 *
 * @pre the proposal's parent link is resolvable in `store`
 */
result<vote, refusal> should_vote(const voter_safety_state& state,
                                  member_t self, const block& proposal,
                                  const record_store& store);

/**
 * State transition after voting for `voted`: last voted round becomes the
 * proposal's round; the preferred round rises to the round of the proposal's
 * grandparent block (0 when the lineage reaches genesis within two blocks).
 * Round contiguity is not required for the update.
 *
 * @pre should_vote succeeded for `voted` against this store
 */
voter_safety_state update_safety_state(voter_safety_state state,
                                       const block& voted,
                                       const record_store& store);

}  // namespace hotsafe

#endif
