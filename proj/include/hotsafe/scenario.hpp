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

#ifndef HOTSAFE_SCENARIO_HPP
#define HOTSAFE_SCENARIO_HPP

#include <string>
#include <string_view>

#include "hotsafe/result.hpp"
#include "hotsafe/sim.hpp"

namespace hotsafe {

// Plain-text key=value scenario files. Keys: epoch_id, authors_n,
// voting_power (comma list, default uniform), quorum_model (count|weighted),
// f or byz_power, byzantine (comma list), adversary (comma list aligned with
// byzantine), steps, drop_prob, dup_prob, max_delay, seed, hash_mode
// (strong|weak:k). Blank lines and '#' comments allowed; unknown keys
// rejected.
result<scenario, std::string> parse_scenario(std::string_view text);

/// Epoch configuration subset of the scenario format, for commands that do
/// not simulate (steps/seed/network keys optional).
struct epoch_settings {
  epoch_config cfg;
  hash_mode mode = hash_mode::strong();
};
result<epoch_settings, std::string> parse_epoch_settings(std::string_view text);

result<void, std::string> read_file(const std::string& path, std::string& out);
result<void, std::string> write_file(const std::string& path,
                                     std::string_view contents);

}  // namespace hotsafe

#endif
