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

#ifndef HOTSAFE_QUORUM_HPP
#define HOTSAFE_QUORUM_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hotsafe/result.hpp"
#include "hotsafe/types.hpp"

namespace hotsafe {

enum class quorum_model { count_two_thirds, weighted_two_thirds };

/**
 * Per-epoch membership and quorum parameters.
 *
 * Count model: n members of equal weight, at most f byzantine, n > 3f; a set
 * is a quorum iff it contains strictly more than 2n/3 distinct members.
 * Weighted model: per-member positive voting power; a set is a quorum iff its
 * combined power strictly exceeds two thirds of the total. Both thresholds
 * are evaluated in exact integer arithmetic (3*sum > 2*total).
 */
class epoch_config {
 public:
  epoch_config() = default;  // empty; build real configs through the factories

  static result<epoch_config, std::string> make_count(std::uint64_t epoch_id,
                                                      member_t authors_n,
                                                      std::uint64_t f);
  static result<epoch_config, std::string> make_weighted(
      std::uint64_t epoch_id, std::vector<std::uint64_t> powers,
      std::uint64_t byzantine_power_budget);

  std::uint64_t epoch_id() const { return epoch_id_; }
  member_t authors_n() const { return static_cast<member_t>(powers_.size()); }
  quorum_model model() const { return model_; }
  std::uint64_t power(member_t m) const { return powers_.at(m); }
  std::uint64_t total_power() const { return total_power_; }

  /// f in the count model, maximum byzantine voting power in the weighted one.
  std::uint64_t byzantine_budget() const { return budget_; }

  bool valid_member(member_t m) const { return m < powers_.size(); }

 private:
  std::uint64_t epoch_id_ = 0;
  quorum_model model_ = quorum_model::count_two_thirds;
  std::vector<std::uint64_t> powers_;
  std::uint64_t total_power_ = 0;
  std::uint64_t budget_ = 0;
};

/// Simulation ground truth about who misbehaves; never exposed to peer logic.
class honesty_map {
 public:
  honesty_map() = default;
  explicit honesty_map(member_t n) : byz_(n, false) {}

  void set_byzantine(member_t m) { byz_.at(m) = true; }
  bool honest(member_t m) const { return !byz_.at(m); }
  member_t size() const { return static_cast<member_t>(byz_.size()); }
  std::uint64_t byzantine_count() const;
  std::uint64_t byzantine_power(const epoch_config& cfg) const;

 private:
  std::vector<bool> byz_;
};

/**
 * @pre members are distinct and in range (throws std::out_of_range otherwise)
 * @post monotone: adding members never turns true into false
 */
bool is_quorum(std::span<const member_t> members, const epoch_config& cfg);

struct bft_counterexample {
  std::vector<member_t> quorum1;
  std::vector<member_t> quorum2;
  std::vector<member_t> byzantine;
};

struct bft_check_report {
  enum class status { ok, violated, too_large } st = status::ok;
  std::optional<bft_counterexample> counterexample;  // set when violated
};

/**
 * Exhaustively verifies that any two quorums intersect in at least one member
 * that cannot be byzantine within the configured budget. Capped at 12 members.
 */
bft_check_report check_bft_assumption(const epoch_config& cfg);

/**
 * Lowest-index honest member of a `intersect` b, if one exists.
 *
 * @pre both inputs are quorums (throws std::invalid_argument otherwise)
 * @post nullopt means the intersection is entirely byzantine: an assumption
 *       breach for the caller to report, not a crash
 */
std::optional<member_t> quorum_intersection_honest(
    std::span<const member_t> a, std::span<const member_t> b,
    const honesty_map& honesty, const epoch_config& cfg);

}  // namespace hotsafe

#endif
