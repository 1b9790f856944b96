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

#include "hotsafe/quorum.hpp"

#include <algorithm>
#include <stdexcept>

namespace hotsafe {

result<epoch_config, std::string> epoch_config::make_count(
    std::uint64_t epoch_id, member_t authors_n, std::uint64_t f) {
  if (authors_n == 0) return std::string("authors_n must be positive");
  if (!(static_cast<std::uint64_t>(authors_n) > 3 * f))
    return std::string("count model requires authors_n > 3*f");
  epoch_config cfg;
  cfg.epoch_id_ = epoch_id;
  cfg.model_ = quorum_model::count_two_thirds;
  cfg.powers_.assign(authors_n, 1);
  cfg.total_power_ = authors_n;
  cfg.budget_ = f;
  return cfg;
}

result<epoch_config, std::string> epoch_config::make_weighted(
    std::uint64_t epoch_id, std::vector<std::uint64_t> powers,
    std::uint64_t byzantine_power_budget) {
  if (powers.empty()) return std::string("voting_power must be non-empty");
  std::uint64_t total = 0;
  for (auto p : powers) {
    if (p == 0) return std::string("all voting powers must be >= 1");
    total += p;
  }
  if (!(total > 3 * byzantine_power_budget))
    return std::string("weighted model requires total power > 3*byz_power");
  epoch_config cfg;
  cfg.epoch_id_ = epoch_id;
  cfg.model_ = quorum_model::weighted_two_thirds;
  cfg.powers_ = std::move(powers);
  cfg.total_power_ = total;
  cfg.budget_ = byzantine_power_budget;
  return cfg;
}

std::uint64_t honesty_map::byzantine_count() const {
  std::uint64_t n = 0;
  for (bool b : byz_) n += b ? 1 : 0;
  return n;
}

std::uint64_t honesty_map::byzantine_power(const epoch_config& cfg) const {
  std::uint64_t p = 0;
  for (member_t m = 0; m < size(); ++m)
    if (!honest(m)) p += cfg.power(m);
  return p;
}

bool is_quorum(std::span<const member_t> members, const epoch_config& cfg) {
  std::uint64_t sum = 0;
  std::uint64_t mask = 0;  // dedup guard; configs are capped well below 64
  for (member_t m : members) {
    if (!cfg.valid_member(m))
      throw std::out_of_range("is_quorum: member out of range");
    if (cfg.authors_n() <= 64) {
      const std::uint64_t bit = 1ull << m;
      if (mask & bit) continue;
      mask |= bit;
    }
    sum += cfg.power(m);
  }
  // Both models: combined weight strictly above two thirds of the total,
  // decided in integer arithmetic. With uniform unit powers this is the
  // count threshold floor(2n/3)+1.
  return 3 * sum > 2 * cfg.total_power();
}

namespace {

std::vector<member_t> mask_to_members(std::uint32_t mask, member_t n) {
  std::vector<member_t> out;
  for (member_t m = 0; m < n; ++m)
    if (mask & (1u << m)) out.push_back(m);
  return out;
}

std::uint64_t mask_power(std::uint32_t mask, const epoch_config& cfg) {
  std::uint64_t p = 0;
  for (member_t m = 0; m < cfg.authors_n(); ++m)
    if (mask & (1u << m)) p += cfg.power(m);
  return p;
}

}  // namespace

bft_check_report check_bft_assumption(const epoch_config& cfg) {
  const member_t n = cfg.authors_n();
  if (n > 12) return {bft_check_report::status::too_large, std::nullopt};

  // Budget is measured in members for the count model, in power otherwise.
  const bool count_model = cfg.model() == quorum_model::count_two_thirds;

  const std::uint32_t limit = 1u << n;
  std::vector<std::uint32_t> quorums;
  for (std::uint32_t m = 0; m < limit; ++m) {
    if (3 * mask_power(m, cfg) > 2 * cfg.total_power()) quorums.push_back(m);
  }
  // A pair of quorums violates the assumption iff their whole intersection
  // fits inside an admissible byzantine set; the intersection itself is then
  // the witnessing byzantine set.
  for (std::size_t i = 0; i < quorums.size(); ++i) {
    for (std::size_t j = i; j < quorums.size(); ++j) {
      const std::uint32_t inter = quorums[i] & quorums[j];
      const std::uint64_t weight =
          count_model ? static_cast<std::uint64_t>(__builtin_popcount(inter))
                      : mask_power(inter, cfg);
      if (weight <= cfg.byzantine_budget()) {
        bft_counterexample cex;
        cex.quorum1 = mask_to_members(quorums[i], n);
        cex.quorum2 = mask_to_members(quorums[j], n);
        cex.byzantine = mask_to_members(inter, n);
        return {bft_check_report::status::violated, cex};
      }
    }
  }
  return {bft_check_report::status::ok, std::nullopt};
}

std::optional<member_t> quorum_intersection_honest(
    std::span<const member_t> a, std::span<const member_t> b,
    const honesty_map& honesty, const epoch_config& cfg) {
  if (!is_quorum(a, cfg) || !is_quorum(b, cfg))
    throw std::invalid_argument(
        "quorum_intersection_honest: inputs must be quorums");
  std::vector<member_t> sa(a.begin(), a.end());
  std::vector<member_t> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  std::vector<member_t> inter;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                        std::back_inserter(inter));
  for (member_t m : inter)
    if (honesty.honest(m)) return m;  // lowest index wins: inter is sorted
  return std::nullopt;
}

}  // namespace hotsafe
