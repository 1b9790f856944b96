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

#ifndef HOTSAFE_TYPES_HPP
#define HOTSAFE_TYPES_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hotsafe {

using round_t = std::uint64_t;   // protocol round; 0 is reserved for the genesis context
using member_t = std::uint32_t;  // index into an epoch's member list

/// 32-byte record identifier with byte equality.
struct uid {
  std::array<std::uint8_t, 32> bytes{};

  auto operator<=>(const uid&) const = default;

  std::string hex() const;        // 64 lowercase hex chars
  std::string short_hex() const;  // first 16 hex chars, for trace readability
  static std::optional<uid> from_hex(std::string_view s);
};

/// Id assignment mode. `kept` is the number of leading digest bytes retained;
/// 32 keeps the full digest, smaller values zero the tail and are deliberately
/// collision-prone (used to exercise injectivity-failure reporting).
struct hash_mode {
  std::uint8_t kept = 32;

  static hash_mode strong() { return hash_mode{32}; }
  static hash_mode weak(std::uint8_t k) { return hash_mode{k}; }
  bool is_strong() const { return kept >= 32; }
  bool operator==(const hash_mode&) const = default;
};

/// Proposal for a round. `prev_qc` names the certificate it extends by the
/// certified block's id; absent means the block claims to extend genesis.
struct block {
  round_t round = 0;
  uid id{};
  std::optional<uid> prev_qc;
  std::vector<std::uint8_t> payload;

  bool operator==(const block&) const = default;
};

struct vote {
  round_t round = 0;
  member_t member = 0;
  uid block_uid{};

  auto operator<=>(const vote&) const = default;
};

/// Quorum certificate: aggregated votes certifying one block at one round.
/// Coherence (quorum membership, vote agreement, send evidence) is checked by
/// validate_qc, not enforced by construction.
struct qc {
  round_t round = 0;
  uid cert_block_id{};
  std::vector<vote> votes;

  bool operator==(const qc&) const = default;
};

struct genesis_t {
  bool operator==(const genesis_t&) const = default;
};

using record = std::variant<genesis_t, block, qc>;

enum class record_kind { genesis, block, qc };

inline record_kind kind_of(const record& r) {
  switch (r.index()) {
    case 0: return record_kind::genesis;
    case 1: return record_kind::block;
    default: return record_kind::qc;
  }
}

inline round_t round_of(const record& r) {
  if (const auto* b = std::get_if<block>(&r)) return b->round;
  if (const auto* q = std::get_if<qc>(&r)) return q->round;
  return 0;
}

/// Id shown in dumps: a block's own id, a QC's certified block id, zero for genesis.
inline uid id_of(const record& r) {
  if (const auto* b = std::get_if<block>(&r)) return b->id;
  if (const auto* q = std::get_if<qc>(&r)) return q->cert_block_id;
  return uid{};
}

std::string to_hex(const std::uint8_t* data, std::size_t len);
std::optional<std::vector<std::uint8_t>> from_hex(std::string_view s);

}  // namespace hotsafe

#endif
