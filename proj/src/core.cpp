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

#include "hotsafe/core.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstring>
#include <limits>
#include <set>
#include <stdexcept>

namespace hotsafe {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";
}

std::string to_hex(const std::uint8_t* data, std::size_t len) {
  std::string out;
  out.reserve(len * 2);
  for (std::size_t i = 0; i < len; ++i) {
    out.push_back(kHexDigits[data[i] >> 4]);
    out.push_back(kHexDigits[data[i] & 0x0f]);
  }
  return out;
}

std::optional<std::vector<std::uint8_t>> from_hex(std::string_view s) {
  if (s.size() % 2 != 0) return std::nullopt;
  std::vector<std::uint8_t> out(s.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = -1, lo = -1;
    char a = s[2 * i], b = s[2 * i + 1];
    if (a >= '0' && a <= '9') hi = a - '0';
    else if (a >= 'a' && a <= 'f') hi = a - 'a' + 10;
    else if (a >= 'A' && a <= 'F') hi = a - 'A' + 10;
    if (b >= '0' && b <= '9') lo = b - '0';
    else if (b >= 'a' && b <= 'f') lo = b - 'a' + 10;
    else if (b >= 'A' && b <= 'F') lo = b - 'A' + 10;
    if (hi < 0 || lo < 0) return std::nullopt;
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

std::string uid::hex() const { return to_hex(bytes.data(), bytes.size()); }

std::string uid::short_hex() const { return to_hex(bytes.data(), 8); }

std::optional<uid> uid::from_hex(std::string_view s) {
  if (s.size() != 64) return std::nullopt;
  auto raw = hotsafe::from_hex(s);
  if (!raw) return std::nullopt;
  uid u;
  std::copy(raw->begin(), raw->end(), u.bytes.begin());
  return u;
}

std::vector<std::uint8_t> canonical_encode(const block& b) {
  if (b.payload.size() > std::numeric_limits<std::uint32_t>::max())
    throw std::length_error("canonical_encode: payload exceeds 2^32-1 bytes");
  std::vector<std::uint8_t> out;
  out.reserve(1 + 8 + 1 + (b.prev_qc ? 32 : 0) + 4 + b.payload.size());
  out.push_back(0x42);
  for (int i = 7; i >= 0; --i)
    out.push_back(static_cast<std::uint8_t>(b.round >> (8 * i)));
  if (b.prev_qc) {
    out.push_back(0x01);
    out.insert(out.end(), b.prev_qc->bytes.begin(), b.prev_qc->bytes.end());
  } else {
    out.push_back(0x00);
  }
  const auto len = static_cast<std::uint32_t>(b.payload.size());
  for (int i = 3; i >= 0; --i)
    out.push_back(static_cast<std::uint8_t>(len >> (8 * i)));
  out.insert(out.end(), b.payload.begin(), b.payload.end());
  return out;
}

uid assign_id(std::span<const std::uint8_t> enc, hash_mode mode) {
  uid u;
  unsigned int md_len = 0;
  EVP_Digest(enc.data(), enc.size(), u.bytes.data(), &md_len, EVP_sha256(),
             nullptr);
  if (!mode.is_strong()) {
    for (std::size_t i = mode.kept; i < u.bytes.size(); ++i) u.bytes[i] = 0;
  }
  return u;
}

block make_block(round_t round, std::optional<uid> prev_qc,
                 std::vector<std::uint8_t> payload, hash_mode mode) {
  block b;
  b.round = round;
  b.prev_qc = prev_qc;
  b.payload = std::move(payload);
  b.id = assign_id(canonical_encode(b), mode);
  return b;
}

bool block_id_consistent(const block& b, hash_mode mode) {
  return assign_id(canonical_encode(b), mode) == b.id;
}

const char* to_string(extends_kind k) {
  switch (k) {
    case extends_kind::genesis_block: return "genesis<-block";
    case extends_kind::qc_block: return "qc<-block";
    case extends_kind::block_qc: return "block<-qc";
  }
  return "?";
}

const char* to_string(extends_error e) {
  switch (e) {
    case extends_error::round_not_greater: return "RoundNotGreater";
    case extends_error::prev_qc_mismatch: return "PrevQCMismatch";
    case extends_error::round_mismatch: return "RoundMismatch";
    case extends_error::id_mismatch: return "IdMismatch";
    case extends_error::shape_mismatch: return "ShapeMismatch";
  }
  return "?";
}

result<extends_kind, extends_error> extends_check(const record& prev,
                                                  const record& next) {
  if (kind_of(prev) == record_kind::genesis &&
      kind_of(next) == record_kind::block) {
    const auto& b = std::get<block>(next);
    if (b.round == 0) return extends_error::round_not_greater;
    if (b.prev_qc.has_value()) return extends_error::prev_qc_mismatch;
    return extends_kind::genesis_block;
  }
  if (kind_of(prev) == record_kind::qc && kind_of(next) == record_kind::block) {
    const auto& q = std::get<qc>(prev);
    const auto& b = std::get<block>(next);
    if (!(q.round < b.round)) return extends_error::round_not_greater;
    if (!b.prev_qc || *b.prev_qc != q.cert_block_id)
      return extends_error::prev_qc_mismatch;
    return extends_kind::qc_block;
  }
  if (kind_of(prev) == record_kind::block && kind_of(next) == record_kind::qc) {
    const auto& b = std::get<block>(prev);
    const auto& q = std::get<qc>(next);
    if (q.round != b.round) return extends_error::round_mismatch;
    if (q.cert_block_id != b.id) return extends_error::id_mismatch;
    return extends_kind::block_qc;
  }
  return extends_error::shape_mismatch;
}

const char* to_string(qc_error_code c) {
  switch (c) {
    case qc_error_code::duplicate_member: return "DuplicateMember";
    case qc_error_code::member_out_of_range: return "MemberOutOfRange";
    case qc_error_code::not_a_quorum: return "NotAQuorum";
    case qc_error_code::wrong_block_id: return "WrongBlockId";
    case qc_error_code::wrong_round: return "WrongRound";
    case qc_error_code::no_send_evidence: return "NoSendEvidence";
  }
  return "?";
}

vote_evidence_fn accept_all_votes() {
  return [](const vote&) { return true; };
}

result<void, qc_error> validate_qc(const qc& q, const epoch_config& cfg,
                                   const vote_evidence_fn& evidence) {
  // C1: distinct, in-range members forming a quorum.
  std::set<member_t> seen;
  std::vector<member_t> members;
  members.reserve(q.votes.size());
  for (const auto& v : q.votes) {
    if (!cfg.valid_member(v.member))
      return qc_error{qc_error_code::member_out_of_range, v.member};
    if (!seen.insert(v.member).second)
      return qc_error{qc_error_code::duplicate_member, v.member};
    members.push_back(v.member);
  }
  if (!is_quorum(members, cfg))
    return qc_error{qc_error_code::not_a_quorum, 0};
  // C2: every vote is for the certified block.
  for (const auto& v : q.votes)
    if (v.block_uid != q.cert_block_id)
      return qc_error{qc_error_code::wrong_block_id, v.member};
  // C3: every vote carries the QC's round.
  for (const auto& v : q.votes)
    if (v.round != q.round)
      return qc_error{qc_error_code::wrong_round, v.member};
  // C4: every vote was really sent by its member.
  for (const auto& v : q.votes)
    if (!evidence(v))
      return qc_error{qc_error_code::no_send_evidence, v.member};
  return {};
}

}  // namespace hotsafe
