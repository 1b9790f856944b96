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

#include "hotsafe/chains.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

namespace hotsafe {

std::string to_string(const insert_error& e) {
  switch (e.code) {
    case insert_error_code::orphan: return "OrphanRecord";
    case insert_error_code::invalid_extends:
      return std::string("InvalidExtends:") +
             (e.clause ? to_string(*e.clause) : "?");
    case insert_error_code::invalid_qc:
      return std::string("InvalidQC:") +
             (e.qc_reason ? to_string(e.qc_reason->code) : "?");
  }
  return "?";
}

record_store::record_store(epoch_config cfg, hash_mode mode,
                           vote_evidence_fn evidence)
    : cfg_(std::move(cfg)), mode_(mode), evidence_(std::move(evidence)) {
  nodes_.push_back(node{record{genesis_t{}}, 0, extends_kind::genesis_block});
}

std::optional<std::size_t> record_store::find_node(const record& r) const {
  switch (kind_of(r)) {
    case record_kind::genesis:
      return 0;
    case record_kind::block: {
      const auto& b = std::get<block>(r);
      auto it = blocks_by_id_.find(b.id);
      if (it == blocks_by_id_.end()) return std::nullopt;
      for (std::size_t i : it->second)
        if (std::get<block>(nodes_[i].rec) == b) return i;
      return std::nullopt;
    }
    case record_kind::qc: {
      const auto& q = std::get<qc>(r);
      auto it = qcs_by_cert_.find(q.cert_block_id);
      if (it == qcs_by_cert_.end()) return std::nullopt;
      for (std::size_t i : it->second)
        if (std::get<qc>(nodes_[i].rec) == q) return i;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::vector<std::size_t> record_store::parent_candidates(const record& r) const {
  std::vector<std::size_t> out;
  if (const auto* b = std::get_if<block>(&r)) {
    if (!b->prev_qc) {
      out.push_back(0);  // genesis
    } else if (auto it = qcs_by_cert_.find(*b->prev_qc);
               it != qcs_by_cert_.end()) {
      out = it->second;
    }
  } else if (const auto* q = std::get_if<qc>(&r)) {
    if (auto it = blocks_by_id_.find(q->cert_block_id);
        it != blocks_by_id_.end())
      out = it->second;
  }
  return out;
}

result<void, insert_error> record_store::insert(const record& r) {
  if (find_node(r)) return {};  // byte-identical re-insert is a no-op
  if (kind_of(r) == record_kind::genesis) return {};

  if (const auto* q = std::get_if<qc>(&r)) {
    auto coherent = validate_qc(*q, cfg_, evidence_);
    if (!coherent)
      return insert_error{insert_error_code::invalid_qc, std::nullopt,
                          coherent.error()};
  }

  const auto candidates = parent_candidates(r);
  if (candidates.empty())
    return insert_error{insert_error_code::orphan, std::nullopt, std::nullopt};

  std::optional<extends_error> first_clause;
  for (std::size_t parent : candidates) {
    auto w = extends_check(nodes_[parent].rec, r);
    if (w) {
      const std::size_t idx = nodes_.size();
      nodes_.push_back(node{r, parent, w.value()});
      if (const auto* b = std::get_if<block>(&r))
        blocks_by_id_[b->id].push_back(idx);
      else
        qcs_by_cert_[std::get<qc>(r).cert_block_id].push_back(idx);
      return {};
    }
    if (!first_clause) first_clause = w.error();
  }
  return insert_error{insert_error_code::invalid_extends, first_clause,
                      std::nullopt};
}

bool record_store::contains(const record& r) const {
  return find_node(r).has_value();
}

record_chain record_store::chain_to(const record& r) const {
  auto idx = find_node(r);
  if (!idx) throw std::invalid_argument("chain_to: record not in store");
  std::vector<std::size_t> path;
  std::size_t cur = *idx;
  while (cur != 0) {
    path.push_back(cur);
    cur = nodes_[cur].parent;
  }
  path.push_back(0);
  record_chain rc;
  rc.full = true;
  rc.records.reserve(path.size());
  for (auto it = path.rbegin(); it != path.rend(); ++it)
    rc.records.push_back(nodes_[*it].rec);
  return rc;
}

std::vector<block> record_store::blocks_with_id(const uid& id) const {
  std::vector<block> out;
  if (auto it = blocks_by_id_.find(id); it != blocks_by_id_.end())
    for (std::size_t i : it->second) out.push_back(std::get<block>(nodes_[i].rec));
  return out;
}

std::optional<block> record_store::block_with_id_round(const uid& id,
                                                       round_t round) const {
  if (auto it = blocks_by_id_.find(id); it != blocks_by_id_.end())
    for (std::size_t i : it->second) {
      const auto& b = std::get<block>(nodes_[i].rec);
      if (b.round == round) return b;
    }
  return std::nullopt;
}

std::vector<record> record_store::valid_parent_alternatives(
    const record& r) const {
  std::vector<record> out;
  for (std::size_t idx : parent_candidates(r))
    if (extends_check(nodes_[idx].rec, r).ok()) out.push_back(nodes_[idx].rec);
  return out;
}

std::optional<qc> record_store::highest_qc() const {
  std::optional<qc> best;
  for (const auto& n : nodes_) {
    if (const auto* q = std::get_if<qc>(&n.rec))
      if (!best || q->round > best->round) best = *q;
  }
  return best;
}

std::vector<record> record_store::all_records() const {
  std::vector<record> out;
  out.reserve(nodes_.size());
  for (const auto& n : nodes_) out.push_back(n.rec);
  return out;
}

std::vector<qc> record_store::all_qcs() const {
  std::vector<qc> out;
  for (const auto& n : nodes_)
    if (const auto* q = std::get_if<qc>(&n.rec)) out.push_back(*q);
  return out;
}

std::string record_store::dump() const {
  std::string out;
  for (const auto& n : nodes_) {
    out += format_record_line(n.rec);
    out += '\n';
  }
  return out;
}

round_t prev_round(const record_chain& rc) {
  const auto& rs = rc.records;
  if (rs.size() < 2 || kind_of(rs.back()) != record_kind::qc ||
      kind_of(rs[rs.size() - 2]) != record_kind::block)
    throw std::invalid_argument("prev_round: chain must end in block, qc");
  // The record below the final block is the certificate it extends, or the
  // chain origin.
  if (rs.size() == 2) return 0;  // partial chain starting at the final block
  const record& below = rs[rs.size() - 3];
  if (kind_of(below) == record_kind::genesis) return 0;
  if (const auto* q = std::get_if<qc>(&below)) return q->round;
  throw std::invalid_argument("prev_round: malformed chain");
}

std::optional<k_chain> find_kchain(const record_store& store, const qc& q,
                                   std::size_t k, chain_relation rel) {
  if (!store.contains(record{q}))
    throw std::invalid_argument("find_kchain: qc not in store");
  record_chain rc = store.chain_to(record{q});
  const auto& rs = rc.records;
  // Collect the final k (block, qc) pairs.
  std::vector<std::pair<block, qc>> pairs;
  std::size_t pos = rs.size();  // one past the qc being examined
  while (pairs.size() < k) {
    if (pos < 2) return std::nullopt;
    const auto* cq = std::get_if<qc>(&rs[pos - 1]);
    const auto* cb = std::get_if<block>(&rs[pos - 2]);
    if (!cq || !cb) return std::nullopt;
    pairs.emplace_back(*cb, *cq);
    pos -= 2;
  }
  std::reverse(pairs.begin(), pairs.end());
  if (rel == chain_relation::contig) {
    for (std::size_t i = 1; i < pairs.size(); ++i)
      if (pairs[i].first.round != pairs[i - 1].first.round + 1)
        return std::nullopt;
  }
  k_chain kc;
  kc.relation = rel;
  kc.pairs = std::move(pairs);
  return kc;
}

std::optional<commit_rule> detect_commit(const record_store& store,
                                         const qc& q) {
  auto c3 = find_kchain(store, q, 3, chain_relation::contig);
  if (!c3) return std::nullopt;
  commit_rule cr;
  cr.chain = store.chain_to(record{q});
  cr.three = std::move(*c3);
  cr.committed = cr.three.block_from_end(2);
  return cr;
}

bool chains_equivalent(const record_chain& a, const record_chain& b) {
  if (a.records.size() != b.records.size()) return false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const record& ra = a.records[i];
    const record& rb = b.records[i];
    if (kind_of(ra) != kind_of(rb)) return false;
    switch (kind_of(ra)) {
      case record_kind::genesis:
        break;
      case record_kind::block:
        if (!(std::get<block>(ra) == std::get<block>(rb))) return false;
        break;
      case record_kind::qc:
        if (std::get<qc>(ra).cert_block_id != std::get<qc>(rb).cert_block_id)
          return false;
        break;
    }
  }
  return true;
}

bool block_in_chain(const block& b, const record_chain& rc) {
  for (const auto& r : rc.records)
    if (const auto* rb = std::get_if<block>(&r))
      if (*rb == b) return true;
  return false;
}

std::optional<injectivity_evidence> check_rc_irrelevance(
    const record_store& store, const record& r) {
  if (!store.contains(r))
    throw std::invalid_argument("check_rc_irrelevance: record not in store");
  // Walk all parent resolutions layer by layer. Within one layer every block
  // shares the id demanded by the layer above, so two distinct nodes in a
  // block layer are exactly an id collision; QC layers certifying one id are
  // pointwise equivalent and never evidence by themselves.
  std::vector<record> layer{r};
  while (true) {
    std::vector<block> blocks_here;
    for (const auto& rec : layer)
      if (const auto* b = std::get_if<block>(&rec)) blocks_here.push_back(*b);
    for (std::size_t i = 0; i + 1 < blocks_here.size(); ++i)
      for (std::size_t j = i + 1; j < blocks_here.size(); ++j)
        if (!(blocks_here[i] == blocks_here[j]))
          return injectivity_evidence{blocks_here[i], blocks_here[j]};

    std::vector<record> next;
    bool any_non_genesis = false;
    for (const auto& rec : layer) {
      if (kind_of(rec) == record_kind::genesis) continue;
      any_non_genesis = true;
      for (const record& cand : store.valid_parent_alternatives(rec))
        if (std::find(next.begin(), next.end(), cand) == next.end())
          next.push_back(cand);
    }
    if (!any_non_genesis) return std::nullopt;
    if (next.empty()) return std::nullopt;  // dangling resolution; nothing to compare
    layer = std::move(next);
  }
}

namespace {

std::string payload_hex(const std::vector<std::uint8_t>& p) {
  return p.empty() ? "-" : to_hex(p.data(), p.size());
}

}  // namespace

std::string format_record_line(const record& r) {
  std::ostringstream os;
  switch (kind_of(r)) {
    case record_kind::genesis:
      os << "kind=I id=" << uid{}.hex() << " round=0 parent=-";
      break;
    case record_kind::block: {
      const auto& b = std::get<block>(r);
      os << "kind=B id=" << b.id.hex() << " round=" << b.round
         << " parent=" << (b.prev_qc ? b.prev_qc->hex() : std::string("-"))
         << " payload=" << payload_hex(b.payload);
      break;
    }
    case record_kind::qc: {
      const auto& q = std::get<qc>(r);
      os << "kind=Q id=" << q.cert_block_id.hex() << " round=" << q.round
         << " parent=" << q.cert_block_id.hex() << " votes=";
      if (q.votes.empty()) {
        os << "-";
      } else {
        for (std::size_t i = 0; i < q.votes.size(); ++i) {
          if (i) os << ',';
          os << q.votes[i].member << ':' << q.votes[i].round << ':'
             << q.votes[i].block_uid.hex();
        }
      }
      break;
    }
  }
  return os.str();
}

namespace {

// Splits "key=value" tokens off a space-separated line.
bool next_field(std::string_view& line, std::string_view key,
                std::string_view& value) {
  while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
  if (line.substr(0, key.size()) != key || line.size() <= key.size() ||
      line[key.size()] != '=')
    return false;
  line.remove_prefix(key.size() + 1);
  const auto sp = line.find(' ');
  value = line.substr(0, sp);
  line.remove_prefix(sp == std::string_view::npos ? line.size() : sp);
  return true;
}

}  // namespace

result<record, std::string> parse_record_line(std::string_view line) {
  std::string_view rest = line;
  std::string_view kind, id_s, round_s, parent_s;
  if (!next_field(rest, "kind", kind)) return std::string("missing kind=");
  if (!next_field(rest, "id", id_s)) return std::string("missing id=");
  if (!next_field(rest, "round", round_s)) return std::string("missing round=");
  if (!next_field(rest, "parent", parent_s))
    return std::string("missing parent=");

  round_t round = 0;
  try {
    round = std::stoull(std::string(round_s));
  } catch (...) {
    return std::string("bad round: ") + std::string(round_s);
  }

  if (kind == "I") return record{genesis_t{}};

  if (kind == "B") {
    std::string_view payload_s;
    if (!next_field(rest, "payload", payload_s))
      return std::string("missing payload=");
    block b;
    b.round = round;
    auto id = uid::from_hex(id_s);
    if (!id) return std::string("bad id hex");
    b.id = *id;
    if (parent_s != "-") {
      auto p = uid::from_hex(parent_s);
      if (!p) return std::string("bad parent hex");
      b.prev_qc = *p;
    }
    if (payload_s != "-") {
      auto p = from_hex(payload_s);
      if (!p) return std::string("bad payload hex");
      b.payload = std::move(*p);
    }
    return record{b};
  }

  if (kind == "Q") {
    std::string_view votes_s;
    if (!next_field(rest, "votes", votes_s)) return std::string("missing votes=");
    qc q;
    q.round = round;
    auto id = uid::from_hex(id_s);
    if (!id) return std::string("bad id hex");
    q.cert_block_id = *id;
    if (votes_s != "-") {
      std::string s(votes_s);
      std::size_t pos = 0;
      while (pos < s.size()) {
        auto comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        std::string tok = s.substr(pos, comma - pos);
        pos = comma + 1;
        auto c1 = tok.find(':');
        auto c2 = tok.find(':', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
          return std::string("bad vote token: ") + tok;
        vote v;
        try {
          v.member = static_cast<member_t>(std::stoul(tok.substr(0, c1)));
          v.round = std::stoull(tok.substr(c1 + 1, c2 - c1 - 1));
        } catch (...) {
          return std::string("bad vote numbers: ") + tok;
        }
        auto u = uid::from_hex(std::string_view(tok).substr(c2 + 1));
        if (!u) return std::string("bad vote uid: ") + tok;
        v.block_uid = *u;
        q.votes.push_back(v);
      }
    }
    return record{q};
  }

  return std::string("unknown kind: ") + std::string(kind);
}

}  // namespace hotsafe
