// Shared test fixtures: the seven-block example tree and a seeded random
// store generator that keeps an implementation-independent shadow of every
// parent edge for oracle re-derivations.
#ifndef HOTSAFE_TESTS_FIXTURES_HPP
#define HOTSAFE_TESTS_FIXTURES_HPP

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "hotsafe/chains.hpp"
#include "hotsafe/core.hpp"
#include "hotsafe/quorum.hpp"
#include "hotsafe/sim.hpp"

namespace hotsafe::testing {

inline epoch_config cfg4() {
  return epoch_config::make_count(1, 4, 1).value();
}

inline std::vector<std::uint8_t> bytes_of(const std::string& s) {
  return std::vector<std::uint8_t>(s.begin(), s.end());
}

inline qc make_qc(const block& b, std::vector<member_t> members) {
  qc q;
  q.round = b.round;
  q.cert_block_id = b.id;
  for (member_t m : members) q.votes.push_back(vote{b.round, m, b.id});
  return q;
}

// Tree with two side branches and one non-contiguous tail:
//   genesis <- b0(1) <- q0 <- b1(2) <- q1 <- b3(3) <- q3 <- b5(4) <- q5
//                       ^                  ^
//                       b2(5) <- q2        b4(6) <- q4 <- b6(7) <- q6
struct fig1 {
  epoch_config cfg = cfg4();
  record_store store{cfg, hash_mode::strong()};
  block b[7];
  qc q[7];

  fig1() {
    const hash_mode m = hash_mode::strong();
    b[0] = make_block(1, std::nullopt, bytes_of("b0"), m);
    q[0] = make_qc(b[0], {0, 1, 2});
    b[1] = make_block(2, b[0].id, bytes_of("b1"), m);
    q[1] = make_qc(b[1], {0, 1, 2});
    b[2] = make_block(5, b[0].id, bytes_of("b2"), m);
    q[2] = make_qc(b[2], {0, 1, 2});
    b[3] = make_block(3, b[1].id, bytes_of("b3"), m);
    q[3] = make_qc(b[3], {0, 1, 2});
    b[4] = make_block(6, b[1].id, bytes_of("b4"), m);
    q[4] = make_qc(b[4], {0, 1, 2});
    b[5] = make_block(4, b[3].id, bytes_of("b5"), m);
    q[5] = make_qc(b[5], {0, 1, 2});
    b[6] = make_block(7, b[4].id, bytes_of("b6"), m);
    q[6] = make_qc(b[6], {1, 2, 3});
    const std::size_t order[] = {0, 1, 2, 3, 4, 5, 6};
    for (std::size_t i : order) {
      if (!store.insert(record{b[i]}).ok())
        throw std::logic_error("fig1: block insert failed");
      if (!store.insert(record{q[i]}).ok())
        throw std::logic_error("fig1: qc insert failed");
    }
  }
};

// Randomly grown valid store plus a shadow tree recording intended parents.
struct gen_store {
  struct entry {
    record rec;
    std::size_t parent;  // shadow index; 0 is genesis
  };
  epoch_config cfg;
  record_store store;
  std::vector<entry> shadow;  // shadow[0] = genesis

  explicit gen_store(const epoch_config& c)
      : cfg(c), store(c, hash_mode::strong()) {
    shadow.push_back(entry{record{genesis_t{}}, 0});
  }

  std::vector<record> oracle_chain(std::size_t idx) const {
    std::vector<record> out;
    while (idx != 0) {
      out.push_back(shadow[idx].rec);
      idx = shadow[idx].parent;
    }
    out.push_back(record{genesis_t{}});
    std::reverse(out.begin(), out.end());
    return out;
  }
};

inline gen_store make_random_store(std::uint64_t seed, std::size_t target,
                                   const epoch_config& cfg) {
  gen_store g(cfg);
  splitmix64 rng(seed);
  const member_t n = cfg.authors_n();

  std::vector<std::size_t> qcs;            // shadow indices
  std::vector<std::size_t> uncertified;    // block shadow indices
  std::uint32_t salt = 0;

  while (g.shadow.size() - 1 < target) {
    const bool can_certify = !uncertified.empty();
    const bool certify = can_certify && rng.below(100) < 55;
    if (certify) {
      const std::size_t pick = uncertified[rng.below(uncertified.size())];
      const block& b = std::get<block>(g.shadow[pick].rec);
      // Random quorum: threshold-many members starting at a random offset.
      std::vector<member_t> members;
      std::size_t want = 0;
      for (std::size_t size = 1; size <= n; ++size) {
        std::vector<member_t> probe;
        for (member_t m = 0; m < size; ++m) probe.push_back(m);
        if (is_quorum(probe, cfg)) {
          want = size + rng.below(n - size + 1);
          break;
        }
      }
      const member_t offset = static_cast<member_t>(rng.below(n));
      for (std::size_t i = 0; i < want; ++i)
        members.push_back(static_cast<member_t>((offset + i) % n));
      std::sort(members.begin(), members.end());
      qc q = make_qc(b, members);
      if (!g.store.insert(record{q}).ok())
        throw std::logic_error("gen_store: qc insert failed");
      g.shadow.push_back(gen_store::entry{record{q}, pick});
      qcs.push_back(g.shadow.size() - 1);
      uncertified.erase(
          std::find(uncertified.begin(), uncertified.end(), pick));
    } else {
      std::size_t parent = 0;  // genesis
      round_t parent_round = 0;
      if (!qcs.empty() && rng.below(100) < 90) {
        parent = qcs[rng.below(qcs.size())];
        parent_round = std::get<qc>(g.shadow[parent].rec).round;
      }
      const std::uint64_t skips[] = {0, 0, 0, 1, 2};
      const round_t round = parent_round + 1 + skips[rng.below(5)];
      std::optional<uid> prev;
      if (parent != 0)
        prev = std::get<qc>(g.shadow[parent].rec).cert_block_id;
      std::vector<std::uint8_t> payload(4);
      ++salt;
      payload[0] = static_cast<std::uint8_t>(salt >> 8);
      payload[1] = static_cast<std::uint8_t>(salt);
      payload[2] = static_cast<std::uint8_t>(rng.below(256));
      payload[3] = static_cast<std::uint8_t>(rng.below(256));
      block b = make_block(round, prev, payload, hash_mode::strong());
      if (g.store.contains(record{b})) continue;
      if (!g.store.insert(record{b}).ok())
        throw std::logic_error("gen_store: block insert failed");
      g.shadow.push_back(gen_store::entry{record{b}, parent});
      uncertified.push_back(g.shadow.size() - 1);
    }
  }
  return g;
}

}  // namespace hotsafe::testing

#endif
