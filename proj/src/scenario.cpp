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

#include "hotsafe/scenario.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace hotsafe {

namespace {

const char* const kKnownKeys[] = {
    "epoch_id",  "authors_n", "voting_power", "quorum_model", "f",
    "byz_power", "byzantine", "adversary",    "steps",        "drop_prob",
    "dup_prob",  "max_delay", "seed",         "hash_mode",
};

bool known_key(const std::string& k) {
  for (const char* known : kKnownKeys)
    if (k == known) return true;
  return false;
}

result<std::map<std::string, std::string>, std::string> parse_kv(
    std::string_view text) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    if (line[start] == '#') continue;
    auto eq = line.find('=', start);
    if (eq == std::string::npos)
      return "line " + std::to_string(lineno) + ": expected key=value";
    std::string key = line.substr(start, eq - start);
    std::string value = line.substr(eq + 1);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t'))
      key.pop_back();
    while (!value.empty() && (value.front() == ' ' || value.front() == '\t'))
      value.erase(value.begin());
    while (!value.empty() && (value.back() == ' ' || value.back() == '\t'))
      value.pop_back();
    if (!known_key(key))
      return "line " + std::to_string(lineno) + ": unknown key '" + key + "'";
    if (kv.count(key))
      return "line " + std::to_string(lineno) + ": duplicate key '" + key + "'";
    kv[key] = value;
  }
  return kv;
}

result<std::uint64_t, std::string> parse_u64(const std::string& key,
                                             const std::string& v) {
  try {
    std::size_t used = 0;
    std::uint64_t out = std::stoull(v, &used);
    if (used != v.size()) return "key '" + key + "': trailing characters";
    return out;
  } catch (...) {
    return "key '" + key + "': expected unsigned integer, got '" + v + "'";
  }
}

result<double, std::string> parse_prob(const std::string& key,
                                       const std::string& v) {
  try {
    std::size_t used = 0;
    double out = std::stod(v, &used);
    if (used != v.size()) return "key '" + key + "': trailing characters";
    if (out < 0.0 || out > 1.0) return "key '" + key + "': must be in [0,1]";
    return out;
  } catch (...) {
    return "key '" + key + "': expected probability, got '" + v + "'";
  }
}

std::vector<std::string> split_commas(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  return out;
}

result<hash_mode, std::string> parse_hash_mode(const std::string& v) {
  if (v == "strong") return hash_mode::strong();
  if (v.rfind("weak:", 0) == 0) {
    auto k = parse_u64("hash_mode", v.substr(5));
    if (!k) return k.error();
    if (k.value() < 1 || k.value() > 32)
      return std::string("hash_mode: weak:k requires 1 <= k <= 32");
    return hash_mode::weak(static_cast<std::uint8_t>(k.value()));
  }
  return "hash_mode: expected 'strong' or 'weak:k', got '" + v + "'";
}

struct parsed_common {
  epoch_config cfg;
  hash_mode mode = hash_mode::strong();
  std::map<std::string, std::string> kv;
};

result<parsed_common, std::string> parse_common(std::string_view text) {
  auto kv_r = parse_kv(text);
  if (!kv_r) return kv_r.error();
  auto kv = kv_r.value();

  auto find = [&kv](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  parsed_common out;
  out.kv = kv;

  const std::string* n_s = find("authors_n");
  if (!n_s) return std::string("missing required key 'authors_n'");
  auto n = parse_u64("authors_n", *n_s);
  if (!n) return n.error();
  if (n.value() == 0 || n.value() > 1024)
    return std::string("authors_n out of range");

  std::uint64_t epoch_id = 0;
  if (kv.count("epoch_id")) {
    auto e = parse_u64("epoch_id", kv["epoch_id"]);
    if (!e) return e.error();
    epoch_id = e.value();
  }

  std::string model = kv.count("quorum_model") ? kv["quorum_model"] : "count";
  if (model != "count" && model != "weighted")
    return "quorum_model: expected 'count' or 'weighted', got '" + model + "'";

  if (model == "count") {
    if (kv.count("byz_power"))
      return std::string("byz_power only applies to the weighted model");
    const std::string* f_s = find("f");
    if (!f_s) return std::string("missing required key 'f'");
    auto f = parse_u64("f", *f_s);
    if (!f) return f.error();
    if (kv.count("voting_power"))
      return std::string("voting_power only applies to the weighted model");
    auto cfg = epoch_config::make_count(
        epoch_id, static_cast<member_t>(n.value()), f.value());
    if (!cfg) return cfg.error();
    out.cfg = cfg.value();
  } else {
    if (kv.count("f"))
      return std::string("f only applies to the count model");
    const std::string* bp_s = find("byz_power");
    if (!bp_s) return std::string("missing required key 'byz_power'");
    auto bp = parse_u64("byz_power", *bp_s);
    if (!bp) return bp.error();
    std::vector<std::uint64_t> powers;
    if (kv.count("voting_power")) {
      for (const auto& tok : split_commas(kv["voting_power"])) {
        auto p = parse_u64("voting_power", tok);
        if (!p) return p.error();
        powers.push_back(p.value());
      }
      if (powers.size() != n.value())
        return std::string("voting_power list length must equal authors_n");
    } else {
      powers.assign(n.value(), 1);
    }
    auto cfg = epoch_config::make_weighted(epoch_id, std::move(powers),
                                           bp.value());
    if (!cfg) return cfg.error();
    out.cfg = cfg.value();
  }

  if (kv.count("hash_mode")) {
    auto m = parse_hash_mode(kv["hash_mode"]);
    if (!m) return m.error();
    out.mode = m.value();
  }
  return out;
}

result<adversary_kind, std::string> parse_adversary(const std::string& v) {
  if (v == "equivocate") return adversary_kind::equivocate;
  if (v == "double_vote") return adversary_kind::double_vote;
  if (v == "ignore_preferred_round")
    return adversary_kind::ignore_preferred_round;
  if (v == "silent") return adversary_kind::silent;
  return "adversary: unknown behavior '" + v + "'";
}

}  // namespace

result<scenario, std::string> parse_scenario(std::string_view text) {
  auto common = parse_common(text);
  if (!common) return common.error();
  parsed_common pc = common.value();
  auto& kv = pc.kv;

  scenario sc;
  sc.cfg = pc.cfg;
  sc.mode = pc.mode;
  sc.honesty = honesty_map(sc.cfg.authors_n());

  if (!kv.count("steps")) return std::string("missing required key 'steps'");
  auto steps = parse_u64("steps", kv["steps"]);
  if (!steps) return steps.error();
  if (steps.value() < 1) return std::string("steps must be >= 1");
  sc.steps = steps.value();

  if (!kv.count("seed")) return std::string("missing required key 'seed'");
  auto seed = parse_u64("seed", kv["seed"]);
  if (!seed) return seed.error();
  sc.seed = seed.value();

  if (kv.count("drop_prob")) {
    auto p = parse_prob("drop_prob", kv["drop_prob"]);
    if (!p) return p.error();
    sc.drop_prob = p.value();
  }
  if (kv.count("dup_prob")) {
    auto p = parse_prob("dup_prob", kv["dup_prob"]);
    if (!p) return p.error();
    sc.dup_prob = p.value();
  }
  if (kv.count("max_delay")) {
    auto d = parse_u64("max_delay", kv["max_delay"]);
    if (!d) return d.error();
    sc.max_delay = static_cast<std::uint32_t>(d.value());
  }

  std::vector<member_t> byz;
  if (kv.count("byzantine") && !kv["byzantine"].empty()) {
    for (const auto& tok : split_commas(kv["byzantine"])) {
      auto m = parse_u64("byzantine", tok);
      if (!m) return m.error();
      if (m.value() >= sc.cfg.authors_n())
        return std::string("byzantine: member index out of range");
      byz.push_back(static_cast<member_t>(m.value()));
    }
  }
  std::vector<adversary_kind> tags;
  if (kv.count("adversary") && !kv["adversary"].empty()) {
    for (const auto& tok : split_commas(kv["adversary"])) {
      auto a = parse_adversary(tok);
      if (!a) return a.error();
      tags.push_back(a.value());
    }
  }
  if (!tags.empty() && tags.size() != byz.size())
    return std::string(
        "adversary list must align one-to-one with the byzantine list");
  for (std::size_t i = 0; i < byz.size(); ++i) {
    sc.honesty.set_byzantine(byz[i]);
    sc.adversaries[byz[i]] =
        tags.empty() ? adversary_kind::silent : tags[i];
  }
  return sc;
}

result<epoch_settings, std::string> parse_epoch_settings(
    std::string_view text) {
  auto common = parse_common(text);
  if (!common) return common.error();
  epoch_settings out;
  out.cfg = common.value().cfg;
  out.mode = common.value().mode;
  return out;
}

result<void, std::string> read_file(const std::string& path,
                                    std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "cannot open file: " + path;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return {};
}

result<void, std::string> write_file(const std::string& path,
                                     std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return "cannot open file for writing: " + path;
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) return "write failed: " + path;
  return {};
}

}  // namespace hotsafe
