// Copyright 2026 The oodppo Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodppo/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "oodppo/envs.hpp"
#include "oodppo/errors.hpp"

namespace oodppo {

namespace {

using nlohmann::json;

std::string to_hex(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

std::uint64_t from_hex(const std::string& s) {
  return std::stoull(s, nullptr, 16);
}

Tensor mask_to_tensor(const MaskSet& set) {
  Tensor t(set.k, set.width);
  for (int i = 0; i < set.k; ++i)
    for (int c = 0; c < set.width; ++c) t(i, c) = set.masks[i][c] ? 1.0 : 0.0;
  return t;
}

MaskSet tensor_to_mask(const Tensor& t, double scale, std::uint64_t seed) {
  MaskSet set;
  set.k = t.rows();
  set.width = t.cols();
  set.scale = scale;
  set.seed = seed;
  set.masks.assign(set.k, std::vector<std::uint8_t>(set.width, 0));
  for (int i = 0; i < set.k; ++i)
    for (int c = 0; c < set.width; ++c) set.masks[i][c] = t(i, c) != 0.0 ? 1 : 0;
  return set;
}

}  // namespace

const Tensor& Checkpoint::array(const std::string& name) const {
  for (const auto& [n, t] : arrays)
    if (n == name) return t;
  throw IoError("checkpoint: missing array '" + name + "'");
}

bool Checkpoint::has_array(const std::string& name) const {
  for (const auto& [n, t] : arrays)
    if (n == name) return true;
  return false;
}

void Checkpoint::save(const std::string& path) const {
  json header;
  header["version"] = kVersion;
  header["config"] = config;
  header["adam_t"] = adam_t;
  header["obs_count"] = obs_count;
  json dir = json::array();
  std::size_t offset = 0;
  for (const auto& [name, t] : arrays) {
    dir.push_back({{"name", name}, {"rows", t.rows()}, {"cols", t.cols()}, {"offset", offset}});
    offset += t.size();
  }
  header["arrays"] = dir;
  json rng = json::array();
  for (std::uint64_t w : rng_state) rng.push_back(to_hex(w));
  header["rng"] = rng;

  const std::string head = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(kMagic, 8);
  const std::uint32_t len = static_cast<std::uint32_t>(head.size());
  char lenb[4] = {static_cast<char>(len & 0xff), static_cast<char>((len >> 8) & 0xff),
                  static_cast<char>((len >> 16) & 0xff), static_cast<char>((len >> 24) & 0xff)};
  out.write(lenb, 4);
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  for (const auto& [name, t] : arrays)
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.size() * sizeof(double)));
  if (!out) throw IoError("write failed: " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw IoError("checkpoint: bad magic in " + path);
  char lenb[4];
  in.read(lenb, 4);
  if (!in) throw IoError("checkpoint: truncated header length");
  const std::uint32_t len = static_cast<std::uint8_t>(lenb[0]) |
                            (static_cast<std::uint8_t>(lenb[1]) << 8) |
                            (static_cast<std::uint8_t>(lenb[2]) << 16) |
                            (static_cast<std::uint8_t>(lenb[3]) << 24);
  std::string head(len, '\0');
  in.read(head.data(), len);
  if (!in) throw IoError("checkpoint: truncated header");
  json header;
  try {
    header = json::parse(head);
  } catch (const json::exception& e) {
    throw IoError(std::string("checkpoint: header parse error: ") + e.what());
  }
  const int version = header.at("version").get<int>();
  if (version != kVersion)
    throw IoError("checkpoint: format version " + std::to_string(version) +
                  " does not match expected " + std::to_string(kVersion));

  Checkpoint ck;
  ck.config = header.at("config");
  ck.adam_t = header.at("adam_t").get<long long>();
  ck.obs_count = header.at("obs_count").get<long long>();
  const json& rng = header.at("rng");
  for (std::size_t i = 0; i < ck.rng_state.size(); ++i)
    ck.rng_state[i] = from_hex(rng.at(i).get<std::string>());

  for (const json& entry : header.at("arrays")) {
    const int rows = entry.at("rows").get<int>();
    const int cols = entry.at("cols").get<int>();
    Tensor t(rows, cols);
    in.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(t.size() * sizeof(double)));
    if (!in) throw IoError("checkpoint: truncated payload");
    ck.arrays.emplace_back(entry.at("name").get<std::string>(), std::move(t));
  }
  return ck;
}

Checkpoint Checkpoint::capture(const RunConfig& cfg, const Agent& agent, const AdamState& opt,
                               const Rng& rng) {
  Checkpoint ck;
  ck.config = cfg.to_json();
  ck.adam_t = opt.t;
  ck.obs_count = agent.obs_stats().count;
  const auto rs = rng.serialize();
  std::copy(rs.begin(), rs.end(), ck.rng_state.begin());

  Agent& mut = const_cast<Agent&>(agent);
  auto named = mut.named_params();
  for (const auto& np : named) ck.arrays.emplace_back(np.name, *np.tensor);
  for (std::size_t i = 0; i < named.size(); ++i)
    ck.arrays.emplace_back("adam.m." + named[i].name, opt.m[i]);
  for (std::size_t i = 0; i < named.size(); ++i)
    ck.arrays.emplace_back("adam.v." + named[i].name, opt.v[i]);

  const RunningStats& stats = agent.obs_stats();
  ck.arrays.emplace_back("obs.mean", Tensor::row(stats.mean));
  ck.arrays.emplace_back("obs.m2", Tensor::row(stats.m2));
  ck.arrays.emplace_back("obs.min", Tensor::row(stats.vmin));
  ck.arrays.emplace_back("obs.max", Tensor::row(stats.vmax));

  for (std::size_t l = 0; l < agent.policy_masks().size(); ++l)
    ck.arrays.emplace_back("mask.policy." + std::to_string(l),
                           mask_to_tensor(agent.policy_masks()[l]));
  for (std::size_t l = 0; l < agent.value_masks().size(); ++l)
    ck.arrays.emplace_back("mask.value." + std::to_string(l),
                           mask_to_tensor(agent.value_masks()[l]));
  return ck;
}

RunConfig Checkpoint::run_config() const { return RunConfig::from_json(config); }

Agent Checkpoint::restore_agent() const {
  const RunConfig cfg = run_config();
  std::unique_ptr<Env> probe = make_env(cfg.env, EnvParams{});
  Agent agent(cfg.agent_config(probe->obs_dim(), probe->action_space()));

  for (auto& np : agent.named_params()) {
    const Tensor& stored = array(np.name);
    if (!stored.same_shape(*np.tensor))
      throw IoError("checkpoint: shape mismatch for '" + np.name + "'");
    *np.tensor = stored;
  }

  RunningStats& stats = agent.obs_stats();
  stats.count = obs_count;
  const Tensor& mean = array("obs.mean");
  stats.mean.assign(mean.data(), mean.data() + mean.size());
  const Tensor& m2 = array("obs.m2");
  stats.m2.assign(m2.data(), m2.data() + m2.size());
  const Tensor& vmin = array("obs.min");
  stats.vmin.assign(vmin.data(), vmin.data() + vmin.size());
  const Tensor& vmax = array("obs.max");
  stats.vmax.assign(vmax.data(), vmax.data() + vmax.size());

  for (std::size_t l = 0; l < agent.policy_masks().size(); ++l) {
    const MaskSet& current = agent.policy_masks()[l];
    agent.mutable_policy_masks()[l] =
        tensor_to_mask(array("mask.policy." + std::to_string(l)), current.scale, current.seed);
  }
  for (std::size_t l = 0; l < agent.value_masks().size(); ++l) {
    const MaskSet& current = agent.value_masks()[l];
    agent.mutable_value_masks()[l] =
        tensor_to_mask(array("mask.value." + std::to_string(l)), current.scale, current.seed);
  }
  return agent;
}

void Checkpoint::restore_optimizer(AdamState& opt) const {
  opt.t = adam_t;
  std::size_t i = 0;
  for (auto& [name, tensor] : arrays) {
    if (name.rfind("adam.m.", 0) == 0) {
      if (i >= opt.m.size()) throw IoError("checkpoint: optimizer state mismatch");
      opt.m[i] = tensor;
      ++i;
    }
  }
  std::size_t j = 0;
  for (auto& [name, tensor] : arrays) {
    if (name.rfind("adam.v.", 0) == 0) {
      if (j >= opt.v.size()) throw IoError("checkpoint: optimizer state mismatch");
      opt.v[j] = tensor;
      ++j;
    }
  }
}

Rng Checkpoint::restore_rng() const { return Rng::deserialize(rng_state); }

}  // namespace oodppo
