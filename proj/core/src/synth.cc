/* Copyright 2026 The kvmeta Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "kvmeta/synth.h"

#include <cmath>
#include <limits>
#include <random>

#include "kvmeta/analysis.h"
#include "kvmeta/error.h"

namespace kvmeta {

void SynthConfig::validate() const {
  auto bad = [](const std::string& field, const std::string& why) {
    throw Error(ErrorCode::kInvalidArgument, "synth config: " + field + " " + why);
  };
  if (!(mean_interarrival_ms > 0.0) || std::isinf(mean_interarrival_ms)) {
    bad("mean_interarrival_ms", "must be a positive finite number");
  }
  if (prefix_tree.depth < 1) bad("prefix_tree.depth", "must be >= 1");
  if (prefix_tree.branching < 1) bad("prefix_tree.branching", "must be >= 1");
  if (prefix_tree.blocks_per_node < 1) bad("prefix_tree.blocks_per_node", "must be >= 1");
  if (!(reuse_bias >= 0.0) || std::isinf(reuse_bias)) bad("reuse_bias", "must be finite and >= 0");
  if (!(random_block_rate >= 0.0 && random_block_rate <= 1.0)) {
    bad("random_block_rate", "must lie in [0, 1]");
  }
  if (suffix_blocks.min > suffix_blocks.max) bad("suffix_blocks", "min must be <= max");

  // Every request allocates at most depth nodes plus its suffix; the global
  // id counter must not wrap.
  const long double per_request =
      static_cast<long double>(prefix_tree.depth) * prefix_tree.blocks_per_node + suffix_blocks.max;
  if (per_request * static_cast<long double>(num_requests) >
      static_cast<long double>(std::numeric_limits<BlockId>::max() / 2)) {
    bad("num_requests", "exhausts the 64-bit block id space for this tree");
  }
}

namespace {

template <typename T>
T read_number(const nlohmann::json& j, const std::string& path) {
  if constexpr (std::is_floating_point_v<T>) {
    if (!j.is_number()) throw Error(ErrorCode::kInvalidArgument, "synth config: " + path + " must be a number");
    return j.get<T>();
  } else {
    if (!j.is_number_unsigned()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "synth config: " + path + " must be a non-negative integer");
    }
    const auto v = j.get<std::uint64_t>();
    if (v > std::numeric_limits<T>::max()) {
      throw Error(ErrorCode::kInvalidArgument, "synth config: " + path + " is too large");
    }
    return static_cast<T>(v);
  }
}

void require_object(const nlohmann::json& j, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "synth config: " + path + " must be an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == k;
    if (!ok) {
      throw Error(ErrorCode::kInvalidArgument,
                  "synth config: unknown field '" + (path.empty() ? k : path + "." + k) + "'");
    }
  }
}

}  // namespace

SynthConfig synth_config_from_json(const nlohmann::json& j) {
  require_object(j, "", {"num_requests", "mean_interarrival_ms", "prefix_tree", "reuse_bias",
                         "random_block_rate", "suffix_blocks", "seed", "targets"});
  SynthConfig c;
  if (j.contains("num_requests")) c.num_requests = read_number<std::uint64_t>(j["num_requests"], "num_requests");
  if (j.contains("mean_interarrival_ms")) {
    c.mean_interarrival_ms = read_number<double>(j["mean_interarrival_ms"], "mean_interarrival_ms");
  }
  if (j.contains("prefix_tree")) {
    const auto& t = j["prefix_tree"];
    require_object(t, "prefix_tree", {"depth", "branching", "blocks_per_node"});
    if (t.contains("depth")) c.prefix_tree.depth = read_number<std::uint32_t>(t["depth"], "prefix_tree.depth");
    if (t.contains("branching")) {
      c.prefix_tree.branching = read_number<std::uint32_t>(t["branching"], "prefix_tree.branching");
    }
    if (t.contains("blocks_per_node")) {
      c.prefix_tree.blocks_per_node =
          read_number<std::uint32_t>(t["blocks_per_node"], "prefix_tree.blocks_per_node");
    }
  }
  if (j.contains("reuse_bias")) c.reuse_bias = read_number<double>(j["reuse_bias"], "reuse_bias");
  if (j.contains("random_block_rate")) {
    c.random_block_rate = read_number<double>(j["random_block_rate"], "random_block_rate");
  }
  if (j.contains("suffix_blocks")) {
    const auto& s = j["suffix_blocks"];
    require_object(s, "suffix_blocks", {"min", "max"});
    if (s.contains("min")) c.suffix_blocks.min = read_number<std::uint32_t>(s["min"], "suffix_blocks.min");
    if (s.contains("max")) c.suffix_blocks.max = read_number<std::uint32_t>(s["max"], "suffix_blocks.max");
  }
  if (j.contains("seed")) c.seed = read_number<std::uint64_t>(j["seed"], "seed");
  if (j.contains("targets")) {
    const auto& t = j["targets"];
    require_object(t, "targets", {"seq_fraction", "mean_hit_rate"});
    if (t.contains("seq_fraction")) c.targets.seq_fraction = read_number<double>(t["seq_fraction"], "targets.seq_fraction");
    if (t.contains("mean_hit_rate")) {
      c.targets.mean_hit_rate = read_number<double>(t["mean_hit_rate"], "targets.mean_hit_rate");
    }
  }
  c.validate();
  return c;
}

nlohmann::json synth_config_to_json(const SynthConfig& c) {
  nlohmann::json j = {
      {"num_requests", c.num_requests},
      {"mean_interarrival_ms", c.mean_interarrival_ms},
      {"prefix_tree",
       {{"depth", c.prefix_tree.depth},
        {"branching", c.prefix_tree.branching},
        {"blocks_per_node", c.prefix_tree.blocks_per_node}}},
      {"reuse_bias", c.reuse_bias},
      {"random_block_rate", c.random_block_rate},
      {"suffix_blocks", {{"min", c.suffix_blocks.min}, {"max", c.suffix_blocks.max}}},
      {"seed", c.seed},
  };
  nlohmann::json targets = nlohmann::json::object();
  if (c.targets.seq_fraction) targets["seq_fraction"] = *c.targets.seq_fraction;
  if (c.targets.mean_hit_rate) targets["mean_hit_rate"] = *c.targets.mean_hit_rate;
  if (!targets.empty()) j["targets"] = targets;
  return j;
}

namespace {

struct Node {
  BlockId first = 0;
  std::uint32_t length = 0;
  std::uint64_t visits = 0;
  std::vector<std::size_t> children;
};

class Generator {
 public:
  explicit Generator(const SynthConfig& c) : c_(c), rng_(c.seed) {
    nodes_.emplace_back();  // implicit root, owns no blocks
  }

  Trace run() {
    Trace trace;
    trace.label = "synth-seed" + std::to_string(c_.seed);
    trace.requests.reserve(c_.num_requests);
    std::exponential_distribution<double> interarrival(1.0 / c_.mean_interarrival_ms);
    std::uniform_int_distribution<std::uint32_t> output_tokens(64, 512);
    double clock_ms = 0.0;
    for (std::uint64_t i = 0; i < c_.num_requests; ++i) {
      if (i > 0) clock_ms += interarrival(rng_);
      TraceRequest req;
      req.arrival_ms = static_cast<std::uint64_t>(clock_ms);
      req.block_ids = request_blocks();
      req.input_len = req.block_ids.size() * trace.block_tokens;
      req.output_len = output_tokens(rng_);
      trace.requests.push_back(std::move(req));
    }
    return trace;
  }

 private:
  std::size_t new_node(std::size_t parent) {
    Node n;
    n.first = next_id_;
    n.length = c_.prefix_tree.blocks_per_node;
    next_id_ += n.length;
    nodes_.push_back(n);
    nodes_[parent].children.push_back(nodes_.size() - 1);
    return nodes_.size() - 1;
  }

  std::size_t pick_child(std::size_t parent) {
    const auto& kids = nodes_[parent].children;
    const bool can_open = kids.size() < c_.prefix_tree.branching;
    std::vector<double> weights;
    weights.reserve(kids.size() + 1);
    double total = 0.0;
    for (std::size_t k : kids) {
      weights.push_back(c_.reuse_bias * static_cast<double>(nodes_[k].visits));
      total += weights.back();
    }
    if (can_open) {
      weights.push_back(1.0);
      total += 1.0;
    }
    if (total == 0.0) {
      std::fill(weights.begin(), weights.end(), 1.0);
    }
    std::discrete_distribution<std::size_t> choose(weights.begin(), weights.end());
    const std::size_t pick = choose(rng_);
    return pick < kids.size() ? kids[pick] : new_node(parent);
  }

  std::vector<BlockId> request_blocks() {
    std::vector<BlockId> ids;
    std::uniform_int_distribution<std::uint32_t> depth(1, c_.prefix_tree.depth);
    const std::uint32_t target = depth(rng_);
    std::size_t cur = 0;
    for (std::uint32_t level = 0; level < target; ++level) {
      cur = pick_child(cur);
      Node& n = nodes_[cur];
      ++n.visits;
      for (std::uint32_t b = 0; b < n.length; ++b) ids.push_back(n.first + b);
    }

    std::uniform_int_distribution<std::uint32_t> suffix(c_.suffix_blocks.min, c_.suffix_blocks.max);
    const std::uint32_t fresh = suffix(rng_);
    const std::size_t suffix_begin = ids.size();
    for (std::uint32_t b = 0; b < fresh; ++b) ids.push_back(next_id_++);

    std::bernoulli_distribution inject(c_.random_block_rate);
    if (inject(rng_) && !retired_.empty()) {
      std::uniform_int_distribution<std::uint32_t> count(1, kMaxInjectedIds);
      std::uniform_int_distribution<std::size_t> pick(0, retired_.size() - 1);
      const std::uint32_t k = count(rng_);
      for (std::uint32_t j = 0; j < k; ++j) {
        for (int attempt = 0; attempt < 8; ++attempt) {
          const BlockId id = retired_[pick(rng_)];
          if (!ids.empty() && ids.back() + 1 == id) continue;  // would extend a run
          ids.push_back(id);
          break;
        }
      }
    }
    retired_.insert(retired_.end(), ids.begin() + static_cast<std::ptrdiff_t>(suffix_begin),
                    ids.begin() + static_cast<std::ptrdiff_t>(suffix_begin + fresh));
    return ids;
  }

  const SynthConfig& c_;
  std::mt19937_64 rng_;
  std::vector<Node> nodes_;
  std::vector<BlockId> retired_;
  BlockId next_id_ = 0;
};

}  // namespace

Trace generate(const SynthConfig& config) {
  config.validate();
  if (config.num_requests == 0) throw Error(ErrorCode::kEmptyTrace, "empty trace");
  return Generator(config).run();
}

FitReport fit_report(const Trace& trace, const FitTargets& targets) {
  FitReport r;
  r.requests = trace.requests.size();
  const auto rates = request_hit_rates(trace);
  if (!rates.empty()) {
    double sum = 0.0;
    for (const auto& h : rates) sum += h.hit_rate;
    r.mean_hit_rate = sum / static_cast<double>(rates.size());
    r.seq_fraction = mean_sequential_fraction(trace);
  }
  if (targets.seq_fraction) r.seq_fraction_deviation = std::fabs(r.seq_fraction - *targets.seq_fraction);
  if (targets.mean_hit_rate) {
    r.mean_hit_rate_deviation = std::fabs(r.mean_hit_rate - *targets.mean_hit_rate);
  }
  return r;
}

nlohmann::json fit_report_to_json(const FitReport& r) {
  nlohmann::json j = {
      {"requests", r.requests},
      {"seq_fraction", r.seq_fraction},
      {"mean_hit_rate", r.mean_hit_rate},
  };
  j["seq_fraction_deviation"] =
      r.seq_fraction_deviation ? nlohmann::json(*r.seq_fraction_deviation) : nlohmann::json(nullptr);
  j["mean_hit_rate_deviation"] =
      r.mean_hit_rate_deviation ? nlohmann::json(*r.mean_hit_rate_deviation) : nlohmann::json(nullptr);
  return j;
}

}  // namespace kvmeta
