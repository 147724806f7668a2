// Copyright 2026 The Titlecomp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Compression rules.
//
// A rule composes four steps: greedy segmentation (alpha, t), segment typing
// (MappingParams, which assigns each segment a bucket label in 1..B),
// segment retention (one keep bit per bucket label), and intra-segment
// retention (one span-selection mode per bucket label). Because retention
// decisions are tables keyed by bucket label, the same rule can be applied to
// any product of the category, and segments that land in the same bucket are
// treated the same way.

#ifndef TITLECOMP_RULE_ENGINE_HPP
#define TITLECOMP_RULE_ENGINE_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "titlecomp/embeddings.hpp"
#include "titlecomp/error.hpp"
#include "titlecomp/ngram_lm.hpp"
#include "titlecomp/rng.hpp"
#include "titlecomp/segment_mapper.hpp"
#include "titlecomp/segmenter.hpp"
#include "titlecomp/text_norm.hpp"

namespace titlecomp {

enum class RetentionMode { kPrefix, kSuffix, kSubstring, kAll };

inline constexpr std::array<RetentionMode, 4> kAllModes{RetentionMode::kPrefix, RetentionMode::kSuffix,
                                                        RetentionMode::kSubstring, RetentionMode::kAll};
inline constexpr std::array<RetentionMode, 3> kSpanModes{RetentionMode::kPrefix, RetentionMode::kSuffix,
                                                         RetentionMode::kSubstring};

inline std::string_view mode_name(RetentionMode m) {
  switch (m) {
    case RetentionMode::kPrefix: return "prefix";
    case RetentionMode::kSuffix: return "suffix";
    case RetentionMode::kSubstring: return "substring";
    case RetentionMode::kAll: return "all";
  }
  return "?";
}

inline RetentionMode parse_mode(std::string_view name) {
  for (RetentionMode m : kAllModes) {
    if (mode_name(m) == name) return m;
  }
  throw Error(ErrorCode::kMalformedRow, "unknown retention mode \"" + std::string(name) + "\"");
}

struct CompressionRule {
  std::string category;
  double alpha = 0.0;  // segmentation length exponent
  double t = 0.0;      // segmentation threshold
  MappingParams mapping;
  std::vector<std::uint8_t> retain;   // index = bucket label - 1
  std::vector<RetentionMode> modes;   // index = bucket label - 1
  std::uint64_t seed = 0;

  int buckets() const { return mapping.buckets; }
  bool operator==(const CompressionRule&) const = default;
};

struct RuleRanges {
  std::pair<double, double> alpha{-1.0, 1.0};
  std::pair<double, double> t{0.0, 0.0};
  std::vector<RetentionMode> modes{kAllModes.begin(), kAllModes.end()};
};

inline CompressionRule sample_rule(std::string category, std::size_t dim, int buckets, std::uint64_t seed,
                                   const RuleRanges& ranges) {
  if (ranges.modes.empty()) throw Error(ErrorCode::kEmptyInput, "no retention modes to sample from");
  Rng rng(seed);
  CompressionRule rule;
  rule.category = std::move(category);
  rule.seed = seed;
  rule.alpha = uniform_real(rng, ranges.alpha.first, ranges.alpha.second);
  rule.t = uniform_real(rng, ranges.t.first, ranges.t.second);
  rule.mapping = sample_mapping_params(dim, buckets, ranges.alpha, rng());
  rule.retain.resize(static_cast<std::size_t>(buckets));
  rule.modes.resize(static_cast<std::size_t>(buckets));
  for (auto& bit : rule.retain) bit = coin(rng) ? 1 : 0;
  for (auto& m : rule.modes) m = ranges.modes[uniform_index(rng, ranges.modes.size())];
  return rule;
}

// Per-segment keep bits from the rule's table, with the highest-scoring
// segment (earliest on ties) always kept.
inline std::vector<std::uint8_t> retain_segments(const Segmentation& seg, const SegmentMap& smap,
                                                 const CompressionRule& rule) {
  if (smap.segment_labels.size() != seg.num_segments()) {
    throw Error(ErrorCode::kCoverageMismatch, "segment map does not match segmentation");
  }
  std::vector<std::uint8_t> r(seg.num_segments(), 0);
  for (std::size_t j = 0; j < r.size(); ++j) {
    r[j] = rule.retain.at(static_cast<std::size_t>(smap.segment_labels[j] - 1));
  }
  if (!r.empty()) {
    const auto best = std::max_element(seg.log_scores.begin(), seg.log_scores.end());
    r[static_cast<std::size_t>(best - seg.log_scores.begin())] = 1;
  }
  return r;
}

// Keep mask over one segment. Span modes keep the best-scoring prefix, suffix
// or contiguous substring; ties go to the shortest, then leftmost span.
inline LabelVector intra_retention(std::span<const WordId> segment, RetentionMode mode, const MknModel& model,
                                   double alpha) {
  const std::size_t n = segment.size();
  if (n == 0) throw Error(ErrorCode::kEmptyInput, "empty segment");
  LabelVector mask(n, 0);
  if (mode == RetentionMode::kAll || n == 1) {
    std::fill(mask.begin(), mask.end(), 1);
    return mask;
  }
  Span best{};
  double best_score = -std::numeric_limits<double>::infinity();
  auto consider = [&](std::size_t b, std::size_t e) {
    const double s = model.length_normalized_log_score(segment.subspan(b, e - b), alpha);
    if (s > best_score) {
      best_score = s;
      best = {b, e};
    }
  };
  for (std::size_t len = 1; len <= n; ++len) {
    switch (mode) {
      case RetentionMode::kPrefix: consider(0, len); break;
      case RetentionMode::kSuffix: consider(n - len, n); break;
      case RetentionMode::kSubstring:
        for (std::size_t b = 0; b + len <= n; ++b) consider(b, b + len);
        break;
      case RetentionMode::kAll: break;
    }
  }
  std::fill(mask.begin() + static_cast<std::ptrdiff_t>(best.begin),
            mask.begin() + static_cast<std::ptrdiff_t>(best.end), 1);
  return mask;
}

// y = concat over segments of (mask_j * r_j).
inline LabelVector compose_labels(const Segmentation& seg, std::span<const std::uint8_t> retained,
                                  std::span<const LabelVector> masks) {
  if (retained.size() != seg.num_segments() || masks.size() != seg.num_segments()) {
    throw Error(ErrorCode::kCoverageMismatch, "expected one retention bit and one mask per segment");
  }
  LabelVector y;
  y.reserve(seg.num_tokens());
  for (std::size_t j = 0; j < masks.size(); ++j) {
    if (masks[j].size() != seg.spans[j].size()) {
      throw Error(ErrorCode::kCoverageMismatch, "mask " + std::to_string(j) + " has " +
                                                    std::to_string(masks[j].size()) + " bits for a segment of " +
                                                    std::to_string(seg.spans[j].size()) + " tokens");
    }
    for (std::uint8_t m : masks[j]) y.push_back(static_cast<std::uint8_t>(m * retained[j]));
  }
  return y;
}

// Every intermediate of one rule application.
struct RuleTrace {
  Segmentation segmentation;
  SegmentMap segment_map;
  std::vector<std::uint8_t> retained;
  std::vector<LabelVector> masks;
  LabelVector labels;
};

inline RuleTrace trace_rule(const CompressionRule& rule, const TokenSequence& product, const MknModel& model,
                            const EmbeddingTable& table) {
  if (product.tokens.empty()) throw Error(ErrorCode::kEmptyInput, "empty product");
  const auto ids = model.ids(product.tokens);
  const std::span<const WordId> id_span(ids);
  RuleTrace tr;
  tr.segmentation = segment(model, id_span, rule.alpha, rule.t);
  tr.segment_map = map_segments(product.tokens, tr.segmentation, model, table, rule.mapping);
  tr.retained = retain_segments(tr.segmentation, tr.segment_map, rule);
  for (std::size_t j = 0; j < tr.segmentation.num_segments(); ++j) {
    const Span& s = tr.segmentation.spans[j];
    if (!tr.retained[j]) {
      tr.masks.emplace_back(s.size(), 0);
      continue;
    }
    const RetentionMode mode = rule.modes.at(static_cast<std::size_t>(tr.segment_map.segment_labels[j] - 1));
    tr.masks.push_back(intra_retention(id_span.subspan(s.begin, s.size()), mode, model, rule.alpha));
  }
  tr.labels = compose_labels(tr.segmentation, tr.retained, tr.masks);
  return tr;
}

inline LabelVector apply_rule(const CompressionRule& rule, const TokenSequence& product, const MknModel& model,
                              const EmbeddingTable& table) {
  return trace_rule(rule, product, model, table).labels;
}

inline std::pair<LabelVector, LabelVector> transfer_rule(const CompressionRule& rule, const TokenSequence& example,
                                                         const TokenSequence& test, const MknModel& model,
                                                         const EmbeddingTable& table) {
  return {apply_rule(rule, example, model, table), apply_rule(rule, test, model, table)};
}

inline nlohmann::ordered_json rule_to_json(const CompressionRule& rule) {
  nlohmann::ordered_json theta_a = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < rule.mapping.theta_a.rows(); ++i) {
    theta_a.push_back({rule.mapping.theta_a(i, 0), rule.mapping.theta_a(i, 1)});
  }
  nlohmann::ordered_json j;
  j["category"] = rule.category;
  j["seed"] = rule.seed;
  j["alpha"] = rule.alpha;
  j["t"] = rule.t;
  j["mapping"] = {{"alpha", rule.mapping.alpha},
                  {"buckets", rule.mapping.buckets},
                  {"theta_a", theta_a},
                  {"theta_b",
                   {rule.mapping.theta_b[0], rule.mapping.theta_b[1], rule.mapping.theta_b[2], rule.mapping.theta_b[3]}}};
  j["retain"] = rule.retain;
  nlohmann::ordered_json modes = nlohmann::ordered_json::array();
  for (RetentionMode m : rule.modes) modes.push_back(mode_name(m));
  j["modes"] = modes;
  return j;
}

inline CompressionRule rule_from_json(const nlohmann::json& j) {
  try {
    CompressionRule rule;
    rule.category = j.at("category").get<std::string>();
    rule.seed = j.at("seed").get<std::uint64_t>();
    rule.alpha = j.at("alpha").get<double>();
    rule.t = j.at("t").get<double>();
    const auto& m = j.at("mapping");
    rule.mapping.alpha = m.at("alpha").get<double>();
    rule.mapping.buckets = m.at("buckets").get<int>();
    const auto& ta = m.at("theta_a");
    rule.mapping.theta_a.resize(static_cast<Eigen::Index>(ta.size()), 2);
    for (std::size_t i = 0; i < ta.size(); ++i) {
      if (ta[i].size() != 2) throw Error(ErrorCode::kMalformedRow, "theta_a rows must have 2 entries");
      rule.mapping.theta_a(static_cast<Eigen::Index>(i), 0) = ta[i][0].get<double>();
      rule.mapping.theta_a(static_cast<Eigen::Index>(i), 1) = ta[i][1].get<double>();
    }
    const auto& tb = m.at("theta_b");
    if (tb.size() != 4) throw Error(ErrorCode::kMalformedRow, "theta_b must have 4 entries");
    for (int k = 0; k < 4; ++k) rule.mapping.theta_b[k] = tb[static_cast<std::size_t>(k)].get<double>();
    rule.retain = j.at("retain").get<std::vector<std::uint8_t>>();
    for (const auto& name : j.at("modes")) rule.modes.push_back(parse_mode(name.get<std::string>()));
    const auto b = static_cast<std::size_t>(rule.mapping.buckets);
    if (rule.mapping.buckets < 1 || rule.retain.size() != b || rule.modes.size() != b) {
      throw Error(ErrorCode::kMalformedRow, "retain/modes tables must cover buckets 1..B");
    }
    return rule;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedRow, e.what());
  }
}

}  // namespace titlecomp

#endif  // TITLECOMP_RULE_ENGINE_HPP
