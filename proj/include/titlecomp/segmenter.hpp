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

#ifndef TITLECOMP_SEGMENTER_HPP
#define TITLECOMP_SEGMENTER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "titlecomp/error.hpp"
#include "titlecomp/ngram_lm.hpp"
#include "titlecomp/text_norm.hpp"

namespace titlecomp {

// Half-open token range [begin, end).
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  bool operator==(const Span&) const = default;
};

// Contiguous segmentation of a token sequence. Segment ids are 1-based.
struct Segmentation {
  std::vector<int> segment_ids;  // per token
  std::vector<Span> spans;       // per segment
  std::vector<double> scores;    // per segment, length-normalized score
  std::vector<double> log_scores;

  std::size_t num_segments() const { return spans.size(); }
  std::size_t num_tokens() const { return segment_ids.size(); }
  bool operator==(const Segmentation&) const = default;
};

// Split statistic for token i (i >= 1, 0-based): unigram probability minus the
// best length-weighted joint probability of the 2- or 3-token window ending at
// i. Joint window probabilities use no context outside the window.
inline double split_statistic(const MknModel& model, std::span<const WordId> ids, std::size_t i,
                              double alpha) {
  const double unigram = model.prob(ids[i]);
  double best = std::exp(alpha * std::log(2.0) + model.sequence_log_prob(ids.subspan(i - 1, 2)));
  if (i >= 2) {
    best = std::max(best, std::exp(alpha * std::log(3.0) + model.sequence_log_prob(ids.subspan(i - 2, 3))));
  }
  return unigram - best;
}

inline std::vector<double> split_statistics(const MknModel& model, std::span<const WordId> ids, double alpha) {
  std::vector<double> out;
  for (std::size_t i = 1; i < ids.size(); ++i) out.push_back(split_statistic(model, ids, i, alpha));
  return out;
}

// Fills spans and scores from segment ids.
inline void finish_segmentation(const MknModel& model, std::span<const WordId> ids, double alpha,
                                Segmentation& seg) {
  seg.spans.clear();
  seg.scores.clear();
  seg.log_scores.clear();
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= ids.size(); ++i) {
    if (i == ids.size() || seg.segment_ids[i] != seg.segment_ids[i - 1]) {
      seg.spans.push_back({begin, i});
      begin = i;
    }
  }
  for (const auto& s : seg.spans) {
    const double ls = model.length_normalized_log_score(ids.subspan(s.begin, s.size()), alpha);
    seg.log_scores.push_back(ls);
    seg.scores.push_back(std::exp(ls));
  }
}

// Greedy left-to-right segmentation: token i joins the current segment iff its
// split statistic is <= t.
inline Segmentation segment(const MknModel& model, std::span<const WordId> ids, double alpha, double t) {
  if (ids.empty()) throw Error(ErrorCode::kEmptyInput, "cannot segment an empty title");
  Segmentation seg;
  seg.segment_ids.reserve(ids.size());
  seg.segment_ids.push_back(1);
  for (std::size_t i = 1; i < ids.size(); ++i) {
    const double det = split_statistic(model, ids, i, alpha);
    seg.segment_ids.push_back(det <= t ? seg.segment_ids.back() : seg.segment_ids.back() + 1);
  }
  finish_segmentation(model, ids, alpha, seg);
  return seg;
}

inline Segmentation segment(const MknModel& model, const TokenSequence& tokens, double alpha, double t) {
  const auto ids = model.ids(tokens.tokens);
  return segment(model, std::span<const WordId>(ids), alpha, t);
}

// Checks the contiguity and coverage invariants.
inline bool is_valid_segmentation(const Segmentation& seg, std::size_t num_tokens) {
  if (seg.segment_ids.size() != num_tokens || num_tokens == 0) return false;
  if (seg.segment_ids[0] != 1) return false;
  for (std::size_t i = 1; i < num_tokens; ++i) {
    const int step = seg.segment_ids[i] - seg.segment_ids[i - 1];
    if (step != 0 && step != 1) return false;
  }
  if (seg.spans.size() != static_cast<std::size_t>(seg.segment_ids.back())) return false;
  std::size_t expect = 0;
  for (std::size_t c = 0; c < seg.spans.size(); ++c) {
    const Span& s = seg.spans[c];
    if (s.begin != expect || s.end <= s.begin) return false;
    for (std::size_t i = s.begin; i < s.end; ++i) {
      if (seg.segment_ids[i] != static_cast<int>(c) + 1) return false;
    }
    expect = s.end;
  }
  return expect == num_tokens && seg.scores.size() == seg.spans.size();
}

// Empirical [lo, hi] quantiles of the split statistic over a set of titles.
// Used to pick threshold ranges that keep segmentation non-degenerate.
inline std::pair<double, double> split_statistic_range(const MknModel& model,
                                                       std::span<const TokenSequence> titles, double alpha,
                                                       double lo_quantile = 0.05, double hi_quantile = 0.95) {
  std::vector<double> all;
  for (const auto& title : titles) {
    const auto ids = model.ids(title.tokens);
    const auto dets = split_statistics(model, ids, alpha);
    all.insert(all.end(), dets.begin(), dets.end());
  }
  if (all.empty()) return {0.0, 0.0};
  std::sort(all.begin(), all.end());
  auto at = [&](double q) {
    const double pos = q * static_cast<double>(all.size() - 1);
    const auto idx = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(idx);
    if (idx + 1 >= all.size()) return all.back();
    return all[idx] + frac * (all[idx + 1] - all[idx]);
  };
  return {at(lo_quantile), at(hi_quantile)};
}

}  // namespace titlecomp

#endif  // TITLECOMP_SEGMENTER_HPP
