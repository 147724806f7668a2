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

#ifndef TITLECOMP_SEGMENT_MAPPER_HPP
#define TITLECOMP_SEGMENT_MAPPER_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "titlecomp/embeddings.hpp"
#include "titlecomp/error.hpp"
#include "titlecomp/ngram_lm.hpp"
#include "titlecomp/rng.hpp"
#include "titlecomp/segmenter.hpp"

namespace titlecomp {

// Parameters of one segment-typing draw: a d x 2 projection of the segment
// centroid, a 4-vector projecting [centroid2d; score; position] to a scalar,
// the length exponent for the score feature, and the bucket count B.
struct MappingParams {
  Eigen::MatrixXd theta_a;
  Eigen::Vector4d theta_b = Eigen::Vector4d::Zero();
  double alpha = 0.0;
  int buckets = 1;

  bool operator==(const MappingParams& o) const {
    return theta_a.rows() == o.theta_a.rows() && theta_a.cols() == o.theta_a.cols() &&
           theta_a == o.theta_a && theta_b == o.theta_b && alpha == o.alpha && buckets == o.buckets;
  }
};

struct SegmentMap {
  std::vector<int> token_labels;    // per token, in 1..B
  std::vector<int> segment_labels;  // per segment, in 1..B
  std::vector<std::array<double, 4>> features;
  std::vector<double> projections;  // per segment scalar used for ranking
};

// 1 + position of each value in a descending stable sort, clamped to
// `buckets`. Ties keep index order.
inline std::vector<int> rank_labels(std::span<const double> values, int buckets) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<int> labels(values.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    labels[order[pos]] = std::min(static_cast<int>(pos) + 1, buckets);
  }
  return labels;
}

inline SegmentMap map_segments(std::span<const std::string> tokens, const Segmentation& seg,
                               const MknModel& model, const EmbeddingTable& table,
                               const MappingParams& params) {
  if (seg.num_tokens() != tokens.size()) {
    throw Error(ErrorCode::kLengthMismatch, "segmentation does not cover the token sequence");
  }
  if (params.theta_a.rows() != static_cast<Eigen::Index>(table.dim()) || params.theta_a.cols() != 2) {
    throw Error(ErrorCode::kDimensionMismatch,
                "theta_a is " + std::to_string(params.theta_a.rows()) + "x" +
                    std::to_string(params.theta_a.cols()) + ", embeddings have d=" +
                    std::to_string(table.dim()));
  }
  if (params.buckets < 1) throw Error(ErrorCode::kDimensionMismatch, "bucket count must be >= 1");

  const auto ids = model.ids(tokens);
  const Eigen::MatrixXd emb = table.embed(tokens);
  SegmentMap out;
  for (std::size_t c = 0; c < seg.spans.size(); ++c) {
    const Span& s = seg.spans[c];
    const Eigen::RowVectorXd centroid =
        emb.middleRows(static_cast<Eigen::Index>(s.begin), static_cast<Eigen::Index>(s.size())).colwise().mean();
    const Eigen::RowVector2d centroid2d = centroid * params.theta_a;
    const double score =
        model.length_normalized_score(std::span<const WordId>(ids).subspan(s.begin, s.size()), params.alpha);
    const std::array<double, 4> f{centroid2d[0], centroid2d[1], score, static_cast<double>(c + 1)};
    out.features.push_back(f);
    out.projections.push_back(Eigen::Map<const Eigen::Vector4d>(f.data()).dot(params.theta_b));
  }
  out.segment_labels = rank_labels(out.projections, params.buckets);
  out.token_labels.resize(tokens.size());
  for (std::size_t c = 0; c < seg.spans.size(); ++c) {
    for (std::size_t i = seg.spans[c].begin; i < seg.spans[c].end; ++i) {
      out.token_labels[i] = out.segment_labels[c];
    }
  }
  return out;
}

inline MappingParams sample_mapping_params(std::size_t dim, int buckets, std::pair<double, double> alpha_range,
                                           std::uint64_t seed) {
  if (dim == 0 || buckets < 1) throw Error(ErrorCode::kDimensionMismatch, "d and B must be positive");
  Rng rng(seed);
  MappingParams p;
  p.buckets = buckets;
  p.theta_a.resize(static_cast<Eigen::Index>(dim), 2);
  for (Eigen::Index i = 0; i < p.theta_a.rows(); ++i) {
    for (Eigen::Index j = 0; j < 2; ++j) p.theta_a(i, j) = gaussian(rng);
  }
  for (int k = 0; k < 4; ++k) p.theta_b[k] = gaussian(rng);
  p.alpha = uniform_real(rng, alpha_range.first, alpha_range.second);
  return p;
}

}  // namespace titlecomp

#endif  // TITLECOMP_SEGMENT_MAPPER_HPP
