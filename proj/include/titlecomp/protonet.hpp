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

#ifndef TITLECOMP_PROTONET_HPP
#define TITLECOMP_PROTONET_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "titlecomp/embeddings.hpp"
#include "titlecomp/error.hpp"
#include "titlecomp/text_norm.hpp"

namespace titlecomp {

// Class means of the example tokens: index 0 = drop, 1 = keep.
struct Prototypes {
  Eigen::VectorXd centroid0;
  Eigen::VectorXd centroid1;
};

struct Classification {
  LabelVector labels;
  std::vector<double> keep_prob;  // p(class 1) per token
};

inline Prototypes fit_prototypes(const Eigen::MatrixXd& example, std::span<const std::uint8_t> labels) {
  if (static_cast<std::size_t>(example.rows()) != labels.size()) {
    throw Error(ErrorCode::kLengthMismatch, "one label per example row required");
  }
  Eigen::VectorXd sum[2] = {Eigen::VectorXd::Zero(example.cols()), Eigen::VectorXd::Zero(example.cols())};
  std::size_t count[2] = {0, 0};
  for (Eigen::Index i = 0; i < example.rows(); ++i) {
    const int c = labels[static_cast<std::size_t>(i)] ? 1 : 0;
    sum[c] += example.row(i).transpose();
    ++count[c];
  }
  if (count[0] == 0 || count[1] == 0) {
    throw Error(ErrorCode::kMissingClass, count[0] == 0 ? "no class-0 example tokens" : "no class-1 example tokens");
  }
  return {sum[0] / static_cast<double>(count[0]), sum[1] / static_cast<double>(count[1])};
}

// Softmax over negative squared Euclidean distances. p(1) = sigmoid(d0 - d1);
// a token is labeled 1 only when strictly closer to the keep centroid.
inline Classification classify(const Eigen::MatrixXd& test, const Prototypes& protos) {
  if (test.cols() != protos.centroid0.size() || protos.centroid0.size() != protos.centroid1.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "test embeddings and prototypes differ in dimension");
  }
  Classification out;
  out.labels.reserve(static_cast<std::size_t>(test.rows()));
  out.keep_prob.reserve(static_cast<std::size_t>(test.rows()));
  for (Eigen::Index i = 0; i < test.rows(); ++i) {
    const double d0 = (test.row(i).transpose() - protos.centroid0).squaredNorm();
    const double d1 = (test.row(i).transpose() - protos.centroid1).squaredNorm();
    const double margin = d0 - d1;
    const double p1 = margin >= 0 ? 1.0 / (1.0 + std::exp(-margin))
                                  : std::exp(margin) / (1.0 + std::exp(margin));
    out.keep_prob.push_back(p1);
    out.labels.push_back(d1 < d0 ? 1 : 0);
  }
  return out;
}

// One 1-shot prediction. When the example carries a single class, every
// test token gets that class.
inline LabelVector predict_one_shot(const EmbeddingTable& table, std::span<const std::string> x_ex,
                                    std::span<const std::uint8_t> y_ex, std::span<const std::string> x_ts) {
  std::size_t keep = 0;
  for (auto b : y_ex) keep += b ? 1 : 0;
  if (keep == 0 || keep == y_ex.size()) return LabelVector(x_ts.size(), keep ? 1 : 0);
  const Prototypes protos = fit_prototypes(table.embed(x_ex), y_ex);
  return classify(table.embed(x_ts), protos).labels;
}

}  // namespace titlecomp

#endif  // TITLECOMP_PROTONET_HPP
