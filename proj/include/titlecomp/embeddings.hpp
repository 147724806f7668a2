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

#ifndef TITLECOMP_EMBEDDINGS_HPP
#define TITLECOMP_EMBEDDINGS_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>

#include <Eigen/Dense>

#include "titlecomp/error.hpp"
#include "titlecomp/rng.hpp"

namespace titlecomp {

enum class EmbeddingKind { kFile, kHashed };

// Deterministic unit-norm Gaussian vector for (token, dim, seed). Depends only
// on the token bytes, never on addresses or process state.
inline Eigen::VectorXd hashed_vector(std::string_view token, std::size_t dim, std::uint64_t seed) {
  Rng rng(derive_seed(seed, {fnv1a64(token), dim}));
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = gaussian(rng);
  const double norm = v.norm();
  if (norm > 0.0) v /= norm;
  return v;
}

// Token -> R^d lookup. File-backed tables fall back to hashed vectors (seed 0,
// same dimension) for tokens they do not contain.
class EmbeddingTable {
 public:
  static constexpr std::size_t kDefaultDim = 64;

  static EmbeddingTable hashed(std::size_t dim = kDefaultDim, std::uint64_t seed = 0) {
    if (dim == 0) throw Error(ErrorCode::kInconsistentDimension, "embedding dimension must be positive");
    EmbeddingTable t;
    t.kind_ = EmbeddingKind::kHashed;
    t.dim_ = dim;
    t.seed_ = seed;
    return t;
  }

  // "token v1 ... vd" per line, whitespace separated.
  static EmbeddingTable load(std::istream& is) {
    EmbeddingTable t;
    t.kind_ = EmbeddingKind::kFile;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      std::istringstream fields(line);
      std::string token;
      if (!(fields >> token)) continue;
      std::vector<double> values;
      std::string field;
      while (fields >> field) {
        std::size_t used = 0;
        double x = 0.0;
        try {
          x = std::stod(field, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != field.size() || !std::isfinite(x)) {
          throw Error(ErrorCode::kMalformedFile,
                      "line " + std::to_string(lineno) + ": bad component \"" + field + "\"");
        }
        values.push_back(x);
      }
      if (values.empty()) {
        throw Error(ErrorCode::kMalformedFile, "line " + std::to_string(lineno) + ": no vector components");
      }
      if (t.dim_ == 0) {
        t.dim_ = values.size();
      } else if (values.size() != t.dim_) {
        throw Error(ErrorCode::kInconsistentDimension,
                    "line " + std::to_string(lineno) + " has " + std::to_string(values.size()) +
                        " components, expected " + std::to_string(t.dim_));
      }
      t.vectors_.try_emplace(token, Eigen::Map<Eigen::VectorXd>(values.data(),
                                                                static_cast<Eigen::Index>(values.size())));
    }
    if (t.dim_ == 0) throw Error(ErrorCode::kMalformedFile, "embedding file has no vectors");
    return t;
  }

  static EmbeddingTable load_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorCode::kIo, "cannot open embeddings " + path);
    return load(is);
  }

  // "hashed:<d>:<seed>" or a path to a text vector file.
  static EmbeddingTable from_spec(const std::string& spec) {
    if (spec.rfind("hashed", 0) == 0) {
      std::size_t dim = kDefaultDim;
      std::uint64_t seed = 0;
      std::string rest = spec.substr(6);
      if (!rest.empty()) {
        const auto colon2 = rest.find(':', 1);
        try {
          if (rest[0] != ':') throw std::invalid_argument("");
          dim = std::stoul(rest.substr(1, colon2 == std::string::npos ? std::string::npos : colon2 - 1));
          if (colon2 != std::string::npos) seed = std::stoull(rest.substr(colon2 + 1));
        } catch (const std::exception&) {
          throw Error(ErrorCode::kMalformedFile, "bad embedding spec \"" + spec + "\"");
        }
      }
      return hashed(dim, seed);
    }
    return load_file(spec);
  }

  EmbeddingKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t size() const { return vectors_.size(); }
  bool contains(const std::string& token) const { return vectors_.count(token) != 0; }

  Eigen::VectorXd vector(const std::string& token) const {
    if (auto it = vectors_.find(token); it != vectors_.end()) return it->second;
    return hashed_vector(token, dim_, seed_);
  }

  // Row i is the vector of tokens[i].
  Eigen::MatrixXd embed(std::span<const std::string> tokens) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(tokens.size()), static_cast<Eigen::Index>(dim_));
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      out.row(static_cast<Eigen::Index>(i)) = vector(tokens[i]).transpose();
    }
    return out;
  }

 private:
  EmbeddingKind kind_ = EmbeddingKind::kHashed;
  std::size_t dim_ = 0;
  std::uint64_t seed_ = 0;
  std::unordered_map<std::string, Eigen::VectorXd> vectors_;
};

}  // namespace titlecomp

#endif  // TITLECOMP_EMBEDDINGS_HPP
