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

#ifndef TITLECOMP_METRICS_HPP
#define TITLECOMP_METRICS_HPP

#include <cstdint>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "titlecomp/error.hpp"
#include "titlecomp/text_norm.hpp"

namespace titlecomp {

// Micro-averaged over all tokens; positive class is 1.
struct PrfScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double em = 0.0;  // percent
  std::size_t n = 0;
};

struct Confusion {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;

  Confusion& operator+=(const Confusion& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
};

namespace detail {

inline void check_rows(std::size_t gold, std::size_t pred) {
  if (gold != pred) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(gold) + " gold rows vs " + std::to_string(pred) + " predicted rows");
  }
}

inline void check_lengths(std::size_t row, std::size_t gold, std::size_t pred) {
  if (gold != pred) {
    throw Error(ErrorCode::kLengthMismatch, "row " + std::to_string(row) + ": " + std::to_string(gold) +
                                                " gold labels vs " + std::to_string(pred) + " predicted");
  }
}

inline double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace detail

inline Confusion confusion(std::span<const LabelVector> gold, std::span<const LabelVector> pred) {
  detail::check_rows(gold.size(), pred.size());
  Confusion c;
  for (std::size_t r = 0; r < gold.size(); ++r) {
    detail::check_lengths(r, gold[r].size(), pred[r].size());
    for (std::size_t i = 0; i < gold[r].size(); ++i) {
      const bool g = gold[r][i] != 0, p = pred[r][i] != 0;
      if (g && p) ++c.tp;
      else if (!g && p) ++c.fp;
      else if (g && !p) ++c.fn;
      else ++c.tn;
    }
  }
  return c;
}

inline PrfScores prf_from_confusion(const Confusion& c) {
  PrfScores s;
  s.precision = detail::ratio(c.tp, c.tp + c.fp);
  s.recall = detail::ratio(c.tp, c.tp + c.fn);
  s.f1 = (s.precision + s.recall) == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

inline PrfScores token_prf(std::span<const LabelVector> gold, std::span<const LabelVector> pred) {
  return prf_from_confusion(confusion(gold, pred));
}

// Percentage of rows whose label vectors are identical.
inline double exact_match(std::span<const LabelVector> gold, std::span<const LabelVector> pred) {
  detail::check_rows(gold.size(), pred.size());
  if (gold.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < gold.size(); ++r) {
    detail::check_lengths(r, gold[r].size(), pred[r].size());
    if (gold[r] == pred[r]) ++hits;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(gold.size());
}

inline EvalReport evaluate(std::span<const LabelVector> gold, std::span<const LabelVector> pred) {
  const PrfScores s = token_prf(gold, pred);
  return {s.precision, s.recall, s.f1, exact_match(gold, pred), gold.size()};
}

inline nlohmann::ordered_json to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["em"] = r.em;
  j["n"] = r.n;
  return j;
}

}  // namespace titlecomp

#endif  // TITLECOMP_METRICS_HPP
