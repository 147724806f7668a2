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

#ifndef TITLECOMP_TASK_DATASET_HPP
#define TITLECOMP_TASK_DATASET_HPP

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "titlecomp/embeddings.hpp"
#include "titlecomp/error.hpp"
#include "titlecomp/ngram_lm.hpp"
#include "titlecomp/parallel.hpp"
#include "titlecomp/rng.hpp"
#include "titlecomp/rule_engine.hpp"
#include "titlecomp/segment_mapper.hpp"
#include "titlecomp/segmenter.hpp"
#include "titlecomp/text_norm.hpp"

namespace titlecomp {

struct Product {
  TokenSequence title;
  std::string category;
};

// One 1-shot row: an example compression and a test compression produced by
// the same rule.
struct MetaExample {
  std::vector<std::string> x_ex;
  LabelVector y_ex;
  std::vector<std::string> x_ts;
  LabelVector y_ts;
  std::string category;
  std::uint64_t rule_id = 0;
  std::uint64_t seed = 0;

  bool operator==(const MetaExample&) const = default;
};

struct RankExample {
  std::vector<std::string> tokens;
  std::vector<int> ranks;

  bool operator==(const RankExample&) const = default;
};

inline bool has_positive(std::span<const std::uint8_t> y) {
  return std::any_of(y.begin(), y.end(), [](std::uint8_t b) { return b != 0; });
}

inline bool all_positive(std::span<const std::uint8_t> y) {
  return std::all_of(y.begin(), y.end(), [](std::uint8_t b) { return b != 0; });
}

// Type invariants of a generated row.
inline bool is_valid(const MetaExample& row) {
  return !row.x_ex.empty() && !row.x_ts.empty() && row.y_ex.size() == row.x_ex.size() &&
         row.y_ts.size() == row.x_ts.size() && has_positive(row.y_ex) && has_positive(row.y_ts);
}

// Products grouped by category; std::map keeps category order stable.
using Catalog = std::map<std::string, std::vector<TokenSequence>>;

inline Catalog group_by_category(std::span<const Product> products) {
  Catalog out;
  for (const auto& p : products) out[p.category].push_back(p.title);
  return out;
}

struct MetaGenOptions {
  std::size_t pairs_per_category = 1000;
  std::size_t rules_per_pair = 4;
  int buckets = 12;
  std::uint64_t seed = 0;
  RuleRanges ranges;
  // Treat rows whose example and test labels are both all-ones as degenerate.
  bool reject_identity = false;
  int max_attempts = 5;
  unsigned threads = 1;
};

struct MetaGenStats {
  std::size_t rows = 0;
  std::size_t retries = 0;
  std::size_t skipped = 0;
};

inline std::uint64_t rule_seed(std::uint64_t base, std::size_t category_index, std::size_t pair_index,
                               std::size_t rule_index, int attempt) {
  return derive_seed(base, {category_index, pair_index, rule_index, static_cast<std::uint64_t>(attempt)});
}

// Distinct unordered pairs drawn uniformly; each pair is returned with a random
// (example, test) orientation.
inline std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(std::size_t n, std::size_t count, Rng& rng) {
  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (count >= total || total <= 4 * static_cast<std::uint64_t>(count)) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    }
    for (std::size_t i = pairs.size(); i > 1; --i) std::swap(pairs[i - 1], pairs[uniform_index(rng, i)]);
    pairs.resize(std::min<std::size_t>(count, pairs.size()));
  } else {
    std::set<std::pair<std::size_t, std::size_t>> seen;
    while (pairs.size() < count) {
      std::size_t a = uniform_index(rng, n), b = uniform_index(rng, n - 1);
      if (b >= a) ++b;
      const auto key = std::minmax(a, b);
      if (seen.insert(key).second) pairs.emplace_back(key.first, key.second);
    }
  }
  for (auto& p : pairs) {
    if (coin(rng)) std::swap(p.first, p.second);
  }
  return pairs;
}

// Meta-training rows. Output order is (category, pair, rule) regardless of
// thread count; rule_id is the flat index of that slot.
inline std::vector<MetaExample> generate_meta_dataset(const Catalog& catalog, const MetaGenOptions& opts,
                                                      const MknModel& model, const EmbeddingTable& table,
                                                      MetaGenStats* stats = nullptr) {
  struct Job {
    std::size_t category_index;
    const std::string* category;
    const std::vector<TokenSequence>* products;
    std::size_t pair_index;
    std::pair<std::size_t, std::size_t> pair;
  };
  std::vector<Job> jobs;
  std::size_t ci = 0;
  for (const auto& [name, products] : catalog) {
    if (products.size() < 2) {
      throw Error(ErrorCode::kCategoryTooSmall,
                  "category \"" + name + "\" has " + std::to_string(products.size()) + " products");
    }
    Rng rng(derive_seed(opts.seed, {ci, 0x70616972ULL}));
    const auto pairs = sample_pairs(products.size(), opts.pairs_per_category, rng);
    for (std::size_t p = 0; p < pairs.size(); ++p) jobs.push_back({ci, &name, &products, p, pairs[p]});
    ++ci;
  }

  struct Slot {
    std::optional<MetaExample> row;
    std::size_t retries = 0;
  };
  const std::size_t rules = opts.rules_per_pair;
  std::vector<Slot> slots(jobs.size() * rules);
  parallel_for(jobs.size(), opts.threads, [&](std::size_t j) {
    const Job& job = jobs[j];
    const TokenSequence& ex = (*job.products)[job.pair.first];
    const TokenSequence& ts = (*job.products)[job.pair.second];
    for (std::size_t r = 0; r < rules; ++r) {
      Slot& slot = slots[j * rules + r];
      for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
        const std::uint64_t seed = rule_seed(opts.seed, job.category_index, job.pair_index, r, attempt);
        const CompressionRule rule = sample_rule(*job.category, table.dim(), opts.buckets, seed, opts.ranges);
        auto [y_ex, y_ts] = transfer_rule(rule, ex, ts, model, table);
        MetaExample row{ex.tokens, std::move(y_ex), ts.tokens, std::move(y_ts), *job.category, j * rules + r, seed};
        const bool degenerate =
            !is_valid(row) || (opts.reject_identity && all_positive(row.y_ex) && all_positive(row.y_ts));
        if (!degenerate) {
          slot.row = std::move(row);
          break;
        }
        ++slot.retries;
      }
    }
  });

  std::vector<MetaExample> out;
  MetaGenStats s;
  for (auto& slot : slots) {
    s.retries += slot.retries;
    if (slot.row) {
      out.push_back(std::move(*slot.row));
    } else {
      ++s.skipped;
    }
  }
  s.rows = out.size();
  if (stats) *stats = s;
  return out;
}

// Per-token rank of the token's segment by length-normalized score, 1 = most
// probable, clamped to B.
inline RankExample rank_example(const TokenSequence& product, const MknModel& model, int buckets, double alpha,
                                double t) {
  const Segmentation seg = segment(model, product, alpha, t);
  const std::vector<int> seg_ranks = rank_labels(seg.log_scores, buckets);
  RankExample ex{product.tokens, std::vector<int>(product.size())};
  for (std::size_t c = 0; c < seg.spans.size(); ++c) {
    for (std::size_t i = seg.spans[c].begin; i < seg.spans[c].end; ++i) ex.ranks[i] = seg_ranks[c];
  }
  return ex;
}

inline std::vector<RankExample> generate_rank_dataset(std::span<const TokenSequence> products,
                                                      const MknModel& model, int buckets, double alpha, double t,
                                                      unsigned threads = 1) {
  std::vector<RankExample> out(products.size());
  parallel_for(products.size(), threads,
               [&](std::size_t i) { out[i] = rank_example(products[i], model, buckets, alpha, t); });
  return out;
}

// ---------------------------------------------------------------------------
// JSON-lines I/O.

namespace detail {

[[noreturn]] inline void malformed(std::size_t lineno, const std::string& what) {
  throw Error(ErrorCode::kMalformedRow, "line " + std::to_string(lineno) + ": " + what);
}

inline LabelVector read_bits(const nlohmann::json& j, const char* key, std::size_t lineno) {
  const auto& arr = j.at(key);
  if (!arr.is_array()) malformed(lineno, std::string(key) + " is not an array");
  LabelVector out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
      malformed(lineno, std::string(key) + " must contain only 0/1");
    }
    out.push_back(static_cast<std::uint8_t>(v.get<int>()));
  }
  return out;
}

inline std::vector<std::string> read_tokens(const nlohmann::json& j, const char* key, std::size_t lineno) {
  const auto& arr = j.at(key);
  if (!arr.is_array()) malformed(lineno, std::string(key) + " is not an array");
  std::vector<std::string> out;
  for (const auto& v : arr) {
    if (!v.is_string()) malformed(lineno, std::string(key) + " must contain strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

// Calls fn(json, lineno) for each non-blank line.
template <typename Fn>
void for_each_json_line(std::istream& is, Fn&& fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      malformed(lineno, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) malformed(lineno, "row is not a JSON object");
    try {
      fn(j, lineno);
    } catch (const nlohmann::json::exception& e) {
      malformed(lineno, e.what());
    }
  }
}

}  // namespace detail

inline void write_meta_row(std::ostream& os, const MetaExample& row) {
  nlohmann::ordered_json j;
  j["x_ex"] = row.x_ex;
  j["y_ex"] = row.y_ex;
  j["x_ts"] = row.x_ts;
  j["y_ts"] = row.y_ts;
  j["category"] = row.category;
  j["rule_id"] = row.rule_id;
  j["seed"] = row.seed;
  os << j.dump() << '\n';
}

inline void write_meta_dataset(std::ostream& os, std::span<const MetaExample> rows) {
  for (const auto& r : rows) write_meta_row(os, r);
}

inline std::vector<MetaExample> read_meta_dataset(std::istream& is) {
  std::vector<MetaExample> rows;
  detail::for_each_json_line(is, [&](const nlohmann::json& j, std::size_t lineno) {
    MetaExample r;
    r.x_ex = detail::read_tokens(j, "x_ex", lineno);
    r.y_ex = detail::read_bits(j, "y_ex", lineno);
    r.x_ts = detail::read_tokens(j, "x_ts", lineno);
    r.y_ts = detail::read_bits(j, "y_ts", lineno);
    r.category = j.at("category").get<std::string>();
    r.rule_id = j.at("rule_id").get<std::uint64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    if (r.x_ex.size() != r.y_ex.size()) detail::malformed(lineno, "x_ex and y_ex lengths differ");
    if (r.x_ts.size() != r.y_ts.size()) detail::malformed(lineno, "x_ts and y_ts lengths differ");
    rows.push_back(std::move(r));
  });
  return rows;
}

// Reads only one label column (default y_ts) from each row; used for
// prediction files that need not carry the full row.
inline std::vector<LabelVector> read_label_column(std::istream& is, const char* key = "y_ts") {
  std::vector<LabelVector> out;
  detail::for_each_json_line(is, [&](const nlohmann::json& j, std::size_t lineno) {
    out.push_back(detail::read_bits(j, key, lineno));
  });
  return out;
}

inline void write_rank_dataset(std::ostream& os, std::span<const RankExample> rows) {
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["tokens"] = r.tokens;
    j["ranks"] = r.ranks;
    os << j.dump() << '\n';
  }
}

inline std::vector<RankExample> read_rank_dataset(std::istream& is) {
  std::vector<RankExample> rows;
  detail::for_each_json_line(is, [&](const nlohmann::json& j, std::size_t lineno) {
    RankExample r;
    r.tokens = detail::read_tokens(j, "tokens", lineno);
    const auto& ranks = j.at("ranks");
    if (!ranks.is_array()) detail::malformed(lineno, "ranks is not an array");
    for (const auto& v : ranks) {
      if (!v.is_number_integer() || v.get<int>() < 1) detail::malformed(lineno, "ranks must be positive integers");
      r.ranks.push_back(v.get<int>());
    }
    if (r.ranks.size() != r.tokens.size()) detail::malformed(lineno, "tokens and ranks lengths differ");
    rows.push_back(std::move(r));
  });
  return rows;
}

// {"title": ..., "category": ...} per line. Titles are normalized on read.
inline std::vector<Product> read_products(std::istream& is) {
  std::vector<Product> out;
  detail::for_each_json_line(is, [&](const nlohmann::json& j, std::size_t lineno) {
    const auto& title = j.at("title");
    const auto& category = j.at("category");
    if (!title.is_string() || !category.is_string()) detail::malformed(lineno, "title and category must be strings");
    try {
      out.push_back({normalize(title.get<std::string>()), category.get<std::string>()});
    } catch (const Error& e) {
      detail::malformed(lineno, e.what());
    }
  });
  return out;
}

inline void write_products(std::ostream& os, std::span<const Product> products) {
  for (const auto& p : products) {
    nlohmann::ordered_json j;
    j["title"] = p.title.raw;
    j["category"] = p.category;
    os << j.dump() << '\n';
  }
}

}  // namespace titlecomp

#endif  // TITLECOMP_TASK_DATASET_HPP
