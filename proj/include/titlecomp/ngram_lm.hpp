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

// Interpolated modified Kneser-Ney trigram model.
//
// Every token of a training line is an event predicted from its two preceding
// tokens, with two <s> pads in front of the line and no end pad. The trigram
// level uses raw counts; the bigram and unigram levels use continuation
// counts (number of distinct left extensions), and each level has its own
// three discounts estimated from that level's count-of-counts. The unigram
// level interpolates with a uniform distribution over the vocabulary (which
// includes <unk> but not <s>), so every vocabulary entry has positive mass.

#ifndef TITLECOMP_NGRAM_LM_HPP
#define TITLECOMP_NGRAM_LM_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "titlecomp/error.hpp"
#include "titlecomp/parallel.hpp"
#include "titlecomp/rng.hpp"
#include "titlecomp/text_norm.hpp"

namespace titlecomp {

using WordId = std::uint32_t;

inline constexpr WordId kUnkId = 0;
inline constexpr WordId kBosId = 1;
inline constexpr std::string_view kUnkToken = "<unk>";
inline constexpr std::string_view kBosToken = "<s>";

namespace detail {

inline constexpr int kIdBits = 21;
inline constexpr std::uint64_t kIdMask = (std::uint64_t{1} << kIdBits) - 1;

inline std::uint64_t pack2(WordId v, WordId w) {
  return (std::uint64_t{v} << kIdBits) | w;
}
inline std::uint64_t pack3(WordId u, WordId v, WordId w) {
  return (std::uint64_t{u} << (2 * kIdBits)) | (std::uint64_t{v} << kIdBits) | w;
}
inline WordId key_u(std::uint64_t k) { return static_cast<WordId>(k >> (2 * kIdBits)); }
inline WordId key_v(std::uint64_t k) { return static_cast<WordId>((k >> kIdBits) & kIdMask); }
inline WordId key_w(std::uint64_t k) { return static_cast<WordId>(k & kIdMask); }

}  // namespace detail

// Word <-> id map. Ids 0 and 1 are <unk> and <s>; the remaining words are
// assigned ids in sorted byte order, so the map depends only on the word set.
class Vocabulary {
 public:
  Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

  explicit Vocabulary(std::vector<std::string> words) {
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    words_.reserve(words.size() + 2);
    words_.emplace_back(kUnkToken);
    words_.emplace_back(kBosToken);
    for (auto& w : words) {
      if (w == kUnkToken || w == kBosToken) continue;
      words_.push_back(std::move(w));
    }
    if (words_.size() > detail::kIdMask) {
      throw Error(ErrorCode::kSizeTooLarge, "vocabulary exceeds 2^21 entries");
    }
    index_.reserve(words_.size());
    for (WordId id = 0; id < words_.size(); ++id) index_.emplace(words_[id], id);
  }

  // OOV words map to <unk>. The literal "<s>" is never a predictable word.
  WordId lookup(const std::string& word) const {
    auto it = index_.find(word);
    if (it == index_.end() || it->second == kBosId) return kUnkId;
    return it->second;
  }

  const std::string& word(WordId id) const { return words_.at(id); }
  std::size_t size() const { return words_.size(); }
  // Number of predictable entries: everything except <s>.
  std::size_t predictable_size() const { return words_.size() - 1; }
  const std::vector<std::string>& words() const { return words_; }

  bool operator==(const Vocabulary& other) const { return words_ == other.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> index_;
};

// Occurrence and continuation counts for orders 1-3.
//
// Raw trigram counts are the only accumulated quantity; everything else is
// derived by finalize(). Partial tables over the same vocabulary merge by
// addition.
struct CountTable {
  Vocabulary vocab;
  std::unordered_map<std::uint64_t, std::uint64_t> trigram;

  // Derived.
  std::unordered_map<std::uint64_t, std::uint64_t> bigram;       // c(v w)
  std::vector<std::uint64_t> unigram;                            // c(w)
  std::unordered_map<std::uint64_t, std::uint32_t> bigram_cont;  // N1+(. v w)
  std::vector<std::uint32_t> unigram_cont;                       // N1+(. w)
  // count_of_counts[order - 1][k - 1] = number of n-grams whose count at that
  // level is exactly k. Order 3 counts raw trigram counts, orders 1 and 2
  // count continuation counts.
  std::array<std::array<std::uint64_t, 4>, 3> count_of_counts{};
  // Same for raw bigram counts, used when a bigram is the highest order of a
  // query.
  std::array<std::uint64_t, 4> bigram_count_of_counts{};
  std::uint64_t lines = 0;

  void add_line(std::span<const WordId> ids) {
    WordId u = kBosId, v = kBosId;
    for (WordId w : ids) {
      ++trigram[detail::pack3(u, v, w)];
      u = v;
      v = w;
    }
    ++lines;
  }

  void merge(const CountTable& other) {
    if (!(other.vocab == vocab)) {
      throw Error(ErrorCode::kDimensionMismatch, "merging count tables over different vocabularies");
    }
    for (const auto& [k, c] : other.trigram) trigram[k] += c;
    lines += other.lines;
  }

  void finalize() {
    bigram.clear();
    bigram_cont.clear();
    unigram.assign(vocab.size(), 0);
    unigram_cont.assign(vocab.size(), 0);
    count_of_counts = {};
    bigram_count_of_counts = {};
    for (const auto& [k, c] : trigram) {
      const std::uint64_t bk = detail::pack2(detail::key_v(k), detail::key_w(k));
      bigram[bk] += c;
      ++bigram_cont[bk];
      bump(count_of_counts[2], c);
    }
    for (const auto& [k, c] : bigram) {
      const WordId w = detail::key_w(k);
      unigram[w] += c;
      ++unigram_cont[w];
      bump(bigram_count_of_counts, c);
    }
    for (const auto& [k, n] : bigram_cont) bump(count_of_counts[1], n);
    for (std::uint32_t n : unigram_cont) {
      if (n) bump(count_of_counts[0], n);
    }
  }

  std::uint64_t trigram_count(WordId u, WordId v, WordId w) const {
    auto it = trigram.find(detail::pack3(u, v, w));
    return it == trigram.end() ? 0 : it->second;
  }
  std::uint64_t bigram_count(WordId v, WordId w) const {
    auto it = bigram.find(detail::pack2(v, w));
    return it == bigram.end() ? 0 : it->second;
  }
  std::uint32_t bigram_continuation(WordId v, WordId w) const {
    auto it = bigram_cont.find(detail::pack2(v, w));
    return it == bigram_cont.end() ? 0 : it->second;
  }

 private:
  static void bump(std::array<std::uint64_t, 4>& n, std::uint64_t count) {
    if (count >= 1 && count <= 4) ++n[count - 1];
  }
};

struct CountOptions {
  // Map words seen exactly once in the corpus to <unk>.
  bool unk_singletons = false;
  unsigned threads = 1;
};

inline CountTable count_ngrams(std::span<const TokenSequence> corpus, const CountOptions& options = {}) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "no training lines");

  std::unordered_map<std::string, std::uint64_t> freq;
  for (const auto& line : corpus) {
    for (const auto& t : line.tokens) ++freq[t];
  }
  std::vector<std::string> words;
  words.reserve(freq.size());
  for (const auto& [w, c] : freq) {
    if (options.unk_singletons && c == 1) continue;
    words.push_back(w);
  }

  CountTable table;
  table.vocab = Vocabulary(std::move(words));

  const unsigned shards = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(corpus.size())));
  std::vector<CountTable> partial(shards);
  parallel_for(shards, shards, [&](std::size_t s) {
    CountTable& part = partial[s];
    part.vocab = table.vocab;
    const std::size_t begin = corpus.size() * s / shards;
    const std::size_t end = corpus.size() * (s + 1) / shards;
    std::vector<WordId> ids;
    for (std::size_t i = begin; i < end; ++i) {
      ids.clear();
      for (const auto& t : corpus[i].tokens) ids.push_back(part.vocab.lookup(t));
      part.add_line(ids);
    }
  });
  table.trigram = std::move(partial[0].trigram);
  table.lines = partial[0].lines;
  for (unsigned s = 1; s < shards; ++s) table.merge(partial[s]);
  table.finalize();
  return table;
}

// Three count-dependent discounts for one order.
struct Discounts {
  double d1 = 0.75;
  double d2 = 0.75;
  double d3plus = 0.75;

  double operator()(std::uint64_t count) const {
    if (count == 0) return 0.0;
    if (count == 1) return d1;
    if (count == 2) return d2;
    return d3plus;
  }
  bool operator==(const Discounts&) const = default;
};

inline constexpr double kFallbackDiscount = 0.75;
// Discounts never reach zero so every context keeps some backoff mass.
inline constexpr double kMinDiscount = 1e-3;

// Y = n1/(n1+2 n2); D1 = 1-2Y n2/n1; D2 = 2-3Y n3/n2; D3+ = 3-4Y n4/n3.
// Any zero count-of-counts makes the whole order fall back to 0.75.
inline Discounts estimate_discounts(const std::array<std::uint64_t, 4>& n) {
  if (n[0] == 0 || n[1] == 0 || n[2] == 0 || n[3] == 0) return {};
  const double n1 = static_cast<double>(n[0]);
  const double n2 = static_cast<double>(n[1]);
  const double n3 = static_cast<double>(n[2]);
  const double n4 = static_cast<double>(n[3]);
  const double y = n1 / (n1 + 2.0 * n2);
  const std::array<double, 3> raw{1.0 - 2.0 * y * n2 / n1, 2.0 - 3.0 * y * n3 / n2,
                                  3.0 - 4.0 * y * n4 / n3};
  std::array<double, 3> d{};
  for (int k = 0; k < 3; ++k) {
    d[k] = std::isfinite(raw[k]) ? std::clamp(raw[k], kMinDiscount, static_cast<double>(k + 1))
                                 : kFallbackDiscount;
  }
  return {d[0], d[1], d[2]};
}

struct ContextStats {
  std::uint64_t total = 0;
  std::array<std::uint64_t, 3> buckets{};  // follower types with count 1, 2, 3+

  void add(std::uint64_t count) {
    total += count;
    ++buckets[std::min<std::uint64_t>(count, 3) - 1];
  }
  double backoff(const Discounts& d) const {
    return (d.d1 * static_cast<double>(buckets[0]) + d.d2 * static_cast<double>(buckets[1]) +
            d.d3plus * static_cast<double>(buckets[2])) /
           static_cast<double>(total);
  }
};

struct TrainOptions : CountOptions {};

inline constexpr char kModelMagic[4] = {'M', 'K', 'N', '1'};
inline constexpr std::uint32_t kModelVersion = 1;

class MknModel {
 public:
  explicit MknModel(CountTable counts, bool unk_singletons = false)
      : counts_(std::move(counts)), unk_singletons_(unk_singletons) {
    for (int order = 0; order < 3; ++order) {
      discounts_[order] = estimate_discounts(counts_.count_of_counts[order]);
    }
    for (const auto& [k, c] : counts_.trigram) {
      trigram_ctx_[detail::pack2(detail::key_u(k), detail::key_v(k))].add(c);
    }
    top_bigram_discounts_ = estimate_discounts(counts_.bigram_count_of_counts);
    bigram_ctx_.assign(counts_.vocab.size(), {});
    for (const auto& [k, n] : counts_.bigram_cont) bigram_ctx_[detail::key_v(k)].add(n);
    top_bigram_ctx_.assign(counts_.vocab.size(), {});
    for (const auto& [k, c] : counts_.bigram) top_bigram_ctx_[detail::key_v(k)].add(c);
    for (WordId w = 0; w < counts_.unigram_cont.size(); ++w) {
      if (counts_.unigram_cont[w]) unigram_ctx_.add(counts_.unigram_cont[w]);
    }

    const double uniform = 1.0 / static_cast<double>(counts_.vocab.predictable_size());
    const double gamma = unigram_ctx_.total ? unigram_ctx_.backoff(discounts_[0]) : 1.0;
    unigram_prob_.assign(counts_.vocab.size(), 0.0);
    for (WordId w = 0; w < counts_.vocab.size(); ++w) {
      if (w == kBosId) continue;
      double p = gamma * uniform;
      if (unigram_ctx_.total) {
        const std::uint64_t c = counts_.unigram_cont[w];
        p += (static_cast<double>(c) - discounts_[0](c)) / static_cast<double>(unigram_ctx_.total);
      }
      unigram_prob_[w] = p;
    }
  }

  static MknModel train(std::span<const TokenSequence> corpus, const TrainOptions& options = {}) {
    return MknModel(count_ngrams(corpus, options), options.unk_singletons);
  }

  const Vocabulary& vocab() const { return counts_.vocab; }
  const CountTable& counts() const { return counts_; }
  // Discounts of the interpolated levels (order 3 raw, orders 1-2 continuation).
  const Discounts& discounts(int order) const { return discounts_.at(order - 1); }
  // Discounts for raw bigram counts, used when a bigram is the highest order.
  const Discounts& top_bigram_discounts() const { return top_bigram_discounts_; }
  bool unk_singletons() const { return unk_singletons_; }

  WordId id(const std::string& word) const { return counts_.vocab.lookup(word); }

  std::vector<WordId> ids(std::span<const std::string> words) const {
    std::vector<WordId> out;
    out.reserve(words.size());
    for (const auto& w : words) out.push_back(id(w));
    return out;
  }

  // P(w | context); only the last two context ids are used. The highest order
  // of a query works on raw counts and interpolates with continuation-count
  // lower orders, so P(w | v) and the bigram level inside P(w | u v) differ.
  // With no context this is the continuation unigram.
  double prob(WordId w, std::span<const WordId> context = {}) const {
    if (w == kBosId || w >= unigram_prob_.size()) return 0.0;
    if (context.empty()) return unigram_prob_[w];
    if (context.size() == 1) return top_bigram(w, context[0]);
    return trigram_level(w, context[context.size() - 2], context[context.size() - 1]);
  }

  double prob(const std::string& w, std::span<const std::string> context = {}) const {
    const auto ctx = ids(context);
    return prob(id(w), ctx);
  }

  double log_prob(WordId w, std::span<const WordId> context = {}) const {
    return std::log(prob(w, context));
  }

  // Chain rule with context restricted to the given window.
  double sequence_log_prob(std::span<const WordId> ids) const {
    if (ids.empty()) throw Error(ErrorCode::kEmptyInput, "empty token window");
    double lp = 0.0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const std::size_t start = i >= 2 ? i - 2 : 0;
      lp += log_prob(ids[i], ids.subspan(start, i - start));
    }
    return lp;
  }

  double sequence_prob(std::span<const WordId> ids) const { return std::exp(sequence_log_prob(ids)); }

  double sequence_prob(std::span<const std::string> tokens) const {
    const auto v = ids(tokens);
    return sequence_prob(std::span<const WordId>(v));
  }

  // log(n^alpha * P(window)).
  double length_normalized_log_score(std::span<const WordId> ids, double alpha) const {
    return alpha * std::log(static_cast<double>(ids.size())) + sequence_log_prob(ids);
  }

  double length_normalized_score(std::span<const WordId> ids, double alpha) const {
    return std::exp(length_normalized_log_score(ids, alpha));
  }

  double length_normalized_score(std::span<const std::string> tokens, double alpha) const {
    const auto v = ids(tokens);
    return length_normalized_score(std::span<const WordId>(v), alpha);
  }

  // "MKN1" | u32 version | u32 flags | u32 vocab size | (u32 len, bytes)* |
  // u64 entries | (u32 u, u32 v, u32 w, u64 count)* sorted by (u, v, w).
  // All integers little-endian.
  void save(std::ostream& os) const {
    os.write(kModelMagic, 4);
    put_u32(os, kModelVersion);
    put_u32(os, unk_singletons_ ? 1u : 0u);
    const auto& words = counts_.vocab.words();
    put_u32(os, static_cast<std::uint32_t>(words.size()));
    for (const auto& w : words) {
      put_u32(os, static_cast<std::uint32_t>(w.size()));
      os.write(w.data(), static_cast<std::streamsize>(w.size()));
    }
    std::vector<std::pair<std::uint64_t, std::uint64_t>> entries(counts_.trigram.begin(),
                                                                counts_.trigram.end());
    std::sort(entries.begin(), entries.end());
    put_u64(os, entries.size());
    for (const auto& [k, c] : entries) {
      put_u32(os, detail::key_u(k));
      put_u32(os, detail::key_v(k));
      put_u32(os, detail::key_w(k));
      put_u64(os, c);
    }
    put_u64(os, counts_.lines);
    if (!os) throw Error(ErrorCode::kIo, "failed writing model");
  }

  void save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorCode::kIo, "cannot open " + path + " for writing");
    save(os);
  }

  static MknModel load(std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kModelMagic, 4) != 0) {
      throw Error(ErrorCode::kMalformedFile, "bad magic, not an MKN1 model");
    }
    if (get_u32(is) != kModelVersion) throw Error(ErrorCode::kMalformedFile, "unsupported model version");
    const bool unk = (get_u32(is) & 1u) != 0;
    const std::uint32_t vsize = get_u32(is);
    if (vsize < 2 || vsize > detail::kIdMask) throw Error(ErrorCode::kMalformedFile, "bad vocabulary size");
    std::vector<std::string> words(vsize);
    for (auto& w : words) {
      const std::uint32_t len = get_u32(is);
      if (len > (1u << 20)) throw Error(ErrorCode::kMalformedFile, "word too long");
      w.resize(len);
      if (!is.read(w.data(), len)) throw Error(ErrorCode::kMalformedFile, "truncated vocabulary");
    }
    if (words[kUnkId] != kUnkToken || words[kBosId] != kBosToken) {
      throw Error(ErrorCode::kMalformedFile, "special tokens missing");
    }
    CountTable table;
    table.vocab = Vocabulary(std::vector<std::string>(words.begin() + 2, words.end()));
    if (table.vocab.words() != words) throw Error(ErrorCode::kMalformedFile, "vocabulary not sorted");
    const std::uint64_t n = get_u64(is);
    table.trigram.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      const WordId u = get_u32(is), v = get_u32(is), w = get_u32(is);
      const std::uint64_t c = get_u64(is);
      if (u >= vsize || v >= vsize || w >= vsize || c == 0) {
        throw Error(ErrorCode::kMalformedFile, "bad trigram entry " + std::to_string(i));
      }
      table.trigram[detail::pack3(u, v, w)] = c;
    }
    table.lines = get_u64(is);
    table.finalize();
    return MknModel(std::move(table), unk);
  }

  static MknModel load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorCode::kIo, "cannot open model " + path);
    return load(is);
  }

 private:
  double top_bigram(WordId w, WordId v) const {
    const ContextStats& ctx = v < top_bigram_ctx_.size() ? top_bigram_ctx_[v] : empty_ctx_;
    const double lower = unigram_prob_[w];
    if (ctx.total == 0) return lower;
    const std::uint64_t c = counts_.bigram_count(v, w);
    return (static_cast<double>(c) - top_bigram_discounts_(c)) / static_cast<double>(ctx.total) +
           ctx.backoff(top_bigram_discounts_) * lower;
  }

  double bigram_level(WordId w, WordId v) const {
    const ContextStats& ctx = v < bigram_ctx_.size() ? bigram_ctx_[v] : empty_ctx_;
    const double lower = unigram_prob_[w];
    if (ctx.total == 0) return lower;
    const std::uint64_t c = counts_.bigram_continuation(v, w);
    return (static_cast<double>(c) - discounts_[1](c)) / static_cast<double>(ctx.total) +
           ctx.backoff(discounts_[1]) * lower;
  }

  double trigram_level(WordId w, WordId u, WordId v) const {
    const double lower = bigram_level(w, v);
    auto it = trigram_ctx_.find(detail::pack2(u, v));
    if (it == trigram_ctx_.end()) return lower;
    const ContextStats& ctx = it->second;
    const std::uint64_t c = counts_.trigram_count(u, v, w);
    return (static_cast<double>(c) - discounts_[2](c)) / static_cast<double>(ctx.total) +
           ctx.backoff(discounts_[2]) * lower;
  }

  static void put_u32(std::ostream& os, std::uint32_t x) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(x >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
  }
  static void put_u64(std::ostream& os, std::uint64_t x) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(x >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
  }
  static std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) throw Error(ErrorCode::kMalformedFile, "truncated model");
    std::uint32_t x = 0;
    for (int i = 0; i < 4; ++i) x |= std::uint32_t{b[i]} << (8 * i);
    return x;
  }
  static std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw Error(ErrorCode::kMalformedFile, "truncated model");
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x |= std::uint64_t{b[i]} << (8 * i);
    return x;
  }

  CountTable counts_;
  bool unk_singletons_ = false;
  std::array<Discounts, 3> discounts_{};
  std::unordered_map<std::uint64_t, ContextStats> trigram_ctx_;
  std::vector<ContextStats> bigram_ctx_;
  Discounts top_bigram_discounts_{};
  std::vector<ContextStats> top_bigram_ctx_;
  ContextStats unigram_ctx_;
  ContextStats empty_ctx_;
  std::vector<double> unigram_prob_;
};

// A query with its observed frequency.
struct WeightedQuery {
  TokenSequence query;
  double frequency = 1.0;
};

// Weighted sampling without replacement, weight = frequency / token count.
// Returned in selection order (Efraimidis-Spirakis keys, largest first).
inline std::vector<TokenSequence> sample_training_corpus(std::span<const WeightedQuery> queries,
                                                         std::size_t size, std::uint64_t seed) {
  if (size > queries.size()) {
    throw Error(ErrorCode::kSizeTooLarge, "requested " + std::to_string(size) + " of " +
                                              std::to_string(queries.size()) + " queries");
  }
  Rng rng(seed);
  std::vector<std::pair<double, std::size_t>> keys;
  keys.reserve(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto& q = queries[i];
    if (!(q.frequency > 0.0) || q.query.tokens.empty()) {
      throw Error(ErrorCode::kMalformedRow, "query " + std::to_string(i) + " has non-positive weight");
    }
    const double weight = q.frequency / static_cast<double>(q.query.tokens.size());
    // log(u^(1/w)) = log(u)/w, larger is better.
    keys.emplace_back(std::log(uniform01_open_low(rng)) / weight, i);
  }
  auto cmp = [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  };
  std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(size), keys.end(), cmp);
  std::vector<TokenSequence> out;
  out.reserve(size);
  for (std::size_t i = 0; i < size; ++i) out.push_back(queries[keys[i].second].query);
  return out;
}

// Reads one query per line with an optional "\t<frequency>" suffix. Lines
// that normalize to nothing are skipped.
inline std::vector<WeightedQuery> read_corpus(std::istream& is, std::size_t* skipped = nullptr) {
  std::vector<WeightedQuery> out;
  std::string line;
  std::size_t lineno = 0;
  std::size_t dropped = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    double freq = 1.0;
    std::string_view text = line;
    if (const auto tab = line.rfind('\t'); tab != std::string::npos) {
      const std::string f = line.substr(tab + 1);
      std::size_t used = 0;
      try {
        freq = std::stod(f, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != f.size() || !(freq > 0.0)) {
        throw Error(ErrorCode::kMalformedRow, "line " + std::to_string(lineno) + ": bad frequency \"" + f + "\"");
      }
      text = std::string_view(line).substr(0, tab);
    }
    try {
      out.push_back({normalize(text), freq});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyInput) throw;
      ++dropped;
    }
  }
  if (skipped) *skipped = dropped;
  return out;
}

}  // namespace titlecomp

#endif  // TITLECOMP_NGRAM_LM_HPP
