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

#include "titlecomp/ngram_lm.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "mkn_oracle.hpp"
#include "test_util.hpp"

namespace titlecomp {
namespace {

using testing::corpus_of;
using testing::MknOracle;
using testing::tokens_of;

template <typename Fn>
void expect_error(ErrorCode code, Fn&& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << error_name(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

WordId wid(const MknModel& m, const std::string& w) { return w == "<s>" ? kBosId : m.id(w); }

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

TEST(CountTest, RepeatedLine) {
  const auto c = count_ngrams(corpus_of({"a b", "a b"}));
  const WordId a = c.vocab.lookup("a"), b = c.vocab.lookup("b");
  EXPECT_EQ(c.bigram_count(a, b), 2u);
  EXPECT_EQ(c.unigram[a], 2u);
  EXPECT_EQ(c.lines, 2u);
}

TEST(CountTest, SingleTokenOnlyHasPaddedTrigram) {
  const auto c = count_ngrams(corpus_of({"a"}));
  ASSERT_EQ(c.trigram.size(), 1u);
  EXPECT_EQ(c.trigram_count(kBosId, kBosId, c.vocab.lookup("a")), 1u);
}

TEST(CountTest, ContinuationCountOfSharedMiddle) {
  const auto c = count_ngrams(corpus_of({"a b c", "a b d"}));
  EXPECT_EQ(c.unigram_cont[c.vocab.lookup("b")], 1u);
  EXPECT_EQ(c.unigram[c.vocab.lookup("b")], 2u);
}

TEST(CountTest, EmptyCorpus) {
  expect_error(ErrorCode::kEmptyCorpus, [] { count_ngrams(std::vector<TokenSequence>{}); });
}

TEST(CountTest, ContinuationNeverExceedsOccurrence) {
  Rng rng(11);
  const auto corpus = testing::random_corpus(rng, 12, 40);
  const auto c = count_ngrams(corpus);
  for (WordId w = 0; w < c.vocab.size(); ++w) EXPECT_LE(c.unigram_cont[w], c.unigram[w]);
  for (const auto& [k, n] : c.bigram_cont) EXPECT_LE(n, c.bigram.at(k));
  // Trigram counts with a fixed (v, w) suffix sum to the bigram count.
  std::unordered_map<std::uint64_t, std::uint64_t> sums;
  for (const auto& [k, n] : c.trigram) sums[detail::pack2(detail::key_v(k), detail::key_w(k))] += n;
  for (const auto& [k, n] : sums) EXPECT_EQ(n, c.bigram.at(k));
}

TEST(CountTest, ShardedCountingMatchesSerial) {
  Rng rng(5);
  const auto corpus = testing::random_corpus(rng, 30, 500);
  const auto serial = count_ngrams(corpus, {.unk_singletons = false, .threads = 1});
  const auto sharded = count_ngrams(corpus, {.unk_singletons = false, .threads = 4});
  EXPECT_EQ(serial.trigram, sharded.trigram);
  EXPECT_EQ(serial.bigram_cont, sharded.bigram_cont);
  EXPECT_EQ(serial.count_of_counts, sharded.count_of_counts);
}

TEST(DiscountTest, FormulaValues) {
  const Discounts d = estimate_discounts({100, 50, 20, 10});
  EXPECT_NEAR(d.d1, 0.5, 1e-12);
  EXPECT_NEAR(d.d2, 1.4, 1e-12);
  EXPECT_NEAR(d.d3plus, 2.0, 1e-12);
}

TEST(DiscountTest, FallbackWhenCountsDegenerate) {
  const Discounts d = estimate_discounts({100, 0, 20, 10});
  EXPECT_DOUBLE_EQ(d.d2, kFallbackDiscount);
  const Discounts all_ones = estimate_discounts({7, 0, 0, 0});
  for (double x : {all_ones.d1, all_ones.d2, all_ones.d3plus}) EXPECT_DOUBLE_EQ(x, kFallbackDiscount);
}

TEST(DiscountTest, ClampedToBucket) {
  // n2 much larger than n1 drives the raw D1 negative.
  const Discounts d = estimate_discounts({1, 100, 1, 1});
  const double v[] = {d.d1, d.d2, d.d3plus};
  for (int k = 0; k < 3; ++k) {
    EXPECT_GE(v[k], kMinDiscount);
    EXPECT_LE(v[k], k + 1.0);
  }
}

TEST(ProbTest, SingleTokenCorpusNormalizes) {
  const auto m = MknModel::train(corpus_of({"a a a a"}));
  EXPECT_EQ(m.vocab().predictable_size(), 2u);
  EXPECT_NEAR(m.prob("a") + m.prob(std::string(kUnkToken)), 1.0, 1e-12);
}

TEST(ProbTest, TinyCorpusFrozenValues) {
  const auto m = MknModel::train(corpus_of({"a b c", "a b d"}));
  const std::vector<std::string> ab{"a", "b"}, b{"b"};
  EXPECT_NEAR(m.prob("c"), 0.2125, 1e-12);
  EXPECT_NEAR(m.prob("c", b), 0.284375, 1e-12);
  EXPECT_NEAR(m.prob("c", ab), 0.33828125, 1e-12);
  const MknOracle oracle(tokens_of(corpus_of({"a b c", "a b d"})));
  EXPECT_NEAR(oracle.p3("c", "a", "b"), 0.33828125, 1e-12);
}

TEST(ProbTest, UnseenContextFallsBackToContinuationUnigram) {
  const auto m = MknModel::train(corpus_of({"a b c", "a b d"}));
  const std::vector<std::string> unseen{"zz", "qq"};
  for (const char* w : {"a", "b", "c", "d", "nope"}) {
    EXPECT_DOUBLE_EQ(m.prob(w, unseen), m.prob(w));
  }
}

TEST(ProbTest, OovMapsToUnkAndIsPositive) {
  const auto m = MknModel::train(corpus_of({"a b c"}));
  EXPECT_EQ(m.id("never"), kUnkId);
  EXPECT_EQ(m.id("<s>"), kUnkId);
  EXPECT_GT(m.prob("never"), 0.0);
  EXPECT_DOUBLE_EQ(m.prob("never"), m.prob(std::string(kUnkToken)));
}

TEST(ProbTest, MatchesOracleOnRandomCorpora) {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t vocab = 3 + uniform_index(rng, 28);
    const std::size_t lines = 1 + uniform_index(rng, 50);
    const auto corpus = testing::random_corpus(rng, vocab, lines);
    const auto m = MknModel::train(corpus);
    const MknOracle oracle(tokens_of(corpus));
    ASSERT_LE(oracle.vocab().size(), 31u);
    for (const auto& w : oracle.vocab()) {
      const WordId iw = wid(m, w);
      EXPECT_LT(rel_err(m.prob(iw), oracle.p1(w)), 1e-9) << "trial " << trial << " p(" << w << ")";
      for (const auto& v : oracle.histories()) {
        const WordId c2[] = {wid(m, v)};
        EXPECT_LT(rel_err(m.prob(iw, c2), oracle.p2top(w, v)), 1e-9) << "trial " << trial;
        for (const auto& u : oracle.histories()) {
          const WordId c3[] = {wid(m, u), wid(m, v)};
          EXPECT_LT(rel_err(m.prob(iw, c3), oracle.p3(w, u, v)), 1e-9) << "trial " << trial;
        }
      }
    }
  }
}

TEST(ProbTest, NormalizesOverObservedContexts) {
  Rng rng(99);
  const auto corpus = testing::random_corpus(rng, 25, 200);
  const auto m = MknModel::train(corpus);
  std::vector<std::uint64_t> contexts;
  for (const auto& [k, c] : m.counts().trigram) contexts.push_back(k);
  for (int i = 0; i < 50; ++i) {
    const auto k = contexts[uniform_index(rng, contexts.size())];
    const WordId ctx[] = {detail::key_u(k), detail::key_v(k)};
    double total2 = 0.0, total3 = 0.0;
    for (WordId w = 0; w < m.vocab().size(); ++w) {
      total3 += m.prob(w, ctx);
      total2 += m.prob(w, std::span<const WordId>(ctx + 1, 1));
    }
    EXPECT_NEAR(total3, 1.0, 1e-6);
    EXPECT_NEAR(total2, 1.0, 1e-6);
  }
  double total1 = 0.0;
  for (WordId w = 0; w < m.vocab().size(); ++w) total1 += m.prob(w);
  EXPECT_NEAR(total1, 1.0, 1e-6);
}

// Discounts are re-estimated from count-of-counts, so one extra bigram can
// move them (e.g. out of the fallback) and lower a probability. The property
// is checked whenever the extra copy leaves the discounts unchanged.
TEST(ProbTest, MoreDataNeverLowersBigramProbability) {
  Rng rng(17);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto corpus = testing::random_corpus(rng, 10, 30, 5);
    const auto line = corpus[uniform_index(rng, corpus.size())];
    if (line.size() < 2) continue;
    const std::size_t i = uniform_index(rng, line.size() - 1);
    const std::string w1 = line.tokens[i], w2 = line.tokens[i + 1];
    const std::vector<std::string> ctx{w1};
    const auto before = MknModel::train(corpus);
    corpus.push_back(normalize(w1 + " " + w2));
    const auto after = MknModel::train(corpus);
    if (!(before.top_bigram_discounts() == after.top_bigram_discounts()) ||
        !(before.discounts(1) == after.discounts(1))) {
      continue;
    }
    ++checked;
    EXPECT_GE(after.prob(w2, ctx), before.prob(w2, ctx) - 1e-15) << w1 << " " << w2;
  }
  EXPECT_GE(checked, 50);
}

TEST(ProbTest, UnkSingletonsFoldRareWords) {
  const auto m = MknModel::train(corpus_of({"a b", "a c", "a b"}), {{.unk_singletons = true}});
  EXPECT_EQ(m.id("c"), kUnkId);
  EXPECT_NE(m.id("b"), kUnkId);
  EXPECT_GT(m.prob(std::string(kUnkToken)), 0.0);
}

TEST(SequenceTest, ChainRule) {
  const auto m = MknModel::train(corpus_of({"a b c", "a b d"}));
  const std::vector<std::string> one{"c"}, two{"a", "b"}, three{"a", "b", "c"};
  const std::vector<std::string> a{"a"};
  EXPECT_NEAR(m.sequence_prob(one), m.prob("c"), 1e-15);
  EXPECT_NEAR(m.sequence_prob(two), m.prob("a") * m.prob("b", a), 1e-15);
  const MknOracle oracle(tokens_of(corpus_of({"a b c", "a b d"})));
  EXPECT_LT(rel_err(m.sequence_prob(three), oracle.sequence(three)), 1e-9);
  expect_error(ErrorCode::kEmptyInput, [&] { m.sequence_prob(std::vector<std::string>{}); });
}

TEST(SequenceTest, LengthNormalizedScore) {
  const auto m = MknModel::train(corpus_of({"a b c", "a b d"}));
  const std::vector<std::string> ab{"a", "b"}, c{"c"};
  const MknOracle oracle(tokens_of(corpus_of({"a b c", "a b d"})));
  EXPECT_NEAR(m.length_normalized_score(ab, 0.0), m.sequence_prob(ab), 1e-15);
  EXPECT_NEAR(m.length_normalized_score(c, 3.7), m.prob("c"), 1e-15);
  EXPECT_LT(rel_err(m.length_normalized_score(ab, 1.0), 2.0 * oracle.sequence(ab)), 1e-9);
}

TEST(SerializationTest, RoundTripAndDeterminism) {
  Rng rng(1);
  const auto corpus = testing::random_corpus(rng, 20, 100);
  const auto m1 = MknModel::train(corpus);
  const auto m2 = MknModel::train(corpus, {{.threads = 3}});
  std::ostringstream s1, s2;
  m1.save(s1);
  m2.save(s2);
  EXPECT_EQ(s1.str(), s2.str());
  EXPECT_EQ(s1.str().substr(0, 4), "MKN1");

  std::istringstream in(s1.str());
  const auto loaded = MknModel::load(in);
  for (WordId w = 0; w < m1.vocab().size(); ++w) {
    const WordId ctx[] = {kBosId, 2};
    EXPECT_EQ(loaded.prob(w), m1.prob(w));
    EXPECT_EQ(loaded.prob(w, ctx), m1.prob(w, ctx));
  }
  std::ostringstream s3;
  loaded.save(s3);
  EXPECT_EQ(s3.str(), s1.str());
}

TEST(SerializationTest, RejectsGarbage) {
  std::istringstream bad("NOPE....");
  expect_error(ErrorCode::kMalformedFile, [&] { MknModel::load(bad); });
  const auto m = MknModel::train(corpus_of({"a b"}));
  std::ostringstream os;
  m.save(os);
  std::istringstream truncated(os.str().substr(0, os.str().size() - 3));
  expect_error(ErrorCode::kMalformedFile, [&] { MknModel::load(truncated); });
}

TEST(SampleTest, SingleQuery) {
  const std::vector<WeightedQuery> q{{normalize("only one"), 3.0}};
  const auto s = sample_training_corpus(q, 1, 42);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].tokens, q[0].query.tokens);
}

TEST(SampleTest, TooLarge) {
  const std::vector<WeightedQuery> q{{normalize("a"), 1.0}};
  expect_error(ErrorCode::kSizeTooLarge, [&] { sample_training_corpus(q, 2, 0); });
}

TEST(SampleTest, LengthNormalizedWeights) {
  // weight(a) = 10, weight("b b") = 5, so "a" comes first two thirds of the time.
  const std::vector<WeightedQuery> q{{normalize("a"), 10.0}, {normalize("b b"), 10.0}};
  const int trials = 100000;
  int first_a = 0;
  for (int i = 0; i < trials; ++i) {
    first_a += sample_training_corpus(q, 1, static_cast<std::uint64_t>(i))[0].tokens.size() == 1;
  }
  const double p = 2.0 / 3.0, sigma = std::sqrt(trials * p * (1 - p));
  EXPECT_NEAR(first_a, trials * p, 3 * sigma);
}

TEST(SampleTest, Deterministic) {
  Rng rng(8);
  std::vector<WeightedQuery> q;
  for (const auto& s : testing::random_corpus(rng, 50, 300)) q.push_back({s, 1.0 + uniform_index(rng, 100)});
  const auto a = sample_training_corpus(q, 100, 77), b = sample_training_corpus(q, 100, 77);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].tokens, b[i].tokens);
}

TEST(ReadCorpusTest, FrequencySuffix) {
  std::istringstream in("Hydro Boost\t12\nplain line\n   \nx\t0.5\r\n");
  std::size_t skipped = 0;
  const auto q = read_corpus(in, &skipped);
  ASSERT_EQ(q.size(), 3u);
  EXPECT_EQ(q[0].query.tokens, (std::vector<std::string>{"hydro", "boost"}));
  EXPECT_DOUBLE_EQ(q[0].frequency, 12.0);
  EXPECT_DOUBLE_EQ(q[1].frequency, 1.0);
  EXPECT_DOUBLE_EQ(q[2].frequency, 0.5);
  EXPECT_EQ(skipped, 1u);
}

TEST(ReadCorpusTest, BadFrequency) {
  std::istringstream in("ok\t3\nbad\tx\n");
  expect_error(ErrorCode::kMalformedRow, [&] { read_corpus(in); });
}

}  // namespace
}  // namespace titlecomp
