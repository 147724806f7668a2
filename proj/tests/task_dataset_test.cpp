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

#include "titlecomp/task_dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <tuple>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "mkn_oracle.hpp"
#include "test_util.hpp"
#include "titlecomp/synthetic.hpp"

namespace titlecomp {
namespace {

using testing::corpus_of;

class MetaGenTest : public ::testing::Test {
 protected:
  MetaGenTest() {
    synthetic::GrammarOptions g;
    g.categories = 3;
    g.seed = 4;
    grammars_ = synthetic::make_grammars(g);
    const auto queries = synthetic::make_queries(grammars_, 3000, 4);
    std::vector<TokenSequence> corpus;
    for (const auto& q : queries) corpus.push_back(q.query);
    model_ = std::make_unique<MknModel>(MknModel::train(corpus));
    products_ = synthetic::make_catalog(grammars_, 20, 4);
    catalog_ = group_by_category(products_);
    opts_.pairs_per_category = 10;
    opts_.rules_per_pair = 3;
    opts_.buckets = 6;
    opts_.seed = 11;
    opts_.ranges.t = split_statistic_range(*model_, corpus, 0.0);
  }
  std::vector<synthetic::CategoryGrammar> grammars_;
  std::unique_ptr<MknModel> model_;
  std::vector<Product> products_;
  Catalog catalog_;
  MetaGenOptions opts_;
  EmbeddingTable table_ = EmbeddingTable::hashed(16, 0);
};

TEST_F(MetaGenTest, OnePairOneRule) {
  Catalog one{{"c", {normalize("a b c"), normalize("a d")}}};
  MetaGenOptions o = opts_;
  o.pairs_per_category = 1;
  o.rules_per_pair = 1;
  MetaGenStats stats;
  const auto rows = generate_meta_dataset(one, o, *model_, table_, &stats);
  EXPECT_LE(rows.size(), 1u);
  EXPECT_EQ(rows.size() + stats.skipped, 1u);
}

TEST_F(MetaGenTest, RowCountBound) {
  Catalog two{{"a", catalog_.begin()->second}, {"b", std::next(catalog_.begin())->second}};
  MetaGenOptions o = opts_;
  o.pairs_per_category = 2;
  o.rules_per_pair = 3;
  EXPECT_LE(generate_meta_dataset(two, o, *model_, table_).size(), 12u);
}

TEST_F(MetaGenTest, CategoryTooSmall) {
  Catalog bad{{"lonely", {normalize("just one")}}};
  try {
    generate_meta_dataset(bad, opts_, *model_, table_);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCategoryTooSmall);
  }
}

TEST_F(MetaGenTest, RowsAreValidAndReplayable) {
  MetaGenStats stats;
  const auto rows = generate_meta_dataset(catalog_, opts_, *model_, table_, &stats);
  EXPECT_EQ(rows.size() + stats.skipped, catalog_.size() * 10 * 3);
  EXPECT_GT(rows.size(), 0u);
  for (const auto& row : rows) {
    ASSERT_TRUE(is_valid(row));
    EXPECT_NE(row.x_ex, row.x_ts);
    const auto rule = sample_rule(row.category, table_.dim(), opts_.buckets, row.seed, opts_.ranges);
    const auto [y_ex, y_ts] = transfer_rule(rule, TokenSequence{row.x_ex, join(row.x_ex)},
                                            TokenSequence{row.x_ts, join(row.x_ts)}, *model_, table_);
    EXPECT_EQ(y_ex, row.y_ex);
    EXPECT_EQ(y_ts, row.y_ts);
  }
}

TEST_F(MetaGenTest, PairsAreDistinctWithinCategory) {
  const auto rows = generate_meta_dataset(catalog_, opts_, *model_, table_);
  std::set<std::tuple<std::string, std::vector<std::string>, std::vector<std::string>>> pairs;
  for (const auto& r : rows) {
    auto a = r.x_ex, b = r.x_ts;
    if (b < a) std::swap(a, b);
    pairs.insert({r.category, a, b});
  }
  std::map<std::string, std::size_t> per_category;
  for (const auto& p : pairs) ++per_category[std::get<0>(p)];
  for (const auto& [c, n] : per_category) EXPECT_LE(n, 10u) << c;
}

TEST_F(MetaGenTest, OutputIndependentOfThreads) {
  MetaGenOptions o = opts_;
  std::ostringstream a, b;
  write_meta_dataset(a, generate_meta_dataset(catalog_, o, *model_, table_));
  o.threads = 4;
  write_meta_dataset(b, generate_meta_dataset(catalog_, o, *model_, table_));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_FALSE(a.str().empty());
}

TEST_F(MetaGenTest, RejectIdentityDropsKeepAllRows) {
  MetaGenOptions o = opts_;
  o.reject_identity = true;
  for (const auto& row : generate_meta_dataset(catalog_, o, *model_, table_)) {
    EXPECT_FALSE(all_positive(row.y_ex) && all_positive(row.y_ts));
  }
}

TEST(SamplePairsTest, DistinctUnorderedPairs) {
  Rng rng(1);
  for (std::size_t n : {2u, 3u, 10u, 200u}) {
    const auto pairs = sample_pairs(n, 15, rng);
    EXPECT_EQ(pairs.size(), std::min<std::size_t>(15, n * (n - 1) / 2));
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (auto [a, b] : pairs) {
      EXPECT_NE(a, b);
      EXPECT_LT(std::max(a, b), n);
      EXPECT_TRUE(seen.insert(std::minmax(a, b)).second);
    }
  }
}

TEST(RankTest, SingleSegment) {
  const auto m = MknModel::train(corpus_of({"hydro boost gel", "hydro boost gel"}));
  const auto ex = rank_example(normalize("hydro boost gel"), m, 4, 0.0, 1e9);
  EXPECT_EQ(ex.ranks, (std::vector<int>{1, 1, 1}));
}

TEST(RankTest, LaterSegmentScoresHigher) {
  const auto m = MknModel::train(corpus_of({"hydro boost gel", "hydro boost gel"}));
  const testing::MknOracle oracle({{"hydro", "boost", "gel"}, {"hydro", "boost", "gel"}});
  const double alpha = 1.0;
  // Segments [x] [hydro boost gel] at t = 0.1; the phrase wins once its
  // length counts.
  ASSERT_GT(3.0 * oracle.sequence({"hydro", "boost", "gel"}), oracle.sequence({"x"}));
  const auto seg = segment(m, normalize("x hydro boost gel"), 0.0, 0.1);
  ASSERT_EQ(seg.num_segments(), 2u);
  // Rank data segments and scores with one alpha; pick a t that gives the same
  // split at alpha = 1.
  const auto dets = split_statistics(m, m.ids(normalize("x hydro boost gel").tokens), alpha);
  const double t = (dets[0] + std::max(dets[1], dets[2])) / 2;
  ASSERT_GT(dets[0], t);
  const auto ex = rank_example(normalize("x hydro boost gel"), m, 4, alpha, t);
  EXPECT_EQ(ex.ranks, (std::vector<int>{2, 1, 1, 1}));
}

TEST(RankTest, ClampingAndRuns) {
  Rng rng(9);
  const auto m = MknModel::train(testing::random_corpus(rng, 20, 200));
  const auto ex = rank_example(normalize("w1 w2 w3 w4 w5"), m, 3, 0.0, -1e9);
  // Five singleton segments and B = 3: ranks 1, 2 and three 3s.
  std::vector<int> sorted = ex.ranks;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<int>{1, 2, 3, 3, 3}));
  std::vector<TokenSequence> titles;
  for (int i = 0; i < 300; ++i) titles.push_back(testing::random_title(rng, 25, 10));
  for (const auto& r : generate_rank_dataset(titles, m, 12, 0.2, 0.0, 3)) {
    EXPECT_NE(std::find(r.ranks.begin(), r.ranks.end(), 1), r.ranks.end());
    // With B larger than any segment count, equal labels form one run.
    std::set<int> closed;
    for (std::size_t i = 0; i < r.ranks.size(); ++i) {
      if (i > 0 && r.ranks[i] != r.ranks[i - 1]) closed.insert(r.ranks[i - 1]);
      EXPECT_EQ(closed.count(r.ranks[i]), 0u);
    }
  }
}

TEST(JsonlTest, MetaRoundTrip) {
  Rng rng(2);
  std::vector<MetaExample> rows;
  for (int i = 0; i < 100; ++i) {
    MetaExample r;
    r.x_ex = testing::random_title(rng, 50, 8).tokens;
    r.x_ts = testing::random_title(rng, 50, 8).tokens;
    r.x_ex.push_back("crème");
    for (std::size_t k = 0; k < r.x_ex.size(); ++k) r.y_ex.push_back(coin(rng));
    for (std::size_t k = 0; k < r.x_ts.size(); ++k) r.y_ts.push_back(coin(rng));
    r.category = "cat\"" + std::to_string(i % 3);
    r.rule_id = static_cast<std::uint64_t>(i);
    r.seed = rng();
    rows.push_back(r);
  }
  std::stringstream ss;
  write_meta_dataset(ss, rows);
  const std::string text = ss.str();
  const auto back = read_meta_dataset(ss);
  EXPECT_EQ(back, rows);
  std::ostringstream again;
  write_meta_dataset(again, back);
  EXPECT_EQ(again.str(), text);
  EXPECT_EQ(text.substr(0, 8), "{\"x_ex\":");
}

TEST(JsonlTest, MalformedRowsCarryLineNumbers) {
  const char* bad[] = {
      "{\"x_ex\":[\"a\"],\"y_ex\":[1,0],\"x_ts\":[\"b\"],\"y_ts\":[1],\"category\":\"c\",\"rule_id\":0,\"seed\":0}",
      "{\"x_ex\":[\"a\"],\"y_ex\":[2],\"x_ts\":[\"b\"],\"y_ts\":[1],\"category\":\"c\",\"rule_id\":0,\"seed\":0}",
      "{\"x_ex\":[\"a\"],\"y_ex\":[1],\"x_ts\":[\"b\"],\"category\":\"c\",\"rule_id\":0,\"seed\":0}",
      "not json",
      "[1,2]",
  };
  for (const char* row : bad) {
    std::istringstream in(std::string("\n") + row + "\n");
    try {
      read_meta_dataset(in);
      FAIL() << row;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kMalformedRow);
      EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
  }
}

TEST(JsonlTest, EmptyFile) {
  std::istringstream in("");
  EXPECT_TRUE(read_meta_dataset(in).empty());
  std::istringstream in2("\n\n");
  EXPECT_TRUE(read_rank_dataset(in2).empty());
}

TEST(JsonlTest, RankAndProductRoundTrip) {
  const std::vector<RankExample> rows{{{"a", "b"}, {1, 2}}, {{"c"}, {1}}};
  std::stringstream ss;
  write_rank_dataset(ss, rows);
  EXPECT_EQ(read_rank_dataset(ss), rows);

  const std::vector<Product> products{{normalize("OGX Shampoo & Co"), "hair"}, {normalize("Anti-Frizz"), "hair"}};
  std::stringstream ps;
  write_products(ps, products);
  const auto back = read_products(ps);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].title.tokens, products[0].title.tokens);
  EXPECT_EQ(back[1].category, "hair");
}

TEST(JsonlTest, LabelColumn) {
  std::istringstream in("{\"y_ts\":[1,0,1]}\n{\"y_ts\":[0]}\n");
  const auto cols = read_label_column(in);
  ASSERT_EQ(cols.size(), 2u);
  EXPECT_EQ(cols[0], (LabelVector{1, 0, 1}));
}

}  // namespace
}  // namespace titlecomp
