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

// Command-line front end. Exit codes: 0 success, 1 usage error, 2 data error.

#ifndef TITLECOMP_CLI_HPP
#define TITLECOMP_CLI_HPP

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "titlecomp/embeddings.hpp"
#include "titlecomp/error.hpp"
#include "titlecomp/metrics.hpp"
#include "titlecomp/ngram_lm.hpp"
#include "titlecomp/protonet.hpp"
#include "titlecomp/rule_engine.hpp"
#include "titlecomp/segment_mapper.hpp"
#include "titlecomp/segmenter.hpp"
#include "titlecomp/synthetic.hpp"
#include "titlecomp/task_dataset.hpp"
#include "titlecomp/text_norm.hpp"

namespace titlecomp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

namespace detail {

inline std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIo, "cannot open " + path);
  return is;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIo, "cannot open " + path + " for writing");
  return os;
}

inline void log_config(std::ostream& err, const std::string& command, const nlohmann::ordered_json& cfg) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["config"] = cfg;
  err << "config " << j.dump() << '\n';
}

inline std::vector<TokenSequence> read_titles(std::istream& in) {
  std::vector<TokenSequence> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    try {
      out.push_back(normalize(line));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyInput) throw;
      out.emplace_back();
    }
  }
  return out;
}

inline std::vector<TokenSequence> titles_of(const std::vector<Product>& products) {
  std::vector<TokenSequence> out;
  out.reserve(products.size());
  for (const auto& p : products) out.push_back(p.title);
  return out;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace detail

// Fully resolved options for every subcommand.
struct RunConfig {
  // shared
  std::string lm;
  std::string embeddings = "hashed:64:0";
  std::uint64_t seed = 0;
  unsigned threads = 1;
  int buckets = 12;
  double alpha = 0.0;
  double t = 0.0;
  double alpha_min = -1.0;
  double alpha_max = 1.0;

  // train-lm
  std::string corpus;
  std::string out;
  std::size_t sample = 0;
  bool unk_singletons = false;

  // gen-tasks / gen-rank-data
  std::string products;
  std::size_t pairs = 1000;
  std::size_t rules_per_pair = 4;
  std::vector<double> t_range;
  std::string modes = "all";
  bool reject_identity = false;
  std::string categories;

  // protonet-eval / eval
  std::string dataset;
  std::string pred_out;
  std::string baseline_out;
  std::string gold;
  std::string pred;

  // gen-synthetic
  std::string products_out;
  std::string corpus_out;
  std::size_t corpus_lines = 100000;
  std::size_t products_per_category = 200;
  std::size_t num_categories = 6;
};

namespace detail {

inline RuleRanges resolve_ranges(const RunConfig& cfg, const MknModel& model,
                                 const std::vector<TokenSequence>& titles) {
  RuleRanges ranges;
  ranges.alpha = {cfg.alpha_min, cfg.alpha_max};
  if (cfg.t_range.size() == 2) {
    ranges.t = {cfg.t_range[0], cfg.t_range[1]};
  } else {
    ranges.t = split_statistic_range(model, titles, 0.5 * (cfg.alpha_min + cfg.alpha_max), 0.05, 0.95);
  }
  if (cfg.modes == "spans") {
    ranges.modes.assign(kSpanModes.begin(), kSpanModes.end());
  } else {
    ranges.modes.assign(kAllModes.begin(), kAllModes.end());
  }
  return ranges;
}

inline int cmd_train_lm(const RunConfig& cfg, Streams io) {
  auto is = open_in(cfg.corpus);
  std::size_t skipped = 0;
  const auto queries = read_corpus(is, &skipped);
  std::vector<TokenSequence> corpus;
  if (cfg.sample > 0) {
    corpus = sample_training_corpus(queries, cfg.sample, cfg.seed);
  } else {
    corpus.reserve(queries.size());
    for (const auto& q : queries) corpus.push_back(q.query);
  }
  TrainOptions opts;
  opts.unk_singletons = cfg.unk_singletons;
  opts.threads = cfg.threads;
  const MknModel model = MknModel::train(corpus, opts);
  model.save(cfg.out);
  io.err << "trained on " << corpus.size() << " lines (" << skipped << " empty skipped), vocab "
         << model.vocab().size() << ", trigrams " << model.counts().trigram.size() << '\n';
  return kExitOk;
}

inline int cmd_segment(const RunConfig& cfg, Streams io) {
  const MknModel model = MknModel::load(cfg.lm);
  for (const auto& title : read_titles(io.in)) {
    if (title.tokens.empty()) {
      io.out << '\n';
      continue;
    }
    const Segmentation seg = segment(model, title, cfg.alpha, cfg.t);
    for (std::size_t i = 0; i < seg.segment_ids.size(); ++i) {
      if (i) io.out << ' ';
      io.out << seg.segment_ids[i];
    }
    io.out << '\n';
  }
  return kExitOk;
}

inline int cmd_map_segments(const RunConfig& cfg, Streams io) {
  const MknModel model = MknModel::load(cfg.lm);
  const EmbeddingTable table = EmbeddingTable::from_spec(cfg.embeddings);
  const MappingParams params = sample_mapping_params(table.dim(), cfg.buckets, {cfg.alpha_min, cfg.alpha_max}, cfg.seed);
  for (const auto& title : read_titles(io.in)) {
    if (!title.tokens.empty()) {
      const Segmentation seg = segment(model, title, cfg.alpha, cfg.t);
      const SegmentMap smap = map_segments(title.tokens, seg, model, table, params);
      for (std::size_t i = 0; i < title.size(); ++i) {
        io.out << title.tokens[i] << '\t' << seg.segment_ids[i] << '\t' << smap.token_labels[i] << '\n';
      }
    }
    io.out << '\n';
  }
  return kExitOk;
}

inline int cmd_gen_tasks(const RunConfig& cfg, Streams io) {
  const MknModel model = MknModel::load(cfg.lm);
  const EmbeddingTable table = EmbeddingTable::from_spec(cfg.embeddings);
  auto pis = open_in(cfg.products);
  auto products = read_products(pis);
  if (!cfg.categories.empty()) {
    const auto keep = split_list(cfg.categories);
    std::erase_if(products, [&](const Product& p) {
      return std::find(keep.begin(), keep.end(), p.category) == keep.end();
    });
  }
  const Catalog catalog = group_by_category(products);
  MetaGenOptions opts;
  opts.pairs_per_category = cfg.pairs;
  opts.rules_per_pair = cfg.rules_per_pair;
  opts.buckets = cfg.buckets;
  opts.seed = cfg.seed;
  opts.ranges = resolve_ranges(cfg, model, titles_of(products));
  opts.reject_identity = cfg.reject_identity;
  opts.threads = cfg.threads;
  io.err << "rule ranges: alpha [" << opts.ranges.alpha.first << ", " << opts.ranges.alpha.second << "], t ["
         << opts.ranges.t.first << ", " << opts.ranges.t.second << "]\n";
  MetaGenStats stats;
  const auto rows = generate_meta_dataset(catalog, opts, model, table, &stats);
  auto os = open_out(cfg.out);
  write_meta_dataset(os, rows);
  io.err << "wrote " << stats.rows << " rows (" << stats.retries << " retries, " << stats.skipped
         << " skipped)\n";
  return kExitOk;
}

inline int cmd_gen_rank_data(const RunConfig& cfg, Streams io) {
  const MknModel model = MknModel::load(cfg.lm);
  auto pis = open_in(cfg.products);
  const auto titles = titles_of(read_products(pis));
  double t = cfg.t;
  if (cfg.t_range.empty()) {
    t = split_statistic_range(model, titles, cfg.alpha, 0.5, 0.5).first;
    io.err << "threshold from median split statistic: " << t << '\n';
  }
  const auto rows = generate_rank_dataset(titles, model, cfg.buckets, cfg.alpha, t, cfg.threads);
  auto os = open_out(cfg.out);
  write_rank_dataset(os, rows);
  io.err << "wrote " << rows.size() << " rank rows\n";
  return kExitOk;
}

inline int cmd_protonet_eval(const RunConfig& cfg, Streams io) {
  const EmbeddingTable table = EmbeddingTable::from_spec(cfg.embeddings);
  auto is = open_in(cfg.dataset);
  auto rows = read_meta_dataset(is);
  if (!cfg.categories.empty()) {
    const auto keep = split_list(cfg.categories);
    std::erase_if(rows, [&](const MetaExample& r) {
      return std::find(keep.begin(), keep.end(), r.category) == keep.end();
    });
  }
  std::vector<LabelVector> gold, pred, all_keep;
  for (const auto& r : rows) {
    gold.push_back(r.y_ts);
    pred.push_back(predict_one_shot(table, r.x_ex, r.y_ex, r.x_ts));
    all_keep.emplace_back(r.y_ts.size(), 1);
  }
  const EvalReport report = evaluate(gold, pred);
  {
    auto os = open_out(cfg.out);
    os << to_json(report).dump() << '\n';
  }
  io.out << to_json(report).dump() << '\n';
  if (!cfg.pred_out.empty()) {
    auto os = open_out(cfg.pred_out);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      MetaExample p = rows[i];
      p.y_ts = pred[i];
      write_meta_row(os, p);
    }
  }
  if (!cfg.baseline_out.empty()) {
    auto os = open_out(cfg.baseline_out);
    os << to_json(evaluate(gold, all_keep)).dump() << '\n';
  }
  return kExitOk;
}

inline int cmd_eval(const RunConfig& cfg, Streams io) {
  auto gis = open_in(cfg.gold);
  auto pis = open_in(cfg.pred);
  const auto gold = read_label_column(gis);
  const auto pred = read_label_column(pis);
  const std::string json = to_json(evaluate(gold, pred)).dump();
  io.out << json << '\n';
  if (!cfg.out.empty()) {
    auto os = open_out(cfg.out);
    os << json << '\n';
  }
  return kExitOk;
}

inline int cmd_gen_synthetic(const RunConfig& cfg, Streams io) {
  synthetic::GrammarOptions gopts;
  gopts.categories = cfg.num_categories;
  gopts.seed = cfg.seed;
  const auto grammars = synthetic::make_grammars(gopts);
  const auto products = synthetic::make_catalog(grammars, cfg.products_per_category, cfg.seed);
  {
    auto os = open_out(cfg.products_out);
    write_products(os, products);
  }
  if (!cfg.corpus_out.empty()) {
    auto os = open_out(cfg.corpus_out);
    for (const auto& q : synthetic::make_queries(grammars, cfg.corpus_lines, cfg.seed)) {
      os << join(q.query.tokens) << '\t' << q.frequency << '\n';
    }
  }
  io.err << "wrote " << products.size() << " products\n";
  return kExitOk;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, Streams io) {
  CLI::App app{"Unsupervised 1-shot title compression task generation"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  RunConfig cfg;

  auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads", cfg.threads, "Worker threads (output does not depend on this)")
        ->check(CLI::Range(1u, 256u));
  };

  auto* train = app.add_subcommand("train-lm", "Train a modified Kneser-Ney trigram model");
  train->add_option("--corpus", cfg.corpus, "Query file, one per line, optional \\t<frequency>")->required();
  train->add_option("--out", cfg.out, "Output model (MKN1)")->required();
  train->add_option("--sample", cfg.sample, "Sample this many distinct queries by length-normalized frequency");
  train->add_option("--seed", cfg.seed);
  train->add_flag("--unk-singletons", cfg.unk_singletons, "Map words seen once to <unk>");
  add_threads(train);

  auto* seg = app.add_subcommand("segment", "Segment titles read from stdin");
  seg->add_option("--lm", cfg.lm)->required();
  seg->add_option("--alpha", cfg.alpha)->required();
  seg->add_option("--t", cfg.t)->required();

  auto* map = app.add_subcommand("map-segments", "Print token, segment id and bucket label per token");
  map->add_option("--lm", cfg.lm)->required();
  map->add_option("--alpha", cfg.alpha)->required();
  map->add_option("--t", cfg.t)->required();
  map->add_option("--embeddings", cfg.embeddings, "Vector file or hashed:<d>:<seed>");
  map->add_option("--B", cfg.buckets)->check(CLI::PositiveNumber);
  map->add_option("--seed", cfg.seed);
  map->add_option("--alpha-min", cfg.alpha_min);
  map->add_option("--alpha-max", cfg.alpha_max);

  auto* tasks = app.add_subcommand("gen-tasks", "Generate 1-shot meta-training rows");
  tasks->add_option("--lm", cfg.lm)->required();
  tasks->add_option("--products", cfg.products, "Products JSON-lines {title, category}")->required();
  tasks->add_option("--pairs", cfg.pairs, "Product pairs per category")->required();
  tasks->add_option("--rules-per-pair", cfg.rules_per_pair)->required();
  tasks->add_option("--B", cfg.buckets)->required()->check(CLI::PositiveNumber);
  tasks->add_option("--seed", cfg.seed)->required();
  tasks->add_option("--out", cfg.out)->required();
  tasks->add_option("--embeddings", cfg.embeddings);
  tasks->add_option("--alpha-min", cfg.alpha_min);
  tasks->add_option("--alpha-max", cfg.alpha_max);
  tasks->add_option("--t-range", cfg.t_range, "Threshold range (default: 5th-95th percentile of split statistic)")
      ->expected(2);
  tasks->add_option("--modes", cfg.modes, "all | spans (prefix/suffix/substring only)")
      ->check(CLI::IsMember({"all", "spans"}));
  tasks->add_flag("--reject-identity", cfg.reject_identity, "Resample rules that keep every token on both sides");
  tasks->add_option("--categories", cfg.categories, "Comma-separated category filter");
  add_threads(tasks);

  auto* rank = app.add_subcommand("gen-rank-data", "Generate segment-rank pre-training rows");
  rank->add_option("--lm", cfg.lm)->required();
  rank->add_option("--products", cfg.products)->required();
  rank->add_option("--B", cfg.buckets)->required()->check(CLI::PositiveNumber);
  rank->add_option("--alpha", cfg.alpha);
  auto* rank_t = rank->add_option("--t", cfg.t, "Threshold (default: median split statistic)");
  rank->add_option("--out", cfg.out)->required();
  add_threads(rank);

  auto* proto = app.add_subcommand("protonet-eval", "Evaluate the prototypical 1-shot classifier");
  proto->add_option("--dataset", cfg.dataset)->required();
  proto->add_option("--embeddings", cfg.embeddings)->required();
  proto->add_option("--out", cfg.out, "Metrics JSON")->required();
  proto->add_option("--pred-out", cfg.pred_out, "Rows with predicted y_ts");
  proto->add_option("--baseline-out", cfg.baseline_out, "Metrics of the keep-everything baseline");
  proto->add_option("--categories", cfg.categories, "Comma-separated category filter");

  auto* ev = app.add_subcommand("eval", "Token F1 and exact match of y_ts predictions");
  ev->add_option("--gold", cfg.gold)->required();
  ev->add_option("--pred", cfg.pred)->required();
  ev->add_option("--out", cfg.out);

  auto* synth = app.add_subcommand("gen-synthetic", "Write a synthetic catalog and query corpus");
  synth->add_option("--products-out", cfg.products_out)->required();
  synth->add_option("--corpus-out", cfg.corpus_out);
  synth->add_option("--corpus-lines", cfg.corpus_lines);
  synth->add_option("--products-per-category", cfg.products_per_category);
  synth->add_option("--categories", cfg.num_categories);
  synth->add_option("--seed", cfg.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, io.out, io.err) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::ParseError& e) {
    app.exit(e, io.out, io.err);
    return kExitUsage;
  }
  if (rank->parsed()) cfg.t_range = rank_t->count() ? std::vector<double>{cfg.t, cfg.t} : std::vector<double>{};

  CLI::App* sub = app.get_subcommands().front();
  try {
    nlohmann::ordered_json resolved;
    for (const CLI::Option* opt : sub->get_options()) {
      if (opt->get_name() == "--help") continue;
      const auto results = opt->results();
      std::string value = opt->count() ? (results.empty() ? "true" : CLI::detail::join(results, " "))
                                       : opt->get_default_str();
      resolved[opt->get_name()] = value;
    }
    detail::log_config(io.err, sub->get_name(), resolved);

    if (sub == train) return detail::cmd_train_lm(cfg, io);
    if (sub == seg) return detail::cmd_segment(cfg, io);
    if (sub == map) return detail::cmd_map_segments(cfg, io);
    if (sub == tasks) return detail::cmd_gen_tasks(cfg, io);
    if (sub == rank) return detail::cmd_gen_rank_data(cfg, io);
    if (sub == proto) return detail::cmd_protonet_eval(cfg, io);
    if (sub == ev) return detail::cmd_eval(cfg, io);
    if (sub == synth) return detail::cmd_gen_synthetic(cfg, io);
  } catch (const Error& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

inline int run(int argc, const char* const* argv) { return run(argc, argv, {std::cin, std::cout, std::cerr}); }

}  // namespace titlecomp::cli

#endif  // TITLECOMP_CLI_HPP
