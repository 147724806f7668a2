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

// Synthetic catalogs for benchmarks and end-to-end runs.
//
// Each category owns four slot vocabularies (brand, feature, type, size) of
// pseudo-words. A title fills the slots in order; a query is a random subset
// of the slots of some title, so the language model sees slot phrases both in
// isolation and in context.

#ifndef TITLECOMP_SYNTHETIC_HPP
#define TITLECOMP_SYNTHETIC_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "titlecomp/ngram_lm.hpp"
#include "titlecomp/rng.hpp"
#include "titlecomp/task_dataset.hpp"
#include "titlecomp/text_norm.hpp"

namespace titlecomp::synthetic {

struct GrammarOptions {
  std::size_t categories = 6;
  std::size_t brands = 12;
  std::size_t features = 10;
  std::size_t types = 4;
  std::size_t sizes = 6;
  std::uint64_t seed = 0;
};

enum Slot { kBrand = 0, kFeature = 1, kType = 2, kSize = 3 };

struct CategoryGrammar {
  std::string name;
  // slots[s] lists phrases; each phrase is one or more tokens.
  std::array<std::vector<std::vector<std::string>>, 4> slots;
};

namespace detail {

inline std::string pseudo_word(Rng& rng, std::size_t syllables) {
  static constexpr std::array<const char*, 16> kOnsets{"b", "d", "f", "g", "k", "l", "m", "n",
                                                       "p", "r", "s", "t", "v", "z", "br", "tr"};
  static constexpr std::array<const char*, 6> kVowels{"a", "e", "i", "o", "u", "ai"};
  std::string w;
  for (std::size_t i = 0; i < syllables; ++i) {
    w += kOnsets[uniform_index(rng, kOnsets.size())];
    w += kVowels[uniform_index(rng, kVowels.size())];
  }
  return w;
}

// Words are unique across the whole grammar so categories do not share
// vocabulary except for the size units.
inline std::string fresh_word(Rng& rng, std::set<std::string>& used, std::size_t syllables) {
  for (;;) {
    std::string w = pseudo_word(rng, syllables);
    if (used.insert(w).second) return w;
  }
}

}  // namespace detail

inline std::vector<CategoryGrammar> make_grammars(const GrammarOptions& opts) {
  static constexpr std::array<const char*, 6> kUnits{"fl oz", "oz", "ml", "lb", "count", "pack"};
  Rng rng(derive_seed(opts.seed, {0x6772616dULL}));
  std::set<std::string> used;
  std::vector<CategoryGrammar> out;
  for (std::size_t c = 0; c < opts.categories; ++c) {
    CategoryGrammar g;
    g.name = "cat" + std::to_string(c);
    for (std::size_t i = 0; i < opts.brands; ++i) {
      g.slots[kBrand].push_back({detail::fresh_word(rng, used, 3)});
    }
    for (std::size_t i = 0; i < opts.features; ++i) {
      std::vector<std::string> phrase;
      const std::size_t len = 2 + uniform_index(rng, 2);
      for (std::size_t k = 0; k < len; ++k) phrase.push_back(detail::fresh_word(rng, used, 2));
      g.slots[kFeature].push_back(std::move(phrase));
    }
    for (std::size_t i = 0; i < opts.types; ++i) {
      g.slots[kType].push_back({detail::fresh_word(rng, used, 2)});
    }
    for (std::size_t i = 0; i < opts.sizes; ++i) {
      std::vector<std::string> phrase{std::to_string(1 + uniform_index(rng, 32))};
      const std::string unit = kUnits[uniform_index(rng, kUnits.size())];
      auto unit_tokens = normalize(unit).tokens;
      phrase.insert(phrase.end(), unit_tokens.begin(), unit_tokens.end());
      g.slots[kSize].push_back(std::move(phrase));
    }
    out.push_back(std::move(g));
  }
  return out;
}

struct TitleDraw {
  std::array<std::size_t, 4> choice{};  // phrase index per slot
};

inline TitleDraw draw_title(const CategoryGrammar& g, Rng& rng) {
  TitleDraw d;
  for (int s = 0; s < 4; ++s) d.choice[s] = uniform_index(rng, g.slots[s].size());
  return d;
}

inline std::vector<std::string> render_slots(const CategoryGrammar& g, const TitleDraw& d, unsigned slot_mask) {
  std::vector<std::string> tokens;
  for (int s = 0; s < 4; ++s) {
    if (!(slot_mask & (1u << s))) continue;
    const auto& phrase = g.slots[s][d.choice[s]];
    tokens.insert(tokens.end(), phrase.begin(), phrase.end());
  }
  return tokens;
}

// Distinct titles per category, in draw order.
inline std::vector<Product> make_catalog(const std::vector<CategoryGrammar>& grammars, std::size_t per_category,
                                         std::uint64_t seed) {
  std::vector<Product> out;
  for (std::size_t c = 0; c < grammars.size(); ++c) {
    Rng rng(derive_seed(seed, {c, 0x63617461ULL}));
    std::set<std::string> seen;
    std::size_t attempts = 0;
    while (seen.size() < per_category && attempts < per_category * 100) {
      ++attempts;
      const std::string title = join(render_slots(grammars[c], draw_title(grammars[c], rng), 0xF));
      if (seen.insert(title).second) out.push_back({normalize(title), grammars[c].name});
    }
  }
  return out;
}

// Query lines: a random non-empty subset of slots of a random title, with a
// Zipf-like frequency attached.
inline std::vector<WeightedQuery> make_queries(const std::vector<CategoryGrammar>& grammars, std::size_t lines,
                                               std::uint64_t seed) {
  Rng rng(derive_seed(seed, {0x71756572ULL}));
  std::vector<WeightedQuery> out;
  out.reserve(lines);
  for (std::size_t i = 0; i < lines; ++i) {
    const CategoryGrammar& g = grammars[uniform_index(rng, grammars.size())];
    const TitleDraw d = draw_title(g, rng);
    const unsigned mask = 1u + static_cast<unsigned>(uniform_index(rng, 15));
    const double freq = std::floor(1000.0 / static_cast<double>(1 + uniform_index(rng, 1000)));
    out.push_back({normalize(join(render_slots(g, d, mask))), freq});
  }
  return out;
}

}  // namespace titlecomp::synthetic

#endif  // TITLECOMP_SYNTHETIC_HPP
