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

#ifndef TITLECOMP_TEXT_NORM_HPP
#define TITLECOMP_TEXT_NORM_HPP

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <unicode/locid.h>
#include <unicode/unistr.h>

#include "titlecomp/error.hpp"

namespace titlecomp {

// Per-token keep (1) / drop (0) decisions.
using LabelVector = std::vector<std::uint8_t>;

// A normalized title or query. Tokens are non-empty, lowercase, and free of
// spaces, ampersands and hyphens.
struct TokenSequence {
  std::vector<std::string> tokens;
  std::string raw;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const TokenSequence&) const = default;
};

namespace detail {

inline bool is_ascii(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

}  // namespace detail

// Full Unicode lowercasing (root locale); ASCII input skips ICU entirely.
inline std::string to_lower(std::string_view s) {
  if (detail::is_ascii(s)) {
    std::string out(s);
    for (char& c : out) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
  }
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  u.toLower(icu::Locale::getRoot());
  std::string out;
  u.toUTF8String(out);
  return out;
}

// Lowercase, "&" -> " and ", delete "-", split on runs of ASCII space.
inline TokenSequence normalize(std::string_view raw) {
  const std::string lowered = to_lower(raw);
  std::string expanded;
  expanded.reserve(lowered.size() + 8);
  for (char c : lowered) {
    if (c == '&') {
      expanded += " and ";
    } else if (c != '-') {
      expanded += c;
    }
  }

  TokenSequence out;
  out.raw = std::string(raw);
  std::size_t pos = 0;
  while (pos < expanded.size()) {
    const std::size_t start = expanded.find_first_not_of(' ', pos);
    if (start == std::string::npos) break;
    std::size_t end = expanded.find(' ', start);
    if (end == std::string::npos) end = expanded.size();
    out.tokens.emplace_back(expanded.substr(start, end - start));
    pos = end;
  }
  if (out.tokens.empty()) {
    throw Error(ErrorCode::kEmptyInput,
                "no tokens after normalizing \"" + std::string(raw) + "\"");
  }
  return out;
}

inline std::string join(std::span<const std::string> tokens, std::string_view sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

// Space-joined subsequence of tokens whose label is 1.
inline std::string render(std::span<const std::string> tokens, std::span<const std::uint8_t> labels) {
  if (tokens.size() != labels.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(tokens.size()) + " tokens vs " +
                    std::to_string(labels.size()) + " labels");
  }
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!labels[i]) continue;
    if (!out.empty()) out += ' ';
    out += tokens[i];
  }
  return out;
}

inline std::string render(const TokenSequence& seq, std::span<const std::uint8_t> labels) {
  return render(std::span<const std::string>(seq.tokens), labels);
}

}  // namespace titlecomp

#endif  // TITLECOMP_TEXT_NORM_HPP
