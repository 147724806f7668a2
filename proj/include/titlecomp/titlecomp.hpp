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

#ifndef TITLECOMP_TITLECOMP_HPP
#define TITLECOMP_TITLECOMP_HPP

#include "titlecomp/embeddings.hpp"
#include "titlecomp/error.hpp"
#include "titlecomp/metrics.hpp"
#include "titlecomp/ngram_lm.hpp"
#include "titlecomp/protonet.hpp"
#include "titlecomp/rule_engine.hpp"
#include "titlecomp/segment_mapper.hpp"
#include "titlecomp/segmenter.hpp"
#include "titlecomp/task_dataset.hpp"
#include "titlecomp/text_norm.hpp"

#endif  // TITLECOMP_TITLECOMP_HPP
