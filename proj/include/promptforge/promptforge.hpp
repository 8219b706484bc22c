// Copyright 2026 The PromptForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Umbrella header.

#ifndef PROMPTFORGE_PROMPTFORGE_HPP_
#define PROMPTFORGE_PROMPTFORGE_HPP_

#include "promptforge/augmentation.hpp"
#include "promptforge/backend.hpp"
#include "promptforge/cache.hpp"
#include "promptforge/error.hpp"
#include "promptforge/evaluation.hpp"
#include "promptforge/fixture_backend.hpp"
#include "promptforge/http_backend.hpp"
#include "promptforge/lexicon.hpp"
#include "promptforge/parallel.hpp"
#include "promptforge/pipeline.hpp"
#include "promptforge/prediction.hpp"
#include "promptforge/prompt_set.hpp"
#include "promptforge/ranking.hpp"
#include "promptforge/report.hpp"
#include "promptforge/text.hpp"
#include "promptforge/types.hpp"

#endif  // PROMPTFORGE_PROMPTFORGE_HPP_
