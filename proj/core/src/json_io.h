// Copyright 2026 The mgre Authors.
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

// JSON renderings shared by the checkpoint, metrics and report writers.

#ifndef MGRE_SRC_JSON_IO_H_
#define MGRE_SRC_JSON_IO_H_

#include <nlohmann/json.hpp>

#include "mgre/model.h"
#include "mgre/scorer.h"
#include "mgre/trainer.h"

namespace mgre {

using Json = nlohmann::ordered_json;

Json ToJson(const ModelConfig &config);
// Every field must be present; throws std::invalid_argument otherwise.
ModelConfig ModelConfigFromJson(const Json &json);
Json ToJson(const TrainerConfig &config);
Json ToJson(const ClassScore &score);
Json ToJson(const EvalReport &report);
Json ToJson(const EpochRecord &record);

}  // namespace mgre

#endif  // MGRE_SRC_JSON_IO_H_
