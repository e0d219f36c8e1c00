/* Copyright 2026 The lstmocr Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Versioned checkpoint container.
//
// Layout (all integers little-endian):
//   "LSTMOCR\0"          8-byte magic
//   u32 version          kCheckpointVersion
//   u64 header_bytes     length of the JSON header that follows
//   header               UTF-8 JSON: dims, alphabet, seed, config, training
//                        state and the names/lengths of the arrays below
//   arrays               raw IEEE-754 doubles, in header order
//   u64 checksum         FNV-1a over every preceding byte

#ifndef LSTMOCR_CHECKPOINT_H_
#define LSTMOCR_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "lstmocr/dataset.h"
#include "lstmocr/metrics.h"
#include "lstmocr/network.h"
#include "lstmocr/trainer.h"

namespace lstmocr {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  NetworkParams params;
  Alphabet alphabet;
  std::uint64_t seed = 0;
  // Free-form run configuration (hyperparameters, preprocessing, ...).
  nlohmann::json config = nlohmann::json::object();
  // Present for mid-training checkpoints.
  std::optional<TrainerState> training;
};

std::string SerializeCheckpoint(const Checkpoint& ckpt);
// Throws DataError on any corruption; never returns partial state.
Checkpoint DeserializeCheckpoint(std::string_view bytes);

// Atomic: writes a temporary sibling file, then renames it into place.
void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

nlohmann::json ToJson(const EvalReport& r);
EvalReport EvalReportFromJson(const nlohmann::json& j);

// Writes `contents` to `path` via a temporary file and rename.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace lstmocr

#endif  // LSTMOCR_CHECKPOINT_H_
