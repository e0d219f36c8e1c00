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

// On-disk datasets: one PGM per (font, word) plus a JSON manifest that lists
// every sample and the membership of every seeded split.

#ifndef LSTMOCR_DATASET_IO_H_
#define LSTMOCR_DATASET_IO_H_

#include <filesystem>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "lstmocr/dataset.h"

namespace lstmocr {

inline constexpr int kDatasetFormatVersion = 1;

struct DatasetOnDisk {
  nlohmann::json manifest;
  std::vector<SamplePtr> samples;  // manifest order
  std::vector<DatasetSplit> splits;

  const DatasetSplit& Find(const std::string& dataset, std::uint64_t seed) const;
  Alphabet alphabet() const;
};

// `meta` is merged into the manifest (mode, height, config, ...).
void WriteDataset(const std::filesystem::path& dir, const RenderedFonts& rendered,
                  std::span<const DatasetSplit> splits, const Alphabet& alphabet,
                  const nlohmann::json& meta);

DatasetOnDisk ReadDataset(const std::filesystem::path& dir);

// Stable key of a sample inside a manifest, e.g. "Arial_14/00042".
std::string SampleKey(const Sample& s);

}  // namespace lstmocr

#endif  // LSTMOCR_DATASET_IO_H_
