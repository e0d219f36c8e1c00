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

#include "lstmocr/dataset_io.h"

#include <cstdio>
#include <fstream>
#include <map>

#include "lstmocr/checkpoint.h"
#include "lstmocr/errors.h"
#include "lstmocr/image_io.h"

namespace lstmocr {

namespace fs = std::filesystem;
using nlohmann::json;

std::string SampleKey(const Sample& s) {
  char id[16];
  std::snprintf(id, sizeof(id), "%05d", s.word_id);
  return s.font + "/" + id;
}

const DatasetSplit& DatasetOnDisk::Find(const std::string& dataset,
                                        std::uint64_t seed) const {
  for (const auto& s : splits) {
    if (s.dataset_name == dataset && s.seed == seed) return s;
  }
  throw DataError("dataset has no split " + dataset + " with seed " + std::to_string(seed));
}

Alphabet DatasetOnDisk::alphabet() const {
  return Alphabet::FromUtf8(manifest.at("alphabet").get<std::string>());
}

void WriteDataset(const fs::path& dir, const RenderedFonts& rendered,
                  std::span<const DatasetSplit> splits, const Alphabet& alphabet,
                  const json& meta) {
  fs::create_directories(dir / "images");
  json manifest = meta;
  manifest["format"] = "lstmocr-dataset";
  manifest["version"] = kDatasetFormatVersion;
  manifest["alphabet"] = alphabet.ToUtf8();
  manifest["samples"] = json::array();
  for (const auto& font : rendered.font_names) {
    fs::create_directories(dir / "images" / font);
    for (const auto& s : rendered.by_font.at(font)) {
      const std::string key = SampleKey(*s);
      const std::string rel = "images/" + key + ".pgm";
      WritePgm(dir / rel, s->image);
      manifest["samples"].push_back({{"key", key},
                                     {"image", rel},
                                     {"transcript", s->transcript},
                                     {"font", s->font},
                                     {"word_id", s->word_id}});
    }
  }
  manifest["splits"] = json::array();
  for (const auto& split : splits) {
    json js{{"dataset", split.dataset_name}, {"seed", split.seed}};
    auto keys = [](const std::vector<SamplePtr>& part) {
      json out = json::array();
      for (const auto& s : part) out.push_back(SampleKey(*s));
      return out;
    };
    js["train"] = keys(split.train);
    js["test"] = keys(split.test);
    manifest["splits"].push_back(std::move(js));
  }
  WriteFileAtomic(dir / "manifest.json", manifest.dump(1));
}

DatasetOnDisk ReadDataset(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw DataError("no manifest.json in " + dir.string());
  DatasetOnDisk ds;
  try {
    ds.manifest = json::parse(in);
    if (ds.manifest.at("format") != "lstmocr-dataset" ||
        ds.manifest.at("version").get<int>() != kDatasetFormatVersion) {
      throw DataError("unsupported dataset manifest in " + dir.string());
    }
    std::map<std::string, SamplePtr> by_key;
    for (const auto& js : ds.manifest.at("samples")) {
      auto s = std::make_shared<Sample>();
      s->image = ReadImage(dir / js.at("image").get<std::string>());
      s->transcript = js.at("transcript").get<std::string>();
      s->font = js.at("font").get<std::string>();
      s->word_id = js.at("word_id").get<int>();
      const auto key = js.at("key").get<std::string>();
      if (!by_key.emplace(key, s).second) throw DataError("duplicate sample key " + key);
      ds.samples.push_back(std::move(s));
    }
    for (const auto& js : ds.manifest.at("splits")) {
      DatasetSplit split;
      split.dataset_name = js.at("dataset").get<std::string>();
      split.seed = js.at("seed").get<std::uint64_t>();
      for (const auto& k : js.at("train")) split.train.push_back(by_key.at(k.get<std::string>()));
      for (const auto& k : js.at("test")) split.test.push_back(by_key.at(k.get<std::string>()));
      ds.splits.push_back(std::move(split));
    }
  } catch (const json::exception& e) {
    throw DataError("malformed dataset manifest: " + std::string(e.what()));
  } catch (const std::out_of_range&) {
    throw DataError("dataset manifest references an unknown sample");
  }
  return ds;
}

}  // namespace lstmocr
