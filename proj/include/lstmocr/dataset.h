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

// Corpus, label alphabet, samples and the seeded 80/20 experiment splits.

#ifndef LSTMOCR_DATASET_H_
#define LSTMOCR_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lstmocr/imaging.h"

namespace lstmocr {

struct Corpus {
  std::vector<std::string> words;
};

// One word per line, UTF-8. Duplicates are dropped keeping the first
// occurrence; blank lines are skipped; a line with inner whitespace is an
// error. Throws DataError on encoding errors and on an empty result.
Corpus LoadCorpus(const std::filesystem::path& path);
Corpus ParseCorpus(std::string_view text);

// Characters sorted by code point; label 0 is the CTC blank and label i
// (1-based) is chars()[i - 1].
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<char32_t> chars);

  static constexpr int kBlank = 0;

  const std::vector<char32_t>& chars() const { return chars_; }
  int size() const { return static_cast<int>(chars_.size()); }
  // Output classes including the blank.
  int num_classes() const { return size() + 1; }

  bool Contains(char32_t ch) const { return index_.count(ch) > 0; }
  int LabelOf(char32_t ch) const;
  char32_t CharOf(int label) const;

  std::vector<int> Encode(std::string_view word) const;
  std::string Decode(std::span<const int> labels) const;

  // The characters as one UTF-8 string, for manifests and checkpoints.
  std::string ToUtf8() const;
  static Alphabet FromUtf8(std::string_view s);

  friend bool operator==(const Alphabet& a, const Alphabet& b) {
    return a.chars_ == b.chars_;
  }

 private:
  std::vector<char32_t> chars_;
  std::map<char32_t, int> index_;
};

Alphabet BuildAlphabet(const Corpus& corpus);

struct FontSpec {
  std::string name;              // dataset label, e.g. "Arial_14"
  std::filesystem::path face_file;
  double size_pt = 14.0;
};

struct Sample {
  GrayImage image;  // height-normalized
  std::string transcript;
  std::string font;
  int word_id = 0;
};

using SamplePtr = std::shared_ptr<const Sample>;

struct DatasetSplit {
  std::string dataset_name;
  std::uint64_t seed = 0;
  std::vector<SamplePtr> train;
  std::vector<SamplePtr> test;
};

// Deterministic shuffle under `seed`, then the first ceil(0.8 n) samples go
// to train. Requires at least 5 samples.
DatasetSplit Split8020(std::span<const SamplePtr> samples, std::uint64_t seed,
                       std::string dataset_name = "");

inline constexpr const char* kCombinedDatasetName = "all";

// Rendering geometry and preprocessing knobs shared by every sample.
struct PreprocessOptions {
  int height = 32;
  SegmentationParams segmentation;
  double dpi = 96.0;
  int margin = 4;
};

// Otsu binarization, unit-padded crop, height normalization.
GrayImage PreprocessWord(const GrayImage& rendered,
                         const PreprocessOptions& opts);

// Renders and preprocesses every corpus word in one font.
std::vector<SamplePtr> RenderFontSamples(const Corpus& corpus,
                                         const FontSpec& font,
                                         const PreprocessOptions& opts);

// Words laid out on pages (words_per_line x lines_per_page), rendered, then
// recovered through line and word segmentation. Throws DataError when
// segmentation disagrees with the layout.
std::vector<SamplePtr> RenderFontSamplesViaPages(
    const Corpus& corpus, const FontSpec& font, const PreprocessOptions& opts,
    int words_per_line = 6, int lines_per_page = 25);

// Samples of every font, keyed by font name; the "all" set is their
// concatenation in font order.
struct RenderedFonts {
  std::vector<std::string> font_names;
  std::map<std::string, std::vector<SamplePtr>> by_font;

  std::vector<SamplePtr> Combined() const;
  // A font name or "all".
  std::vector<SamplePtr> Source(const std::string& dataset_name) const;
};

RenderedFonts RenderAllFonts(const Corpus& corpus,
                             std::span<const FontSpec> fonts,
                             const PreprocessOptions& opts);

// One split per (seed, dataset) with datasets in the order
// [font_1 .. font_n, "all"]; seeds outermost.
std::vector<DatasetSplit> BuildExperimentDatasets(
    const RenderedFonts& rendered, std::span<const std::uint64_t> seeds);

// Convenience wrapper enforcing exactly six fonts.
std::vector<DatasetSplit> BuildExperimentDatasets(
    const Corpus& corpus, std::span<const FontSpec> fonts,
    std::span<const std::uint64_t> seeds, const PreprocessOptions& opts);

}  // namespace lstmocr

#endif  // LSTMOCR_DATASET_H_
