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

#include "lstmocr/dataset.h"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "lstmocr/errors.h"
#include "lstmocr/font.h"
#include "lstmocr/random.h"
#include "lstmocr/text.h"

namespace lstmocr {

Corpus ParseCorpus(std::string_view text) {
  DecodeUtf8(text);  // validates the whole buffer
  Corpus corpus;
  std::set<std::string> seen;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\v' || c == '\f'; };
    while (!line.empty() && is_space(line.front())) line.remove_prefix(1);
    while (!line.empty() && is_space(line.back())) line.remove_suffix(1);
    if (line.empty()) continue;
    if (std::any_of(line.begin(), line.end(), is_space)) {
      throw DataError("corpus line " + std::to_string(line_no) +
                      " contains whitespace inside a word");
    }
    std::string word(line);
    if (seen.insert(word).second) corpus.words.push_back(std::move(word));
  }
  if (corpus.words.empty()) throw DataError("empty corpus");
  return corpus;
}

Corpus LoadCorpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus " + path.string());
  const std::string text{std::istreambuf_iterator<char>(in),
                         std::istreambuf_iterator<char>()};
  return ParseCorpus(text);
}

Alphabet::Alphabet(std::vector<char32_t> chars) : chars_(std::move(chars)) {
  for (std::size_t i = 0; i < chars_.size(); ++i) {
    if (!index_.emplace(chars_[i], static_cast<int>(i) + 1).second) {
      throw DataError("alphabet characters must be distinct");
    }
  }
}

int Alphabet::LabelOf(char32_t ch) const {
  auto it = index_.find(ch);
  if (it == index_.end()) {
    throw DataError("character '" + EncodeUtf8(ch) + "' is not in the alphabet");
  }
  return it->second;
}

char32_t Alphabet::CharOf(int label) const {
  if (label < 1 || label > size()) {
    throw DataError("label " + std::to_string(label) + " is out of range");
  }
  return chars_[label - 1];
}

std::vector<int> Alphabet::Encode(std::string_view word) const {
  std::vector<int> labels;
  for (char32_t ch : DecodeUtf8(word)) labels.push_back(LabelOf(ch));
  return labels;
}

std::string Alphabet::Decode(std::span<const int> labels) const {
  std::u32string out;
  for (int l : labels) out.push_back(CharOf(l));
  return EncodeUtf8(out);
}

std::string Alphabet::ToUtf8() const { return EncodeUtf8(std::u32string(chars_.begin(), chars_.end())); }

Alphabet Alphabet::FromUtf8(std::string_view s) {
  auto cps = DecodeUtf8(s);
  return Alphabet(std::vector<char32_t>(cps.begin(), cps.end()));
}

Alphabet BuildAlphabet(const Corpus& corpus) {
  if (corpus.words.empty()) throw DataError("empty corpus");
  std::set<char32_t> chars;
  for (const auto& w : corpus.words) {
    for (char32_t ch : DecodeUtf8(w)) chars.insert(ch);
  }
  return Alphabet(std::vector<char32_t>(chars.begin(), chars.end()));
}

DatasetSplit Split8020(std::span<const SamplePtr> samples, std::uint64_t seed,
                       std::string dataset_name) {
  if (samples.size() < 5) {
    throw DataError("too few samples to split (need at least 5)");
  }
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.Shuffle(std::span<std::size_t>(order));
  // ceil(0.8 n) in integers.
  const std::size_t n_train = (samples.size() * 4 + 4) / 5;
  DatasetSplit split;
  split.dataset_name = std::move(dataset_name);
  split.seed = seed;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_train ? split.train : split.test).push_back(samples[order[i]]);
  }
  return split;
}

GrayImage PreprocessWord(const GrayImage& rendered,
                         const PreprocessOptions& opts) {
  return NormalizeHeight(TightCropUnitPad(BinarizeOtsu(rendered)), opts.height);
}

std::vector<SamplePtr> RenderFontSamples(const Corpus& corpus,
                                         const FontSpec& font,
                                         const PreprocessOptions& opts) {
  WordRenderer renderer(font, opts.dpi, opts.margin);
  std::vector<SamplePtr> samples;
  samples.reserve(corpus.words.size());
  for (std::size_t i = 0; i < corpus.words.size(); ++i) {
    auto s = std::make_shared<Sample>();
    s->image = PreprocessWord(renderer.RenderWord(corpus.words[i]), opts);
    s->transcript = corpus.words[i];
    s->font = font.name;
    s->word_id = static_cast<int>(i);
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<SamplePtr> RenderFontSamplesViaPages(const Corpus& corpus,
                                                 const FontSpec& font,
                                                 const PreprocessOptions& opts,
                                                 int words_per_line,
                                                 int lines_per_page) {
  if (words_per_line < 1 || lines_per_page < 1) {
    throw DataError("page layout must have at least one word and one line");
  }
  WordRenderer renderer(font, opts.dpi, opts.margin);
  std::vector<SamplePtr> samples;
  const std::size_t per_page =
      static_cast<std::size_t>(words_per_line) * lines_per_page;
  for (std::size_t first = 0; first < corpus.words.size(); first += per_page) {
    std::vector<std::vector<std::string>> lines;
    std::vector<std::vector<int>> ids;
    for (std::size_t i = first;
         i < std::min(corpus.words.size(), first + per_page); ++i) {
      if ((i - first) % words_per_line == 0) {
        lines.emplace_back();
        ids.emplace_back();
      }
      lines.back().push_back(corpus.words[i]);
      ids.back().push_back(static_cast<int>(i));
    }
    const BinaryImage page = BinarizeOtsu(renderer.RenderPage(lines));
    const auto line_images = SegmentLines(page, opts.segmentation);
    if (line_images.size() != lines.size()) {
      throw DataError("page segmentation found " +
                      std::to_string(line_images.size()) + " lines, expected " +
                      std::to_string(lines.size()));
    }
    for (std::size_t l = 0; l < lines.size(); ++l) {
      const auto words = SegmentWords(line_images[l], opts.segmentation);
      if (words.size() != lines[l].size()) {
        throw DataError("line segmentation found " +
                        std::to_string(words.size()) + " words, expected " +
                        std::to_string(lines[l].size()));
      }
      for (std::size_t w = 0; w < words.size(); ++w) {
        auto s = std::make_shared<Sample>();
        s->image = NormalizeHeight(TightCropUnitPad(words[w]), opts.height);
        s->transcript = lines[l][w];
        s->font = font.name;
        s->word_id = ids[l][w];
        samples.push_back(std::move(s));
      }
    }
  }
  return samples;
}

std::vector<SamplePtr> RenderedFonts::Combined() const {
  std::vector<SamplePtr> all;
  for (const auto& name : font_names) {
    const auto& s = by_font.at(name);
    all.insert(all.end(), s.begin(), s.end());
  }
  return all;
}

std::vector<SamplePtr> RenderedFonts::Source(
    const std::string& dataset_name) const {
  if (dataset_name == kCombinedDatasetName) return Combined();
  auto it = by_font.find(dataset_name);
  if (it == by_font.end()) throw DataError("unknown dataset " + dataset_name);
  return it->second;
}

RenderedFonts RenderAllFonts(const Corpus& corpus,
                             std::span<const FontSpec> fonts,
                             const PreprocessOptions& opts) {
  RenderedFonts out;
  for (const auto& f : fonts) {
    if (out.by_font.count(f.name)) throw DataError("duplicate font name " + f.name);
    out.font_names.push_back(f.name);
    out.by_font[f.name] = RenderFontSamples(corpus, f, opts);
  }
  return out;
}

std::vector<DatasetSplit> BuildExperimentDatasets(
    const RenderedFonts& rendered, std::span<const std::uint64_t> seeds) {
  std::vector<DatasetSplit> splits;
  const auto combined = rendered.Combined();
  for (std::uint64_t seed : seeds) {
    for (const auto& name : rendered.font_names) {
      splits.push_back(Split8020(rendered.by_font.at(name), seed, name));
    }
    splits.push_back(Split8020(combined, seed, kCombinedDatasetName));
  }
  return splits;
}

std::vector<DatasetSplit> BuildExperimentDatasets(
    const Corpus& corpus, std::span<const FontSpec> fonts,
    std::span<const std::uint64_t> seeds, const PreprocessOptions& opts) {
  if (fonts.size() != 6) {
    throw DataError("the experiment matrix needs exactly six fonts, got " +
                    std::to_string(fonts.size()));
  }
  return BuildExperimentDatasets(RenderAllFonts(corpus, fonts, opts), seeds);
}

}  // namespace lstmocr
