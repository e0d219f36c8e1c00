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

// Scalable-font word rendering. Glyph coverage comes from the font's own
// cmap table; rasterization is FreeType through OpenCV's freetype module.

#ifndef LSTMOCR_FONT_H_
#define LSTMOCR_FONT_H_

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "lstmocr/dataset.h"
#include "lstmocr/imaging.h"

namespace lstmocr {

// Character-to-glyph coverage of a TrueType/OpenType file (cmap formats 4
// and 12).
class FontCoverage {
 public:
  static FontCoverage Load(const std::filesystem::path& path);
  static FontCoverage Parse(std::string_view sfnt);

  bool HasGlyph(char32_t ch) const;

 private:
  struct Range {
    char32_t first;
    char32_t last;
  };
  // Sorted, disjoint ranges of characters with a nonzero glyph id.
  std::vector<Range> ranges_;
};

// Anti-aliased dark-on-light rendering. Not thread-safe; use one renderer
// per thread.
class WordRenderer {
 public:
  WordRenderer(const FontSpec& font, double dpi = 96.0, int margin = 4);
  ~WordRenderer();
  WordRenderer(WordRenderer&&) noexcept;
  WordRenderer& operator=(WordRenderer&&) noexcept;

  // Font size in pixels: round(size_pt * dpi / 72).
  int pixel_size() const;
  const FontSpec& font() const;

  // Throws DataError("glyph error: ...") naming the first character the
  // face cannot draw.
  void CheckGlyphs(std::string_view text) const;

  GrayImage RenderWord(std::string_view word) const;

  // One text line per entry at a line pitch of 1.5 pixel sizes. Words are
  // placed one em (pixel_size) apart.
  GrayImage RenderPage(const std::vector<std::vector<std::string>>& lines) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

GrayImage RenderWord(std::string_view word, const FontSpec& font,
                     double dpi = 96.0);

}  // namespace lstmocr

#endif  // LSTMOCR_FONT_H_
