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

#include "lstmocr/font.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>

#include <opencv2/freetype.hpp>
#include <opencv2/imgproc.hpp>

#include "lstmocr/errors.h"
#include "lstmocr/text.h"

namespace lstmocr {

namespace {

class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}

  std::uint32_t U8(std::size_t off) const { return Byte(off); }
  std::uint32_t U16(std::size_t off) const {
    return (Byte(off) << 8) | Byte(off + 1);
  }
  std::uint32_t U32(std::size_t off) const {
    return (U16(off) << 16) | U16(off + 2);
  }
  std::size_t size() const { return data_.size(); }

 private:
  std::uint32_t Byte(std::size_t off) const {
    if (off >= data_.size()) throw DataError("font file truncated");
    return static_cast<unsigned char>(data_[off]);
  }
  std::string_view data_;
};

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open font " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

FontCoverage FontCoverage::Load(const std::filesystem::path& path) {
  return Parse(ReadFile(path));
}

FontCoverage FontCoverage::Parse(std::string_view sfnt) {
  ByteReader r(sfnt);
  const std::uint32_t num_tables = r.U16(4);
  std::size_t cmap = 0;
  for (std::uint32_t i = 0; i < num_tables; ++i) {
    const std::size_t rec = 12 + 16 * i;
    if (r.U32(rec) == 0x636d6170) {  // 'cmap'
      cmap = r.U32(rec + 8);
      break;
    }
  }
  if (cmap == 0) throw DataError("font has no cmap table");

  // Prefer a full-repertoire Unicode subtable (format 12), then BMP (4).
  std::size_t best = 0;
  int best_rank = 0;
  const std::uint32_t n_sub = r.U16(cmap + 2);
  for (std::uint32_t i = 0; i < n_sub; ++i) {
    const std::size_t rec = cmap + 4 + 8 * i;
    const std::uint32_t platform = r.U16(rec);
    const std::uint32_t encoding = r.U16(rec + 2);
    const std::size_t off = cmap + r.U32(rec + 4);
    const std::uint32_t format = r.U16(off);
    const bool unicode = platform == 0 || (platform == 3 && (encoding == 1 || encoding == 10));
    if (!unicode) continue;
    int rank = format == 12 ? 2 : (format == 4 ? 1 : 0);
    if (rank > best_rank) {
      best_rank = rank;
      best = off;
    }
  }
  if (best_rank == 0) throw DataError("font has no usable Unicode cmap");

  FontCoverage cov;
  auto add = [&cov](char32_t ch) {
    if (!cov.ranges_.empty() && cov.ranges_.back().last + 1 == ch) {
      cov.ranges_.back().last = ch;
    } else {
      cov.ranges_.push_back({ch, ch});
    }
  };

  if (best_rank == 2) {
    const std::uint32_t groups = r.U32(best + 12);
    for (std::uint32_t g = 0; g < groups; ++g) {
      const std::size_t rec = best + 16 + 12 * g;
      const char32_t first = r.U32(rec);
      const char32_t last = r.U32(rec + 4);
      const std::uint32_t glyph = r.U32(rec + 8);
      // Glyph 0 is .notdef; only the first char of a group can map to it.
      const char32_t from = glyph == 0 ? first + 1 : first;
      if (from <= last) cov.ranges_.push_back({from, last});
    }
  } else {
    const std::uint32_t seg_count = r.U16(best + 6) / 2;
    const std::size_t end_codes = best + 14;
    const std::size_t start_codes = end_codes + 2 * seg_count + 2;
    const std::size_t deltas = start_codes + 2 * seg_count;
    const std::size_t range_offsets = deltas + 2 * seg_count;
    for (std::uint32_t s = 0; s < seg_count; ++s) {
      const std::uint32_t end = r.U16(end_codes + 2 * s);
      const std::uint32_t start = r.U16(start_codes + 2 * s);
      const std::uint32_t delta = r.U16(deltas + 2 * s);
      const std::size_t ro_pos = range_offsets + 2 * s;
      const std::uint32_t ro = r.U16(ro_pos);
      if (start > end) continue;
      for (std::uint32_t c = start; c <= end && c != 0xFFFF; ++c) {
        std::uint32_t glyph;
        if (ro == 0) {
          glyph = (c + delta) & 0xFFFF;
        } else {
          glyph = r.U16(ro_pos + ro + 2 * (c - start));
          if (glyph != 0) glyph = (glyph + delta) & 0xFFFF;
        }
        if (glyph != 0) add(static_cast<char32_t>(c));
      }
    }
  }
  std::sort(cov.ranges_.begin(), cov.ranges_.end(),
            [](const Range& a, const Range& b) { return a.first < b.first; });
  return cov;
}

bool FontCoverage::HasGlyph(char32_t ch) const {
  auto it = std::upper_bound(
      ranges_.begin(), ranges_.end(), ch,
      [](char32_t c, const Range& r) { return c < r.first; });
  if (it == ranges_.begin()) return false;
  --it;
  return ch <= it->last;
}

struct WordRenderer::Impl {
  FontSpec font;
  FontCoverage coverage;
  cv::Ptr<cv::freetype::FreeType2> ft;
  int pixel_size = 0;
  int margin = 0;

  cv::Size TextSize(const std::string& text, int* baseline) const {
    return ft->getTextSize(text, pixel_size, -1, baseline);
  }
};

WordRenderer::WordRenderer(const FontSpec& font, double dpi, int margin)
    : impl_(std::make_unique<Impl>()) {
  if (font.size_pt <= 0) throw DataError("font size must be positive");
  if (margin < 1) throw DataError("render margin must be at least 1 pixel");
  impl_->font = font;
  impl_->coverage = FontCoverage::Load(font.face_file);
  impl_->pixel_size = static_cast<int>(std::lround(font.size_pt * dpi / 72.0));
  impl_->margin = margin;
  impl_->ft = cv::freetype::createFreeType2();
  impl_->ft->loadFontData(font.face_file.string(), 0);
}

WordRenderer::~WordRenderer() = default;
WordRenderer::WordRenderer(WordRenderer&&) noexcept = default;
WordRenderer& WordRenderer::operator=(WordRenderer&&) noexcept = default;

int WordRenderer::pixel_size() const { return impl_->pixel_size; }
const FontSpec& WordRenderer::font() const { return impl_->font; }

void WordRenderer::CheckGlyphs(std::string_view text) const {
  for (char32_t ch : DecodeUtf8(text)) {
    if (ch == U' ') continue;
    if (!impl_->coverage.HasGlyph(ch)) {
      throw DataError("glyph error: font " + impl_->font.name +
                      " has no glyph for '" + EncodeUtf8(ch) + "'");
    }
  }
}

namespace {

GrayImage FromBgr(const cv::Mat& bgr) {
  cv::Mat gray;
  cv::cvtColor(bgr, gray, cv::COLOR_BGR2GRAY);
  std::vector<std::uint8_t> data(static_cast<std::size_t>(gray.rows) * gray.cols);
  for (int r = 0; r < gray.rows; ++r) {
    const auto* src = gray.ptr<std::uint8_t>(r);
    std::copy(src, src + gray.cols,
              data.begin() + static_cast<std::ptrdiff_t>(r) * gray.cols);
  }
  return GrayImage(gray.cols, gray.rows, std::move(data));
}

}  // namespace

GrayImage WordRenderer::RenderWord(std::string_view word) const {
  if (word.empty()) throw DataError("cannot render an empty word");
  CheckGlyphs(word);
  const std::string text(word);
  const int px = impl_->pixel_size;
  const int m = impl_->margin;
  int baseline = 0;
  const cv::Size size = impl_->TextSize(text, &baseline);
  // Room for accents above the ascender line and for descenders.
  const int ascent = px + px / 4;
  const int descent = px / 2;
  cv::Mat canvas(ascent + descent + 2 * m, size.width + px / 2 + 2 * m,
                 CV_8UC3, cv::Scalar(255, 255, 255));
  impl_->ft->putText(canvas, text, cv::Point(m, m + ascent), px,
                     cv::Scalar(0, 0, 0), -1, cv::LINE_AA, true);
  return FromBgr(canvas);
}

GrayImage WordRenderer::RenderPage(
    const std::vector<std::vector<std::string>>& lines) const {
  const int px = impl_->pixel_size;
  const int m = impl_->margin;
  const int pitch = px + px / 2;
  int width = 1;
  std::vector<std::vector<int>> advances(lines.size());
  for (std::size_t l = 0; l < lines.size(); ++l) {
    int x = 0;
    for (const auto& w : lines[l]) {
      CheckGlyphs(w);
      int baseline = 0;
      const int adv = impl_->TextSize(w, &baseline).width;
      advances[l].push_back(adv);
      x += adv + px;
    }
    width = std::max(width, x);
  }
  const int ascent = px + px / 4;
  const int height = 2 * m + ascent + px / 2 +
                     pitch * std::max(0, static_cast<int>(lines.size()) - 1);
  cv::Mat canvas(height, width + px / 2 + 2 * m, CV_8UC3,
                 cv::Scalar(255, 255, 255));
  for (std::size_t l = 0; l < lines.size(); ++l) {
    const int y = m + ascent + pitch * static_cast<int>(l);
    int x = m;
    for (std::size_t i = 0; i < lines[l].size(); ++i) {
      impl_->ft->putText(canvas, lines[l][i], cv::Point(x, y), px,
                         cv::Scalar(0, 0, 0), -1, cv::LINE_AA, true);
      x += advances[l][i] + px;
    }
  }
  return FromBgr(canvas);
}

GrayImage RenderWord(std::string_view word, const FontSpec& font, double dpi) {
  return WordRenderer(font, dpi).RenderWord(word);
}

}  // namespace lstmocr
