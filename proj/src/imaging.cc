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

#include "lstmocr/imaging.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "lstmocr/errors.h"

namespace lstmocr {

namespace {

template <typename Tag>
void ValidatePixels(const std::vector<std::uint8_t>& data) {
  if constexpr (std::is_same_v<Tag, BinaryTag>) {
    for (auto v : data) {
      if (v > 1) throw DataError("binary image values must be 0 or 1");
    }
  }
}

}  // namespace

template <typename Tag>
Raster<Tag>::Raster(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) throw DataError("negative image dimensions");
  data_.assign(static_cast<std::size_t>(width) * height, fill);
  ValidatePixels<Tag>(data_);
}

template <typename Tag>
Raster<Tag>::Raster(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 0 || height < 0) throw DataError("negative image dimensions");
  if (data_.size() != static_cast<std::size_t>(width) * height) {
    throw DataError("image data length does not match width * height");
  }
  ValidatePixels<Tag>(data_);
}

template <typename Tag>
Raster<Tag> Raster<Tag>::SubImage(int row0, int col0, int rows,
                                  int cols) const {
  if (row0 < 0 || col0 < 0 || rows < 0 || cols < 0 ||
      row0 + rows > height_ || col0 + cols > width_) {
    throw DataError("sub-image out of bounds");
  }
  std::vector<std::uint8_t> out(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    auto src = row(row0 + r).subspan(col0, cols);
    std::copy(src.begin(), src.end(),
              out.begin() + static_cast<std::ptrdiff_t>(r) * cols);
  }
  return Raster(cols, rows, std::move(out));
}

template <typename Tag>
Raster<Tag> Raster<Tag>::Transposed() const {
  Raster t(height_, width_);
  for (int r = 0; r < height_; ++r) {
    for (int c = 0; c < width_; ++c) t.at(c, r) = at(r, c);
  }
  return t;
}

template class Raster<GrayTag>;
template class Raster<BinaryTag>;

int OtsuThreshold(const GrayImage& img) {
  if (img.empty()) throw DataError("empty input");
  std::array<std::int64_t, 256> hist{};
  for (auto v : img.data()) ++hist[v];

  const std::int64_t total = static_cast<std::int64_t>(img.data().size());
  std::int64_t total_sum = 0;
  for (int v = 0; v < 256; ++v) total_sum += hist[v] * v;

  // Between-class variance is (N*S0 - n0*S)^2 / (N^2 * n0 * n1); the
  // constant N^2 is dropped. The numerator is formed exactly in 128 bits.
  int best_t = 0;
  long double best = -1.0L;
  std::int64_t n0 = 0;
  std::int64_t s0 = 0;
  for (int t = 0; t < 255; ++t) {
    n0 += hist[t];
    s0 += hist[t] * t;
    const std::int64_t n1 = total - n0;
    long double score = 0.0L;
    if (n0 > 0 && n1 > 0) {
      const __int128 diff = static_cast<__int128>(total) * s0 -
                            static_cast<__int128>(n0) * total_sum;
      const long double d = static_cast<long double>(diff);
      score = d * d / (static_cast<long double>(n0) * n1);
    }
    if (score > best) {
      best = score;
      best_t = t;
    }
  }
  return best_t;
}

BinaryImage Binarize(const GrayImage& img, int t) {
  if (t < 0 || t > 254) throw DataError("threshold must be in [0, 254]");
  std::vector<std::uint8_t> out(img.data().size());
  std::transform(img.data().begin(), img.data().end(), out.begin(),
                 [t](std::uint8_t v) -> std::uint8_t { return v <= t; });
  return BinaryImage(img.width(), img.height(), std::move(out));
}

BinaryImage BinarizeOtsu(const GrayImage& img) {
  return Binarize(img, OtsuThreshold(img));
}

Projection AxisProjection(const BinaryImage& img, Axis axis) {
  Projection p;
  p.axis = axis;
  p.sums.assign(axis == Axis::kRows ? img.height() : img.width(), 0);
  for (int r = 0; r < img.height(); ++r) {
    auto row = img.row(r);
    for (int c = 0; c < img.width(); ++c) {
      p.sums[axis == Axis::kRows ? r : c] += row[c];
    }
  }
  return p;
}

std::vector<PixelRun> FindContentRuns(const Projection& p,
                                      std::int64_t epsilon) {
  if (epsilon < 0) throw DataError("epsilon must be non-negative");
  std::vector<PixelRun> runs;
  const int n = static_cast<int>(p.sums.size());
  int i = 0;
  while (i < n) {
    if (p.sums[i] <= epsilon) {
      ++i;
      continue;
    }
    int j = i;
    while (j < n && p.sums[j] > epsilon) ++j;
    runs.push_back({i, j, p.axis});
    i = j;
  }
  return runs;
}

std::vector<PixelRun> MergeCloseRuns(std::span<const PixelRun> runs,
                                     int min_gap) {
  std::vector<PixelRun> merged;
  for (const auto& run : runs) {
    if (!merged.empty() && run.start - merged.back().end < min_gap) {
      merged.back().end = run.end;
    } else {
      merged.push_back(run);
    }
  }
  return merged;
}

std::vector<PixelRun> LineRuns(const BinaryImage& page,
                               const SegmentationParams& params) {
  auto runs = FindContentRuns(AxisProjection(page, Axis::kRows),
                              params.epsilon);
  return MergeCloseRuns(runs, params.line_gap_min);
}

std::vector<PixelRun> WordRuns(const BinaryImage& line,
                               const SegmentationParams& params) {
  auto runs = FindContentRuns(AxisProjection(line, Axis::kColumns),
                              params.epsilon);
  return MergeCloseRuns(runs, params.gap_min);
}

std::vector<BinaryImage> SegmentLines(const BinaryImage& page,
                                      const SegmentationParams& params) {
  if (page.empty()) throw DataError("empty input");
  std::vector<BinaryImage> lines;
  for (const auto& run : LineRuns(page, params)) {
    lines.push_back(page.SubImage(run.start, 0, run.length(), page.width()));
  }
  return lines;
}

std::vector<BinaryImage> SegmentWords(const BinaryImage& line,
                                      const SegmentationParams& params) {
  if (line.empty()) throw DataError("empty input");
  std::vector<BinaryImage> words;
  for (const auto& run : WordRuns(line, params)) {
    words.push_back(line.SubImage(0, run.start, line.height(), run.length()));
  }
  return words;
}

BinaryImage TightCropUnitPad(const BinaryImage& word) {
  int top = word.height(), bottom = -1, left = word.width(), right = -1;
  for (int r = 0; r < word.height(); ++r) {
    auto row = word.row(r);
    for (int c = 0; c < word.width(); ++c) {
      if (!row[c]) continue;
      top = std::min(top, r);
      bottom = std::max(bottom, r);
      left = std::min(left, c);
      right = std::max(right, c);
    }
  }
  if (bottom < 0) throw DataError("blank word");
  const int h = bottom - top + 1;
  const int w = right - left + 1;
  BinaryImage out(w + 2, h + 2);
  for (int r = 0; r < h; ++r) {
    auto src = word.row(top + r).subspan(left, w);
    for (int c = 0; c < w; ++c) out.at(r + 1, c + 1) = src[c];
  }
  return out;
}

GrayImage NormalizeHeight(const BinaryImage& word, int target_height) {
  if (target_height <= 0) throw DataError("target height must be positive");
  if (word.empty()) throw DataError("empty input");
  const int in_h = word.height();
  const int in_w = word.width();
  const int out_h = target_height;
  const int out_w = std::max(
      1, static_cast<int>(std::lround(static_cast<double>(in_w) * out_h / in_h)));

  // Pixel-centre alignment; source coordinates are clamped at the borders.
  auto source = [](int dst, int in, int out, int& i0, int& i1, double& frac) {
    double s = (dst + 0.5) * static_cast<double>(in) / out - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(in - 1));
    i0 = static_cast<int>(std::floor(s));
    i1 = std::min(i0 + 1, in - 1);
    frac = s - i0;
  };

  GrayImage out(out_w, out_h);
  for (int y = 0; y < out_h; ++y) {
    int y0, y1;
    double fy;
    source(y, in_h, out_h, y0, y1, fy);
    for (int x = 0; x < out_w; ++x) {
      int x0, x1;
      double fx;
      source(x, in_w, out_w, x0, x1, fx);
      const double top = (1 - fx) * word.at(y0, x0) + fx * word.at(y0, x1);
      const double bot = (1 - fx) * word.at(y1, x0) + fx * word.at(y1, x1);
      const double v = (1 - fy) * top + fy * bot;
      out.at(y, x) = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
  }
  return out;
}

std::int64_t InkCount(const BinaryImage& img) {
  std::int64_t n = 0;
  for (auto v : img.data()) n += v;
  return n;
}

}  // namespace lstmocr
