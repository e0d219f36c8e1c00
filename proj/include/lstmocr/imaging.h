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

// Raster types and the projection-profile preprocessing pipeline:
// binarization, line and word segmentation, unit-padded cropping and
// height normalization. Everything here is a pure function of its inputs.

#ifndef LSTMOCR_IMAGING_H_
#define LSTMOCR_IMAGING_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lstmocr {

// Row-major 8-bit raster. Pixel (row, col) lives at data[row * width + col].
template <typename Tag>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, std::uint8_t fill = 0);
  Raster(int width, int height, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }

  std::uint8_t at(int row, int col) const {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }
  std::uint8_t& at(int row, int col) {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }
  std::span<const std::uint8_t> row(int r) const {
    return {data_.data() + static_cast<std::size_t>(r) * width_,
            static_cast<std::size_t>(width_)};
  }

  const std::vector<std::uint8_t>& data() const { return data_; }

  // Copy of rows [row0, row0 + rows) x cols [col0, col0 + cols).
  Raster SubImage(int row0, int col0, int rows, int cols) const;
  Raster Transposed() const;

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

struct GrayTag {};
struct BinaryTag {};

// Intensities in [0, 255].
using GrayImage = Raster<GrayTag>;
// Values in {0, 1}; 1 is ink.
using BinaryImage = Raster<BinaryTag>;

enum class Axis { kRows, kColumns };

// Half-open index range [start, end) along one axis.
struct PixelRun {
  int start = 0;
  int end = 0;
  Axis axis = Axis::kRows;

  int length() const { return end - start; }
  friend bool operator==(const PixelRun&, const PixelRun&) = default;
};

struct Projection {
  Axis axis = Axis::kRows;
  std::vector<std::int64_t> sums;
};

struct SegmentationParams {
  // Projection entries <= epsilon count as blank.
  std::int64_t epsilon = 0;
  // Column runs separated by fewer than gap_min blank columns belong to the
  // same word. 14 pt text at 96 dpi has intra-word gaps of up to 6 columns.
  int gap_min = 8;
  // Row runs separated by fewer than line_gap_min blank rows belong to the
  // same line (keeps detached diacritics with their line).
  int line_gap_min = 4;
};

// Otsu's threshold over the 256-bin histogram. Pixels <= t form the dark
// class. Ties resolve to the smallest t. Throws DataError on empty input.
int OtsuThreshold(const GrayImage& img);

// Dark-on-light polarity: pixels with intensity <= t become ink (1).
BinaryImage Binarize(const GrayImage& img, int t);

// Otsu followed by Binarize.
BinaryImage BinarizeOtsu(const GrayImage& img);

Projection AxisProjection(const BinaryImage& img, Axis axis);

// Maximal runs of consecutive indices with sums > epsilon, ascending.
std::vector<PixelRun> FindContentRuns(const Projection& p,
                                      std::int64_t epsilon = 0);

// Merges runs whose separating gap is shorter than min_gap.
std::vector<PixelRun> MergeCloseRuns(std::span<const PixelRun> runs,
                                     int min_gap);

std::vector<PixelRun> LineRuns(const BinaryImage& page,
                               const SegmentationParams& params = {});
std::vector<PixelRun> WordRuns(const BinaryImage& line,
                               const SegmentationParams& params = {});

// Full-width horizontal bands, one per text line, top to bottom.
std::vector<BinaryImage> SegmentLines(const BinaryImage& page,
                                      const SegmentationParams& params = {});

// Full-height vertical bands, one per word, left to right.
std::vector<BinaryImage> SegmentWords(const BinaryImage& line,
                                      const SegmentationParams& params = {});

// Minimal ink bounding box surrounded by exactly one blank pixel on every
// side. Throws DataError("blank word") when there is no ink.
BinaryImage TightCropUnitPad(const BinaryImage& word);

// Bilinear resampling to height `target_height`, width scaled to keep the
// aspect ratio. Ink maps to 255, background to 0.
GrayImage NormalizeHeight(const BinaryImage& word, int target_height);

// Count of ink pixels.
std::int64_t InkCount(const BinaryImage& img);

}  // namespace lstmocr

#endif  // LSTMOCR_IMAGING_H_
