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

#include "lstmocr/image_io.h"

#include <cctype>
#include <fstream>
#include <string>

#include <opencv2/imgcodecs.hpp>

#include "lstmocr/errors.h"

namespace lstmocr {

namespace {

std::string Lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(ch));
  return s;
}

// Reads the next whitespace-delimited header token, skipping comments.
std::string PgmToken(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

}  // namespace

GrayImage ReadPgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  if (PgmToken(in) != "P5") throw DataError(path.string() + ": not a P5 PGM");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(PgmToken(in));
    h = std::stoi(PgmToken(in));
    maxval = std::stoi(PgmToken(in));
  } catch (const std::exception&) {
    throw DataError(path.string() + ": malformed PGM header");
  }
  if (w <= 0 || h <= 0 || maxval != 255) {
    throw DataError(path.string() + ": unsupported PGM dimensions or maxval");
  }
  std::vector<std::uint8_t> data(static_cast<std::size_t>(w) * h);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size()));
  if (in.gcount() != static_cast<std::streamsize>(data.size())) {
    throw DataError(path.string() + ": truncated PGM data");
  }
  return GrayImage(w, h, std::move(data));
}

void WritePgm(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data().data()),
            static_cast<std::streamsize>(img.data().size()));
  if (!out) throw DataError("write failed: " + path.string());
}

GrayImage ReadImage(const std::filesystem::path& path) {
  const auto ext = Lower(path.extension().string());
  if (ext == ".pgm") return ReadPgm(path);
  if (ext != ".png") throw DataError("unsupported image format: " + ext);
  cv::Mat m = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
  if (m.empty()) throw DataError("cannot decode " + path.string());
  std::vector<std::uint8_t> data(static_cast<std::size_t>(m.rows) * m.cols);
  for (int r = 0; r < m.rows; ++r) {
    const auto* src = m.ptr<std::uint8_t>(r);
    std::copy(src, src + m.cols, data.begin() + static_cast<std::ptrdiff_t>(r) * m.cols);
  }
  return GrayImage(m.cols, m.rows, std::move(data));
}

void WriteImage(const std::filesystem::path& path, const GrayImage& img) {
  const auto ext = Lower(path.extension().string());
  if (ext == ".pgm") return WritePgm(path, img);
  if (ext != ".png") throw DataError("unsupported image format: " + ext);
  cv::Mat m(img.height(), img.width(), CV_8UC1,
            const_cast<std::uint8_t*>(img.data().data()));
  if (!cv::imwrite(path.string(), m)) {
    throw DataError("cannot write " + path.string());
  }
}

GrayImage ToGray(const BinaryImage& img) {
  std::vector<std::uint8_t> data(img.data().size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = img.data()[i] ? 255 : 0;
  return GrayImage(img.width(), img.height(), std::move(data));
}

BinaryImage FromGray(const GrayImage& img) {
  std::vector<std::uint8_t> data(img.data().size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = img.data()[i] >= 128;
  return BinaryImage(img.width(), img.height(), std::move(data));
}

void WriteBinaryImage(const std::filesystem::path& path,
                      const BinaryImage& img) {
  WriteImage(path, ToGray(img));
}

BinaryImage ReadBinaryImage(const std::filesystem::path& path) {
  return FromGray(ReadImage(path));
}

}  // namespace lstmocr
