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

#ifndef LSTMOCR_IMAGE_IO_H_
#define LSTMOCR_IMAGE_IO_H_

#include <filesystem>

#include "lstmocr/imaging.h"

namespace lstmocr {

// 8-bit binary PGM (P5, maxval 255).
GrayImage ReadPgm(const std::filesystem::path& path);
void WritePgm(const std::filesystem::path& path, const GrayImage& img);

// Dispatches on extension: .pgm is handled natively, .png through OpenCV.
// Colour PNGs are converted to grayscale on load.
GrayImage ReadImage(const std::filesystem::path& path);
void WriteImage(const std::filesystem::path& path, const GrayImage& img);

// Binary rasters are stored as grayscale with ink = 255, blank = 0.
GrayImage ToGray(const BinaryImage& img);
BinaryImage FromGray(const GrayImage& img);  // >= 128 is ink
void WriteBinaryImage(const std::filesystem::path& path,
                      const BinaryImage& img);
BinaryImage ReadBinaryImage(const std::filesystem::path& path);

}  // namespace lstmocr

#endif  // LSTMOCR_IMAGE_IO_H_
