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

#ifndef LSTMOCR_ERRORS_H_
#define LSTMOCR_ERRORS_H_

#include <stdexcept>
#include <string>

namespace lstmocr {

// Malformed or unusable input data: bad images, corpus files, configs,
// label sequences that cannot be aligned, corrupt checkpoints.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A computation produced a non-finite value.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lstmocr

#endif  // LSTMOCR_ERRORS_H_
