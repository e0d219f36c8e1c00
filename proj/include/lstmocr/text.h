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

#ifndef LSTMOCR_TEXT_H_
#define LSTMOCR_TEXT_H_

#include <string>
#include <string_view>

namespace lstmocr {

// Strict UTF-8 decoding: rejects overlongs, surrogates and values past
// U+10FFFF. Throws DataError("encoding error ...").
std::u32string DecodeUtf8(std::string_view s);
std::string EncodeUtf8(std::u32string_view s);
std::string EncodeUtf8(char32_t cp);

}  // namespace lstmocr

#endif  // LSTMOCR_TEXT_H_
