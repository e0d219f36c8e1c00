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

// Independent reference implementations used only by tests. They favour
// obviousness over speed.

#ifndef LSTMOCR_TESTS_ORACLES_H_
#define LSTMOCR_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lstmocr/imaging.h"
#include "lstmocr/network.h"
#include "lstmocr/random.h"

namespace lstmocr::oracle {

// p(z | y) by enumerating all K^T frame paths. `probs` is K x T.
inline double CtcPathSum(const Matrix& probs, const std::vector<int>& z) {
  const int k = static_cast<int>(probs.rows());
  const int t_len = static_cast<int>(probs.cols());
  std::vector<int> path(t_len, 0);
  double total = 0.0;
  for (;;) {
    std::vector<int> collapsed;
    int prev = -1;
    for (int s : path) {
      if (s != prev && s != 0) collapsed.push_back(s);
      prev = s;
    }
    if (collapsed == z) {
      double p = 1.0;
      for (int t = 0; t < t_len; ++t) p *= probs(path[t], t);
      total += p;
    }
    int pos = 0;
    while (pos < t_len && ++path[pos] == k) path[pos++] = 0;
    if (pos == t_len) break;
  }
  return total;
}

// Levenshtein distance by memoized recursion over suffixes.
inline int EditDistanceMemo(const std::vector<int>& p, const std::vector<int>& q) {
  const std::size_t cols = q.size() + 1;
  std::vector<int> memo((p.size() + 1) * cols, -1);
  std::function<int(std::size_t, std::size_t)> d = [&](std::size_t i, std::size_t j) -> int {
    if (i == p.size()) return static_cast<int>(q.size() - j);
    if (j == q.size()) return static_cast<int>(p.size() - i);
    int& m = memo[i * cols + j];
    if (m < 0) {
      m = std::min({d(i + 1, j) + 1, d(i, j + 1) + 1,
                    d(i + 1, j + 1) + (p[i] == q[j] ? 0 : 1)});
    }
    return m;
  };
  return d(0, 0);
}

// Otsu by scanning every candidate threshold and computing the
// between-class variance directly from the pixel lists.
inline int OtsuScan(const GrayImage& img) {
  const auto& px = img.data();
  long double best = -1.0L;
  int best_t = 0;
  for (int t = 0; t <= 254; ++t) {
    long double n0 = 0, n1 = 0, s0 = 0, s1 = 0;
    for (std::uint8_t v : px) {
      if (v <= t) {
        n0 += 1;
        s0 += v;
      } else {
        n1 += 1;
        s1 += v;
      }
    }
    long double score = 0.0L;
    if (n0 > 0 && n1 > 0) {
      const long double n = n0 + n1;
      const long double mu0 = s0 / n0, mu1 = s1 / n1;
      score = (n0 / n) * (n1 / n) * (mu0 - mu1) * (mu0 - mu1);
    }
    // Relative tolerance so that mathematically equal scores tie.
    if (score > best * (1.0L + 1e-15L) + 1e-300L) {
      best = score;
      best_t = t;
    }
  }
  return best_t;
}

// Central differences of f at x along every coordinate.
inline std::vector<double> NumericGradient(const std::function<double()>& f,
                                           std::span<double> x, double step = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + step;
    const double plus = f();
    x[i] = saved - step;
    const double minus = f();
    x[i] = saved;
    g[i] = (plus - minus) / (2 * step);
  }
  return g;
}

// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor). The floor keeps entries
// that are zero up to rounding from dominating.
inline double MaxRelativeError(std::span<const double> a, std::span<const double> b,
                               double floor = 1e-6) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

inline Matrix RandomMatrix(Rng& rng, int rows, int cols, double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = rng.Uniform(lo, hi);
  }
  return m;
}

// A page built from rectangular "glyph" blobs with known geometry.
struct SyntheticPage {
  BinaryImage image;
  // words[line][word] = ink width in columns, laid out left to right.
  std::vector<std::vector<int>> words;
};

// Lines are `line_height` rows of ink (with a 1-row gap between two glyph
// halves to mimic detached accents) separated by `line_gap` blank rows;
// words are made of 1-3 letter blobs with 1-2 column gaps, separated by
// `word_gap` blank columns.
inline SyntheticPage ComposePage(Rng& rng, int n_lines, int max_words, int word_gap = 12,
                                 int line_gap = 8) {
  const int line_height = 14;
  const int margin = 5;
  struct Blob {
    int col0, cols;
  };
  std::vector<std::vector<std::vector<Blob>>> layout(n_lines);
  SyntheticPage page;
  int width = 0;
  for (int l = 0; l < n_lines; ++l) {
    const int n_words = 1 + static_cast<int>(rng.Below(max_words));
    int col = margin;
    std::vector<int> widths;
    for (int w = 0; w < n_words; ++w) {
      const int letters = 1 + static_cast<int>(rng.Below(3));
      const int start = col;
      std::vector<Blob> blobs;
      for (int k = 0; k < letters; ++k) {
        const int cols = 2 + static_cast<int>(rng.Below(6));
        blobs.push_back({col, cols});
        col += cols;
        if (k + 1 < letters) col += 1 + static_cast<int>(rng.Below(2));
      }
      widths.push_back(col - start);
      layout[l].push_back(blobs);
      col += word_gap;
    }
    width = std::max(width, col - word_gap + margin);
    page.words.push_back(widths);
  }
  const int height = 2 * margin + n_lines * line_height + (n_lines - 1) * line_gap;
  page.image = BinaryImage(width, height, 0);
  for (int l = 0; l < n_lines; ++l) {
    const int row0 = margin + l * (line_height + line_gap);
    for (const auto& word : layout[l]) {
      for (const auto& b : word) {
        for (int r = row0; r < row0 + line_height; ++r) {
          if (r == row0 + 2) continue;  // detached accent row
          for (int c = b.col0; c < b.col0 + b.cols; ++c) page.image.at(r, c) = 1;
        }
      }
    }
  }
  return page;
}

}  // namespace lstmocr::oracle

#endif  // LSTMOCR_TESTS_ORACLES_H_
