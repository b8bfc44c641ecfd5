/*
 * Copyright 2026 The segaug Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Fixture generators and reference implementations shared by the test
// binaries. The references deliberately take a different route from the
// library code they check.

#ifndef SEGAUG_TESTS_TEST_SUPPORT_HPP
#define SEGAUG_TESTS_TEST_SUPPORT_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "segaug/segaug.hpp"

namespace segaug::testing {

inline RasterImage random_image(Rng& rng, int w, int h) {
  RasterImage img(w, h);
  for (Color& c : img.pixels()) {
    c = Color{static_cast<std::uint8_t>(rng.below(256)),
              static_cast<std::uint8_t>(rng.below(256)),
              static_cast<std::uint8_t>(rng.below(256))};
  }
  return img;
}

/// Image with few colours drawn from `palette_size` random entries, so that
/// connected regions of various shapes appear.
inline RasterImage random_palette_image(Rng& rng, int w, int h,
                                        int palette_size) {
  std::vector<Color> palette;
  for (int i = 0; i < palette_size; ++i) {
    palette.push_back(Color{static_cast<std::uint8_t>(rng.below(256)),
                            static_cast<std::uint8_t>(rng.below(256)),
                            static_cast<std::uint8_t>(rng.below(256))});
  }
  RasterImage img(w, h);
  for (Color& c : img.pixels()) c = palette[rng.below(palette.size())];
  return img;
}

/// Colour whose channels have the low three bits clear, so quantisation
/// with the default drop_bits leaves it unchanged.
inline Color random_palette_color(Rng& rng) {
  const auto ch = [&rng] {
    return static_cast<std::uint8_t>(rng.below(31) * 8);  // 0..240
  };
  return Color{ch(), ch(), ch()};
}

/// Logo-like fixture: white canvas with random filled rectangles and discs.
inline RasterImage random_logo(Rng& rng, int w, int h, int shapes) {
  RasterImage img(w, h, kWhite);
  for (int s = 0; s < shapes; ++s) {
    const Color c = random_palette_color(rng);
    const int cx = static_cast<int>(rng.below(w));
    const int cy = static_cast<int>(rng.below(h));
    const int rx = 2 + static_cast<int>(rng.below(w / 4 + 1));
    const int ry = 2 + static_cast<int>(rng.below(h / 4 + 1));
    const bool disc = rng.bernoulli(0.5);
    for (int y = std::max(0, cy - ry); y <= std::min(h - 1, cy + ry); ++y) {
      for (int x = std::max(0, cx - rx); x <= std::min(w - 1, cx + rx); ++x) {
        const double dx = double(x - cx) / rx, dy = double(y - cy) / ry;
        if (!disc || dx * dx + dy * dy <= 1.0) img.at(x, y) = c;
      }
    }
  }
  return img;
}

// ------------------------------------------------------------ labelling

/// Union-find labelling, relabelled to raster first-encounter order.
inline std::vector<int> reference_labels(const RasterImage& img,
                                         Connectivity conn) {
  const int w = img.width(), h = img.height();
  std::vector<int> parent(img.size());
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&parent](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  const auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int i = y * w + x;
      const auto link = [&](int nx, int ny) {
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) return;
        const int j = ny * w + nx;
        if (img[i] == img[j]) unite(i, j);
      };
      link(x + 1, y);
      link(x, y + 1);
      if (conn == Connectivity::kEight) {
        link(x + 1, y + 1);
        link(x - 1, y + 1);
      }
    }
  }
  std::map<int, int> dense;
  std::vector<int> labels(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) {
    const int root = find(static_cast<int>(i));
    const auto [it, inserted] =
        dense.emplace(root, static_cast<int>(dense.size()));
    labels[i] = it->second;
  }
  return labels;
}

// ------------------------------------------------------------------- AP

/// AP without sorting: precision at positive i is
/// (1 + positives scored higher) / (1 + items scored higher).
inline double brute_force_ap(const std::vector<double>& scores,
                             const std::vector<std::uint8_t>& labels) {
  double sum = 0.0;
  int positives = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    ++positives;
    int above = 0, pos_above = 0;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (scores[j] > scores[i]) {
        ++above;
        pos_above += labels[j];
      }
    }
    sum += double(1 + pos_above) / double(1 + above);
  }
  return sum / positives;
}

/// Batch of size b with at least one positive and one negative; scores are
/// tau * U(-5, 5).
inline ScoreBatch random_gradcheck_batch(Rng& rng, std::size_t b, double tau) {
  ScoreBatch batch;
  for (std::size_t i = 0; i < b; ++i) {
    batch.scores.push_back(tau * rng.uniform(-5.0, 5.0));
    batch.labels.push_back(rng.bernoulli(0.4) ? 1 : 0);
  }
  batch.labels[0] = 1;
  batch.labels[b - 1] = 0;
  return batch;
}

/// Untied batch: scores on a shuffled 0.01 grid with jitter below 0.0025.
inline ScoreBatch random_untied_batch(Rng& rng, std::size_t b) {
  std::vector<int> slots(4 * b);
  std::iota(slots.begin(), slots.end(), 0);
  slots = rng.sample_without_replacement(std::move(slots), b);
  ScoreBatch batch;
  for (std::size_t i = 0; i < b; ++i) {
    batch.scores.push_back(slots[i] * 0.01 + rng.uniform(0.0, 0.0025));
    batch.labels.push_back(rng.bernoulli(0.5) ? 1 : 0);
  }
  batch.labels[rng.below(b)] = 1;
  return batch;
}

// ------------------------------------------------------------------ NAR

struct NaiveQuery {
  std::vector<std::string> ranking;  // listed prefix
  std::vector<std::string> relevant;
};

/// Walks every rank position 1..N; relevant documents not listed fill the
/// bottom ranks in the order given. Sum of (R_i - i) over sorted ranks.
inline double naive_nar(const NaiveQuery& q, std::size_t n) {
  std::vector<std::size_t> ranks;
  std::vector<std::string> unlisted;
  for (const std::string& doc : q.relevant) {
    bool found = false;
    for (std::size_t pos = 1; pos <= q.ranking.size(); ++pos) {
      if (q.ranking[pos - 1] == doc) {
        ranks.push_back(pos);
        found = true;
      }
    }
    if (!found) unlisted.push_back(doc);
  }
  for (std::size_t m = 0; m < unlisted.size(); ++m) ranks.push_back(n - m);
  std::sort(ranks.begin(), ranks.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    acc += double(ranks[i]) - double(i + 1);
  }
  return acc / (double(n) * double(q.relevant.size()));
}

// ----------------------------------------------------------------- files

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("segaug_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const {
    return path_ / rel;
  }

 private:
  std::filesystem::path path_;
};

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream(p, std::ios::binary) << s;
}

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

/// Runs a shell command, capturing stdout.
inline CommandResult run_command(const std::string& cmd) {
  CommandResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace segaug::testing

#endif  // SEGAUG_TESTS_TEST_SUPPORT_HPP
