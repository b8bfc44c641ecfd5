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

/**
 * @file sampler.hpp
 * @brief Mini-batch construction from a similarity manifest: four known
 *        similar images plus dissimilar filler drawn from the pool.
 */

#ifndef SEGAUG_SAMPLER_HPP
#define SEGAUG_SAMPLER_HPP

#include <cstddef>
#include <cstdint>
#include <istream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "segaug/random.hpp"

namespace segaug {

inline constexpr std::size_t kPositivesPerBatch = 4;

enum class SamplerErrorKind {
  kInvalidManifest,
  kInvalidBatchSize,
  kNoEligibleGroup,
  kInsufficientPool,
};

class SamplerError : public std::runtime_error {
 public:
  SamplerError(SamplerErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  SamplerErrorKind kind() const noexcept { return kind_; }

 private:
  SamplerErrorKind kind_;
};

struct SimilarityManifest {
  std::vector<std::vector<std::string>> groups;
  std::vector<std::string> pool;

  /// Groups of at least two members, pairwise disjoint, pool disjoint from
  /// every group, no empty or repeated ids.
  void validate() const {
    std::unordered_set<std::string> seen;
    const auto add = [&seen](const std::string& id) {
      if (id.empty()) {
        throw SamplerError(SamplerErrorKind::kInvalidManifest, "empty id");
      }
      if (!seen.insert(id).second) {
        throw SamplerError(SamplerErrorKind::kInvalidManifest,
                           "id '" + id + "' appears more than once");
      }
    };
    for (const auto& group : groups) {
      if (group.size() < 2) {
        throw SamplerError(SamplerErrorKind::kInvalidManifest,
                           "similarity groups need at least two members");
      }
      for (const auto& id : group) add(id);
    }
    for (const auto& id : pool) add(id);
  }
};

/// Text format: `[group]` opens a new similarity group and `[pool]` switches
/// to the negatives pool; one id per line; blank lines and `#` comments are
/// skipped.
inline SimilarityManifest parse_similarity_manifest(std::istream& in) {
  SimilarityManifest manifest;
  enum class Section { kNone, kGroup, kPool } section = Section::kNone;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string text = line.substr(first, last - first + 1);
    if (text[0] == '#') continue;
    if (text == "[group]") {
      manifest.groups.emplace_back();
      section = Section::kGroup;
    } else if (text == "[pool]") {
      section = Section::kPool;
    } else if (text[0] == '[') {
      throw SamplerError(SamplerErrorKind::kInvalidManifest,
                         "line " + std::to_string(line_no) +
                             ": unknown section " + text);
    } else if (section == Section::kGroup) {
      manifest.groups.back().push_back(text);
    } else if (section == Section::kPool) {
      manifest.pool.push_back(text);
    } else {
      throw SamplerError(SamplerErrorKind::kInvalidManifest,
                         "line " + std::to_string(line_no) +
                             ": id outside of a [group] or [pool] section");
    }
  }
  manifest.validate();
  return manifest;
}

inline SimilarityManifest parse_similarity_manifest(const std::string& text) {
  std::istringstream in(text);
  return parse_similarity_manifest(in);
}

struct BatchSpec {
  std::vector<std::string> positives;
  std::vector<std::string> negatives;

  std::size_t size() const noexcept {
    return positives.size() + negatives.size();
  }
};

/// Uniform group among those with >= 4 members, 4 of its members and
/// batch_size - 4 pool ids, all without replacement.
inline BatchSpec sample_batch(const SimilarityManifest& manifest,
                              std::size_t batch_size, Rng& rng) {
  if (batch_size < kPositivesPerBatch + 1) {
    throw SamplerError(SamplerErrorKind::kInvalidBatchSize,
                       "batch size must be at least 5");
  }
  std::vector<std::size_t> eligible;
  for (std::size_t g = 0; g < manifest.groups.size(); ++g) {
    if (manifest.groups[g].size() >= kPositivesPerBatch) eligible.push_back(g);
  }
  if (eligible.empty()) {
    throw SamplerError(SamplerErrorKind::kNoEligibleGroup,
                       "no similarity group has at least 4 members");
  }
  const std::size_t num_negatives = batch_size - kPositivesPerBatch;
  if (manifest.pool.size() < num_negatives) {
    throw SamplerError(SamplerErrorKind::kInsufficientPool,
                       "pool has " + std::to_string(manifest.pool.size()) +
                           " ids, batch needs " +
                           std::to_string(num_negatives));
  }

  const auto& group = manifest.groups[eligible[rng.below(eligible.size())]];
  const auto pick = [&rng](const std::vector<std::string>& ids,
                           std::size_t k) {
    std::vector<std::size_t> idx(ids.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::vector<std::string> out;
    out.reserve(k);
    for (std::size_t i : rng.sample_without_replacement(std::move(idx), k)) {
      out.push_back(ids[i]);
    }
    return out;
  };
  BatchSpec spec;
  spec.positives = pick(group, kPositivesPerBatch);
  spec.negatives = pick(manifest.pool, num_negatives);
  return spec;
}

/// 1 for each positive then 0 for each negative.
inline std::vector<std::uint8_t> batch_labels(const BatchSpec& spec) {
  std::vector<std::uint8_t> labels(spec.positives.size(), 1);
  labels.resize(spec.size(), 0);
  return labels;
}

/// `p1,p2,p3,p4|n1,n2,...`
inline std::string format_batch_line(const BatchSpec& spec) {
  std::string out;
  for (std::size_t i = 0; i < spec.positives.size(); ++i) {
    if (i) out += ',';
    out += spec.positives[i];
  }
  out += '|';
  for (std::size_t i = 0; i < spec.negatives.size(); ++i) {
    if (i) out += ',';
    out += spec.negatives[i];
  }
  return out;
}

}  // namespace segaug

#endif  // SEGAUG_SAMPLER_HPP
