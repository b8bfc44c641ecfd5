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

#ifndef SEGAUG_MANIFEST_HPP
#define SEGAUG_MANIFEST_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"
#include "segaug/augment.hpp"
#include "segaug/random.hpp"

namespace segaug {

/// One line of the augmentation manifest.
struct ManifestEntry {
  std::string src;
  std::string dst;
  AugmentationRecord record;
};

inline nlohmann::ordered_json decision_params_to_json(const DecisionParams& p) {
  using nlohmann::ordered_json;
  if (const auto* c = std::get_if<Color>(&p)) {
    return ordered_json::array({c->r, c->g, c->b});
  }
  if (const auto* angle = std::get_if<double>(&p)) return *angle;
  if (std::holds_alternative<SkippedLargest>(p)) {
    return ordered_json{{"skipped", "largest_segment"}};
  }
  return nullptr;
}

/// Single-line JSON object with keys src, dst, seed, rng, decisions.
inline std::string manifest_line(const ManifestEntry& entry) {
  nlohmann::ordered_json j;
  j["src"] = entry.src;
  j["dst"] = entry.dst;
  j["seed"] = entry.record.seed;
  j["rng"] = std::string(Rng::kAlgorithm);
  auto& decisions = j["decisions"] = nlohmann::ordered_json::array();
  for (const Decision& d : entry.record.decisions) {
    nlohmann::ordered_json dj;
    dj["segment_id"] = d.segment_id;
    dj["transform"] = std::string(transform_name(d.transform));
    dj["params"] = decision_params_to_json(d.params);
    dj["applied"] = d.applied;
    decisions.push_back(std::move(dj));
  }
  return j.dump();
}

inline ManifestEntry parse_manifest_line(std::string_view line) {
  const auto j = nlohmann::json::parse(line);
  ManifestEntry entry;
  entry.src = j.at("src").get<std::string>();
  entry.dst = j.at("dst").get<std::string>();
  entry.record.source = entry.src;
  entry.record.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& dj : j.at("decisions")) {
    Decision d;
    d.segment_id = dj.at("segment_id").get<int>();
    const auto t = parse_transform(dj.at("transform").get<std::string>());
    if (!t) throw std::runtime_error("unknown transform in manifest");
    d.transform = *t;
    d.applied = dj.at("applied").get<bool>();
    const auto& pj = dj.at("params");
    if (pj.is_array()) {
      d.params = Color{pj.at(0).get<std::uint8_t>(), pj.at(1).get<std::uint8_t>(),
                       pj.at(2).get<std::uint8_t>()};
    } else if (pj.is_number()) {
      d.params = pj.get<double>();
    } else if (pj.is_object()) {
      d.params = SkippedLargest{};
    }
    entry.record.decisions.push_back(d);
  }
  return entry;
}

}  // namespace segaug

#endif  // SEGAUG_MANIFEST_HPP
