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

// segaug: segment-level logo augmentation, ranking-loss checks, mini-batch
// sampling and retrieval evaluation from the command line.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "segaug/segaug.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitGradientMismatch = 3;
constexpr double kGradientTolerance = 1e-4;

/// `key=value` overrides from a config file, applied after flag parsing so
/// the file wins over the command line.
using Setters = std::map<std::string, std::function<void(const std::string&)>>;

void apply_config_file(const std::string& path, const Setters& setters) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected key=value");
    }
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": unknown key '" + key + "'");
    }
    try {
      it->second(value);
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": bad value for '" + key + "': " + e.what());
    }
  }
}

template <typename T>
std::function<void(const std::string&)> setter(T& target) {
  return [&target](const std::string& value) {
    if constexpr (std::is_same_v<T, std::string>) {
      target = value;
    } else {
      std::istringstream in(value);
      T parsed{};
      if (!(in >> parsed) || !(in >> std::ws).eof()) {
        throw std::runtime_error("cannot parse '" + value + "'");
      }
      target = parsed;
    }
  };
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// ---------------------------------------------------------------- augment

struct AugmentOptions {
  std::string in_dir;
  std::string out_dir;
  std::string manifest;
  std::string debug_dir;
  std::string config;
  std::string preset = "smooth-ap";
  std::string transforms;
  std::string n_policy = "third";
  std::string connectivity = "8";
  double p = 0.5;
  int drop_bits = segaug::kDefaultDropBits;
  std::size_t min_area = segaug::kDefaultMinArea;
  double rotation_min = -90.0;
  double rotation_max = 90.0;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

segaug::AugmentationConfig build_augment_config(const AugmentOptions& opt) {
  segaug::AugmentationConfig config;
  config.p = opt.p;
  config.drop_bits = opt.drop_bits;
  config.min_area = opt.min_area;
  config.rotation_min_deg = opt.rotation_min;
  config.rotation_max_deg = opt.rotation_max;
  config.seed = opt.seed;

  if (opt.connectivity == "8" || opt.connectivity == "eight") {
    config.connectivity = segaug::Connectivity::kEight;
  } else if (opt.connectivity == "4" || opt.connectivity == "four") {
    config.connectivity = segaug::Connectivity::kFour;
  } else {
    throw std::runtime_error("connectivity must be 4 or 8");
  }

  if (opt.n_policy == "third") {
    config.n_policy = segaug::SegmentCountPolicy::third_of_l();
  } else if (opt.n_policy == "half") {
    config.n_policy = segaug::SegmentCountPolicy::half_of_l();
  } else {
    std::size_t k = 0;
    std::istringstream in(opt.n_policy);
    if (!(in >> k) || !in.eof() || k == 0) {
      throw std::runtime_error("n must be 'third', 'half' or a positive count");
    }
    config.n_policy = segaug::SegmentCountPolicy::fixed(k);
  }

  config.transforms = {};
  if (opt.transforms.empty()) {
    if (opt.preset == "smooth-ap") {
      config.transforms = {segaug::Transform::kColorChange};
    } else if (opt.preset == "triplet") {
      config.transforms = {segaug::Transform::kColorChange,
                           segaug::Transform::kRemoval};
    } else {
      throw std::runtime_error("preset must be 'smooth-ap' or 'triplet'");
    }
  } else {
    for (const std::string& name : split_list(opt.transforms)) {
      const auto t = segaug::parse_transform(name);
      if (!t) throw std::runtime_error("unknown transform '" + name + "'");
      config.transforms.insert(*t);
    }
  }
  config.validate();
  return config;
}

bool is_supported_image(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".ppm" || ext == ".pnm";
}

struct FileOutcome {
  std::string manifest_line;
  std::string error;
};

FileOutcome augment_one(const AugmentOptions& opt,
                        const segaug::AugmentationConfig& base,
                        const std::string& rel) {
  FileOutcome outcome;
  try {
    const fs::path src = fs::path(opt.in_dir) / rel;
    const fs::path dst = fs::path(opt.out_dir) / rel;
    segaug::AugmentationConfig config = base;
    config.seed = segaug::hash64(opt.seed, rel);
    const segaug::RasterImage image = segaug::load_image(src);
    const segaug::AugmentationResult result =
        segaug::augment_image(image, config, rel);
    fs::create_directories(dst.parent_path());
    segaug::save_image(result.image, dst);
    if (!opt.debug_dir.empty()) {
      const segaug::SegmentMap map =
          segaug::segment_image(image, config.drop_bits, config.connectivity);
      const fs::path base_path = fs::path(opt.debug_dir) / rel;
      fs::create_directories(base_path.parent_path());
      segaug::save_image(segaug::render_labels(map),
                         base_path.string() + ".labels.png");
      std::ofstream(base_path.string() + ".segments.txt")
          << segaug::segment_report(map);
    }
    outcome.manifest_line = segaug::manifest_line(
        {src.generic_string(), dst.generic_string(), result.record});
  } catch (const std::exception& e) {
    outcome.error = e.what();
  }
  return outcome;
}

int run_augment(const AugmentOptions& cli_opt) {
  AugmentOptions opt = cli_opt;
  if (!opt.config.empty()) {
    const Setters setters{
        {"p", setter(opt.p)},
        {"n", setter(opt.n_policy)},
        {"transforms", setter(opt.transforms)},
        {"preset", setter(opt.preset)},
        {"drop-bits", setter(opt.drop_bits)},
        {"connectivity", setter(opt.connectivity)},
        {"min-area", setter(opt.min_area)},
        {"rotation-min", setter(opt.rotation_min)},
        {"rotation-max", setter(opt.rotation_max)},
        {"seed", setter(opt.seed)},
        {"jobs", setter(opt.jobs)},
    };
    apply_config_file(opt.config, setters);
  }
  const segaug::AugmentationConfig config = build_augment_config(opt);
  if (!fs::is_directory(opt.in_dir)) {
    throw std::runtime_error("input directory " + opt.in_dir +
                             " is not readable");
  }
  fs::create_directories(opt.out_dir);

  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(opt.in_dir)) {
    if (entry.is_regular_file() && is_supported_image(entry.path())) {
      files.push_back(
          fs::relative(entry.path(), opt.in_dir).generic_string());
    }
  }
  std::sort(files.begin(), files.end());

  std::vector<FileOutcome> outcomes(files.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      outcomes[i] = augment_one(opt, config, files[i]);
    }
  };
  const unsigned jobs = std::max(1u, opt.jobs);
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  const fs::path manifest_path = opt.manifest.empty()
                                     ? fs::path(opt.out_dir) / "manifest.jsonl"
                                     : fs::path(opt.manifest);
  std::ofstream manifest(manifest_path, std::ios::binary | std::ios::trunc);
  if (!manifest) {
    throw std::runtime_error("cannot write manifest " +
                             manifest_path.string());
  }
  std::size_t failed = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!outcomes[i].error.empty()) {
      ++failed;
      std::cerr << "segaug: " << files[i] << ": " << outcomes[i].error << '\n';
      continue;
    }
    manifest << outcomes[i].manifest_line << '\n';
  }
  std::cerr << "segaug: augmented " << files.size() - failed << " of "
            << files.size() << " images";
  if (failed) std::cerr << ", " << failed << " failed";
  std::cerr << '\n';
  return failed == 0 ? kExitOk : kExitFailure;
}

// ------------------------------------------------------------------- eval

struct EvalOptions {
  std::string run_file;
  std::string rel_file;
  std::string config;
  std::string ks = "1,8";
  std::string recall_mode = "hit";
  std::string missing = "pessimistic";
};

int run_eval(const EvalOptions& cli_opt) {
  EvalOptions opt = cli_opt;
  if (!opt.config.empty()) {
    apply_config_file(opt.config, {{"k", setter(opt.ks)},
                                   {"recall-mode", setter(opt.recall_mode)},
                                   {"missing", setter(opt.missing)}});
  }
  std::vector<std::size_t> ks;
  for (const std::string& k : split_list(opt.ks)) {
    std::size_t value = 0;
    std::istringstream in(k);
    if (!(in >> value) || !in.eof() || value == 0) {
      throw std::runtime_error("K values must be positive integers");
    }
    ks.push_back(value);
  }
  segaug::RecallMode mode;
  if (opt.recall_mode == "hit") {
    mode = segaug::RecallMode::kHit;
  } else if (opt.recall_mode == "fraction") {
    mode = segaug::RecallMode::kFraction;
  } else {
    throw std::runtime_error("recall mode must be 'hit' or 'fraction'");
  }
  segaug::MissingPolicy policy;
  if (opt.missing == "pessimistic") {
    policy = segaug::MissingPolicy::kPessimistic;
  } else if (opt.missing == "error") {
    policy = segaug::MissingPolicy::kError;
  } else {
    throw std::runtime_error("missing policy must be 'pessimistic' or 'error'");
  }

  std::ifstream run_in(opt.run_file);
  if (!run_in) throw std::runtime_error("cannot open " + opt.run_file);
  std::ifstream rel_in(opt.rel_file);
  if (!rel_in) throw std::runtime_error("cannot open " + opt.rel_file);

  segaug::RankingRun run;
  try {
    run = segaug::parse_run(run_in);
  } catch (const segaug::EvalError& e) {
    throw std::runtime_error(opt.run_file + ": " + e.what());
  }
  segaug::RelevanceSet rel;
  try {
    rel = segaug::parse_relevance(rel_in);
  } catch (const segaug::EvalError& e) {
    throw std::runtime_error(opt.rel_file + ": " + e.what());
  }
  const segaug::EvalReport report =
      segaug::evaluate(run, rel, ks, policy, mode);
  std::cout << segaug::format_report(report);
  if (report.missing_total > 0) {
    std::cerr << "segaug: warning: " << report.missing_total
              << " relevant documents missing from the run were ranked "
                 "pessimistically\n";
  }
  return kExitOk;
}

// ------------------------------------------------------------- loss-check

struct LossCheckOptions {
  std::string batch_file;
  std::string config;
  double tau = segaug::kDefaultTau;
  double h = 1e-5;
};

segaug::ScoreBatch read_score_batch(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  segaug::ScoreBatch batch;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double score = 0.0;
    int label = 0;
    if (!(fields >> score)) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": expected 'score label'");
    }
    if (!(fields >> label) || !(fields >> std::ws).eof() ||
        (label != 0 && label != 1)) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": expected 'score label' with label 0 or 1");
    }
    batch.scores.push_back(score);
    batch.labels.push_back(static_cast<std::uint8_t>(label));
  }
  return batch;
}

int run_loss_check(const LossCheckOptions& cli_opt) {
  LossCheckOptions opt = cli_opt;
  if (!opt.config.empty()) {
    apply_config_file(opt.config, {{"tau", setter(opt.tau)},
                                   {"step", setter(opt.h)}});
  }
  if (!(opt.h > 0)) throw std::runtime_error("step must be positive");
  const segaug::ScoreBatch batch = read_score_batch(opt.batch_file);
  const segaug::SmoothApParams params{opt.tau};
  const segaug::LossGradient lg = segaug::smooth_ap_loss(batch, params);
  const segaug::GradCheckReport check =
      segaug::smooth_ap_grad_check(batch, params, opt.h);

  std::printf("items=%zu positives=%zu tau=%.17g h=%.17g\n", batch.size(),
              batch.positives(), opt.tau, opt.h);
  std::printf("loss=%.17g\n", lg.loss);
  try {
    std::printf("exact_ap=%.17g\n", segaug::exact_ap(batch));
  } catch (const segaug::LossError&) {
    std::printf("exact_ap=tied\n");
  }
  for (std::size_t i = 0; i < lg.grad.size(); ++i) {
    std::printf("grad[%zu]=%.17g numeric=%.17g\n", i, lg.grad[i],
                check.numeric[i]);
  }
  const bool ok = check.max_rel_error <= kGradientTolerance;
  std::printf("max_rel_error=%.6g worst_index=%zu status=%s\n",
              check.max_rel_error, check.worst_index, ok ? "PASS" : "FAIL");
  return ok ? kExitOk : kExitGradientMismatch;
}

// --------------------------------------------------------- sample-batches

struct SampleOptions {
  std::string manifest_file;
  std::string output;
  std::string config;
  std::size_t batch_size = 256;
  std::size_t count = 1;
  std::uint64_t seed = 0;
};

int run_sample_batches(const SampleOptions& cli_opt) {
  SampleOptions opt = cli_opt;
  if (!opt.config.empty()) {
    apply_config_file(opt.config, {{"batch-size", setter(opt.batch_size)},
                                   {"count", setter(opt.count)},
                                   {"seed", setter(opt.seed)}});
  }
  std::ifstream in(opt.manifest_file);
  if (!in) throw std::runtime_error("cannot open " + opt.manifest_file);
  const segaug::SimilarityManifest manifest =
      segaug::parse_similarity_manifest(in);

  std::ofstream file;
  if (!opt.output.empty()) {
    file.open(opt.output, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot write " + opt.output);
  }
  std::ostream& out = opt.output.empty() ? std::cout : file;
  segaug::Rng rng(opt.seed);
  for (std::size_t i = 0; i < opt.count; ++i) {
    out << segaug::format_batch_line(
               segaug::sample_batch(manifest, opt.batch_size, rng))
        << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Segment-level logo augmentation and retrieval tooling"};
  app.require_subcommand(1);

  AugmentOptions aug;
  auto* augment = app.add_subcommand(
      "augment", "Augment every PNG/PPM under a directory");
  augment->add_option("in_dir", aug.in_dir, "Input image directory")
      ->required();
  augment->add_option("out_dir", aug.out_dir, "Output directory")->required();
  augment->add_option("--p", aug.p, "Probability of applying each transform")
      ->check(CLI::Range(0.0, 1.0));
  augment->add_option("--n", aug.n_policy,
                      "Segments per image: third, half or a fixed count");
  augment->add_option("--transforms", aug.transforms,
                      "Comma list of color_change,rotation,removal "
                      "(overrides --preset)");
  augment->add_option("--preset", aug.preset,
                      "smooth-ap (color_change) or triplet "
                      "(color_change,removal)");
  augment->add_option("--drop-bits", aug.drop_bits,
                      "Low bits dropped per channel before labelling")
      ->check(CLI::Range(0, 7));
  augment->add_option("--connectivity", aug.connectivity, "4 or 8");
  augment->add_option("--min-area", aug.min_area,
                      "Smallest segment area eligible for selection");
  augment->add_option("--rotation-min", aug.rotation_min,
                      "Lower rotation bound in degrees");
  augment->add_option("--rotation-max", aug.rotation_max,
                      "Upper rotation bound in degrees");
  augment->add_option("--seed", aug.seed, "Master seed")
      ->envname("SEGAUG_SEED");
  augment->add_option("--jobs", aug.jobs, "Worker threads")
      ->check(CLI::Range(1u, 1024u));
  augment->add_option("--manifest", aug.manifest,
                      "Manifest path (default <out_dir>/manifest.jsonl)");
  augment->add_option("--debug-dir", aug.debug_dir,
                      "Write label images and segment reports here");
  augment->add_option("--config", aug.config,
                      "key=value file overriding the flags");

  EvalOptions ev;
  auto* eval = app.add_subcommand("eval", "Compute NAR and Recall@K");
  eval->add_option("run_file", ev.run_file, "Ranking run file")->required();
  eval->add_option("rel_file", ev.rel_file, "Relevance file")->required();
  eval->add_option("--k", ev.ks, "Comma list of K values");
  eval->add_option("--recall-mode", ev.recall_mode, "hit or fraction");
  eval->add_option("--missing", ev.missing, "pessimistic or error");
  eval->add_option("--config", ev.config,
                   "key=value file overriding the flags");

  LossCheckOptions lc;
  auto* loss = app.add_subcommand(
      "loss-check", "Smooth-AP loss, gradient and finite-difference check");
  loss->add_option("batch_file", lc.batch_file, "Lines of 'score label'")
      ->required();
  loss->add_option("--tau", lc.tau, "Sigmoid temperature")
      ->check(CLI::PositiveNumber);
  loss->add_option("--step", lc.h, "Finite-difference step")
      ->check(CLI::PositiveNumber);
  loss->add_option("--config", lc.config,
                   "key=value file overriding the flags");

  SampleOptions so;
  auto* sample = app.add_subcommand(
      "sample-batches", "Draw mini-batches from a similarity manifest");
  sample->add_option("manifest_file", so.manifest_file,
                     "Similarity manifest")
      ->required();
  sample->add_option("--batch-size", so.batch_size, "Items per batch (>= 5)");
  sample->add_option("--count", so.count, "Number of batches");
  sample->add_option("--seed", so.seed, "Seed")->envname("SEGAUG_SEED");
  sample->add_option("--out", so.output, "Output file (default stdout)");
  sample->add_option("--config", so.config,
                     "key=value file overriding the flags");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*augment) return run_augment(aug);
    if (*eval) return run_eval(ev);
    if (*loss) return run_loss_check(lc);
    if (*sample) return run_sample_batches(so);
  } catch (const std::exception& e) {
    std::cerr << "segaug: error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
