#pragma once

// ASF/AMC corpus to labeled gait-cycle dataset.

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "gaitlab/asf_amc.hpp"
#include "gaitlab/cycles.hpp"
#include "gaitlab/dataset_io.hpp"
#include "gaitlab/error.hpp"
#include "gaitlab/mocap.hpp"

namespace gaitlab {

struct RawMotionFilePair {
  std::string asf;
  std::string amc;
  std::string subject;
  std::string sequence;
};

struct IngestConfig {
  Modality modality = Modality::BR;
  GaitSample exemplar;  // BR cycle, non-root channels
  CycleSearch search;
  std::optional<std::size_t> frames;  // T; default is the rounded mean cycle length
  std::size_t min_samples = 10;
  double frame_rate = 120.0;
  PrototypeOptions prototype;
};

struct FileReport {
  std::string subject;
  std::string sequence;
  std::size_t cycles = 0;
  std::string error;  // empty on success
};

struct IngestResult {
  LabeledDataset dataset;
  DatasetManifest manifest;
  std::vector<FileReport> files;

  std::size_t failures() const {
    return static_cast<std::size_t>(
        std::count_if(files.begin(), files.end(), [](const FileReport& f) { return !f.error.empty(); }));
  }
};

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoError::Kind::open, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Exemplar cycle from an AMC file (optionally a 0-based half-open frame
// range of it), reduced to normalized non-root rotation channels.
inline GaitSample load_exemplar(const Skeleton& skeleton, std::string_view amc,
                                std::optional<std::pair<std::size_t, std::size_t>> range = std::nullopt) {
  auto motion = normalize_root(skeleton, parse_amc(amc, skeleton));
  FrameMatrix channels = rotation_channels(skeleton, motion);
  if (range) {
    auto [lo, hi] = *range;
    if (!(lo < hi && hi <= static_cast<std::size_t>(channels.rows())))
      throw InvalidArgument("exemplar frame range is outside the motion");
    channels = FrameMatrix(channels.middleRows(static_cast<Eigen::Index>(lo), static_cast<Eigen::Index>(hi - lo)));
  }
  GaitSample s;
  s.frames = std::move(channels);
  s.modality = Modality::BR;
  s.subject = "exemplar";
  return s;
}

// Pairs every .amc below `root` with an .asf in its directory: "<subject>.asf"
// when present, else the directory's only .asf. "07_01.amc" is subject "07",
// sequence "07_01"; names without '_' take the directory name as subject.
inline std::vector<std::tuple<std::filesystem::path, std::filesystem::path, std::string, std::string>> discover_corpus(
    const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw IoError(IoError::Kind::open, root.string() + " is not a directory");
  std::vector<std::tuple<fs::path, fs::path, std::string, std::string>> out;
  std::vector<fs::path> amcs;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().extension() == ".amc") amcs.push_back(e.path());
  std::sort(amcs.begin(), amcs.end());
  for (const auto& amc : amcs) {
    const std::string stem = amc.stem().string();
    const auto us = stem.find('_');
    const std::string subject = us == std::string::npos ? amc.parent_path().filename().string() : stem.substr(0, us);
    fs::path asf = amc.parent_path() / (subject + ".asf");
    if (!fs::exists(asf)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(amc.parent_path()))
        if (e.path().extension() == ".asf") found.push_back(e.path());
      if (found.size() != 1)
        throw IoError(IoError::Kind::open, "cannot choose a skeleton for " + amc.string() + " (" +
                                               std::to_string(found.size()) + " .asf files beside it)");
      asf = found.front();
    }
    out.emplace_back(asf, amc, subject, stem);
  }
  return out;
}

// parse -> normalize root -> (JC: forward kinematics on the prototypical
// skeleton) -> cycle extraction -> time normalization -> subject filter.
// Files that fail are reported and skipped.
inline IngestResult build_dataset(std::vector<RawMotionFilePair> pairs, const IngestConfig& config) {
  std::sort(pairs.begin(), pairs.end(), [](const RawMotionFilePair& a, const RawMotionFilePair& b) {
    return std::tie(a.subject, a.sequence) < std::tie(b.subject, b.sequence);
  });
  IngestResult result;
  struct Parsed {
    Skeleton skeleton;
    BoneRotationSequence motion;
    std::size_t report;
  };
  std::vector<Parsed> parsed;
  std::map<std::pair<std::string, std::string>, bool> seen;
  for (const auto& p : pairs) {
    FileReport rep{p.subject, p.sequence, 0, {}};
    try {
      if (!seen.emplace(std::pair{p.subject, p.sequence}, true).second)
        throw InvalidArgument("duplicate subject/sequence pair");
      if (p.asf.empty() || p.amc.empty()) throw InvalidArgument("empty ASF or AMC text");
      Skeleton sk = [&] {
        try {
          return parse_asf(p.asf);
        } catch (const ParseError& e) {
          throw ParseError(std::string("ASF: ") + e.what());
        }
      }();
      auto motion = [&] {
        try {
          return parse_amc(p.amc, sk, config.frame_rate);
        } catch (const ParseError& e) {
          throw ParseError(std::string("AMC: ") + e.what());
        }
      }();
      motion = normalize_root(sk, std::move(motion));
      parsed.push_back({std::move(sk), std::move(motion), result.files.size()});
    } catch (const Error& e) {
      rep.error = e.what();
    }
    result.files.push_back(std::move(rep));
  }

  std::optional<Skeleton> proto;
  if (config.modality == Modality::JC && !parsed.empty()) {
    std::vector<Skeleton> all;
    for (const auto& p : parsed) all.push_back(p.skeleton);
    proto = prototypical_skeleton(all, config.prototype);
  }

  std::vector<GaitSample> cycles;
  for (auto& p : parsed) {
    auto& rep = result.files[p.report];
    try {
      auto found = extract_gait_cycles(p.skeleton, p.motion, config.exemplar, config.search, rep.subject, rep.sequence);
      for (auto& c : found) {
        if (config.modality == Modality::JC) {
          BoneRotationSequence part;
          part.frame_rate = p.motion.frame_rate;
          part.values = p.motion.values.middleRows(static_cast<Eigen::Index>(c.match.first_frame),
                                                   static_cast<Eigen::Index>(c.match.frame_count));
          c.sample.frames = forward_kinematics(*proto, part).coords;
          c.sample.modality = Modality::JC;
        }
        cycles.push_back(std::move(c.sample));
      }
      rep.cycles = found.size();
    } catch (const Error& e) {
      rep.error = e.what();
    }
  }

  DatasetManifest manifest;
  manifest.modality = config.modality;
  manifest.min_samples = config.min_samples;
  std::size_t T = 0;
  if (config.frames) {
    T = *config.frames;
  } else if (!cycles.empty()) {
    double sum = 0.0;
    for (const auto& c : cycles) sum += static_cast<double>(c.frame_count());
    T = static_cast<std::size_t>(std::llround(sum / static_cast<double>(cycles.size())));
  }
  for (auto& c : cycles) c = time_normalize(c, T);

  std::map<std::string, std::size_t> per_subject;
  for (const auto& c : cycles) ++per_subject[c.subject];
  std::vector<GaitSample> kept;
  for (auto& c : cycles)
    if (per_subject[c.subject] >= config.min_samples) kept.push_back(std::move(c));
  for (const auto& [subject, n] : per_subject) {
    if (n >= config.min_samples) manifest.subjects.push_back({subject, n});
    else manifest.excluded.push_back({subject, n});
  }
  manifest.frames = kept.empty() ? T : kept.front().frame_count();
  std::vector<std::string> channel_names;
  if (!parsed.empty())
    channel_names = config.modality == Modality::JC ? joint_channel_names(proto->joint_names())
                                                    : parsed.front().skeleton.rotation_channel_names();
  manifest.channels = kept.empty() ? channel_names.size() : kept.front().channel_count();
  manifest.notes.push_back("cycle threshold " + std::to_string(config.search.threshold) + ", window [" +
                           std::to_string(config.search.window_lo) + ", " + std::to_string(config.search.window_hi) +
                           "], stride " + std::to_string(config.search.stride));
  if (result.failures() > 0) manifest.notes.push_back(std::to_string(result.failures()) + " file(s) failed to ingest");
  result.dataset = LabeledDataset(std::move(kept), std::move(channel_names));
  result.manifest = std::move(manifest);
  return result;
}

}  // namespace gaitlab
