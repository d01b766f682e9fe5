#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gaitlab/archive.hpp"
#include "gaitlab/error.hpp"
#include "gaitlab/mocap.hpp"

namespace gaitlab {

struct SubjectCount {
  std::string subject;
  std::size_t samples = 0;
  bool operator==(const SubjectCount&) const = default;
};

struct DatasetManifest {
  Modality modality = Modality::BR;
  std::size_t frames = 0;  // T
  std::size_t channels = 0;
  std::size_t min_samples = 0;
  std::vector<SubjectCount> subjects;  // kept
  std::vector<SubjectCount> excluded;  // dropped below min_samples
  std::vector<std::string> notes;
  std::uint32_t format_version = kArchiveVersion;

  std::size_t total_samples() const {
    std::size_t n = 0;
    for (const auto& s : subjects) n += s.samples;
    return n;
  }
};

// Manifest describing exactly the samples of `dataset`.
inline DatasetManifest describe(const LabeledDataset& dataset) {
  DatasetManifest m;
  m.modality = dataset.modality();
  m.frames = dataset.frames();
  m.channels = dataset.channels();
  for (const auto& c : dataset.classes()) m.subjects.push_back({c.label, c.members.size()});
  return m;
}

inline nlohmann::json to_json(const DatasetManifest& m) {
  auto counts = [](const std::vector<SubjectCount>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& s : v) a.push_back({{"subject", s.subject}, {"samples", s.samples}});
    return a;
  };
  return {{"modality", to_string(m.modality)}, {"frames", m.frames},          {"channels", m.channels},
          {"min_samples", m.min_samples},      {"subjects", counts(m.subjects)}, {"excluded", counts(m.excluded)},
          {"notes", m.notes},                  {"format_version", m.format_version}};
}

inline DatasetManifest manifest_from_json(const nlohmann::json& j) {
  auto counts = [](const nlohmann::json& a) {
    std::vector<SubjectCount> v;
    for (const auto& s : a) v.push_back({s.at("subject").get<std::string>(), s.at("samples").get<std::size_t>()});
    return v;
  };
  DatasetManifest m;
  m.modality = modality_from_string(j.at("modality").get<std::string>());
  m.frames = j.at("frames").get<std::size_t>();
  m.channels = j.at("channels").get<std::size_t>();
  m.min_samples = j.value("min_samples", std::size_t{0});
  m.subjects = counts(j.at("subjects"));
  m.excluded = counts(j.value("excluded", nlohmann::json::array()));
  m.notes = j.value("notes", std::vector<std::string>{});
  m.format_version = j.value("format_version", kArchiveVersion);
  return m;
}

struct StoredDataset {
  LabeledDataset dataset;
  DatasetManifest manifest;
};

inline Archive dataset_archive(const LabeledDataset& dataset, const DatasetManifest& manifest) {
  Archive a;
  nlohmann::json index = nlohmann::json::array();
  std::size_t offset = 0;
  for (const auto& s : dataset.samples()) {
    index.push_back({{"subject", s.subject},
                     {"sequence", s.sequence},
                     {"cycle", s.cycle},
                     {"offset", offset},
                     {"frames", s.frame_count()},
                     {"channels", s.channel_count()},
                     {"duration", s.duration}});
    const double* p = s.frames.data();
    a.values.insert(a.values.end(), p, p + s.frames.size());
    offset += static_cast<std::size_t>(s.frames.size());
  }
  a.header = {{"kind", "dataset"},
              {"manifest", to_json(manifest)},
              {"channel_names", dataset.channel_names()},
              {"index", std::move(index)}};
  return a;
}

inline void save_dataset(const LabeledDataset& dataset, const DatasetManifest& manifest,
                         const std::filesystem::path& path) {
  write_archive(path, dataset_archive(dataset, manifest));
}

inline void save_dataset(const LabeledDataset& dataset, const std::filesystem::path& path) {
  save_dataset(dataset, describe(dataset), path);
}

inline StoredDataset dataset_from_archive(const Archive& a) {
  try {
    if (a.header.at("kind") != "dataset") throw IoError(IoError::Kind::malformed, "archive does not hold a dataset");
    StoredDataset out;
    out.manifest = manifest_from_json(a.header.at("manifest"));
    std::vector<GaitSample> samples;
    for (const auto& e : a.header.at("index")) {
      GaitSample s;
      s.modality = out.manifest.modality;
      s.subject = e.at("subject").get<std::string>();
      s.sequence = e.at("sequence").get<std::string>();
      s.cycle = e.at("cycle").get<std::size_t>();
      s.duration = e.value("duration", 0.0);
      auto offset = e.at("offset").get<std::size_t>();
      auto frames = e.at("frames").get<std::size_t>();
      auto channels = e.at("channels").get<std::size_t>();
      if (offset + frames * channels > a.values.size())
        throw IoError(IoError::Kind::malformed, "sample index points past the value block");
      s.frames = Eigen::Map<const FrameMatrix>(a.values.data() + offset, static_cast<Eigen::Index>(frames),
                                               static_cast<Eigen::Index>(channels));
      samples.push_back(std::move(s));
    }
    out.dataset = LabeledDataset(std::move(samples), a.header.value("channel_names", std::vector<std::string>{}));
    // The manifest must agree with what was stored.
    auto recomputed = describe(out.dataset);
    if (!out.dataset.empty() &&
        (recomputed.subjects != out.manifest.subjects || recomputed.frames != out.manifest.frames ||
         recomputed.channels != out.manifest.channels))
      throw IoError(IoError::Kind::malformed, "manifest counts do not match stored samples");
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(IoError::Kind::malformed, std::string("bad dataset header: ") + e.what());
  }
}

inline StoredDataset load_dataset(const std::filesystem::path& path) {
  return dataset_from_archive(read_archive(path));
}

}  // namespace gaitlab
