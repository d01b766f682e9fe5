#pragma once

// Fixtures shared by the test suites.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gaitlab/gaitlab.hpp"

namespace fixtures {

using namespace gaitlab;

// Dataset of 1-frame samples; each entry is (label, values).
inline LabeledDataset vectors(const std::vector<std::pair<std::string, std::vector<double>>>& rows) {
  std::vector<GaitSample> samples;
  std::size_t k = 0;
  for (const auto& [label, values] : rows) {
    GaitSample s;
    s.frames = FrameMatrix(1, static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) s.frames(0, static_cast<Eigen::Index>(i)) = values[i];
    s.subject = label;
    s.sequence = label + "_" + std::to_string(k++);
    samples.push_back(std::move(s));
  }
  return LabeledDataset(std::move(samples));
}

// Class c has mean offset drawn at scale `spread`, samples unit-variance
// around it. Sizes are drawn in [min_size, max_size].
inline LabeledDataset random_dataset(std::mt19937_64& rng, std::size_t D, std::size_t C, std::size_t min_size,
                                     std::size_t max_size, double spread = 3.0) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> size(min_size, max_size);
  std::vector<GaitSample> samples;
  for (std::size_t c = 0; c < C; ++c) {
    Eigen::VectorXd mean(static_cast<Eigen::Index>(D));
    for (auto& v : mean) v = spread * normal(rng);
    const std::size_t n = size(rng);
    for (std::size_t i = 0; i < n; ++i) {
      GaitSample s;
      s.frames = FrameMatrix(1, static_cast<Eigen::Index>(D));
      for (std::size_t d = 0; d < D; ++d) s.frames(0, static_cast<Eigen::Index>(d)) = mean[static_cast<Eigen::Index>(d)] + normal(rng);
      s.subject = "c" + std::to_string(c);
      s.sequence = s.subject + "_" + std::to_string(i);
      samples.push_back(std::move(s));
    }
  }
  return LabeledDataset(std::move(samples));
}

struct AsfBone {
  const char* name;
  const char* parent;
  double dx, dy, dz, length;
  const char* dofs;
};

// The 30 non-root bones of the CMU skeleton with simplified geometry.
inline const std::vector<AsfBone>& cmu_bones() {
  static const std::vector<AsfBone> bones{
      {"lhipjoint", "root", 0.6, -0.7, 0.3, 2.4, ""},       {"lfemur", "lhipjoint", 0.34, -0.94, 0, 7.1, "rx ry rz"},
      {"ltibia", "lfemur", 0.34, -0.94, 0, 7.3, "rx"},        {"lfoot", "ltibia", 0, -0.2, 0.98, 2.3, "rx rz"},
      {"ltoes", "lfoot", 0, 0, 1, 1.1, "rx"},                {"rhipjoint", "root", -0.6, -0.7, 0.3, 2.4, ""},
      {"rfemur", "rhipjoint", -0.34, -0.94, 0, 7.1, "rx ry rz"}, {"rtibia", "rfemur", -0.34, -0.94, 0, 7.3, "rx"},
      {"rfoot", "rtibia", 0, -0.2, 0.98, 2.3, "rx rz"},       {"rtoes", "rfoot", 0, 0, 1, 1.1, "rx"},
      {"lowerback", "root", 0, 1, 0, 2.0, "rx ry rz"},        {"upperback", "lowerback", 0, 1, 0, 2.0, "rx ry rz"},
      {"thorax", "upperback", 0, 1, 0, 2.0, "rx ry rz"},      {"lowerneck", "thorax", 0, 1, 0, 1.6, "rx ry rz"},
      {"upperneck", "lowerneck", 0, 1, 0, 1.6, "rx ry rz"},   {"head", "upperneck", 0, 1, 0, 1.5, "rx ry rz"},
      {"lclavicle", "thorax", 0.9, 0.4, 0, 3.5, "ry rz"},     {"lhumerus", "lclavicle", 1, 0, 0, 5.0, "rx ry rz"},
      {"lradius", "lhumerus", 1, 0, 0, 3.4, "rx"},            {"lwrist", "lradius", 1, 0, 0, 1.7, "ry"},
      {"lhand", "lwrist", 1, 0, 0, 0.7, "rx rz"},             {"lfingers", "lhand", 1, 0, 0, 0.6, "rx"},
      {"lthumb", "lwrist", 0.7, 0, 0.7, 0.8, "rx rz"},        {"rclavicle", "thorax", -0.9, 0.4, 0, 3.5, "ry rz"},
      {"rhumerus", "rclavicle", -1, 0, 0, 5.0, "rx ry rz"},   {"rradius", "rhumerus", -1, 0, 0, 3.4, "rx"},
      {"rwrist", "rradius", -1, 0, 0, 1.7, "ry"},             {"rhand", "rwrist", -1, 0, 0, 0.7, "rx rz"},
      {"rfingers", "rhand", -1, 0, 0, 0.6, "rx"},             {"rthumb", "rwrist", -0.7, 0, 0.7, 0.8, "rx rz"}};
  return bones;
}

// CMU-layout ASF; `scale` multiplies every bone length.
inline std::string cmu_asf(double scale = 1.0) {
  std::ostringstream out;
  out.precision(17);
  out << "# synthetic CMU-layout skeleton\n:version 1.10\n:name test\n:units\n  mass 1.0\n  length 0.45\n  angle deg\n"
      << ":documentation\n  generated for tests\n"
      << ":root\n  order TX TY TZ RX RY RZ\n  axis XYZ\n  position 0 0 0\n  orientation 0 0 0\n:bonedata\n";
  int id = 1;
  for (const auto& b : cmu_bones()) {
    out << "  begin\n     id " << id++ << "\n     name " << b.name << "\n     direction " << b.dx << " " << b.dy << " "
        << b.dz << "\n     length " << b.length * scale << "\n     axis 0 0 0 XYZ\n";
    if (*b.dofs) {
      std::istringstream d(b.dofs);
      std::string tok;
      std::size_t n = 0;
      out << "    dof";
      while (d >> tok) {
        out << " " << tok;
        ++n;
      }
      out << "\n    limits";
      for (std::size_t i = 0; i < n; ++i) out << (i ? "            " : " ") << "(-180.0 180.0)\n";
    }
    out << "  end\n";
  }
  out << ":hierarchy\n  begin\n";
  std::vector<std::string> parents{"root"};
  for (const auto& b : cmu_bones())
    if (std::find(parents.begin(), parents.end(), b.parent) == parents.end()) parents.push_back(b.parent);
  for (const auto& p : parents) {
    out << "    " << p;
    for (const auto& b : cmu_bones())
      if (p == b.parent) out << " " << b.name;
    out << "\n";
  }
  out << "  end\n";
  return out.str();
}

// Periodic walk on the CMU-layout skeleton: hips and knees swing with the
// given period (frames); `style` perturbs amplitudes per subject. Root
// channels carry a forward translation that normalization must remove.
inline std::string walking_amc(const Skeleton& sk, std::size_t frames, double period, double style = 0.0,
                               double phase = 0.0) {
  std::ostringstream out;
  out.precision(17);
  out << ":FULLY-SPECIFIED\n:DEGREES\n";
  for (std::size_t f = 0; f < frames; ++f) {
    const double w = 2.0 * std::numbers::pi * (static_cast<double>(f) / period) + phase;
    out << f + 1 << "\n";
    for (const auto& b : sk.bones()) {
      if (b.dofs.empty()) continue;
      out << b.name;
      for (std::size_t k = 0; k < b.dofs.size(); ++k) {
        double v = 0.0;
        if (b.name == "root") {
          const double root[6] = {0.1 * static_cast<double>(f), 17.0, 0.5 * std::sin(w), 2.0, 90.0, 1.0};
          v = root[k];
        } else if (b.name == "lfemur" && k == 0) {
          v = (30.0 + 5.0 * style) * std::sin(w);
        } else if (b.name == "rfemur" && k == 0) {
          v = (30.0 + 5.0 * style) * std::sin(w + std::numbers::pi);
        } else if (b.name == "ltibia") {
          v = (20.0 + 3.0 * style) * (1.0 + std::sin(w - 1.0));
        } else if (b.name == "rtibia") {
          v = (20.0 + 3.0 * style) * (1.0 + std::sin(w - 1.0 + std::numbers::pi));
        } else if (b.name == "lhumerus" && k == 0) {
          v = (15.0 + 4.0 * style) * std::sin(w + std::numbers::pi);
        } else if (b.name == "rhumerus" && k == 0) {
          v = (15.0 + 4.0 * style) * std::sin(w);
        } else if (b.name == "lowerback" && k == 1) {
          v = (3.0 + style) * std::sin(w);
        }
        out << " " << v;
      }
      out << "\n";
    }
  }
  return out.str();
}

// Scoped temporary directory.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path = std::filesystem::temp_directory_path() / ("gaitlab_test_" + std::to_string(rng()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

}  // namespace fixtures
