#pragma once

// Synthetic joint-coordinate gait datasets with controllable identity
// structure. Not realistic motion; a ground truth for recognition tests.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "gaitlab/error.hpp"
#include "gaitlab/mocap.hpp"

namespace gaitlab {

// CMU skeleton joints in depth-first order; synthetic datasets use a prefix.
inline const std::vector<std::string>& cmu_joint_names() {
  static const std::vector<std::string> names{
      "root",      "lhipjoint", "lfemur",   "ltibia",   "lfoot",     "ltoes",     "rhipjoint", "rfemur",
      "rtibia",    "rfoot",     "rtoes",    "lowerback", "upperback", "thorax",   "lowerneck", "upperneck",
      "head",      "lclavicle", "lhumerus", "lradius",  "lwrist",    "lhand",     "lfingers",  "lthumb",
      "rclavicle", "rhumerus",  "rradius",  "rwrist",   "rhand",     "rfingers",  "rthumb"};
  return names;
}

struct SynthSpec {
  std::size_t classes = 20;
  std::size_t samples_per_class = 20;
  std::size_t joints = 15;
  std::size_t frames = 100;
  // Identity signal: per channel, `harmonics` sinusoids whose amplitude and
  // phase depend on the identity. Each identity is a point in a
  // 2*harmonics dimensional space shared by all channels.
  std::size_t harmonics = 3;
  // Noise standard deviation relative to the RMS spread of the identity
  // signals across identities.
  double noise = 0.1;
  std::size_t sequences_per_class = 4;  // samples are dealt to sequences round-robin
  std::uint64_t seed = 1;
};

struct SynthDataset {
  LabeledDataset dataset;
  double signal_spread = 0.0;  // RMS std across identities of the noiseless signal
  double noise_sigma = 0.0;    // absolute noise standard deviation
};

inline SynthDataset synthesize(const SynthSpec& spec) {
  if (spec.classes < 2) throw InvalidArgument("synthetic dataset needs at least 2 classes");
  if (spec.samples_per_class < 2) throw InvalidArgument("synthetic dataset needs at least 2 samples per class");
  if (spec.joints < 1 || spec.joints > cmu_joint_names().size())
    throw InvalidArgument("joint count must lie in [1, " + std::to_string(cmu_joint_names().size()) + "]");
  if (spec.frames < 2) throw InvalidArgument("synthetic cycles need at least 2 frames");
  if (spec.harmonics < 1) throw InvalidArgument("identity signal needs at least 1 harmonic");
  if (!(spec.noise >= 0.0)) throw InvalidArgument("noise must be non-negative");
  if (spec.sequences_per_class < 1) throw InvalidArgument("need at least 1 sequence per class");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> amplitude(0.5, 1.5);

  const auto T = static_cast<Eigen::Index>(spec.frames);
  const auto D = static_cast<Eigen::Index>(3 * spec.joints);
  const auto H = spec.harmonics;

  // Shared structure: a mean gait and per-channel loadings of every harmonic.
  FrameMatrix mean(T, D);
  std::vector<double> load(static_cast<std::size_t>(D) * H), shift(static_cast<std::size_t>(D) * H);
  for (Eigen::Index c = 0; c < D; ++c) {
    const double a1 = 5.0 * amplitude(rng), a2 = 2.0 * amplitude(rng), p1 = phase(rng), p2 = phase(rng);
    const double offset = 10.0 * normal(rng);
    for (Eigen::Index t = 0; t < T; ++t) {
      const double u = static_cast<double>(t) / static_cast<double>(T - 1);
      mean(t, c) = offset + a1 * std::sin(2.0 * std::numbers::pi * u + p1) + a2 * std::sin(4.0 * std::numbers::pi * u + p2);
    }
    for (std::size_t h = 0; h < H; ++h) {
      load[static_cast<std::size_t>(c) * H + h] = normal(rng);
      shift[static_cast<std::size_t>(c) * H + h] = phase(rng);
    }
  }

  std::vector<FrameMatrix> base(spec.classes);
  for (auto& b : base) {
    std::vector<double> amp(H), ph(H);
    for (std::size_t h = 0; h < H; ++h) {
      amp[h] = amplitude(rng);
      ph[h] = phase(rng);
    }
    b = mean;
    for (Eigen::Index c = 0; c < D; ++c)
      for (std::size_t h = 0; h < H; ++h) {
        const double l = load[static_cast<std::size_t>(c) * H + h], s = shift[static_cast<std::size_t>(c) * H + h];
        for (Eigen::Index t = 0; t < T; ++t) {
          const double u = static_cast<double>(t) / static_cast<double>(T - 1);
          b(t, c) += amp[h] * l * std::sin(2.0 * std::numbers::pi * static_cast<double>(h + 1) * u + ph[h] + s);
        }
      }
  }

  FrameMatrix centroid = FrameMatrix::Zero(T, D);
  for (const auto& b : base) centroid += b;
  centroid /= static_cast<double>(spec.classes);
  double var = 0.0;
  for (const auto& b : base) var += (b - centroid).squaredNorm();
  SynthDataset out;
  out.signal_spread = std::sqrt(var / static_cast<double>(spec.classes * static_cast<std::size_t>(T * D)));
  out.noise_sigma = spec.noise * out.signal_spread;

  std::vector<GaitSample> samples;
  samples.reserve(spec.classes * spec.samples_per_class);
  const std::size_t width = std::to_string(spec.classes).size();
  for (std::size_t k = 0; k < spec.classes; ++k) {
    std::string label = std::to_string(k + 1);
    label = "s" + std::string(width - label.size(), '0') + label;
    for (std::size_t n = 0; n < spec.samples_per_class; ++n) {
      GaitSample s;
      s.frames = base[k];
      if (out.noise_sigma > 0.0)
        for (Eigen::Index i = 0; i < s.frames.size(); ++i) s.frames.data()[i] += out.noise_sigma * normal(rng);
      s.modality = Modality::JC;
      s.subject = label;
      s.sequence = label + "_" + std::to_string(n % spec.sequences_per_class + 1);
      s.cycle = n / spec.sequences_per_class;
      s.duration = static_cast<double>(spec.frames) / 120.0;
      samples.push_back(std::move(s));
    }
  }
  std::vector<std::string> joints(cmu_joint_names().begin(),
                                  cmu_joint_names().begin() + static_cast<std::ptrdiff_t>(spec.joints));
  out.dataset = LabeledDataset(std::move(samples), joint_channel_names(joints));
  return out;
}

}  // namespace gaitlab
