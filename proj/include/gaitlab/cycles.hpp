#pragma once

// Gait-cycle extraction: sub-motions close to an exemplar cycle in DTW
// distance over bone-rotation channels.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <tuple>
#include <vector>

#include "gaitlab/dtw.hpp"
#include "gaitlab/error.hpp"
#include "gaitlab/mocap.hpp"

namespace gaitlab {

struct CycleSearch {
  double threshold = 0.0;  // required; maximum DTW distance to the exemplar
  double window_lo = 0.7;  // candidate lengths span [lo, hi] x exemplar length
  double window_hi = 1.3;
  std::size_t stride = 5;  // frames between candidate starts and lengths
  LocalCost cost = LocalCost::L1;
};

struct CycleMatch {
  std::size_t first_frame = 0;
  std::size_t frame_count = 0;
  double distance = 0.0;
};

// Candidate lengths: the exemplar length plus multiples of the stride,
// restricted to the window.
inline std::vector<std::size_t> candidate_lengths(std::size_t exemplar_frames, const CycleSearch& search) {
  const double lo = search.window_lo * static_cast<double>(exemplar_frames);
  const double hi = search.window_hi * static_cast<double>(exemplar_frames);
  std::vector<std::size_t> out;
  const auto e = static_cast<long long>(exemplar_frames);
  const auto step = static_cast<long long>(search.stride);
  for (long long len = e; len >= 1 && static_cast<double>(len) >= lo - 1e-9; len -= step) out.push_back(static_cast<std::size_t>(len));
  for (long long len = e + step; static_cast<double>(len) <= hi + 1e-9; len += step) out.push_back(static_cast<std::size_t>(len));
  std::sort(out.begin(), out.end());
  return out;
}

// Scans all candidate windows, keeps those within the threshold and greedily
// picks non-overlapping ones in ascending distance order (ties by start, then
// length). Result is ordered by first frame.
inline std::vector<CycleMatch> find_gait_cycles(const FrameMatrix& channels, const FrameMatrix& exemplar,
                                                const CycleSearch& search) {
  if (!(search.threshold > 0.0)) throw InvalidArgument("cycle threshold must be positive");
  if (!(search.window_lo < 1.0 && search.window_hi > 1.0 && search.window_lo > 0.0))
    throw InvalidArgument("cycle window must satisfy 0 < lo < 1 < hi");
  if (search.stride == 0) throw InvalidArgument("cycle stride must be positive");
  if (exemplar.cols() != channels.cols()) throw ShapeError("exemplar and motion differ in channel count");
  const auto F = static_cast<std::size_t>(channels.rows());
  const auto E = static_cast<std::size_t>(exemplar.rows());
  if (E == 0 || E > F) return {};

  std::vector<CycleMatch> candidates;
  const auto lengths = candidate_lengths(E, search);
  for (std::size_t start = 0; start < F; start += search.stride) {
    for (std::size_t len : lengths) {
      if (start + len > F) break;
      FrameMatrix window = channels.middleRows(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(len));
      double d = dtw_distance(window, exemplar, {search.cost});
      if (d <= search.threshold) candidates.push_back({start, len, d});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const CycleMatch& a, const CycleMatch& b) {
    return std::tie(a.distance, a.first_frame, a.frame_count) < std::tie(b.distance, b.first_frame, b.frame_count);
  });
  std::vector<CycleMatch> picked;
  for (const auto& c : candidates) {
    bool overlaps = std::any_of(picked.begin(), picked.end(), [&](const CycleMatch& p) {
      return c.first_frame < p.first_frame + p.frame_count && p.first_frame < c.first_frame + c.frame_count;
    });
    if (!overlaps) picked.push_back(c);
  }
  std::sort(picked.begin(), picked.end(),
            [](const CycleMatch& a, const CycleMatch& b) { return a.first_frame < b.first_frame; });
  return picked;
}

struct GaitCycle {
  GaitSample sample;
  CycleMatch match;
};

// Cycles of a bone-rotation motion as BR samples (non-root channels).
inline std::vector<GaitCycle> extract_gait_cycles(const Skeleton& skeleton, const BoneRotationSequence& motion,
                                                  const GaitSample& exemplar, const CycleSearch& search,
                                                  const std::string& subject = {}, const std::string& sequence = {}) {
  if (exemplar.modality != Modality::BR) throw InvalidArgument("exemplar must be a BR sample");
  FrameMatrix channels = rotation_channels(skeleton, motion);
  std::vector<GaitCycle> out;
  std::size_t k = 0;
  for (const auto& m : find_gait_cycles(channels, exemplar.frames, search)) {
    GaitSample s;
    s.frames = channels.middleRows(static_cast<Eigen::Index>(m.first_frame), static_cast<Eigen::Index>(m.frame_count));
    s.modality = Modality::BR;
    s.subject = subject;
    s.sequence = sequence;
    s.cycle = k++;
    s.duration = static_cast<double>(m.frame_count) / motion.frame_rate;
    out.push_back({std::move(s), m});
  }
  return out;
}

}  // namespace gaitlab
