#pragma once

// Threshold-swept verification metrics over genuine (same identity) and
// impostor (different identity) template pairs.

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "gaitlab/error.hpp"
#include "gaitlab/eval/distance_matrix.hpp"

namespace gaitlab {

struct PairDistances {
  std::vector<double> genuine;
  std::vector<double> impostor;
};

// Upper triangle of the matrix, split by label agreement.
inline PairDistances pair_distances(const DistanceMatrix& dm, const std::vector<std::string>& labels) {
  if (labels.size() != dm.size()) throw ShapeError("label count does not match distance matrix");
  PairDistances out;
  for (std::size_t i = 0; i < dm.size(); ++i)
    for (std::size_t j = i + 1; j < dm.size(); ++j) (labels[i] == labels[j] ? out.genuine : out.impostor).push_back(dm(i, j));
  return out;
}

using Curve = std::vector<std::pair<double, double>>;

// Cumulative counts at every distinct pair distance t: genuine and impostor
// pairs with distance <= t.
struct ThresholdSweep {
  std::vector<double> thresholds;
  std::vector<std::size_t> genuine_at;
  std::vector<std::size_t> impostor_at;
  std::size_t genuine = 0;
  std::size_t impostor = 0;
};

inline ThresholdSweep sweep(const PairDistances& pairs) {
  if (pairs.genuine.empty()) throw InvalidArgument("no genuine pairs; every class has a single template");
  if (pairs.impostor.empty()) throw InvalidArgument("no impostor pairs; only one class present");
  std::vector<double> g(pairs.genuine), im(pairs.impostor);
  std::sort(g.begin(), g.end());
  std::sort(im.begin(), im.end());
  ThresholdSweep s;
  s.genuine = g.size();
  s.impostor = im.size();
  std::merge(g.begin(), g.end(), im.begin(), im.end(), std::back_inserter(s.thresholds));
  s.thresholds.erase(std::unique(s.thresholds.begin(), s.thresholds.end()), s.thresholds.end());
  std::size_t gi = 0, ii = 0;
  for (double t : s.thresholds) {
    while (gi < g.size() && g[gi] <= t) ++gi;
    while (ii < im.size() && im[ii] <= t) ++ii;
    s.genuine_at.push_back(gi);
    s.impostor_at.push_back(ii);
  }
  return s;
}

struct FarFrr {
  std::vector<double> thresholds;
  std::vector<double> far;
  std::vector<double> frr;
  double eer = 0.0;
};

// EER sits where FAR - FRR changes sign, interpolated linearly between the
// two neighbouring thresholds. Below every distance FAR = 0 and FRR = 1.
inline FarFrr far_frr_eer(const PairDistances& pairs) {
  const auto s = sweep(pairs);
  FarFrr out;
  out.thresholds = s.thresholds;
  const double G = static_cast<double>(s.genuine), I = static_cast<double>(s.impostor);
  for (std::size_t k = 0; k < s.thresholds.size(); ++k) {
    out.far.push_back(static_cast<double>(s.impostor_at[k]) / I);
    out.frr.push_back(static_cast<double>(s.genuine - s.genuine_at[k]) / G);
  }
  double prev_far = 0.0, prev_frr = 1.0;
  for (std::size_t k = 0; k < out.far.size(); ++k) {
    const double d = out.far[k] - out.frr[k];
    if (d >= 0.0) {
      if (d == 0.0) {
        out.eer = out.far[k];
      } else {
        const double dp = prev_far - prev_frr;
        const double s_ = -dp / (d - dp);
        out.eer = prev_far + s_ * (out.far[k] - prev_far);
      }
      return out;
    }
    prev_far = out.far[k];
    prev_frr = out.frr[k];
  }
  // FRR reaches 0 at the last threshold, so the loop always returns.
  throw Error("EER sweep did not cross");
}

inline FarFrr far_frr_eer(const DistanceMatrix& dm, const std::vector<std::string>& labels) {
  return far_frr_eer(pair_distances(dm, labels));
}

struct Roc {
  Curve points;  // (FAR, TAR) from (0,0) to (1,1)
  double auc = 0.0;
};

inline Roc roc_auc(const PairDistances& pairs) {
  const auto s = sweep(pairs);
  const double G = static_cast<double>(s.genuine), I = static_cast<double>(s.impostor);
  Roc out;
  out.points.emplace_back(0.0, 0.0);
  // Integer trapezoids keep the area exact against the pairwise oracle.
  std::size_t pa = 0, pb = 0;
  unsigned long long twice_area = 0;
  for (std::size_t k = 0; k < s.thresholds.size(); ++k) {
    const std::size_t a = s.impostor_at[k], b = s.genuine_at[k];
    twice_area += static_cast<unsigned long long>(a - pa) * (pb + b);
    out.points.emplace_back(static_cast<double>(a) / I, static_cast<double>(b) / G);
    pa = a;
    pb = b;
  }
  if (out.points.back() != std::pair{1.0, 1.0}) out.points.emplace_back(1.0, 1.0);
  out.auc = static_cast<double>(twice_area) / (2.0 * G * I);
  return out;
}

inline Roc roc_auc(const DistanceMatrix& dm, const std::vector<std::string>& labels) {
  return roc_auc(pair_distances(dm, labels));
}

struct PrecisionRecall {
  Curve points;  // (RCL, PCN), starting at (0, 1)
  double map = 0.0;
};

inline PrecisionRecall rcl_pcn_map(const PairDistances& pairs) {
  const auto s = sweep(pairs);
  const double G = static_cast<double>(s.genuine);
  PrecisionRecall out;
  out.points.emplace_back(0.0, 1.0);
  for (std::size_t k = 0; k < s.thresholds.size(); ++k) {
    const std::size_t tp = s.genuine_at[k], fp = s.impostor_at[k];
    const double pcn = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    out.points.emplace_back(static_cast<double>(tp) / G, pcn);
  }
  for (std::size_t k = 1; k < out.points.size(); ++k) {
    const auto& [r0, p0] = out.points[k - 1];
    const auto& [r1, p1] = out.points[k];
    out.map += (r1 - r0) * (p0 + p1) / 2.0;
  }
  return out;
}

inline PrecisionRecall rcl_pcn_map(const DistanceMatrix& dm, const std::vector<std::string>& labels) {
  return rcl_pcn_map(pair_distances(dm, labels));
}

}  // namespace gaitlab
