#pragma once

// Class-separability coefficients of a template set: Davies-Bouldin index,
// Dunn index, silhouette coefficient and Fisher's discriminant ratio. All
// distances, centroid ones included, use the method's own distance.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "gaitlab/error.hpp"
#include "gaitlab/eval/distance_matrix.hpp"
#include "gaitlab/geometric.hpp"
#include "gaitlab/mocap.hpp"

namespace gaitlab {

struct Separability {
  double dbi = 0.0;
  double di = 0.0;
  double sc = 0.0;
  double fdr = 0.0;
};

namespace detail {

struct LabelGroups {
  std::vector<std::string> names;
  std::vector<std::vector<std::size_t>> members;
  std::vector<std::size_t> group_of;
};

inline LabelGroups group_labels(const std::vector<std::string>& labels) {
  std::map<std::string, std::vector<std::size_t>> by;
  for (std::size_t i = 0; i < labels.size(); ++i) by[labels[i]].push_back(i);
  LabelGroups g;
  g.group_of.resize(labels.size());
  for (auto& [name, members] : by) {
    for (auto i : members) g.group_of[i] = g.names.size();
    g.names.push_back(name);
    g.members.push_back(std::move(members));
  }
  return g;
}

inline double ratio_or_inf(double num, double den) {
  return den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
}

}  // namespace detail

// Silhouette term of a template is 0 when its class is a singleton or when
// both its a() and b() are 0.
inline double silhouette(const DistanceMatrix& dm, const std::vector<std::string>& labels) {
  const auto g = detail::group_labels(labels);
  if (g.names.size() < 2) throw InvalidArgument("silhouette needs at least 2 classes");
  double sum = 0.0;
  for (std::size_t n = 0; n < labels.size(); ++n) {
    const std::size_t own = g.group_of[n];
    if (g.members[own].size() < 2) continue;
    double a = 0.0;
    for (auto m : g.members[own])
      if (m != n) a += dm(n, m);
    a /= static_cast<double>(g.members[own].size() - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < g.names.size(); ++c) {
      if (c == own) continue;
      double s = 0.0;
      for (auto m : g.members[c]) s += dm(n, m);
      b = std::min(b, s / static_cast<double>(g.members[c].size()));
    }
    const double hi = std::max(a, b);
    if (hi > 0.0) sum += (b - a) / hi;
  }
  return sum / static_cast<double>(labels.size());
}

// `dm` must hold the pairwise distances of `features`; it feeds the
// silhouette term.
inline Separability separability(const std::vector<FrameMatrix>& features, const std::vector<std::string>& labels,
                                  const FeatureDistance& dist, const DistanceMatrix& dm) {
  if (features.size() != labels.size() || dm.size() != features.size())
    throw ShapeError("separability inputs differ in size");
  const auto g = detail::group_labels(labels);
  const std::size_t C = g.names.size();
  if (C < 2) throw InvalidArgument("separability needs at least 2 classes");

  FrameMatrix overall = FrameMatrix::Zero(features[0].rows(), features[0].cols());
  for (const auto& f : features) overall += f;
  overall /= static_cast<double>(features.size());

  std::vector<FrameMatrix> centroid(C);
  std::vector<double> sigma(C, 0.0);
  double spread_sum = 0.0;
  for (std::size_t c = 0; c < C; ++c) {
    centroid[c] = FrameMatrix::Zero(features[0].rows(), features[0].cols());
    for (auto i : g.members[c]) centroid[c] += features[i];
    centroid[c] /= static_cast<double>(g.members[c].size());
    for (auto i : g.members[c]) {
      double d = dist(features[i], centroid[c]);
      sigma[c] += d;
      spread_sum += d;
    }
    sigma[c] /= static_cast<double>(g.members[c].size());
  }

  Separability out;
  double dbi = 0.0;
  double min_between = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < C; ++c) {
    double worst = 0.0;
    for (std::size_t k = 0; k < C; ++k) {
      if (k == c) continue;
      const double between = dist(centroid[c], centroid[k]);
      if (k > c) min_between = std::min(min_between, between);
      worst = std::max(worst, detail::ratio_or_inf(sigma[c] + sigma[k], between));
    }
    dbi += worst;
  }
  out.dbi = dbi / static_cast<double>(C);
  out.di = detail::ratio_or_inf(min_between, *std::max_element(sigma.begin(), sigma.end()));
  out.sc = silhouette(dm, labels);
  double centroid_spread = 0.0;
  for (std::size_t c = 0; c < C; ++c) centroid_spread += dist(centroid[c], overall);
  out.fdr = detail::ratio_or_inf(centroid_spread / static_cast<double>(C),
                                 spread_sum / static_cast<double>(features.size()));
  return out;
}

}  // namespace gaitlab
