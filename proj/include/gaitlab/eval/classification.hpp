#pragma once

// Winner-takes-all classification, k-fold cross-validation and CMC curves.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "gaitlab/error.hpp"
#include "gaitlab/eval/distance_matrix.hpp"
#include "gaitlab/geometric.hpp"
#include "gaitlab/mocap.hpp"

namespace gaitlab {

enum class CvMode { nested, grouped };

inline std::string to_string(CvMode m) { return m == CvMode::nested ? "nested" : "grouped"; }
inline CvMode cv_mode_from_string(const std::string& s) {
  if (s == "nested") return CvMode::nested;
  if (s == "grouped") return CvMode::grouped;
  throw InvalidArgument("unknown CV mode '" + s + "' (expected nested or grouped)");
}

struct Prediction {
  std::string label;
  std::size_t gallery_index = 0;
  double distance = 0.0;
};

// Nearest gallery template; the first one wins on equal distance.
inline Prediction classify_wta(const FrameMatrix& probe, const std::vector<FrameMatrix>& gallery,
                               const std::vector<std::string>& labels, const FeatureDistance& dist) {
  if (gallery.empty()) throw InvalidArgument("gallery is empty");
  if (gallery.size() != labels.size()) throw ShapeError("gallery and label counts differ");
  Prediction best{labels[0], 0, dist(probe, gallery[0])};
  for (std::size_t g = 1; g < gallery.size(); ++g) {
    double d = dist(probe, gallery[g]);
    if (d < best.distance) best = {labels[g], g, d};
  }
  return best;
}

struct RankedClass {
  std::string label;
  double distance;
  std::size_t gallery_index;  // template realizing the distance
};

// Gallery classes ordered by their closest template, then by that
// template's gallery position. The head of the list is the WTA answer.
inline std::vector<RankedClass> rank_classes(const std::vector<double>& distances,
                                             const std::vector<std::string>& labels) {
  if (distances.size() != labels.size()) throw ShapeError("distance and label counts differ");
  std::map<std::string, RankedClass> best;
  for (std::size_t g = 0; g < distances.size(); ++g) {
    auto [it, fresh] = best.try_emplace(labels[g], RankedClass{labels[g], distances[g], g});
    if (!fresh && distances[g] < it->second.distance) it->second = {labels[g], distances[g], g};
  }
  std::vector<RankedClass> out;
  out.reserve(best.size());
  for (auto& [_, r] : best) out.push_back(r);
  std::sort(out.begin(), out.end(), [](const RankedClass& a, const RankedClass& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.gallery_index < b.gallery_index;
  });
  return out;
}

// Fold index per template. Nested mode deals a random permutation of the
// templates round-robin; grouped mode does the same with whole sequences.
inline std::vector<std::size_t> assign_folds(std::size_t n, std::size_t k, CvMode mode,
                                             const std::vector<std::string>& sequence_ids, std::mt19937_64& rng) {
  if (k < 2) throw InvalidArgument("cross-validation needs at least 2 folds");
  if (n < k) throw InvalidArgument(std::to_string(n) + " templates cannot fill " + std::to_string(k) + " folds");
  std::vector<std::size_t> fold(n);
  if (mode == CvMode::nested) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t p = 0; p < n; ++p) fold[order[p]] = p % k;
    return fold;
  }
  if (sequence_ids.size() != n) throw ShapeError("grouped folds need one sequence id per template");
  std::vector<std::string> groups(sequence_ids);
  std::sort(groups.begin(), groups.end());
  groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
  if (groups.size() < k)
    throw InvalidArgument(std::to_string(groups.size()) + " sequences cannot fill " + std::to_string(k) +
                          " grouped folds");
  std::shuffle(groups.begin(), groups.end(), rng);
  std::map<std::string, std::size_t> group_fold;
  for (std::size_t p = 0; p < groups.size(); ++p) group_fold[groups[p]] = p % k;
  for (std::size_t i = 0; i < n; ++i) fold[i] = group_fold.at(sequence_ids[i]);
  return fold;
}

struct CrossValidation {
  double ccr = 0.0;
  std::vector<std::string> predicted;  // per template
  std::vector<double> cmc;             // cmc[k-1] = Rank-k rate, k = 1..classes
};

namespace detail {

inline std::size_t distinct_count(const std::vector<std::string>& labels) {
  std::vector<std::string> u(labels);
  std::sort(u.begin(), u.end());
  return static_cast<std::size_t>(std::unique(u.begin(), u.end()) - u.begin());
}

// Rank (1-based) of the probe's true class among the gallery classes, or
// `classes` when the gallery lacks that class.
inline std::size_t true_rank(const std::vector<RankedClass>& ranking, const std::string& truth, std::size_t classes) {
  for (std::size_t r = 0; r < ranking.size(); ++r)
    if (ranking[r].label == truth) return r + 1;
  return classes;
}

inline std::vector<double> cmc_from_ranks(const std::vector<std::size_t>& ranks, std::size_t classes) {
  std::vector<double> curve(classes, 0.0);
  std::vector<std::size_t> hits(classes + 1, 0);
  for (auto r : ranks) ++hits[r];
  std::size_t cum = 0;
  for (std::size_t k = 1; k <= classes; ++k) {
    cum += hits[k];
    curve[k - 1] = static_cast<double>(cum) / static_cast<double>(ranks.size());
  }
  return curve;
}

}  // namespace detail

// Each fold is classified against the union of the other folds. The CMC is
// built from the same probe/gallery pairs, so its Rank-1 equals the CCR.
inline CrossValidation cross_validate(const DistanceMatrix& dm, const std::vector<std::string>& labels,
                                      const std::vector<std::size_t>& folds) {
  const std::size_t n = dm.size();
  if (labels.size() != n || folds.size() != n) throw ShapeError("cross-validation inputs differ in size");
  const std::size_t classes = detail::distinct_count(labels);
  CrossValidation out;
  out.predicted.resize(n);
  std::vector<std::size_t> ranks(n);
  std::size_t correct = 0;
  std::vector<double> dists;
  std::vector<std::string> glabels;
  for (std::size_t p = 0; p < n; ++p) {
    dists.clear();
    glabels.clear();
    for (std::size_t g = 0; g < n; ++g) {
      if (folds[g] == folds[p]) continue;
      dists.push_back(dm(p, g));
      glabels.push_back(labels[g]);
    }
    if (dists.empty()) throw InvalidArgument("a fold holds every template; gallery is empty");
    auto ranking = rank_classes(dists, glabels);
    out.predicted[p] = ranking.front().label;
    if (out.predicted[p] == labels[p]) ++correct;
    ranks[p] = detail::true_rank(ranking, labels[p], classes);
  }
  out.ccr = static_cast<double>(correct) / static_cast<double>(n);
  out.cmc = detail::cmc_from_ranks(ranks, classes);
  return out;
}

// Leave-one-out CMC over a full distance matrix.
inline std::vector<double> cmc(const DistanceMatrix& dm, const std::vector<std::string>& labels) {
  const std::size_t n = dm.size();
  if (labels.size() != n) throw ShapeError("label count does not match distance matrix");
  std::vector<std::size_t> folds(n);
  std::iota(folds.begin(), folds.end(), std::size_t{0});
  return cross_validate(dm, labels, folds).cmc;
}

}  // namespace gaitlab
