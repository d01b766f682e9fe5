#pragma once

// Hand-designed gait features and the baselines they are compared with.
// Each extractor maps a gait sample to a feature matrix: one row for fixed
// vector templates, one row per frame for sequences compared by DTW.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "gaitlab/dtw.hpp"
#include "gaitlab/error.hpp"
#include "gaitlab/mocap.hpp"

namespace gaitlab {

// Body-part roles mapped to skeleton joint names. A joint is the end point
// of the bone with the same name.
struct JointMap {
  std::map<std::string, std::string> roles;

  static JointMap cmu() {
    return {{{"root", "root"},
             {"head", "head"},
             {"torso_top", "thorax"},
             {"left_hip", "lhipjoint"},
             {"left_knee", "lfemur"},
             {"left_ankle", "ltibia"},
             {"left_foot", "lfoot"},
             {"right_hip", "rhipjoint"},
             {"right_knee", "rfemur"},
             {"right_ankle", "rtibia"},
             {"right_foot", "rfoot"},
             {"left_shoulder", "lclavicle"},
             {"left_elbow", "lhumerus"},
             {"left_wrist", "lradius"},
             {"right_shoulder", "rclavicle"},
             {"right_elbow", "rhumerus"},
             {"right_wrist", "rradius"}}};
  }

  static JointMap from_json(const nlohmann::json& j) {
    JointMap m;
    for (auto it = j.begin(); it != j.end(); ++it) m.roles[it.key()] = it.value().get<std::string>();
    return m;
  }

  static JointMap load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot read joint map " + path.string());
    try {
      return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigurationError("bad joint map " + path.string() + ": " + e.what());
    }
  }

  nlohmann::json to_json() const { return nlohmann::json(roles); }
};

// Joint indices of the roles an extractor needs, resolved against the joint
// order of a JC dataset.
class JointLookup {
 public:
  JointLookup(const JointMap& map, const std::vector<std::string>& joint_names) {
    for (std::size_t i = 0; i < joint_names.size(); ++i) index_[joint_names[i]] = i;
    for (const auto& [role, joint] : map.roles) {
      auto it = index_.find(joint);
      if (it != index_.end()) roles_[role] = it->second;
    }
  }

  std::size_t operator()(const std::string& role) const {
    auto it = roles_.find(role);
    if (it == roles_.end()) throw ConfigurationError("joint map has no usable joint for role '" + role + "'");
    return it->second;
  }

  void require(std::initializer_list<const char*> roles) const {
    for (const char* r : roles) (void)(*this)(r);
  }

 private:
  std::map<std::string, std::size_t> index_;
  std::map<std::string, std::size_t> roles_;
};

namespace detail {

inline Eigen::Vector3d joint_at(const GaitSample& s, Eigen::Index frame, std::size_t joint) {
  return s.frames.row(frame).segment<3>(static_cast<Eigen::Index>(3 * joint)).transpose();
}

inline void require_jc(const GaitSample& s) {
  if (s.modality != Modality::JC) throw InvalidArgument("extractor needs a joint-coordinate sample");
  if (s.channel_count() % 3 != 0) throw ShapeError("JC sample channel count is not a multiple of 3");
}

// Angle in [0, pi] between two vectors; the cosine is clamped to [-1, 1].
inline double angle_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b, Eigen::Index frame) {
  const double na = a.norm(), nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0))
    throw InvalidArgument("angle undefined: zero-length limb vector at frame " + std::to_string(frame));
  return std::acos(std::clamp(a.dot(b) / (na * nb), -1.0, 1.0));
}

struct SignalStats {
  double mean, stddev, max;
};

// Population standard deviation.
inline SignalStats stats(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(v.size());
  return {mean, std::sqrt(var), *std::max_element(v.begin(), v.end())};
}

inline FrameMatrix row(const std::vector<double>& v) {
  FrameMatrix m(1, static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = v[i];
  return m;
}

}  // namespace detail

// Raw channels as a frame sequence.
inline FrameMatrix extract_raw(const GaitSample& sample) { return sample.frames; }

// Mean area of the hip-knee-foot triangle of each leg over the cycle.
inline FrameMatrix extract_alis(const GaitSample& sample, const JointLookup& joints) {
  detail::require_jc(sample);
  joints.require({"left_hip", "left_knee", "left_foot", "right_hip", "right_knee", "right_foot"});
  std::vector<double> area(2, 0.0);
  const char* sides[2][3] = {{"left_hip", "left_knee", "left_foot"}, {"right_hip", "right_knee", "right_foot"}};
  for (Eigen::Index f = 0; f < sample.frames.rows(); ++f) {
    for (int s = 0; s < 2; ++s) {
      Eigen::Vector3d hip = detail::joint_at(sample, f, joints(sides[s][0]));
      Eigen::Vector3d knee = detail::joint_at(sample, f, joints(sides[s][1]));
      Eigen::Vector3d foot = detail::joint_at(sample, f, joints(sides[s][2]));
      area[static_cast<std::size_t>(s)] += 0.5 * (knee - hip).cross(foot - hip).norm();
    }
  }
  for (double& a : area) a /= static_cast<double>(sample.frames.rows());
  return detail::row(area);
}

// Per leg: thigh against the downward Y axis, shank against the thigh, foot
// against the Z axis; each signal reduced to mean, std and max.
// Layout: [left thigh, left knee, left foot, right ...] x [mean, std, max].
inline FrameMatrix extract_balla(const GaitSample& sample, const JointLookup& joints) {
  detail::require_jc(sample);
  joints.require({"left_hip", "left_knee", "left_ankle", "left_foot", "right_hip", "right_knee", "right_ankle",
                  "right_foot"});
  const Eigen::Vector3d down(0.0, -1.0, 0.0);
  const Eigen::Vector3d forward(0.0, 0.0, 1.0);
  std::vector<double> out;
  for (const char* side : {"left", "right"}) {
    const std::string p(side);
    std::vector<double> thigh, knee, foot;
    for (Eigen::Index f = 0; f < sample.frames.rows(); ++f) {
      Eigen::Vector3d hip = detail::joint_at(sample, f, joints(p + "_hip"));
      Eigen::Vector3d kn = detail::joint_at(sample, f, joints(p + "_knee"));
      Eigen::Vector3d an = detail::joint_at(sample, f, joints(p + "_ankle"));
      Eigen::Vector3d ft = detail::joint_at(sample, f, joints(p + "_foot"));
      thigh.push_back(detail::angle_between(kn - hip, down, f));
      knee.push_back(detail::angle_between(an - kn, kn - hip, f));
      foot.push_back(detail::angle_between(ft - an, forward, f));
    }
    for (const auto* signal : {&thigh, &knee, &foot}) {
      auto s = detail::stats(*signal);
      out.insert(out.end(), {s.mean, s.stddev, s.max});
    }
  }
  return detail::row(out);
}

inline constexpr double kDefaultFrameRate = 120.0;

// Body measures averaged over the cycle, then step length and speed:
// [height, leg, torso, lower leg L/R, thigh L/R, upper arm L/R, forearm L/R,
//  step length, speed]. Leg is the mean of both legs (thigh + lower leg);
// height is head-to-root plus leg; step length is the largest feet
// distance; speed is a stride (two steps) over the cycle duration.
inline FrameMatrix extract_preisj(const GaitSample& sample, const JointLookup& joints) {
  detail::require_jc(sample);
  joints.require({"root", "head", "torso_top", "left_hip", "left_knee", "left_ankle", "left_foot", "right_hip",
                  "right_knee", "right_ankle", "right_foot", "left_shoulder", "left_elbow", "left_wrist",
                  "right_shoulder", "right_elbow", "right_wrist"});
  auto dist = [&](Eigen::Index f, const char* a, const char* b) {
    return (detail::joint_at(sample, f, joints(a)) - detail::joint_at(sample, f, joints(b))).norm();
  };
  std::vector<double> acc(11, 0.0);
  double step = 0.0;
  for (Eigen::Index f = 0; f < sample.frames.rows(); ++f) {
    double thigh_l = dist(f, "left_knee", "left_hip"), thigh_r = dist(f, "right_knee", "right_hip");
    double shank_l = dist(f, "left_ankle", "left_knee"), shank_r = dist(f, "right_ankle", "right_knee");
    double leg = 0.5 * (thigh_l + shank_l + thigh_r + shank_r);
    double v[11] = {dist(f, "head", "root") + leg,
                    leg,
                    dist(f, "torso_top", "root"),
                    shank_l,
                    shank_r,
                    thigh_l,
                    thigh_r,
                    dist(f, "left_elbow", "left_shoulder"),
                    dist(f, "right_elbow", "right_shoulder"),
                    dist(f, "left_wrist", "left_elbow"),
                    dist(f, "right_wrist", "right_elbow")};
    for (int k = 0; k < 11; ++k) acc[static_cast<std::size_t>(k)] += v[k];
    step = std::max(step, dist(f, "left_foot", "right_foot"));
  }
  for (double& a : acc) a /= static_cast<double>(sample.frames.rows());
  const double duration =
      sample.duration > 0.0 ? sample.duration : static_cast<double>(sample.frames.rows()) / kDefaultFrameRate;
  acc.push_back(step);
  acc.push_back(2.0 * step / duration);
  return detail::row(acc);
}

enum class DistanceKind { L1, L2, DTW_L1, DTW_L2, Mahalanobis, None };

inline const char* to_string(DistanceKind k) {
  switch (k) {
    case DistanceKind::L1: return "L1";
    case DistanceKind::L2: return "L2";
    case DistanceKind::DTW_L1: return "DTW+L1";
    case DistanceKind::DTW_L2: return "DTW+L2";
    case DistanceKind::Mahalanobis: return "Mahalanobis";
    case DistanceKind::None: return "none";
  }
  return "?";
}

using FeatureDistance = std::function<double(const FrameMatrix&, const FrameMatrix&)>;

inline FeatureDistance make_distance(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::L1:
      return [](const FrameMatrix& a, const FrameMatrix& b) {
        if (a.size() != b.size()) throw ShapeError("L1 operands differ in size");
        return (a - b).cwiseAbs().sum();
      };
    case DistanceKind::L2:
      return [](const FrameMatrix& a, const FrameMatrix& b) {
        if (a.size() != b.size()) throw ShapeError("L2 operands differ in size");
        return (a - b).norm();
      };
    case DistanceKind::DTW_L1:
      return [](const FrameMatrix& a, const FrameMatrix& b) { return dtw_distance(a, b, {LocalCost::L1}); };
    case DistanceKind::DTW_L2:
      return [](const FrameMatrix& a, const FrameMatrix& b) { return dtw_distance(a, b, {LocalCost::L2}); };
    default:
      throw InvalidArgument(std::string("distance '") + to_string(kind) + "' needs extra state");
  }
}

struct ExtractorSpec {
  std::string name;
  DistanceKind distance = DistanceKind::L1;
  // Template dimensionality for samples of the given shape.
  std::function<std::size_t(std::size_t frames, std::size_t channels)> dimension;
  // Empty for registry entries that are not implemented.
  std::function<FrameMatrix(const GaitSample&, const JointLookup&)> extract;
  bool needs_joints = false;

  bool implemented() const { return static_cast<bool>(extract); }
};

// Name-indexed set of feature extractors. Learned methods (mmc, pcalda) and
// the random baseline are handled by the experiment runner.
class ExtractorRegistry {
 public:
  static const ExtractorRegistry& builtin() {
    static const ExtractorRegistry r = [] {
      ExtractorRegistry reg;
      reg.add({"raw", DistanceKind::DTW_L2, [](std::size_t t, std::size_t c) { return t * c; },
               [](const GaitSample& s, const JointLookup&) { return extract_raw(s); }, false});
      reg.add({"alis", DistanceKind::L1, [](std::size_t, std::size_t) { return std::size_t{2}; },
               [](const GaitSample& s, const JointLookup& j) { return extract_alis(s, j); }, true});
      reg.add({"balla", DistanceKind::L1, [](std::size_t, std::size_t) { return std::size_t{18}; },
               [](const GaitSample& s, const JointLookup& j) { return extract_balla(s, j); }, true});
      reg.add({"preisj", DistanceKind::L1, [](std::size_t, std::size_t) { return std::size_t{13}; },
               [](const GaitSample& s, const JointLookup& j) { return extract_preisj(s, j); }, true});
      // Listed so lookups report "not implemented" rather than "unknown".
      for (const char* name : {"ahmedf", "ahmedm", "anderssonvo", "dikovskib", "jiangs", "krzeszowskit", "kwolekb",
                               "nareshkumarms", "sedmidubskyj", "sinhaa"})
        reg.add({name, DistanceKind::None, nullptr, nullptr, true});
      return reg;
    }();
    return r;
  }

  void add(ExtractorSpec spec) { specs_[spec.name] = std::move(spec); }

  const ExtractorSpec& find(const std::string& name) const {
    auto it = specs_.find(name);
    if (it == specs_.end()) throw InvalidArgument("unknown feature extractor '" + name + "'");
    if (!it->second.implemented()) throw NotImplemented("feature extractor '" + name + "' is not implemented");
    return it->second;
  }

  bool contains(const std::string& name) const { return specs_.count(name) > 0; }

  std::vector<std::string> names(bool implemented_only = true) const {
    std::vector<std::string> out;
    for (const auto& [name, spec] : specs_)
      if (!implemented_only || spec.implemented()) out.push_back(name);
    return out;
  }

 private:
  std::map<std::string, ExtractorSpec> specs_;
};

// Uniform choice among the distinct gallery labels; features are ignored.
class RandomClassifier {
 public:
  explicit RandomClassifier(std::uint64_t seed) : rng_(seed) {}

  std::string classify(const std::vector<std::string>& gallery_labels) {
    std::set<std::string> distinct(gallery_labels.begin(), gallery_labels.end());
    if (distinct.empty()) throw InvalidArgument("random classifier needs a non-empty gallery");
    std::uniform_int_distribution<std::size_t> pick(0, distinct.size() - 1);
    auto it = distinct.begin();
    std::advance(it, static_cast<std::ptrdiff_t>(pick(rng_)));
    return *it;
  }

  // Distinct gallery labels in a uniformly random order; the head is the
  // classification answer.
  std::vector<std::string> rank(const std::vector<std::string>& gallery_labels) {
    std::set<std::string> distinct(gallery_labels.begin(), gallery_labels.end());
    if (distinct.empty()) throw InvalidArgument("random classifier needs a non-empty gallery");
    std::vector<std::string> out(distinct.begin(), distinct.end());
    std::shuffle(out.begin(), out.end(), rng_);
    return out;
  }

  static constexpr std::size_t template_dimension = 0;

 private:
  std::mt19937_64 rng_;
};

}  // namespace gaitlab
