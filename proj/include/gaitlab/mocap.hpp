#pragma once

// Skeletons, motion sequences and gait samples.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gaitlab/error.hpp"

namespace gaitlab {

// Frames are rows, channels are columns. Row-major storage makes the
// frame-major flattening a plain copy of the buffer.
using FrameMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Dof { rx, ry, rz, tx, ty, tz };
enum class AngleUnit { degrees, radians };
enum class Modality { BR, JC };

inline const char* to_string(Dof d) {
  switch (d) {
    case Dof::rx: return "rx";
    case Dof::ry: return "ry";
    case Dof::rz: return "rz";
    case Dof::tx: return "tx";
    case Dof::ty: return "ty";
    case Dof::tz: return "tz";
  }
  return "?";
}

inline std::optional<Dof> dof_from_string(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (s == "rx") return Dof::rx;
  if (s == "ry") return Dof::ry;
  if (s == "rz") return Dof::rz;
  if (s == "tx") return Dof::tx;
  if (s == "ty") return Dof::ty;
  if (s == "tz") return Dof::tz;
  return std::nullopt;
}

inline bool is_rotation(Dof d) {
  return d == Dof::rx || d == Dof::ry || d == Dof::rz;
}

inline const char* to_string(Modality m) { return m == Modality::BR ? "BR" : "JC"; }

inline Modality modality_from_string(const std::string& s) {
  if (s == "BR" || s == "br") return Modality::BR;
  if (s == "JC" || s == "jc") return Modality::JC;
  throw InvalidArgument("unknown modality '" + s + "'");
}

struct Bone {
  std::string name;
  std::string parent;  // empty for the root
  Eigen::Vector3d direction = Eigen::Vector3d::Zero();
  double length = 0.0;
  Eigen::Vector3d axis = Eigen::Vector3d::Zero();  // radians
  std::string axis_order = "XYZ";
  std::vector<Dof> dofs;
};

// Rotation about a principal axis ('X', 'Y' or 'Z'), right-handed.
inline Eigen::Matrix3d principal_rotation(char axis, double radians) {
  switch (axis) {
    case 'X': case 'x':
      return Eigen::AngleAxisd(radians, Eigen::Vector3d::UnitX()).toRotationMatrix();
    case 'Y': case 'y':
      return Eigen::AngleAxisd(radians, Eigen::Vector3d::UnitY()).toRotationMatrix();
    case 'Z': case 'z':
      return Eigen::AngleAxisd(radians, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  }
  throw InvalidArgument(std::string("bad rotation axis '") + axis + "'");
}

// Euler rotation applied in the given order to column vectors: the first
// listed axis acts first, so "XYZ" yields Rz * Ry * Rx.
inline Eigen::Matrix3d euler_rotation(const Eigen::Vector3d& radians,
                                      const std::string& order) {
  if (order.size() != 3) throw InvalidArgument("axis order must have 3 letters: " + order);
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
  for (std::size_t i = 0; i < 3; ++i) r = principal_rotation(order[i], radians[i]) * r;
  return r;
}

class Skeleton {
 public:
  Skeleton() = default;

  // Bones are reordered into depth-first preorder from the root; siblings keep
  // their relative input order.
  explicit Skeleton(std::vector<Bone> bones, AngleUnit unit = AngleUnit::degrees)
      : unit_(unit) {
    std::size_t root = bones.size();
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < bones.size(); ++i) {
      if (!index.emplace(bones[i].name, i).second)
        throw InvalidArgument("duplicate bone '" + bones[i].name + "'");
      if (bones[i].parent.empty()) {
        if (root != bones.size()) throw InvalidArgument("skeleton has more than one root");
        root = i;
      }
    }
    if (root == bones.size()) throw InvalidArgument("skeleton has no root");
    std::vector<std::vector<std::size_t>> children(bones.size());
    for (std::size_t i = 0; i < bones.size(); ++i) {
      const Bone& b = bones[i];
      if (b.parent.empty()) continue;
      auto it = index.find(b.parent);
      if (it == index.end())
        throw InvalidArgument("bone '" + b.name + "' references unknown parent '" + b.parent + "'");
      children[it->second].push_back(i);
      if (b.length < 0) throw InvalidArgument("bone '" + b.name + "' has negative length");
      if (std::abs(b.direction.norm() - 1.0) > 1e-6)
        throw InvalidArgument("bone '" + b.name + "' direction is not a unit vector");
    }
    std::vector<std::size_t> stack{root};
    std::vector<bool> seen(bones.size(), false);
    while (!stack.empty()) {
      std::size_t i = stack.back();
      stack.pop_back();
      seen[i] = true;
      bones_.push_back(bones[i]);
      for (auto it = children[i].rbegin(); it != children[i].rend(); ++it) stack.push_back(*it);
    }
    // Anything not reached from the root sits on a cycle.
    for (std::size_t i = 0; i < bones.size(); ++i)
      if (!seen[i]) throw InvalidArgument("bone '" + bones[i].name + "' is part of a cycle");
    for (std::size_t i = 0; i < bones_.size(); ++i) index_[bones_[i].name] = i;
    parent_.assign(bones_.size(), npos);
    offset_.resize(bones_.size() + 1);
    offset_[0] = 0;
    for (std::size_t i = 0; i < bones_.size(); ++i) {
      if (i) parent_[i] = index_.at(bones_[i].parent);
      offset_[i + 1] = offset_[i] + bones_[i].dofs.size();
    }
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  const std::vector<Bone>& bones() const { return bones_; }
  std::size_t size() const { return bones_.size(); }
  const Bone& root() const { return bones_.front(); }
  AngleUnit angle_unit() const { return unit_; }
  std::size_t parent(std::size_t i) const { return parent_.at(i); }

  std::optional<std::size_t> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Column range of bone i inside a motion frame.
  std::size_t channel_offset(std::size_t i) const { return offset_.at(i); }
  std::size_t channel_count() const { return offset_.back(); }

  // Names of non-root dof channels, "bone.dof", in frame order.
  std::vector<std::string> rotation_channel_names() const {
    std::vector<std::string> names;
    for (std::size_t i = 1; i < bones_.size(); ++i)
      for (Dof d : bones_[i].dofs) names.push_back(bones_[i].name + "." + to_string(d));
    return names;
  }

  std::vector<std::string> joint_names() const {
    std::vector<std::string> names;
    for (const auto& b : bones_) names.push_back(b.name);
    return names;
  }

 private:
  std::vector<Bone> bones_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> offset_;
  AngleUnit unit_ = AngleUnit::degrees;
};

// Raw per-frame dof values, one column per declared dof of every bone, in
// the skeleton's bone order. Angles keep the unit they were recorded in.
struct BoneRotationSequence {
  FrameMatrix values;
  double frame_rate = 120.0;

  std::size_t frames() const { return static_cast<std::size_t>(values.rows()); }
};

struct JointCoordinateSequence {
  FrameMatrix coords;  // frames x 3J, joint j at columns 3j..3j+2
  std::vector<std::string> joint_names;

  std::size_t frames() const { return static_cast<std::size_t>(coords.rows()); }
  std::size_t joints() const { return joint_names.size(); }
  Eigen::Vector3d joint(std::size_t frame, std::size_t j) const {
    return coords.row(static_cast<Eigen::Index>(frame))
        .segment<3>(static_cast<Eigen::Index>(3 * j))
        .transpose();
  }
};

namespace detail {

inline double to_radians(double v, AngleUnit unit) {
  return unit == AngleUnit::degrees ? v * std::numbers::pi / 180.0 : v;
}

// Local rotation of a bone from its dof values in one frame.
inline Eigen::Matrix3d dof_rotation(const Bone& bone, const double* values, AngleUnit unit) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  for (std::size_t k = 0; k < bone.dofs.size(); ++k) {
    Dof d = bone.dofs[k];
    if (!is_rotation(d)) continue;
    char axis = d == Dof::rx ? 'X' : d == Dof::ry ? 'Y' : 'Z';
    m = principal_rotation(axis, to_radians(values[k], unit)) * m;
  }
  return m;
}

inline Eigen::Vector3d dof_translation(const Bone& bone, const double* values) {
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
  for (std::size_t k = 0; k < bone.dofs.size(); ++k) {
    switch (bone.dofs[k]) {
      case Dof::tx: t.x() = values[k]; break;
      case Dof::ty: t.y() = values[k]; break;
      case Dof::tz: t.z() = values[k]; break;
      default: break;
    }
  }
  return t;
}

}  // namespace detail

// Joint positions for every frame. Joint i is the end point of bone i; the
// root joint sits at the root translation.
inline JointCoordinateSequence forward_kinematics(const Skeleton& skeleton,
                                                  const BoneRotationSequence& motion) {
  if (static_cast<std::size_t>(motion.values.cols()) != skeleton.channel_count())
    throw ShapeError("motion has " + std::to_string(motion.values.cols()) +
                     " channels, skeleton declares " + std::to_string(skeleton.channel_count()));
  const auto& bones = skeleton.bones();
  const std::size_t J = bones.size();
  std::vector<Eigen::Matrix3d> axis(J), axis_inv(J);
  for (std::size_t i = 0; i < J; ++i) {
    axis[i] = euler_rotation(bones[i].axis, bones[i].axis_order);
    axis_inv[i] = axis[i].transpose();
  }
  JointCoordinateSequence out;
  out.joint_names = skeleton.joint_names();
  out.coords.resize(motion.values.rows(), static_cast<Eigen::Index>(3 * J));
  std::vector<Eigen::Matrix3d> global(J);
  std::vector<Eigen::Vector3d> position(J);
  for (Eigen::Index f = 0; f < motion.values.rows(); ++f) {
    const double* row = motion.values.row(f).data();
    for (std::size_t i = 0; i < J; ++i) {
      const double* v = row + skeleton.channel_offset(i);
      Eigen::Matrix3d local = axis[i] * detail::dof_rotation(bones[i], v, skeleton.angle_unit()) * axis_inv[i];
      if (i == 0) {
        global[0] = local;
        position[0] = detail::dof_translation(bones[0], v);
      } else {
        std::size_t p = skeleton.parent(i);
        global[i] = global[p] * local;
        position[i] = position[p] + global[i] * (bones[i].direction * bones[i].length);
      }
      out.coords.row(f).segment<3>(static_cast<Eigen::Index>(3 * i)) = position[i].transpose();
    }
  }
  return out;
}

// Zeroes the root translation and rotation in every frame.
inline BoneRotationSequence normalize_root(const Skeleton& skeleton, BoneRotationSequence motion) {
  const auto n = static_cast<Eigen::Index>(skeleton.root().dofs.size());
  if (n > 0) motion.values.leftCols(n).setZero();
  return motion;
}

// Non-root dof channels of a motion, the raw bone-rotation form.
inline FrameMatrix rotation_channels(const Skeleton& skeleton, const BoneRotationSequence& motion) {
  const auto skip = static_cast<Eigen::Index>(skeleton.root().dofs.size());
  return motion.values.rightCols(motion.values.cols() - skip);
}

struct GaitSample {
  FrameMatrix frames;
  Modality modality = Modality::BR;
  std::string subject;
  std::string sequence;
  std::size_t cycle = 0;
  double duration = 0.0;  // seconds covered by the cycle before resampling

  std::size_t frame_count() const { return static_cast<std::size_t>(frames.rows()); }
  std::size_t channel_count() const { return static_cast<std::size_t>(frames.cols()); }
  std::size_t dimension() const { return static_cast<std::size_t>(frames.size()); }
};

// Piecewise-linear resampling of every channel onto target_frames points
// spread evenly over normalized time; first and last frames are kept.
inline FrameMatrix resample_frames(const FrameMatrix& in, std::size_t target_frames) {
  if (target_frames < 2) throw InvalidArgument("target frame count must be at least 2");
  const auto F = static_cast<std::size_t>(in.rows());
  if (F < 2) throw InvalidArgument("cannot resample fewer than 2 frames");
  FrameMatrix out(static_cast<Eigen::Index>(target_frames), in.cols());
  for (std::size_t i = 0; i < target_frames; ++i) {
    double u = static_cast<double>(i * (F - 1)) / static_cast<double>(target_frames - 1);
    auto k = static_cast<std::size_t>(std::floor(u));
    if (k >= F - 1) {
      out.row(static_cast<Eigen::Index>(i)) = in.row(static_cast<Eigen::Index>(F - 1));
      continue;
    }
    double w = u - static_cast<double>(k);
    auto r = static_cast<Eigen::Index>(i);
    auto a = static_cast<Eigen::Index>(k);
    if (w == 0.0)
      out.row(r) = in.row(a);
    else
      out.row(r) = (1.0 - w) * in.row(a) + w * in.row(a + 1);
  }
  return out;
}

inline GaitSample time_normalize(const GaitSample& sample, std::size_t target_frames) {
  GaitSample out = sample;
  out.frames = resample_frames(sample.frames, target_frames);
  return out;
}

// Frame-major concatenation: all channels of frame 1, then frame 2, ...
inline Eigen::VectorXd flatten(const FrameMatrix& frames) {
  return Eigen::Map<const Eigen::VectorXd>(frames.data(), frames.size());
}

inline Eigen::VectorXd flatten(const GaitSample& sample) { return flatten(sample.frames); }

inline FrameMatrix unflatten(const Eigen::Ref<const Eigen::VectorXd>& v, std::size_t frames,
                             std::size_t channels) {
  if (static_cast<std::size_t>(v.size()) != frames * channels)
    throw ShapeError("vector of size " + std::to_string(v.size()) + " cannot hold " +
                     std::to_string(frames) + "x" + std::to_string(channels));
  return Eigen::Map<const FrameMatrix>(v.data(), static_cast<Eigen::Index>(frames),
                                       static_cast<Eigen::Index>(channels));
}

struct IdentityClass {
  std::string label;
  std::vector<std::size_t> members;  // indices into the dataset
};

// Gait samples sharing modality and shape, grouped into identity classes.
class LabeledDataset {
 public:
  LabeledDataset() = default;

  explicit LabeledDataset(std::vector<GaitSample> samples,
                          std::vector<std::string> channel_names = {})
      : samples_(std::move(samples)), channel_names_(std::move(channel_names)) {
    if (samples_.empty()) return;
    const auto& first = samples_.front();
    for (const auto& s : samples_) {
      if (s.modality != first.modality) throw InvalidArgument("samples mix modalities");
      if (s.frame_count() != first.frame_count() || s.channel_count() != first.channel_count())
        throw ShapeError("samples differ in frame or channel count");
    }
    if (!channel_names_.empty() && channel_names_.size() != first.channel_count())
      throw ShapeError("channel name count does not match samples");
  }

  const std::vector<GaitSample>& samples() const { return samples_; }
  const GaitSample& operator[](std::size_t i) const { return samples_.at(i); }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const std::vector<std::string>& channel_names() const { return channel_names_; }

  std::size_t frames() const { return empty() ? 0 : samples_.front().frame_count(); }
  std::size_t channels() const { return empty() ? 0 : samples_.front().channel_count(); }
  std::size_t dimension() const { return frames() * channels(); }
  Modality modality() const { return empty() ? Modality::BR : samples_.front().modality; }

  // Joint names of a JC dataset: channel names "joint.x" with the suffix cut.
  std::vector<std::string> joint_names() const {
    std::vector<std::string> out;
    for (std::size_t c = 0; c < channel_names_.size(); c += 3) {
      const auto& n = channel_names_[c];
      out.push_back(n.substr(0, n.rfind('.')));
    }
    return out;
  }

  // Classes ordered by label.
  std::vector<IdentityClass> classes() const {
    std::map<std::string, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < samples_.size(); ++i) by_label[samples_[i].subject].push_back(i);
    std::vector<IdentityClass> out;
    out.reserve(by_label.size());
    for (auto& [label, members] : by_label) out.push_back({label, std::move(members)});
    return out;
  }

  std::size_t class_count() const { return classes().size(); }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    out.reserve(samples_.size());
    for (const auto& s : samples_) out.push_back(s.subject);
    return out;
  }

  // D x N matrix of flattened samples.
  Eigen::MatrixXd sample_matrix() const {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(dimension()), static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < samples_.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = flatten(samples_[i]);
    return m;
  }

  LabeledDataset subset(std::span<const std::size_t> indices) const {
    std::vector<GaitSample> picked;
    picked.reserve(indices.size());
    for (auto i : indices) picked.push_back(samples_.at(i));
    return LabeledDataset(std::move(picked), channel_names_);
  }

 private:
  std::vector<GaitSample> samples_;
  std::vector<std::string> channel_names_;
};

inline std::vector<std::string> joint_channel_names(const std::vector<std::string>& joints) {
  std::vector<std::string> out;
  for (const auto& j : joints)
    for (const char* axis : {".x", ".y", ".z"}) out.push_back(j + axis);
  return out;
}

}  // namespace gaitlab
