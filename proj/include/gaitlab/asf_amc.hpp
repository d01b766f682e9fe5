#pragma once

// Acclaim ASF skeleton and AMC motion files as distributed with the CMU
// motion capture database.

#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gaitlab/error.hpp"
#include "gaitlab/mocap.hpp"

namespace gaitlab {

namespace detail {

struct Line {
  std::size_t number;
  std::vector<std::string> tokens;
};

// Splits text into whitespace-tokenized lines, dropping '#' comments and
// blank lines.
inline std::vector<Line> tokenize_lines(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    std::string_view raw = text.substr(pos, end - pos);
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::istringstream in{std::string(raw)};
    Line line{number, {}};
    for (std::string tok; in >> tok;) line.tokens.push_back(tok);
    if (!line.tokens.empty()) out.push_back(std::move(line));
    pos = end + 1;
  }
  return out;
}

inline double parse_number(const std::string& tok, std::size_t line) {
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError("expected a number, got '" + tok + "'", line);
  }
}

inline Dof parse_dof(const std::string& tok, std::size_t line) {
  auto d = dof_from_string(tok);
  if (!d) throw ParseError("unknown dof '" + tok + "'", line);
  return *d;
}

inline std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace detail

inline Skeleton parse_asf(std::string_view text) {
  using detail::Line;
  const auto lines = detail::tokenize_lines(text);

  // Group lines by ':section'.
  std::map<std::string, std::vector<Line>> sections;
  std::map<std::string, std::size_t> section_line;
  std::string current;
  for (const auto& line : lines) {
    if (line.tokens[0][0] == ':') {
      current = line.tokens[0].substr(1);
      section_line[current] = line.number;
      auto& body = sections[current];
      // ':version 1.10' style headers carry their value inline.
      if (line.tokens.size() > 1) body.push_back({line.number, {line.tokens.begin() + 1, line.tokens.end()}});
      continue;
    }
    if (current.empty()) throw ParseError("content before the first section", line.number);
    sections[current].push_back(line);
  }
  for (const char* required : {"units", "root", "bonedata", "hierarchy"})
    if (!sections.count(required)) throw ParseError(std::string("missing section :") + required);

  AngleUnit unit = AngleUnit::degrees;
  for (const auto& l : sections["units"]) {
    if (l.tokens[0] == "angle" && l.tokens.size() >= 2) {
      if (l.tokens[1] == "deg") unit = AngleUnit::degrees;
      else if (l.tokens[1] == "rad") unit = AngleUnit::radians;
      else throw ParseError("unknown angle unit '" + l.tokens[1] + "'", l.number);
    }
  }
  auto angle = [unit](double v) { return unit == AngleUnit::degrees ? v * std::numbers::pi / 180.0 : v; };

  std::vector<Bone> bones;
  Bone root;
  root.name = "root";
  for (const auto& l : sections["root"]) {
    const auto& t = l.tokens;
    if (t[0] == "order") {
      for (std::size_t i = 1; i < t.size(); ++i) root.dofs.push_back(detail::parse_dof(t[i], l.number));
    } else if (t[0] == "axis") {
      if (t.size() != 2 || t[1].size() != 3) throw ParseError("malformed root axis", l.number);
      root.axis_order = detail::upper(t[1]);
    } else if (t[0] == "orientation") {
      if (t.size() != 4) throw ParseError("root orientation needs 3 values", l.number);
      for (int k = 0; k < 3; ++k) root.axis[k] = angle(detail::parse_number(t[1 + k], l.number));
    }
  }
  bones.push_back(root);

  std::map<std::string, std::size_t> line_of;
  bool open = false;
  Bone bone;
  std::size_t begin_line = 0;
  bool in_limits = false;
  for (const auto& l : sections["bonedata"]) {
    const auto& t = l.tokens;
    if (t[0] == "begin") {
      if (open) throw ParseError("nested 'begin' in bonedata", l.number);
      open = true;
      in_limits = false;
      bone = Bone{};
      begin_line = l.number;
      continue;
    }
    if (!open) throw ParseError("bone record outside begin/end", l.number);
    if (t[0] == "end") {
      if (bone.name.empty()) throw ParseError("bone record without a name", begin_line);
      double n = bone.direction.norm();
      if (!(n > 0.0)) throw ParseError("bone '" + bone.name + "' has a zero direction", begin_line);
      bone.direction /= n;
      if (line_of.count(bone.name)) throw ParseError("duplicate bone '" + bone.name + "'", begin_line);
      line_of[bone.name] = begin_line;
      bones.push_back(bone);
      open = false;
      continue;
    }
    if (t[0] == "id") {
      in_limits = false;
    } else if (t[0] == "name") {
      if (t.size() != 2) throw ParseError("malformed bone name", l.number);
      bone.name = t[1];
      in_limits = false;
    } else if (t[0] == "direction") {
      if (t.size() != 4) throw ParseError("direction needs 3 values", l.number);
      for (int k = 0; k < 3; ++k) bone.direction[k] = detail::parse_number(t[1 + k], l.number);
      in_limits = false;
    } else if (t[0] == "length") {
      if (t.size() != 2) throw ParseError("length needs 1 value", l.number);
      bone.length = detail::parse_number(t[1], l.number);
      if (bone.length < 0) throw ParseError("negative bone length", l.number);
      in_limits = false;
    } else if (t[0] == "axis") {
      if (t.size() != 5 || t[4].size() != 3) throw ParseError("axis needs 3 angles and an order", l.number);
      for (int k = 0; k < 3; ++k) bone.axis[k] = angle(detail::parse_number(t[1 + k], l.number));
      bone.axis_order = detail::upper(t[4]);
      in_limits = false;
    } else if (t[0] == "dof") {
      for (std::size_t i = 1; i < t.size(); ++i) bone.dofs.push_back(detail::parse_dof(t[i], l.number));
      in_limits = false;
    } else if (t[0] == "limits") {
      in_limits = true;
    } else if (t[0] == "bodymass" || t[0] == "cofmass") {
      in_limits = false;
    } else if (!in_limits) {
      throw ParseError("unexpected keyword '" + t[0] + "' in bone record", l.number);
    }
  }
  if (open) throw ParseError("unterminated bone record", begin_line);

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < bones.size(); ++i) index[bones[i].name] = i;
  std::set<std::string> assigned;
  for (const auto& l : sections["hierarchy"]) {
    const auto& t = l.tokens;
    if (t[0] == "begin" || t[0] == "end") continue;
    if (!index.count(t[0])) {
      std::string children;
      for (std::size_t i = 1; i < t.size(); ++i) children += (i > 1 ? ", '" : "'") + t[i] + "'";
      throw ParseError("bone " + children + " references unknown parent '" + t[0] + "'", l.number);
    }
    for (std::size_t i = 1; i < t.size(); ++i) {
      auto it = index.find(t[i]);
      if (it == index.end()) throw ParseError("hierarchy names unknown bone '" + t[i] + "'", l.number);
      if (t[i] == "root") throw ParseError("root cannot have a parent", l.number);
      if (!assigned.insert(t[i]).second) throw ParseError("bone '" + t[i] + "' has two parents", l.number);
      bones[it->second].parent = t[0];
    }
  }
  for (std::size_t i = 1; i < bones.size(); ++i)
    if (bones[i].parent.empty())
      throw ParseError("bone '" + bones[i].name + "' is missing from the hierarchy", line_of[bones[i].name]);

  try {
    return Skeleton(std::move(bones), unit);
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), section_line["hierarchy"]);
  }
}

// Debug writer; parse_asf(serialize_asf(s)) reproduces the structure of s.
inline std::string serialize_asf(const Skeleton& skeleton) {
  const bool deg = skeleton.angle_unit() == AngleUnit::degrees;
  auto angle = [deg](double r) { return deg ? r * 180.0 / std::numbers::pi : r; };
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << ":version 1.10\n:name gaitlab\n:units\n  mass 1.0\n  length 1.0\n  angle "
      << (deg ? "deg" : "rad") << "\n:root\n";
  const Bone& root = skeleton.root();
  out << "  order";
  for (Dof d : root.dofs) out << ' ' << detail::upper(to_string(d));
  out << "\n  axis " << root.axis_order << "\n  position 0 0 0\n  orientation " << angle(root.axis[0]) << ' '
      << angle(root.axis[1]) << ' ' << angle(root.axis[2]) << "\n:bonedata\n";
  const auto& bones = skeleton.bones();
  for (std::size_t i = 1; i < bones.size(); ++i) {
    const Bone& b = bones[i];
    out << "  begin\n    id " << i << "\n    name " << b.name << "\n    direction " << b.direction[0] << ' '
        << b.direction[1] << ' ' << b.direction[2] << "\n    length " << b.length << "\n    axis "
        << angle(b.axis[0]) << ' ' << angle(b.axis[1]) << ' ' << angle(b.axis[2]) << ' ' << b.axis_order << '\n';
    if (!b.dofs.empty()) {
      out << "    dof";
      for (Dof d : b.dofs) out << ' ' << to_string(d);
      out << '\n';
    }
    out << "  end\n";
  }
  out << ":hierarchy\n  begin\n";
  for (std::size_t p = 0; p < bones.size(); ++p) {
    std::string line;
    for (std::size_t c = 1; c < bones.size(); ++c)
      if (skeleton.parent(c) == p) line += ' ' + bones[c].name;
    if (!line.empty()) out << "    " << bones[p].name << line << '\n';
  }
  out << "  end\n";
  return out.str();
}

inline BoneRotationSequence parse_amc(std::string_view text, const Skeleton& skeleton,
                                      double frame_rate = 120.0) {
  const auto lines = detail::tokenize_lines(text);
  const auto& bones = skeleton.bones();
  const std::size_t width = skeleton.channel_count();
  std::vector<double> values;
  std::vector<bool> filled(bones.size());
  std::size_t frame = 0;
  std::size_t frame_line = 0;

  auto close_frame = [&]() {
    if (frame == 0) return;
    for (std::size_t i = 0; i < bones.size(); ++i)
      if (!filled[i] && !bones[i].dofs.empty())
        throw ParseError("frame " + std::to_string(frame) + " lacks bone '" + bones[i].name + "'", frame_line);
  };

  for (const auto& l : lines) {
    const auto& t = l.tokens;
    if (t[0][0] == ':') continue;
    if (t.size() == 1 && std::all_of(t[0].begin(), t[0].end(), [](unsigned char c) { return std::isdigit(c); })) {
      close_frame();
      std::size_t n = std::stoul(t[0]);
      if (n != frame + 1) {
        if (n > frame + 1) throw ParseError("missing frame " + std::to_string(frame + 1), l.number);
        throw ParseError("frame " + std::to_string(n) + " out of order", l.number);
      }
      frame = n;
      frame_line = l.number;
      values.resize(values.size() + width, 0.0);
      std::fill(filled.begin(), filled.end(), false);
      continue;
    }
    if (frame == 0) throw ParseError("bone data before the first frame number", l.number);
    auto bi = skeleton.find(t[0]);
    if (!bi) throw ParseError("frame " + std::to_string(frame) + ": unknown bone '" + t[0] + "'", l.number);
    const Bone& b = bones[*bi];
    if (t.size() - 1 != b.dofs.size())
      throw ParseError("frame " + std::to_string(frame) + ": bone '" + b.name + "' expects " +
                           std::to_string(b.dofs.size()) + " values, got " + std::to_string(t.size() - 1),
                       l.number);
    if (filled[*bi]) throw ParseError("frame " + std::to_string(frame) + ": bone '" + b.name + "' repeated", l.number);
    filled[*bi] = true;
    double* row = values.data() + (frame - 1) * width + skeleton.channel_offset(*bi);
    for (std::size_t k = 0; k < b.dofs.size(); ++k) row[k] = detail::parse_number(t[1 + k], l.number);
  }
  close_frame();
  if (frame == 0) throw ParseError("motion has no frames");

  BoneRotationSequence seq;
  seq.frame_rate = frame_rate;
  seq.values = Eigen::Map<FrameMatrix>(values.data(), static_cast<Eigen::Index>(frame),
                                       static_cast<Eigen::Index>(width));
  return seq;
}

inline std::string serialize_amc(const Skeleton& skeleton, const BoneRotationSequence& motion) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << ":FULLY-SPECIFIED\n" << (skeleton.angle_unit() == AngleUnit::degrees ? ":DEGREES\n" : ":RADIANS\n");
  const auto& bones = skeleton.bones();
  for (Eigen::Index f = 0; f < motion.values.rows(); ++f) {
    out << (f + 1) << '\n';
    for (std::size_t i = 0; i < bones.size(); ++i) {
      if (bones[i].dofs.empty()) continue;
      out << bones[i].name;
      for (std::size_t k = 0; k < bones[i].dofs.size(); ++k)
        out << ' ' << motion.values(f, static_cast<Eigen::Index>(skeleton.channel_offset(i) + k));
      out << '\n';
    }
  }
  return out.str();
}

struct PrototypeOptions {
  // Largest allowed per-component difference of bone directions and axis
  // angles between input skeletons.
  double tolerance = 1e-6;
  // Average (and renormalize) directions and axes instead of requiring them
  // to agree.
  bool average_geometry = false;
};

// Mean skeleton: bone lengths are averaged; structure comes from the first
// skeleton and must match across all inputs.
inline Skeleton prototypical_skeleton(const std::vector<Skeleton>& skeletons, PrototypeOptions opts = {}) {
  if (skeletons.empty()) throw InvalidArgument("no skeletons to average");
  const Skeleton& first = skeletons.front();
  std::vector<Bone> bones = first.bones();
  for (auto& b : bones) {
    b.length = 0.0;
    if (opts.average_geometry && !b.parent.empty()) {
      b.direction.setZero();
      b.axis.setZero();
    }
  }
  for (const auto& s : skeletons) {
    if (s.size() != first.size() || s.angle_unit() != first.angle_unit())
      throw IncompatibleSkeletons("skeletons differ in bone count or angle unit");
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Bone& a = first.bones()[i];
      const Bone& b = s.bones()[i];
      if (a.name != b.name || a.parent != b.parent || a.dofs != b.dofs || a.axis_order != b.axis_order)
        throw IncompatibleSkeletons("bone '" + b.name + "' differs in name, parent, dofs or axis order");
      if (opts.average_geometry) {
        bones[i].direction += b.direction;
        bones[i].axis += b.axis;
      } else if ((a.direction - b.direction).cwiseAbs().maxCoeff() > opts.tolerance ||
                 (a.axis - b.axis).cwiseAbs().maxCoeff() > opts.tolerance) {
        throw IncompatibleSkeletons("bone '" + b.name + "' differs in direction or axis");
      }
      bones[i].length += b.length;
    }
  }
  const double n = static_cast<double>(skeletons.size());
  for (auto& b : bones) {
    b.length /= n;
    if (opts.average_geometry && !b.parent.empty()) {
      b.axis /= n;
      if (b.direction.norm() == 0.0) throw IncompatibleSkeletons("bone '" + b.name + "' directions cancel out");
      b.direction.normalize();
    }
  }
  return Skeleton(std::move(bones), first.angle_unit());
}

}  // namespace gaitlab
