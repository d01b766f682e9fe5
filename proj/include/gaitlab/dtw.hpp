#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gaitlab/error.hpp"
#include "gaitlab/mocap.hpp"

namespace gaitlab {

enum class LocalCost { L1, L2 };

// Step set {(1,0),(0,1),(1,1)}, unweighted, full alignment from the first
// frame pair to the last. The accumulated cost is not normalized.
struct WarpSpec {
  LocalCost cost = LocalCost::L2;
};

template <typename A, typename B>
double frame_cost(const A& a, const B& b, LocalCost cost) {
  if (cost == LocalCost::L1) return (a - b).cwiseAbs().sum();
  return (a - b).norm();
}

// Minimal accumulated local cost over monotone warping paths. Two rolling
// rows; the full cost matrix is never stored.
inline double dtw_distance(const FrameMatrix& a, const FrameMatrix& b, WarpSpec spec = {}) {
  if (a.rows() == 0 || b.rows() == 0) throw InvalidArgument("DTW needs non-empty sequences");
  if (a.cols() != b.cols())
    throw ShapeError("DTW channel mismatch: " + std::to_string(a.cols()) + " vs " + std::to_string(b.cols()));
  // Keep the shorter sequence along the row to bound memory.
  const FrameMatrix& outer = a.rows() >= b.rows() ? a : b;
  const FrameMatrix& inner = a.rows() >= b.rows() ? b : a;
  const Eigen::Index m = inner.rows();
  std::vector<double> prev(static_cast<std::size_t>(m)), curr(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < outer.rows(); ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      double best;
      if (i == 0 && j == 0) best = 0.0;
      else if (i == 0) best = curr[j - 1];
      else if (j == 0) best = prev[j];
      else best = std::min({prev[j], curr[j - 1], prev[j - 1]});
      curr[j] = best + frame_cost(outer.row(i), inner.row(j), spec.cost);
    }
    std::swap(prev, curr);
  }
  return prev[static_cast<std::size_t>(m - 1)];
}

}  // namespace gaitlab
