#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "gaitlab/error.hpp"
#include "gaitlab/mocap.hpp"

namespace gaitlab {

// Between-class, within-class and total scatter of a labeled dataset, with
// each class weighted by 1/N_c inside the within and total sums and the
// between-class sum unweighted over classes. total == between + within.
struct ScatterTriple {
  Eigen::MatrixXd between;
  Eigen::MatrixXd within;
  Eigen::MatrixXd total;
  Eigen::VectorXd mean;         // overall sample mean
  Eigen::MatrixXd class_means;  // C x D, rows follow dataset.classes()
};

// Column factors of the scatter matrices, so that e.g. between = U U^T.
// Kept separate because D x D products are too large for real gait data.
struct ScatterFactors {
  Eigen::MatrixXd centered;       // D x N, (g_n - mu) / sqrt(N_c)
  Eigen::MatrixXd class_centered; // D x N, (g_n - mu_c) / sqrt(N_c)
  Eigen::MatrixXd class_offsets;  // D x C, mu_c - mu
  Eigen::VectorXd mean;
  std::vector<IdentityClass> classes;
};

inline ScatterFactors scatter_factors(const LabeledDataset& dataset) {
  if (dataset.empty()) throw InvalidArgument("scatter of an empty dataset");
  ScatterFactors f;
  f.classes = dataset.classes();
  const Eigen::MatrixXd g = dataset.sample_matrix();
  const auto D = g.rows();
  const auto C = static_cast<Eigen::Index>(f.classes.size());
  f.mean = g.rowwise().mean();
  f.centered.resize(D, g.cols());
  f.class_centered.resize(D, g.cols());
  f.class_offsets.resize(D, C);
  for (Eigen::Index c = 0; c < C; ++c) {
    const auto& members = f.classes[static_cast<std::size_t>(c)].members;
    Eigen::VectorXd mu_c = Eigen::VectorXd::Zero(D);
    for (auto i : members) mu_c += g.col(static_cast<Eigen::Index>(i));
    mu_c /= static_cast<double>(members.size());
    f.class_offsets.col(c) = mu_c - f.mean;
    const double w = 1.0 / std::sqrt(static_cast<double>(members.size()));
    for (auto i : members) {
      const auto n = static_cast<Eigen::Index>(i);
      f.centered.col(n) = w * (g.col(n) - f.mean);
      f.class_centered.col(n) = w * (g.col(n) - mu_c);
    }
  }
  return f;
}

inline ScatterTriple scatter_matrices(const LabeledDataset& dataset) {
  const ScatterFactors f = scatter_factors(dataset);
  ScatterTriple s;
  s.mean = f.mean;
  s.class_means = (f.class_offsets.colwise() + f.mean).transpose();
  s.between = f.class_offsets * f.class_offsets.transpose();
  s.within = f.class_centered * f.class_centered.transpose();
  s.total = f.centered * f.centered.transpose();
  return s;
}

}  // namespace gaitlab
