#pragma once

// Transform learning: Maximum Margin Criterion and two-stage PCA+LDA.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "gaitlab/error.hpp"
#include "gaitlab/mocap.hpp"
#include "gaitlab/scatter.hpp"
#include "gaitlab/transform.hpp"

namespace gaitlab {

namespace detail {

inline double default_rank_tolerance(Eigen::Index rows, Eigen::Index cols) {
  return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();
}

// Indices sorted by value descending, ties by index.
inline std::vector<Eigen::Index> descending_order(const Eigen::VectorXd& v) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(v.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return v[a] > v[b]; });
  return idx;
}

inline void fill_metadata(FeatureTransform& t, const LabeledDataset& d, std::size_t classes) {
  t.classes = classes;
  t.samples = d.size();
  t.modality = d.modality();
  t.frames = d.frames();
  t.channels = d.channels();
}

}  // namespace detail

struct MmcOptions {
  // Singular values of the centered data below tolerance * sigma_max are
  // treated as zero. Default: max(D, N) * machine epsilon.
  std::optional<double> rank_tolerance;
};

// Full output of the MMC solver; `psi` holds every simultaneous-
// diagonalization direction, `delta` the matching diagonal of Psi^T Sb Psi.
struct MmcSolution {
  FeatureTransform transform;
  Eigen::MatrixXd psi;
  Eigen::VectorXd delta;
  Eigen::MatrixXd data;     // X: (g_n - mu) / sqrt(N), D x N
  Eigen::MatrixXd offsets;  // Upsilon: mu_c - mu, D x C
};

// Two-step SVD solution. Sb = Upsilon Upsilon^T and St = X X^T with
// X = [(g_n - mu)] / sqrt(N); Psi = Omega Theta^{-1/2} Xi whitens St and
// diagonalizes Sb. Columns with delta >= 1/2 are the directions where
// Sb - Sw = 2 Sb - St is positive.
inline MmcSolution solve_mmc(const LabeledDataset& dataset, MmcOptions opts = {}) {
  const auto classes = dataset.classes();
  const auto C = static_cast<Eigen::Index>(classes.size());
  const auto N = static_cast<Eigen::Index>(dataset.size());
  if (C < 2) throw InvalidArgument("MMC needs at least 2 classes, got " + std::to_string(C));
  if (N < C + 1) throw InvalidArgument("MMC needs more samples than classes");

  const Eigen::MatrixXd g = dataset.sample_matrix();
  const auto D = g.rows();
  const Eigen::VectorXd mu = g.rowwise().mean();

  MmcSolution sol;
  sol.data = (g.colwise() - mu) / std::sqrt(static_cast<double>(N));
  sol.offsets.resize(D, C);
  for (Eigen::Index c = 0; c < C; ++c) {
    Eigen::VectorXd mu_c = Eigen::VectorXd::Zero(D);
    for (auto i : classes[static_cast<std::size_t>(c)].members) mu_c += g.col(static_cast<Eigen::Index>(i));
    mu_c /= static_cast<double>(classes[static_cast<std::size_t>(c)].members.size());
    sol.offsets.col(c) = mu_c - mu;
  }

  // Eigenvectors Omega and eigenvalues Theta of St via the SVD of X.
  Eigen::BDCSVD<Eigen::MatrixXd> svd_x(sol.data, Eigen::ComputeThinU);
  const Eigen::VectorXd& sigma = svd_x.singularValues();
  const double tol = opts.rank_tolerance.value_or(detail::default_rank_tolerance(D, N));
  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma[rank] > tol * sigma[0]) ++rank;
  if (rank == 0) throw EmptyTransform("learning data has no variance");
  const Eigen::MatrixXd omega = svd_x.matrixU().leftCols(rank);
  const Eigen::VectorXd inv_sqrt_theta = sigma.head(rank).cwiseInverse();

  // Xi from the SVD of Theta^{-1/2} Omega^T Upsilon.
  const Eigen::MatrixXd b = inv_sqrt_theta.asDiagonal() * (omega.transpose() * sol.offsets);
  Eigen::BDCSVD<Eigen::MatrixXd> svd_b(b, Eigen::ComputeFullU);
  const Eigen::MatrixXd& xi = svd_b.matrixU();

  Eigen::MatrixXd psi = omega * inv_sqrt_theta.asDiagonal() * xi;
  const Eigen::MatrixXd proj = psi.transpose() * sol.offsets;
  Eigen::VectorXd delta = proj.rowwise().squaredNorm();

  const auto order = detail::descending_order(delta);
  sol.psi.resize(D, rank);
  sol.delta.resize(rank);
  for (Eigen::Index k = 0; k < rank; ++k) {
    sol.psi.col(k) = psi.col(order[static_cast<std::size_t>(k)]);
    sol.delta[k] = delta[order[static_cast<std::size_t>(k)]];
  }
  canonicalize_signs(sol.psi);

  Eigen::Index kept = 0;
  while (kept < rank && sol.delta[kept] >= 0.5) ++kept;
  if (kept == 0) {
    std::ostringstream msg;
    msg << "no direction reaches delta >= 1/2 (largest delta " << sol.delta[0] << ")";
    throw EmptyTransform(msg.str());
  }

  FeatureTransform& t = sol.transform;
  t.method = LearnMethod::MMC;
  t.phi = sol.psi.leftCols(kept);
  t.eigenvalues = sol.delta;
  const Eigen::MatrixXd f = t.phi.transpose() * sol.data;
  auto inv = symmetric_inverse(f * f.transpose());
  t.scatter_inverse = std::move(inv.inverse);
  t.regularized = inv.regularized;
  detail::fill_metadata(t, dataset, classes.size());
  return sol;
}

inline FeatureTransform learn_mmc(const LabeledDataset& dataset, MmcOptions opts = {}) {
  return solve_mmc(dataset, opts).transform;
}

struct PcaLdaOptions {
  std::optional<std::size_t> pca_dims;  // default: number of classes
  double condition_cap = kConditionCap;
  std::optional<double> rank_tolerance;
};

// PCA onto the leading eigenvectors of St, then Fisher LDA in that space.
inline FeatureTransform learn_pcalda(const LabeledDataset& dataset, PcaLdaOptions opts = {}) {
  const ScatterFactors f = scatter_factors(dataset);
  const auto C = static_cast<Eigen::Index>(f.classes.size());
  const auto N = static_cast<Eigen::Index>(dataset.size());
  const auto D = f.centered.rows();
  if (C < 2) throw InvalidArgument("PCA+LDA needs at least 2 classes, got " + std::to_string(C));
  const auto pca = static_cast<Eigen::Index>(opts.pca_dims.value_or(static_cast<std::size_t>(C)));
  if (pca < C || pca > N - C)
    throw InvalidArgument("PCA dimension " + std::to_string(pca) + " must lie in [C, N - C] = [" + std::to_string(C) +
                          ", " + std::to_string(N - C) + "]");
  if (pca > std::min(D, N)) throw InvalidArgument("PCA dimension exceeds the data dimension");

  Eigen::BDCSVD<Eigen::MatrixXd> svd(f.centered, Eigen::ComputeThinU);
  const Eigen::MatrixXd phi_pca = svd.matrixU().leftCols(pca);

  const Eigen::MatrixXd w = phi_pca.transpose() * f.class_centered;
  const Eigen::MatrixXd u = phi_pca.transpose() * f.class_offsets;
  const Eigen::MatrixXd sw = w * w.transpose();
  const Eigen::MatrixXd sb = u * u.transpose();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sw_eig(sw, Eigen::EigenvaluesOnly);
  const double lo = sw_eig.eigenvalues().minCoeff();
  const double hi = sw_eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > opts.condition_cap) {
    std::ostringstream msg;
    msg << "within-class scatter in PCA space is singular (condition " << (lo > 0.0 ? hi / lo : INFINITY)
        << "); use more learning samples or fewer PCA dimensions";
    throw SingularityError(msg.str());
  }

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(sb, sw, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  const Eigen::VectorXd lambda = ges.eigenvalues().reverse();
  const Eigen::MatrixXd vectors = ges.eigenvectors().rowwise().reverse();
  const double tol = opts.rank_tolerance.value_or(detail::default_rank_tolerance(pca, N));
  Eigen::Index kept = 0;
  while (kept < lambda.size() && kept < C - 1 && lambda[kept] > tol * lambda[0] && lambda[kept] > 0.0) ++kept;
  if (kept == 0) throw EmptyTransform("LDA found no discriminant direction");

  FeatureTransform t;
  t.method = LearnMethod::PCALDA;
  t.phi = phi_pca * vectors.leftCols(kept);
  canonicalize_signs(t.phi);
  t.eigenvalues = lambda;
  const Eigen::MatrixXd z = t.phi.transpose() * f.centered;
  auto inv = symmetric_inverse(z * z.transpose());
  t.scatter_inverse = std::move(inv.inverse);
  t.regularized = inv.regularized;
  detail::fill_metadata(t, dataset, f.classes.size());
  return t;
}

inline FeatureTransform learn(LearnMethod method, const LabeledDataset& dataset) {
  return method == LearnMethod::MMC ? learn_mmc(dataset) : learn_pcalda(dataset);
}

}  // namespace gaitlab
