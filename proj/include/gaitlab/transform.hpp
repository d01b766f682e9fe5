#pragma once

// Learned linear feature transforms, gait templates and the Mahalanobis
// template distance.

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gaitlab/archive.hpp"
#include "gaitlab/error.hpp"
#include "gaitlab/mocap.hpp"

namespace gaitlab {

enum class LearnMethod { MMC, PCALDA };

inline const char* to_string(LearnMethod m) { return m == LearnMethod::MMC ? "mmc" : "pcalda"; }

inline LearnMethod learn_method_from_string(const std::string& s) {
  if (s == "mmc" || s == "MMC") return LearnMethod::MMC;
  if (s == "pcalda" || s == "PCALDA" || s == "PCA+LDA") return LearnMethod::PCALDA;
  throw InvalidArgument("unknown learning method '" + s + "'");
}

struct FeatureTransform {
  LearnMethod method = LearnMethod::MMC;
  Eigen::MatrixXd phi;              // D x D_hat
  Eigen::MatrixXd scatter_inverse;  // D_hat x D_hat, inverse feature-space total scatter
  // MMC: diagonal of Psi^T Sb Psi for every Psi column, descending.
  // PCA+LDA: generalized eigenvalues of the LDA stage, descending.
  Eigen::VectorXd eigenvalues;
  bool regularized = false;  // scatter was ridge-shifted before inversion

  // Learned-on metadata.
  std::size_t classes = 0;
  std::size_t samples = 0;
  Modality modality = Modality::BR;
  std::size_t frames = 0;
  std::size_t channels = 0;

  std::size_t input_dim() const { return static_cast<std::size_t>(phi.rows()); }
  std::size_t feature_dim() const { return static_cast<std::size_t>(phi.cols()); }
};

struct GaitTemplate {
  Eigen::VectorXd features;
  std::string label;
  std::size_t source = 0;  // index of the originating sample
};

// Flips each column so that its largest-magnitude entry is positive.
inline void canonicalize_signs(Eigen::MatrixXd& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Eigen::Index arg = 0;
    m.col(c).cwiseAbs().maxCoeff(&arg);
    if (m(arg, c) < 0) m.col(c) *= -1.0;
  }
}

inline constexpr double kConditionCap = 1e12;
inline constexpr double kRidge = 1e-9;

struct SymmetricInverse {
  Eigen::MatrixXd inverse;
  bool regularized = false;
};

// Inverse of a symmetric positive semidefinite matrix; ridge-shifted by
// kRidge * trace / n when its condition number exceeds kConditionCap.
inline SymmetricInverse symmetric_inverse(Eigen::MatrixXd s) {
  s = 0.5 * (s + s.transpose());
  const auto n = s.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  double lo = eig.eigenvalues().minCoeff();
  double hi = eig.eigenvalues().maxCoeff();
  SymmetricInverse out;
  if (!(hi > 0.0)) throw SingularityError("feature-space scatter is zero");
  if (!(lo > 0.0) || hi / lo > kConditionCap) {
    s.diagonal().array() += kRidge * s.trace() / static_cast<double>(n);
    eig.compute(s);
    out.regularized = true;
  }
  const Eigen::MatrixXd& v = eig.eigenvectors();
  out.inverse = v * eig.eigenvalues().cwiseInverse().asDiagonal() * v.transpose();
  out.inverse = 0.5 * (out.inverse + out.inverse.transpose());
  return out;
}

inline Eigen::VectorXd project(const FeatureTransform& t, const Eigen::Ref<const Eigen::VectorXd>& sample) {
  if (static_cast<std::size_t>(sample.size()) != t.input_dim())
    throw ShapeError("sample dimension " + std::to_string(sample.size()) + " does not match transform input " +
                     std::to_string(t.input_dim()));
  return t.phi.transpose() * sample;
}

inline GaitTemplate project(const FeatureTransform& t, const GaitSample& sample, std::size_t source = 0) {
  return {project(t, flatten(sample)), sample.subject, source};
}

inline std::vector<GaitTemplate> project_all(const FeatureTransform& t, const LabeledDataset& dataset) {
  std::vector<GaitTemplate> out;
  out.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) out.push_back(project(t, dataset[i], i));
  return out;
}

// Mahalanobis distance for a fixed inverse scatter, validated once.
class MahalanobisMetric {
 public:
  explicit MahalanobisMetric(Eigen::MatrixXd inverse_scatter) : m_(std::move(inverse_scatter)) {
    if (m_.rows() != m_.cols()) throw InvalidArgument("Mahalanobis matrix must be square");
    if (!m_.isApprox(m_.transpose(), 1e-9)) throw InvalidArgument("Mahalanobis matrix must be symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(m_);
    if (llt.info() != Eigen::Success) throw InvalidArgument("Mahalanobis matrix must be positive definite");
  }

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b) const {
    if (a.size() != m_.rows() || b.size() != m_.rows()) throw ShapeError("template dimension mismatch");
    Eigen::VectorXd d = a - b;
    return std::sqrt(std::max(0.0, d.dot(m_ * d)));
  }

  const Eigen::MatrixXd& matrix() const { return m_; }

 private:
  Eigen::MatrixXd m_;
};

inline double mahalanobis(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                          const Eigen::MatrixXd& inverse_scatter) {
  return MahalanobisMetric(inverse_scatter)(a, b);
}

inline double mahalanobis(const GaitTemplate& a, const GaitTemplate& b, const Eigen::MatrixXd& inverse_scatter) {
  return mahalanobis(a.features, b.features, inverse_scatter);
}

// tr(Phi^T (Sb - Sw) Phi)
inline double mmc_objective(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& between,
                            const Eigen::MatrixXd& within) {
  if (between.rows() != phi.rows() || within.rows() != phi.rows() || between.cols() != between.rows() ||
      within.cols() != within.rows())
    throw ShapeError("objective operands have incompatible shapes");
  return (phi.transpose() * (between - within) * phi).trace();
}

// Transforms use the dataset archive layout: JSON header, then phi
// (column-major), the inverse scatter and the eigenvalues as float64.
inline void save_transform(const FeatureTransform& t, const std::filesystem::path& path) {
  Archive a;
  a.header = {{"kind", "transform"},
              {"method", to_string(t.method)},
              {"input_dim", t.input_dim()},
              {"feature_dim", t.feature_dim()},
              {"eigenvalue_count", t.eigenvalues.size()},
              {"regularized", t.regularized},
              {"classes", t.classes},
              {"samples", t.samples},
              {"modality", to_string(t.modality)},
              {"frames", t.frames},
              {"channels", t.channels}};
  a.values.assign(t.phi.data(), t.phi.data() + t.phi.size());
  a.values.insert(a.values.end(), t.scatter_inverse.data(), t.scatter_inverse.data() + t.scatter_inverse.size());
  a.values.insert(a.values.end(), t.eigenvalues.data(), t.eigenvalues.data() + t.eigenvalues.size());
  write_archive(path, a);
}

inline FeatureTransform load_transform(const std::filesystem::path& path) {
  Archive a = read_archive(path);
  try {
    const auto& h = a.header;
    if (h.at("kind") != "transform") throw IoError(IoError::Kind::malformed, "archive does not hold a transform");
    FeatureTransform t;
    t.method = learn_method_from_string(h.at("method").get<std::string>());
    const auto D = h.at("input_dim").get<Eigen::Index>();
    const auto K = h.at("feature_dim").get<Eigen::Index>();
    const auto E = h.at("eigenvalue_count").get<Eigen::Index>();
    if (static_cast<std::size_t>(D * K + K * K + E) != a.values.size())
      throw IoError(IoError::Kind::malformed, "transform value block has the wrong size");
    const double* p = a.values.data();
    t.phi = Eigen::Map<const Eigen::MatrixXd>(p, D, K);
    t.scatter_inverse = Eigen::Map<const Eigen::MatrixXd>(p + D * K, K, K);
    t.eigenvalues = Eigen::Map<const Eigen::VectorXd>(p + D * K + K * K, E);
    t.regularized = h.at("regularized").get<bool>();
    t.classes = h.at("classes").get<std::size_t>();
    t.samples = h.at("samples").get<std::size_t>();
    t.modality = modality_from_string(h.at("modality").get<std::string>());
    t.frames = h.at("frames").get<std::size_t>();
    t.channels = h.at("channels").get<std::size_t>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(IoError::Kind::malformed, std::string("bad transform header: ") + e.what());
  }
}

}  // namespace gaitlab
