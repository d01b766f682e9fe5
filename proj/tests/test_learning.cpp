#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "support.hpp"

using namespace gaitlab;

namespace {

Eigen::MatrixXd random_orthonormal(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
}

LabeledDataset random_small(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> D(2, 30), C(2, 6);
  const std::size_t d = D(rng), c = C(rng);
  return fixtures::random_dataset(rng, d, c, 2, 12);
}

using oracle::factors;

}  // namespace

TEST(Scatter, OneDimensionalFixture) {
  auto d = fixtures::vectors({{"a", {0}}, {"a", {2}}, {"b", {10}}, {"b", {12}}});
  auto s = scatter_matrices(d);
  EXPECT_DOUBLE_EQ(s.mean[0], 6.0);
  EXPECT_DOUBLE_EQ(s.between(0, 0), 50.0);
  EXPECT_DOUBLE_EQ(s.within(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(s.total(0, 0), 52.0);
  EXPECT_DOUBLE_EQ(s.class_means(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(s.class_means(1, 0), 11.0);
}

TEST(Scatter, DegenerateCases) {
  auto singletons = scatter_matrices(fixtures::vectors({{"a", {1, 2}}, {"b", {3, 5}}}));
  EXPECT_TRUE(singletons.within.isZero(0.0));
  auto one_class = scatter_matrices(fixtures::vectors({{"a", {1, 2}}, {"a", {3, 5}}, {"a", {0, 1}}}));
  EXPECT_TRUE(one_class.between.isZero(1e-15));
  EXPECT_THROW(scatter_matrices(LabeledDataset{}), InvalidArgument);
}

TEST(Scatter, IdentitySymmetryAndSemidefiniteness) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    auto d = random_small(rng);
    auto s = scatter_matrices(d);
    EXPECT_LE((s.total - s.between - s.within).norm(), 1e-8 * s.total.norm());
    for (const auto* m : {&s.between, &s.within, &s.total}) {
      EXPECT_LE((*m - m->transpose()).cwiseAbs().maxCoeff(), 1e-9);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(*m);
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-9 * std::max(1.0, es.eigenvalues().maxCoeff()));
    }
  }
}

TEST(Mmc, AgreesWithDenseOracle) {
  std::mt19937_64 rng(2);
  int solved = 0;
  for (int trial = 0; trial < 40; ++trial) {
    auto d = random_small(rng);
    const auto [X, U] = factors(d);
    const auto ref = oracle::mmc(X, U);
    MmcSolution sol;
    try {
      sol = solve_mmc(d);
    } catch (const EmptyTransform&) {
      EXPECT_EQ(ref.selected.size(), 0) << "trial " << trial;
      continue;
    }
    ++solved;
    const auto& phi = sol.transform.phi;
    ASSERT_EQ(phi.cols(), ref.basis.cols()) << "trial " << trial;
    EXPECT_LE(oracle::max_principal_angle(phi, ref.basis), 1e-6) << "trial " << trial;
    const Eigen::MatrixXd sb = U * U.transpose();
    const Eigen::MatrixXd sw = X * X.transpose() - sb;
    const double j = mmc_objective(phi, sb, sw);
    EXPECT_NEAR(j, ref.selected.sum(), 1e-6 * std::max(1.0, std::abs(ref.selected.sum())));
    EXPECT_NEAR(j, (2.0 * sol.delta.head(phi.cols()).array() - 1.0).sum(), 1e-6 * std::max(1.0, std::abs(j)));
  }
  EXPECT_GT(solved, 30);
}

TEST(Mmc, WhiteningRankAndSelection) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    auto d = random_small(rng);
    auto sol = solve_mmc(d);
    const auto& t = sol.transform;
    const Eigen::MatrixXd f = t.phi.transpose() * sol.data;
    const auto k = t.phi.cols();
    EXPECT_LE((f * f.transpose() - Eigen::MatrixXd::Identity(k, k)).norm(), 1e-6);
    EXPECT_LE(static_cast<std::size_t>(k), d.class_count() - 1);
    for (Eigen::Index i = 0; i < sol.delta.size(); ++i) {
      if (i < k) EXPECT_GE(sol.delta[i], 0.5 - 1e-9);
      else EXPECT_LT(sol.delta[i], 0.5 + 1e-9);
      if (i) EXPECT_GE(sol.delta[i - 1], sol.delta[i]);
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      Eigen::Index arg;
      t.phi.col(c).cwiseAbs().maxCoeff(&arg);
      EXPECT_GT(t.phi(arg, c), 0.0);
    }
    EXPECT_TRUE(t.scatter_inverse.isApprox(Eigen::MatrixXd::Identity(k, k), 1e-6));
  }
}

// Two elongated, well separated 3-D classes: the single direction is the
// dominant generalized eigenvector of (2 Sb - St, St).
TEST(Mmc, TwoClassesGiveOneDirection) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  for (int i = 0; i < 30; ++i) {
    rows.push_back({"a", {3 * n(rng), n(rng), 0.3 * n(rng)}});
    rows.push_back({"b", {3 * n(rng) + 1, n(rng) + 6, 0.3 * n(rng) - 2}});
  }
  auto d = fixtures::vectors(rows);
  auto t = learn_mmc(d);
  ASSERT_EQ(t.feature_dim(), 1u);
  const auto [X, U] = factors(d);
  const Eigen::MatrixXd St = X * X.transpose(), Sb = U * U.transpose();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(2 * Sb - St, St);
  Eigen::VectorXd top = ges.eigenvectors().col(2);
  const double cosine = std::abs(top.normalized().dot(t.phi.col(0).normalized()));
  EXPECT_NEAR(cosine, 1.0, 1e-9);
}

TEST(Mmc, ZeroWithinClassSpread) {
  for (std::size_t C : {2, 3, 5}) {
    std::vector<std::pair<std::string, std::vector<double>>> rows;
    std::mt19937_64 rng(C);
    std::normal_distribution<double> n;
    for (std::size_t c = 0; c < C; ++c) {
      std::vector<double> mean{n(rng), n(rng), n(rng), n(rng), n(rng), n(rng)};
      for (int k = 0; k < 4; ++k) rows.push_back({"c" + std::to_string(c), mean});
    }
    auto sol = solve_mmc(fixtures::vectors(rows));
    // Balanced classes: X X^T = U U^T / C, so whitening gives delta = C.
    ASSERT_EQ(sol.transform.feature_dim(), C - 1);
    for (Eigen::Index i = 0; i < sol.delta.size(); ++i) EXPECT_NEAR(sol.delta[i], static_cast<double>(C), 1e-9);
  }
}

TEST(Mmc, ErrorsAndTwoClassBound) {
  EXPECT_THROW(learn_mmc(fixtures::vectors({{"a", {1}}, {"a", {2}}, {"a", {3}}})), InvalidArgument);
  EXPECT_THROW(learn_mmc(fixtures::vectors({{"a", {1}}, {"b", {2}}})), InvalidArgument);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  std::vector<std::pair<std::string, std::vector<double>>> noise;
  for (int i = 0; i < 400; ++i) noise.push_back({i % 2 ? "a" : "b", {n(rng), n(rng), n(rng)}});
  try {
    learn_mmc(fixtures::vectors(noise));
    FAIL() << "expected an empty transform";
  } catch (const EmptyTransform& e) {
    EXPECT_NE(std::string(e.what()).find("largest delta"), std::string::npos);
  }
  for (int trial = 0; trial < 20; ++trial) {
    auto d = fixtures::random_dataset(rng, 8, 2, 3, 10);
    EXPECT_LE(learn_mmc(d).feature_dim(), 1u);
  }
}

// Any St-orthonormal R with the same column count scores at most J(Phi):
// that is the feasible set of the MMC constraint Phi^T St Phi = I.
TEST(Mmc, ObjectiveDominatesRandomFeasibleTransforms) {
  std::mt19937_64 rng(6);
  auto d = fixtures::random_dataset(rng, 6, 4, 8, 12, 1.5);
  auto sol = solve_mmc(d);
  const auto [X, U] = factors(d);
  const Eigen::MatrixXd Sb = U * U.transpose(), St = X * X.transpose(), Sw = St - Sb;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(St);
  const Eigen::MatrixXd W = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal();
  const double best = mmc_objective(sol.transform.phi, Sb, Sw);
  const auto k = sol.transform.phi.cols();
  int violations = 0;
  for (int r = 0; r < 1000; ++r) {
    Eigen::MatrixXd R = W * random_orthonormal(rng, 6, k);
    violations += mmc_objective(R, Sb, Sw) > best + 1e-9;
  }
  EXPECT_EQ(violations, 0);
}

TEST(MmcObjective, Examples) {
  Eigen::MatrixXd sb = Eigen::Vector3d(7, 2, 1).asDiagonal();
  Eigen::MatrixXd sw = Eigen::MatrixXd::Zero(3, 3);
  EXPECT_EQ(mmc_objective(Eigen::MatrixXd::Zero(3, 1), sb, sw), 0.0);
  EXPECT_DOUBLE_EQ(mmc_objective(Eigen::Vector3d(1, 0, 0), sb, sw), 7.0);
  EXPECT_THROW(mmc_objective(Eigen::MatrixXd::Zero(2, 1), sb, sw), ShapeError);
}

TEST(PcaLda, IsotropicWithinScatterFollowsBetweenEigenvectors) {
  std::vector<Eigen::Vector3d> means{{0, 0, 0}, {4, 1, 0}, {0, 3, 1}};
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  for (std::size_t c = 0; c < 3; ++c)
    for (int k = 0; k < 3; ++k)
      for (double s : {-0.5, 0.5}) {
        Eigen::Vector3d v = means[c];
        v[k] += s;
        rows.push_back({"c" + std::to_string(c), {v[0], v[1], v[2]}});
      }
  auto d = fixtures::vectors(rows);
  auto t = learn_pcalda(d, {.pca_dims = 3});
  ASSERT_EQ(t.feature_dim(), 2u);
  auto s = scatter_matrices(d);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.between);
  for (Eigen::Index c = 0; c < 2; ++c) {
    Eigen::Vector3d ref = es.eigenvectors().col(2 - c);
    EXPECT_NEAR(std::abs(ref.dot(t.phi.col(c).normalized())), 1.0, 1e-9) << "column " << c;
  }
}

TEST(PcaLda, PreconditionsAndSingularity) {
  std::mt19937_64 rng(7);
  auto d = fixtures::random_dataset(rng, 10, 3, 5, 5);
  EXPECT_THROW(learn_pcalda(d, {.pca_dims = 2}), InvalidArgument);
  EXPECT_THROW(learn_pcalda(d, {.pca_dims = 13}), InvalidArgument);
  EXPECT_NO_THROW(learn_pcalda(d, {.pca_dims = 6}));

  std::vector<std::pair<std::string, std::vector<double>>> copies;
  for (int k = 0; k < 4; ++k) {
    copies.push_back({"a", {1, 2, 3, 4}});
    copies.push_back({"b", {0, -1, 5, 2}});
  }
  try {
    learn_pcalda(fixtures::vectors(copies), {.pca_dims = 2});
    FAIL() << "expected a singularity error";
  } catch (const SingularityError& e) {
    EXPECT_NE(std::string(e.what()).find("fewer PCA dimensions"), std::string::npos);
  }
}

TEST(PcaLda, RankBound) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_int_distribution<std::size_t> C(2, 6);
    const std::size_t c = C(rng);
    auto d = fixtures::random_dataset(rng, 12, c, 6, 10);
    auto t = learn_pcalda(d);
    EXPECT_GE(t.feature_dim(), 1u);
    EXPECT_LE(t.feature_dim(), c - 1);
    if (c == 2) EXPECT_EQ(t.feature_dim(), 1u);
  }
}

TEST(Project, SubsetZeroAndLinearity) {
  FeatureTransform t;
  t.phi = Eigen::MatrixXd::Zero(4, 2);
  t.phi(1, 0) = 1;
  t.phi(3, 1) = 1;
  Eigen::Vector4d g(5, 6, 7, 8);
  EXPECT_EQ(project(t, g), Eigen::Vector2d(6, 8));
  EXPECT_TRUE(project(t, Eigen::Vector4d::Zero()).isZero(0.0));
  EXPECT_THROW(project(t, Eigen::Vector3d::Zero()), ShapeError);

  std::mt19937_64 rng(9);
  auto d = fixtures::random_dataset(rng, 10, 3, 6, 8);
  auto learned = learn_mmc(d);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd a(10), b(10);
    for (auto& v : a) v = n(rng);
    for (auto& v : b) v = n(rng);
    const double alpha = n(rng), beta = n(rng);
    Eigen::VectorXd lhs = project(learned, alpha * a + beta * b);
    Eigen::VectorXd rhs = alpha * project(learned, a) + beta * project(learned, b);
    EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, lhs.cwiseAbs().maxCoeff()));
  }
}

TEST(Mahalanobis, Examples) {
  Eigen::Vector2d a(3, 5), b(2, 3);
  EXPECT_NEAR(mahalanobis(a, b, Eigen::Vector2d(4, 1).asDiagonal().toDenseMatrix()), 2.828427, 1e-6);
  EXPECT_DOUBLE_EQ(mahalanobis(a, b, Eigen::Matrix2d::Identity()), (a - b).norm());
  EXPECT_EQ(mahalanobis(a, a, Eigen::Matrix2d::Identity()), 0.0);
  Eigen::Matrix2d indefinite;
  indefinite << 1, 0, 0, -1;
  EXPECT_THROW(MahalanobisMetric{indefinite}, InvalidArgument);
  EXPECT_THROW(mahalanobis(a, Eigen::Vector3d::Zero(), Eigen::Matrix2d::Identity()), ShapeError);
}

TEST(Mahalanobis, EqualsEuclideanOnMmcTemplates) {
  std::mt19937_64 rng(10);
  auto d = fixtures::random_dataset(rng, 15, 5, 5, 9);
  auto t = learn_mmc(d);
  MahalanobisMetric m(t.scatter_inverse);
  auto tpl = project_all(t, d);
  for (std::size_t i = 0; i < tpl.size(); ++i)
    for (std::size_t j = i + 1; j < tpl.size(); ++j)
      EXPECT_NEAR(m(tpl[i].features, tpl[j].features), (tpl[i].features - tpl[j].features).norm(), 1e-6);
}

TEST(Transform, SaveLoadAndDeterminism) {
  fixtures::TempDir dir;
  std::mt19937_64 rng(11);
  auto d = fixtures::random_dataset(rng, 9, 4, 6, 8);
  for (LearnMethod method : {LearnMethod::MMC, LearnMethod::PCALDA}) {
    auto t = learn(method, d);
    save_transform(t, dir.path / "t.bin");
    auto back = load_transform(dir.path / "t.bin");
    EXPECT_EQ(back.method, method);
    EXPECT_EQ(back.phi, t.phi);
    EXPECT_EQ(back.scatter_inverse, t.scatter_inverse);
    EXPECT_EQ(back.eigenvalues, t.eigenvalues);
    EXPECT_EQ(back.classes, 4u);
    EXPECT_EQ(back.samples, d.size());
    EXPECT_EQ(learn(method, d).phi, t.phi);
  }
  EXPECT_EQ(learn_method_from_string("pcalda"), LearnMethod::PCALDA);
  EXPECT_THROW(learn_method_from_string("lda"), InvalidArgument);
}
