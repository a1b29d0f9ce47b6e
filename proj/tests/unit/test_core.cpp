#include "nsmds/core.hpp"
#include "nsmds/error.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace nsmds;

namespace {

PointCloud square_corners() { return PointCloud::from_rows({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

}  // namespace

TEST_CASE("point cloud construction validates shape and values") {
  CHECK_THROWS_AS(PointCloud(Eigen::MatrixXd(2, 0)), InvalidInput);
  CHECK_THROWS_AS(PointCloud(Eigen::MatrixXd(0, 3)), InvalidInput);
  CHECK_THROWS_AS(PointCloud::from_rows({{0, 0}, {1}}), InvalidInput);
  CHECK_THROWS_AS(PointCloud(Eigen::MatrixXd::Zero(2, 2), {"a"}), InvalidInput);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS((void)PointCloud{bad}, InvalidInput);

  const PointCloud c = PointCloud::from_rows({{1, 2}, {3, 4}, {5, 6}});
  CHECK(c.dim() == 2);
  CHECK(c.size() == 3);
  CHECK(c.point(1)[1] == 4.0);
  CHECK(c.centered().centroid().norm() < 1e-15);
  const PointCloud s = c.subset({2, 0});
  CHECK(s.point(0)[0] == 5.0);
  CHECK(s.point(1)[0] == 1.0);
  CHECK_THROWS_AS((void)c.subset({3}), InvalidInput);
}

TEST_CASE("squared distance matrix of small clouds") {
  const SquaredDistanceMatrix two = squared_distance_matrix(PointCloud::from_rows({{0, 0}, {1, 0}}));
  CHECK(two(0, 1) == 1.0);
  CHECK(two(1, 0) == 1.0);
  CHECK(two(0, 0) == 0.0);

  const SquaredDistanceMatrix one = squared_distance_matrix(PointCloud::from_rows({{3, 4}}));
  CHECK(one.size() == 1);
  CHECK(one(0, 0) == 0.0);

  const SquaredDistanceMatrix sq = squared_distance_matrix(square_corners());
  const double expected[4][4] = {{0, 1, 2, 1}, {1, 0, 1, 2}, {2, 1, 0, 1}, {1, 2, 1, 0}};
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) CHECK(sq(i, j) == expected[i][j]);
  CHECK(sq.distance(0, 2) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("squared distance matrix validation and masks") {
  Eigen::MatrixXd asym(2, 2);
  asym << 0, 1, 2, 0;
  CHECK_THROWS_AS((void)SquaredDistanceMatrix{asym}, InvalidInput);
  Eigen::MatrixXd diag(2, 2);
  diag << 1, 1, 1, 0;
  CHECK_THROWS_AS((void)SquaredDistanceMatrix{diag}, InvalidInput);
  CHECK_THROWS_AS(SquaredDistanceMatrix(Eigen::MatrixXd::Zero(2, 3)), InvalidInput);

  // Rounding-level asymmetry is accepted and removed.
  Eigen::MatrixXd near(2, 2);
  near << 0, 1.0, 1.0 + 1e-14, 0;
  const SquaredDistanceMatrix fixed(near);
  CHECK(fixed(0, 1) == fixed(1, 0));

  Eigen::MatrixXd d = squared_distance_matrix(square_corners()).entries();
  Mask mask = Mask::Constant(4, 4, true);
  mask(0, 2) = mask(2, 0) = false;
  const SquaredDistanceMatrix masked(d, mask);
  CHECK_FALSE(masked.is_full());
  CHECK_FALSE(masked.observed(0, 2));
  CHECK(masked.observed(0, 1));
  CHECK(masked.observed_pair_count() == 5);
  CHECK_THROWS_WITH_AS((void)gram_from_sdm(masked), "double centering requires full observation", InvalidInput);

  Mask asym_mask = Mask::Constant(4, 4, true);
  asym_mask(0, 1) = false;
  CHECK_THROWS_AS(SquaredDistanceMatrix(d, asym_mask), InvalidInput);
  Mask bad_diag = Mask::Constant(4, 4, true);
  bad_diag(1, 1) = false;
  CHECK_THROWS_AS(SquaredDistanceMatrix(d, bad_diag), InvalidInput);

  // An all-true mask is the same as no mask.
  CHECK(SquaredDistanceMatrix(d, Mask::Constant(4, 4, true)).is_full());

  const SquaredDistanceMatrix sub = masked.submatrix({2, 0, 1});
  CHECK(sub(1, 2) == 1.0);
  CHECK_FALSE(sub.observed(0, 1));
}

TEST_CASE("gram matrix from squared distances") {
  const Eigen::MatrixXd g1 = gram_from_sdm(SquaredDistanceMatrix(Eigen::MatrixXd::Zero(1, 1)));
  CHECK(g1.rows() == 1);
  CHECK(g1(0, 0) == 0.0);

  // Centered square: sum of squared norms is 4 * 0.5.
  CHECK(gram_from_sdm(squared_distance_matrix(square_corners())).trace() == doctest::Approx(2.0).epsilon(1e-12));

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const PointCloud p = oracle::random_cloud(rng, 5 + trial, 1 + trial % 3, 2.0).centered();
    const Eigen::MatrixXd g = gram_from_sdm(squared_distance_matrix(p));
    const Eigen::MatrixXd ptp = p.coords().transpose() * p.coords();
    CHECK((g - ptp).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("scale parameters of rectangles and degenerate clouds") {
  const ScaleParams rect = scale_params(PointCloud::from_rows({{1, 0.5}, {1, -0.5}, {-1, 0.5}, {-1, -0.5}}));
  REQUIRE(rect.pi.size() == 2);
  CHECK(rect.pi[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rect.pi[1] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(rect.h_val == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rect.j_val == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(rect.g_val == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_FALSE(rect.degenerate);

  const ScaleParams sq = scale_params(PointCloud::from_rows({{0.5, 0.5}, {0.5, -0.5}, {-0.5, 0.5}, {-0.5, -0.5}}));
  CHECK(sq.pi[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(sq.pi[1] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(std::abs(sq.g_val) < 1e-12);

  const ScaleParams line = scale_params(PointCloud::from_rows({{0, 0}, {1, 2}, {2, 4}, {3, 6}}));
  CHECK(line.j_val == 0.0);
  CHECK(line.degenerate);

  CHECK_THROWS_AS((void)ScaleParams::from_values({}), InvalidInput);
  CHECK_THROWS_AS((void)ScaleParams::from_values({0.1, 0.2}), InvalidInput);
  CHECK_THROWS_AS((void)ScaleParams::from_values({0.1, -0.2}), InvalidInput);
  const ScaleParams three = ScaleParams::from_values({3, 2.5, 1});
  CHECK(three.g_val == doctest::Approx(0.5));
}

TEST_CASE("scale parameters are invariant under isometries and scale quadratically") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Index k = 2 + trial % 2;
    const PointCloud p = oracle::random_cloud(rng, 30, k);
    const Eigen::MatrixXd q = oracle::random_orthogonal(rng, static_cast<Eigen::Index>(k));
    const Eigen::VectorXd t = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(k), 3.5);
    const ScaleParams base = scale_params(p);
    const ScaleParams moved = scale_params(Alignment{q, t}.apply(p));
    const ScaleParams scaled = scale_params(PointCloud(2.5 * p.coords()));
    for (Index i = 0; i < k; ++i) {
      CHECK(std::abs(base.pi[i] - moved.pi[i]) <= 1e-10);
      CHECK(scaled.pi[i] == doctest::Approx(6.25 * base.pi[i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("structural loss examples") {
  const PointCloud p = PointCloud::from_rows({{0, 0}, {2, 0}, {1, 3}, {-1, 1}, {0.5, -2}});
  CHECK(structural_loss(p, p).loss <= 1e-10);

  const double angle = 37.0 * std::numbers::pi / 180.0;
  const Eigen::Vector2d shift(3, -2);
  const PointCloud moved = Alignment{oracle::rotation2d(angle), shift}.apply(p);
  const StructuralLoss fit = structural_loss(moved, p);
  CHECK(fit.loss <= 1e-9);
  CHECK((fit.alignment.rotation - oracle::rotation2d(angle)).norm() <= 1e-9);
  CHECK((fit.alignment.translation - shift).norm() <= 1e-9);

  // Reflections are valid isometries.
  Eigen::Matrix2d flip;
  flip << 1, 0, 0, -1;
  const StructuralLoss mirrored = structural_loss(Alignment{flip, Eigen::Vector2d::Zero()}.apply(p), p);
  CHECK(mirrored.loss <= 1e-10);
  CHECK(mirrored.alignment.rotation.determinant() == doctest::Approx(-1.0));

  CHECK_THROWS_AS((void)structural_loss(p, p.subset({0, 1})), InvalidInput);
  CHECK_THROWS_AS((void)structural_loss(p, PointCloud(Eigen::MatrixXd::Zero(3, 5))), InvalidInput);
}

TEST_CASE("structural loss never exceeds the identity-alignment residual") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> noise(0.0, 0.05);
  for (int trial = 0; trial < 30; ++trial) {
    const PointCloud p = oracle::random_cloud(rng, 40, 2 + trial % 2);
    Eigen::MatrixXd k = p.coords();
    for (Eigen::Index i = 0; i < k.size(); ++i) k.data()[i] += noise(rng);
    const double rms = (k - p.coords()).norm() / std::sqrt(40.0);
    CHECK(structural_loss(PointCloud(k), p).loss <= rms + 1e-15);
  }
}

TEST_CASE("structural loss is isometry invariant and symmetric") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> noise(0.0, 0.1);
  for (int trial = 0; trial < 30; ++trial) {
    const Index k = 2 + trial % 2;
    const PointCloud p = oracle::random_cloud(rng, 25, k);
    Eigen::MatrixXd x = p.coords();
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] += noise(rng);
    const PointCloud est(x);
    const Eigen::MatrixXd q = oracle::random_orthogonal(rng, static_cast<Eigen::Index>(k));
    const Eigen::VectorXd t = Eigen::VectorXd::Random(static_cast<Eigen::Index>(k));
    const double base = structural_loss(est, p).loss;
    CHECK(std::abs(structural_loss(Alignment{q, t}.apply(est), p).loss - base) <= 1e-8);
    CHECK(std::abs(structural_loss(p, est).loss - base) <= 1e-8);
    const Eigen::MatrixXd r = structural_loss(est, p).alignment.rotation;
    CHECK((r.transpose() * r - Eigen::MatrixXd::Identity(r.rows(), r.cols())).norm() <= 1e-10);
  }
}
