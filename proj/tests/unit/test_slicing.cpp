#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "emperor/errors.hpp"
#include "emperor/model.hpp"
#include "emperor/moments.hpp"
#include "emperor/rng.hpp"
#include "emperor/slicing.hpp"

using namespace emperor;

namespace {

Eigen::MatrixXd random_rotation(int d, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd a(d, d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) a(r, c) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  // Fix the sign convention so q is a proper function of a.
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    if (r(i, i) < 0) q.col(i) *= -1.0;
  }
  return q;
}

}  // namespace

TEST_SUITE("slicing") {

TEST_CASE("directions are unit rows, deterministic in the seed") {
  SliceSet a = generate_directions(4, 32, 11);
  SliceSet b = generate_directions(4, 32, 11);
  SliceSet c = generate_directions(4, 32, 12);
  CHECK(a.directions == b.directions);
  CHECK(a.directions != c.directions);
  for (Eigen::Index l = 0; l < a.count(); ++l) {
    CHECK(std::abs(a.directions.row(l).norm() - 1.0) < 1e-12);
  }
  CHECK(a.count() == 32);
  CHECK(a.dimension() == 4);
  CHECK(a.seed == 11);
}

TEST_CASE("slice l depends only on (seed, l), not on the total count") {
  SliceSet small = generate_directions(3, 8, 5);
  SliceSet large = generate_directions(3, 16, 5);
  CHECK(small.directions == large.directions.topRows(8));
}

TEST_CASE("axis-aligned scheme starts with the coordinate axes") {
  SliceSet s = generate_directions(3, 5, 21,
                                   DirectionScheme::AxisAlignedThenRandom);
  CHECK(s.directions.topRows(3) == Eigen::MatrixXd::Identity(3, 3));
  for (Eigen::Index l = 3; l < 5; ++l) {
    CHECK(std::abs(s.directions.row(l).norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("direction generation rejects bad arguments") {
  CHECK_THROWS_AS(generate_directions(0, 4, 0), Error);
  CHECK_THROWS_AS(generate_directions(3, 0, 0), Error);
}

TEST_CASE("projection is the inner product with the direction") {
  PointSet points = pointset_from_rows({{1.0, 2.0}, {3.0, 4.0}});
  Eigen::Vector2d e1(1.0, 0.0);
  Eigen::VectorXd y = project(points, e1);
  REQUIRE(y.size() == 2);
  CHECK(y[0] == 1.0);
  CHECK(y[1] == 3.0);

  Eigen::Vector2d diag(1.0, 1.0);
  try {
    project(points, diag);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonUnitDirection);
  }
  Eigen::Vector3d wrong(1.0, 0.0, 0.0);
  CHECK_THROWS_AS(project(points, wrong), Error);
}

TEST_CASE("projections are rotation consistent") {
  Rng rng(3);
  Eigen::MatrixXd x(50, 3);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) x(i, j) = rng.normal();
  }
  PointSet points(x);
  Eigen::MatrixXd q = random_rotation(3, 17);
  PointSet rotated(x * q.transpose());

  SliceSet slices = generate_directions(3, 6, 2);
  for (Eigen::Index l = 0; l < slices.count(); ++l) {
    Eigen::VectorXd theta = slices.directions.row(l).transpose();
    Eigen::VectorXd y = project(points, theta);
    Eigen::VectorXd y_rot = project(rotated, (q * theta).eval());
    CHECK((y - y_rot).lpNorm<Eigen::Infinity>() < 1e-10);
  }
}

TEST_CASE("collision score flags directions that merge components") {
  Eigen::VectorXd w(2);
  w << 0.5, 0.5;
  std::vector<Eigen::VectorXd> means{Eigen::Vector2d(0.0, 0.0),
                                     Eigen::Vector2d(0.0, 1.0)};
  std::vector<Eigen::MatrixXd> covs{Eigen::Matrix2d::Identity(),
                                    Eigen::Matrix2d::Identity()};
  MultivariateGMM gmm(w, means, covs);

  Eigen::Vector2d e1(1.0, 0.0);
  Eigen::Vector2d e2(0.0, 1.0);
  CHECK(collision_score(gmm, e1) == 0.0);  // both components collapse
  CHECK(collision_score(gmm, e2) == 1.0);  // means one apart

  Eigen::VectorXd w1 = Eigen::VectorXd::Ones(1);
  MultivariateGMM single(w1, {Eigen::Vector2d::Zero()},
                         {Eigen::Matrix2d::Identity()});
  CHECK(std::isinf(collision_score(single, e1)));
}

TEST_CASE("sliced moments are rotation consistent to 1e-10") {
  Rng rng(23);
  const int d = 3;
  Eigen::VectorXd w(2);
  w << 0.4, 0.6;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covs;
  for (int j = 0; j < 2; ++j) {
    Eigen::VectorXd mu(d);
    for (int i = 0; i < d; ++i) mu[i] = rng.normal();
    Eigen::MatrixXd a(d, d);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) a(r, c) = rng.normal();
    }
    means.push_back(mu);
    covs.push_back(a * a.transpose() + Eigen::MatrixXd::Identity(d, d));
  }
  MultivariateGMM gmm(w, means, covs);

  Eigen::MatrixXd q = random_rotation(d, 5);
  std::vector<Eigen::VectorXd> rot_means;
  std::vector<Eigen::MatrixXd> rot_covs;
  for (int j = 0; j < 2; ++j) {
    rot_means.push_back(q * means[static_cast<std::size_t>(j)]);
    rot_covs.push_back(q * covs[static_cast<std::size_t>(j)] * q.transpose());
  }
  MultivariateGMM rotated(w, rot_means, rot_covs);

  SliceSet slices = generate_directions(d, 8, 31);
  for (Eigen::Index l = 0; l < slices.count(); ++l) {
    Eigen::VectorXd theta = slices.directions.row(l).transpose();
    Eigen::VectorXd q_theta = (q * theta).eval();
    q_theta /= q_theta.norm();
    for (int k = 1; k <= 4; ++k) {
      const double a = sliced_gmm_moment(gmm, theta, k);
      const double b = sliced_gmm_moment(rotated, q_theta, k);
      CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
    }
  }
}

}  // TEST_SUITE
