#include <doctest.h>

#include "helpers.hpp"

using namespace bubbletree;

TEST_CASE("stereographic projection hits the catalogue points") {
  CHECK((stereo_project(PlanePoint{0.0, 0.0}) - Eigen::Vector3d(0, 0, 1)).norm() == 0.0);
  CHECK((stereo_project(PlanePoint{1.0, 0.0}) - Eigen::Vector3d(1, 0, 0)).norm() < 1e-15);
  CHECK((stereo_project(Complex(INFINITY, 0.0)) - Eigen::Vector3d(0, 0, -1)).norm() == 0.0);

  auto gen = testutil::rng();
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int k = 0; k < 50; ++k) {
    const PlanePoint p{u(gen), u(gen)};
    CHECK(stereo_project(p).norm() == doctest::Approx(1.0).epsilon(1e-12));
    const PlanePoint back = stereo_inverse(stereo_project(p));
    CHECK(std::hypot(back.x - p.x, back.y - p.y) < 1e-12 * (1.0 + p.abs()));
  }
}

TEST_CASE("stereographic inverse") {
  const PlanePoint p = stereo_inverse(Eigen::Vector3d(0, 0, 1));
  CHECK(p.abs() == 0.0);
  const PlanePoint q = stereo_inverse(Eigen::Vector3d(1, 0, 0));
  CHECK(q.x == doctest::Approx(1.0));
  CHECK(q.y == doctest::Approx(0.0));
  CHECK_THROWS_WITH_AS(stereo_inverse(Eigen::Vector3d(0, 0, -1)), doctest::Contains("SouthPole"),
                       Error);
}

TEST_CASE("conformal weight matches the Jacobian of the projection") {
  CHECK(conformal_weight({0.0, 0.0}, 1.0) == doctest::Approx(8.0));
  CHECK(conformal_weight({1.0, 0.0}, 1.0) == doctest::Approx(2.0));

  // |grad pi_lambda|^2 against a finite-difference Jacobian of the map itself.
  auto gen = testutil::rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> lam(0.25, 4.0);
  for (int k = 0; k < 25; ++k) {
    const double lambda = lam(gen);
    const PlanePoint p{u(gen), u(gen)};
    const double h = 1e-6;
    auto at = [&](double dx, double dy) {
      return stereo_project(Complex(lambda * (p.x + dx), lambda * (p.y + dy)));
    };
    const Eigen::Vector3d dx = (at(h, 0) - at(-h, 0)) / (2 * h);
    const Eigen::Vector3d dy = (at(0, h) - at(0, -h)) / (2 * h);
    const double fd = dx.squaredNorm() + dy.squaredNorm();
    CHECK(conformal_weight(p, lambda) == doctest::Approx(fd).epsilon(1e-8));
  }

  // int_{R^2} |grad pi_lambda|^2 dx = 8*pi for any lambda (reference quadrature).
  for (const double lambda : {0.5, 1.0, 7.0}) {
    const double val = 2.0 * M_PI *
                       testutil::adaptive_simpson(
                           [lambda](double r) {
                             return r * conformal_weight({r, 0.0}, lambda);
                           },
                           0.0, 1e4, 1e-11);
    CHECK(val == doctest::Approx(8.0 * M_PI).epsilon(1e-6));
  }
}

TEST_CASE("nearest point projection") {
  CHECK((project_to_target(ambient3(0, 0, 2)) - ambient3(0, 0, 1)).norm() < 1e-15);
  const Ambient p = project_to_target(ambient3(0.6, 0, 0.8));
  CHECK((project_to_target(1.3 * p) - p).norm() < 1e-15);
  CHECK((project_to_target(p) - p).norm() < 1e-15);
  CHECK_THROWS_AS(project_to_target(ambient3(0.1, 0.1, 0.1)), Error);
}

TEST_CASE("tangent projection and second fundamental form") {
  const Ambient p = ambient3(0, 0, 1);
  CHECK((tangent_project(p, ambient3(1, 2, 3)) - ambient3(1, 2, 0)).norm() < 1e-15);
  CHECK((tangent_project(p, p)).norm() < 1e-15);

  CHECK((second_fundamental_form(p, ambient3(1, 0, 0), ambient3(1, 0, 0)) -
         ambient3(0, 0, -1)).norm() < 1e-15);

  auto gen = testutil::rng(11);
  for (int k = 0; k < 30; ++k) {
    const Ambient q = testutil::random_unit(gen);
    const Ambient v = tangent_project(q, testutil::random_unit(gen));
    const Ambient w = tangent_project(q, testutil::random_unit(gen));
    const Ambient uu = tangent_project(q, testutil::random_unit(gen));
    const Ambient avw = second_fundamental_form(q, v, w);
    CHECK((avw - second_fundamental_form(q, w, v)).norm() < 1e-14);
    CHECK(std::abs(avw.dot(uu)) < 1e-13);  // normal valued
    const Ambient lin = second_fundamental_form(q, 2.0 * v + uu, w);
    CHECK((lin - 2.0 * avw - second_fundamental_form(q, uu, w)).norm() < 1e-13);
  }
}

TEST_CASE("geodesics run at constant speed") {
  const Ambient n = ambient3(0, 0, 1), e = ambient3(1, 0, 0);
  CHECK((geodesic(n, n, 0.7) - n).norm() < 1e-15);
  const Ambient mid = geodesic(n, e, 0.5);
  CHECK((mid - ambient3(std::sqrt(0.5), 0, std::sqrt(0.5))).norm() < 1e-14);
  CHECK(geodesic_distance(n, e) == doctest::Approx(M_PI / 2));
  CHECK(geodesic_distance(n, n) == 0.0);

  auto gen = testutil::rng(13);
  for (int k = 0; k < 20; ++k) {
    const Ambient p0 = testutil::random_unit(gen);
    const Ambient p1 = testutil::random_unit(gen);
    const double d = geodesic_distance(p0, p1);
    for (const double t : {0.0, 0.25, 0.9}) {
      for (const double s : {0.1, 0.5, 1.0}) {
        CHECK(std::abs(geodesic_distance(geodesic(p0, p1, t), geodesic(p0, p1, s)) -
                       std::abs(t - s) * d) < 1e-10);
      }
      CHECK(geodesic_velocity(p0, p1, t).norm() == doctest::Approx(d).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(geodesic(n, ambient3(0, 0, -1), 0.5), Error);
}

TEST_CASE("geodesic distance of nearby projected points is 2|c0-c1| to cubic order") {
  auto gen = testutil::rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const Complex c0 = 1e-3 * Complex(u(gen), u(gen));
    const Complex c1 = 1e-3 * Complex(u(gen), u(gen));
    const double d = geodesic_distance(Ambient(stereo_project(c0)), Ambient(stereo_project(c1)));
    CHECK(std::abs(d - 2.0 * std::abs(c0 - c1)) < 4.0e-8);
  }
}

TEST_CASE("great sphere embeddings are isometric") {
  const auto emb = GreatSphereEmbedding::plane_rotation(1, 3, 0.7);
  CHECK(emb.ambient_dim() == 4);
  auto gen = testutil::rng(19);
  for (int k = 0; k < 10; ++k) {
    const Ambient p3 = testutil::random_unit(gen);
    const Ambient q = emb.embed(Eigen::Vector3d(p3(0), p3(1), p3(2)));
    CHECK(q.size() == 4);
    CHECK(q.norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(GreatSphereEmbedding::from_matrix(2.0 * Eigen::Matrix3d::Identity()), Error);
}
