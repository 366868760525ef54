#include "reilly/ambient.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace reilly;

namespace {

Vec random_point(const Ambient& amb, std::mt19937& rng, double spread = 1.0) {
  std::normal_distribution<double> gauss(0.0, spread);
  const Vec p = amb.base_point();
  Vec t(amb.dim());
  for (int i = 0; i < t.size(); ++i) t[i] = gauss(rng);
  return amb.exp(p, amb.canonical_frame(p) * t);
}

}  // namespace

TEST_CASE("delta trig identities and known values") {
  CHECK(delta_trig(0.0, Delta{-1.0}).sd == 0.0);
  CHECK(delta_trig(0.0, Delta{-1.0}).cd == 1.0);
  CHECK(delta_trig(0.0, Delta{-1.0}).th == 0.0);

  // Closed-form sinh/cosh/tanh at y=1, delta=-1.
  const auto t = delta_trig(1.0, Delta{-1.0});
  CHECK(t.sd == doctest::Approx(1.175201).epsilon(1e-6));
  CHECK(t.cd == doctest::Approx(1.543081).epsilon(1e-6));
  CHECK(t.th == doctest::Approx(0.761594).epsilon(1e-6));

  for (double delta : {-10.0, -4.0, -2.0, -1.0, -0.5, -0.01}) {
    for (double y = 0.0; y <= 10.0; y += 0.37) {
      const auto v = delta_trig(y, Delta{delta});
      CHECK(std::abs(v.cd * v.cd + delta * v.sd * v.sd - 1.0) <= 1e-12 * v.cd * v.cd);
      CHECK(std::abs(1.0 / (v.cd * v.cd) - (1.0 + delta * v.th * v.th)) <= 1e-12);
    }
  }

  // delta = 0 equals the delta -> 0^- limit.
  for (double y = 0.01; y <= 0.1; y += 0.013) {
    const auto flat = delta_trig(y, Delta{0.0});
    const auto near = delta_trig(y, Delta{-1e-6});
    CHECK(std::abs(flat.sd - near.sd) <= 1e-8);
    CHECK(std::abs(flat.cd - near.cd) <= 1e-8);
    CHECK(std::abs(flat.th - near.th) <= 1e-8);
  }
}

TEST_CASE("arsinh_delta inverts the generalized sine") {
  CHECK(arsinh_delta(0.0, Delta{-1.0}) == 0.0);
  CHECK(arsinh_delta(std::sinh(1.0), Delta{-1.0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(arsinh_delta(1.0, Delta{0.0}), Error);

  for (double delta : {-0.5, -1.0, -4.0}) {
    for (double y = 0.25; y <= 5.0; y += 0.25) {
      const double s = delta_trig(y, Delta{delta}).sd;
      CHECK(arsinh_delta(s, Delta{delta}) == doctest::Approx(y).epsilon(1e-12));
      CHECK(delta_trig(arsinh_delta(s, Delta{delta}), Delta{delta}).sd ==
            doctest::Approx(s).epsilon(1e-12));
    }
  }
}

TEST_CASE("hyperboloid distance") {
  Ambient amb(Delta{-1.0}, 3);
  const Vec p = amb.base_point();
  CHECK(amb.distance(p, p) == 0.0);

  // Geodesic-shooting oracle: exp along a frame direction lands at distance t.
  const Mat frame = amb.canonical_frame(p);
  for (double t : {0.3, 1.0, 2.5}) {
    const Vec q = amb.exp(p, t * frame.col(0));
    CHECK(amb.distance(p, q) == doctest::Approx(t).epsilon(1e-12));
    CHECK(amb.distance(q, p) == doctest::Approx(t).epsilon(1e-12));
  }

  // Explicit hyperboloid point (cosh t, sinh t, 0, 0) at delta=-1.
  Vec q(4);
  q << std::cosh(0.3), std::sinh(0.3), 0.0, 0.0;
  CHECK(amb.distance(p, q) == doctest::Approx(0.3).epsilon(1e-12));

  // Curvature-length scaling: delta -> 4 delta with the model map halves distances.
  Ambient amb4(Delta{-4.0}, 3);
  std::mt19937 rng(7);
  for (int i = 0; i < 20; ++i) {
    const Vec a = random_point(amb, rng), b = random_point(amb, rng);
    CHECK(amb4.distance(scale_model_point(a, 2.0), scale_model_point(b, 2.0)) ==
          doctest::Approx(0.5 * amb.distance(a, b)).epsilon(1e-12));
  }

  Vec bad(4);
  bad << 1.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(amb.require_point(bad), Error);
}

TEST_CASE("triangle inequality on random triples") {
  for (double delta : {-1.0, -2.0, 0.0}) {
    Ambient amb(Delta{delta}, 3);
    std::mt19937 rng(11);
    for (int i = 0; i < 1000; ++i) {
      const Vec a = random_point(amb, rng), b = random_point(amb, rng),
                c = random_point(amb, rng);
      CHECK(amb.distance(a, b) + amb.distance(b, c) - amb.distance(a, c) >=
            -1e-12);
    }
  }
}

TEST_CASE("exp and log are inverse") {
  for (double delta : {-1.0, -0.5, 0.0}) {
    Ambient amb(Delta{delta}, 3);
    std::mt19937 rng(3);
    const Vec p0 = random_point(amb, rng);
    CHECK(amb.log(p0, p0).norm() == 0.0);

    for (int i = 0; i < 100; ++i) {
      const Vec p = random_point(amb, rng, 0.6), q = random_point(amb, rng, 0.6);
      const Vec v = amb.log(p, q);
      CHECK(amb.distance(amb.exp(p, v), q) <= 1e-10);
      CHECK(amb.norm(v) == doctest::Approx(amb.distance(p, q)).epsilon(1e-12));
      // Geodesic midpoint at half the logarithm.
      const Vec mid = amb.exp(p, 0.5 * v);
      CHECK(amb.distance(p, mid) ==
            doctest::Approx(0.5 * amb.distance(p, q)).epsilon(1e-10));
    }

    // Near-coincident points stay stable.
    const Vec p = random_point(amb, rng);
    const Vec tiny = 1e-9 * amb.canonical_frame(p).col(1);
    const Vec q = amb.exp(p, tiny);
    CHECK(amb.norm(amb.log(p, q)) == doctest::Approx(1e-9).epsilon(1e-6));
  }
}

TEST_CASE("normal coordinates") {
  Ambient amb(Delta{-1.0}, 3);
  std::mt19937 rng(5);
  const Vec q0 = random_point(amb, rng);
  const Mat frame = amb.canonical_frame(q0);

  CHECK(amb.normal_coords(q0, q0, frame).norm() == 0.0);

  for (int i = 0; i < 50; ++i) {
    const Vec q = random_point(amb, rng);
    const Vec x = amb.normal_coords(q0, q, frame);
    CHECK(x.norm() == doctest::Approx(amb.distance(q0, q)).epsilon(1e-12));
  }

  // Rotating the frame rotates the coordinates by the same rotation.
  Eigen::Matrix3d rot =
      Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, 3).normalized())
          .toRotationMatrix();
  const Mat rotated = frame * rot;
  const Vec q = random_point(amb, rng);
  const Vec x = amb.normal_coords(q0, q, frame);
  const Vec xr = amb.normal_coords(q0, q, rotated);
  CHECK((rot.transpose() * x - xr).norm() <= 1e-12 * (1.0 + x.norm()));

  // Non-orthonormal frame rejected.
  Mat bad = frame;
  bad.col(0) *= 1.1;
  CHECK_THROWS_AS(amb.normal_coords(q0, q, bad), Error);
}

TEST_CASE("isometry equivariance of distance and normal coordinates") {
  for (double delta : {-1.0, 0.0}) {
    Ambient amb(Delta{delta}, 3);
    std::mt19937 rng(13);
    const Isometry iso = amb.random_isometry(rng);
    for (int i = 0; i < 50; ++i) {
      const Vec a = random_point(amb, rng), b = random_point(amb, rng);
      CHECK(amb.distance(iso.apply_point(a), iso.apply_point(b)) ==
            doctest::Approx(amb.distance(a, b)).epsilon(1e-12));
      const Mat f = amb.canonical_frame(a);
      const Vec x = amb.normal_coords(a, b, f);
      Mat fmoved(f.rows(), f.cols());
      for (int c = 0; c < f.cols(); ++c) fmoved.col(c) = iso.apply_vector(f.col(c));
      const Vec xm = amb.normal_coords(iso.apply_point(a), iso.apply_point(b), fmoved);
      CHECK((x - xm).norm() <= 1e-12 * (1.0 + x.norm()));
    }
  }
}
