#include "reilly/spectral.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

#include "reilly/scenes.hpp"
#include "test_helpers.hpp"

using namespace reilly;
using reilly::testing::random_field;
using reilly::testing::scaled_identity_tensor;

namespace {

// Independent oracle: dense generalized eigensolve, eigenvalues ascending,
// first nonzero is index 1 on a connected closed mesh.
double dense_lambda1(const AssembledOperators& ops) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(Mat(ops.stiffness),
                                                   Mat(ops.mass));
  return es.eigenvalues()[1];
}

}  // namespace

TEST_CASE("sphere eigenvalue against the dense oracle and the closed form") {
  const double exact = 2.0 / (std::sinh(1.0) * std::sinh(1.0));

  const ImmersedMesh coarse = geodesic_sphere(Delta{-1.0}, 1.0, 2);
  const IntrinsicMetric gc = build_intrinsic_metric(coarse);
  for (MassMode mode : {MassMode::lumped, MassMode::consistent}) {
    const AssembledOperators ops = assemble(coarse, gc, nullptr, false, mode);
    const SpectralResult r = lambda1_linear(ops);
    CHECK(r.converged);
    CHECK(r.residual <= 1e-10);
    CHECK(std::abs(r.eigenvalue - dense_lambda1(ops)) <= 1e-8 * r.eigenvalue);
    // Zero weighted mean of the eigenfunction.
    const Vec m1 = ops.mass * Vec::Ones(coarse.vertex_count());
    CHECK(std::abs(m1.dot(r.eigenfunction)) <=
          1e-10 * r.eigenfunction.norm() * m1.norm());
  }

  const ImmersedMesh m = geodesic_sphere(Delta{-1.0}, 1.0, 4);
  const IntrinsicMetric g = build_intrinsic_metric(m);
  const SpectralResult r = lambda1_linear(assemble(m, g));
  CHECK(r.eigenvalue == doctest::Approx(exact).epsilon(0.02));
}

TEST_CASE("eigenvalue convergence is second order with consistent mass") {
  const double exact = 2.0 / (std::sinh(1.0) * std::sinh(1.0));
  double prev = 0.0;
  for (int level : {3, 4, 5}) {
    const ImmersedMesh m = geodesic_sphere(Delta{-1.0}, 1.0, level);
    const IntrinsicMetric g = build_intrinsic_metric(m);
    const SpectralResult r =
        lambda1_linear(assemble(m, g, nullptr, false, MassMode::consistent));
    const double err = std::abs(r.eigenvalue - exact);
    if (level > 3) {
      CHECK(prev / err >= 3.2);
      CHECK(prev / err <= 4.8);
    }
    prev = err;
  }
}

TEST_CASE("constant density cancels in every eigenvalue") {
  ImmersedMesh m = geodesic_sphere(Delta{-1.0}, 1.0, 3);
  const IntrinsicMetric g = build_intrinsic_metric(m);
  const double lam0 = lambda1_linear(assemble(m, g)).eigenvalue;
  m.density = Vec::Constant(m.vertex_count(), 1.3);
  const double lam1 = lambda1_linear(assemble(m, g, nullptr, true)).eigenvalue;
  CHECK(std::abs(lam1 - lam0) <= 1e-12 * lam0);
}

TEST_CASE("identity tensor path equals the plain laplacian path") {
  const ImmersedMesh m = geodesic_sphere(Delta{-1.0}, 1.0, 3);
  const IntrinsicMetric g = build_intrinsic_metric(m);
  const TensorField id = scaled_identity_tensor(m, 1.0);
  const double a = lambda1_linear(assemble(m, g)).eigenvalue;
  const double b = lambda1_linear(assemble(m, g, &id)).eigenvalue;
  CHECK(std::abs(a - b) <= 1e-12 * a);
}

TEST_CASE("disconnected meshes are flagged") {
  const ImmersedMesh a = geodesic_sphere(Delta{-1.0}, 1.0, 1);
  std::mt19937 rng(3);
  const Isometry iso = a.ambient.random_isometry(rng);
  std::vector<Vec> verts = a.vertices;
  for (const auto& v : a.vertices) verts.push_back(iso.apply_point(v));
  std::vector<std::array<int, 3>> faces = a.faces;
  const int off = a.vertex_count();
  for (const auto& f : a.faces)
    faces.push_back({f[0] + off, f[1] + off, f[2] + off});
  const ImmersedMesh two = make_mesh(a.ambient, std::move(verts), std::move(faces));
  const IntrinsicMetric g = build_intrinsic_metric(two);
  CHECK_THROWS_AS(lambda1_linear(assemble(two, g)), Error);
}

TEST_CASE("p = 2 reduction to the linear eigenvalue") {
  for (int scene = 0; scene < 2; ++scene) {
    const ImmersedMesh m = scene == 0 ? geodesic_sphere(Delta{-1.0}, 1.0, 3)
                                      : tube_torus(Delta{-1.0}, 0.6, 0.25, 2, 3);
    const IntrinsicMetric g = build_intrinsic_metric(m);
    const SpectralResult lin = lambda1_linear(assemble(m, g));
    PLaplaceOptions po;
    po.restarts = 2;
    po.max_iter = 1500;
    po.seed = 11;
    const SpectralResult r = lambda1_p(m, g, 2.0, po, &lin.eigenfunction);
    CHECK(std::abs(r.eigenvalue - lin.eigenvalue) <= 1e-4 * lin.eigenvalue);
    CHECK(r.certificate == "certified-upper-bound");
  }
}

TEST_CASE("p-laplacian gradient matches central finite differences") {
  const ImmersedMesh m = geodesic_sphere(Delta{-1.0}, 1.0, 1);
  const IntrinsicMetric g = build_intrinsic_metric(m);
  const int n = m.vertex_count();
  std::mt19937 rng(2024);

  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    int done = 0;
    while (done < 20) {
      Vec u = random_field(n, rng);
      const double c = recenter_shift(m, g, p, u);
      // Keep clear of the |u|^{p-1} kink so the difference quotient is clean.
      if ((u.array() - c).abs().minCoeff() < 1e-3) continue;
      ++done;

      const Vec grad = p_quotient_gradient(m, g, p, u);
      Vec fd(n);
      for (int i = 0; i < n; ++i) {
        const double h = 1e-6 * (1.0 + std::abs(u[i]));
        Vec up = u, dn = u;
        up[i] += h;
        dn[i] -= h;
        fd[i] = (p_quotient(m, g, p, up) - p_quotient(m, g, p, dn)) / (2.0 * h);
      }
      CHECK((fd - grad).norm() <= 1e-6 * grad.norm());
    }
  }
}

TEST_CASE("re-centering constraint is satisfied to tolerance") {
  const ImmersedMesh m = geodesic_sphere(Delta{-1.0}, 1.0, 2);
  const IntrinsicMetric g = build_intrinsic_metric(m);
  std::mt19937 rng(5);
  for (double p : {1.5, 2.0, 3.0}) {
    for (int k = 0; k < 10; ++k) {
      const Vec u = random_field(m.vertex_count(), rng);
      const double c = recenter_shift(m, g, p, u);
      double mom = 0.0, mag = 0.0;
      for (int v = 0; v < u.size(); ++v) {
        const double d = u[v] - c;
        const double w = g.vertex_area[v] * std::pow(std::abs(d), p - 1.0);
        mom += w * (d >= 0 ? 1.0 : -1.0);
        mag += w;
      }
      CHECK(std::abs(mom) <= 1e-10 * mag);
    }
  }
}

TEST_CASE("model-map scaling of the quotient and the eigenvalue") {
  const ImmersedMesh m = geodesic_sphere(Delta{-1.0}, 1.0, 2);
  const IntrinsicMetric g = build_intrinsic_metric(m);
  const double c = 2.0;
  const ImmersedMesh scaled = scale_model(m, c);
  const IntrinsicMetric gs = build_intrinsic_metric(scaled);

  std::mt19937 rng(8);
  for (double p : {1.5, 2.0, 3.0}) {
    for (int k = 0; k < 5; ++k) {
      const Vec u = random_field(m.vertex_count(), rng);
      const double q0 = p_quotient(m, g, p, u);
      const double q1 = p_quotient(scaled, gs, p, u);
      CHECK(q1 == doctest::Approx(std::pow(c, p) * q0).epsilon(1e-12));
    }
  }

  const double lam = lambda1_linear(assemble(m, g)).eigenvalue;
  const double lam_scaled = lambda1_linear(assemble(scaled, gs)).eigenvalue;
  CHECK(lam_scaled == doctest::Approx(c * c * lam).epsilon(1e-6));
}

TEST_CASE("steklov eigenvalue of flat disks") {
  for (double radius : {1.0, 2.0}) {
    const ImmersedMesh disk = flat_disk(radius, 2);
    const IntrinsicMetric g = build_intrinsic_metric(disk);
    const SpectralResult s = steklov_sigma1(assemble(disk, g));
    CHECK(s.eigenvalue == doctest::Approx(1.0 / radius).epsilon(0.01));
  }

  // Constant density cancels.
  ImmersedMesh disk = flat_disk(1.0, 1);
  const IntrinsicMetric g = build_intrinsic_metric(disk);
  const double s0 = steklov_sigma1(assemble(disk, g)).eigenvalue;
  disk.density = Vec::Constant(disk.vertex_count(), 0.7);
  const double s1 = steklov_sigma1(assemble(disk, g, nullptr, true)).eigenvalue;
  CHECK(std::abs(s1 - s0) <= 1e-10);

  // Boundary problems reject closed meshes; the p-quotient rejects open ones.
  const ImmersedMesh closed = geodesic_sphere(Delta{-1.0}, 1.0, 1);
  const IntrinsicMetric gc = build_intrinsic_metric(closed);
  CHECK_THROWS_AS(steklov_sigma1(assemble(closed, gc)), Error);
  CHECK_THROWS_AS(lambda1_p(disk, g, 2.0), Error);
}

TEST_CASE("dtn operator is symmetric positive semidefinite") {
  const ImmersedMesh disk = flat_disk(1.0, 1);
  const IntrinsicMetric g = build_intrinsic_metric(disk);
  const DtNOperator dtn = dirichlet_to_neumann(assemble(disk, g));
  const double top = dtn.matrix.cwiseAbs().maxCoeff();
  CHECK(dtn.asymmetry <= 1e-12 * top);
  Eigen::SelfAdjointEigenSolver<Mat> es(dtn.matrix);
  CHECK(es.eigenvalues()[0] >= -1e-12 * top);
}

TEST_CASE("wentzell eigenvalue of the unit disk") {
  const ImmersedMesh disk = flat_disk(1.0, 2);
  const IntrinsicMetric g = build_intrinsic_metric(disk);
  const AssembledOperators ops = assemble(disk, g);

  const SpectralResult w = wentzell_alpha1(ops, 0.5);
  CHECK(w.eigenvalue == doctest::Approx(1.5).epsilon(0.02));

  // Small b approaches the Steklov eigenvalue; alpha1 is nondecreasing in b.
  const double sigma = steklov_sigma1(ops).eigenvalue;
  CHECK(std::abs(wentzell_alpha1(ops, 1e-4).eigenvalue - sigma) <= 5e-4);
  double prev = 0.0;
  for (double b : {0.1, 0.5, 1.0}) {
    const double a = wentzell_alpha1(ops, b).eigenvalue;
    CHECK(a >= prev);
    prev = a;
  }

  CHECK_THROWS_AS(wentzell_alpha1(ops, -1.0), Error);
}

TEST_CASE("p outside the practical range is refused") {
  const ImmersedMesh m = geodesic_sphere(Delta{-1.0}, 1.0, 1);
  const IntrinsicMetric g = build_intrinsic_metric(m);
  CHECK_THROWS_AS(lambda1_p(m, g, 0.9), Error);
  CHECK_THROWS_AS(lambda1_p(m, g, 1.05), Error);
  CHECK_THROWS_AS(lambda1_p(m, g, 11.0), Error);
}
