#pragma once

#include "reilly/mesh.hpp"

#include <cstdint>
#include <string>

namespace reilly {

/// Result of a first-eigenvalue solve. The certificate distinguishes the
/// linear path (converged generalized eigenpair) from the p-Laplacian path,
/// where every feasible iterate upper-bounds the true eigenvalue, so the
/// reported value is a certified upper bound even without global convergence.
struct SpectralResult {
  double eigenvalue{};
  Vec eigenfunction;
  double residual{};
  std::string certificate;  // "linear-solve" or "certified-upper-bound"
  int iterations{};
  int restarts_used{};
  std::uint64_t seed{};
  bool converged{true};
  std::string note;
};

struct EigOptions {
  double tol{1e-11};  // relative eigen-residual
  int max_iter{400};
  int block{4};
};

/// Smallest nonzero eigenvalue of K u = lambda M u on a closed mesh, by
/// block inverse iteration on the constant-deflated (bordered) system.
/// Throws when the zero eigenvalue has multiplicity above one (disconnected
/// mesh) or the iteration fails to converge.
SpectralResult lambda1_linear(const AssembledOperators& ops,
                              const EigOptions& opts = {});

struct PLaplaceOptions {
  int restarts{20};        // seeded random starts, plus one warm start
  int max_iter{5000};
  double tol{1e-10};       // relative quotient change
  std::uint64_t seed{0};
  double p_min{1.1};
  double p_max{10.0};
};

/// Discrete Rayleigh quotient sum_F area |grad u|^p / sum_v area |u - c|^p
/// with the re-centering shift c chosen so the iterate satisfies the
/// p-mean-zero constraint. Exposed for the scaling and constraint tests.
double p_quotient(const ImmersedMesh& mesh, const IntrinsicMetric& metric,
                  double p, const Vec& field);

/// Total gradient of the quotient at the re-centered field (the shift's
/// derivative vanishes by the constraint).
Vec p_quotient_gradient(const ImmersedMesh& mesh, const IntrinsicMetric& metric,
                        double p, const Vec& field);

/// Root of the strictly decreasing map c -> sum |u-c|^{p-2}(u-c) area.
double recenter_shift(const ImmersedMesh& mesh, const IntrinsicMetric& metric,
                      double p, const Vec& field);

/// First nonzero p-Laplacian eigenvalue by projected descent with
/// backtracking, restarted from the warm start (usually the linear
/// eigenfunction) and seeded random fields.
SpectralResult lambda1_p(const ImmersedMesh& mesh, const IntrinsicMetric& metric,
                         double p, const PLaplaceOptions& opts = {},
                         const Vec* warm_start = nullptr);

/// Dense Dirichlet-to-Neumann operator of the assembled stiffness: Schur
/// complement onto the boundary vertices.
struct DtNOperator {
  Mat matrix;                       // nb x nb, symmetric
  std::vector<int> boundary;       // vertex ids, sorted
  double asymmetry{};              // pre-symmetrization defect
};
DtNOperator dirichlet_to_neumann(const AssembledOperators& ops);

/// First nonzero Steklov eigenvalue: DtN u = sigma M_boundary u.
SpectralResult steklov_sigma1(const AssembledOperators& ops,
                              const EigOptions& opts = {});

/// First nonzero Steklov-Wentzell eigenvalue:
/// (DtN + b K_boundary) u = alpha M_boundary u (positive-spectrum
/// convention; the convention is recorded in the result note).
SpectralResult wentzell_alpha1(const AssembledOperators& ops, double b,
                               const EigOptions& opts = {});

}  // namespace reilly
