#pragma once

#include "reilly/mesh.hpp"
#include "reilly/tensor.hpp"

#include <vector>

namespace reilly {

/// Extrinsic curvature data from a 2-ring quadratic fit in ambient normal
/// coordinates at each vertex. The mean curvature vector uses the averaged
/// convention H = (1/m) tr_g A, so a geodesic sphere of radius rho carries
/// |H| = cd(rho)/sd(rho).
struct CurvatureData {
  std::vector<Mat> tangent_frames;  // coord_size x 2
  std::vector<Mat> normal_frames;   // coord_size x (n-2); may have 0 columns
  std::vector<std::vector<Eigen::Matrix2d>> second_fund;  // per normal dir
  std::vector<Vec> mean_curvature;  // ambient normal vectors
  Vec mean_curvature_sq;            // |H|^2 per vertex

  int codim() const {
    return normal_frames.empty() ? 0 : static_cast<int>(normal_frames[0].cols());
  }
};

CurvatureData second_fundamental_form(const ImmersedMesh& mesh);

/// Generalized mean curvature vector H_T = sum_i A(T e_i, e_i) per vertex.
/// Tensor frames are aligned with the curvature frames internally; with the
/// identity tensor this returns exactly m * H.
std::vector<Vec> generalized_mean_curvature(const ImmersedMesh& mesh,
                                            const CurvatureData& curv,
                                            const TensorField& tensor);

/// |H_T|^2 as a vertex field.
Vec generalized_mean_curvature_sq(const ImmersedMesh& mesh,
                                  const CurvatureData& curv,
                                  const TensorField& tensor);

/// Identity tensor (optionally scaled) on the curvature tangent frames.
TensorField identity_tensor(const CurvatureData& curv, double scale = 1.0);

/// First Newton tensor (tr_g A) I - A of a codimension-1 convex surface,
/// with the shape operator oriented along the mean curvature direction.
/// Divergence-free in a constant-curvature ambient; the discrete divergence
/// residual is reported through check_tensor. Throws when the surface is not
/// convex (the tensor loses positive definiteness) or the codimension is
/// not 1.
TensorField newton_tensor(const ImmersedMesh& mesh, const CurvatureData& curv);

/// Weak-form divergence residual ||div T||_{L2}: piecewise-constant face
/// tensors tested against hat-function gradients, mapped back to vertex
/// frames with the assembly alignment.
double divergence_residual(const ImmersedMesh& mesh,
                           const IntrinsicMetric& metric,
                           const TensorField& tensor);

/// Hypothesis report for a candidate tensor: positivity margin, divergence
/// residual against the calibrated tolerance tol = div_coeff * h, the
/// trace condition (tr T) I - 2T >= 0, and the small-ball alternative.
struct TensorReport {
  double spd_margin{};           // min eigenvalue over vertices
  double spd_margin_rel{};       // relative to the mean trace
  double div_l2{};               // ||div T||_{L2}
  double div_rel{};              // div_l2 / ||tr T||_{L2}
  double div_tol{};              // div_coeff * mean edge
  bool divergence_free{};
  double cond_a_margin_rel{};    // min eig of (tr T)I - 2T over mean trace
  bool cond_a{};
  double enclosing_radius{};
  double ball_threshold{};
  double cond_b_margin{};        // threshold - radius
  bool cond_b{};
  double cd2_max{};              // max cd^2(r); <= 2 inside the small ball
  double lambda_max_rel{};       // sup of largest eigenvalue over (tr T)/2
};

struct TensorCheckOptions {
  double div_coeff{1.0};      // tolerance coefficient, calibrated on scenes
  double cond_a_tol{0.02};    // relative slack on the trace condition
};

TensorReport check_tensor(const ImmersedMesh& mesh,
                          const IntrinsicMetric& metric,
                          const TensorField& tensor, const Vec& q0,
                          const TensorCheckOptions& opts = {});

/// Curvature vector of the boundary curve(s) of a flat-ambient mesh, from a
/// five-point quadratic fit in chordal arclength. Returned per boundary
/// vertex (ambient vectors), zero on interior vertices.
std::vector<Vec> boundary_curvature(const ImmersedMesh& mesh);

}  // namespace reilly
