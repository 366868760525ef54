#pragma once

#include "reilly/ambient.hpp"
#include "reilly/tensor.hpp"

#include <Eigen/Sparse>

#include <array>
#include <optional>
#include <vector>

namespace reilly {

using SparseMat = Eigen::SparseMatrix<double>;

/// Oriented simplicial surface immersed in a constant-curvature ambient.
/// Immutable after construction through make_mesh, which validates topology
/// (manifold edges, consistent orientation, boundary loops) and the ambient
/// point constraint for every vertex.
struct ImmersedMesh {
  Ambient ambient;
  std::vector<Vec> vertices;
  std::vector<std::array<int, 3>> faces;
  Vec density;  // per-vertex f; zero = unweighted

  std::vector<std::vector<int>> boundary_loops;  // ordered vertex indices
  std::vector<std::vector<int>> vertex_faces;    // incident faces per vertex
  std::vector<std::vector<int>> vertex_ring;     // sorted 1-ring neighbours
  std::vector<bool> on_boundary;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int face_count() const { return static_cast<int>(faces.size()); }
  bool closed() const { return boundary_loops.empty(); }

  std::vector<int> boundary_vertices() const;  // sorted unique
};

ImmersedMesh make_mesh(Ambient ambient, std::vector<Vec> vertices,
                       std::vector<std::array<int, 3>> faces,
                       Vec density = Vec(),
                       std::vector<std::vector<int>> boundary_loops = {});

ImmersedMesh apply_isometry(const ImmersedMesh& mesh, const Isometry& iso);
TensorField apply_isometry(const TensorField& t, const Isometry& iso);

/// Model map (delta, lengths L) -> (c^2 delta, L/c); see scale_model_point.
ImmersedMesh scale_model(const ImmersedMesh& mesh, double c);

struct FaceGeometry {
  double area{};
  std::array<double, 3> edge_len{};        // edge_len[i] is opposite corner i
  Eigen::Matrix<double, 2, 3> corners;     // isometric flat layout
  Eigen::Matrix<double, 2, 3> grad;        // hat-function gradients
  double min_angle_deg{};
};

/// Piecewise-flat metric induced by geodesic edge lengths. Throws on
/// degenerate faces (triangle inequality failure or intrinsic angle < 2 deg);
/// min_angle_deg below 10 is reported for callers to warn on.
struct IntrinsicMetric {
  std::vector<FaceGeometry> face;
  Vec vertex_area;  // unweighted lumped areas
  double total_area{};
  double mean_edge{};
  double min_angle_deg{};
};

IntrinsicMetric build_intrinsic_metric(const ImmersedMesh& mesh);

/// Lumped vertex measure, optionally weighted by e^{-f}.
Vec vertex_measure(const ImmersedMesh& mesh, const IntrinsicMetric& metric,
                   bool weighted);

/// Lumped quadrature of a per-vertex field against the (weighted) measure.
double integrate(const ImmersedMesh& mesh, const IntrinsicMetric& metric,
                 const Vec& field, bool weighted = false);

/// Lumped boundary measure over boundary vertices (zero elsewhere).
Vec boundary_measure(const ImmersedMesh& mesh, bool weighted);
double integrate_boundary(const ImmersedMesh& mesh, const Vec& field,
                          bool weighted = false);

enum class MassMode { lumped, consistent };

struct AssembledOperators {
  SparseMat stiffness;           // integral <T grad u, grad v> e^{-f}
  SparseMat mass;                // integral u v e^{-f}
  Vec lumped_mass;               // diagonal of the lumped mass
  SparseMat boundary_stiffness;  // 1d stiffness along boundary loops
  Vec boundary_mass;             // lumped boundary measure (full-size vector)
  std::vector<int> boundary_vertices;
  bool weighted{};
  MassMode mass_mode{};
};

/// Linear finite elements on the intrinsic flat triangles. A null tensor
/// selects the plain identity (cotangent) stiffness; otherwise the tensor is
/// rotated from its vertex frames into each face layout and averaged.
/// Throws on a tensor that is not positive definite.
AssembledOperators assemble(const ImmersedMesh& mesh,
                            const IntrinsicMetric& metric,
                            const TensorField* tensor = nullptr,
                            bool weighted = false,
                            MassMode mass_mode = MassMode::lumped);

/// Tensor averaged onto faces in face-layout coordinates (exposed for the
/// divergence residual and the proof-chain quadratures).
std::vector<Eigen::Matrix2d> face_tensors(const ImmersedMesh& mesh,
                                          const IntrinsicMetric& metric,
                                          const TensorField& tensor);

/// Per-face gradient of a vertex field in face-layout coordinates.
Eigen::Vector2d face_gradient(const IntrinsicMetric& metric, int f,
                              const std::array<int, 3>& corners,
                              const Vec& field);

/// Orthogonal 2x2 map from vertex-frame coordinates to the flat layout of
/// one incident face (Procrustes over the two outgoing edges).
Eigen::Matrix2d corner_frame_alignment(const ImmersedMesh& mesh,
                                       const IntrinsicMetric& metric, int face,
                                       int corner, const Mat& vertex_frame);

/// Max geodesic distance from q0 to the vertices; geodesic balls are convex
/// in a Cartan-Hadamard ambient, so this certifies a convex-ball hypothesis.
double enclosing_radius(const ImmersedMesh& mesh, const Vec& q0);

/// Radius threshold arcosh(sqrt 2)/(2 sqrt(-delta)) of the small-ball
/// hypothesis; infinity at delta = 0.
double small_ball_threshold(Delta delta);

}  // namespace reilly
