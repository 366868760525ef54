#pragma once

#include "reilly/mesh.hpp"

#include <cstdint>
#include <string>

namespace reilly {

enum class SceneKind {
  geodesic_sphere,
  perturbed_sphere,
  tube_torus,
  euclidean_sphere,
  euclidean_ellipsoid,
  flat_disk,
};

SceneKind scene_kind_from_string(const std::string& name);
std::string to_string(SceneKind kind);

/// Deterministic analytic scene description. Regenerating from the same spec
/// yields a byte-identical mesh.
struct SceneSpec {
  SceneKind kind{SceneKind::geodesic_sphere};
  double delta{-1.0};
  int level{3};
  uint64_t seed{0};

  double rho{1.0};         // geodesic radius (spheres)
  double amplitude{0.0};   // radial perturbation amplitude
  int mode{2};             // Legendre degree of the perturbation
  double circle_radius{0.6};
  double tube_radius{0.25};
  int ambient_dim{3};      // 3 or 4 for the torus
  Eigen::Vector3d axes{1.0, 1.0, 1.0};  // ellipsoid semi-axes
  double radius{1.0};      // euclidean sphere / disk radius
  double gaussian_density{0.0};  // f = 0.5*s*|x|^2 on flat scenes when s > 0

  std::string label() const;
};

ImmersedMesh make_scene(const SceneSpec& spec);

/// Individual generators (make_scene dispatches to these).
ImmersedMesh geodesic_sphere(Delta delta, double rho, int level);
ImmersedMesh perturbed_sphere(Delta delta, double rho, double amplitude,
                              int mode, int level);
ImmersedMesh tube_torus(Delta delta, double circle_radius, double tube_radius,
                        int level, int ambient_dim = 3);
ImmersedMesh euclidean_sphere(double radius, int level);
ImmersedMesh euclidean_ellipsoid(const Eigen::Vector3d& axes, int level);
ImmersedMesh flat_disk(double radius, int level);

/// Icosphere combinatorics at a given level: 10*4^level + 2 vertices.
int icosphere_vertex_count(int level);

}  // namespace reilly
