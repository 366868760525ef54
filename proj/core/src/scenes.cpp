#include "reilly/scenes.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace reilly {

SceneKind scene_kind_from_string(const std::string& name) {
  if (name == "geodesic_sphere") return SceneKind::geodesic_sphere;
  if (name == "perturbed_sphere") return SceneKind::perturbed_sphere;
  if (name == "tube_torus") return SceneKind::tube_torus;
  if (name == "euclidean_sphere") return SceneKind::euclidean_sphere;
  if (name == "euclidean_ellipsoid") return SceneKind::euclidean_ellipsoid;
  if (name == "flat_disk") return SceneKind::flat_disk;
  throw Error("invalid config: unknown scene kind '" + name + "'");
}

std::string to_string(SceneKind kind) {
  switch (kind) {
    case SceneKind::geodesic_sphere: return "geodesic_sphere";
    case SceneKind::perturbed_sphere: return "perturbed_sphere";
    case SceneKind::tube_torus: return "tube_torus";
    case SceneKind::euclidean_sphere: return "euclidean_sphere";
    case SceneKind::euclidean_ellipsoid: return "euclidean_ellipsoid";
    case SceneKind::flat_disk: return "flat_disk";
  }
  return "?";
}

std::string SceneSpec::label() const {
  std::ostringstream os;
  os << to_string(kind) << "-L" << level;
  switch (kind) {
    case SceneKind::geodesic_sphere:
      os << "-d" << delta << "-r" << rho;
      break;
    case SceneKind::perturbed_sphere:
      os << "-d" << delta << "-r" << rho << "-a" << amplitude << "-m" << mode;
      break;
    case SceneKind::tube_torus:
      os << "-d" << delta << "-R" << circle_radius << "-t" << tube_radius
         << "-n" << ambient_dim;
      break;
    case SceneKind::euclidean_sphere:
      os << "-r" << radius;
      break;
    case SceneKind::euclidean_ellipsoid:
      os << "-a" << axes[0] << "x" << axes[1] << "x" << axes[2];
      break;
    case SceneKind::flat_disk:
      os << "-r" << radius;
      break;
  }
  if (gaussian_density > 0.0) os << "-g" << gaussian_density;
  return os.str();
}

int icosphere_vertex_count(int level) {
  int p = 1;
  for (int i = 0; i < level; ++i) p *= 4;
  return 10 * p + 2;
}

namespace {

struct UnitSphereMesh {
  std::vector<Eigen::Vector3d> dirs;  // unit directions
  std::vector<std::array<int, 3>> faces;
};

// Icosahedron subdivided on the unit sphere; midpoint insertion keeps the
// coarse vertex set, giving nested refinement families.
UnitSphereMesh icosphere(int level) {
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  std::vector<Eigen::Vector3d> dirs = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& d : dirs) d.normalize();
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Eigen::Vector3d m = (dirs[a] + dirs[b]).normalized();
      dirs.push_back(m);
      const int idx = static_cast<int>(dirs.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
  return {std::move(dirs), std::move(faces)};
}

Vec gaussian_density_field(const std::vector<Vec>& verts, double s) {
  Vec f = Vec::Zero(static_cast<int>(verts.size()));
  if (s > 0.0)
    for (size_t v = 0; v < verts.size(); ++v) f[v] = 0.5 * s * verts[v].squaredNorm();
  return f;
}

}  // namespace

ImmersedMesh geodesic_sphere(Delta delta, double rho, int level) {
  return perturbed_sphere(delta, rho, 0.0, 2, level);
}

ImmersedMesh perturbed_sphere(Delta delta, double rho, double amplitude,
                              int mode, int level) {
  if (!(rho > 0.0)) throw Error("invalid scene: sphere radius must be positive");
  // Relative radial perturbation rho(1 + a Y); |a| < 1/2 keeps the radius
  // inside (rho/2, 3rho/2) since |Y| <= 1.
  if (!(std::abs(amplitude) < 0.5)) {
    throw Error("self-intersection: perturbation amplitude must be below 1/2");
  }
  Ambient ambient(delta, 3);
  const Vec c = ambient.base_point();
  const Mat frame = ambient.canonical_frame(c);
  UnitSphereMesh s = icosphere(level);
  std::vector<Vec> verts;
  verts.reserve(s.dirs.size());
  for (const auto& d : s.dirs) {
    double r = rho;
    if (amplitude != 0.0) r *= 1.0 + amplitude * std::legendre(mode, d.z());
    Vec t = frame * Vec(d);
    verts.push_back(ambient.exp(c, r * t));
  }
  return make_mesh(ambient, std::move(verts), std::move(s.faces));
}

ImmersedMesh euclidean_sphere(double radius, int level) {
  return euclidean_ellipsoid(Eigen::Vector3d(radius, radius, radius), level);
}

ImmersedMesh euclidean_ellipsoid(const Eigen::Vector3d& axes, int level) {
  if (!(axes.minCoeff() > 0.0))
    throw Error("invalid scene: ellipsoid axes must be positive");
  Ambient ambient(Delta{0.0}, 3);
  UnitSphereMesh s = icosphere(level);
  std::vector<Vec> verts;
  verts.reserve(s.dirs.size());
  for (const auto& d : s.dirs)
    verts.push_back(Vec(d.cwiseProduct(axes)));
  return make_mesh(ambient, std::move(verts), std::move(s.faces));
}

ImmersedMesh tube_torus(Delta delta, double circle_radius, double tube_radius,
                        int level, int ambient_dim) {
  if (!(circle_radius > 0.0) || !(tube_radius > 0.0)) {
    throw Error("invalid scene: torus radii must be positive");
  }
  if (ambient_dim != 3 && ambient_dim != 4) {
    throw Error("invalid scene: torus ambient dimension must be 3 or 4");
  }
  if (ambient_dim == 3 && !(tube_radius < 0.8 * circle_radius)) {
    throw Error("self-intersection: tube radius too large for the core circle");
  }
  const int scale = 1 << level;
  const int nu = 10 * scale;  // along the core circle
  const int nv = 4 * scale;   // around the tube

  std::vector<Vec> verts;
  verts.reserve(static_cast<size_t>(nu) * nv);

  if (ambient_dim == 3) {
    Ambient ambient(delta, 3);
    if (!delta.hyperbolic()) {
      // Euclidean tube torus in R^3.
      for (int i = 0; i < nu; ++i) {
        const double u = 2.0 * M_PI * i / nu;
        for (int j = 0; j < nv; ++j) {
          const double v = 2.0 * M_PI * j / nv;
          Vec p(3);
          const double w = circle_radius + tube_radius * std::cos(v);
          p << w * std::cos(u), w * std::sin(u), tube_radius * std::sin(v);
          verts.push_back(p);
        }
      }
    } else {
      // Tube of geodesic radius tube_radius around the hyperbolic circle of
      // radius circle_radius in the plane spanned by the first two frame axes.
      const Vec c = ambient.base_point();
      const Mat F = ambient.canonical_frame(c);
      for (int i = 0; i < nu; ++i) {
        const double u = 2.0 * M_PI * i / nu;
        const Vec dir = std::cos(u) * F.col(0) + std::sin(u) * F.col(1);
        const Vec gamma = ambient.exp(c, circle_radius * dir);
        // Unit normal frame on the circle: radial direction and the third
        // coordinate axis (orthogonal to the plane of the circle).
        const double k = delta.kappa();
        const Vec n1 = k * std::sinh(k * circle_radius) * c +
                       std::cosh(k * circle_radius) * dir;
        const Vec n2 = F.col(2);
        for (int j = 0; j < nv; ++j) {
          const double v = 2.0 * M_PI * j / nv;
          verts.push_back(ambient.exp(
              gamma, tube_radius * (std::cos(v) * n1 + std::sin(v) * n2)));
        }
      }
    }
  } else {
    // Codimension-2 flat torus: orbit of a two-torus of spatial rotations.
    // Spatial radii are the generalized sines of the two geodesic radii.
    Ambient ambient(delta, 4);
    const double a = delta_trig(circle_radius, delta).sd;
    const double b = delta_trig(tube_radius, delta).sd;
    const bool hyp = delta.hyperbolic();
    const double k = hyp ? delta.kappa() : 0.0;
    for (int i = 0; i < nu; ++i) {
      const double u = 2.0 * M_PI * i / nu;
      for (int j = 0; j < nv; ++j) {
        const double v = 2.0 * M_PI * j / nv;
        Vec p(ambient.coord_size());
        if (hyp) {
          const double x0 = std::sqrt(a * a + b * b + 1.0 / (k * k));
          p << x0, a * std::cos(u), a * std::sin(u), b * std::cos(v),
              b * std::sin(v);
        } else {
          p << a * std::cos(u), a * std::sin(u), b * std::cos(v),
              b * std::sin(v);
        }
        verts.push_back(p);
      }
    }
  }

  std::vector<std::array<int, 3>> faces;
  faces.reserve(static_cast<size_t>(nu) * nv * 2);
  auto id = [&](int i, int j) { return (i % nu) * nv + (j % nv); };
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  const Ambient ambient(delta, ambient_dim);
  return make_mesh(ambient, std::move(verts), std::move(faces));
}

ImmersedMesh flat_disk(double radius, int level) {
  if (!(radius > 0.0)) throw Error("invalid scene: disk radius must be positive");
  const int rings = 8 * (1 << level);
  Ambient ambient(Delta{0.0}, 2);

  std::vector<Vec> verts;
  std::vector<int> ring_start = {0};
  verts.push_back(Vec::Zero(2));
  for (int k = 1; k <= rings; ++k) {
    ring_start.push_back(static_cast<int>(verts.size()));
    const double r = radius * k / rings;
    const int n = 6 * k;
    for (int j = 0; j < n; ++j) {
      const double t = 2.0 * M_PI * j / n;
      Vec p(2);
      p << r * std::cos(t), r * std::sin(t);
      verts.push_back(p);
    }
  }

  std::vector<std::array<int, 3>> faces;
  auto ring_id = [&](int k, int j) {
    if (k == 0) return 0;
    return ring_start[k] + (j % (6 * k));
  };
  // Stitch ring k-1 (inner) to ring k (outer); outer ring has 6 more vertices,
  // one extra per sector corner.
  for (int k = 1; k <= rings; ++k) {
    const int inner = 6 * (k - 1), outer = 6 * k;
    if (k == 1) {
      for (int j = 0; j < outer; ++j)
        faces.push_back({0, ring_id(1, j), ring_id(1, j + 1)});
      continue;
    }
    for (int s = 0; s < 6; ++s) {
      for (int t = 0; t < k; ++t) {
        const int jo = s * k + t;
        const int ji = s * (k - 1) + t;
        faces.push_back({ring_id(k, jo), ring_id(k, jo + 1), ring_id(k - 1, ji)});
        if (t < k - 1) {
          faces.push_back(
              {ring_id(k - 1, ji), ring_id(k, jo + 1), ring_id(k - 1, ji + 1)});
        }
      }
    }
  }
  return make_mesh(ambient, std::move(verts), std::move(faces));
}

ImmersedMesh make_scene(const SceneSpec& spec) {
  ImmersedMesh mesh = [&] {
    switch (spec.kind) {
      case SceneKind::geodesic_sphere:
        return geodesic_sphere(Delta{spec.delta}, spec.rho, spec.level);
      case SceneKind::perturbed_sphere:
        return perturbed_sphere(Delta{spec.delta}, spec.rho, spec.amplitude,
                                spec.mode, spec.level);
      case SceneKind::tube_torus:
        return tube_torus(Delta{spec.delta}, spec.circle_radius,
                          spec.tube_radius, spec.level, spec.ambient_dim);
      case SceneKind::euclidean_sphere:
        return euclidean_sphere(spec.radius, spec.level);
      case SceneKind::euclidean_ellipsoid:
        return euclidean_ellipsoid(spec.axes, spec.level);
      case SceneKind::flat_disk:
        return flat_disk(spec.radius, spec.level);
    }
    throw Error("invalid scene: unknown kind");
  }();
  if (spec.gaussian_density > 0.0) {
    if (mesh.ambient.delta().hyperbolic()) {
      throw Error("invalid scene: gaussian density is a flat-ambient option");
    }
    mesh.density = gaussian_density_field(mesh.vertices, spec.gaussian_density);
  }
  return mesh;
}

}  // namespace reilly
