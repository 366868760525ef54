#include "reilly/mesh.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace reilly {

double TensorField::min_eigenvalue() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& e : entries) {
    const double tr = e.trace();
    const double det = e.determinant();
    const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    m = std::min(m, 0.5 * tr - disc);
  }
  return m;
}

std::vector<int> ImmersedMesh::boundary_vertices() const {
  std::vector<int> out;
  for (const auto& loop : boundary_loops)
    out.insert(out.end(), loop.begin(), loop.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ImmersedMesh make_mesh(Ambient ambient, std::vector<Vec> vertices,
                       std::vector<std::array<int, 3>> faces, Vec density,
                       std::vector<std::vector<int>> boundary_loops) {
  const int nv = static_cast<int>(vertices.size());
  for (const auto& v : vertices) ambient.require_point(v);
  if (density.size() == 0) density = Vec::Zero(nv);
  if (density.size() != nv) {
    throw Error("invalid mesh: density length does not match vertex count");
  }

  // Directed-edge map: manifold + consistent orientation means every
  // undirected edge appears once or twice, never twice in the same direction.
  std::map<std::pair<int, int>, int> directed;
  for (const auto& f : faces) {
    for (int c = 0; c < 3; ++c) {
      int a = f[c], b = f[(c + 1) % 3];
      if (a < 0 || b < 0 || a >= nv || b >= nv || a == b) {
        throw Error("invalid mesh: face references bad vertex index");
      }
      if (!directed.emplace(std::make_pair(a, b), 1).second) {
        throw Error("invalid mesh: duplicated directed edge (inconsistent orientation)");
      }
    }
  }
  std::map<int, int> next_boundary;  // directed boundary edges a -> b
  for (const auto& [e, cnt] : directed) {
    (void)cnt;
    if (!directed.count({e.second, e.first})) {
      if (next_boundary.count(e.first)) {
        throw Error("invalid mesh: non-manifold boundary vertex");
      }
      next_boundary[e.first] = e.second;
    }
  }
  std::vector<std::vector<int>> loops;
  {
    std::set<int> seen;
    for (const auto& [start, nb] : next_boundary) {
      (void)nb;
      if (seen.count(start)) continue;
      std::vector<int> loop;
      int v = start;
      do {
        loop.push_back(v);
        seen.insert(v);
        auto it = next_boundary.find(v);
        if (it == next_boundary.end()) {
          throw Error("invalid mesh: open boundary chain");
        }
        v = it->second;
      } while (v != start);
      loops.push_back(std::move(loop));
    }
  }
  if (!boundary_loops.empty()) {
    auto flat = [](const std::vector<std::vector<int>>& ls) {
      std::vector<int> f;
      for (const auto& l : ls) f.insert(f.end(), l.begin(), l.end());
      std::sort(f.begin(), f.end());
      return f;
    };
    if (flat(boundary_loops) != flat(loops)) {
      throw Error("invalid mesh: declared boundary does not match face structure");
    }
  }

  ImmersedMesh m{ambient, std::move(vertices), std::move(faces),
                 std::move(density)};
  m.boundary_loops = std::move(loops);
  m.vertex_faces.assign(nv, {});
  std::vector<std::set<int>> ring(nv);
  for (int f = 0; f < m.face_count(); ++f) {
    for (int c = 0; c < 3; ++c) {
      const int a = m.faces[f][c];
      m.vertex_faces[a].push_back(f);
      ring[a].insert(m.faces[f][(c + 1) % 3]);
      ring[a].insert(m.faces[f][(c + 2) % 3]);
    }
  }
  m.vertex_ring.resize(nv);
  for (int v = 0; v < nv; ++v)
    m.vertex_ring[v].assign(ring[v].begin(), ring[v].end());
  m.on_boundary.assign(nv, false);
  for (const auto& loop : m.boundary_loops)
    for (int v : loop) m.on_boundary[v] = true;
  return m;
}

ImmersedMesh apply_isometry(const ImmersedMesh& mesh, const Isometry& iso) {
  std::vector<Vec> verts;
  verts.reserve(mesh.vertices.size());
  for (const auto& v : mesh.vertices) verts.push_back(iso.apply_point(v));
  return make_mesh(mesh.ambient, std::move(verts), mesh.faces, mesh.density,
                   mesh.boundary_loops);
}

TensorField apply_isometry(const TensorField& t, const Isometry& iso) {
  TensorField out = t;
  for (auto& f : out.frames) f = iso.linear * f;
  return out;
}

ImmersedMesh scale_model(const ImmersedMesh& mesh, double c) {
  const Delta d = mesh.ambient.delta();
  Ambient scaled(Delta{d.value * c * c}, mesh.ambient.dim());
  std::vector<Vec> verts;
  verts.reserve(mesh.vertices.size());
  for (const auto& v : mesh.vertices) verts.push_back(scale_model_point(v, c));
  return make_mesh(scaled, std::move(verts), mesh.faces, mesh.density,
                   mesh.boundary_loops);
}

IntrinsicMetric build_intrinsic_metric(const ImmersedMesh& mesh) {
  IntrinsicMetric g;
  g.face.resize(mesh.face_count());
  g.vertex_area = Vec::Zero(mesh.vertex_count());
  g.min_angle_deg = 180.0;
  double edge_sum = 0.0;
  long edge_count = 0;

  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto& [i, j, k] = mesh.faces[f];
    FaceGeometry& fg = g.face[f];
    const double a = mesh.ambient.distance(mesh.vertices[j], mesh.vertices[k]);
    const double b = mesh.ambient.distance(mesh.vertices[k], mesh.vertices[i]);
    const double c = mesh.ambient.distance(mesh.vertices[i], mesh.vertices[j]);
    fg.edge_len = {a, b, c};
    edge_sum += a + b + c;
    edge_count += 3;

    // Flat layout: corner i at origin, j on the x-axis.
    const double x = (c * c + b * b - a * a) / (2.0 * c);
    const double y2 = b * b - x * x;
    if (!(c > 0.0) || y2 <= 0.0) {
      throw Error("degenerate face: triangle inequality fails at face " +
                  std::to_string(f));
    }
    const double y = std::sqrt(y2);
    fg.corners.col(0) = Eigen::Vector2d(0.0, 0.0);
    fg.corners.col(1) = Eigen::Vector2d(c, 0.0);
    fg.corners.col(2) = Eigen::Vector2d(x, y);
    fg.area = 0.5 * c * y;
    if (fg.area <= 1e-14) {
      throw Error("degenerate face: vanishing area at face " + std::to_string(f));
    }

    auto angle = [](double opp, double s1, double s2) {
      return std::acos(std::clamp((s1 * s1 + s2 * s2 - opp * opp) / (2 * s1 * s2),
                                  -1.0, 1.0));
    };
    const double amin = std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
    fg.min_angle_deg = amin * 180.0 / M_PI;
    if (fg.min_angle_deg < 2.0) {
      throw Error("degenerate face: intrinsic angle below 2 degrees at face " +
                  std::to_string(f));
    }
    g.min_angle_deg = std::min(g.min_angle_deg, fg.min_angle_deg);

    for (int c0 = 0; c0 < 3; ++c0) {
      const Eigen::Vector2d e =
          fg.corners.col((c0 + 2) % 3) - fg.corners.col((c0 + 1) % 3);
      fg.grad.col(c0) = Eigen::Vector2d(-e.y(), e.x()) / (2.0 * fg.area);
    }
    for (int c0 = 0; c0 < 3; ++c0)
      g.vertex_area[mesh.faces[f][c0]] += fg.area / 3.0;
    g.total_area += fg.area;
  }
  g.mean_edge = edge_sum / static_cast<double>(edge_count);
  return g;
}

Vec vertex_measure(const ImmersedMesh& mesh, const IntrinsicMetric& metric,
                   bool weighted) {
  Vec a = metric.vertex_area;
  if (weighted)
    for (int v = 0; v < a.size(); ++v) a[v] *= std::exp(-mesh.density[v]);
  return a;
}

double integrate(const ImmersedMesh& mesh, const IntrinsicMetric& metric,
                 const Vec& field, bool weighted) {
  if (field.size() != mesh.vertex_count()) {
    throw Error("invalid field: length does not match vertex count");
  }
  return field.dot(vertex_measure(mesh, metric, weighted));
}

Vec boundary_measure(const ImmersedMesh& mesh, bool weighted) {
  Vec mu = Vec::Zero(mesh.vertex_count());
  for (const auto& loop : mesh.boundary_loops) {
    const int n = static_cast<int>(loop.size());
    for (int s = 0; s < n; ++s) {
      const int a = loop[s], b = loop[(s + 1) % n];
      const double len =
          mesh.ambient.distance(mesh.vertices[a], mesh.vertices[b]);
      mu[a] += 0.5 * len;
      mu[b] += 0.5 * len;
    }
  }
  if (weighted)
    for (int v = 0; v < mu.size(); ++v) mu[v] *= std::exp(-mesh.density[v]);
  return mu;
}

double integrate_boundary(const ImmersedMesh& mesh, const Vec& field,
                          bool weighted) {
  return field.dot(boundary_measure(mesh, weighted));
}

// Procrustes over the two outgoing edges; reflections allowed, so frame
// orientation conventions never matter.
Eigen::Matrix2d corner_frame_alignment(const ImmersedMesh& mesh,
                                       const IntrinsicMetric& metric, int face,
                                       int corner, const Mat& frame) {
  const FaceGeometry& fg = metric.face[face];
  const std::array<int, 3>& f = mesh.faces[face];
  const int v = f[corner];
  Eigen::Matrix2d cross = Eigen::Matrix2d::Zero();
  for (int other = 1; other <= 2; ++other) {
    const int c2 = (corner + other) % 3;
    const Vec lg = mesh.ambient.log(mesh.vertices[v], mesh.vertices[f[c2]]);
    Eigen::Vector2d e(mesh.ambient.inner(lg, frame.col(0)),
                      mesh.ambient.inner(lg, frame.col(1)));
    const Eigen::Vector2d d = fg.corners.col(c2) - fg.corners.col(corner);
    cross += d * e.transpose();
  }
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(
      cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

std::vector<Eigen::Matrix2d> face_tensors(const ImmersedMesh& mesh,
                                          const IntrinsicMetric& metric,
                                          const TensorField& tensor) {
  if (tensor.size() != mesh.vertex_count()) {
    throw Error("frame mismatch: tensor field size does not match mesh");
  }
  if (tensor.min_eigenvalue() <= 0.0) {
    throw Error("tensor not positive definite");
  }
  std::vector<Eigen::Matrix2d> out(mesh.face_count());
  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto& fc = mesh.faces[f];
    Eigen::Matrix2d acc = Eigen::Matrix2d::Zero();
    for (int c = 0; c < 3; ++c) {
      const Eigen::Matrix2d rot =
          corner_frame_alignment(mesh, metric, f, c, tensor.frames[fc[c]]);
      acc += rot * tensor.entries[fc[c]] * rot.transpose();
    }
    out[f] = acc / 3.0;
  }
  return out;
}

Eigen::Vector2d face_gradient(const IntrinsicMetric& metric, int f,
                              const std::array<int, 3>& corners,
                              const Vec& field) {
  const FaceGeometry& fg = metric.face[f];
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  for (int c = 0; c < 3; ++c) g += field[corners[c]] * fg.grad.col(c);
  return g;
}

AssembledOperators assemble(const ImmersedMesh& mesh,
                            const IntrinsicMetric& metric,
                            const TensorField* tensor, bool weighted,
                            MassMode mass_mode) {
  const int nv = mesh.vertex_count();
  AssembledOperators ops;
  ops.weighted = weighted;
  ops.mass_mode = mass_mode;

  std::vector<Eigen::Matrix2d> tf;
  if (tensor) tf = face_tensors(mesh, metric, *tensor);

  std::vector<Eigen::Triplet<double>> kt, mt;
  kt.reserve(mesh.face_count() * 9);
  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto& fc = mesh.faces[f];
    const FaceGeometry& fg = metric.face[f];
    double w = 1.0;
    if (weighted) {
      const double fbar = (mesh.density[fc[0]] + mesh.density[fc[1]] +
                           mesh.density[fc[2]]) / 3.0;
      w = std::exp(-fbar);
    }
    Eigen::Matrix<double, 2, 3> tg = tensor ? (tf[f] * fg.grad).eval() : fg.grad;
    const Eigen::Matrix3d ke = (fg.area * w) * (fg.grad.transpose() * tg);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        kt.emplace_back(fc[a], fc[b], ke(a, b));
    if (mass_mode == MassMode::consistent) {
      const double s = fg.area * w / 12.0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          mt.emplace_back(fc[a], fc[b], s * (a == b ? 2.0 : 1.0));
    }
  }
  ops.stiffness.resize(nv, nv);
  ops.stiffness.setFromTriplets(kt.begin(), kt.end());

  ops.lumped_mass = vertex_measure(mesh, metric, weighted);
  ops.mass.resize(nv, nv);
  if (mass_mode == MassMode::consistent) {
    ops.mass.setFromTriplets(mt.begin(), mt.end());
  } else {
    std::vector<Eigen::Triplet<double>> dt;
    dt.reserve(nv);
    for (int v = 0; v < nv; ++v) dt.emplace_back(v, v, ops.lumped_mass[v]);
    ops.mass.setFromTriplets(dt.begin(), dt.end());
  }

  ops.boundary_vertices = mesh.boundary_vertices();
  ops.boundary_mass = boundary_measure(mesh, weighted);
  ops.boundary_stiffness.resize(nv, nv);
  if (!mesh.boundary_loops.empty()) {
    std::vector<Eigen::Triplet<double>> bt;
    for (const auto& loop : mesh.boundary_loops) {
      const int n = static_cast<int>(loop.size());
      for (int s = 0; s < n; ++s) {
        const int a = loop[s], b = loop[(s + 1) % n];
        const double len =
            mesh.ambient.distance(mesh.vertices[a], mesh.vertices[b]);
        double w = 1.0;
        if (weighted)
          w = std::exp(-0.5 * (mesh.density[a] + mesh.density[b]));
        const double k = w / len;
        bt.emplace_back(a, a, k);
        bt.emplace_back(b, b, k);
        bt.emplace_back(a, b, -k);
        bt.emplace_back(b, a, -k);
      }
    }
    ops.boundary_stiffness.setFromTriplets(bt.begin(), bt.end());
  }
  return ops;
}

double enclosing_radius(const ImmersedMesh& mesh, const Vec& q0) {
  mesh.ambient.require_point(q0);
  double r = 0.0;
  for (const auto& v : mesh.vertices)
    r = std::max(r, mesh.ambient.distance(q0, v));
  return r;
}

double small_ball_threshold(Delta delta) {
  if (!delta.hyperbolic()) return std::numeric_limits<double>::infinity();
  return std::acosh(std::sqrt(2.0)) / (2.0 * delta.kappa());
}

}  // namespace reilly
