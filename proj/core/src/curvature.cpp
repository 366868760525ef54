#include "reilly/curvature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <set>

namespace reilly {

namespace {

std::vector<int> two_ring(const ImmersedMesh& mesh, int v) {
  std::set<int> out;
  for (int w : mesh.vertex_ring[v]) {
    out.insert(w);
    for (int x : mesh.vertex_ring[w]) out.insert(x);
  }
  out.erase(v);
  return {out.begin(), out.end()};
}

Eigen::Vector2d eig_range_2x2(const Eigen::Matrix2d& s) {
  const double tr = s.trace();
  const double det = s.determinant();
  const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  return {0.5 * tr - disc, 0.5 * tr + disc};
}

// Orthogonal change of basis between two tangent frames spanning the same
// plane; throws when the planes disagree beyond tolerance.
Eigen::Matrix2d frame_change(const Ambient& amb, const Mat& from,
                             const Mat& to) {
  Eigen::Matrix2d r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = amb.inner(to.col(i), from.col(j));
  if (std::abs(std::abs(r.determinant()) - 1.0) > 1e-6) {
    throw Error("frame mismatch: tensor frame does not span the tangent plane");
  }
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(
      r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace

CurvatureData second_fundamental_form(const ImmersedMesh& mesh) {
  const Ambient& amb = mesh.ambient;
  const int nv = mesh.vertex_count();
  const int n = amb.dim();
  const int codim = n - 2;

  CurvatureData out;
  out.tangent_frames.resize(nv);
  out.normal_frames.resize(nv);
  out.second_fund.resize(nv);
  out.mean_curvature.resize(nv);
  out.mean_curvature_sq = Vec::Zero(nv);

  for (int v = 0; v < nv; ++v) {
    const Vec& p = mesh.vertices[v];
    const Mat ambient_frame = amb.canonical_frame(p);
    const std::vector<int> stencil = two_ring(mesh, v);
    if (static_cast<int>(mesh.vertex_ring[v].size()) < 3 ||
        static_cast<int>(stencil.size()) < 5) {
      throw Error("underdetermined fit: vertex " + std::to_string(v) +
                  " has too few neighbours");
    }

    // Neighbour logs in the canonical frame: Euclidean coordinates on T_pN.
    Mat y(static_cast<int>(stencil.size()), n);
    for (size_t i = 0; i < stencil.size(); ++i) {
      const Vec lg = amb.log(p, mesh.vertices[stencil[i]]);
      for (int k = 0; k < n; ++k)
        y(static_cast<int>(i), k) = amb.inner(lg, ambient_frame.col(k));
    }

    // Tangent plane: dominant plane of the stencil.
    const Eigen::SelfAdjointEigenSolver<Mat> pca(y.transpose() * y);
    Mat plane(n, 2);  // eigenvalues ascending, take the top two
    plane.col(0) = pca.eigenvectors().col(n - 1);
    plane.col(1) = pca.eigenvectors().col(n - 2);

    // Stored frame: Gram-Schmidt of the first two incident edge directions,
    // projected into the fitted plane so the frame is exactly tangent.
    Mat t(n, 2);
    {
      int found = 0;
      for (int w : mesh.vertex_ring[v]) {
        const Vec lg = amb.log(p, mesh.vertices[w]);
        Vec e(n);
        for (int k = 0; k < n; ++k) e[k] = amb.inner(lg, ambient_frame.col(k));
        Vec proj = plane * (plane.transpose() * e);
        for (int j = 0; j < found; ++j) proj -= proj.dot(t.col(j)) * t.col(j);
        if (proj.norm() < 1e-10) continue;
        t.col(found++) = proj / proj.norm();
        if (found == 2) break;
      }
      if (found < 2) {
        throw Error("underdetermined fit: collapsed tangent plane at vertex " +
                    std::to_string(v));
      }
    }

    // Normal directions: complete the frame deterministically.
    Mat nu(n, codim);
    {
      int found = 0;
      for (int axis = 0; axis < n && found < codim; ++axis) {
        Vec e = Vec::Zero(n);
        e[axis] = 1.0;
        e -= t * (t.transpose() * e);
        for (int j = 0; j < found; ++j) e -= e.dot(nu.col(j)) * nu.col(j);
        if (e.norm() < 0.25) continue;
        nu.col(found++) = e / e.norm();
      }
      if (found < codim) {
        throw Error("frame construction failed: normal completion at vertex " +
                    std::to_string(v));
      }
    }

    // Quadratic graph fit c_alpha(a, b); the linear terms absorb the
    // residual tilt of the fitted plane.
    const int rows = static_cast<int>(stencil.size());
    const double scale = std::sqrt(y.squaredNorm() / rows);
    Mat design(rows, 5);
    Mat rhs = Mat::Zero(rows, std::max(codim, 1));
    for (int i = 0; i < rows; ++i) {
      const double a = y.row(i).dot(t.col(0)) / scale;
      const double b = y.row(i).dot(t.col(1)) / scale;
      design.row(i) << 0.5 * a * a, a * b, 0.5 * b * b, a, b;
      for (int al = 0; al < codim; ++al)
        rhs(i, al) = y.row(i).dot(nu.col(al)) / scale;
    }

    out.second_fund[v].resize(codim);
    Vec h_frame = Vec::Zero(std::max(codim, 1));
    if (codim > 0) {
      const Mat sol = design.colPivHouseholderQr().solve(rhs);
      for (int al = 0; al < codim; ++al) {
        Eigen::Matrix2d A;
        A << sol(0, al), sol(1, al), sol(1, al), sol(2, al);
        A /= scale;  // undo the column scaling
        out.second_fund[v][al] = A;
        h_frame[al] = 0.5 * A.trace();  // averaged mean curvature
      }
    }

    // Realize frames and H as ambient vectors.
    out.tangent_frames[v] = ambient_frame * t;
    out.normal_frames[v] = ambient_frame * nu;
    Vec H = Vec::Zero(amb.coord_size());
    for (int al = 0; al < codim; ++al)
      H += h_frame[al] * out.normal_frames[v].col(al);
    out.mean_curvature[v] = H;
    out.mean_curvature_sq[v] =
        codim > 0 ? h_frame.head(codim).squaredNorm() : 0.0;
  }
  return out;
}

std::vector<Vec> generalized_mean_curvature(const ImmersedMesh& mesh,
                                            const CurvatureData& curv,
                                            const TensorField& tensor) {
  if (tensor.size() != mesh.vertex_count()) {
    throw Error("frame mismatch: tensor field size does not match mesh");
  }
  const int nv = mesh.vertex_count();
  std::vector<Vec> out(nv);
  for (int v = 0; v < nv; ++v) {
    Eigen::Matrix2d tv = tensor.entries[v];
    const bool same_frame =
        tensor.frames[v].rows() == curv.tangent_frames[v].rows() &&
        tensor.frames[v] == curv.tangent_frames[v];
    if (!same_frame) {
      const Eigen::Matrix2d r =
          frame_change(mesh.ambient, tensor.frames[v], curv.tangent_frames[v]);
      tv = r * tv * r.transpose();
    }
    Vec h = Vec::Zero(mesh.ambient.coord_size());
    for (size_t al = 0; al < curv.second_fund[v].size(); ++al) {
      const double c = (curv.second_fund[v][al] * tv).trace();
      h += c * curv.normal_frames[v].col(static_cast<int>(al));
    }
    out[v] = h;
  }
  return out;
}

Vec generalized_mean_curvature_sq(const ImmersedMesh& mesh,
                                  const CurvatureData& curv,
                                  const TensorField& tensor) {
  const auto ht = generalized_mean_curvature(mesh, curv, tensor);
  Vec out(mesh.vertex_count());
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    double s = 0.0;
    for (int al = 0; al < curv.normal_frames[v].cols(); ++al) {
      const double c = mesh.ambient.inner(ht[v], curv.normal_frames[v].col(al));
      s += c * c;
    }
    out[v] = s;
  }
  return out;
}

TensorField identity_tensor(const CurvatureData& curv, double scale) {
  TensorField t;
  t.frames = curv.tangent_frames;
  t.entries.assign(curv.tangent_frames.size(),
                   scale * Eigen::Matrix2d::Identity());
  return t;
}

TensorField newton_tensor(const ImmersedMesh& mesh,
                          const CurvatureData& curv) {
  if (curv.codim() != 1) {
    throw Error("newton tensor requires a codimension-1 surface");
  }
  const int nv = mesh.vertex_count();
  TensorField t;
  t.frames = curv.tangent_frames;
  t.entries.resize(nv);
  for (int v = 0; v < nv; ++v) {
    // Shape operator oriented along the mean curvature direction; the sign
    // convention of the fitted normal drops out.
    const double hn = mesh.ambient.inner(curv.mean_curvature[v],
                                         curv.normal_frames[v].col(0));
    const double sgn = hn >= 0.0 ? 1.0 : -1.0;
    const Eigen::Matrix2d s = sgn * curv.second_fund[v][0];
    t.entries[v] = s.trace() * Eigen::Matrix2d::Identity() - s;
  }
  if (t.min_eigenvalue() <= 0.0) {
    throw Error("non-convex surface: newton tensor is not positive definite");
  }
  return t;
}

double divergence_residual(const ImmersedMesh& mesh,
                           const IntrinsicMetric& metric,
                           const TensorField& tensor) {
  const auto tf = face_tensors(mesh, metric, tensor);
  const int nv = mesh.vertex_count();
  std::vector<Eigen::Vector2d> r(nv, Eigen::Vector2d::Zero());
  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto& fc = mesh.faces[f];
    const FaceGeometry& fg = metric.face[f];
    for (int c = 0; c < 3; ++c) {
      const Eigen::Matrix2d rot =
          corner_frame_alignment(mesh, metric, f, c, tensor.frames[fc[c]]);
      r[fc[c]] += fg.area * (rot.transpose() * (tf[f] * fg.grad.col(c)));
    }
  }
  double acc = 0.0;
  for (int v = 0; v < nv; ++v)
    acc += r[v].squaredNorm() / metric.vertex_area[v];
  return std::sqrt(acc);
}

TensorReport check_tensor(const ImmersedMesh& mesh,
                          const IntrinsicMetric& metric,
                          const TensorField& tensor, const Vec& q0,
                          const TensorCheckOptions& opts) {
  TensorReport rep;
  const int nv = mesh.vertex_count();
  const Vec tr = tensor.trace_field();
  const double mean_tr = tr.mean();

  rep.spd_margin = std::numeric_limits<double>::infinity();
  double cond_a_margin = std::numeric_limits<double>::infinity();
  double lam_rel = 0.0;
  for (int v = 0; v < nv; ++v) {
    const auto eigs = eig_range_2x2(tensor.entries[v]);
    rep.spd_margin = std::min(rep.spd_margin, eigs[0]);
    const Eigen::Matrix2d cond =
        tr[v] * Eigen::Matrix2d::Identity() - 2.0 * tensor.entries[v];
    cond_a_margin = std::min(cond_a_margin, eig_range_2x2(cond)[0]);
    lam_rel = std::max(lam_rel, eigs[1] / (0.5 * tr[v]));
  }
  rep.spd_margin_rel = rep.spd_margin / mean_tr;
  rep.cond_a_margin_rel = cond_a_margin / mean_tr;
  rep.cond_a = rep.cond_a_margin_rel >= -opts.cond_a_tol;
  rep.lambda_max_rel = lam_rel;

  rep.div_l2 = divergence_residual(mesh, metric, tensor);
  double tr_l2 = 0.0;
  for (int v = 0; v < nv; ++v) tr_l2 += tr[v] * tr[v] * metric.vertex_area[v];
  rep.div_rel = rep.div_l2 / std::sqrt(tr_l2);
  rep.div_tol = opts.div_coeff * metric.mean_edge;
  rep.divergence_free = rep.div_rel <= rep.div_tol;

  rep.enclosing_radius = enclosing_radius(mesh, q0);
  rep.ball_threshold = small_ball_threshold(mesh.ambient.delta());
  rep.cond_b_margin = rep.ball_threshold - rep.enclosing_radius;
  rep.cond_b = rep.cond_b_margin >= 0.0;

  rep.cd2_max = 0.0;
  for (const auto& v : mesh.vertices) {
    const double cd =
        delta_trig(mesh.ambient.distance(q0, v), mesh.ambient.delta()).cd;
    rep.cd2_max = std::max(rep.cd2_max, cd * cd);
  }
  return rep;
}

std::vector<Vec> boundary_curvature(const ImmersedMesh& mesh) {
  if (mesh.ambient.delta().hyperbolic()) {
    throw Error("boundary curvature implemented for the flat ambient only");
  }
  const int cs = mesh.ambient.coord_size();
  std::vector<Vec> out(mesh.vertex_count(), Vec::Zero(cs));
  for (const auto& loop : mesh.boundary_loops) {
    const int n = static_cast<int>(loop.size());
    if (n < 5) throw Error("underdetermined fit: boundary loop too short");
    for (int i = 0; i < n; ++i) {
      // Five consecutive samples, chordal arclength parameter.
      Mat pts(5, cs);
      for (int s = -2; s <= 2; ++s)
        pts.row(s + 2) = mesh.vertices[loop[((i + s) % n + n) % n]];
      Vec tpar(5);
      tpar[2] = 0.0;
      for (int s = 2; s < 4; ++s)
        tpar[s + 1] = tpar[s] + (pts.row(s + 1) - pts.row(s)).norm();
      for (int s = 2; s > 0; --s)
        tpar[s - 1] = tpar[s] - (pts.row(s) - pts.row(s - 1)).norm();
      Mat design(5, 3);
      for (int s = 0; s < 5; ++s)
        design.row(s) << 1.0, tpar[s], 0.5 * tpar[s] * tpar[s];
      const Mat sol = design.colPivHouseholderQr().solve(pts);
      const Vec d1 = sol.row(1);
      const Vec d2 = sol.row(2);
      const double v2 = d1.squaredNorm();
      out[loop[i]] = (d2 - (d2.dot(d1) / v2) * d1) / v2;
    }
  }
  return out;
}

}  // namespace reilly
