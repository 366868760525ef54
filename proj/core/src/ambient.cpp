#include "reilly/ambient.hpp"

#include <cmath>

namespace reilly {

namespace {

// sinh(x)/x, stable at x = 0.
double sinhc(double x) {
  if (std::abs(x) < 1e-5) {
    const double x2 = x * x;
    return 1.0 + x2 / 6.0 * (1.0 + x2 / 20.0);
  }
  return std::sinh(x) / x;
}

}  // namespace

DeltaTrig delta_trig(double y, Delta delta) {
  if (!delta.hyperbolic()) {
    return {y, 1.0, y};
  }
  const double k = delta.kappa();
  DeltaTrig t;
  t.sd = y * sinhc(k * y);
  t.cd = std::cosh(k * y);
  t.th = std::tanh(k * y) / k;
  return t;
}

double arsinh_delta(double s, Delta delta) {
  if (!delta.hyperbolic()) {
    throw Error("invalid curvature: arsinh_delta requires delta < 0");
  }
  const double k = delta.kappa();
  return std::asinh(k * s) / k;
}

Vec Isometry::apply_point(const Vec& p) const {
  Vec q = linear * p;
  if (translation.size() > 0) q += translation;
  return q;
}

Ambient::Ambient(Delta delta, int dim) : delta_(delta), dim_(dim) {
  if (delta.value > 0.0) {
    throw Error("invalid curvature: only delta <= 0 is supported");
  }
  if (dim < 2) {
    throw Error("invalid curvature: ambient dimension must be >= 2");
  }
}

double Ambient::inner(const Vec& a, const Vec& b) const {
  if (!delta_.hyperbolic()) return a.dot(b);
  double s = -a[0] * b[0];
  for (int i = 1; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double Ambient::norm(const Vec& v) const {
  return std::sqrt(std::max(0.0, inner(v, v)));
}

Vec Ambient::base_point() const {
  Vec p = Vec::Zero(coord_size());
  if (delta_.hyperbolic()) p[0] = 1.0 / delta_.kappa();
  return p;
}

bool Ambient::is_valid_point(const Vec& p, double rel_tol) const {
  if (p.size() != coord_size()) return false;
  if (!p.allFinite()) return false;
  if (!delta_.hyperbolic()) return true;
  const double target = 1.0 / delta_.value;
  return p[0] > 0.0 && std::abs(inner(p, p) - target) <= rel_tol * std::abs(target);
}

void Ambient::require_point(const Vec& p) const {
  if (!is_valid_point(p)) {
    throw Error("invalid point: coordinates violate the ambient model constraint");
  }
}

double Ambient::distance(const Vec& p, const Vec& q) const {
  if (!delta_.hyperbolic()) return (p - q).norm();
  const Vec u = p - q;
  const double s2 = std::max(0.0, inner(u, u));
  const double k = delta_.kappa();
  return 2.0 / k * std::asinh(0.5 * k * std::sqrt(s2));
}

Vec Ambient::exp(const Vec& p, const Vec& v) const {
  if (!delta_.hyperbolic()) return p + v;
  const double t = norm(v);
  if (t == 0.0) return p;
  const double k = delta_.kappa();
  Vec q = std::cosh(k * t) * p + sinhc(k * t) * v;
  // Renormalize onto the model hypersurface to keep long chains exact.
  const double qq = inner(q, q);
  q *= std::sqrt((1.0 / delta_.value) / qq);
  return q;
}

Vec Ambient::log(const Vec& p, const Vec& q) const {
  if (!delta_.hyperbolic()) return q - p;
  const Vec w = q - p;
  const double s2 = std::max(0.0, inner(w, w));
  const double k = delta_.kappa();
  const double d = 2.0 / k * std::asinh(0.5 * k * std::sqrt(s2));
  // cosh(kappa*d) - 1 from the chordal norm, cancellation-free for nearby
  // points (the stability branch the small-distance regime needs).
  const double cm1 = 0.5 * k * k * s2;
  Vec u = w - cm1 * p;
  const double un = norm(u);
  if (un < 1e-300 || d == 0.0) return Vec::Zero(coord_size());
  return (d / un) * u;
}

Vec Ambient::tangent_project(const Vec& p, const Vec& w) const {
  if (!delta_.hyperbolic()) return w;
  return w - delta_.value * inner(w, p) * p;
}

Mat Ambient::canonical_frame(const Vec& p) const {
  const int cs = coord_size();
  Mat frame(cs, dim_);
  int found = 0;
  for (int axis = 0; axis < cs && found < dim_; ++axis) {
    Vec e = Vec::Zero(cs);
    e[axis] = 1.0;
    Vec v = tangent_project(p, e);
    for (int j = 0; j < found; ++j) v -= inner(v, frame.col(j)) * frame.col(j);
    const double n = norm(v);
    if (n < 0.25) continue;  // axis nearly parallel to the span so far
    frame.col(found++) = v / n;
  }
  if (found < dim_) {
    throw Error("frame construction failed: degenerate projection");
  }
  return frame;
}

void Ambient::require_frame(const Vec& p, const Mat& frame, double tol) const {
  if (frame.rows() != coord_size() || frame.cols() != dim_) {
    throw Error("frame not orthonormal: wrong shape");
  }
  for (int i = 0; i < dim_; ++i) {
    if (delta_.hyperbolic() &&
        std::abs(inner(frame.col(i), p)) > tol * std::abs(1.0 / delta_.value)) {
      throw Error("frame not orthonormal: column not tangent at base point");
    }
    for (int j = i; j < dim_; ++j) {
      const double g = inner(frame.col(i), frame.col(j));
      const double want = (i == j) ? 1.0 : 0.0;
      if (std::abs(g - want) > tol) {
        throw Error("frame not orthonormal: Gram matrix deviates from identity");
      }
    }
  }
}

Vec Ambient::normal_coords(const Vec& q0, const Vec& q, const Mat& frame) const {
  require_frame(q0, frame);
  const Vec v = log(q0, q);
  Vec x(dim_);
  for (int i = 0; i < dim_; ++i) x[i] = inner(v, frame.col(i));
  return x;
}

Isometry Ambient::random_isometry(std::mt19937& rng) const {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int cs = coord_size();
  auto random_rotation = [&](int n) {
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
    Eigen::HouseholderQR<Mat> qr(a);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i)
      if (r(i, i) < 0) q.col(i) *= -1.0;
    return q;
  };

  Isometry iso;
  if (!delta_.hyperbolic()) {
    iso.linear = random_rotation(cs);
    iso.translation = Vec(cs);
    for (int i = 0; i < cs; ++i) iso.translation[i] = 0.5 * gauss(rng);
    return iso;
  }

  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const double phi = uni(rng);
  Mat boost = Mat::Identity(cs, cs);
  boost(0, 0) = std::cosh(phi);
  boost(0, 1) = boost(1, 0) = std::sinh(phi);
  boost(1, 1) = std::cosh(phi);

  Mat rot1 = Mat::Identity(cs, cs);
  rot1.block(1, 1, dim_, dim_) = random_rotation(dim_);
  Mat rot2 = Mat::Identity(cs, cs);
  rot2.block(1, 1, dim_, dim_) = random_rotation(dim_);

  iso.linear = rot1 * boost * rot2;
  iso.translation = Vec();
  return iso;
}

Vec scale_model_point(const Vec& p, double c) { return p / c; }

}  // namespace reilly
