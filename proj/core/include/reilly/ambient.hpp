#pragma once

#include <Eigen/Dense>

#include <random>
#include <stdexcept>
#include <string>

namespace reilly {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Error type for all geometry/mesh/solver failures. Messages start with a
/// stable tag ("invalid point:", "degenerate face:", ...) that tests and the
/// CLI key on.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Upper curvature bound of the ambient space. Only delta <= 0 is supported:
/// delta < 0 selects the hyperboloid model, delta = 0 Euclidean space.
struct Delta {
  double value{-1.0};

  bool hyperbolic() const { return value < 0.0; }
  double kappa() const { return std::sqrt(-value); }
};

struct DeltaTrig {
  double sd{};  // generalized sine: sinh(kappa*y)/kappa, or y at delta=0
  double cd{};  // its derivative: cosh(kappa*y), or 1
  double th{};  // sd/cd
};

/// Evaluates the curvature-adapted trig triple at geodesic radius y.
/// Satisfies cd^2 + delta*sd^2 = 1 and 1/cd^2 = 1 + delta*th^2.
DeltaTrig delta_trig(double y, Delta delta);

/// Inverse of the generalized sine: sd(arsinh_delta(s)) = s. Requires
/// delta < 0 (at delta = 0 the inverse is the identity, handled by callers).
double arsinh_delta(double s, Delta delta);

/// Orientation-preserving or -reversing ambient isometry: a Lorentz
/// transform for delta < 0 (translation unused), rigid motion for delta = 0.
struct Isometry {
  Mat linear;
  Vec translation;

  Vec apply_point(const Vec& p) const;
  Vec apply_vector(const Vec& v) const { return linear * v; }
};

/// Constant-curvature ambient N of dimension n: the hyperboloid
/// { <x,x> = 1/delta, x0 > 0 } in Minkowski R^{n+1} for delta < 0, or
/// Euclidean R^n for delta = 0. Points and tangent vectors are plain
/// coordinate vectors of size coord_size(); validity is checked on demand.
class Ambient {
 public:
  Ambient(Delta delta, int dim);

  Delta delta() const { return delta_; }
  int dim() const { return dim_; }
  int coord_size() const { return delta_.hyperbolic() ? dim_ + 1 : dim_; }

  /// Minkowski inner product (signature -,+,...,+) for delta < 0,
  /// Euclidean dot product for delta = 0.
  double inner(const Vec& a, const Vec& b) const;
  double norm(const Vec& v) const;

  Vec base_point() const;
  bool is_valid_point(const Vec& p, double rel_tol = 1e-9) const;
  void require_point(const Vec& p) const;

  /// Geodesic distance. Evaluated through the chordal Minkowski norm of
  /// p - q, which is cancellation-free for nearby points.
  double distance(const Vec& p, const Vec& q) const;

  Vec exp(const Vec& p, const Vec& v) const;
  Vec log(const Vec& p, const Vec& q) const;

  /// Orthogonal projection of an arbitrary coordinate vector onto the
  /// tangent space at p.
  Vec tangent_project(const Vec& p, const Vec& w) const;

  /// Deterministic orthonormal tangent frame at p (columns), built by
  /// Gram-Schmidt over the projected coordinate axes.
  Mat canonical_frame(const Vec& p) const;

  /// Coordinates of log_q0(q) in the given orthonormal frame at q0.
  /// The Euclidean norm of the result equals distance(q0, q).
  Vec normal_coords(const Vec& q0, const Vec& q, const Mat& frame) const;

  void require_frame(const Vec& p, const Mat& frame, double tol = 1e-8) const;

  /// Random isometry fixing the model (Lorentz boost+rotation, or rigid
  /// motion with |translation| <= 1). Used by property tests and audits.
  Isometry random_isometry(std::mt19937& rng) const;

 private:
  Delta delta_;
  int dim_;
};

/// Model map between curvatures: coordinates x on H(delta) map to x/c on
/// H(c^2 delta), scaling all geodesic distances by 1/c. Tangent vectors at
/// the mapped point keep their coordinates (the Minkowski form is shared),
/// so orthonormal frames stay orthonormal.
Vec scale_model_point(const Vec& p, double c);

}  // namespace reilly
