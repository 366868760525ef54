#include "reilly/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <random>

namespace reilly {

namespace {

double spectral_scale(const AssembledOperators& ops) {
  double kd = 0.0, md = 0.0;
  for (int i = 0; i < ops.stiffness.rows(); ++i) {
    kd += ops.stiffness.coeff(i, i);
    md += ops.mass.coeff(i, i);
  }
  return kd / md;
}

}  // namespace

SpectralResult lambda1_linear(const AssembledOperators& ops,
                              const EigOptions& opts) {
  const int n = static_cast<int>(ops.stiffness.rows());
  const int b = std::min(opts.block, n - 2);
  const SparseMat& K = ops.stiffness;
  const SparseMat& M = ops.mass;

  const Vec m1 = M * Vec::Ones(n);
  const double mass = m1.sum();
  const double scale = spectral_scale(ops);

  // Bordered system deflates the constant kernel without a shift: solving
  // [K, M1; (M1)^T, 0] keeps iterates M-orthogonal to constants.
  SparseMat bordered(n + 1, n + 1);
  {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(K.nonZeros() + 2 * n);
    for (int i = 0; i < K.outerSize(); ++i)
      for (SparseMat::InnerIterator it(K, i); it; ++it)
        t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                       it.value());
    for (int i = 0; i < n; ++i) {
      t.emplace_back(i, n, m1[i]);
      t.emplace_back(n, i, m1[i]);
    }
    bordered.setFromTriplets(t.begin(), t.end());
  }
  Eigen::SparseLU<SparseMat> lu(bordered);
  if (lu.info() != Eigen::Success) {
    throw Error(
        "eigen solve failed: singular deflated stiffness (disconnected mesh?)");
  }

  auto project = [&](Vec& x) { x -= (m1.dot(x) / mass) * Vec::Ones(n); };

  std::mt19937 rng(12345);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat X(n, b);
  for (int j = 0; j < b; ++j) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = gauss(rng);
    project(x);
    X.col(j) = x;
  }

  auto m_orthonormalize = [&](Mat& Y) {
    for (int j = 0; j < Y.cols(); ++j) {
      Vec y = Y.col(j);
      for (int k = 0; k < j; ++k) y -= (Y.col(k).dot(M * y)) * Y.col(k);
      const double nn = std::sqrt(std::max(1e-300, y.dot(M * y)));
      Y.col(j) = y / nn;
    }
  };
  m_orthonormalize(X);

  double lambda = 0.0, lambda_prev = -1.0;
  double res = 1.0;
  int iter = 0;
  Vec rhs(n + 1), sol(n + 1);
  for (; iter < opts.max_iter; ++iter) {
    Mat Y(n, b);
    for (int j = 0; j < b; ++j) {
      rhs.head(n) = M * X.col(j);
      rhs[n] = 0.0;
      sol = lu.solve(rhs);
      Vec y = sol.head(n);
      project(y);
      Y.col(j) = y;
    }
    m_orthonormalize(Y);
    const Mat a = Y.transpose() * (K * Y).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.transpose()));
    X = Y * es.eigenvectors();
    lambda = es.eigenvalues()[0];

    const Vec u = X.col(0);
    const Vec r = K * u - lambda * (M * u);
    res = r.norm() / std::max(1e-300, lambda * (M * u).norm());
    if (res <= opts.tol &&
        std::abs(lambda - lambda_prev) <= 1e-13 * std::abs(lambda)) {
      ++iter;
      break;
    }
    lambda_prev = lambda;
  }

  if (lambda <= 1e-10 * scale) {
    throw Error(
        "eigen solve failed: zero eigenvalue multiplicity above one "
        "(disconnected mesh)");
  }

  SpectralResult out;
  out.eigenvalue = lambda;
  out.eigenfunction = X.col(0);
  project(out.eigenfunction);
  out.residual = res;
  out.certificate = "linear-solve";
  out.iterations = iter;
  out.converged = res <= opts.tol;
  if (!out.converged) {
    out.note = "no convergence after max iterations; residual reported";
  }
  return out;
}

// ---------------------------------------------------------------------------
// p-Laplacian quotient machinery.

namespace {

struct PContext {
  const ImmersedMesh& mesh;
  const IntrinsicMetric& metric;
  Vec area;  // lumped vertex measure, unweighted
  double p;
};

double sign_pow(double x, double e) {
  return x >= 0.0 ? std::pow(x, e) : -std::pow(-x, e);
}

// Root of g(c) = sum a |u-c|^{p-2}(u-c): strictly decreasing in c.
// Safeguarded Newton inside the bracket [min u, max u].
double recenter(const PContext& ctx, const Vec& u, double c0) {
  const double p = ctx.p;
  double lo = u.minCoeff(), hi = u.maxCoeff();
  if (lo == hi) return lo;
  double c = std::clamp(c0, lo, hi);
  for (int it = 0; it < 200; ++it) {
    double g = 0.0, gp = 0.0, mag = 0.0;
    for (int v = 0; v < u.size(); ++v) {
      const double d = u[v] - c;
      const double ad = std::abs(d);
      const double w = ctx.area[v] * std::pow(ad, p - 2.0);
      g += w * d;
      mag += w * ad;
      gp += w;
    }
    if (std::abs(g) <= 1e-12 * std::max(1e-300, mag)) return c;
    if (g > 0.0) lo = c;
    else hi = c;
    double next = c + g / ((p - 1.0) * gp);  // g' = -(p-1) gp
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    c = next;
  }
  return c;
}

struct PEval {
  double quotient;
  double numerator;
  double denominator;
  double shift;
  Vec centered;
};

PEval evaluate(const PContext& ctx, const Vec& w, double warm_shift) {
  PEval e;
  e.shift = recenter(ctx, w, warm_shift);
  e.centered = w.array() - e.shift;
  const double p = ctx.p;
  double num = 0.0;
  for (int f = 0; f < ctx.mesh.face_count(); ++f) {
    const Eigen::Vector2d g =
        face_gradient(ctx.metric, f, ctx.mesh.faces[f], e.centered);
    num += ctx.metric.face[f].area * std::pow(g.squaredNorm(), 0.5 * p);
  }
  double den = 0.0;
  for (int v = 0; v < w.size(); ++v)
    den += ctx.area[v] * std::pow(std::abs(e.centered[v]), p);
  e.numerator = num;
  e.denominator = den;
  e.quotient = num / den;
  return e;
}

Vec gradient(const PContext& ctx, const PEval& e) {
  const double p = ctx.p;
  const Vec& u = e.centered;
  Vec gn = Vec::Zero(u.size());
  for (int f = 0; f < ctx.mesh.face_count(); ++f) {
    const auto& fc = ctx.mesh.faces[f];
    const FaceGeometry& fg = ctx.metric.face[f];
    const Eigen::Vector2d g = face_gradient(ctx.metric, f, fc, u);
    const double g2 = g.squaredNorm();
    if (g2 <= 1e-300) continue;  // |grad|^{p-2} grad -> 0 for p > 1
    const double w = fg.area * p * std::pow(g2, 0.5 * p - 1.0);
    for (int c = 0; c < 3; ++c) gn[fc[c]] += w * fg.grad.col(c).dot(g);
  }
  Vec gd(u.size());
  for (int v = 0; v < u.size(); ++v)
    gd[v] = ctx.area[v] * p * sign_pow(u[v], p - 1.0);
  return (gn - e.quotient * gd) / e.denominator;
}

}  // namespace

double recenter_shift(const ImmersedMesh& mesh, const IntrinsicMetric& metric,
                      double p, const Vec& field) {
  PContext ctx{mesh, metric, metric.vertex_area, p};
  return recenter(ctx, field, field.mean());
}

double p_quotient(const ImmersedMesh& mesh, const IntrinsicMetric& metric,
                  double p, const Vec& field) {
  PContext ctx{mesh, metric, metric.vertex_area, p};
  return evaluate(ctx, field, field.mean()).quotient;
}

Vec p_quotient_gradient(const ImmersedMesh& mesh, const IntrinsicMetric& metric,
                        double p, const Vec& field) {
  PContext ctx{mesh, metric, metric.vertex_area, p};
  return gradient(ctx, evaluate(ctx, field, field.mean()));
}

namespace {

struct DescentOutcome {
  PEval eval;
  Vec grad;
  int iterations{};
  bool converged{};
  bool stalled{};
};

// Projected descent with a Barzilai-Borwein trial step and monotone
// backtracking. Stops when the quotient has improved by less than
// tol * R over a trailing window (robust to BB oscillation).
DescentOutcome descend(const PContext& ctx, Vec w, double tol, int max_iter) {
  const double p = ctx.p;
  PEval e = evaluate(ctx, w, w.mean());
  w = e.centered / std::pow(e.denominator, 1.0 / p);
  e = evaluate(ctx, w, 0.0);
  Vec g = gradient(ctx, e);
  double step =
      0.05 * std::sqrt(w.squaredNorm() / std::max(1e-300, g.squaredNorm()));
  Vec w_prev = w, g_prev = g;

  constexpr int window = 30;
  double window_ref = e.quotient;
  DescentOutcome out;
  int it = 0;
  for (; it < max_iter; ++it) {
    double t = step;
    PEval trial;
    bool accepted = false;
    const double g2 = g.squaredNorm();
    for (int ls = 0; ls < 40; ++ls) {
      const Vec cand = w - t * g;
      trial = evaluate(ctx, cand, e.shift);
      if (trial.quotient <= e.quotient - 1e-4 * t * g2) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      out.stalled = true;
      out.converged = true;  // no descent direction left at this resolution
      break;
    }
    Vec w_new = trial.centered / std::pow(trial.denominator, 1.0 / p);
    PEval e_new = evaluate(ctx, w_new, 0.0);
    Vec g_new = gradient(ctx, e_new);

    const Vec dw = w_new - w_prev;
    const Vec dg = g_new - g_prev;
    const double dwdg = dw.dot(dg);
    step = dwdg > 1e-300 ? dw.squaredNorm() / dwdg : 2.0 * t;

    w_prev = w;
    g_prev = g;
    w = w_new;
    e = e_new;
    g = g_new;

    if ((it + 1) % window == 0) {
      if (window_ref - e.quotient < tol * e.quotient) {
        ++it;
        out.converged = true;
        break;
      }
      window_ref = e.quotient;
    }
  }
  out.eval = e;
  out.grad = g;
  out.iterations = it;
  return out;
}

}  // namespace

SpectralResult lambda1_p(const ImmersedMesh& mesh, const IntrinsicMetric& metric,
                         double p, const PLaplaceOptions& opts,
                         const Vec* warm_start) {
  if (!(p > 1.0)) throw Error("invalid parameter: p must exceed 1");
  if (p < opts.p_min || p > opts.p_max) {
    throw Error("invalid parameter: p outside the supported range [" +
                std::to_string(opts.p_min) + ", " + std::to_string(opts.p_max) +
                "]; the quotient is numerically ill-conditioned there");
  }
  if (!mesh.closed()) {
    throw Error("invalid mesh: the closed-surface quotient needs an empty boundary");
  }

  PContext ctx{mesh, metric, metric.vertex_area, p};
  const int n = mesh.vertex_count();

  SpectralResult best;
  best.eigenvalue = std::numeric_limits<double>::infinity();
  best.certificate = "certified-upper-bound";
  best.seed = opts.seed;
  int total_iter = 0;

  // Exploration pass over all starts, then a full-tolerance polish of the
  // winner. Every iterate is feasible, so exploration accuracy only affects
  // which basin gets polished, never the upper-bound property.
  const double tol_explore = std::max(opts.tol, 1e-7);
  const int iter_explore = std::min(opts.max_iter, 600);

  Vec best_start;
  const int starts = 1 + std::max(0, opts.restarts);
  for (int s = 0; s < starts; ++s) {
    Vec w;
    if (s == 0) {
      if (warm_start && warm_start->size() == n) {
        w = *warm_start;
      } else {
        w = Vec::LinSpaced(n, -1.0, 1.0);  // arbitrary but fixed fallback
      }
    } else {
      std::mt19937 rng(static_cast<unsigned>(
          opts.seed + 977 * static_cast<std::uint64_t>(s) + 1));
      std::normal_distribution<double> gauss(0.0, 1.0);
      w = Vec(n);
      for (int i = 0; i < n; ++i) w[i] = gauss(rng);
    }
    const DescentOutcome o = descend(ctx, w, tol_explore, iter_explore);
    total_iter += o.iterations;
    if (o.eval.quotient < best.eigenvalue) {
      best.eigenvalue = o.eval.quotient;
      best_start = o.eval.centered;
    }
    best.restarts_used = s;
  }

  const DescentOutcome fin =
      descend(ctx, best_start, opts.tol, opts.max_iter - std::min(total_iter, opts.max_iter - 100));
  total_iter += fin.iterations;

  best.eigenvalue = fin.eval.quotient;
  best.eigenfunction = fin.eval.centered;
  best.converged = fin.converged;
  best.residual = fin.grad.norm() * std::sqrt(static_cast<double>(n)) /
                  std::max(1e-300, fin.eval.quotient);
  best.iterations = total_iter;
  if (fin.stalled) best.note = "line search stalled; last iterate reported";
  else if (!fin.converged) best.note = "iteration budget exhausted";
  return best;
}

// ---------------------------------------------------------------------------
// Boundary problems.

DtNOperator dirichlet_to_neumann(const AssembledOperators& ops) {
  const int n = static_cast<int>(ops.stiffness.rows());
  const std::vector<int>& bverts = ops.boundary_vertices;
  const int nb = static_cast<int>(bverts.size());
  if (nb == 0) throw Error("invalid mesh: boundary problem on a closed mesh");

  std::vector<int> where(n, -1);
  for (int j = 0; j < nb; ++j) where[bverts[j]] = j;
  std::vector<int> interior;
  interior.reserve(n - nb);
  for (int v = 0; v < n; ++v)
    if (where[v] < 0) interior.push_back(v);
  const int ni = static_cast<int>(interior.size());
  std::vector<int> iwhere(n, -1);
  for (int j = 0; j < ni; ++j) iwhere[interior[j]] = j;

  std::vector<Eigen::Triplet<double>> tii;
  Mat kib = Mat::Zero(ni, nb);
  Mat kbb = Mat::Zero(nb, nb);
  for (int col = 0; col < ops.stiffness.outerSize(); ++col) {
    for (SparseMat::InnerIterator it(ops.stiffness, col); it; ++it) {
      const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      if (iwhere[r] >= 0 && iwhere[c] >= 0)
        tii.emplace_back(iwhere[r], iwhere[c], it.value());
      else if (iwhere[r] >= 0 && where[c] >= 0)
        kib(iwhere[r], where[c]) += it.value();
      else if (where[r] >= 0 && where[c] >= 0)
        kbb(where[r], where[c]) += it.value();
    }
  }
  SparseMat kii(ni, ni);
  kii.setFromTriplets(tii.begin(), tii.end());
  Eigen::SimplicialLDLT<SparseMat> ldlt(kii);
  if (ldlt.info() != Eigen::Success) {
    throw Error("eigen solve failed: singular interior block");
  }

  DtNOperator dtn;
  dtn.boundary = bverts;
  dtn.matrix = kbb;
  for (int j = 0; j < nb; ++j) {
    const Vec x = ldlt.solve(kib.col(j));
    dtn.matrix.col(j) -= kib.transpose() * x;
  }
  dtn.asymmetry = (dtn.matrix - dtn.matrix.transpose()).cwiseAbs().maxCoeff();
  dtn.matrix = 0.5 * (dtn.matrix + dtn.matrix.transpose()).eval();
  return dtn;
}

namespace {

SpectralResult boundary_eigen(const AssembledOperators& ops, const Mat& a,
                              const DtNOperator& dtn, const std::string& note) {
  const int nb = static_cast<int>(dtn.boundary.size());
  Mat mb = Mat::Zero(nb, nb);
  for (int j = 0; j < nb; ++j) mb(j, j) = ops.boundary_mass[dtn.boundary[j]];

  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(a, mb);
  if (es.info() != Eigen::Success) {
    throw Error("eigen solve failed: boundary pencil");
  }
  const Vec evals = es.eigenvalues();
  const double top = std::abs(evals[nb - 1]);
  if (std::abs(evals[0]) > 1e-8 * top) {
    throw Error("eigen solve failed: boundary kernel missing (constants)");
  }
  if (nb > 1 && std::abs(evals[1]) <= 1e-10 * top) {
    throw Error("eigen solve failed: repeated zero boundary eigenvalue");
  }

  SpectralResult out;
  out.eigenvalue = evals[1];
  Vec ub = es.eigenvectors().col(1);

  // Enforce the zero weighted-boundary-mean constraint exactly.
  double mass = 0.0, mean = 0.0;
  for (int j = 0; j < nb; ++j) {
    mass += mb(j, j);
    mean += mb(j, j) * ub[j];
  }
  ub.array() -= mean / mass;

  const Vec r = a * ub - evals[1] * (mb * ub);
  out.residual = r.norm() / std::max(1e-300, evals[1] * (mb * ub).norm());
  out.certificate = "linear-solve";
  out.iterations = 1;
  out.note = note;

  out.eigenfunction = Vec::Zero(ops.stiffness.rows());
  for (int j = 0; j < nb; ++j) out.eigenfunction[dtn.boundary[j]] = ub[j];
  return out;
}

}  // namespace

SpectralResult steklov_sigma1(const AssembledOperators& ops, const EigOptions&) {
  const DtNOperator dtn = dirichlet_to_neumann(ops);
  return boundary_eigen(ops, dtn.matrix, dtn,
                        "dirichlet-to-neumann schur complement");
}

SpectralResult wentzell_alpha1(const AssembledOperators& ops, double b,
                               const EigOptions&) {
  if (!(b > 0.0))
    throw Error("invalid parameter: wentzell weight must be positive");
  const DtNOperator dtn = dirichlet_to_neumann(ops);
  const int nb = static_cast<int>(dtn.boundary.size());
  Mat a = dtn.matrix;
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j)
      a(i, j) +=
          b * ops.boundary_stiffness.coeff(dtn.boundary[i], dtn.boundary[j]);
  return boundary_eigen(
      ops, a, dtn, "positive-spectrum convention; boundary-measure denominator");
}

}  // namespace reilly
