#include "curvot/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace curvot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

double max_abs(const Vec& x) { return x.size() ? x.cwiseAbs().maxCoeff() : 0.0; }

double christoffel_step(const Vec& x) { return 1e-5 * std::max(1.0, max_abs(x)); }
double curvature_step(const Vec& x) { return 1e-4 * std::max(1.0, max_abs(x)); }

ChartDomain unbounded_domain(int n) {
  ChartDomain d;
  d.lo = Vec::Constant(n, -kInf);
  d.hi = Vec::Constant(n, kInf);
  d.periodic.assign(n, false);
  d.period.assign(n, 0.0);
  return d;
}

// Spherical chart: first n-1 coordinates are polar angles in (0,pi), the
// last is azimuthal, period 2*pi.
ChartDomain sphere_domain(int n) {
  ChartDomain d = unbounded_domain(n);
  for (int i = 0; i + 1 < n; ++i) {
    d.lo[i] = 1e-9;
    d.hi[i] = kPi - 1e-9;
  }
  d.periodic[n - 1] = true;
  d.period[n - 1] = 2 * kPi;
  return d;
}

Vec sphere_embed(int n, double r, const Vec& x) {
  Vec X(n + 1);
  double prod = 1.0;
  for (int k = 0; k < n; ++k) {
    X[k] = r * prod * std::cos(x[k]);
    prod *= std::sin(x[k]);
  }
  X[n] = r * prod;
  return X;
}

// d(embed)/d(theta_m) applied to tangent components v.
Vec sphere_embed_tangent(int n, double r, const Vec& x, const Vec& v) {
  Vec W = Vec::Zero(n + 1);
  // X_k = r (prod_{j<k} sin x_j) cos x_k for k<n, X_n = r prod_j sin x_j
  for (int m = 0; m < n; ++m) {
    if (v[m] == 0.0) continue;
    for (int k = 0; k <= n; ++k) {
      double term = 0.0;
      if (k < n) {
        if (m < k) {
          double prod = 1.0;
          for (int j = 0; j < k; ++j) prod *= (j == m) ? std::cos(x[j]) : std::sin(x[j]);
          term = r * prod * std::cos(x[k]);
        } else if (m == k) {
          double prod = 1.0;
          for (int j = 0; j < k; ++j) prod *= std::sin(x[j]);
          term = -r * prod * std::sin(x[k]);
        }
      } else {
        double prod = 1.0;
        for (int j = 0; j < n; ++j) prod *= (j == m) ? std::cos(x[j]) : std::sin(x[j]);
        term = r * prod;
      }
      W[k] += term * v[m];
    }
  }
  return W;
}

Vec sphere_unembed(int n, double r, const Vec& X) {
  Vec x(n);
  double tail2 = 0.0;
  std::vector<double> tail(n + 1, 0.0);
  for (int k = n; k >= 0; --k) {
    tail[k] = std::sqrt(tail2 + X[k] * X[k]);
    tail2 += X[k] * X[k];
  }
  for (int k = 0; k + 1 < n; ++k) x[k] = std::atan2(tail[k + 1], X[k]);
  double last = std::atan2(X[n], X[n - 1]);
  if (last < 0) last += 2 * kPi;
  x[n - 1] = last;
  (void)r;
  return x;
}

double clamp1(double v) { return std::min(1.0, std::max(-1.0, v)); }

}  // namespace

double TangentVector::norm(const ChartManifold& M) const { return M.norm(base, comp); }

bool FrameBasis::orthonormal(const ChartManifold& M, double tol) const {
  Mat gram = vectors.transpose() * M.metric(base) * vectors;
  return (gram - Mat::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <= tol;
}

bool ChartDomain::contains(const Vec& x) const {
  for (int i = 0; i < x.size(); ++i) {
    if (periodic[i]) continue;
    if (!(x[i] > lo[i] && x[i] < hi[i])) return false;
  }
  if (std::isfinite(max_norm) && x.norm() >= max_norm) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Factories.  The curvature-sign calibration below is asserted once: the
// stored convention must give sectional(+1) on the unit sphere.

namespace {

void run_sign_self_test();

}  // namespace

ChartManifold ChartManifold::euclidean(int n) {
  ChartManifold M;
  M.n_ = n;
  M.tag_ = ModelTag::Euclidean;
  M.const_curv_ = 0.0;
  M.dom_ = unbounded_domain(n);
  run_sign_self_test();
  return M;
}

ChartManifold ChartManifold::sphere(int n, double radius) {
  if (radius <= 0) throw Error("sphere radius must be positive");
  ChartManifold M;
  M.n_ = n;
  M.tag_ = ModelTag::Sphere;
  M.radius_ = radius;
  M.const_curv_ = 1.0 / (radius * radius);
  M.dom_ = sphere_domain(n);
  run_sign_self_test();
  return M;
}

ChartManifold ChartManifold::hyperbolic(int n) {
  ChartManifold M;
  M.n_ = n;
  M.tag_ = ModelTag::Hyperbolic;
  M.const_curv_ = -1.0;
  M.dom_ = unbounded_domain(n);
  M.dom_.max_norm = 1.0 - 1e-12;
  run_sign_self_test();
  return M;
}

ChartManifold ChartManifold::cylinder() {
  ChartManifold M;
  M.n_ = 2;
  M.tag_ = ModelTag::Cylinder;
  M.const_curv_ = 0.0;
  M.dom_ = unbounded_domain(2);
  M.dom_.periodic[1] = true;
  M.dom_.period[1] = 2 * kPi;
  run_sign_self_test();
  return M;
}

ChartManifold ChartManifold::custom(int n, MetricFn g) {
  return custom(n, std::move(g), unbounded_domain(n));
}

ChartManifold ChartManifold::custom(int n, MetricFn g, ChartDomain dom) {
  ChartManifold M;
  M.n_ = n;
  M.tag_ = ModelTag::Custom;
  M.metric_ = std::move(g);
  M.dom_ = std::move(dom);
  run_sign_self_test();
  return M;
}

// ---------------------------------------------------------------------------

Mat ChartManifold::metric(const Vec& x) const {
  switch (tag_) {
    case ModelTag::Euclidean:
    case ModelTag::Cylinder:
      return Mat::Identity(n_, n_);
    case ModelTag::Sphere: {
      Mat g = Mat::Zero(n_, n_);
      double prod = radius_ * radius_;
      for (int i = 0; i < n_; ++i) {
        g(i, i) = prod;
        double s = std::sin(x[i]);
        prod *= s * s;
      }
      return g;
    }
    case ModelTag::Hyperbolic: {
      double lam = 2.0 / (1.0 - x.squaredNorm());
      return (lam * lam) * Mat::Identity(n_, n_);
    }
    case ModelTag::Custom:
      return metric_(x);
  }
  throw Error("unreachable");
}

double ChartManifold::inner(const Vec& x, const Vec& v, const Vec& w) const {
  switch (tag_) {
    case ModelTag::Euclidean:
    case ModelTag::Cylinder:
      return v.dot(w);
    case ModelTag::Hyperbolic: {
      double lam = 2.0 / (1.0 - x.squaredNorm());
      return lam * lam * v.dot(w);
    }
    default:
      return v.dot(metric(x) * w);
  }
}

Tensor3 ChartManifold::christoffel_at(const Vec& x) const {
  Tensor3 G(n_);
  switch (tag_) {
    case ModelTag::Euclidean:
    case ModelTag::Cylinder:
      return G;
    case ModelTag::Sphere: {
      // Diagonal metric D_i = r^2 prod_{j<i} sin^2 x_j.
      std::vector<double> D(n_);
      double prod = radius_ * radius_;
      for (int i = 0; i < n_; ++i) {
        D[i] = prod;
        double s = std::sin(x[i]);
        prod *= s * s;
      }
      for (int i = 0; i < n_; ++i) {
        double cot_i = std::cos(x[i]) / std::sin(x[i]);
        for (int k = i + 1; k < n_; ++k) {
          G(k, k, i) = cot_i;
          G(k, i, k) = cot_i;
          G(i, k, k) = -(D[k] / D[i]) * cot_i;
        }
      }
      return G;
    }
    case ModelTag::Hyperbolic: {
      double denom = 1.0 - x.squaredNorm();
      Vec f = (2.0 / denom) * x;  // gradient of log conformal factor
      for (int k = 0; k < n_; ++k)
        for (int i = 0; i < n_; ++i)
          for (int j = 0; j < n_; ++j) {
            double v = 0.0;
            if (i == k) v += f[j];
            if (j == k) v += f[i];
            if (i == j) v -= f[k];
            G(k, i, j) = v;
          }
      return G;
    }
    case ModelTag::Custom:
      break;
  }

  // Central differences of the metric.
  const double h = christoffel_step(x);
  std::vector<Mat> dg(n_);
  Vec xp = x, xm = x;
  for (int m = 0; m < n_; ++m) {
    xp[m] = x[m] + h;
    xm[m] = x[m] - h;
    if (xp[m] == x[m]) throw NumericPrecisionError("finite-difference step underflow");
    dg[m] = (metric_(xp) - metric_(xm)) / (2 * h);
    xp[m] = x[m];
    xm[m] = x[m];
  }
  Mat g = metric_(x);
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success)
    throw DegenerateMetricError("metric not positive-definite at query point");
  Mat rhs(n_, n_ * n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int l = 0; l < n_; ++l)
        rhs(l, i * n_ + j) = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
  Mat sol = llt.solve(rhs);
  for (int k = 0; k < n_; ++k)
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) G(k, i, j) = sol(k, i * n_ + j);
  return G;
}

Tensor4 ChartManifold::riemann_at(const Vec& x) const {
  Tensor4 R(n_);
  if (tag_ != ModelTag::Custom) {
    // Constant curvature: R_{ijkl} = c (g_jk g_il - g_ik g_jl).
    if (const_curv_ != 0.0) {
      Mat g = metric(x);
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
          for (int k = 0; k < n_; ++k)
            for (int l = 0; l < n_; ++l)
              R(i, j, k, l) = const_curv_ * (g(j, k) * g(i, l) - g(i, k) * g(j, l));
    }
    return R;
  }

  // d Gamma by a fourth-order five-point stencil around x; the Christoffels
  // themselves use the finer metric step internally. The wider stencil keeps
  // the connection-derivative truncation below the curvature tolerances.
  const double h = 10.0 * curvature_step(x);
  std::vector<Tensor3> dG(n_);
  Vec xq = x;
  for (int m = 0; m < n_; ++m) {
    if (x[m] + h == x[m]) throw NumericPrecisionError("finite-difference step underflow");
    auto gamma_off = [&](double off) {
      xq[m] = x[m] + off;
      Tensor3 G = christoffel_at(xq);
      xq[m] = x[m];
      return G;
    };
    Tensor3 gm2 = gamma_off(-2 * h), gm1 = gamma_off(-h), gp1 = gamma_off(h),
            gp2 = gamma_off(2 * h);
    Tensor3 d(n_);
    for (size_t t = 0; t < d.a.size(); ++t)
      d.a[t] = (gm2.a[t] - 8 * gm1.a[t] + 8 * gp1.a[t] - gp2.a[t]) / (12 * h);
    dG[m] = std::move(d);
  }
  Tensor3 G = christoffel_at(x);
  Mat g = metric_(x);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k) {
        for (int m = 0; m < n_; ++m) {
          double up = dG[i](m, j, k) - dG[j](m, i, k);
          for (int a = 0; a < n_; ++a)
            up += G(m, i, a) * G(a, j, k) - G(m, j, a) * G(a, i, k);
          for (int l = 0; l < n_; ++l) R(i, j, k, l) += g(l, m) * up;
        }
      }
  return R;
}

double ChartManifold::sectional(const Vec& x, const Vec& v, const Vec& w) const {
  double vv = inner(x, v, v), ww = inner(x, w, w), vw = inner(x, v, w);
  double den = vv * ww - vw * vw;
  if (!(den > 1e-14 * std::max(vv * ww, 1e-300)))
    throw DegeneratePlaneError("sectional curvature of a degenerate plane");
  if (tag_ != ModelTag::Custom) return const_curv_;
  Tensor4 R = riemann_at(x);
  double num = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k)
        for (int l = 0; l < n_; ++l) num += v[i] * w[j] * w[k] * v[l] * R(i, j, k, l);
  return num / den;
}

double ChartManifold::ricci_p(const Vec& x, const Mat& P, const Vec& w) const {
  const int p = static_cast<int>(P.cols());
  Mat g = metric(x);
  Mat gram = P.transpose() * g * P;
  if ((gram - Mat::Identity(p, p)).cwiseAbs().maxCoeff() > 1e-8)
    throw InvalidFrameError("ricci_p requires an orthonormal frame");

  if (tag_ != ModelTag::Custom) {
    // sum_i c (|e_i|^2 |w|^2 - <e_i,w>^2) with |e_i| = 1
    double ww = inner(x, w, w), acc = 0.0;
    for (int i = 0; i < p; ++i) {
      double ew = inner(x, P.col(i), w);
      acc += const_curv_ * (ww - ew * ew);
    }
    return acc;
  }
  Tensor4 R = riemann_at(x);
  double acc = 0.0;
  for (int c = 0; c < p; ++c) {
    Vec e = P.col(c);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k)
          for (int l = 0; l < n_; ++l) acc += e[i] * w[j] * w[k] * e[l] * R(i, j, k, l);
  }
  return acc;
}

Mat ChartManifold::jacobi_operator(const Vec& x, const Vec& u, const Mat& frame) const {
  const int k = static_cast<int>(frame.cols());
  Mat A(k, k);
  if (tag_ != ModelTag::Custom) {
    if (const_curv_ == 0.0) {
      A.setZero();
      return A;
    }
    Mat g = metric(x);
    Vec gu = g * u;
    double uu = u.dot(gu);
    Vec eu = frame.transpose() * gu;            // <E_a, u>
    Mat ee = frame.transpose() * g * frame;     // <E_a, E_b>
    A = const_curv_ * (uu * ee - eu * eu.transpose());
    return A;
  }
  Tensor4 R = riemann_at(x);
  for (int a = 0; a < k; ++a)
    for (int b = a; b < k; ++b) {
      double acc = 0.0;
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
          for (int q = 0; q < n_; ++q)
            for (int l = 0; l < n_; ++l)
              acc += frame(i, a) * u[j] * u[q] * frame(l, b) * R(i, j, q, l);
      A(a, b) = acc;
      A(b, a) = acc;
    }
  return A;
}

Vec ChartManifold::exp_closed(const Vec& x, const Vec& v, double t) const {
  switch (tag_) {
    case ModelTag::Euclidean:
    case ModelTag::Cylinder:
      return x + t * v;
    case ModelTag::Sphere: {
      Vec P = sphere_embed(n_, radius_, x);
      Vec W = sphere_embed_tangent(n_, radius_, x, t * v);
      double s = W.norm();
      if (s < 1e-300) return x;
      Vec Y = std::cos(s / radius_) * P + (radius_ * std::sin(s / radius_) / s) * W;
      return sphere_unembed(n_, radius_, Y);
    }
    case ModelTag::Hyperbolic: {
      double ve = v.norm();
      if (ve < 1e-300) return x;
      double lam = 2.0 / (1.0 - x.squaredNorm());
      double vg = lam * ve;
      Vec b = std::tanh(t * vg / 2.0) * (v / ve);
      // Moebius addition x (+) b
      double xb = x.dot(b), x2 = x.squaredNorm(), b2 = b.squaredNorm();
      double den = 1.0 + 2.0 * xb + x2 * b2;
      return ((1.0 + 2.0 * xb + b2) * x + (1.0 - x2) * b) / den;
    }
    case ModelTag::Custom:
      throw UnsupportedInstanceError("no closed-form exponential for custom metrics");
  }
  throw Error("unreachable");
}

double ChartManifold::distance(const Vec& x, const Vec& y) const {
  switch (tag_) {
    case ModelTag::Euclidean:
      return (x - y).norm();
    case ModelTag::Cylinder: {
      double d0 = x[0] - y[0];
      double d1 = std::remainder(x[1] - y[1], 2 * kPi);
      return std::sqrt(d0 * d0 + d1 * d1);
    }
    case ModelTag::Sphere: {
      Vec X = sphere_embed(n_, radius_, x), Y = sphere_embed(n_, radius_, y);
      return radius_ * std::acos(clamp1(X.dot(Y) / (radius_ * radius_)));
    }
    case ModelTag::Hyperbolic: {
      double num = 2.0 * (x - y).squaredNorm();
      double den = (1.0 - x.squaredNorm()) * (1.0 - y.squaredNorm());
      return std::acosh(1.0 + num / den);
    }
    case ModelTag::Custom:
      throw UnsupportedInstanceError("no closed-form distance for custom metrics");
  }
  throw Error("unreachable");
}

Vec ChartManifold::wrap(const Vec& x) const {
  Vec y = x;
  for (int i = 0; i < n_; ++i) {
    if (!dom_.periodic[i]) continue;
    double p = dom_.period[i];
    y[i] = std::fmod(y[i], p);
    if (y[i] < 0) y[i] += p;
  }
  return y;
}

Mat ChartManifold::orthonormalize(const Vec& x, const Mat& V) const {
  Mat g = metric(x);
  Mat E = V;
  for (int k = 0; k < E.cols(); ++k) {
    for (int j = 0; j < k; ++j) E.col(k) -= (E.col(j).dot(g * E.col(k))) * E.col(j);
    double nrm = std::sqrt(std::max(0.0, E.col(k).dot(g * E.col(k))));
    if (nrm < 1e-12) throw InvalidFrameError("orthonormalize: rank-deficient input");
    E.col(k) /= nrm;
  }
  return E;
}

// ---------------------------------------------------------------------------
// Coupled RK4 integration along a geodesic.

namespace detail {

namespace {

struct SysState {
  Vec x, u;
  Mat E, B, Bd, Ad;

  void set_combination(const SysState& a, double h, const SysState& b) {
    x = a.x + h * b.x;
    u = a.u + h * b.u;
    if (E.size()) E = a.E + h * b.E;
    if (B.size()) {
      B = a.B + h * b.B;
      Bd = a.Bd + h * b.Bd;
    }
    if (Ad.size()) Ad = a.Ad + h * b.Ad;
  }
};

struct Deriv {
  const ChartManifold& M;
  bool flat;
  mutable Tensor3 G;

  explicit Deriv(const ChartManifold& m) : M(m) {
    flat = (m.tag() == ModelTag::Euclidean || m.tag() == ModelTag::Cylinder);
  }

  void operator()(const SysState& y, SysState& dy) const {
    const int n = static_cast<int>(y.x.size());
    dy.x = y.u;
    if (flat) {
      dy.u.setZero();
      if (y.E.size()) dy.E.setZero();
    } else {
      G = M.christoffel_at(y.x);
      for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) acc += G(k, i, j) * y.u[i] * y.u[j];
        dy.u[k] = -acc;
      }
      if (y.E.size()) {
        for (int c = 0; c < y.E.cols(); ++c)
          for (int k = 0; k < n; ++k) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i)
              for (int j = 0; j < n; ++j) acc += G(k, i, j) * y.u[i] * y.E(j, c);
            dy.E(k, c) = -acc;
          }
      }
    }
    if (y.B.size()) {
      dy.B = y.Bd;
      if (flat)
        dy.Bd.setZero();
      else
        dy.Bd.noalias() = -(M.jacobi_operator(y.x, y.u, y.E) * y.B);
      if (y.Ad.size()) {
        // E' = (U E)^perp with U acting through B: solve B c = E column-wise,
        // apply Bdot, subtract the span(B) part.
        Eigen::HouseholderQR<Mat> qr(y.B);
        Mat Q = qr.householderQ() * Mat::Identity(y.B.rows(), y.B.cols());
        Mat C = qr.solve(y.Ad);
        Mat UE = y.Bd * C;
        dy.Ad = UE - Q * (Q.transpose() * UE);
      }
    }
  }
};

void rk4_step(const Deriv& f, SysState& y, double h, SysState& k1, SysState& k2, SysState& k3,
              SysState& k4, SysState& tmp) {
  f(y, k1);
  tmp.set_combination(y, h / 2, k1);
  f(tmp, k2);
  tmp.set_combination(y, h / 2, k2);
  f(tmp, k3);
  tmp.set_combination(y, h, k3);
  f(tmp, k4);
  y.x += (h / 6) * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
  y.u += (h / 6) * (k1.u + 2 * k2.u + 2 * k3.u + k4.u);
  if (y.E.size()) y.E += (h / 6) * (k1.E + 2 * k2.E + 2 * k3.E + k4.E);
  if (y.B.size()) {
    y.B += (h / 6) * (k1.B + 2 * k2.B + 2 * k3.B + k4.B);
    y.Bd += (h / 6) * (k1.Bd + 2 * k2.Bd + 2 * k3.Bd + k4.Bd);
  }
  if (y.Ad.size()) y.Ad += (h / 6) * (k1.Ad + 2 * k2.Ad + 2 * k3.Ad + k4.Ad);
}

}  // namespace

CoupledState integrate_coupled(const ChartManifold& M, const Vec& x0, const Vec& v0, int anchor,
                               int samples, const Mat* frame0, const Mat* B0, const Mat* Bdot0,
                               const Mat* adapted0) {
  if (samples < 2) throw Error("need at least two samples");
  if (anchor < 0 || anchor >= samples) throw Error("anchor outside grid");
  if (!M.domain().contains(x0))
    throw DomainEscapeError("initial point outside chart domain", 0.0);
  if (adapted0 && !B0) throw Error("adapted block requires a Jacobi block");

  const int fine = 2 * samples - 1;
  const double hf = 1.0 / (2.0 * (samples - 1));
  const int ja = 2 * anchor;

  CoupledState out;
  out.pos.assign(fine, Vec());
  out.vel.assign(fine, Vec());
  if (frame0) out.frame.assign(fine, Mat());
  if (B0) {
    out.B.assign(fine, Mat());
    out.Bdot.assign(fine, Mat());
  }
  if (adapted0) out.adapted.assign(fine, Mat());
  out.speed = M.norm(x0, v0);

  SysState y0;
  y0.x = x0;
  y0.u = v0;
  if (frame0) y0.E = *frame0;
  if (B0) {
    y0.B = *B0;
    y0.Bd = *Bdot0;
  }
  if (adapted0) y0.Ad = *adapted0;

  Deriv f(M);
  SysState y = y0, k1 = y0, k2 = y0, k3 = y0, k4 = y0, tmp = y0;

  auto store = [&](int j, const SysState& s) {
    out.pos[j] = s.x;
    out.vel[j] = s.u;
    if (frame0) out.frame[j] = s.E;
    if (B0) {
      out.B[j] = s.B;
      out.Bdot[j] = s.Bd;
    }
    if (adapted0) out.adapted[j] = s.Ad;
  };
  store(ja, y0);

  for (int j = ja; j < fine - 1; ++j) {
    rk4_step(f, y, hf, k1, k2, k3, k4, tmp);
    if (!M.domain().contains(y.x))
      throw DomainEscapeError("geodesic left the chart domain",
                              static_cast<double>(j + 1) / (fine - 1));
    store(j + 1, y);
  }
  y = y0;
  for (int j = ja; j > 0; --j) {
    rk4_step(f, y, -hf, k1, k2, k3, k4, tmp);
    if (!M.domain().contains(y.x))
      throw DomainEscapeError("geodesic left the chart domain",
                              static_cast<double>(j - 1) / (fine - 1));
    store(j - 1, y);
  }
  return out;
}

}  // namespace detail

GeodesicPath geodesic(const ChartManifold& M, const Vec& x, const Vec& v, int samples) {
  return geodesic_anchored(M, x, v, 0, samples);
}

GeodesicPath geodesic_anchored(const ChartManifold& M, const Vec& x, const Vec& v, int anchor,
                               int samples) {
  auto st = detail::integrate_coupled(M, x, v, anchor, samples, nullptr, nullptr, nullptr);
  GeodesicPath p;
  p.samples = samples;
  p.anchor = anchor;
  p.speed = st.speed;
  p.pos = std::move(st.pos);
  p.vel = std::move(st.vel);
  return p;
}

FrameField parallel_frame(const ChartManifold& M, const GeodesicPath& path, const Mat& basis0) {
  auto st = detail::integrate_coupled(M, path.pos_at(path.anchor), path.vel_at(path.anchor),
                                      path.anchor, path.samples, &basis0, nullptr, nullptr);
  FrameField F;
  F.E = std::move(st.frame);
  return F;
}

FrameField parallel_frame(const ChartManifold& M, const GeodesicPath& path,
                          const FrameBasis& basis0) {
  if (!basis0.orthonormal(M))
    throw InvalidFrameError("parallel_frame: initial basis is not orthonormal");
  if ((basis0.base - path.pos_at(path.anchor)).cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidFrameError("parallel_frame: basis base point is off the path anchor");
  return parallel_frame(M, path, basis0.vectors);
}

// ---------------------------------------------------------------------------

namespace {

// The sign convention of riemann_at is calibrated by the round sphere; this
// runs once per process.
std::once_flag g_self_test_flag;
bool g_in_self_test = false;

void run_sign_self_test() {
  if (g_in_self_test) return;
  std::call_once(g_self_test_flag, [] {
    g_in_self_test = true;
    ChartManifold S = ChartManifold::sphere(2, 1.0);
    Vec x(2);
    x << 1.1, 0.4;
    Vec v(2), w(2);
    v << 1.0, 0.0;
    w << 0.0, 1.0;
    double sec = S.sectional(x, v, w);
    if (std::abs(sec - 1.0) > 1e-10)
      throw Error("curvature sign convention self-test failed");
    g_in_self_test = false;
  });
}

}  // namespace

}  // namespace curvot
