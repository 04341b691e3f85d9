#include "curvot/distortion.hpp"

#include <algorithm>
#include <cmath>

namespace curvot {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Positivity threshold for the infinity scan; sized so that a sin_kappa zero
// hit at roundoff level is flagged while genuine positive minima are not.
double positivity_floor(double theta) { return 1e-11 * std::max(theta, 1e-3); }

struct Osc {
  double v, w;  // v' = w, w' = -kappa v
};

inline Osc deriv(const KappaFunction& k, double s, const Osc& y) {
  return {y.w, -k(s) * y.v};
}

inline void rk4(const KappaFunction& k, double s, double h, Osc& y) {
  Osc k1 = deriv(k, s, y);
  Osc k2 = deriv(k, s + h / 2, {y.v + h / 2 * k1.v, y.w + h / 2 * k1.w});
  Osc k3 = deriv(k, s + h / 2, {y.v + h / 2 * k2.v, y.w + h / 2 * k2.w});
  Osc k4 = deriv(k, s + h, {y.v + h * k3.v, y.w + h * k3.w});
  y.v += h / 6 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v);
  y.w += h / 6 * (k1.w + 2 * k2.w + 2 * k3.w + k4.w);
}

}  // namespace

KappaFunction KappaFunction::constant(double K, double theta) {
  KappaFunction k;
  k.theta_ = theta;
  k.fn_ = [K](double) { return K; };
  return k;
}

KappaFunction KappaFunction::analytic(std::function<double(double)> f, double theta) {
  KappaFunction k;
  k.theta_ = theta;
  k.fn_ = std::move(f);
  return k;
}

KappaFunction KappaFunction::sampled(std::vector<double> values, double theta) {
  if (values.size() < 2) throw Error("sampled kappa needs at least two values");
  KappaFunction k;
  k.theta_ = theta;
  k.samples_ = std::move(values);
  k.use_samples_ = true;
  return k;
}

double KappaFunction::operator()(double s) const {
  if (rev_) s = theta_ - s;
  if (!use_samples_) return fn_(s);
  const int m = static_cast<int>(samples_.size());
  if (theta_ <= 0) return samples_.front();
  double u = s / theta_ * (m - 1);
  if (u <= 0) return samples_.front();
  if (u >= m - 1) return samples_.back();
  int i = static_cast<int>(u);
  double f = u - i;
  return samples_[i] * (1 - f) + samples_[i + 1] * f;
}

KappaFunction KappaFunction::reversed() const {
  KappaFunction k = *this;
  if (k.use_samples_)
    std::reverse(k.samples_.begin(), k.samples_.end());
  else
    k.rev_ = !k.rev_;
  return k;
}

KappaFunction KappaFunction::comparison_coefficient(double K, double pprime) const {
  KappaFunction k = *this;
  if (k.use_samples_) {
    for (double& v : k.samples_) v = (K - v) / pprime;
  } else {
    auto base = *this;
    k.fn_ = [base, K, pprime](double s) { return (K - base(s)) / pprime; };
    k.use_samples_ = false;
    k.rev_ = false;
  }
  return k;
}

double sin_kappa(const KappaFunction& kappa, double s, int steps) {
  if (s <= 0) return 0.0;
  Osc y{0.0, 1.0};
  double h = s / steps;
  for (int i = 0; i < steps; ++i) rk4(kappa, i * h, h, y);
  return y.v;
}

DistortionValue sigma(const KappaFunction& kappa, double t, double theta) {
  if (theta < 0) throw Error("sigma: negative theta");
  if (theta == 0.0) return {false, t};  // limit weight; see module notes
  t = std::min(1.0, std::max(0.0, t));

  const double floor = positivity_floor(theta);
  const int base = 4096;
  Osc y{0.0, 1.0};
  double v_at_t = 0.0;

  // Phase one lands exactly on t*theta, phase two on theta; positivity is
  // scanned at every step of both.
  int m1 = std::max(1, static_cast<int>(std::lround(t * base)));
  if (t > 0) {
    double h = t * theta / m1;
    for (int i = 0; i < m1; ++i) {
      rk4(kappa, i * h, h, y);
      if (y.v <= floor) return {true, 0.0};
    }
    v_at_t = y.v;
  }
  int m2 = std::max(1, static_cast<int>(std::lround((1 - t) * base)));
  if (t < 1) {
    double s0 = t * theta;
    double h = (theta - s0) / m2;
    for (int i = 0; i < m2; ++i) {
      rk4(kappa, s0 + i * h, h, y);
      if (y.v <= floor) return {true, 0.0};
    }
  }
  return {false, v_at_t / y.v};
}

DistortionValue sigma_const(double K, double t, double theta) {
  double kt2 = K * theta * theta;
  if (kt2 >= kPi * kPi) return {true, 0.0};
  if (kt2 > 0) {
    double r = theta * std::sqrt(K);
    return {false, std::sin(t * r) / std::sin(r)};
  }
  if (kt2 == 0.0) return {false, t};
  double r = theta * std::sqrt(-K);
  return {false, std::sinh(t * r) / std::sinh(r)};
}

SigmaSeries sigma_series(const KappaFunction& kappa, int m, int substeps) {
  SigmaSeries out;
  const double theta = kappa.theta();
  if (m < 2) throw Error("sigma_series needs at least two grid points");
  out.values.assign(m, 0.0);
  if (theta == 0.0) {
    for (int j = 0; j < m; ++j) out.values[j] = static_cast<double>(j) / (m - 1);
    return out;
  }
  // Floor scaled to the integrator truncation so a smeared zero crossing is
  // still flagged at coarse resolution.
  double rel_h = 1.0 / ((m - 1) * substeps);
  const double floor =
      std::max(positivity_floor(theta), 100.0 * rel_h * rel_h * rel_h * rel_h * std::max(theta, 1e-3));
  std::vector<double> v(m, 0.0);
  Osc y{0.0, 1.0};
  double h = theta / ((m - 1) * substeps);
  for (int j = 0; j + 1 < m; ++j) {
    double s0 = theta * j / (m - 1);
    for (int q = 0; q < substeps; ++q) {
      rk4(kappa, s0 + q * h, h, y);
      if (y.v <= floor) {
        out.infinite = true;
        return out;
      }
    }
    v[j + 1] = y.v;
  }
  double vend = v[m - 1];
  for (int j = 0; j < m; ++j) out.values[j] = v[j] / vend;
  return out;
}

double green(double s, double t) {
  return (t <= s) ? (1.0 - s) * t : s * (1.0 - t);
}

BvpValue bvp_solution(const KappaFunction& kappa, double v0, double v1, double t) {
  double theta = kappa.theta();
  DistortionValue back = sigma(kappa.reversed(), 1.0 - t, theta);
  DistortionValue fwd = sigma(kappa, t, theta);
  if (back.infinite || fwd.infinite) return {true, 0.0};
  return {false, back.value * v0 + fwd.value * v1};
}

double green_solution(double w0, double w1, const std::vector<double>& u, double t) {
  const int m = static_cast<int>(u.size());
  if (m < 2) throw Error("green_solution needs at least two samples");
  double h = 1.0 / (m - 1);
  double acc = 0.0;
  for (int j = 0; j < m; ++j) {
    double wgt = (j == 0 || j == m - 1) ? 0.5 : 1.0;
    acc += wgt * green(static_cast<double>(j) / (m - 1), t) * u[j];
  }
  return (1.0 - t) * w0 + t * w1 + h * acc;
}

ComparisonResult comparison_holds(const std::vector<double>& u, const KappaFunction& kappa,
                                  double tol) {
  const int m = static_cast<int>(u.size());
  if (m < 2) throw Error("comparison_holds needs at least two samples");
  for (double x : u)
    if (!(x > 0)) throw Error("comparison_holds requires a positive subsolution");

  SigmaSeries fwd = sigma_series(kappa, m);
  SigmaSeries back = sigma_series(kappa.reversed(), m);
  if (fwd.infinite || back.infinite) return {true, true, 0.0};

  double margin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m; ++j) {
    double v = back.values[m - 1 - j] * u.front() + fwd.values[j] * u.back();
    margin = std::min(margin, u[j] - v);
  }
  return {margin >= -tol, false, margin};
}

}  // namespace curvot
