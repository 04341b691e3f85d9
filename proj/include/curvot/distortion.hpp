// Generalized distortion-coefficient calculus: sin_kappa solutions of
// v'' + kappa v = 0, the distortion weights sigma_kappa^(t)(theta), the
// constant-coefficient closed forms, and the Green-function comparison
// solutions used by the inequality checks.

#pragma once

#include "curvot/types.hpp"

#include <functional>
#include <vector>

namespace curvot {

// Continuous coefficient on [0,theta]: closed form, or linear interpolation
// of uniform samples (clamped constant beyond the last sample).
class KappaFunction {
public:
  static KappaFunction constant(double K, double theta);
  static KappaFunction analytic(std::function<double(double)> f, double theta);
  static KappaFunction sampled(std::vector<double> values, double theta);

  double theta() const { return theta_; }
  double operator()(double s) const;

  // kappa^-(s) = kappa(theta - s)
  KappaFunction reversed() const;

  // s -> (K - kappa(s)) / pprime, the comparison coefficient of the
  // curvature checks.
  KappaFunction comparison_coefficient(double K, double pprime) const;

private:
  KappaFunction() = default;
  double theta_ = 0.0;
  std::function<double(double)> fn_;
  std::vector<double> samples_;
  bool use_samples_ = false;
  bool rev_ = false;
};

struct DistortionValue {
  bool infinite = false;
  double value = 0.0;
};

// Unique solution of v'' + kappa v = 0, v(0)=0, v'(0)=1, evaluated at s.
double sin_kappa(const KappaFunction& kappa, double s, int steps = 4096);

// sigma_kappa^(t)(theta) = sin_kappa(t theta)/sin_kappa(theta) when
// sin_kappa(s theta) > 0 for all s in (0,1], infinite otherwise.
// theta = 0 returns the limit weight t.
DistortionValue sigma(const KappaFunction& kappa, double t, double theta);

// Four-case closed form for constant K.
DistortionValue sigma_const(double K, double t, double theta);

// sigma^{(t_j)} for all t_j = j/(m-1) from a single integration sweep.
struct SigmaSeries {
  bool infinite = false;
  std::vector<double> values;
};
SigmaSeries sigma_series(const KappaFunction& kappa, int m, int substeps = 4);

// Green function of -d^2/dt^2 with zero boundary values.
double green(double s, double t);

struct BvpValue {
  bool unbounded = false;
  double value = 0.0;
};

// v(t) = sigma_{kappa^-}^{(1-t)}(theta) v0 + sigma_{kappa^+}^{(t)}(theta) v1,
// the solution of v'' + kappa(t theta) theta^2 v = 0 with v(0)=v0, v(1)=v1.
BvpValue bvp_solution(const KappaFunction& kappa, double v0, double v1, double t);

// w(t) = (1-t) w0 + t w1 + int_0^1 g(s,t) u(s) ds, u sampled uniformly on
// [0,1], trapezoid quadrature; solves w'' + u = 0.
double green_solution(double w0, double w1, const std::vector<double>& u, double t);

struct ComparisonResult {
  bool pass = false;
  bool vacuous = false;  // sigma infinite: comparison holds vacuously
  double margin = 0.0;   // min over the grid of u - v
};

// Checks that the positive subsolution samples u (uniform grid on [0,1])
// dominate the boundary-value solution with the same boundary data.
ComparisonResult comparison_holds(const std::vector<double>& u, const KappaFunction& kappa,
                                  double tol);

}  // namespace curvot
