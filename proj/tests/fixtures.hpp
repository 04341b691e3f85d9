// Shared scenario fixtures mirroring the shipped gallery.

#pragma once

#include "curvot/transport.hpp"

#include <cmath>
#include <memory>

namespace curvot::fixtures {

constexpr double kPi = 3.14159265358979323846;

inline Vec v2(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

inline Parametrization segment(const Vec& from, const Vec& to) {
  Parametrization par;
  par.p = 1;
  par.map = [from, to](const Vec& u) { return from + u[0] * (to - from); };
  par.tangent = [from, to](const Vec&) {
    Mat D(from.size(), 1);
    D.col(0) = to - from;
    return D;
  };
  return par;
}

inline Potential zero_potential() {
  Potential phi;
  phi.value = [](const Vec&) { return 0.0; };
  phi.grad = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };
  phi.hess = [](const Vec& x) { return Mat(Mat::Zero(x.size(), x.size())); };
  return phi;
}

// phi = -x1 x2 drives the crossing-segments interpolation.
inline Potential sharp_potential() {
  Potential phi;
  phi.value = [](const Vec& x) { return -x[0] * x[1]; };
  phi.grad = [](const Vec& x) { return v2(-x[1], -x[0]); };
  phi.hess = [](const Vec&) {
    Mat H(2, 2);
    H << 0, -1, -1, 0;
    return H;
  };
  return phi;
}

inline Potential linear_potential(int coord, double c, int dim = 2) {
  Potential phi;
  phi.value = [coord, c](const Vec& x) { return c * x[coord]; };
  phi.grad = [coord, c, dim](const Vec&) {
    Vec g = Vec::Zero(dim);
    g[coord] = c;
    return g;
  };
  phi.hess = [dim](const Vec&) { return Mat(Mat::Zero(dim, dim)); };
  return phi;
}

struct Fixture {
  std::shared_ptr<ChartManifold> M;
  PotentialScenario sc;
};

inline Fixture segments_scenario(int N, int S) {
  Fixture f;
  f.M = std::make_shared<ChartManifold>(ChartManifold::euclidean(2));
  f.sc.M = f.M.get();
  f.sc.p = 1;
  f.sc.branches.push_back({segment(v2(0, 0), v2(1, 0)), sharp_potential(), 1.0});
  f.sc.particles_per_branch = N;
  f.sc.grid = S;
  f.sc.t0 = 0.5;
  return f;
}

inline Fixture static_scenario(int N, int S) {
  Fixture f;
  f.M = std::make_shared<ChartManifold>(ChartManifold::euclidean(2));
  f.sc.M = f.M.get();
  f.sc.p = 1;
  f.sc.branches.push_back({segment(v2(0, 0), v2(1, 0.5)), zero_potential(), 1.0});
  f.sc.particles_per_branch = N;
  f.sc.grid = S;
  f.sc.t0 = 0.5;
  return f;
}

inline Fixture cylinder_scenario(int N, int S) {
  Fixture f;
  f.M = std::make_shared<ChartManifold>(ChartManifold::cylinder());
  f.sc.M = f.M.get();
  f.sc.p = 1;
  f.sc.branches.push_back(
      {segment(v2(0, kPi / 2), v2(1, kPi / 2)), linear_potential(1, kPi), 0.5});
  f.sc.branches.push_back(
      {segment(v2(0, 3 * kPi / 2), v2(1, 3 * kPi / 2)), linear_potential(1, -kPi), 0.5});
  f.sc.particles_per_branch = N;
  f.sc.grid = S;
  f.sc.t0 = 0.5;
  f.sc.glue_endpoints = true;
  return f;
}

// Latitude circle flowing along meridians toward the pole.
inline Fixture sphere_cap_scenario(int N, int S, double theta_c = 1.2, double alpha = -0.5) {
  Fixture f;
  f.M = std::make_shared<ChartManifold>(ChartManifold::sphere(2, 1.0));
  f.sc.M = f.M.get();
  f.sc.p = 1;
  Parametrization par;
  par.p = 1;
  par.map = [theta_c](const Vec& u) { return v2(theta_c, 2 * kPi * u[0]); };
  par.tangent = [](const Vec&) {
    Mat D(2, 1);
    D << 0.0, 2 * kPi;
    return D;
  };
  f.sc.branches.push_back({par, linear_potential(0, alpha), 1.0});
  f.sc.particles_per_branch = N;
  f.sc.grid = S;
  f.sc.t0 = 0.5;
  return f;
}

// Equal-area patch on the unit sphere flowing along meridians (p = 2).
inline Fixture sphere_patch_scenario(int N, int S, double z0 = 0.2, double z1 = 0.6,
                                     double phi1 = 1.2, double alpha = -0.4) {
  Fixture f;
  f.M = std::make_shared<ChartManifold>(ChartManifold::sphere(2, 1.0));
  f.sc.M = f.M.get();
  f.sc.p = 2;
  Parametrization par;
  par.p = 2;
  par.map = [=](const Vec& u) {
    double z = z0 + (z1 - z0) * u[1];
    return v2(std::acos(z), phi1 * u[0]);
  };
  par.tangent = [=](const Vec& u) {
    double z = z0 + (z1 - z0) * u[1];
    Mat D(2, 2);
    D.setZero();
    D(1, 0) = phi1;
    D(0, 1) = -(z1 - z0) / std::sqrt(1.0 - z * z);
    return D;
  };
  f.sc.branches.push_back({par, linear_potential(0, alpha), 1.0});
  f.sc.particles_per_branch = N;
  f.sc.grid = S;
  f.sc.t0 = 0.5;
  return f;
}

// Radial hyperbolic segment pushed by a chart-linear potential (kappa != 0).
inline Fixture hyperbolic_scenario(int N, int S, double c = 0.2) {
  Fixture f;
  f.M = std::make_shared<ChartManifold>(ChartManifold::hyperbolic(2));
  f.sc.M = f.M.get();
  f.sc.p = 1;
  Parametrization par;
  par.p = 1;
  double s0 = 0.3, s1 = 1.1;
  par.map = [=](const Vec& u) { return v2(std::tanh((s0 + (s1 - s0) * u[0]) / 2.0), 0.0); };
  par.tangent = [=](const Vec& u) {
    double s = s0 + (s1 - s0) * u[0];
    double ch = std::cosh(s / 2.0);
    Mat D(2, 1);
    D << (s1 - s0) / (2.0 * ch * ch), 0.0;
    return D;
  };
  f.sc.branches.push_back({par, linear_potential(1, c), 1.0});
  f.sc.particles_per_branch = N;
  f.sc.grid = S;
  f.sc.t0 = 0.5;
  return f;
}

}  // namespace curvot::fixtures
