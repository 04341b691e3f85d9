// Riemannian geometry kernel: chart metrics, curvature, geodesics,
// parallel transport. Model spaces (euclidean, sphere, hyperbolic ball,
// flat cylinder) carry closed-form metric, connection, curvature,
// exponential map and distance; custom metrics get finite differences.

#pragma once

#include "curvot/types.hpp"

#include <functional>
#include <limits>
#include <vector>

namespace curvot {

enum class ModelTag { Euclidean, Sphere, Hyperbolic, Cylinder, Custom };

class ChartManifold;

struct TangentVector {
  Vec base;
  Vec comp;

  double norm(const ChartManifold& M) const;
};

// Ordered list of tangent vectors at a common base point (columns).
struct FrameBasis {
  Vec base;
  Mat vectors;  // n x k

  bool orthonormal(const ChartManifold& M, double tol = 1e-10) const;
};

struct ChartDomain {
  Vec lo, hi;
  std::vector<bool> periodic;
  std::vector<double> period;
  double max_norm = std::numeric_limits<double>::infinity();  // ball charts

  bool contains(const Vec& x) const;
};

using MetricFn = std::function<Mat(const Vec&)>;

class ChartManifold {
public:
  static ChartManifold euclidean(int n);
  static ChartManifold sphere(int n, double radius);
  static ChartManifold hyperbolic(int n);
  static ChartManifold cylinder();
  static ChartManifold custom(int n, MetricFn g);
  static ChartManifold custom(int n, MetricFn g, ChartDomain dom);

  int dim() const { return n_; }
  ModelTag tag() const { return tag_; }
  double radius() const { return radius_; }
  const ChartDomain& domain() const { return dom_; }

  Mat metric(const Vec& x) const;
  double inner(const Vec& x, const Vec& v, const Vec& w) const;
  double norm(const Vec& x, const Vec& v) const { return std::sqrt(std::max(0.0, inner(x, v, v))); }

  // Levi-Civita connection coefficients Gamma^k_{ij}, symmetric in i,j.
  // Closed form on model spaces, central differences (h = 1e-5 max(1,|x|)) otherwise.
  Tensor3 christoffel_at(const Vec& x) const;

  // Curvature tensor R_{ijkl} = <R(d_i,d_j)d_k, d_l> in the convention
  // calibrated so that sectional curvature of the round sphere is +1/r^2.
  Tensor4 riemann_at(const Vec& x) const;

  // sec(v,w) = R(v,w,w,v) / (|v|^2 |w|^2 - <v,w>^2)
  double sectional(const Vec& x, const Vec& v, const Vec& w) const;

  // Partial Ricci trace over the orthonormal columns of P in direction w:
  // sum_i sec(e_i,w) (|w|^2 - <e_i,w>^2).
  double ricci_p(const Vec& x, const Mat& P, const Vec& w) const;

  // Matrix of the Jacobi operator v -> R(v,u)u restricted to the columns of
  // `frame`: A_ab = R(E_a, u, u, E_b). Symmetric.
  Mat jacobi_operator(const Vec& x, const Vec& u, const Mat& frame) const;

  bool has_model_forms() const { return tag_ != ModelTag::Custom; }
  Vec exp_closed(const Vec& x, const Vec& v, double t) const;
  double distance(const Vec& x, const Vec& y) const;

  // Normalizes periodic coordinates into their principal range.
  Vec wrap(const Vec& x) const;

  // Metric Gram-Schmidt of the columns of V at x.
  Mat orthonormalize(const Vec& x, const Mat& V) const;

private:
  ChartManifold() = default;

  int n_ = 0;
  ModelTag tag_ = ModelTag::Custom;
  double radius_ = 1.0;
  double const_curv_ = 0.0;  // model spaces only
  MetricFn metric_;
  ChartDomain dom_;
};

// Sampled constant-speed geodesic over the uniform grid t_k = k/(S-1) on
// [0,1]. Positions and velocities are stored at half-grid ("fine")
// resolution, 2S-1 entries, so downstream ODE solves have exact midpoint
// coefficients.
struct GeodesicPath {
  int samples = 0;
  int anchor = 0;  // grid index where the initial condition was given
  double speed = 0.0;
  std::vector<Vec> pos;
  std::vector<Vec> vel;

  int fine_count() const { return 2 * samples - 1; }
  double grid_time(int k) const { return static_cast<double>(k) / (samples - 1); }
  double fine_time(int j) const { return static_cast<double>(j) / (2 * (samples - 1)); }
  const Vec& pos_at(int grid) const { return pos[2 * grid]; }
  const Vec& vel_at(int grid) const { return vel[2 * grid]; }
};

// Fixed-step RK4 on the geodesic equation from x with initial velocity v at
// t=0 (anchor=0) or from an interior grid anchor (integrates both ways).
GeodesicPath geodesic(const ChartManifold& M, const Vec& x, const Vec& v, int samples);
GeodesicPath geodesic_anchored(const ChartManifold& M, const Vec& x, const Vec& v, int anchor,
                               int samples);

// Parallel frame along a path; basis0 (n x k, chart components) sits at the
// path anchor. Values at fine resolution.
struct FrameField {
  std::vector<Mat> E;
};

FrameField parallel_frame(const ChartManifold& M, const GeodesicPath& path, const Mat& basis0);
FrameField parallel_frame(const ChartManifold& M, const GeodesicPath& path,
                          const FrameBasis& basis0);

namespace detail {

// One integrator for everything that rides along a geodesic: position,
// velocity, an optional parallel frame (chart components), an optional
// Jacobi block B, Bdot (components w.r.t. that frame), and an optional
// adapted block solving E' = (U E)^perp along the moving column space of B.
// RK4, one step per fine interval, autonomous stage evaluation.
struct CoupledState {
  std::vector<Vec> pos, vel;
  std::vector<Mat> frame;    // empty if no frame requested
  std::vector<Mat> B, Bdot;  // empty if no Jacobi block requested
  std::vector<Mat> adapted;  // empty if no adapted block requested
  double speed = 0.0;
};

CoupledState integrate_coupled(const ChartManifold& M, const Vec& x0, const Vec& v0, int anchor,
                               int samples, const Mat* frame0, const Mat* B0, const Mat* Bdot0,
                               const Mat* adapted0 = nullptr);

}  // namespace detail

}  // namespace curvot
