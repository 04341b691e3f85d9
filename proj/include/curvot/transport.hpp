// Rectifiable Wasserstein-geodesic scenarios at particle level: midpoint
// discretization of uniform measures on parametrized submanifolds, transport
// driven by explicit potentials anchored at an interior time, densities
// propagated by the interior Monge-Ampere equality, and an exact assignment
// oracle certifying optimality at desk scale.

#pragma once

#include "curvot/jacobi.hpp"

#include <functional>
#include <vector>

namespace curvot {

struct Particle {
  Vec pos;
  double weight = 0.0;
  Mat frame;  // n x p orthonormal tangent frame of the support
  double rho = 0.0;
};

struct ParticleMeasure {
  int p = 1;
  std::vector<Particle> parts;
};

// u in [0,1]^p -> chart coordinates. The tangent map may be closed form;
// otherwise it is taken by central differences.
struct Parametrization {
  int p = 1;
  std::function<Vec(const Vec&)> map;
  std::function<Mat(const Vec&)> tangent;  // optional
};

// Uniform (w.r.t. H^p) probability measure on the parametrized patch,
// midpoint quadrature with N cells (p=2 requires a square N).
ParticleMeasure discretize(const ChartManifold& M, const Parametrization& par, int p, int N);

// Scalar potential with closed-form chart partials.
struct Potential {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;
  std::function<Mat(const Vec&)> hess;
};

Vec riemannian_gradient(const ChartManifold& M, const Potential& phi, const Vec& x);
// Covariant Hessian as a (1,1) chart matrix, v -> (Hess phi) v.
Mat covariant_hessian(const ChartManifold& M, const Potential& phi, const Vec& x);

struct ScenarioBranch {
  Parametrization par;
  Potential phi;
  double mass = 1.0;
};

struct PotentialScenario {
  const ChartManifold* M = nullptr;
  int p = 1;
  std::vector<ScenarioBranch> branches;
  int particles_per_branch = 64;
  int grid = 1001;      // sample count S on [0,1]
  double t0 = 0.5;      // anchor time, must lie on the grid
  bool glue_endpoints = false;
};

// Reduced per-particle record of one transport geodesic.
struct ParticleTrack {
  int branch = 0;
  double weight = 0.0;
  double rho_anchor = 0.0;
  double speed = 0.0;
  std::vector<Vec> pos;          // grid positions (unwrapped chart coords)
  std::vector<Mat> frame;        // grid tangent frames of Sigma_t, chart comps
  std::vector<double> jac;       // grid p-Jacobian, normalized to 1 at anchor
  std::vector<double> perp2;     // fine |U^perp|^2 = kappa(theta t) theta^2
  std::vector<double> trU;       // grid trace of U^top
  std::vector<double> sad;       // grid self-adjointness defect
  double riccati_max = 0.0;
  double ode_residual = 0.0;
  double max_condition = 0.0;
  bool selfadjoint_initial = false;
  double rho0 = 0.0, rho1 = 0.0;  // endpoint densities (glued when shared)

  KappaFunction kappa() const;  // sampled correction profile on [0, speed]
};

struct InterpolationResult {
  const ChartManifold* M = nullptr;
  int p = 1;
  int S = 0;
  double t0 = 0.5;
  int anchor = 0;
  bool glued = false;
  std::vector<ParticleTrack> tracks;

  double grid_time(int k) const { return static_cast<double>(k) / (S - 1); }
  // Index of a report time; throws unless t sits on the sample grid.
  int grid_index(double t) const;
  double rho_at(int track, int grid_idx) const;
  ParticleMeasure measure_at(int grid_idx) const;
};

InterpolationResult flow(const PotentialScenario& sc);

ParticleMeasure density_along(const InterpolationResult& res, double t);

struct TransportPlanDiscrete {
  std::vector<int> assignment;
  double cost = 0.0;
};

// Globally optimal assignment between equal-size uniform clouds for the
// squared model-space distance. O(N^3), N <= 512.
TransportPlanDiscrete exact_assignment(const ChartManifold& M, const ParticleMeasure& a,
                                       const ParticleMeasure& b);

struct OptimalityReport {
  bool pass = false;
  double gap = 0.0;
  double scenario_cost = 0.0;
  double oracle_cost = 0.0;
};

// Certifies that the potential-driven coupling matches the assignment oracle.
OptimalityReport validate_optimality(const InterpolationResult& res, double tol);

// Exact-assignment Wasserstein distance between two grid-time clouds.
double w2_between(const InterpolationResult& res, int ka, int kb);

struct MongeMatherStats {
  double min_interior_ratio = 0.0;  // min over pairs/interior times of d_t/d_anchor
  double max_ratio = 0.0;
};

MongeMatherStats monge_mather_stats(const InterpolationResult& res, int time_stride);

}  // namespace curvot
