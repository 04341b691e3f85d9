#include "curvot/transport.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace curvot {

namespace {

Mat parametrization_tangent(const Parametrization& par, const Vec& u) {
  if (par.tangent) return par.tangent(u);
  const double h = 1e-6;
  Vec x0 = par.map(u);
  Mat D(x0.size(), u.size());
  Vec up = u, um = u;
  for (int a = 0; a < u.size(); ++a) {
    up[a] = u[a] + h;
    um[a] = u[a] - h;
    D.col(a) = (par.map(up) - par.map(um)) / (2 * h);
    up[a] = u[a];
    um[a] = u[a];
  }
  return D;
}

// Midpoint lattice on [0,1]^p with m points per axis.
void lattice_midpoints(int p, int m, std::vector<Vec>& out) {
  out.clear();
  std::vector<int> idx(p, 0);
  while (true) {
    Vec u(p);
    for (int a = 0; a < p; ++a) u[a] = (idx[a] + 0.5) / m;
    out.push_back(u);
    int a = 0;
    for (; a < p; ++a) {
      if (++idx[a] < m) break;
      idx[a] = 0;
    }
    if (a == p) break;
  }
}

int lattice_side(int p, int N) {
  if (p == 1) return N;
  int m = static_cast<int>(std::lround(std::pow(static_cast<double>(N), 1.0 / p)));
  int mp = 1;
  for (int a = 0; a < p; ++a) mp *= m;
  if (mp != N)
    throw Error("discretize: particle count must be a perfect p-th power for p > 1");
  return m;
}

}  // namespace

ParticleMeasure discretize(const ChartManifold& M, const Parametrization& par, int p, int N) {
  if (N < 1) throw Error("discretize: need at least one particle");
  const int m = lattice_side(p, N);
  std::vector<Vec> us;
  lattice_midpoints(p, m, us);
  const double cell = 1.0 / N;

  ParticleMeasure mu;
  mu.p = p;
  mu.parts.resize(us.size());
  double total = 0.0;
  for (size_t i = 0; i < us.size(); ++i) {
    Vec x = par.map(us[i]);
    Mat D = parametrization_tangent(par, us[i]);
    Mat G = M.metric(x);
    Mat gram = D.transpose() * G * D;
    double det = gram.determinant();
    if (!(det > 1e-20))
      throw ImmersionError("discretize: parametrization is rank deficient at a sample");
    double area = std::sqrt(det) * cell;
    mu.parts[i].pos = x;
    mu.parts[i].weight = area;  // normalized below
    mu.parts[i].frame = M.orthonormalize(x, D);
    total += area;
  }
  for (auto& q : mu.parts) {
    q.weight /= total;
    q.rho = 1.0 / total;
  }
  return mu;
}

Vec riemannian_gradient(const ChartManifold& M, const Potential& phi, const Vec& x) {
  Vec dp = phi.grad(x);
  return M.metric(x).ldlt().solve(dp);
}

Mat covariant_hessian(const ChartManifold& M, const Potential& phi, const Vec& x) {
  const int n = M.dim();
  Vec dp = phi.grad(x);
  Mat H2 = phi.hess(x);
  Tensor3 G = M.christoffel_at(x);
  Mat Hlow(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = H2(i, j);
      for (int l = 0; l < n; ++l) acc -= G(l, i, j) * dp[l];
      Hlow(i, j) = acc;
    }
  return M.metric(x).ldlt().solve(Hlow);
}

KappaFunction ParticleTrack::kappa() const {
  if (speed <= 0) return KappaFunction::sampled(std::vector<double>(perp2.size(), 0.0), 0.0);
  std::vector<double> vals(perp2.size());
  double inv2 = 1.0 / (speed * speed);
  for (size_t j = 0; j < perp2.size(); ++j) vals[j] = perp2[j] * inv2;
  return KappaFunction::sampled(std::move(vals), speed);
}

int InterpolationResult::grid_index(double t) const {
  double k = t * (S - 1);
  double r = std::lround(k);
  if (std::abs(k - r) > 1e-9 * (S - 1) + 1e-12)
    throw Error("report time does not lie on the sample grid");
  int idx = static_cast<int>(r);
  if (idx < 0 || idx >= S) throw Error("report time outside [0,1]");
  return idx;
}

double InterpolationResult::rho_at(int track, int grid_idx) const {
  const ParticleTrack& tr = tracks[track];
  if (grid_idx == 0) return tr.rho0;
  if (grid_idx == S - 1) return tr.rho1;
  return tr.rho_anchor / tr.jac[grid_idx];
}

ParticleMeasure InterpolationResult::measure_at(int grid_idx) const {
  ParticleMeasure mu;
  mu.p = p;
  mu.parts.resize(tracks.size());
  for (size_t i = 0; i < tracks.size(); ++i) {
    mu.parts[i].pos = M->wrap(tracks[i].pos[grid_idx]);
    mu.parts[i].weight = tracks[i].weight;
    mu.parts[i].frame = tracks[i].frame[grid_idx];
    mu.parts[i].rho = rho_at(static_cast<int>(i), grid_idx);
  }
  return mu;
}

InterpolationResult flow(const PotentialScenario& sc) {
  const ChartManifold& M = *sc.M;
  const int S = sc.grid;
  if (S < 3) throw Error("flow: grid too coarse");
  double kd = sc.t0 * (S - 1);
  int anchor = static_cast<int>(std::lround(kd));
  if (std::abs(kd - anchor) > 1e-9)
    throw Error("flow: anchor time must lie on the sample grid");

  double total_mass = 0.0;
  for (const auto& b : sc.branches) total_mass += b.mass;
  if (sc.branches.empty() || total_mass <= 0) throw ScenarioInvalidError("flow: no branches");

  InterpolationResult res;
  res.M = sc.M;
  res.p = sc.p;
  res.S = S;
  res.t0 = sc.t0;
  res.anchor = anchor;
  res.glued = sc.glue_endpoints;

  for (size_t bi = 0; bi < sc.branches.size(); ++bi) {
    const auto& br = sc.branches[bi];
    ParticleMeasure mu = discretize(M, br.par, sc.p, sc.particles_per_branch);
    double mass_frac = br.mass / total_mass;

    for (auto& q : mu.parts) {
      Vec v = riemannian_gradient(M, br.phi, q.pos);
      Mat H = covariant_hessian(M, br.phi, q.pos);

      GeodesicPath path;
      JacobiFrame jf;
      try {
        path = geodesic_anchored(M, q.pos, v, anchor, S);
        jf = propagate(M, path, q.frame, H * q.frame);
      } catch (const DegenerateFrameError& e) {
        throw ScenarioInvalidError(std::string("flow: transport frame degenerated: ") + e.what());
      }
      AdaptedFrame af = adapted_frame(jf);
      TransportOperators ops = operators(jf, af);

      ParticleTrack tr;
      tr.branch = static_cast<int>(bi);
      tr.weight = q.weight * mass_frac;
      tr.speed = path.speed;
      tr.selfadjoint_initial = jf.selfadjoint_initial;
      tr.max_condition = ops.max_condition;
      tr.perp2 = ops.perp_norm2;

      tr.pos.resize(S);
      tr.frame.resize(S);
      tr.jac.resize(S);
      tr.trU.resize(S);
      tr.sad.resize(S);
      for (int k = 0; k < S; ++k) {
        int j = 2 * k;
        tr.pos[k] = path.pos[j];
        tr.frame[k] = jf.frame.E[j] * af.E[j];
        tr.jac[k] = std::exp(logdet(jf, j));
        tr.trU[k] = ops.trU[j];
        tr.sad[k] = selfadjoint_defect(ops, j);
      }
      // Anchor Jacobian is 1 by construction (orthonormal initial block);
      // the branch density scales with its share of the total mass.
      tr.rho_anchor = q.rho * mass_frac;

      for (int k = 1; k + 1 < S; ++k)
        tr.riccati_max = std::max(tr.riccati_max,
                                  std::abs(riccati_residual(M, jf, af, ops, k)));
      tr.ode_residual = jacobi_ode_residual(M, jf);

      tr.rho0 = tr.rho_anchor / tr.jac[0];
      tr.rho1 = tr.rho_anchor / tr.jac[S - 1];
      res.tracks.push_back(std::move(tr));
    }
  }

  // Shared endpoints: coincident particles across branches carry the sum of
  // the branch densities there.
  if (sc.glue_endpoints) {
    for (int end = 0; end < 2; ++end) {
      int k = end == 0 ? 0 : S - 1;
      const size_t n = res.tracks.size();
      std::vector<double> glued(n);
      for (size_t i = 0; i < n; ++i) glued[i] = end == 0 ? res.tracks[i].rho0 : res.tracks[i].rho1;
      std::vector<double> total_at(n);
      for (size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (size_t j = 0; j < n; ++j) {
          double d = M.distance(M.wrap(res.tracks[i].pos[k]), M.wrap(res.tracks[j].pos[k]));
          if (d < 1e-8) acc += glued[j];
        }
        total_at[i] = acc;
      }
      for (size_t i = 0; i < n; ++i) {
        if (end == 0)
          res.tracks[i].rho0 = total_at[i];
        else
          res.tracks[i].rho1 = total_at[i];
      }
    }
  }
  return res;
}

ParticleMeasure density_along(const InterpolationResult& res, double t) {
  int k = res.grid_index(t);
  for (const auto& tr : res.tracks)
    if (!(tr.jac[k] > 0)) throw DegenerateFrameError("density_along: nonpositive Jacobian", t);
  return res.measure_at(k);
}

namespace {

// O(n^3) assignment on a dense cost matrix (shortest augmenting paths with
// potentials). Deterministic; ties resolved by scan order.
std::vector<int> solve_assignment(const Mat& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> match(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) match[p[j] - 1] = j - 1;
  return match;
}

}  // namespace

TransportPlanDiscrete exact_assignment(const ChartManifold& M, const ParticleMeasure& a,
                                       const ParticleMeasure& b) {
  const int n = static_cast<int>(a.parts.size());
  if (n != static_cast<int>(b.parts.size()))
    throw UnsupportedInstanceError("exact_assignment: unequal particle counts");
  if (n > 512) throw UnsupportedInstanceError("exact_assignment: instance too large");
  for (const auto& q : a.parts)
    if (std::abs(q.weight - 1.0 / n) > 1e-9)
      throw UnsupportedInstanceError("exact_assignment: weights must be uniform");
  for (const auto& q : b.parts)
    if (std::abs(q.weight - 1.0 / n) > 1e-9)
      throw UnsupportedInstanceError("exact_assignment: weights must be uniform");

  Mat cost(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double d = M.distance(a.parts[i].pos, b.parts[j].pos);
      cost(i, j) = d * d;
    }
  TransportPlanDiscrete plan;
  plan.assignment = solve_assignment(cost);
  for (int i = 0; i < n; ++i) plan.cost += cost(i, plan.assignment[i]) / n;
  return plan;
}

OptimalityReport validate_optimality(const InterpolationResult& res, double tol) {
  const ChartManifold& M = *res.M;
  ParticleMeasure mu0 = res.measure_at(0);
  ParticleMeasure mu1 = res.measure_at(res.S - 1);
  TransportPlanDiscrete plan = exact_assignment(M, mu0, mu1);

  double scen = 0.0;
  for (const auto& tr : res.tracks) {
    double d = M.distance(M.wrap(tr.pos[0]), M.wrap(tr.pos[res.S - 1]));
    scen += tr.weight * d * d;
  }
  OptimalityReport rep;
  rep.scenario_cost = scen;
  rep.oracle_cost = plan.cost;
  if (plan.cost < 1e-14) {
    rep.gap = scen - plan.cost;
    rep.pass = rep.gap <= tol;
  } else {
    rep.gap = (scen - plan.cost) / plan.cost;
    rep.pass = rep.gap <= tol;
  }
  return rep;
}

double w2_between(const InterpolationResult& res, int ka, int kb) {
  TransportPlanDiscrete plan =
      exact_assignment(*res.M, res.measure_at(ka), res.measure_at(kb));
  return std::sqrt(std::max(0.0, plan.cost));
}

namespace {

// Chart-coordinate separation (wrap-aware) for custom metrics, where no
// closed-form distance exists; collisions are what the check is after and
// those are chart-metric agnostic.
double separation(const ChartManifold& M, const Vec& a, const Vec& b) {
  if (M.has_model_forms()) return M.distance(a, b);
  Vec d = a - b;
  for (int i = 0; i < d.size(); ++i)
    if (M.domain().periodic[i]) d[i] = std::remainder(d[i], M.domain().period[i]);
  return d.norm();
}

}  // namespace

MongeMatherStats monge_mather_stats(const InterpolationResult& res, int time_stride) {
  const ChartManifold& M = *res.M;
  const size_t n = res.tracks.size();
  MongeMatherStats st;
  st.min_interior_ratio = std::numeric_limits<double>::infinity();
  st.max_ratio = 0.0;
  if (time_stride < 1) time_stride = 1;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      double d_anchor = separation(M, M.wrap(res.tracks[i].pos[res.anchor]),
                                   M.wrap(res.tracks[j].pos[res.anchor]));
      if (d_anchor < 1e-12) {
        st.min_interior_ratio = 0.0;
        continue;
      }
      for (int k = 0; k < res.S; k += time_stride) {
        double d = separation(M, M.wrap(res.tracks[i].pos[k]), M.wrap(res.tracks[j].pos[k]));
        double ratio = d / d_anchor;
        st.max_ratio = std::max(st.max_ratio, ratio);
        if (k != 0 && k != res.S - 1)
          st.min_interior_ratio = std::min(st.min_interior_ratio, ratio);
      }
    }
  return st;
}

}  // namespace curvot
