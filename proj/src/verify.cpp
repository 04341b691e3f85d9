#include "curvot/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace curvot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_params(std::initializer_list<std::pair<const char*, double>> kv) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, v] : kv) {
    if (!first) os << " ";
    first = false;
    os << k << "=" << v;
  }
  return os.str();
}

// sigma series of the comparison coefficient (K - kappa)/p' for one track,
// forward and reversed, evaluated at every grid time in one sweep each.
struct TrackWeights {
  bool infinite = false;
  std::vector<double> fwd;   // sigma^{(t_k)}
  std::vector<double> back;  // sigma^{(t_k)} for the reversed coefficient
};

TrackWeights sigma_weights(const ParticleTrack& tr, double K, double pprime, int S,
                           bool force_kappa_zero) {
  TrackWeights w;
  KappaFunction coeff = force_kappa_zero
                            ? KappaFunction::constant(K / pprime, tr.speed)
                            : tr.kappa().comparison_coefficient(K, pprime);
  SigmaSeries fwd = sigma_series(coeff, S, 1);
  SigmaSeries back = sigma_series(coeff.reversed(), S, 1);
  if (fwd.infinite || back.infinite) {
    w.infinite = true;
    return w;
  }
  w.fwd = std::move(fwd.values);
  w.back = std::move(back.values);
  return w;
}

struct BoundingBox {
  Vec lo, hi;
};

BoundingBox chart_region(const InterpolationResult& res) {
  const ChartManifold& M = *res.M;
  BoundingBox box;
  box.lo = Vec::Constant(M.dim(), kInf);
  box.hi = Vec::Constant(M.dim(), -kInf);
  for (const auto& tr : res.tracks)
    for (int k = 0; k < res.S; k += std::max(1, res.S / 16)) {
      Vec x = M.wrap(tr.pos[k]);
      box.lo = box.lo.cwiseMin(x);
      box.hi = box.hi.cwiseMax(x);
    }
  Vec span = box.hi - box.lo;
  for (int i = 0; i < M.dim(); ++i) {
    double margin = 0.1 * span[i] + 0.05;
    box.lo[i] -= margin;
    box.hi[i] += margin;
    box.lo[i] = std::max(box.lo[i], M.domain().lo[i] + 0.05);
    box.hi[i] = std::min(box.hi[i], M.domain().hi[i] - 0.05);
    if (!(box.hi[i] > box.lo[i])) {
      box.lo[i] = std::max(M.domain().lo[i] + 0.05, -1.0);
      box.hi[i] = std::min(M.domain().hi[i] - 0.05, 1.0);
    }
  }
  if (std::isfinite(M.domain().max_norm)) {
    double cap = 0.9 * M.domain().max_norm;
    for (int i = 0; i < M.dim(); ++i) {
      double b = cap / std::sqrt(static_cast<double>(M.dim()));
      box.lo[i] = std::max(box.lo[i], -b);
      box.hi[i] = std::min(box.hi[i], b);
    }
  }
  return box;
}

Vec draw_point(const BoundingBox& box, std::mt19937& rng) {
  Vec x(box.lo.size());
  for (int i = 0; i < x.size(); ++i) {
    std::uniform_real_distribution<double> dist(box.lo[i], box.hi[i]);
    x[i] = dist(rng);
  }
  return x;
}

Mat draw_frame(const ChartManifold& M, const Vec& x, int k, std::mt19937& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int attempt = 0; attempt < 32; ++attempt) {
    Mat V(M.dim(), k);
    for (int i = 0; i < V.rows(); ++i)
      for (int j = 0; j < V.cols(); ++j) V(i, j) = gauss(rng);
    try {
      return M.orthonormalize(x, V);
    } catch (const InvalidFrameError&) {
    }
  }
  throw Error("could not draw a random frame");
}

}  // namespace

double renyi_entropy(const ParticleMeasure& mu, double pprime) {
  double acc = 0.0;
  for (const auto& q : mu.parts) acc += q.weight * std::pow(q.rho, -1.0 / pprime);
  return -acc;
}

double shannon_entropy(const ParticleMeasure& mu) {
  double acc = 0.0;
  for (const auto& q : mu.parts) acc += q.weight * std::log(q.rho);
  return acc;
}

double hausdorff_support(const ParticleMeasure& mu) {
  double acc = 0.0;
  for (const auto& q : mu.parts) acc += q.weight / q.rho;
  return acc;
}

std::vector<InequalityReport> check_upper(const InterpolationResult& res, double K, double t0,
                                          double t1, const std::vector<double>& s_grid,
                                          const CheckOptions& opt, bool allow_endpoints) {
  if (res.p != 1) throw PreconditionError("check_upper: requires one-dimensional supports");
  if (K < 0) throw PreconditionError("check_upper: upper bound must be non-negative");
  const double eps = 1e-12;
  bool endpoint = t0 < eps || t0 > 1 - eps || t1 < eps || t1 > 1 - eps;
  if (endpoint && !allow_endpoints)
    throw PreconditionError("check_upper: t0, t1 must be interior times");

  int k0 = res.grid_index(t0), k1 = res.grid_index(t1);
  double width = std::abs(t1 - t0);

  std::vector<InequalityReport> out;
  for (double s : s_grid) {
    double idx = (1.0 - s) * k0 + s * k1;
    int kt = static_cast<int>(std::lround(idx));
    if (std::abs(idx - kt) > 1e-6)
      throw Error("check_upper: intermediate time off the sample grid");

    InequalityReport rep;
    rep.scenario = opt.scenario_id;
    rep.inequality = "upper-sec";
    rep.t = s;
    rep.tol = opt.tol;
    rep.params = fmt_params({{"K", K}, {"t0", t0}, {"t1", t1}});

    rep.lhs = hausdorff_support(res.measure_at(kt));
    double acc = 0.0;
    bool vac = false;
    for (size_t i = 0; i < res.tracks.size(); ++i) {
      const auto& tr = res.tracks[i];
      double theta = tr.speed * width;
      DistortionValue sb = sigma_const(K, 1.0 - s, theta);
      DistortionValue sf = sigma_const(K, s, theta);
      if (sb.infinite || sf.infinite) {
        vac = true;
        break;
      }
      acc += tr.weight * (sb.value / res.rho_at(static_cast<int>(i), k0) +
                          sf.value / res.rho_at(static_cast<int>(i), k1));
    }
    if (vac) {
      rep.vacuous = true;
      rep.pass = true;
      rep.rhs = kInf;
      rep.slack = kInf;
    } else {
      rep.rhs = acc;
      rep.slack = rep.rhs - rep.lhs;
      rep.pass = rep.slack >= -opt.tol;
    }
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<InequalityReport> check_lower_renyi(const InterpolationResult& res, double K, int p,
                                                double pprime, const CheckOptions& opt) {
  if (pprime < p) throw PreconditionError("check_lower_renyi: p' must be >= p");
  require_ricci_lower_bound(res, p, K, opt.seed, opt.precondition_draws);

  std::vector<TrackWeights> w(res.tracks.size());
  for (size_t i = 0; i < res.tracks.size(); ++i)
    w[i] = sigma_weights(res.tracks[i], K, pprime, res.S, opt.force_kappa_zero);

  ParticleMeasure mu0 = res.measure_at(0), mu1 = res.measure_at(res.S - 1);

  std::vector<InequalityReport> out;
  for (double t : opt.times) {
    int k = res.grid_index(t);
    InequalityReport rep;
    rep.scenario = opt.scenario_id;
    rep.inequality = "lower-renyi";
    rep.t = t;
    rep.tol = opt.tol;
    rep.params = fmt_params({{"K", K}, {"p", double(p)}, {"pprime", pprime}});

    rep.lhs = renyi_entropy(res.measure_at(k), pprime);
    double acc = 0.0;
    bool vac = false;
    for (size_t i = 0; i < res.tracks.size(); ++i) {
      if (w[i].infinite) {
        vac = true;
        break;
      }
      double sb = w[i].back[res.S - 1 - k];  // sigma^{(1-t)} of the reversed coefficient
      double sf = w[i].fwd[k];
      acc += res.tracks[i].weight * (sb * std::pow(mu0.parts[i].rho, -1.0 / pprime) +
                                     sf * std::pow(mu1.parts[i].rho, -1.0 / pprime));
    }
    if (vac) {
      rep.vacuous = true;
      rep.pass = true;
      rep.rhs = -kInf;
      rep.slack = kInf;
    } else {
      rep.rhs = -acc;
      rep.slack = rep.rhs - rep.lhs;
      rep.pass = rep.slack >= -opt.tol;
    }
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<InequalityReport> check_lower_entropy(const InterpolationResult& res, double K, int p,
                                                  const CheckOptions& opt) {
  require_ricci_lower_bound(res, p, K, opt.seed, opt.precondition_draws);

  ParticleMeasure mu0 = res.measure_at(0), mu1 = res.measure_at(res.S - 1);
  double ent0 = shannon_entropy(mu0), ent1 = shannon_entropy(mu1);

  const int fine = 2 * res.S - 1;
  const double hs = 1.0 / (fine - 1);

  std::vector<InequalityReport> out;
  for (double t : opt.times) {
    int k = res.grid_index(t);
    InequalityReport rep;
    rep.scenario = opt.scenario_id;
    rep.inequality = "lower-entropy";
    rep.t = t;
    rep.tol = opt.tol;
    rep.params = fmt_params({{"K", K}, {"p", double(p)}});

    rep.lhs = shannon_entropy(res.measure_at(k));

    // Green-function quadrature of |v|^2 (K - kappa(s |v|)) over the fine grid.
    double correction = 0.0;
    for (const auto& tr : res.tracks) {
      double th2 = tr.speed * tr.speed;
      double acc = 0.0;
      for (int j = 0; j < fine; ++j) {
        double s = static_cast<double>(j) / (fine - 1);
        double integrand = K * th2 - (opt.force_kappa_zero ? 0.0 : tr.perp2[j]);
        double wgt = (j == 0 || j == fine - 1) ? 0.5 : 1.0;
        acc += wgt * green(s, t) * integrand;
      }
      correction += tr.weight * acc * hs;
    }
    rep.rhs = (1.0 - t) * ent0 + t * ent1 - correction;
    rep.slack = rep.rhs - rep.lhs;
    rep.pass = rep.slack >= -opt.tol;
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<InequalityReport> check_sectional_forms(const InterpolationResult& res, double K,
                                                    int p, double pprime,
                                                    const CheckOptions& opt) {
  require_sectional_lower_bound(res, K, opt.seed, opt.precondition_draws);
  const int n = res.M->dim();
  double Kbar = K >= 0 ? (p - 1) * K : std::min(p, n - 1) * K;

  std::vector<InequalityReport> out = check_lower_renyi(res, Kbar, p, pprime, opt);
  std::vector<InequalityReport> ent = check_lower_entropy(res, Kbar, p, opt);
  out.insert(out.end(), ent.begin(), ent.end());
  for (auto& rep : out) {
    rep.inequality = "sectional-form";
    rep.params += " " + fmt_params({{"Ksec", K}, {"Kbar", Kbar}});
  }
  return out;
}

std::vector<InequalityReport> brunn_minkowski(const InterpolationResult& res, double K, int p,
                                              double pprime, const CheckOptions& opt) {
  if (pprime < p) throw PreconditionError("brunn_minkowski: p' must be >= p");
  require_ricci_lower_bound(res, p, K, opt.seed, opt.precondition_draws);

  std::vector<TrackWeights> w(res.tracks.size());
  for (size_t i = 0; i < res.tracks.size(); ++i)
    w[i] = sigma_weights(res.tracks[i], K, pprime, res.S, opt.force_kappa_zero);

  ParticleMeasure mu0 = res.measure_at(0), mu1 = res.measure_at(res.S - 1);

  std::vector<InequalityReport> out;
  for (double t : opt.times) {
    int k = res.grid_index(t);
    InequalityReport rep;
    rep.scenario = opt.scenario_id;
    rep.inequality = "brunn-minkowski";
    rep.t = t;
    rep.tol = opt.tol;

    ParticleMeasure mut = res.measure_at(k);
    rep.lhs = std::pow(hausdorff_support(mut), 1.0 / pprime);
    double acc = 0.0;
    bool vac = false;
    for (size_t i = 0; i < res.tracks.size(); ++i) {
      if (w[i].infinite) {
        vac = true;
        break;
      }
      acc += res.tracks[i].weight *
             (w[i].back[res.S - 1 - k] * std::pow(mu0.parts[i].rho, -1.0 / pprime) +
              w[i].fwd[k] * std::pow(mu1.parts[i].rho, -1.0 / pprime));
    }
    if (vac) {
      rep.vacuous = true;
      rep.pass = true;
      rep.rhs = kInf;
      rep.slack = kInf;
      rep.params = fmt_params({{"K", K}, {"p", double(p)}, {"pprime", pprime}});
      out.push_back(std::move(rep));
      continue;
    }
    rep.rhs = acc;
    rep.slack = rep.lhs - rep.rhs;
    // Intermediate comparison through the Renyi entropy must hold as well.
    double jensen_mid = -renyi_entropy(mut, pprime);
    bool jensen_ok = (jensen_mid >= rep.rhs - opt.tol) && (rep.lhs >= jensen_mid - opt.tol);
    rep.pass = (rep.slack >= -opt.tol) && jensen_ok;
    rep.params = fmt_params(
        {{"K", K}, {"p", double(p)}, {"pprime", pprime}, {"jensen_ok", double(jensen_ok)}});
    out.push_back(std::move(rep));
  }
  return out;
}

SharpExample sharp_example_oracle(double t) {
  double q = t * t - t + 1.25;
  SharpExample ex;
  ex.H1 = std::sqrt(q);
  ex.kappa = 1.0 / (q * q);
  ex.rho = 1.0 / std::sqrt(q);
  ex.J = std::sqrt(q);
  return ex;
}

void require_ricci_lower_bound(const InterpolationResult& res, int p, double K, unsigned seed,
                               int draws) {
  const ChartManifold& M = *res.M;
  BoundingBox box = chart_region(res);
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int d = 0; d < draws; ++d) {
    Vec x = draw_point(box, rng);
    Mat P = draw_frame(M, x, p, rng);
    Vec w(M.dim());
    for (int i = 0; i < w.size(); ++i) w[i] = gauss(rng);
    double nw = M.norm(x, w);
    if (nw < 1e-12) continue;
    w /= nw;
    double val = M.ricci_p(x, P, w);
    if (val < K - 1e-8) {
      std::ostringstream os;
      os << "ricci_p lower bound violated: sampled " << val << " < " << K;
      throw PreconditionError(os.str());
    }
  }
}

void require_sectional_lower_bound(const InterpolationResult& res, double K, unsigned seed,
                                   int draws) {
  const ChartManifold& M = *res.M;
  if (M.dim() < 2) throw PreconditionError("sectional bound needs dimension >= 2");
  BoundingBox box = chart_region(res);
  std::mt19937 rng(seed);
  for (int d = 0; d < draws; ++d) {
    Vec x = draw_point(box, rng);
    Mat F = draw_frame(M, x, 2, rng);
    double val = M.sectional(x, F.col(0), F.col(1));
    if (val < K - 1e-8) {
      std::ostringstream os;
      os << "sectional lower bound violated: sampled " << val << " < " << K;
      throw PreconditionError(os.str());
    }
  }
}

}  // namespace curvot
