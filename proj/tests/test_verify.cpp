#include "curvot/verify.hpp"

#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"

using namespace curvot;
using namespace curvot::fixtures;

namespace {

double sharp_q(double t) { return t * t - t + 1.25; }

std::vector<double> uniform_times(int times) {
  std::vector<double> t(times);
  for (int j = 0; j < times; ++j) t[j] = static_cast<double>(j) / (times - 1);
  return t;
}

CheckOptions opts(double tol, int times = 11) {
  CheckOptions o;
  o.scenario_id = "test";
  o.tol = tol;
  o.times = uniform_times(times);
  return o;
}

ParticleMeasure uniform_segment_measure(double length, int N, int p = 1) {
  ParticleMeasure mu;
  mu.p = p;
  for (int i = 0; i < N; ++i) {
    Particle q;
    q.pos = v2(length * (i + 0.5) / N, 0.0);
    q.weight = 1.0 / N;
    q.rho = 1.0 / length;
    q.frame = Mat::Identity(2, 1);
    mu.parts.push_back(q);
  }
  return mu;
}

}  // namespace

TEST_CASE("entropies: uniform measures and scaling") {
  ParticleMeasure unit = uniform_segment_measure(1.0, 50);
  CHECK(renyi_entropy(unit, 1.0) == doctest::Approx(-1.0));
  CHECK(renyi_entropy(unit, 3.0) == doctest::Approx(-1.0));
  CHECK(shannon_entropy(unit) == doctest::Approx(0.0));
  CHECK(hausdorff_support(unit) == doctest::Approx(1.0));

  // S_1 = -H^1(supp)
  ParticleMeasure seg = uniform_segment_measure(std::sqrt(5.0) / 2, 64);
  CHECK(renyi_entropy(seg, 1.0) == doctest::Approx(-std::sqrt(5.0) / 2));
  CHECK(shannon_entropy(seg) == doctest::Approx(std::log(2.0 / std::sqrt(5.0))));

  // scaling the support by lambda shifts the entropy by -log lambda
  double lam = 3.7;
  ParticleMeasure scaled = uniform_segment_measure(lam, 64);
  CHECK(shannon_entropy(scaled) - shannon_entropy(uniform_segment_measure(1.0, 64)) ==
        doctest::Approx(-std::log(lam)).epsilon(1e-12));

  // Jensen bound -(H^p)^{1/p'} <= S_{p'}
  for (double pp : {1.0, 2.0, 3.0})
    CHECK(-std::pow(hausdorff_support(seg), 1.0 / pp) <= renyi_entropy(seg, pp) + 1e-12);
}

TEST_CASE("hausdorff_support follows the sharp closed form along the flow") {
  auto f = segments_scenario(64, 501);
  InterpolationResult res = flow(f.sc);
  for (double t : uniform_times(11)) {
    ParticleMeasure mu = density_along(res, t);
    CHECK(hausdorff_support(mu) == doctest::Approx(std::sqrt(sharp_q(t))).epsilon(1e-9));
  }
  CHECK(hausdorff_support(density_along(res, 0.0)) ==
        doctest::Approx(std::sqrt(5.0) / 2).epsilon(1e-9));
  CHECK(hausdorff_support(density_along(res, 0.5)) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("check_upper: segments pass with the linear zero-bound form") {
  auto f = segments_scenario(48, 201);
  InterpolationResult res = flow(f.sc);
  CheckOptions o = opts(1e-6);
  auto reports = check_upper(res, 0.0, 0.25, 0.75, uniform_times(11), o);
  REQUIRE(reports.size() == 11);
  for (const auto& r : reports) {
    CHECK(r.pass);
    // K = 0 reduces the bound to the linear interpolation of the lengths
    double H0 = std::sqrt(sharp_q(0.25)), H1 = std::sqrt(sharp_q(0.75));
    CHECK(r.rhs == doctest::Approx((1 - r.t) * H0 + r.t * H1).epsilon(1e-8));
  }
}

TEST_CASE("check_upper: static equality and endpoint rejection") {
  auto f = static_scenario(16, 201);
  InterpolationResult res = flow(f.sc);
  CheckOptions o = opts(1e-8);
  auto reports = check_upper(res, 0.0, 0.25, 0.75, uniform_times(5), o);
  for (const auto& r : reports) {
    CHECK(r.pass);
    CHECK(std::abs(r.slack) < 1e-8);
  }
  CHECK_THROWS_AS(check_upper(res, 0.0, 0.0, 1.0, uniform_times(5), o), PreconditionError);
  CHECK_THROWS_AS(check_upper(res, -0.5, 0.25, 0.75, uniform_times(5), o), PreconditionError);
}

TEST_CASE("check_upper: cylinder endpoint counterexample and interior pass") {
  auto f = cylinder_scenario(32, 401);
  InterpolationResult res = flow(f.sc);
  CheckOptions o = opts(1e-3);

  auto bad = check_upper(res, 0.0, 0.0, 1.0, uniform_times(11), o, /*allow_endpoints=*/true);
  bool violated = false;
  for (const auto& r : bad) {
    if (std::abs(r.t - 0.5) < 1e-12) {
      CHECK(r.lhs == doctest::Approx(2.0).epsilon(1e-3));
      CHECK(r.rhs == doctest::Approx(1.0).epsilon(1e-3));
      CHECK_FALSE(r.pass);
    }
    if (!r.pass) violated = true;
  }
  CHECK(violated);

  auto good = check_upper(res, 0.0, 0.25, 0.75, uniform_times(11), o);
  for (const auto& r : good) CHECK(r.pass);
}

TEST_CASE("check_lower_renyi: sharp equality on the segments scenario") {
  auto f = segments_scenario(64, 1001);
  InterpolationResult res = flow(f.sc);
  CheckOptions o = opts(1e-6);
  auto reports = check_lower_renyi(res, 0.0, 1, 1.0, o);
  REQUIRE(reports.size() == 11);
  for (const auto& r : reports) {
    CHECK(r.pass);
    CHECK_FALSE(r.vacuous);
    CHECK(std::abs(r.slack) < 1e-6);
    CHECK(r.lhs == doctest::Approx(-std::sqrt(sharp_q(r.t))).epsilon(1e-8));
  }
  // monotonicity in p': larger p' still passes
  for (double pp : {2.0, 3.0}) {
    auto rp = check_lower_renyi(res, 0.0, 1, pp, o);
    for (const auto& r : rp) CHECK(r.pass);
  }
}

TEST_CASE("check_lower_renyi: dropping the correction term breaks the sharp example") {
  auto f = segments_scenario(64, 401);
  InterpolationResult res = flow(f.sc);
  CheckOptions o = opts(1e-6);
  o.force_kappa_zero = true;
  auto reports = check_lower_renyi(res, 0.0, 1, 1.0, o);
  double mid_slack = 0.0;
  int failures = 0;
  for (const auto& r : reports) {
    if (!r.pass) ++failures;
    if (std::abs(r.t - 0.5) < 1e-12) mid_slack = r.slack;
  }
  CHECK(failures >= 9);  // all interior times
  CHECK(mid_slack <= -0.05);
  CHECK(mid_slack == doctest::Approx(1.0 - std::sqrt(5.0) / 2).epsilon(1e-6));
}

TEST_CASE("check_lower_renyi: static scenario equality via the limit weights") {
  auto f = static_scenario(16, 101);
  InterpolationResult res = flow(f.sc);
  auto reports = check_lower_renyi(res, 0.0, 1, 1.0, opts(1e-9));
  for (const auto& r : reports) {
    CHECK(r.pass);
    CHECK(std::abs(r.slack) < 1e-9);
  }
}

TEST_CASE("check_lower_renyi: sphere cap passes, impossible bound is rejected") {
  auto f = sphere_cap_scenario(32, 201);
  InterpolationResult res = flow(f.sc);
  auto reports = check_lower_renyi(res, 0.0, 1, 1.0, opts(1e-6));
  for (const auto& r : reports) {
    CHECK(r.pass);
    CHECK(r.slack >= -1e-9);
  }
  CHECK_THROWS_AS(check_lower_renyi(res, 2.0, 1, 1.0, opts(1e-6)), PreconditionError);
}

TEST_CASE("check_lower_entropy: static equality; segments gap matches its closed form") {
  auto st = static_scenario(16, 101);
  auto rst = check_lower_entropy(flow(st.sc), 0.0, 1, opts(1e-9));
  for (const auto& r : rst) CHECK(std::abs(r.slack) < 1e-9);

  auto f = segments_scenario(64, 401);
  InterpolationResult res = flow(f.sc);
  auto reports = check_lower_entropy(res, 0.0, 1, opts(1e-4));
  // The Shannon form is not tight on the sharp example: the convexity step
  // drops the square of the log-Jacobian derivative, so the slack equals the
  // Green integral of ((2s-1)/(2q))^2. Verify against high-resolution
  // quadrature of that closed form.
  for (const auto& r : reports) {
    CHECK(r.pass);
    const int m = 20001;
    double acc = 0.0;
    for (int j = 0; j < m; ++j) {
      double s = static_cast<double>(j) / (m - 1);
      double q = sharp_q(s);
      double integrand = green(s, r.t) * (2 * s - 1) * (2 * s - 1) / (4 * q * q);
      acc += (j == 0 || j == m - 1 ? 0.5 : 1.0) * integrand;
    }
    acc /= (m - 1);
    CHECK(r.slack == doctest::Approx(acc).epsilon(5e-4));
  }
}

TEST_CASE("check_lower_entropy: sphere patch with the Ricci bound") {
  auto f = sphere_patch_scenario(64, 201);
  InterpolationResult res = flow(f.sc);
  auto reports = check_lower_entropy(res, 1.0, 2, opts(1e-4));
  for (const auto& r : reports) {
    CHECK(r.pass);
    CHECK(r.slack >= -1e-4);
  }
  auto renyi = check_lower_renyi(res, 1.0, 2, 2.0, opts(1e-4));
  for (const auto& r : renyi) CHECK(r.pass);
}

TEST_CASE("check_sectional_forms: effective constants on both branches") {
  auto sp = sphere_patch_scenario(16, 101);
  InterpolationResult res = flow(sp.sc);
  auto reports = check_sectional_forms(res, 1.0, 2, 2.0, opts(1e-4));
  REQUIRE_FALSE(reports.empty());
  for (const auto& r : reports) {
    CHECK(r.inequality == "sectional-form");
    CHECK(r.params.find("Kbar=1") != std::string::npos);
    CHECK(r.pass);
  }

  // hyperbolic 3-space, static 2-dim patch: Kbar = min{p, n-1} K = -2
  auto H = std::make_shared<ChartManifold>(ChartManifold::hyperbolic(3));
  PotentialScenario sc;
  sc.M = H.get();
  sc.p = 2;
  Parametrization par;
  par.p = 2;
  par.map = [](const Vec& u) {
    Vec x(3);
    x << 0.3 * (u[0] - 0.5), 0.3 * (u[1] - 0.5), 0.0;
    return x;
  };
  Potential phi;
  phi.value = [](const Vec&) { return 0.0; };
  phi.grad = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };
  phi.hess = [](const Vec& x) { return Mat(Mat::Zero(x.size(), x.size())); };
  sc.branches.push_back({par, phi, 1.0});
  sc.particles_per_branch = 16;
  sc.grid = 101;
  sc.t0 = 0.5;
  InterpolationResult rh = flow(sc);
  auto hrep = check_sectional_forms(rh, -1.0, 2, 2.0, opts(1e-6));
  for (const auto& r : hrep) {
    CHECK(r.params.find("Kbar=-2") != std::string::npos);
    CHECK(r.pass);
  }

  // flat case: both effective constants collapse to zero
  auto eu = static_scenario(16, 101);
  auto erep = check_sectional_forms(flow(eu.sc), 0.0, 1, 1.0, opts(1e-9));
  for (const auto& r : erep) CHECK(r.params.find("Kbar=0") != std::string::npos);
}

TEST_CASE("brunn_minkowski: sharp equality at the midpoint, cap with positive slack") {
  auto f = segments_scenario(64, 401);
  InterpolationResult res = flow(f.sc);
  auto reports = brunn_minkowski(res, 0.0, 1, 1.0, opts(1e-6));
  for (const auto& r : reports) {
    CHECK(r.pass);
    CHECK(r.params.find("jensen_ok=1") != std::string::npos);
    if (std::abs(r.t - 0.5) < 1e-12) {
      CHECK(r.lhs == doctest::Approx(1.0).epsilon(1e-8));
      CHECK(std::abs(r.slack) < 1e-6);
    }
  }

  auto st = static_scenario(16, 101);
  auto rst = brunn_minkowski(flow(st.sc), 0.0, 1, 1.0, opts(1e-9));
  for (const auto& r : rst) CHECK(std::abs(r.slack) < 1e-9);

  auto cap = sphere_cap_scenario(32, 201);
  auto rc = brunn_minkowski(flow(cap.sc), 0.0, 1, 1.0, opts(1e-6));
  for (const auto& r : rc) {
    CHECK(r.pass);
    if (r.t > 0.05 && r.t < 0.95) CHECK(r.slack > 0.0);
  }
}

TEST_CASE("hyperbolic scenario: nonzero correction profile, sectional dispatch passes") {
  auto f = hyperbolic_scenario(32, 401);
  InterpolationResult res = flow(f.sc);
  // the chart-linear potential bends the segment family out of itself
  double max_kappa = 0.0;
  for (const auto& tr : res.tracks)
    for (double v : tr.perp2) max_kappa = std::max(max_kappa, v);
  CHECK(max_kappa > 1e-6);

  auto reports = check_sectional_forms(res, -1.0, 1, 1.0, opts(1e-5));
  for (const auto& r : reports) {
    CHECK(r.pass);
    CHECK(r.params.find("Kbar=-1") != std::string::npos);
  }
  OptimalityReport opt = validate_optimality(res, 1e-5);
  CHECK(opt.pass);
}

TEST_CASE("sharp_example_oracle: printed values and symmetry") {
  SharpExample mid = sharp_example_oracle(0.5);
  CHECK(mid.H1 == doctest::Approx(1.0));
  CHECK(mid.kappa == doctest::Approx(1.0));
  CHECK(mid.rho == doctest::Approx(1.0));
  CHECK(mid.J == doctest::Approx(1.0));

  SharpExample end = sharp_example_oracle(0.0);
  CHECK(end.H1 == doctest::Approx(std::sqrt(5.0) / 2));
  CHECK(end.kappa == doctest::Approx(0.64));
  CHECK(end.rho == doctest::Approx(2.0 / std::sqrt(5.0)));

  for (double t : {0.1, 0.3, 0.45}) {
    CHECK(sharp_example_oracle(t).kappa == doctest::Approx(sharp_example_oracle(1 - t).kappa));
    CHECK(sharp_example_oracle(t).H1 == doctest::Approx(sharp_example_oracle(1 - t).H1));
  }
}

TEST_CASE("vacuous infinity handling is flagged") {
  // cylinder geodesics have speed pi, so the full-width upper check with
  // K = 1 sits exactly at the trig blow-up K theta^2 = pi^2
  auto f = cylinder_scenario(16, 201);
  InterpolationResult res = flow(f.sc);
  CheckOptions o = opts(1e-6);
  auto reports = check_upper(res, 1.0, 0.0, 1.0, uniform_times(5), o, /*allow_endpoints=*/true);
  bool saw_vacuous = false;
  for (const auto& r : reports)
    if (r.vacuous) {
      saw_vacuous = true;
      CHECK(r.pass);
      CHECK(std::isinf(r.rhs));
    }
  CHECK(saw_vacuous);

  // interior times keep the weights finite and the bound holds
  auto good = check_upper(res, 1.0, 0.25, 0.75, uniform_times(5), o);
  for (const auto& r : good) {
    CHECK_FALSE(r.vacuous);
    CHECK(r.pass);
  }
}
