#include "curvot/distortion.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace curvot;

namespace {

constexpr double kPi = 3.14159265358979323846;

double sharp_q(double t) { return t * t - t + 1.25; }

// Effective comparison coefficient of the flat sharp example with K = 0 and
// p' = 1: minus the printed correction profile.
KappaFunction sharp_coeff() {
  return KappaFunction::analytic(
      [](double s) {
        double q = sharp_q(s);
        return -1.0 / (q * q);
      },
      1.0);
}

}  // namespace

TEST_CASE("sin_kappa: constant coefficients match the elementary solutions") {
  KappaFunction zero = KappaFunction::constant(0.0, 2.0);
  KappaFunction one = KappaFunction::constant(1.0, 2.0);
  KappaFunction minus = KappaFunction::constant(-1.0, 2.0);
  for (double s : {0.25, 0.7, 1.3, 2.0}) {
    CHECK(sin_kappa(zero, s) == doctest::Approx(s).epsilon(1e-9));
    CHECK(sin_kappa(one, s) == doctest::Approx(std::sin(s)).epsilon(1e-9));
    CHECK(sin_kappa(minus, s) == doctest::Approx(std::sinh(s)).epsilon(1e-9));
  }
}

TEST_CASE("sin_kappa: halving the step is already converged") {
  KappaFunction k = KappaFunction::analytic([](double s) { return 0.7 - 0.3 * s * s; }, 1.7);
  double coarse = sin_kappa(k, 1.7, 2048);
  double fine = sin_kappa(k, 1.7, 4096);
  CHECK(std::abs(coarse - fine) < 4e-9);
}

TEST_CASE("sigma: endpoint values and the trig blow-up") {
  KappaFunction k = KappaFunction::constant(0.4, 1.1);
  DistortionValue at1 = sigma(k, 1.0, 1.1);
  CHECK_FALSE(at1.infinite);
  CHECK(at1.value == doctest::Approx(1.0));
  DistortionValue at0 = sigma(k, 0.0, 1.1);
  CHECK(at0.value == doctest::Approx(0.0));

  KappaFunction crit = KappaFunction::constant(1.0, kPi);
  CHECK(sigma(crit, 0.5, kPi).infinite);
}

TEST_CASE("sigma: sharp-example coefficient reproduces the closed boundary solution") {
  // f(t) = sqrt(q(t)) solves f'' = q^{-2} f with f(0) = f(1) = sqrt(5)/2; the
  // distortion weights of the coefficient -1/q^2 must rebuild it.
  KappaFunction k = sharp_coeff();
  for (double t : {0.1, 0.25, 0.5, 0.8}) {
    DistortionValue fwd = sigma(k, t, 1.0);
    DistortionValue back = sigma(k.reversed(), 1.0 - t, 1.0);
    REQUIRE_FALSE(fwd.infinite);
    REQUIRE_FALSE(back.infinite);
    double v = (back.value + fwd.value) * std::sqrt(5.0) / 2.0;
    CHECK(v == doctest::Approx(std::sqrt(sharp_q(t))).epsilon(1e-8));
  }
}

TEST_CASE("sigma_const: closed-form table") {
  CHECK(sigma_const(0.0, 0.3, 2.2).value == doctest::Approx(0.3));
  CHECK(sigma_const(1.0, 0.5, kPi / 2).value == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-12));
  CHECK(sigma_const(1.0, 0.2, kPi).infinite);
  CHECK(sigma_const(4.0, 0.2, kPi / 2).infinite);  // K theta^2 = pi^2 exactly
  CHECK(sigma_const(-1.0, 0.5, 2.0).value ==
        doctest::Approx(std::sinh(1.0) / std::sinh(2.0)).epsilon(1e-12));
  // zero speed: limit weight
  CHECK(sigma_const(3.0, 0.4, 0.0).value == doctest::Approx(0.4));
}

TEST_CASE("sigma vs sigma_const over random parameters") {
  std::mt19937 rng(331);
  std::uniform_real_distribution<double> uk(-6.0, 6.0), uth(0.05, 2.8), ut(0.0, 1.0);
  int finite_checked = 0, infinite_checked = 0;
  while (finite_checked < 300) {
    double K = uk(rng), th = uth(rng), t = ut(rng);
    if (K * th * th >= kPi * kPi - 0.1) continue;
    DistortionValue a = sigma(KappaFunction::constant(K, th), t, th);
    DistortionValue b = sigma_const(K, t, th);
    REQUIRE_FALSE(a.infinite);
    REQUIRE_FALSE(b.infinite);
    CHECK(std::abs(a.value - b.value) < 1e-8);
    ++finite_checked;
  }
  while (infinite_checked < 100) {
    double th = uth(rng), t = ut(rng);
    double K = (kPi * kPi + std::abs(uk(rng))) / (th * th);
    CHECK(sigma(KappaFunction::constant(K, th), t, th).infinite);
    CHECK(sigma_const(K, t, th).infinite);
    ++infinite_checked;
  }
}

TEST_CASE("sigma monotonicity in the coefficient") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> uth(0.3, 2.4), uval(-2.0, 2.0), ubump(0.0, 1.0);
  int done = 0;
  while (done < 100) {
    double th = uth(rng);
    double cap = 0.8 * kPi * kPi / (th * th);
    // piecewise-linear coefficients, k1 <= k2, both bounded so sigma is finite
    int knots = 5;
    std::vector<double> k1(knots), k2(knots);
    for (int i = 0; i < knots; ++i) {
      k1[i] = std::min(uval(rng), cap - 0.2);
      k2[i] = std::min(k1[i] + 2.0 * ubump(rng), cap);
    }
    KappaFunction f1 = KappaFunction::sampled(k1, th);
    KappaFunction f2 = KappaFunction::sampled(k2, th);
    SigmaSeries s1 = sigma_series(f1, 21), s2 = sigma_series(f2, 21);
    REQUIRE_FALSE(s2.infinite);
    if (s1.infinite) continue;
    for (int j = 0; j < 21; ++j) CHECK(s1.values[j] <= s2.values[j] + 1e-12);
    ++done;
  }
}

TEST_CASE("sigma strict monotonicity at the midpoint") {
  std::mt19937 rng(123);
  std::uniform_real_distribution<double> uth(0.5, 2.0), uval(-1.5, 1.5);
  for (int trial = 0; trial < 50; ++trial) {
    double th = uth(rng);
    double base = std::min(uval(rng), 0.5 * kPi * kPi / (th * th) - 0.3);
    KappaFunction f1 = KappaFunction::constant(base, th);
    KappaFunction f2 = KappaFunction::constant(base + 0.25, th);
    DistortionValue a = sigma(f1, 0.5, th), b = sigma(f2, 0.5, th);
    REQUIRE_FALSE(a.infinite);
    REQUIRE_FALSE(b.infinite);
    CHECK(b.value - a.value > 0.0);
  }
}

TEST_CASE("green: piecewise values, boundary, symmetry") {
  CHECK(green(0.5, 0.25) == doctest::Approx(0.125));
  CHECK(green(0.3, 0.0) == 0.0);
  CHECK(green(0.3, 1.0) == 0.0);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    double s = u(rng), t = u(rng);
    CHECK(green(s, t) == doctest::Approx(green(t, s)));
  }
}

TEST_CASE("bvp_solution: interpolation, zero data, sharp example") {
  KappaFunction zero = KappaFunction::constant(0.0, 1.3);
  for (double t : {0.0, 0.3, 0.75, 1.0})
    CHECK(bvp_solution(zero, 2.0, 5.0, t).value == doctest::Approx(2.0 + 3.0 * t));

  CHECK(bvp_solution(sharp_coeff(), 0.0, 0.0, 0.37).value == doctest::Approx(0.0));

  // boundary data sqrt(5)/2 rebuilds sqrt(q), in particular value 1 at 1/2
  BvpValue mid = bvp_solution(sharp_coeff(), std::sqrt(5.0) / 2, std::sqrt(5.0) / 2, 0.5);
  REQUIRE_FALSE(mid.unbounded);
  CHECK(mid.value == doctest::Approx(1.0).epsilon(1e-8));

  // plugging back: centered second difference satisfies v'' + kappa v = 0
  KappaFunction k = sharp_coeff();
  double h = 1e-3;
  for (double t : {0.3, 0.5, 0.7}) {
    double vm = bvp_solution(k, 1.0, 2.0, t - h).value;
    double v0 = bvp_solution(k, 1.0, 2.0, t).value;
    double vp = bvp_solution(k, 1.0, 2.0, t + h).value;
    double resid = (vp - 2 * v0 + vm) / (h * h) + k(t * 1.0) * 1.0 * v0;
    CHECK(std::abs(resid) < 1e-6);
  }

  KappaFunction crit = KappaFunction::constant(1.0, kPi);
  CHECK(bvp_solution(crit, 1.0, 1.0, 0.5).unbounded);
}

TEST_CASE("green_solution: linear part and constant load") {
  std::vector<double> zero(101, 0.0);
  CHECK(green_solution(1.0, 4.0, zero, 0.25) == doctest::Approx(1.75));

  std::vector<double> two(2001, 2.0);
  for (double t : {0.2, 0.5, 0.9})
    CHECK(green_solution(0.0, 0.0, two, t) == doctest::Approx(t * (1 - t)).epsilon(1e-6));

  // with a constant load the deviation from the linear part is symmetric
  std::vector<double> c(501, 0.77);
  for (double t : {0.1, 0.3, 0.45}) {
    double a = green_solution(2.0, 3.0, c, t) - (2.0 + t);
    double b = green_solution(2.0, 3.0, c, 1.0 - t) - (2.0 + (1.0 - t));
    CHECK(a == doctest::Approx(b).epsilon(1e-9));
  }
}

TEST_CASE("comparison_holds: margins") {
  KappaFunction k = KappaFunction::constant(0.5, 1.2);
  const int m = 201;
  std::vector<double> v(m), above(m);
  SigmaSeries fwd = sigma_series(k, m), back = sigma_series(k.reversed(), m);
  REQUIRE_FALSE(fwd.infinite);
  for (int j = 0; j < m; ++j) {
    double t = static_cast<double>(j) / (m - 1);
    v[j] = back.values[m - 1 - j] * 1.0 + fwd.values[j] * 1.5;
    above[j] = v[j] + t * (1 - t);
  }
  ComparisonResult same = comparison_holds(v, k, 1e-9);
  CHECK(same.pass);
  CHECK(std::abs(same.margin) < 1e-9);

  ComparisonResult up = comparison_holds(above, k, 1e-9);
  CHECK(up.pass);
  CHECK(up.margin >= 0.0);

  // vacuous when the weights blow up
  std::vector<double> ones(51, 1.0);
  ComparisonResult vac = comparison_holds(ones, KappaFunction::constant(1.0, kPi), 1e-9);
  CHECK(vac.pass);
  CHECK(vac.vacuous);
}

TEST_CASE("kappa function plumbing: sampling, reversal, clamping") {
  std::vector<double> samples = {1.0, 2.0, 4.0};
  KappaFunction k = KappaFunction::sampled(samples, 2.0);
  CHECK(k(0.0) == 1.0);
  CHECK(k(0.5) == doctest::Approx(1.5));
  CHECK(k(2.0) == 4.0);
  CHECK(k(5.0) == 4.0);  // clamped
  KappaFunction r = k.reversed();
  CHECK(r(0.0) == 4.0);
  CHECK(r(2.0) == 1.0);

  KappaFunction c = k.comparison_coefficient(1.0, 2.0);
  CHECK(c(0.0) == doctest::Approx(0.0));
  CHECK(c(2.0) == doctest::Approx(-1.5));
}
