#include "curvot/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace curvot {

namespace {

constexpr double kPi = 3.14159265358979323846;

double parse_double(const std::string& s, int line) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (...) {
    throw ConfigError("expected a number, got '" + s + "'", line);
  }
}

int parse_int(const std::string& s, int line) {
  double v = parse_double(s, line);
  int i = static_cast<int>(std::lround(v));
  if (std::abs(v - i) > 1e-12) throw ConfigError("expected an integer, got '" + s + "'", line);
  return i;
}

bool parse_bool(const std::string& s, int line) {
  if (s == "1" || s == "true" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "no") return false;
  throw ConfigError("expected a boolean, got '" + s + "'", line);
}

std::vector<double> parse_numbers(const std::string& s, int line) {
  std::istringstream in(s);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(parse_double(tok, line));
  return out;
}

Vec to_vec(const std::vector<double>& v) {
  Vec x(static_cast<int>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) x[static_cast<int>(i)] = v[i];
  return x;
}

// Ordered multimap view of a section with consumption tracking, so unknown
// keys can be rejected.
struct SectionView {
  const RawSection* sec = nullptr;
  std::vector<bool> used;

  explicit SectionView(const RawSection* s) : sec(s) {
    if (s) used.assign(s->entries.size(), false);
  }
  bool present() const { return sec != nullptr; }
  std::optional<std::string> get(const std::string& key) {
    if (!sec) return std::nullopt;
    for (size_t i = 0; i < sec->entries.size(); ++i)
      if (sec->entries[i].first == key) {
        used[i] = true;
        return sec->entries[i].second;
      }
    return std::nullopt;
  }
  std::vector<std::string> get_all(const std::string& key) {
    std::vector<std::string> out;
    if (!sec) return out;
    for (size_t i = 0; i < sec->entries.size(); ++i)
      if (sec->entries[i].first == key) {
        used[i] = true;
        out.push_back(sec->entries[i].second);
      }
    return out;
  }
  void reject_unknown() const {
    if (!sec) return;
    for (size_t i = 0; i < sec->entries.size(); ++i)
      if (!used[i])
        throw ConfigError("unknown key '" + sec->entries[i].first + "' in section [" + sec->name +
                              "]",
                          sec->line);
  }
};

// --- closed-form term tables (potentials and custom metric entries) --------

struct TermSpec {
  enum Kind { Const, Lin, Quad, Sin, Cos } kind = Const;
  int i = 0, j = 0;  // zero-based coordinate indices
  double c = 0.0, a = 1.0, b = 0.0;
};

double term_value(const TermSpec& t, const Vec& x) {
  switch (t.kind) {
    case TermSpec::Const: return t.c;
    case TermSpec::Lin: return t.c * x[t.i];
    case TermSpec::Quad: return t.c * x[t.i] * x[t.j];
    case TermSpec::Sin: return t.c * std::sin(t.a * x[t.i] + t.b);
    case TermSpec::Cos: return t.c * std::cos(t.a * x[t.i] + t.b);
  }
  return 0.0;
}

double term_d1(const TermSpec& t, const Vec& x, int m) {
  switch (t.kind) {
    case TermSpec::Const: return 0.0;
    case TermSpec::Lin: return m == t.i ? t.c : 0.0;
    case TermSpec::Quad: {
      double v = 0.0;
      if (m == t.i) v += t.c * x[t.j];
      if (m == t.j) v += t.c * x[t.i];
      return v;
    }
    case TermSpec::Sin: return m == t.i ? t.c * t.a * std::cos(t.a * x[t.i] + t.b) : 0.0;
    case TermSpec::Cos: return m == t.i ? -t.c * t.a * std::sin(t.a * x[t.i] + t.b) : 0.0;
  }
  return 0.0;
}

double term_d2(const TermSpec& t, const Vec& x, int m, int l) {
  switch (t.kind) {
    case TermSpec::Const:
    case TermSpec::Lin: return 0.0;
    case TermSpec::Quad:
      return ((m == t.i && l == t.j) ? t.c : 0.0) + ((m == t.j && l == t.i) ? t.c : 0.0);
    case TermSpec::Sin:
      return (m == t.i && l == t.i) ? -t.c * t.a * t.a * std::sin(t.a * x[t.i] + t.b) : 0.0;
    case TermSpec::Cos:
      return (m == t.i && l == t.i) ? -t.c * t.a * t.a * std::cos(t.a * x[t.i] + t.b) : 0.0;
  }
  return 0.0;
}

TermSpec parse_term(const std::string& text, int dim, int line) {
  std::istringstream in(text);
  std::string kind;
  in >> kind;
  TermSpec t;
  auto idx = [&](int v) {
    if (v < 1 || v > dim) throw ConfigError("coordinate index out of range in term", line);
    return v - 1;
  };
  if (kind == "const") {
    t.kind = TermSpec::Const;
    in >> t.c;
  } else if (kind == "lin") {
    t.kind = TermSpec::Lin;
    int i;
    in >> i >> t.c;
    t.i = idx(i);
  } else if (kind == "quad") {
    t.kind = TermSpec::Quad;
    int i, j;
    in >> i >> j >> t.c;
    t.i = idx(i);
    t.j = idx(j);
  } else if (kind == "sin" || kind == "cos") {
    t.kind = kind == "sin" ? TermSpec::Sin : TermSpec::Cos;
    int i;
    in >> i >> t.c >> t.a >> t.b;
    t.i = idx(i);
  } else {
    throw ConfigError("unknown term kind '" + kind + "'", line);
  }
  if (in.fail()) throw ConfigError("malformed term '" + text + "'", line);
  return t;
}

Potential make_potential(std::vector<TermSpec> terms) {
  Potential phi;
  phi.value = [terms](const Vec& x) {
    double acc = 0.0;
    for (const auto& t : terms) acc += term_value(t, x);
    return acc;
  };
  phi.grad = [terms](const Vec& x) {
    Vec g = Vec::Zero(x.size());
    for (int m = 0; m < x.size(); ++m)
      for (const auto& t : terms) g[m] += term_d1(t, x, m);
    return g;
  };
  phi.hess = [terms](const Vec& x) {
    Mat H = Mat::Zero(x.size(), x.size());
    for (int m = 0; m < x.size(); ++m)
      for (int l = 0; l < x.size(); ++l)
        for (const auto& t : terms) H(m, l) += term_d2(t, x, m, l);
    return H;
  };
  return phi;
}

// --- parametrization presets ------------------------------------------------

Parametrization make_segment(const Vec& from, const Vec& to) {
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

Parametrization make_patch(const Vec& origin, const Vec& e1, const Vec& e2) {
  Parametrization par;
  par.p = 2;
  par.map = [origin, e1, e2](const Vec& u) { return origin + u[0] * e1 + u[1] * e2; };
  par.tangent = [origin, e1, e2](const Vec&) {
    Mat D(origin.size(), 2);
    D.col(0) = e1;
    D.col(1) = e2;
    return D;
  };
  return par;
}

Parametrization make_circle(const Vec& center, double radius, double a0, double a1) {
  Parametrization par;
  par.p = 1;
  par.map = [=](const Vec& u) {
    double a = a0 + (a1 - a0) * u[0];
    Vec x = center;
    x[0] += radius * std::cos(a);
    x[1] += radius * std::sin(a);
    return x;
  };
  par.tangent = [=](const Vec& u) {
    double a = a0 + (a1 - a0) * u[0];
    Mat D(center.size(), 1);
    D.setZero();
    D(0, 0) = -radius * std::sin(a) * (a1 - a0);
    D(1, 0) = radius * std::cos(a) * (a1 - a0);
    return D;
  };
  return par;
}

Parametrization make_latitude(double theta, double phi0, double phi1) {
  Parametrization par;
  par.p = 1;
  par.map = [=](const Vec& u) {
    Vec x(2);
    x << theta, phi0 + (phi1 - phi0) * u[0];
    return x;
  };
  par.tangent = [=](const Vec&) {
    Mat D(2, 1);
    D << 0.0, phi1 - phi0;
    return D;
  };
  return par;
}

Parametrization make_meridian(double phi, double th0, double th1) {
  Parametrization par;
  par.p = 1;
  par.map = [=](const Vec& u) {
    Vec x(2);
    x << th0 + (th1 - th0) * u[0], phi;
    return x;
  };
  par.tangent = [=](const Vec&) {
    Mat D(2, 1);
    D << th1 - th0, 0.0;
    return D;
  };
  return par;
}

// Equal-area patch on the unit 2-sphere: theta = acos(z0 + dz u2).
Parametrization make_sphere_patch(double z0, double z1, double phi0, double phi1) {
  Parametrization par;
  par.p = 2;
  par.map = [=](const Vec& u) {
    Vec x(2);
    double z = z0 + (z1 - z0) * u[1];
    x << std::acos(z), phi0 + (phi1 - phi0) * u[0];
    return x;
  };
  par.tangent = [=](const Vec& u) {
    double z = z0 + (z1 - z0) * u[1];
    Mat D(2, 2);
    D.setZero();
    D(1, 0) = phi1 - phi0;
    D(0, 1) = -(z1 - z0) / std::sqrt(std::max(1e-15, 1.0 - z * z));
    return D;
  };
  return par;
}

// Radial segment in the conformal ball, uniform in hyperbolic arclength.
Parametrization make_radial(const Vec& dir, double s0, double s1) {
  Vec d = dir / dir.norm();
  Parametrization par;
  par.p = 1;
  par.map = [=](const Vec& u) {
    double s = s0 + (s1 - s0) * u[0];
    return Vec(std::tanh(s / 2.0) * d);
  };
  par.tangent = [=](const Vec& u) {
    double s = s0 + (s1 - s0) * u[0];
    double c = std::cosh(s / 2.0);
    Mat D(d.size(), 1);
    D.col(0) = (s1 - s0) / (2.0 * c * c) * d;
    return D;
  };
  return par;
}

Parametrization build_parametrization(SectionView& sv, int dim, int line) {
  auto type = sv.get("type");
  if (!type) throw ConfigError("submanifold section needs a type", line);
  auto need = [&](const char* key) {
    auto v = sv.get(key);
    if (!v) throw ConfigError(std::string("submanifold type '") + *type + "' needs key '" + key +
                                  "'",
                              line);
    return parse_numbers(*v, line);
  };
  if (*type == "segment") {
    Vec from = to_vec(need("from")), to = to_vec(need("to"));
    if (from.size() != dim || to.size() != dim)
      throw ConfigError("segment endpoints must have chart dimension", line);
    return make_segment(from, to);
  }
  if (*type == "patch") {
    Vec o = to_vec(need("origin")), e1 = to_vec(need("edge1")), e2 = to_vec(need("edge2"));
    return make_patch(o, e1, e2);
  }
  if (*type == "circle") {
    Vec c = to_vec(need("center"));
    double r = need("radius")[0];
    auto arc = need("arc");
    if (arc.size() != 2) throw ConfigError("circle arc needs two angles", line);
    return make_circle(c, r, arc[0], arc[1]);
  }
  if (*type == "latitude") {
    double th = need("theta")[0];
    auto phi = need("phi");
    if (phi.size() != 2) throw ConfigError("latitude phi needs a range", line);
    return make_latitude(th, phi[0], phi[1]);
  }
  if (*type == "meridian") {
    double ph = need("phi")[0];
    auto th = need("theta");
    if (th.size() != 2) throw ConfigError("meridian theta needs a range", line);
    return make_meridian(ph, th[0], th[1]);
  }
  if (*type == "sphere_patch") {
    auto z = need("z");
    auto phi = need("phi");
    if (z.size() != 2 || phi.size() != 2)
      throw ConfigError("sphere_patch needs z and phi ranges", line);
    return make_sphere_patch(z[0], z[1], phi[0], phi[1]);
  }
  if (*type == "radial") {
    Vec d = to_vec(need("direction"));
    auto r = need("range");
    if (r.size() != 2) throw ConfigError("radial needs an arclength range", line);
    return make_radial(d, r[0], r[1]);
  }
  throw ConfigError("unknown submanifold type '" + *type + "'", line);
}

std::shared_ptr<ChartManifold> build_manifold(SectionView& sv, int line) {
  auto model = sv.get("model");
  if (!model) throw ConfigError("manifold section needs a model", line);
  if (*model == "euclidean") {
    int n = parse_int(sv.get("dim").value_or("2"), line);
    return std::make_shared<ChartManifold>(ChartManifold::euclidean(n));
  }
  if (*model == "sphere") {
    int n = parse_int(sv.get("dim").value_or("2"), line);
    double r = parse_double(sv.get("radius").value_or("1"), line);
    return std::make_shared<ChartManifold>(ChartManifold::sphere(n, r));
  }
  if (*model == "hyperbolic") {
    int n = parse_int(sv.get("dim").value_or("2"), line);
    return std::make_shared<ChartManifold>(ChartManifold::hyperbolic(n));
  }
  if (*model == "cylinder") {
    (void)sv.get("dim");
    return std::make_shared<ChartManifold>(ChartManifold::cylinder());
  }
  if (*model == "custom") {
    int n = parse_int(sv.get("dim").value_or("2"), line);
    struct Entry {
      int i, j;
      TermSpec t;
    };
    std::vector<Entry> entries;
    for (const std::string& g : sv.get_all("gterm")) {
      std::istringstream in(g);
      int i, j;
      in >> i >> j;
      if (in.fail() || i < 1 || j < 1 || i > n || j > n)
        throw ConfigError("gterm needs leading indices i j", line);
      std::string rest;
      std::getline(in, rest);
      entries.push_back({i - 1, j - 1, parse_term(rest, n, line)});
    }
    if (entries.empty()) throw ConfigError("custom metric needs gterm entries", line);
    MetricFn fn = [entries, n](const Vec& x) {
      Mat g = Mat::Zero(n, n);
      for (const auto& e : entries) {
        double v = term_value(e.t, x);
        g(e.i, e.j) += v;
        if (e.i != e.j) g(e.j, e.i) += v;
      }
      return g;
    };
    ChartDomain dom;
    dom.lo = Vec::Constant(n, -std::numeric_limits<double>::infinity());
    dom.hi = Vec::Constant(n, std::numeric_limits<double>::infinity());
    dom.periodic.assign(n, false);
    dom.period.assign(n, 0.0);
    if (auto lo = sv.get("lo")) dom.lo = to_vec(parse_numbers(*lo, line));
    if (auto hi = sv.get("hi")) dom.hi = to_vec(parse_numbers(*hi, line));
    if (auto per = sv.get("periodic")) {
      for (double v : parse_numbers(*per, line)) {
        int i = static_cast<int>(v) - 1;
        if (i < 0 || i >= n) throw ConfigError("periodic index out of range", line);
        dom.periodic[i] = true;
        dom.period[i] = 2 * kPi;
      }
    }
    return std::make_shared<ChartManifold>(ChartManifold::custom(n, fn, dom));
  }
  throw ConfigError("unknown manifold model '" + *model + "'", line);
}

CheckSpec build_check(SectionView& sv, int line) {
  CheckSpec c;
  auto kind = sv.get("kind");
  if (!kind) throw ConfigError("check section needs a kind", line);
  c.kind = *kind;
  static const std::set<std::string> kinds = {"lower-renyi", "lower-entropy", "upper",
                                              "brunn-minkowski", "sectional-form"};
  if (!kinds.count(c.kind)) throw ConfigError("unknown check kind '" + c.kind + "'", line);
  if (auto v = sv.get("K")) c.K = parse_double(*v, line);
  if (auto v = sv.get("p")) c.p = parse_int(*v, line);
  if (auto v = sv.get("pprime")) c.pprime = parse_double(*v, line);
  if (auto v = sv.get("t0")) c.t0 = parse_double(*v, line);
  if (auto v = sv.get("t1")) c.t1 = parse_double(*v, line);
  if (auto v = sv.get("times")) c.times = parse_int(*v, line);
  if (auto v = sv.get("tol")) c.tol = parse_double(*v, line);
  if (auto v = sv.get("expect_fail")) c.expect_fail = parse_bool(*v, line);
  if (auto v = sv.get("force_kappa_zero")) c.force_kappa_zero = parse_bool(*v, line);
  return c;
}

}  // namespace

ScenarioSpec build_scenario(const RawConfig& cfg) {
  ScenarioSpec spec;
  spec.id = cfg.id;
  for (const auto& [k, v] : cfg.top) {
    if (k == "seed")
      spec.seed = static_cast<unsigned>(parse_int(v, 0));
    else
      throw ConfigError("unknown top-level key '" + k + "'");
  }

  std::map<std::string, const RawSection*> by_name;
  std::vector<std::string> check_names;
  std::set<int> branch_ids;
  for (const auto& sec : cfg.sections) {
    if (by_name.count(sec.name)) throw ConfigError("duplicate section [" + sec.name + "]", sec.line);
    by_name[sec.name] = &sec;
    if (sec.name.rfind("check.", 0) == 0) check_names.push_back(sec.name);
    if (sec.name.rfind("branch.", 0) == 0) {
      std::string rest = sec.name.substr(7);
      size_t dot = rest.find('.');
      branch_ids.insert(std::atoi(rest.substr(0, dot).c_str()));
    }
  }

  auto view = [&](const std::string& name) {
    auto it = by_name.find(name);
    return SectionView(it == by_name.end() ? nullptr : it->second);
  };

  std::set<std::string> known;
  auto mark_known = [&](const std::string& n) { known.insert(n); };

  SectionView man = view("manifold");
  mark_known("manifold");
  if (!man.present()) throw ConfigError("missing [manifold] section");
  spec.manifold = build_manifold(man, man.sec->line);
  man.reject_unknown();
  const int dim = spec.manifold->dim();

  spec.scenario.M = spec.manifold.get();

  auto build_branch = [&](const std::string& sub_name, const std::string& pot_name,
                          double mass) {
    SectionView sub = view(sub_name);
    mark_known(sub_name);
    if (!sub.present()) throw ConfigError("missing [" + sub_name + "] section");
    int p = parse_int(sub.get("p").value_or("1"), sub.sec->line);
    ScenarioBranch br;
    br.par = build_parametrization(sub, dim, sub.sec->line);
    if (br.par.p != p)
      throw ConfigError("submanifold type dimension disagrees with p", sub.sec->line);
    sub.reject_unknown();

    SectionView pot = view(pot_name);
    mark_known(pot_name);
    std::vector<TermSpec> terms;
    if (pot.present()) {
      for (const std::string& t : pot.get_all("term"))
        terms.push_back(parse_term(t, dim, pot.sec->line));
      pot.reject_unknown();
    }
    br.phi = make_potential(std::move(terms));
    br.mass = mass;
    return br;
  };

  if (branch_ids.empty()) {
    spec.scenario.branches.push_back(build_branch("submanifold", "potential", 1.0));
  } else {
    for (int bid : branch_ids) {
      std::string base = "branch." + std::to_string(bid);
      SectionView bsec = view(base);
      mark_known(base);
      double mass = 1.0;
      if (bsec.present()) {
        if (auto w = bsec.get("weight")) mass = parse_double(*w, bsec.sec->line);
        bsec.reject_unknown();
      }
      spec.scenario.branches.push_back(
          build_branch(base + ".submanifold", base + ".potential", mass));
    }
  }
  spec.scenario.p = spec.scenario.branches.front().par.p;
  for (const auto& b : spec.scenario.branches)
    if (b.par.p != spec.scenario.p) throw ConfigError("all branches must share p");

  SectionView disc = view("discretization");
  mark_known("discretization");
  if (!disc.present()) throw ConfigError("missing [discretization] section");
  spec.scenario.particles_per_branch = parse_int(disc.get("particles").value_or("64"), 0);
  spec.scenario.grid = parse_int(disc.get("grid").value_or("1001"), 0);
  spec.scenario.t0 = parse_double(disc.get("anchor").value_or("0.5"), 0);
  if (auto g = disc.get("glue_endpoints")) spec.scenario.glue_endpoints = parse_bool(*g, 0);
  disc.reject_unknown();

  SectionView qual = view("quality");
  mark_known("quality");
  if (qual.present()) {
    if (auto v = qual.get("riccati_tol")) spec.quality.riccati_tol = parse_double(*v, 0);
    if (auto v = qual.get("ode_tol")) spec.quality.ode_tol = parse_double(*v, 0);
    if (auto v = qual.get("selfadjoint_tol")) spec.quality.selfadjoint_tol = parse_double(*v, 0);
    if (auto v = qual.get("optimality_tol")) spec.quality.optimality_tol = parse_double(*v, 0);
    if (auto v = qual.get("mm_min_ratio")) spec.quality.mm_min_ratio = parse_double(*v, 0);
    if (auto v = qual.get("certify")) spec.quality.certify = parse_bool(*v, 0);
    qual.reject_unknown();
  }

  std::sort(check_names.begin(), check_names.end());
  for (const std::string& cn : check_names) {
    SectionView cv = view(cn);
    mark_known(cn);
    spec.checks.push_back(build_check(cv, cv.sec->line));
    cv.reject_unknown();
  }

  for (const auto& sec : cfg.sections)
    if (!known.count(sec.name))
      throw ConfigError("unknown section [" + sec.name + "]", sec.line);
  return spec;
}

// ---------------------------------------------------------------------------

namespace {

std::string fmt_num(double v) {
  char buf[40];
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

InequalityReport quality_row(const std::string& id, const std::string& name, double measured,
                             double bound, bool pass_is_leq) {
  InequalityReport rep;
  rep.scenario = id;
  rep.inequality = name;
  rep.t = 0.0;
  rep.lhs = measured;
  rep.rhs = bound;
  rep.slack = pass_is_leq ? bound - measured : measured - bound;
  rep.tol = 0.0;
  rep.pass = rep.slack >= 0.0;
  return rep;
}

}  // namespace

RunOutcome run_scenario(const ScenarioSpec& spec_in, const Overrides& ov) {
  ScenarioSpec spec = spec_in;
  if (ov.particles) spec.scenario.particles_per_branch = *ov.particles;
  if (ov.grid) spec.scenario.grid = *ov.grid;
  for (auto& c : spec.checks) {
    if (ov.times) c.times = *ov.times;
    if (ov.tol) c.tol = *ov.tol;
    if (ov.K) c.K = *ov.K;
    if (ov.pprime && c.kind != "upper" && c.kind != "lower-entropy") c.pprime = *ov.pprime;
  }

  RunOutcome out;
  out.id = spec.id;
  std::ostringstream sum;
  sum << "scenario " << spec.id << ": N=" << spec.scenario.particles_per_branch
      << " S=" << spec.scenario.grid << " t0=" << spec.scenario.t0 << "\n";

  InterpolationResult res = flow(spec.scenario);

  // Scenario-level quality gates.
  double ric = 0.0, ode = 0.0, sad = 0.0;
  bool any_sad = false;
  for (const auto& tr : res.tracks) {
    ric = std::max(ric, tr.riccati_max);
    ode = std::max(ode, tr.ode_residual);
    if (tr.selfadjoint_initial) {
      any_sad = true;
      for (double v : tr.sad) sad = std::max(sad, v);
    }
  }
  out.reports.push_back(quality_row(spec.id, "riccati-residual", ric, spec.quality.riccati_tol, true));
  out.reports.push_back(quality_row(spec.id, "jacobi-ode-residual", ode, spec.quality.ode_tol, true));
  if (any_sad)
    out.reports.push_back(
        quality_row(spec.id, "selfadjoint-defect", sad, spec.quality.selfadjoint_tol, true));

  MongeMatherStats mm = monge_mather_stats(res, std::max(1, (res.S - 1) / 20));
  out.reports.push_back(
      quality_row(spec.id, "monge-mather", mm.min_interior_ratio, spec.quality.mm_min_ratio, false));

  if (spec.quality.certify) {
    try {
      OptimalityReport opt = validate_optimality(res, spec.quality.optimality_tol);
      out.reports.push_back(
          quality_row(spec.id, "optimality-gap", opt.gap, spec.quality.optimality_tol, true));
    } catch (const UnsupportedInstanceError& e) {
      InequalityReport rep = quality_row(spec.id, "optimality-gap", 0.0, 0.0, true);
      rep.pass = false;
      rep.params = e.what();
      out.reports.push_back(rep);
    }
  }

  for (auto& rep : out.reports)
    if (!rep.pass) out.ok = false;

  // Inequality checks.
  int check_no = 0;
  for (const auto& c : spec.checks) {
    ++check_no;
    CheckOptions opt;
    opt.scenario_id = spec.id;
    opt.tol = c.tol;
    opt.times = uniform_times(c.times);
    opt.force_kappa_zero = c.force_kappa_zero;
    opt.seed = spec.seed;

    std::vector<InequalityReport> reps;
    bool threw = false;
    std::string what;
    try {
      if (c.kind == "lower-renyi")
        reps = check_lower_renyi(res, c.K, c.p, c.pprime, opt);
      else if (c.kind == "lower-entropy")
        reps = check_lower_entropy(res, c.K, c.p, opt);
      else if (c.kind == "upper")
        reps = check_upper(res, c.K, c.t0, c.t1, opt.times, opt, c.expect_fail);
      else if (c.kind == "brunn-minkowski")
        reps = brunn_minkowski(res, c.K, c.p, c.pprime, opt);
      else if (c.kind == "sectional-form")
        reps = check_sectional_forms(res, c.K, c.p, c.pprime, opt);
    } catch (const PreconditionError& e) {
      threw = true;
      what = e.what();
    }

    if (threw) {
      out.ok = false;
      sum << "  check " << check_no << " (" << c.kind << "): precondition failed: " << what
          << "\n";
      InequalityReport rep;
      rep.scenario = spec.id;
      rep.inequality = c.kind;
      rep.pass = false;
      rep.params = std::string("precondition: ") + what;
      out.reports.push_back(rep);
      continue;
    }

    int failed = 0;
    for (const auto& r : reps)
      if (!r.pass) ++failed;
    bool check_ok = c.expect_fail ? failed > 0 : failed == 0;
    if (!check_ok) out.ok = false;

    double min_slack = std::numeric_limits<double>::infinity();
    for (const auto& r : reps)
      if (!r.vacuous) min_slack = std::min(min_slack, r.slack);
    sum << "  check " << check_no << " (" << c.kind << (c.expect_fail ? ", expect-fail" : "")
        << "): " << (check_ok ? "ok" : "UNEXPECTED") << ", " << failed << "/" << reps.size()
        << " rows failed, min slack " << fmt_num(min_slack) << "\n";

    for (auto& r : reps) out.reports.push_back(std::move(r));
  }

  sum << "  quality: riccati " << fmt_num(ric) << ", ode " << fmt_num(ode) << ", mm-ratio "
      << fmt_num(mm.min_interior_ratio) << "\n";
  sum << "  result: " << (out.ok ? "OK" : "FAILED") << "\n";
  out.summary = sum.str();
  return out;
}

std::string reports_csv(const std::vector<InequalityReport>& reports) {
  return reports_csv(reports, "", "");
}

std::string reports_csv(const std::vector<InequalityReport>& reports,
                        const std::string& extra_col, const std::string& extra_val) {
  std::ostringstream os;
  os << "scenario,inequality,t,lhs,rhs,slack,pass,params";
  if (!extra_col.empty()) os << "," << extra_col;
  os << "\n";
  for (const auto& r : reports) {
    os << r.scenario << "," << r.inequality << "," << fmt_num(r.t) << "," << fmt_num(r.lhs) << ","
       << fmt_num(r.rhs) << "," << fmt_num(r.slack) << "," << (r.pass ? 1 : 0) << ",\""
       << r.params << (r.vacuous ? " vacuous" : "") << "\"";
    if (!extra_col.empty()) os << "," << extra_val;
    os << "\n";
  }
  return os.str();
}

}  // namespace curvot
