#include <gvf/invariants.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace gvf {

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

Vec central_difference(const ScalarField& f, const Vec& x, double h) {
  Vec g(x.size());
  Vec xp = x;
  for (int i = 0; i < x.size(); ++i) {
    const double xi = x(i);
    xp(i) = xi + h;
    const double fp = f(xp);
    xp(i) = xi - h;
    const double fm = f(xp);
    xp(i) = xi;
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

CheckResult bounded(std::string name, double worst, double tol, const char* what) {
  CheckResult r;
  r.name = std::move(name);
  r.passed = std::isfinite(worst) && worst <= tol;
  r.detail = std::string(what) + fmt(" = %.3e", worst) + fmt(" (tol %.1e)", tol);
  return r;
}

}  // namespace

std::vector<Vec> sample_points(const Scenario& sc, int count, std::uint64_t seed) {
  if (!sc.random_point) throw InvalidInput("scenario '" + sc.name + "' has no point sampler");
  std::mt19937_64 rng(seed);
  std::vector<Vec> pts;
  pts.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(pts.size()) < count) {
    Vec x = sc.random_point(rng);
    if (!sc.constraints.is_euclidean()) x = retract(sc.constraints, x).x;
    pts.push_back(std::move(x));
  }
  return pts;
}

InvariantStats field_invariants(const Scenario& sc, const std::vector<Vec>& points) {
  InvariantStats st;
  const ConstraintSystem& c = sc.constraints;
  for (const Vec& x : points) {
    const FieldSample fs = evaluate_field(c, sc.surfaces, x);
    const double nb = fs.bot.norm();
    for (const Vec& g : fs.grads)
      st.orthogonality = std::max(st.orthogonality, std::abs(fs.bot.dot(g)) / (nb * g.norm() + 1.0));
    const double nc = fs.chi.norm();
    for (const GradientField& gf : c.grad_f) {
      const Vec g = gf(x);
      st.tangency = std::max(st.tangency, std::abs(fs.chi.dot(g)) / (nc * g.norm() + 1.0));
    }
  }
  return st;
}

double gradient_fd_error(const Scenario& sc, const std::vector<Vec>& points) {
  constexpr double h = 1e-6;
  double worst = 0.0;
  auto check = [&](const ScalarField& f, const GradientField& g, const Vec& x) {
    const Vec a = g(x);
    const Vec d = central_difference(f, x, h);
    worst = std::max(worst, (a - d).norm() / std::max(1.0, a.norm()));
  };
  for (const Vec& x : points) {
    for (int j = 0; j < sc.constraints.constraint_count(); ++j)
      check(sc.constraints.f[j], sc.constraints.grad_f[j], x);
    for (int i = 0; i < sc.surfaces.count(); ++i)
      check(sc.surfaces.phi[i], sc.surfaces.grad_phi[i], x);
  }
  return worst;
}

Vec sphere_closed_form(const Vec& p, double k) {
  const double x = p(0);
  const double y = p(1);
  const double z = p(2);
  return (Vec(3) << 2.0 * y + k * x * z * z, -2.0 * x + k * y * z * z, k * z * (z * z - 1.0))
      .finished();
}

CheckReport run_checks(const Scenario& sc, const CheckOptions& opts) {
  CheckReport rep;
  rep.scenario = sc.name;
  const ConstraintSystem& c = sc.constraints;
  const SurfaceStack& s = sc.surfaces;
  const std::vector<Vec> pts = sample_points(sc, opts.samples, opts.seed);
  const std::vector<Vec> fd_pts(pts.begin(), pts.begin() + std::min<std::ptrdiff_t>(
                                                             opts.fd_samples, pts.size()));

  rep.results.push_back(bounded("gradient_fd", gradient_fd_error(sc, fd_pts), 1e-5,
                                "max relative gradient deviation"));

  const InvariantStats st = field_invariants(sc, pts);
  rep.results.push_back(bounded("orthogonality", st.orthogonality, opts.tol,
                                "max |<bot, grad phi_i>| scaled"));
  rep.results.push_back(bounded("tangency", st.tangency, opts.tol, "max |<chi, grad f_j>| scaled"));

  if (!c.is_euclidean()) {
    std::mt19937_64 rng(opts.seed + 1);
    std::normal_distribution<double> n01(0.0, 1.0);
    std::uniform_real_distribution<double> mag(0.0, 0.05);
    double idem = 0.0;
    double perp = 0.0;
    double retr = 0.0;
    for (const Vec& x : fd_pts) {
      Vec v(x.size());
      for (int i = 0; i < v.size(); ++i) v(i) = n01(rng);
      const Vec w = project_to_tangent(c, x, v);
      idem = std::max(idem, (project_to_tangent(c, x, w) - w).norm() / (1.0 + v.norm()));
      for (const GradientField& g : c.grad_f) {
        const Vec gj = g(x);
        perp = std::max(perp, std::abs(w.dot(gj)) / (w.norm() * gj.norm() + 1.0));
      }
      Vec d(x.size());
      for (int i = 0; i < d.size(); ++i) d(i) = n01(rng);
      d *= mag(rng) / d.norm();
      retr = std::max(retr, retract(c, x + d).residual);
    }
    rep.results.push_back(bounded("projection_idempotent", idem, 1e-12, "max |P(Pv) - Pv|"));
    rep.results.push_back(bounded("projection_normal", perp, opts.tol, "max |<Pv, grad f_j>| scaled"));
    rep.results.push_back(bounded("retraction", retr, 1e-10, "max residual after retraction"));
  }

  {
    SurfaceStack flipped = s;
    flipped.propagation_sign = -s.propagation_sign;
    double worst = 0.0;
    for (const Vec& x : fd_pts) {
      const FieldSample a = evaluate_field(c, s, x);
      const FieldSample b = evaluate_field(c, flipped, x);
      worst = std::max(worst, (a.bot + b.bot).norm() + (a.conv_term - b.conv_term).norm());
    }
    rep.results.push_back(bounded("sign_flip", worst, 0.0, "max |bot + bot'| + |conv - conv'|"));
  }

  {
    double worst = 0.0;
    double non_positive = 0.0;
    int used = 0;
    for (const Vec& x : fd_pts) {
      const FieldSample fs = evaluate_field(c, s, x);
      non_positive = std::max(non_positive, fs.V_dot);
      if (std::abs(fs.V_dot) < 1e-6 * (1.0 + fs.V)) continue;
      const RateComparison rc = lyapunov_rate_fd_check(c, s, x, 1e-6);
      worst = std::max(worst, std::abs(rc.analytic - rc.finite_difference) / std::abs(rc.analytic));
      ++used;
    }
    CheckResult r = bounded("lyapunov_rate_fd", worst, 1e-3, "max relative V_dot deviation");
    r.detail += " over " + std::to_string(used) + " points";
    rep.results.push_back(r);
    rep.results.push_back(bounded("lyapunov_rate_sign", non_positive, 0.0, "max V_dot"));
  }

  const PathSamples path = sc.sample_path();
  if (!path.empty()) {
    double e_worst = 0.0;
    double r_worst = 0.0;
    for (const Vec& p : path) {
      e_worst = std::max(e_worst, path_error(s, p).norm());
      r_worst = std::max(r_worst, residual_norm(c, p));
    }
    rep.results.push_back(bounded("path_sampler_error", e_worst, 1e-9, "max |e| on path samples"));
    rep.results.push_back(bounded("path_sampler_residual", r_worst, 1e-10, "max residual on path samples"));
  }

  if (sc.name == "sphere_circle") {
    double worst = 0.0;
    for (const Vec& x : pts)
      worst = std::max(worst, (field_value(c, s, x) - sphere_closed_form(x, s.gains(0))).cwiseAbs().maxCoeff());
    rep.results.push_back(bounded("sphere_closed_form", worst, 1e-10, "max |chi - closed form|"));
  }
  if (sc.name == "so3_path") {
    double worst = 0.0;
    for (const Vec& x : pts) worst = std::max(worst, orthonormality_residual(x));
    rep.results.push_back(bounded("so3_orthonormality", worst, 1e-10, "max |A^T A - I|"));
  }

  if (opts.census && !sc.scan_grid.axes.empty()) {
    std::vector<SingularPoint> singulars;
    try {
      const SingularCensus census = find_singular_set(c, s, sc.scan_grid, path);
      singulars = census.points;
      CheckResult r;
      r.name = "singular_census";
      r.detail = std::to_string(census.points.size()) + " isolated point(s)";
      if (census.region)
        r.detail += ", region of " + std::to_string(census.region->zero_cells) + " zero cells";
      rep.results.push_back(r);
    } catch (const Error& e) {
      rep.results.push_back({"singular_census", false, false, e.what()});
    }
    rep.assumptions =
        check_assumptions(c, s, singulars, path, sc.grid_points(), sc.assumption_shells);
    const AssumptionReport& a = rep.assumptions;
    CheckResult a1;
    a1.name = "assumption1";
    a1.assumption = true;
    a1.passed = a.assumption1_ok;
    a1.detail = a.singular_count == 0
                    ? std::string("no singular points")
                    : fmt("min distance singular set to path = %.6g", a.min_dist_singular_to_path);
    rep.results.push_back(a1);
    CheckResult a2;
    a2.name = "assumption2";
    a2.assumption = true;
    a2.passed = !a.assumption2_flagged;
    for (const ShellFinding& sh : a.shells) {
      if (!a2.detail.empty()) a2.detail += "; ";
      a2.detail += fmt("kappa %.3g: ", sh.kappa) + fmt("min |e| = %.3e", sh.min_e_norm) +
                   (sh.flagged ? " FLAGGED" : "");
    }
    rep.results.push_back(a2);
  }
  return rep;
}

bool CheckReport::invariants_pass() const {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.assumption || r.passed; });
}

bool CheckReport::assumption_flagged() const {
  return std::any_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.assumption && !r.passed; });
}

int CheckReport::exit_code() const {
  if (!invariants_pass()) return 2;
  return assumption_flagged() ? 3 : 0;
}

nlohmann::json CheckReport::to_json() const {
  nlohmann::json j;
  j["scenario"] = scenario;
  nlohmann::json arr = nlohmann::json::array();
  for (const CheckResult& r : results)
    arr.push_back({{"name", r.name},
                   {"passed", r.passed},
                   {"kind", r.assumption ? "assumption" : "invariant"},
                   {"detail", r.detail}});
  j["results"] = arr;
  j["exit_code"] = exit_code();
  return j;
}

}  // namespace gvf
