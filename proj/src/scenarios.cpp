#include <gvf/scenarios.hpp>

#include <cmath>
#include <numbers>
#include <regex>

namespace gvf {

namespace {

constexpr double kPi = std::numbers::pi;

Vec vec2(double a, double b) { return (Vec(2) << a, b).finished(); }
Vec vec3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }

GridSpec box_grid(std::vector<GridAxis> axes) {
  GridSpec g;
  g.axes = std::move(axes);
  return g;
}

std::function<Vec(std::mt19937_64&)> uniform_in_box(std::vector<GridAxis> axes) {
  return [axes](std::mt19937_64& rng) {
    Vec x(static_cast<int>(axes.size()));
    for (std::size_t d = 0; d < axes.size(); ++d) {
      std::uniform_real_distribution<double> u(axes[d].lo, axes[d].hi);
      x(static_cast<int>(d)) = u(rng);
    }
    return x;
  };
}

Scenario planar(std::string name, ScalarField phi, GradientField grad, double gain) {
  Scenario sc;
  sc.name = std::move(name);
  sc.constraints = ConstraintSystem::euclidean(2, sc.name);
  sc.surfaces.phi = {std::move(phi)};
  sc.surfaces.grad_phi = {std::move(grad)};
  sc.surfaces.gains = Vec::Constant(1, gain);
  std::vector<GridAxis> box{{-3.0, 3.0, 61}, {-3.0, 3.0, 61}};
  sc.scan_grid = box_grid(box);
  sc.random_point = uniform_in_box(box);
  return sc;
}

Scenario circle2d() {
  Scenario sc = planar(
      "circle2d", [](const Vec& p) { return p(0) * p(0) + p(1) * p(1) - 1.0; },
      [](const Vec& p) { return vec2(2.0 * p(0), 2.0 * p(1)); }, 1.0);
  sc.notes = "Unit circle in R^2; the origin is the only singular point.";
  sc.path_param = [](double s) { return vec2(std::cos(2 * kPi * s), std::sin(2 * kPi * s)); };
  sc.starts = {{vec2(2.0, 0.5), Verdict::PathConverging},
               {vec2(0.0, 0.0), Verdict::SingularConverging}};
  sc.compact_path = true;
  sc.global_hypothesis = "path error radially unbounded";
  return sc;
}

Scenario line2d() {
  Scenario sc = planar(
      "line2d", [](const Vec& p) { return p(1); }, [](const Vec&) { return vec2(0.0, 1.0); }, 1.0);
  sc.notes = "The x-axis in R^2; the propagation term is constant, no singular points.";
  sc.path_param = [](double s) { return vec2(-50.0 + 100.0 * s, 0.0); };
  sc.starts = {{vec2(5.0, 2.0), Verdict::PathConverging},
               {vec2(0.0, 0.0), Verdict::PathConverging}};
  sc.global_hypothesis = "non-compact path";
  return sc;
}

Scenario ellipse2d() {
  Scenario sc = planar(
      "ellipse2d", [](const Vec& p) { return p(0) * p(0) / 4.0 + p(1) * p(1) - 1.0; },
      [](const Vec& p) { return vec2(p(0) / 2.0, 2.0 * p(1)); }, 1.0);
  sc.notes = "Ellipse x^2/4 + y^2 = 1, gain 1; single source at the origin.";
  sc.path_param = [](double s) {
    return vec2(2.0 * std::cos(2 * kPi * s), std::sin(2 * kPi * s));
  };
  sc.starts = {{vec2(3.0, 0.1), Verdict::PathConverging},
               {vec2(0.0, 0.0), Verdict::SingularConverging}};
  sc.compact_path = true;
  sc.global_hypothesis = "path error radially unbounded";
  return sc;
}

Scenario cassini2d() {
  constexpr double a = 2.0;
  constexpr double b = 2.1;
  const double a2 = a * a;
  const double c0 = a2 * a2 - b * b * b * b;
  Scenario sc = planar(
      "cassini2d",
      [a2, c0](const Vec& p) {
        const double x2 = p(0) * p(0);
        const double y2 = p(1) * p(1);
        return x2 * x2 + y2 * y2 - 2.0 * a2 * (x2 - y2) + c0;
      },
      [a2](const Vec& p) {
        const double x = p(0);
        const double y = p(1);
        return vec2(4.0 * x * x * x - 4.0 * a2 * x, 4.0 * y * y * y + 4.0 * a2 * y);
      },
      0.1);
  sc.notes =
      "Quartic oval x^4 + y^4 - 2a^2(x^2 - y^2) + a^4 - b^4 with a = 2, b = 2.1, gain 0.1; "
      "saddle at the origin, sources at (+-a, 0).";
  sc.constants = {{"a", a}, {"b", b}};
  // Star-shaped about the origin: along each ray r^2 solves A u^2 + B u + C = 0.
  sc.path_param = [a2, c0](double s) {
    const double th = 2 * kPi * s;
    const double c = std::cos(th);
    const double sn = std::sin(th);
    const double qa = std::pow(c, 4) + std::pow(sn, 4);
    const double qb = -2.0 * a2 * (c * c - sn * sn);
    const double u = (-qb + std::sqrt(qb * qb - 4.0 * qa * c0)) / (2.0 * qa);
    double r = std::sqrt(u);
    for (int it = 0; it < 3; ++it) {
      const double r2 = r * r;
      const double f = qa * r2 * r2 + qb * r2 + c0;
      const double df = 4.0 * qa * r2 * r + 2.0 * qb * r;
      r -= f / df;
    }
    return vec2(r * c, r * sn);
  };
  sc.starts = {{vec2(1.0, 0.05), Verdict::PathConverging},
               {vec2(0.0, 0.0), Verdict::SingularConverging},
               {vec2(2.5, 1.0), Verdict::PathConverging}};
  // The quartic growth makes the field stiff towards the box corners.
  sc.integrator.dt = 2.5e-4;
  sc.compact_path = true;
  sc.global_hypothesis = "path error radially unbounded";
  return sc;
}

Scenario spatial(std::string name, std::vector<ScalarField> phi, std::vector<GradientField> grad,
                 std::vector<GridAxis> box) {
  Scenario sc;
  sc.name = std::move(name);
  sc.constraints = ConstraintSystem::euclidean(3, sc.name);
  sc.surfaces.phi = std::move(phi);
  sc.surfaces.grad_phi = std::move(grad);
  sc.surfaces.gains = Vec::Ones(2);
  sc.scan_grid = box_grid(box);
  sc.random_point = uniform_in_box(box);
  return sc;
}

Scenario line3d_good() {
  Scenario sc = spatial(
      "line3d_good", {[](const Vec& p) { return p(1); }, [](const Vec& p) { return p(2); }},
      {[](const Vec&) { return vec3(0, 1, 0); }, [](const Vec&) { return vec3(0, 0, 1); }},
      {{-3.0, 3.0, 25}, {-3.0, 3.0, 25}, {-3.0, 3.0, 25}});
  sc.notes = "The x-axis in R^3 with phi = (y, z); trajectories converge to the line.";
  sc.path_param = [](double s) { return vec3(-20.0 + 100.0 * s, 0.0, 0.0); };
  sc.path_samples = 10001;
  sc.starts = {{vec3(0.0, 1.0, 0.5), Verdict::PathConverging}};
  sc.global_hypothesis = "non-compact path";
  sc.assumption_shells = {0.5, 1.0, 2.0};
  return sc;
}

Scenario line3d_bad() {
  Scenario sc = spatial(
      "line3d_bad",
      {[](const Vec& p) { return p(1) * std::exp(-p(0)); }, [](const Vec& p) { return p(2); }},
      {[](const Vec& p) {
         const double ex = std::exp(-p(0));
         return vec3(-p(1) * ex, ex, 0.0);
       },
       [](const Vec&) { return vec3(0, 0, 1); }},
      {{0.0, 20.0, 41}, {-3.0, 3.0, 13}, {-3.0, 3.0, 13}});
  sc.notes =
      "The x-axis in R^3 with phi = (y exp(-x), z): the error decays while the "
      "trajectory drifts away from the line.";
  sc.path_param = [](double s) { return vec3(-20.0 + 100.0 * s, 0.0, 0.0); };
  sc.path_samples = 10001;
  sc.starts = {{vec3(0.0, 1.0, 0.5), Verdict::Inconclusive}};
  sc.global_hypothesis = "non-compact path";
  sc.assumption_shells = {0.5, 1.0, 2.0};
  return sc;
}

Scenario tilted_circle3d() {
  Scenario sc = spatial(
      "tilted_circle3d",
      {[](const Vec& p) {
         const double yz = p(1) + p(2);
         return p(0) * p(0) + 0.5 * yz * yz - 1.0;
       },
       [](const Vec& p) { return p(1) - p(2); }},
      {[](const Vec& p) {
         const double yz = p(1) + p(2);
         return vec3(2.0 * p(0), yz, yz);
       },
       [](const Vec&) { return vec3(0, 1, -1); }},
      {{-2.0, 2.0, 41}, {-2.0, 2.0, 41}, {-2.0, 2.0, 41}});
  sc.notes =
      "Tilted circle: cylinder x^2 + (y+z)^2/2 = 1 cut by the plane y = z; gains 1. "
      "The symmetry line (0, u, -u) flows into the singular origin.";
  sc.path_param = [](double s) {
    const double th = 2 * kPi * s;
    const double t = std::sin(th) / std::sqrt(2.0);
    return vec3(std::cos(th), t, t);
  };
  sc.probe_candidates = [](double r) {
    const double u = r / std::sqrt(2.0);
    return std::vector<Vec>{vec3(0.0, u, -u), vec3(0.0, -u, u)};
  };
  sc.starts = {{vec3(0.0, 1.0, -1.0), Verdict::SingularConverging},
               {vec3(1.0, 1.0, 1.0), Verdict::PathConverging}};
  sc.compact_path = true;
  sc.global_hypothesis = "path error radially unbounded";
  return sc;
}

Scenario sphere_circle() {
  Scenario sc;
  sc.name = "sphere_circle";
  sc.notes = "Equator of the unit sphere, phi = z restricted to S^2, gain 1; poles are singular.";
  ConstraintSystem& c = sc.constraints;
  c.name = sc.name;
  c.ambient_dim = 3;
  c.f = {[](const Vec& p) { return p.squaredNorm(); }};
  c.grad_f = {[](const Vec& p) -> Vec { return 2.0 * p; }};
  c.regular_value = Vec::Ones(1);
  sc.surfaces.phi = {[](const Vec& p) { return p(2); }};
  sc.surfaces.grad_phi = {[](const Vec&) { return vec3(0, 0, 1); }};
  sc.surfaces.gains = Vec::Ones(1);
  sc.path_param = [](double s) {
    return vec3(std::cos(2 * kPi * s), std::sin(2 * kPi * s), 0.0);
  };
  // Chart (azimuth, polar angle).
  sc.scan_grid.axes = {{0.0, 2 * kPi, 65}, {0.0, kPi, 33}};
  sc.scan_grid.chart = [](const Vec& a) {
    return vec3(std::sin(a(1)) * std::cos(a(0)), std::sin(a(1)) * std::sin(a(0)), std::cos(a(1)));
  };
  sc.random_point = [](std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Vec v = vec3(n(rng), n(rng), n(rng));
    return Vec(v / v.norm());
  };
  sc.starts = {{vec3(0.0, 0.6, 0.8), Verdict::PathConverging},
               {vec3(0.0, 0.0, 1.0), Verdict::SingularConverging}};
  sc.compact_path = true;
  sc.global_hypothesis = "compact manifold";
  return sc;
}

double bump_disk_phi(const Vec& p) { return 4.0 - (p(0) * p(0) + p(1) * p(1)) * bump(p(0), p(1)); }

Scenario bump_disk() {
  Scenario sc = planar("bump_disk", bump_disk_phi,
                       [](const Vec& p) {
                         const double r2 = p(0) * p(0) + p(1) * p(1);
                         if (!(r2 > 1.0)) return vec2(0.0, 0.0);
                         const double b = bump(p(0), p(1));
                         const double d = 1.0 - r2;
                         const double g = -2.0 * b * (1.0 + r2 / (d * d));
                         return vec2(g * p(0), g * p(1));
                       },
                       1.0);
  sc.notes =
      "phi = 4 - r^2 b(r) with the flat bump b; the singular set is the closed unit disk "
      "and the path is a circle of radius r* solving r^2 exp(1/(1-r^2)) = 4.";
  // Path radius by bisection on the radial profile.
  double lo = 1.5;
  double hi = 3.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (bump_disk_phi(vec2(mid, 0.0)) > 0.0 ? lo : hi) = mid;
  }
  const double radius = 0.5 * (lo + hi);
  sc.constants = {{"path_radius", radius}};
  sc.path_param = [radius](double s) {
    return vec2(radius * std::cos(2 * kPi * s), radius * std::sin(2 * kPi * s));
  };
  sc.starts = {{vec2(0.5, 0.0), Verdict::SingularConverging},
               {vec2(3.0, 0.0), Verdict::PathConverging}};
  sc.compact_path = true;
  sc.global_hypothesis = "path error radially unbounded";
  return sc;
}

Scenario torus_arm_lift() {
  Scenario sc = planar(
      "torus_arm_lift", [](const Vec& p) { return p(0) + p(1) - kPi / 2.0; },
      [](const Vec&) { return vec2(1.0, 1.0); }, 1.0);
  sc.notes =
      "Two-link arm joint path theta1 + theta2 = pi/2 lifted from the torus to its "
      "covering space R^2; no singular points.";
  sc.constants = {{"L1", 2.0}, {"L2", 3.0}};
  std::vector<GridAxis> box{{-kPi, 3 * kPi, 61}, {-kPi, 3 * kPi, 61}};
  sc.scan_grid = box_grid(box);
  sc.random_point = uniform_in_box(box);
  sc.path_param = [](double s) {
    const double t1 = -4 * kPi + 8 * kPi * s;
    return vec2(t1, kPi / 2.0 - t1);
  };
  sc.path_samples = 8192;
  sc.starts = {{vec2(0.0, 0.0), Verdict::PathConverging},
               {vec2(0.3 * kPi, 0.0), Verdict::PathConverging},
               {vec2(1.5 * kPi, 0.5 * kPi), Verdict::PathConverging}};
  sc.global_hypothesis = "non-compact path (covering space)";
  return sc;
}

Scenario so3_path() {
  Scenario sc;
  sc.name = "so3_path";
  sc.notes =
      "SO(3) in R^9 (column-stacked) with orthonormality constraints f1..f6; path "
      "a13 = a23 = 0, i.e. {Rz(t)} union {Rx(pi) Rz(t)}.";
  ConstraintSystem& c = sc.constraints;
  c.name = sc.name;
  c.ambient_dim = 9;
  // Column j of A occupies x[3j .. 3j+2].
  auto col = [](const Vec& x, int j) { return x.segment<3>(3 * j); };
  const std::array<std::pair<int, int>, 6> pairs{{{0, 1}, {0, 2}, {1, 2}, {0, 0}, {1, 1}, {2, 2}}};
  for (const auto& [i, j] : pairs) {
    const bool diag = i == j;
    c.f.push_back([=](const Vec& x) { return col(x, i).dot(col(x, j)) - (diag ? 1.0 : 0.0); });
    c.grad_f.push_back([=](const Vec& x) {
      Vec g = Vec::Zero(9);
      g.segment<3>(3 * i) += col(x, j);
      g.segment<3>(3 * j) += col(x, i);
      return g;
    });
  }
  // f_i = A_i^T A_j - delta_ij with a = 0.
  c.regular_value = Vec::Zero(6);
  // a13 = x[6], a23 = x[7].
  sc.surfaces.phi = {[](const Vec& x) { return x(6); }, [](const Vec& x) { return x(7); }};
  sc.surfaces.grad_phi = {[](const Vec&) { return Vec(Vec::Unit(9, 6)); },
                          [](const Vec&) { return Vec(Vec::Unit(9, 7)); }};
  sc.surfaces.gains = Vec::Ones(2);
  sc.path_param = [](double s) {
    const double th = 4 * kPi * s;
    return s < 0.5 ? vectorize(rot('z', th)) : vectorize(rot('x', kPi) * rot('z', th));
  };
  sc.scan_grid.axes = {{-kPi, kPi, 17}, {-kPi / 2, kPi / 2, 9}, {-kPi, kPi, 17}};
  sc.scan_grid.chart = [](const Vec& a) {
    return vectorize(rot('z', a(0)) * rot('y', a(1)) * rot('x', a(2)));
  };
  sc.random_point = [](std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
    q.normalize();
    return vectorize(q.toRotationMatrix());
  };
  sc.starts = {{vectorize(rot('x', kPi / 4) * rot('y', -kPi / 4)), Verdict::PathConverging}};
  sc.compact_path = true;
  sc.global_hypothesis = "compact manifold";
  return sc;
}

std::vector<Scenario> build_registry() {
  std::vector<Scenario> all;
  all.push_back(circle2d());
  all.push_back(line2d());
  all.push_back(ellipse2d());
  all.push_back(cassini2d());
  all.push_back(line3d_good());
  all.push_back(line3d_bad());
  all.push_back(tilted_circle3d());
  all.push_back(sphere_circle());
  all.push_back(bump_disk());
  all.push_back(torus_arm_lift());
  all.push_back(so3_path());
  for (Scenario& sc : all) {
    sc.constraints.validate();
    sc.surfaces.validate(sc.constraints);
  }
  return all;
}

const std::vector<Scenario>& registry() {
  static const std::vector<Scenario> reg = build_registry();
  return reg;
}

}  // namespace

PathSamples Scenario::sample_path() const {
  PathSamples out;
  if (!path_param) return out;
  out.reserve(static_cast<std::size_t>(path_samples));
  for (int i = 0; i < path_samples; ++i)
    out.push_back(path_param(static_cast<double>(i) / path_samples));
  return out;
}

std::vector<Vec> Scenario::grid_points() const {
  std::vector<Vec> pts;
  pts.reserve(scan_grid.size());
  for (std::size_t i = 0; i < scan_grid.size(); ++i) {
    Vec x = scan_grid.point(scan_grid.params(i));
    if (!constraints.is_euclidean()) x = retract(constraints, x).x;
    pts.push_back(std::move(x));
  }
  return pts;
}

std::vector<std::string> scenario_names() {
  std::vector<std::string> names;
  for (const Scenario& sc : registry()) names.push_back(sc.name);
  return names;
}

const Scenario& get_scenario(const std::string& name) {
  for (const Scenario& sc : registry())
    if (sc.name == name) return sc;
  throw UnknownScenario("unknown scenario '" + name + "'");
}

Scenario resolve_scenario(const std::string& name_or_file) {
  const std::filesystem::path p(name_or_file);
  if (p.extension() == ".json") return load_scenario_file(p);
  return get_scenario(name_or_file);
}

std::array<double, 2> covering_project(const std::array<double, 2>& theta) {
  std::array<double, 2> out{};
  for (std::size_t i = 0; i < 2; ++i) {
    double v = std::fmod(theta[i], 2 * kPi);
    if (v < 0) v += 2 * kPi;
    if (v >= 2 * kPi) v = 0.0;
    out[i] = v;
  }
  return out;
}

Eigen::Matrix3d rot(char axis, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix3d r;
  switch (axis) {
    case 'x': r << 1, 0, 0, 0, c, -s, 0, s, c; break;
    case 'y': r << c, 0, s, 0, 1, 0, -s, 0, c; break;
    case 'z': r << c, -s, 0, s, c, 0, 0, 0, 1; break;
    default: throw InvalidInput(std::string("unknown rotation axis '") + axis + "'");
  }
  return r;
}

Vec vectorize(const Eigen::Matrix3d& a) {
  Vec x(9);
  for (int j = 0; j < 3; ++j) x.segment<3>(3 * j) = a.col(j);
  return x;
}

Eigen::Matrix3d unvectorize(const Vec& x) {
  if (x.size() != 9) throw InvalidInput("SO(3) state must have 9 entries");
  Eigen::Matrix3d a;
  for (int j = 0; j < 3; ++j) a.col(j) = x.segment<3>(3 * j);
  return a;
}

double orthonormality_residual(const Vec& x) {
  const Eigen::Matrix3d a = unvectorize(x);
  return (a.transpose() * a - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
}

std::string to_string(So3Component c) {
  switch (c) {
    case So3Component::P1: return "P1";
    case So3Component::P2: return "P2";
    case So3Component::Neither: return "neither";
  }
  return "neither";
}

So3Component so3_membership(const Vec& x, double tol) {
  const Eigen::Matrix3d a = unvectorize(x);
  const bool off = std::abs(a(0, 2)) <= tol && std::abs(a(1, 2)) <= tol &&
                   std::abs(a(2, 0)) <= tol && std::abs(a(2, 1)) <= tol;
  if (!off) return So3Component::Neither;
  if (a(2, 2) >= 1.0 - tol) return So3Component::P1;
  if (a(2, 2) <= -(1.0 - tol)) return So3Component::P2;
  return So3Component::Neither;
}

Eigen::Matrix3d parse_rotation_product(const std::string& text) {
  std::string body = text;
  if (!body.empty() && body.front() == '@') body.erase(0, 1);
  static const std::regex term(R"(\s*r([xyz])\(\s*([^()]+?)\s*\)\s*)");
  Eigen::Matrix3d out = Eigen::Matrix3d::Identity();
  auto it = std::sregex_iterator(body.begin(), body.end(), term);
  std::size_t consumed = 0;
  for (; it != std::sregex_iterator(); ++it) {
    const std::smatch& m = *it;
    if (static_cast<std::size_t>(m.position()) != consumed)
      throw InvalidInput("malformed rotation product '" + text + "'");
    std::size_t used = 0;
    double angle = 0.0;
    try {
      angle = std::stod(m[2].str(), &used);
    } catch (const std::exception&) {
      throw InvalidInput("bad rotation angle in '" + text + "'");
    }
    if (used != m[2].str().size()) throw InvalidInput("bad rotation angle in '" + text + "'");
    out = out * rot(m[1].str()[0], angle);
    consumed += static_cast<std::size_t>(m.length());
  }
  if (consumed == 0 || consumed != body.size())
    throw InvalidInput("malformed rotation product '" + text + "'");
  return out;
}

double bump(double x, double y) {
  const double r2 = x * x + y * y;
  if (!(r2 > 1.0)) return 0.0;
  return std::exp(1.0 / (1.0 - r2));
}

}  // namespace gvf
