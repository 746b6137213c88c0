#include "helpers.hpp"

#include <gvf/args.hpp>
#include <gvf/invariants.hpp>
#include <gvf/probe.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace gvf;
using testing_support::v;

constexpr double kPi = std::numbers::pi;

TEST_CASE("registry") {
  const auto names = scenario_names();
  CHECK(names.size() == 11);
  CHECK(std::set<std::string>(names.begin(), names.end()).size() == names.size());
  for (const std::string& n : names) CHECK(get_scenario(n).name == n);
  CHECK_THROWS_AS(get_scenario("no_such_scenario"), UnknownScenario);
  CHECK_THROWS_AS(resolve_scenario("no_such_scenario"), UnknownScenario);
}

TEST_CASE("every scenario is internally consistent") {
  for (const std::string& n : scenario_names()) {
    const Scenario& sc = get_scenario(n);
    INFO(n);
    CHECK_NOTHROW(sc.constraints.validate());
    CHECK_NOTHROW(sc.surfaces.validate(sc.constraints));
    CHECK_NOTHROW(sc.scan_grid.validate());
    CHECK_FALSE(sc.starts.empty());
    CHECK_FALSE(sc.notes.empty());
    for (const StartSpec& st : sc.starts) CHECK(st.x0.size() == sc.ambient_dim());
  }
}

TEST_CASE("sampled paths lie on the zero set") {
  for (const std::string& n : scenario_names()) {
    const Scenario& sc = get_scenario(n);
    const PathSamples path = sc.sample_path();
    CHECK(path.size() == static_cast<std::size_t>(sc.path_samples));
    double worst_e = 0.0, worst_r = 0.0;
    for (const Vec& p : path) {
      worst_e = std::max(worst_e, path_error(sc.surfaces, p).norm());
      worst_r = std::max(worst_r, residual_norm(sc.constraints, p));
    }
    INFO(n);
    CHECK(worst_e <= 1e-10);
    CHECK(worst_r <= 1e-12);
  }
}

TEST_CASE("covering projection wraps into [0, 2pi)") {
  const auto a = covering_project({7.0, -1.0});
  CHECK(a[0] == doctest::Approx(7.0 - 2 * kPi));
  CHECK(a[1] == doctest::Approx(2 * kPi - 1.0));
  const auto b = covering_project({2 * kPi, 0.0});
  CHECK(b[0] == doctest::Approx(0.0));
  CHECK(b[1] == 0.0);
  for (double t : {-20.0, -3.3, 0.1, 12.0, 100.0}) {
    const double w = covering_project({t, t})[0];
    CHECK(w >= 0.0);
    CHECK(w < 2 * kPi);
    CHECK(std::cos(w) == doctest::Approx(std::cos(t)));
    CHECK(std::sin(w) == doctest::Approx(std::sin(t)));
  }
}

TEST_CASE("elementary rotations") {
  for (char ax : {'x', 'y', 'z'}) {
    const Eigen::Matrix3d r = rot(ax, 0.7);
    CHECK((r.transpose() * r - Eigen::Matrix3d::Identity()).norm() <= 1e-15);
    CHECK(r.determinant() == doctest::Approx(1.0));
    CHECK((rot(ax, 0.7) * rot(ax, -0.7) - Eigen::Matrix3d::Identity()).norm() <= 1e-15);
  }
  const Eigen::Vector3d e = rot('z', kPi / 2) * Eigen::Vector3d::UnitX();
  CHECK((e - Eigen::Vector3d::UnitY()).norm() <= 1e-15);
  CHECK_THROWS_AS(rot('w', 1.0), InvalidInput);
}

TEST_CASE("vectorization is column-major") {
  Eigen::Matrix3d a;
  a << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  const Vec x = vectorize(a);
  CHECK((x - v({1, 4, 7, 2, 5, 8, 3, 6, 9})).norm() == 0.0);
  CHECK(unvectorize(x) == a);
}

TEST_CASE("SO(3) path components") {
  const Scenario& sc = get_scenario("so3_path");
  for (double t : {0.0, 0.4, 2.0, -1.3}) {
    const Vec p1 = vectorize(rot('z', t));
    const Vec p2 = vectorize(rot('x', kPi) * rot('z', t));
    CHECK(residual_norm(sc.constraints, p1) <= 1e-14);
    CHECK(residual_norm(sc.constraints, p2) <= 1e-14);
    CHECK(path_error(sc.surfaces, p1).norm() <= 1e-14);
    CHECK(path_error(sc.surfaces, p2).norm() <= 1e-14);
    CHECK(so3_membership(p1) == So3Component::P1);
    CHECK(so3_membership(p2) == So3Component::P2);
  }
  CHECK(so3_membership(vectorize(rot('x', 0.5))) == So3Component::Neither);
  CHECK(to_string(So3Component::P2) == "P2");
}

TEST_CASE("SO(3) start is on the manifold and stays orthonormal") {
  const Scenario& sc = get_scenario("so3_path");
  const Vec x0 = sc.starts.front().x0;
  CHECK(orthonormality_residual(x0) <= 1e-14);
  CHECK((unvectorize(x0) - rot('x', kPi / 4) * rot('y', -kPi / 4)).norm() <= 1e-15);
  IntegratorConfig cfg = sc.integrator;
  cfg.t_max = 5.0;
  cfg.stop_at_verdict = false;
  cfg.record_stride = 50;
  const Trajectory traj = integrate(sc.constraints, sc.surfaces, cfg, x0);
  double worst = 0.0;
  for (const TrajectorySample& s : traj.samples) worst = std::max(worst, orthonormality_residual(s.x));
  CHECK(worst <= 1e-10);
}

TEST_CASE("rotation products") {
  const Eigen::Matrix3d a = parse_rotation_product("@rx(0.3)rz(-1.2)");
  CHECK((a - rot('x', 0.3) * rot('z', -1.2)).norm() <= 1e-15);
  const Eigen::Matrix3d b = parse_rotation_product("@ry(1e-1) rx(2)");
  CHECK((b - rot('y', 0.1) * rot('x', 2.0)).norm() <= 1e-15);
  CHECK_THROWS_AS(parse_rotation_product("@rq(1)"), InvalidInput);
  CHECK_THROWS_AS(parse_rotation_product("@rx(1"), InvalidInput);
}

TEST_CASE("bump function") {
  CHECK(bump(0.5, 0.5) == 0.0);
  CHECK(bump(1.0, 0.0) == 0.0);
  CHECK(bump(2.0, 0.0) == doctest::Approx(std::exp(-1.0 / 3.0)));
  // All derivatives vanish at the unit circle: the value is below any power of (r - 1).
  for (double r : {1.001, 1.002, 1.005}) CHECK(bump(r, 0.0) <= std::pow(r - 1.0, 8));
}

TEST_CASE("bump disk gradient is continuous across the unit circle") {
  const Scenario& sc = get_scenario("bump_disk");
  const GradientField& g = sc.surfaces.grad_phi[0];
  double prev = 0.0;
  for (double r = 0.9; r <= 1.3; r += 1e-3) {
    const double gn = g(v({r * 0.6, r * 0.8})).norm();
    CHECK(std::abs(gn - prev) <= 0.05);
    prev = gn;
  }
  const Vec x = v({1.4, 0.3});
  CHECK((g(x) - testing_support::fd_gradient(sc.surfaces.phi[0], x)).norm() <= 1e-6);
}

TEST_CASE("bump disk path radius solves its defining equation") {
  const Scenario& sc = get_scenario("bump_disk");
  const double r = sc.constants.at("path_radius");
  CHECK(r * r * std::exp(1.0 / (1.0 - r * r)) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("JSON scenario import") {
  const std::string text = R"({
    "name": "unit_circle_json",
    "ambient_dim": 2,
    "surfaces": [[{"coeff": 1, "exponents": [2, 0]}, {"coeff": 1, "exponents": [0, 2]},
                  {"coeff": -1, "exponents": [0, 0]}]],
    "gains": [1.0],
    "scan_box": ["-2:2:41", [-2, 2, 41]],
    "starts": [{"x0": [2, 0.5], "expected": "PathConverging"}, [0, 0]],
    "integrator": {"dt": 0.002}
  })";
  const Scenario sc = scenario_from_json(text);
  CHECK(sc.name == "unit_circle_json");
  CHECK(sc.ambient_dim() == 2);
  CHECK(sc.scan_grid.size() == 41 * 41);
  CHECK(sc.integrator.dt == 0.002);
  REQUIRE(sc.starts.size() == 2);
  const Scenario& ref = get_scenario("circle2d");
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    const Vec x = ref.random_point(rng);
    CHECK((field_value(sc.constraints, sc.surfaces, x) - field_value(ref.constraints, ref.surfaces, x)).norm() <= 1e-12);
  }
  const Trajectory traj = integrate(sc.constraints, sc.surfaces, sc.integrator, sc.starts[0].x0);
  CHECK(traj.verdict == Verdict::PathConverging);
}

TEST_CASE("JSON sphere import with a constraint") {
  const std::string text = R"({
    "name": "sphere_json",
    "ambient_dim": 3,
    "constraints": [{"terms": [{"coeff": 1, "exponents": [2, 0, 0]},
                               {"coeff": 1, "exponents": [0, 2, 0]},
                               {"coeff": 1, "exponents": [0, 0, 2]}]}],
    "regular_value": [1],
    "surfaces": [[{"coeff": 1, "exponents": [0, 0, 1]}]],
    "gains": [1],
    "starts": [[0, 0.6, 0.8]]
  })";
  const Scenario sc = scenario_from_json(text);
  const Vec chi = field_value(sc.constraints, sc.surfaces, v({0, 0.6, 0.8}));
  CHECK((chi - v({1.2, 0.384, -0.288})).norm() <= 1e-12);
}

TEST_CASE("malformed JSON scenarios are rejected") {
  CHECK_THROWS_AS(scenario_from_json("{"), InvalidInput);
  CHECK_THROWS_AS(scenario_from_json(R"({"name": "x"})"), InvalidInput);
  CHECK_THROWS_AS(scenario_from_json(R"({"name": "x", "ambient_dim": 2,
      "surfaces": [[{"coeff": 1, "exponents": [1]}]], "gains": [1]})"),
                  InvalidInput);
  CHECK_THROWS_AS(scenario_from_json(R"({"name": "x", "ambient_dim": 2,
      "surfaces": [[{"coeff": 1, "exponents": [1, 0]}]], "gains": [-1]})"),
                  InvalidInput);
}

TEST_CASE("argument parsing") {
  CHECK((parse_point("1,-2.5,3e-1") - v({1, -2.5, 0.3})).norm() == 0.0);
  CHECK(parse_point("@rz(0.5)").size() == 9);
  CHECK_THROWS_AS(parse_point("1,,2"), InvalidInput);
  CHECK_THROWS_AS(parse_point("1,a"), InvalidInput);
  const auto box = parse_box("-3:3:41,0:1:2");
  REQUIRE(box.size() == 2);
  CHECK(box[0].lo == -3.0);
  CHECK(box[0].hi == 3.0);
  CHECK(box[0].count == 41);
  CHECK_THROWS_AS(parse_box("3:-3:41"), InvalidInput);
  CHECK_THROWS_AS(parse_box("0:1:1"), InvalidInput);
  CHECK_THROWS_AS(parse_box("0:1"), InvalidInput);
  CHECK(parse_counts("65,33") == std::vector<int>{65, 33});
  CHECK_THROWS_AS(parse_counts("2.5"), InvalidInput);
}

TEST_CASE("sphere sampling for probes") {
  for (int dim : {2, 3, 5}) {
    const auto pts = sphere_samples(dim, 64, 7);
    CHECK(pts.size() == 64);
    for (const Vec& p : pts) {
      CHECK(p.size() == dim);
      CHECK(p.norm() == doctest::Approx(1.0));
    }
    CHECK(sphere_samples(dim, 64, 7) == pts);
  }
  // Low-discrepancy on the circle: no angular gap much larger than the mean spacing.
  auto pts = sphere_samples(2, 64, 3);
  std::vector<double> ang;
  for (const Vec& p : pts) ang.push_back(std::atan2(p(1), p(0)));
  std::sort(ang.begin(), ang.end());
  double gap = ang.front() + 2 * kPi - ang.back();
  for (std::size_t i = 1; i < ang.size(); ++i) gap = std::max(gap, ang[i] - ang[i - 1]);
  CHECK(gap <= 2.0 * 2 * kPi / 64);
}

TEST_CASE("run_checks passes on the sphere and flags the bad line") {
  CheckOptions opts;
  opts.samples = 200;
  opts.fd_samples = 20;
  const CheckReport good = run_checks(get_scenario("sphere_circle"), opts);
  CHECK(good.invariants_pass());
  CHECK(good.exit_code() == 0);
  const CheckReport bad = run_checks(get_scenario("line3d_bad"), opts);
  CHECK(bad.invariants_pass());
  CHECK(bad.assumption_flagged());
  CHECK(bad.exit_code() == 3);
  CHECK(bad.to_json().contains("results"));
}
