#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace gvf;
using testing_support::v;

namespace {

SingularCensus census(const std::string& name) {
  const Scenario& sc = get_scenario(name);
  return find_singular_set(sc.constraints, sc.surfaces, sc.scan_grid, sc.sample_path());
}

}  // namespace

TEST_CASE("grid indexing") {
  GridSpec g;
  g.axes = {{-1, 1, 3}, {0, 4, 5}};
  CHECK(g.size() == 15);
  CHECK((g.params(0) - v({-1, 0})).norm() == 0.0);
  CHECK((g.params(14) - v({1, 4})).norm() == 0.0);
  CHECK(g.max_spacing() == 1.0);
  CHECK(g.contains(v({0, 2})));
  CHECK_FALSE(g.contains(v({0, 5})));
  GridSpec bad;
  bad.axes = {{1, 0, 3}};
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("scan of the unit circle seeds only near the origin") {
  const Scenario& sc = get_scenario("circle2d");
  const ScanResult r = scan(sc.constraints, sc.surfaces, sc.scan_grid);
  CHECK(r.samples.size() == sc.scan_grid.size());
  REQUIRE(r.seeds.size() == 1);
  CHECK(r.seeds[0].norm() <= 2 * sc.scan_grid.max_spacing());
}

TEST_CASE("refinement converges to the ellipse origin and labels a source") {
  const Scenario& sc = get_scenario("ellipse2d");
  const SingularPoint p = refine(sc.constraints, sc.surfaces, v({0.07, -0.04}));
  CHECK(p.refined);
  CHECK(p.x.norm() <= 1e-10);
  CHECK(p.chi_norm <= 1e-10);
  CHECK(p.label == SingularLabel::Source);
}

TEST_CASE("refining an exact singular point returns it") {
  const Scenario& sc = get_scenario("circle2d");
  const SingularPoint p = refine(sc.constraints, sc.surfaces, v({0, 0}));
  CHECK(p.x.norm() == 0.0);
  const Scenario& sp = get_scenario("sphere_circle");
  const SingularPoint q = refine(sp.constraints, sp.surfaces, v({0, 0, -1}));
  CHECK((q.x - v({0, 0, -1})).norm() <= 1e-14);
}

TEST_CASE("Cassini oval singular points") {
  const Scenario& sc = get_scenario("cassini2d");
  const Classification o = classify(sc.constraints, sc.surfaces, v({0, 0}));
  CHECK(o.label == SingularLabel::Saddle);
  // At the origin grad phi vanishes, so the Jacobian is (E - k phi(0)) H
  // with H = diag(-4a^2, 4a^2) and E the quarter turn.
  const double k = 0.1, a2 = 4.0, c0 = 16.0 - std::pow(2.1, 4);
  REQUIRE(o.eigen_real_parts.size() == 2);
  const Eigen::Matrix2d h = (Eigen::Matrix2d() << -4 * a2, 0, 0, 4 * a2).finished();
  Eigen::Matrix2d rot90;
  rot90 << 0, -1, 1, 0;
  const Eigen::Matrix2d jac = sc.surfaces.propagation_sign * rot90 * h - k * c0 * h;
  Eigen::EigenSolver<Eigen::Matrix2d> es(jac);
  std::vector<double> re{es.eigenvalues()(0).real(), es.eigenvalues()(1).real()};
  std::sort(re.rbegin(), re.rend());
  CHECK(o.eigen_real_parts[0] == doctest::Approx(re[0]).epsilon(1e-5));
  CHECK(o.eigen_real_parts[1] == doctest::Approx(re[1]).epsilon(1e-5));

  for (double sx : {-2.0, 2.0}) {
    const SingularPoint p = refine(sc.constraints, sc.surfaces, v({sx * 1.02, 0.03}));
    CHECK((p.x - v({sx, 0})).norm() <= 1e-9);
    CHECK(p.label == SingularLabel::Source);
  }
}

TEST_CASE("classification is stable across finite-difference steps") {
  for (const std::string& name : {"circle2d", "ellipse2d", "cassini2d", "sphere_circle"}) {
    const SingularCensus c = census(name);
    const Scenario& sc = get_scenario(name);
    for (const SingularPoint& p : c.points) {
      const Classification a = classify(sc.constraints, sc.surfaces, p.x, 1e-4);
      const Classification b = classify(sc.constraints, sc.surfaces, p.x, 1e-5);
      INFO(name << " at " << p.x.transpose());
      CHECK(a.label == b.label);
      REQUIRE(a.eigen_real_parts.size() == b.eigen_real_parts.size());
      for (std::size_t i = 0; i < a.eigen_real_parts.size(); ++i)
        CHECK(a.eigen_real_parts[i] ==
              doctest::Approx(b.eigen_real_parts[i]).epsilon(1e-4).scale(1.0));
    }
  }
}

TEST_CASE("labels from real parts") {
  CHECK(label_from_real_parts({2, 1}, 1e-6) == SingularLabel::Source);
  CHECK(label_from_real_parts({-1, -2}, 1e-6) == SingularLabel::Sink);
  CHECK(label_from_real_parts({1, -1}, 1e-6) == SingularLabel::Saddle);
  CHECK(label_from_real_parts({1, 1e-9}, 1e-6) == SingularLabel::Degenerate);
}

TEST_CASE("census counts on the smooth scenarios") {
  CHECK(census("circle2d").points.size() == 1);
  CHECK(census("ellipse2d").points.size() == 1);
  CHECK(census("cassini2d").points.size() == 3);
  CHECK(census("sphere_circle").points.size() == 2);
  CHECK(census("line2d").points.empty());
  CHECK(census("line3d_good").points.empty());
  CHECK(census("torus_arm_lift").points.empty());
  for (const SingularPoint& p : census("sphere_circle").points) {
    CHECK(std::abs(std::abs(p.x(2)) - 1.0) <= 1e-9);
    CHECK(p.dist_to_path == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));
  }
}

TEST_CASE("bump disk yields a singular region rather than isolated points") {
  const SingularCensus c = census("bump_disk");
  REQUIRE(c.region.has_value());
  CHECK(c.region->hull_area == doctest::Approx(M_PI).epsilon(0.1));
}

TEST_CASE("convex hull area") {
  CHECK(convex_hull_area({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}}) == doctest::Approx(1.0));
  CHECK(convex_hull_area({{0, 0}, {2, 0}, {0, 3}}) == doctest::Approx(3.0));
  CHECK(convex_hull_area({{0, 0}, {1, 1}, {2, 2}}) == doctest::Approx(0.0));
  CHECK(convex_hull_area({{0, 0}, {1, 1}}) == 0.0);
}

TEST_CASE("assumption checks") {
  const Scenario& sc = get_scenario("circle2d");
  const SingularCensus c = census("circle2d");
  std::mt19937_64 rng(1);
  std::vector<Vec> samples;
  for (int i = 0; i < 500; ++i) samples.push_back(sc.random_point(rng));
  const AssumptionReport r = check_assumptions(sc.constraints, sc.surfaces, c.points,
                                               sc.sample_path(), samples, {0.5, 1.0});
  CHECK(r.singular_count == 1);
  CHECK(r.assumption1_ok);
  CHECK(r.min_dist_singular_to_path == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_FALSE(r.assumption2_flagged);
  REQUIRE(r.shells.size() == 2);
  CHECK(r.shells[0].min_e_norm > 0.1);

  // A fake singular point on the path violates the first assumption.
  SingularPoint on;
  on.x = v({1, 0});
  const AssumptionReport bad = check_assumptions(sc.constraints, sc.surfaces, {on},
                                                 sc.sample_path(), samples, {0.5});
  CHECK_FALSE(bad.assumption1_ok);
}

TEST_CASE("the exponentially flattened line is flagged") {
  const Scenario& sc = get_scenario("line3d_bad");
  // Far along the axis the error is exponentially small at unit distance.
  const AssumptionReport r = check_assumptions(sc.constraints, sc.surfaces, {}, sc.sample_path(),
                                               sc.grid_points(), sc.assumption_shells);
  CHECK(r.assumption2_flagged);
}
