#pragma once

#include <gvf/integrate.hpp>
#include <gvf/singular.hpp>

#include <array>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace gvf {

struct StartSpec {
  Vec x0;
  Verdict expected = Verdict::PathConverging;
};

/// A complete path-following setup: manifold, surfaces, path sampler,
/// reference starts, scan grid and integrator defaults.
struct Scenario {
  std::string name;
  std::string notes;
  ConstraintSystem constraints;
  SurfaceStack surfaces;
  /// Parametrisation of the path over s in [0, 1); empty when unknown.
  std::function<Vec(double)> path_param;
  int path_samples = 4096;
  std::vector<StartSpec> starts;
  GridSpec scan_grid;
  /// Random on-manifold point in the region of interest.
  std::function<Vec(std::mt19937_64&)> random_point;
  /// Analytically known non-path-converging starts on a sphere of radius R.
  std::function<std::vector<Vec>(double)> probe_candidates;
  IntegratorConfig integrator;
  bool compact_path = false;
  /// Which hypothesis makes the convergence dichotomy hold globally.
  std::string global_hypothesis;
  std::vector<double> assumption_shells{0.5, 1.0};
  std::map<std::string, double> constants;

  int ambient_dim() const { return constraints.ambient_dim; }
  PathSamples sample_path() const;
  /// Scan-grid points used as the Assumption-2 sample.
  std::vector<Vec> grid_points() const;
};

/// Names of the built-in scenarios, in registration order.
std::vector<std::string> scenario_names();

/// Built-in scenario by name; throws UnknownScenario.
const Scenario& get_scenario(const std::string& name);

/// Scenario from a JSON file of sparse polynomials (plus the "bump" special).
Scenario load_scenario_file(const std::filesystem::path& file);
Scenario scenario_from_json(const std::string& text);

/// Built-in name or a path to a .json scenario file.
Scenario resolve_scenario(const std::string& name_or_file);

/// Component-wise reduction to [0, 2 pi): covering space R^2 -> torus.
std::array<double, 2> covering_project(const std::array<double, 2>& theta);

/// Rotation about x, y or z by theta radians.
Eigen::Matrix3d rot(char axis, double theta);

/// Column-stacked vectorisation [A_1; A_2; A_3] and its inverse.
Vec vectorize(const Eigen::Matrix3d& a);
Eigen::Matrix3d unvectorize(const Vec& x);

/// max |A^T A - I| entry.
double orthonormality_residual(const Vec& x);

enum class So3Component { P1, P2, Neither };
std::string to_string(So3Component c);

So3Component so3_membership(const Vec& x, double tol = 1e-3);

/// Parses "@rx(a)ry(b)rz(c)..." into the product of axis rotations.
Eigen::Matrix3d parse_rotation_product(const std::string& text);

/// Bump b(x, y) = exp(1 / (1 - r^2)) for r > 1, else 0.
double bump(double x, double y);

}  // namespace gvf
