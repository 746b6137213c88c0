#pragma once

#include <gvf/scenarios.hpp>

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace gvf {

struct CheckResult {
  std::string name;
  bool passed = true;
  /// Assumption findings are reported separately from invariant failures.
  bool assumption = false;
  std::string detail;
};

struct CheckOptions {
  int samples = 1000;
  int fd_samples = 100;
  std::uint64_t seed = 42;
  double tol = 1e-9;
  bool census = true;
};

struct CheckReport {
  std::string scenario;
  std::vector<CheckResult> results;
  AssumptionReport assumptions;

  bool invariants_pass() const;
  bool assumption_flagged() const;
  /// 0 all clear, 2 invariant failure, 3 assumption finding only.
  int exit_code() const;
  nlohmann::json to_json() const;
};

/// Random on-manifold points of a scenario (retracted when k > 0).
std::vector<Vec> sample_points(const Scenario& sc, int count, std::uint64_t seed);

/// Worst scaled violation of the orthogonality and tangency invariants.
struct InvariantStats {
  double orthogonality = 0.0;  // max |<bot, grad_i>| / (|bot| |grad_i| + 1)
  double tangency = 0.0;       // max |<chi, grad f_j>| / (|chi| |grad f_j| + 1)
};
InvariantStats field_invariants(const Scenario& sc, const std::vector<Vec>& points);

/// Largest relative deviation of user-supplied gradients from central
/// differences (step 1e-6), constraints and surfaces together.
double gradient_fd_error(const Scenario& sc, const std::vector<Vec>& points);

/// Closed form of the sphere field with gain k on the unit sphere.
Vec sphere_closed_form(const Vec& x, double k);

CheckReport run_checks(const Scenario& sc, const CheckOptions& opts = {});

}  // namespace gvf
