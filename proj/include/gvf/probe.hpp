#pragma once

#include <gvf/scenarios.hpp>

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace gvf {

/// Quasi-uniform points on the unit sphere in R^dim. Circle: shifted van der
/// Corput; 2-sphere: shifted Halton(2, 3) via the area-preserving cylinder
/// map; higher dimensions: normalised Gaussians. The seed fixes the shift.
std::vector<Vec> sphere_samples(int dim, int count, std::uint64_t seed);

struct ProbeStart {
  Vec x0;
  bool candidate = false;
  Verdict verdict = Verdict::Inconclusive;
  double final_e_norm = 0.0;
  Vec final_x;
};

struct ProbeReport {
  std::string scenario;
  double radius = 0.0;
  int sample_count = 0;
  std::uint64_t seed = 0;
  std::vector<ProbeStart> starts;
  /// Indices into `starts` whose verdict is not PathConverging.
  std::vector<std::size_t> non_converging;
  bool includes_candidates = false;
  std::vector<std::string> notes;

  nlohmann::json to_json() const;
};

/// Integrates from `count` boundary samples of the radius-R sphere plus the
/// scenario's injected candidates (candidates first). Euclidean scenarios only.
ProbeReport probe_sphere(const Scenario& sc, double radius, int count, std::uint64_t seed,
                         const IntegratorConfig& cfg, unsigned threads = 0);

}  // namespace gvf
