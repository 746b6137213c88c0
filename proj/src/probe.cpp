#include <gvf/probe.hpp>
#include <gvf/trajectory_io.hpp>

#include <cmath>
#include <numbers>
#include <random>

namespace gvf {

namespace {

double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

double wrap01(double u) { return u - std::floor(u); }

nlohmann::json vec_json(const Vec& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

}  // namespace

std::vector<Vec> sphere_samples(int dim, int count, std::uint64_t seed) {
  if (dim < 2) throw InvalidInput("sphere sampling needs dimension >= 2");
  if (count < 0) throw InvalidInput("sample count must be non-negative");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(count));
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (dim == 2) {
    const double shift = u01(rng);
    for (int i = 0; i < count; ++i) {
      const double a = two_pi * wrap01(radical_inverse(static_cast<std::uint64_t>(i) + 1, 2) + shift);
      out.push_back((Vec(2) << std::cos(a), std::sin(a)).finished());
    }
  } else if (dim == 3) {
    const double s1 = u01(rng);
    const double s2 = u01(rng);
    for (int i = 0; i < count; ++i) {
      const auto k = static_cast<std::uint64_t>(i) + 1;
      const double z = 2.0 * wrap01(radical_inverse(k, 2) + s1) - 1.0;
      const double a = two_pi * wrap01(radical_inverse(k, 3) + s2);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      out.push_back((Vec(3) << r * std::cos(a), r * std::sin(a), z).finished());
    }
  } else {
    std::normal_distribution<double> n01(0.0, 1.0);
    while (static_cast<int>(out.size()) < count) {
      Vec v(dim);
      for (int d = 0; d < dim; ++d) v(d) = n01(rng);
      const double nv = v.norm();
      if (nv > 1e-12) out.push_back(v / nv);
    }
  }
  return out;
}

ProbeReport probe_sphere(const Scenario& sc, double radius, int count, std::uint64_t seed,
                         const IntegratorConfig& cfg, unsigned threads) {
  if (!sc.constraints.is_euclidean())
    throw InvalidInput("sphere probe needs a Euclidean scenario");
  if (!(radius > 0.0)) throw InvalidInput("probe radius must be positive");
  const int m = sc.ambient_dim();

  ProbeReport rep;
  rep.scenario = sc.name;
  rep.radius = radius;
  rep.sample_count = count;
  rep.seed = seed;

  std::vector<Vec> x0s;
  std::vector<bool> is_candidate;
  if (sc.probe_candidates) {
    for (Vec& v : sc.probe_candidates(radius)) {
      x0s.push_back(std::move(v));
      is_candidate.push_back(true);
    }
  }
  rep.includes_candidates = !x0s.empty();
  for (const Vec& u : sphere_samples(m, count, seed)) {
    x0s.push_back(radius * u);
    is_candidate.push_back(false);
  }

  if (m < 3) rep.notes.push_back("2D: hypothesis n >= 3 not met; boundary non-convergence is not guaranteed");
  if (!sc.compact_path) {
    rep.notes.push_back("path is not compact; it cannot lie inside the ball");
  } else {
    double reach = 0.0;
    for (const Vec& p : sc.sample_path()) reach = std::max(reach, p.norm());
    if (!(reach < radius)) rep.notes.push_back("path is not contained in the open ball of radius R");
  }

  const std::vector<BatchResult> res = batch(sc.constraints, sc.surfaces, cfg, x0s, threads);
  for (std::size_t i = 0; i < res.size(); ++i) {
    ProbeStart ps;
    ps.x0 = res[i].x0;
    ps.candidate = is_candidate[i];
    ps.verdict = res[i].verdict;
    ps.final_e_norm = res[i].final_e_norm;
    ps.final_x = res[i].final_x;
    if (ps.verdict != Verdict::PathConverging) rep.non_converging.push_back(i);
    rep.starts.push_back(std::move(ps));
  }
  return rep;
}

nlohmann::json ProbeReport::to_json() const {
  nlohmann::json j;
  j["scenario"] = scenario;
  j["R"] = radius;
  j["N"] = sample_count;
  j["seed"] = seed;
  j["includes_candidates"] = includes_candidates;
  j["notes"] = notes;
  nlohmann::json all = nlohmann::json::array();
  for (const ProbeStart& s : starts) {
    all.push_back({{"x0", vec_json(s.x0)},
                   {"candidate", s.candidate},
                   {"verdict", to_string(s.verdict)},
                   {"final_e_norm", s.final_e_norm},
                   {"final_x", vec_json(s.final_x)}});
  }
  j["starts"] = all;
  j["non_converging"] = non_converging;
  std::size_t converging = starts.size() - non_converging.size();
  j["counts"] = {{"total", starts.size()},
                 {"path_converging", converging},
                 {"non_converging", non_converging.size()}};
  return j;
}

}  // namespace gvf
