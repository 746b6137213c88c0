#include <gvf/integrate.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

namespace gvf {

void IntegratorConfig::validate() const {
  if (!(dt > 0.0)) throw InvalidInput("dt must be positive");
  if (!(t_max > 0.0)) throw InvalidInput("t_max must be positive");
  if (retract_every < 1) throw InvalidInput("retract_every must be >= 1");
  if (!(tol_path > 0.0) || !(tol_singular > 0.0))
    throw InvalidInput("tolerances must be positive");
  if (!(dwell_time >= 0.0)) throw InvalidInput("dwell_time must be >= 0");
  if (record_stride < 1) throw InvalidInput("record_stride must be >= 1");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::PathConverging: return "PathConverging";
    case Verdict::SingularConverging: return "SingularConverging";
    case Verdict::Inconclusive: return "Inconclusive";
    case Verdict::Diverged: return "Diverged";
    case Verdict::NumericFailure: return "NumericFailure";
  }
  return "Inconclusive";
}

Verdict verdict_from_string(const std::string& s) {
  for (Verdict v : {Verdict::PathConverging, Verdict::SingularConverging, Verdict::Inconclusive,
                    Verdict::Diverged, Verdict::NumericFailure})
    if (to_string(v) == s) return v;
  throw InvalidInput("unknown verdict '" + s + "'");
}

namespace {

Vec on_manifold(const ConstraintSystem& c, const Vec& x) {
  if (c.is_euclidean()) return x;
  return retract(c, x).x;
}

// RK4 with the first stage supplied by the caller.
Vec rk4_from(const ConstraintSystem& c, const SurfaceStack& s, const Vec& x, const Vec& k1,
             double dt, bool retract_result) {
  const Vec k2 = field_value(c, s, on_manifold(c, x + 0.5 * dt * k1));
  const Vec k3 = field_value(c, s, on_manifold(c, x + 0.5 * dt * k2));
  const Vec k4 = field_value(c, s, on_manifold(c, x + dt * k3));
  Vec next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) throw NumericFailure("rk4_step: non-finite state");
  if (retract_result) next = on_manifold(c, next);
  return next;
}

}  // namespace

Vec rk4_step(const ConstraintSystem& c, const SurfaceStack& s, const Vec& x, double dt,
             bool retract_result) {
  return rk4_from(c, s, x, field_value(c, s, x), dt, retract_result);
}

Vec propagate(const ConstraintSystem& c, const SurfaceStack& s, const Vec& x0, double dt,
              double t_end) {
  const long steps = std::lround(t_end / dt);
  Vec x = on_manifold(c, x0);
  for (long i = 0; i < steps; ++i) x = rk4_step(c, s, x, dt);
  return x;
}

Trajectory integrate(const ConstraintSystem& c, const SurfaceStack& s,
                     const IntegratorConfig& cfg, const Vec& x0) {
  cfg.validate();
  Trajectory traj;

  Vec chi_here;
  auto make_sample = [&](double t, const Vec& x) {
    TrajectorySample smp;
    smp.t = t;
    smp.x = x;
    FieldSample f = evaluate_field(c, s, x);
    chi_here = std::move(f.chi);
    smp.e_norm = f.e.norm();
    smp.V = f.V;
    smp.chi_norm = chi_here.norm();
    smp.residual = residual_norm(c, x);
    if (!std::isfinite(smp.e_norm) || !std::isfinite(smp.chi_norm) || !std::isfinite(smp.V))
      throw NumericFailure("integrate: non-finite field sample");
    return smp;
  };

  const long max_steps = std::lround(cfg.t_max / cfg.dt);
  double path_since = std::numeric_limits<double>::quiet_NaN();
  double singular_since = std::numeric_limits<double>::quiet_NaN();
  bool decided = false;

  auto decide = [&](const TrajectorySample& smp) {
    if (decided) return;
    if (smp.x.norm() > cfg.escape_radius) {
      traj.verdict = Verdict::Diverged;
      traj.verdict_time = smp.t;
      decided = true;
      return;
    }
    const bool on_path = smp.e_norm <= cfg.tol_path;
    const bool at_singular = !on_path && smp.chi_norm <= cfg.tol_singular;
    if (on_path) {
      if (std::isnan(path_since)) path_since = smp.t;
    } else {
      path_since = std::numeric_limits<double>::quiet_NaN();
    }
    if (at_singular) {
      if (std::isnan(singular_since)) singular_since = smp.t;
    } else {
      singular_since = std::numeric_limits<double>::quiet_NaN();
    }
    // Small slack so that dwell_time = k * dt is reached on step k.
    const double slack = 1e-9 * cfg.dt;
    if (!std::isnan(path_since) && smp.t - path_since >= cfg.dwell_time - slack) {
      traj.verdict = Verdict::PathConverging;
    } else if (!std::isnan(singular_since) &&
               smp.t - singular_since >= cfg.dwell_time - slack) {
      traj.verdict = Verdict::SingularConverging;
    } else {
      return;
    }
    traj.verdict_time = smp.t;
    decided = true;
  };

  try {
    Vec x = on_manifold(c, x0);
    TrajectorySample current = make_sample(0.0, x);
    traj.samples.push_back(current);
    traj.max_residual = current.residual;
    decide(current);

    for (long i = 1; i <= max_steps && !(decided && cfg.stop_at_verdict); ++i) {
      const bool retract_now = (i % cfg.retract_every) == 0;
      x = rk4_from(c, s, x, chi_here, cfg.dt, retract_now);
      TrajectorySample next = make_sample(static_cast<double>(i) * cfg.dt, x);
      traj.max_relative_V_increase =
          std::max(traj.max_relative_V_increase, (next.V - current.V) / (1.0 + current.V));
      traj.max_residual = std::max(traj.max_residual, next.residual);
      current = std::move(next);
      decide(current);
      const bool last = i == max_steps || (decided && cfg.stop_at_verdict);
      if (last || i % cfg.record_stride == 0) traj.samples.push_back(current);
      if (traj.verdict == Verdict::Diverged) break;
    }
  } catch (const Error& err) {
    traj.verdict = Verdict::NumericFailure;
    traj.failure_message = err.what();
    decided = true;
  }
  if (!decided) traj.verdict = Verdict::Inconclusive;
  return traj;
}

double distance_to_path(const PathSamples& path, const Vec& x) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec& p : path) best = std::min(best, (p - x).squaredNorm());
  return std::sqrt(best);
}

std::vector<DistancePoint> audit_distance(const Trajectory& traj, const PathSamples& path) {
  std::vector<DistancePoint> out;
  out.reserve(traj.samples.size());
  for (const TrajectorySample& smp : traj.samples)
    out.push_back({smp.t, distance_to_path(path, smp.x)});
  return out;
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("GVF_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<BatchResult> batch(const ConstraintSystem& c, const SurfaceStack& s,
                               const IntegratorConfig& cfg, const std::vector<Vec>& x0s,
                               unsigned threads) {
  std::vector<BatchResult> results(x0s.size());
  if (x0s.empty()) return results;

  IntegratorConfig run_cfg = cfg;
  // Only the verdict and the final state are reported.
  run_cfg.record_stride = std::numeric_limits<int>::max();

  auto run_one = [&](std::size_t i) {
    const Trajectory traj = integrate(c, s, run_cfg, x0s[i]);
    BatchResult& r = results[i];
    r.x0 = x0s[i];
    r.verdict = traj.verdict;
    if (traj.samples.empty()) {
      r.final_x = x0s[i];
      r.final_e_norm = std::numeric_limits<double>::quiet_NaN();
    } else {
      r.final_x = traj.final_sample().x;
      r.final_e_norm = traj.final_sample().e_norm;
    }
    r.max_relative_V_increase = traj.max_relative_V_increase;
    r.max_residual = traj.max_residual;
  };

  if (threads == 0) threads = default_thread_count();
  threads = std::min<unsigned>(threads, static_cast<unsigned>(x0s.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < x0s.size(); ++i) run_one(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < x0s.size(); i = next++) run_one(i);
    });
  for (std::thread& t : pool) t.join();
  return results;
}

}  // namespace gvf
