#pragma once

#include <gvf/field.hpp>

#include <string>
#include <vector>

namespace gvf {

struct IntegratorConfig {
  double dt = 1e-3;
  double t_max = 200.0;
  int retract_every = 1;
  double tol_path = 1e-3;
  double tol_singular = 1e-6;
  double dwell_time = 1.0;
  double escape_radius = 1e6;
  /// Stop as soon as a verdict is established; otherwise keep integrating to
  /// t_max with the first verdict retained.
  bool stop_at_verdict = true;
  /// Keep every record_stride-th sample (the first and last are always kept).
  int record_stride = 1;

  void validate() const;
};

enum class Verdict { PathConverging, SingularConverging, Inconclusive, Diverged, NumericFailure };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct TrajectorySample {
  double t = 0.0;
  Vec x;
  double e_norm = 0.0;
  double V = 0.0;
  double chi_norm = 0.0;
  double residual = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  Verdict verdict = Verdict::Inconclusive;
  double verdict_time = -1.0;
  /// Largest per-step increase (V_{i+1} - V_i) / (1 + V_i) over every step,
  /// retained or not. Non-positive up to round-off when V is monotone.
  double max_relative_V_increase = 0.0;
  double max_residual = 0.0;
  std::string failure_message;

  const TrajectorySample& final_sample() const { return samples.back(); }
};

/// One classical RK4 step of xi' = chi(xi). For k > 0 every stage is
/// evaluated at a retracted point and, when `retract_result`, so is the result.
Vec rk4_step(const ConstraintSystem& c, const SurfaceStack& s, const Vec& x, double dt,
             bool retract_result = true);

/// Fixed-step flow map to t_end (no verdict logic).
Vec propagate(const ConstraintSystem& c, const SurfaceStack& s, const Vec& x0, double dt,
              double t_end);

/// Integrates from x0 (retracted first) and classifies the run. Numeric
/// failures become the NumericFailure verdict instead of escaping.
Trajectory integrate(const ConstraintSystem& c, const SurfaceStack& s,
                     const IntegratorConfig& cfg, const Vec& x0);

/// Dense sample of the desired path.
using PathSamples = std::vector<Vec>;

struct DistancePoint {
  double t = 0.0;
  double dist = 0.0;
};

double distance_to_path(const PathSamples& path, const Vec& x);

/// Nearest-sample distance of every retained trajectory sample to the path.
std::vector<DistancePoint> audit_distance(const Trajectory& traj, const PathSamples& path);

struct BatchResult {
  Vec x0;
  Verdict verdict = Verdict::Inconclusive;
  double final_e_norm = 0.0;
  Vec final_x;
  double max_relative_V_increase = 0.0;
  double max_residual = 0.0;
};

/// Element-wise integrate; order-preserving and independent of thread count.
/// Worker count is bounded by `threads` (0 = GVF_THREADS or hardware).
std::vector<BatchResult> batch(const ConstraintSystem& c, const SurfaceStack& s,
                               const IntegratorConfig& cfg, const std::vector<Vec>& x0s,
                               unsigned threads = 0);

/// Worker count from GVF_THREADS, else hardware concurrency, at least 1.
unsigned default_thread_count();

}  // namespace gvf
