#pragma once

#include <gvf/integrate.hpp>

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace gvf {

struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  int count = 2;

  double value(int i) const { return lo + (hi - lo) * i / (count - 1); }
  double spacing() const { return (hi - lo) / (count - 1); }
};

/// Regular grid over a coordinate box. For k = 0 the coordinates are ambient;
/// for k > 0 `chart` maps grid parameters onto the manifold.
struct GridSpec {
  std::vector<GridAxis> axes;
  std::function<Vec(const Vec&)> chart;

  void validate() const;
  std::size_t size() const;
  Vec params(std::size_t flat_index) const;
  Vec point(const Vec& params) const;
  double max_spacing() const;
  /// Whether an ambient point lies in the box (k = 0 only; true otherwise).
  bool contains(const Vec& x, double margin = 1e-9) const;
};

struct GridSample {
  Vec params;
  Vec x;
  double chi_norm = 0.0;
};

struct ScanOptions {
  double seed_rel = 1e-2;    // seed_tol = seed_rel * median grid ||chi||
  double merge_cells = 2.0;  // merge_radius = merge_cells * max grid spacing
};

struct ScanResult {
  std::vector<GridSample> samples;
  std::vector<Vec> seeds;
  double median_chi_norm = 0.0;
  double seed_tol = 0.0;
  double merge_radius = 0.0;
};

/// Grid points where ||chi|| is a local minimum below seed_tol, deduplicated.
ScanResult scan(const ConstraintSystem& c, const SurfaceStack& s, const GridSpec& grid,
                const ScanOptions& opts = {});

enum class SingularLabel { Source, Sink, Saddle, Degenerate };

std::string to_string(SingularLabel l);

struct Classification {
  SingularLabel label = SingularLabel::Degenerate;
  std::vector<double> eigen_real_parts;  // descending
};

struct SingularPoint {
  Vec x;
  double chi_norm = 0.0;
  std::vector<double> eigen_real_parts;
  SingularLabel label = SingularLabel::Degenerate;
  double dist_to_path = std::numeric_limits<double>::quiet_NaN();
  bool refined = true;
};

struct RefineOptions {
  double refine_tol = 1e-10;
  int max_iters = 50;
  double newton_fd_step = 1e-6;
  double classify_fd_step = 1e-5;
  double lambda_tol = 1e-6;
};

/// Label from real parts: Degenerate if any |re| <= lambda_tol, else
/// Source / Sink / Saddle by sign pattern.
SingularLabel label_from_real_parts(const std::vector<double>& real_parts, double lambda_tol);

/// Tangent-restricted Jacobian of chi at x by central differences on
/// retracted evaluations.
Mat tangent_jacobian(const ConstraintSystem& c, const SurfaceStack& s, const Vec& x,
                     double fd_step);

Classification classify(const ConstraintSystem& c, const SurfaceStack& s, const Vec& x,
                        double fd_step = 1e-5, double lambda_tol = 1e-6);

/// Newton on [B^T chi(x); F(x) - a] (B an orthonormal tangent basis) until
/// ||chi|| <= refine_tol. Throws NewtonDiverged. A numerically singular
/// Jacobian yields a Degenerate point left at the seed (refined = false).
SingularPoint refine(const ConstraintSystem& c, const SurfaceStack& s, const Vec& seed,
                     const RefineOptions& opts = {});

/// A singular set with non-empty interior, reported as a seed cloud.
struct SingularRegion {
  std::vector<Vec> seeds;
  std::size_t zero_cells = 0;
  /// Convex-hull area of the zero cells (first two coordinates; 2D ambient only).
  double hull_area = std::numeric_limits<double>::quiet_NaN();
};

struct SingularCensus {
  ScanResult scan;
  std::vector<SingularPoint> points;
  std::optional<SingularRegion> region;
  std::vector<std::string> diagnostics;
};

struct CensusOptions {
  ScanOptions scan;
  RefineOptions refine;
  /// Clusters of at least this many distinct exact zeros are treated as a region.
  std::size_t region_min_cells = 9;
};

/// scan + refine + classify + deduplicate; `path` (may be empty) fills dist_to_path.
SingularCensus find_singular_set(const ConstraintSystem& c, const SurfaceStack& s,
                                 const GridSpec& grid, const PathSamples& path,
                                 const CensusOptions& opts = {});

double convex_hull_area(std::vector<Eigen::Vector2d> pts);

struct ShellFinding {
  double kappa = 0.0;
  std::size_t samples = 0;
  double min_e_norm = std::numeric_limits<double>::infinity();
  Vec argmin;
  bool flagged = false;
};

struct AssumptionReport {
  std::size_t singular_count = 0;
  double min_dist_singular_to_path = std::numeric_limits<double>::infinity();
  bool assumption1_ok = true;
  std::vector<ShellFinding> shells;
  bool assumption2_flagged = false;
};

struct AssumptionOptions {
  double assumption1_tol = 1e-3;
  double floor_tol = 1e-6;
};

/// Checks that singular points stay away from the path, and, per kappa, that
/// min ||e|| over samples at distance >= kappa stays above a floor.
AssumptionReport check_assumptions(const ConstraintSystem& c, const SurfaceStack& s,
                                   const std::vector<SingularPoint>& singulars,
                                   const PathSamples& path, const std::vector<Vec>& samples,
                                   const std::vector<double>& kappas,
                                   const AssumptionOptions& opts = {});

}  // namespace gvf
