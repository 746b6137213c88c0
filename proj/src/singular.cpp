#include <gvf/singular.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace gvf {

void GridSpec::validate() const {
  if (axes.empty()) throw InvalidInput("grid has no axes");
  for (const GridAxis& a : axes) {
    if (a.count < 2) throw InvalidInput("grid axis counts must be >= 2");
    if (!(a.hi > a.lo)) throw InvalidInput("grid axis needs lo < hi");
  }
}

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (const GridAxis& a : axes) n *= static_cast<std::size_t>(a.count);
  return n;
}

Vec GridSpec::params(std::size_t flat_index) const {
  Vec p(static_cast<int>(axes.size()));
  for (std::size_t d = 0; d < axes.size(); ++d) {
    const auto cnt = static_cast<std::size_t>(axes[d].count);
    p(static_cast<int>(d)) = axes[d].value(static_cast<int>(flat_index % cnt));
    flat_index /= cnt;
  }
  return p;
}

Vec GridSpec::point(const Vec& p) const { return chart ? chart(p) : p; }

double GridSpec::max_spacing() const {
  double h = 0.0;
  for (const GridAxis& a : axes) h = std::max(h, a.spacing());
  return h;
}

bool GridSpec::contains(const Vec& x, double margin) const {
  if (chart) return true;
  if (x.size() != static_cast<int>(axes.size())) return false;
  for (std::size_t d = 0; d < axes.size(); ++d) {
    const double v = x(static_cast<int>(d));
    if (v < axes[d].lo - margin || v > axes[d].hi + margin) return false;
  }
  return true;
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
  double med = v[mid];
  if (v.size() % 2 == 0) {
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<long>(mid));
    med = 0.5 * (med + lower);
  }
  return med;
}

Vec to_manifold(const ConstraintSystem& c, const Vec& x) {
  return c.is_euclidean() ? x : retract(c, x).x;
}

// Offsets of all neighbours in {-1, 0, 1}^d except the centre.
std::vector<std::vector<int>> neighbour_offsets(std::size_t d) {
  std::vector<std::vector<int>> out;
  std::vector<int> off(d, -1);
  while (true) {
    if (std::any_of(off.begin(), off.end(), [](int v) { return v != 0; })) out.push_back(off);
    std::size_t i = 0;
    while (i < d && off[i] == 1) off[i++] = -1;
    if (i == d) break;
    ++off[i];
  }
  return out;
}

}  // namespace

ScanResult scan(const ConstraintSystem& c, const SurfaceStack& s, const GridSpec& grid,
                const ScanOptions& opts) {
  grid.validate();
  ScanResult out;
  const std::size_t total = grid.size();
  out.samples.reserve(total);
  std::vector<double> norms;
  norms.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    GridSample g;
    g.params = grid.params(i);
    g.x = to_manifold(c, grid.point(g.params));
    g.chi_norm = field_value(c, s, g.x).norm();
    norms.push_back(g.chi_norm);
    out.samples.push_back(std::move(g));
  }
  out.median_chi_norm = median(norms);
  out.seed_tol = opts.seed_rel * out.median_chi_norm;
  out.merge_radius = opts.merge_cells * grid.max_spacing();

  const std::size_t dims = grid.axes.size();
  std::vector<std::size_t> strides(dims, 1);
  for (std::size_t d = 1; d < dims; ++d)
    strides[d] = strides[d - 1] * static_cast<std::size_t>(grid.axes[d - 1].count);
  const auto offsets = neighbour_offsets(dims);

  std::vector<std::size_t> candidates;
  std::vector<int> idx(dims);
  for (std::size_t i = 0; i < total; ++i) {
    const double v = norms[i];
    if (!(v <= out.seed_tol)) continue;
    std::size_t rem = i;
    for (std::size_t d = 0; d < dims; ++d) {
      idx[d] = static_cast<int>(rem % static_cast<std::size_t>(grid.axes[d].count));
      rem /= static_cast<std::size_t>(grid.axes[d].count);
    }
    bool is_min = true;
    for (const auto& off : offsets) {
      std::size_t j = 0;
      bool inside = true;
      for (std::size_t d = 0; d < dims && inside; ++d) {
        const int q = idx[d] + off[d];
        if (q < 0 || q >= grid.axes[d].count) inside = false;
        j += static_cast<std::size_t>(q) * strides[d];
      }
      if (inside && norms[j] < v) {
        is_min = false;
        break;
      }
    }
    if (is_min) candidates.push_back(i);
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) { return norms[a] < norms[b]; });
  for (std::size_t i : candidates) {
    const Vec& x = out.samples[i].x;
    const bool close = std::any_of(out.seeds.begin(), out.seeds.end(), [&](const Vec& sd) {
      return (sd - x).norm() <= out.merge_radius;
    });
    if (!close) out.seeds.push_back(x);
  }
  return out;
}

std::string to_string(SingularLabel l) {
  switch (l) {
    case SingularLabel::Source: return "Source";
    case SingularLabel::Sink: return "Sink";
    case SingularLabel::Saddle: return "Saddle";
    case SingularLabel::Degenerate: return "Degenerate";
  }
  return "Degenerate";
}

SingularLabel label_from_real_parts(const std::vector<double>& re, double lambda_tol) {
  if (re.empty()) return SingularLabel::Degenerate;
  bool pos = false;
  bool neg = false;
  for (double r : re) {
    if (!(std::abs(r) > lambda_tol)) return SingularLabel::Degenerate;
    (r > 0 ? pos : neg) = true;
  }
  if (pos && neg) return SingularLabel::Saddle;
  return pos ? SingularLabel::Source : SingularLabel::Sink;
}

Mat tangent_jacobian(const ConstraintSystem& c, const SurfaceStack& s, const Vec& x,
                     double fd_step) {
  const Mat basis = tangent_basis(c, x);
  const int n = static_cast<int>(basis.cols());
  Mat jac(n, n);
  for (int j = 0; j < n; ++j) {
    const Vec plus = field_value(c, s, to_manifold(c, x + fd_step * basis.col(j)));
    const Vec minus = field_value(c, s, to_manifold(c, x - fd_step * basis.col(j)));
    jac.col(j) = basis.transpose() * ((plus - minus) / (2.0 * fd_step));
  }
  return jac;
}

Classification classify(const ConstraintSystem& c, const SurfaceStack& s, const Vec& x,
                        double fd_step, double lambda_tol) {
  const Mat jac = tangent_jacobian(c, s, x, fd_step);
  Eigen::EigenSolver<Mat> eig(jac, false);
  Classification out;
  for (int i = 0; i < jac.rows(); ++i) out.eigen_real_parts.push_back(eig.eigenvalues()(i).real());
  std::sort(out.eigen_real_parts.begin(), out.eigen_real_parts.end(), std::greater<>());
  out.label = label_from_real_parts(out.eigen_real_parts, lambda_tol);
  return out;
}

namespace {

// Ambient central-difference Jacobian of the (extended) field.
Mat ambient_field_jacobian(const ConstraintSystem& c, const SurfaceStack& s, const Vec& x,
                           double h) {
  const int m = c.ambient_dim;
  Mat jac(m, m);
  Vec xp = x;
  Vec xm = x;
  for (int j = 0; j < m; ++j) {
    xp(j) = x(j) + h;
    xm(j) = x(j) - h;
    jac.col(j) = (field_value(c, s, xp) - field_value(c, s, xm)) / (2.0 * h);
    xp(j) = x(j);
    xm(j) = x(j);
  }
  return jac;
}

}  // namespace

SingularPoint refine(const ConstraintSystem& c, const SurfaceStack& s, const Vec& seed,
                     const RefineOptions& opts) {
  Vec x = to_manifold(c, seed);
  double norm = field_value(c, s, x).norm();

  SingularPoint out;
  bool degenerate_jacobian = false;
  for (int it = 0; it < opts.max_iters && norm > opts.refine_tol; ++it) {
    const Mat basis = tangent_basis(c, x);
    const Vec chi = field_value(c, s, x);
    const int m = c.ambient_dim;
    const int n = c.manifold_dim();
    const int k = c.constraint_count();

    Mat jac(m, m);
    Vec rhs(m);
    jac.topRows(n) = basis.transpose() * ambient_field_jacobian(c, s, x, opts.newton_fd_step);
    rhs.head(n) = basis.transpose() * chi;
    if (k > 0) {
      jac.bottomRows(k) = constraint_jacobian(c, x);
      rhs.tail(k) = residual(c, x);
    }
    Eigen::JacobiSVD<Mat> svd(jac, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec& sv = svd.singularValues();
    if (sv.minCoeff() < 1e-8 * std::max(1.0, sv.maxCoeff())) {
      degenerate_jacobian = true;
      break;
    }
    const Vec delta = -svd.solve(rhs);

    bool accepted = false;
    for (double alpha = 1.0; alpha >= 1.0 / 1024.0; alpha *= 0.5) {
      Vec trial;
      try {
        trial = to_manifold(c, x + alpha * delta);
      } catch (const Error&) {
        continue;
      }
      const double trial_norm = field_value(c, s, trial).norm();
      if (std::isfinite(trial_norm) && trial_norm < norm) {
        x = std::move(trial);
        norm = trial_norm;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }

  if (degenerate_jacobian && norm > opts.refine_tol) {
    out.x = to_manifold(c, seed);
    out.chi_norm = field_value(c, s, out.x).norm();
    out.label = SingularLabel::Degenerate;
    out.refined = false;
    return out;
  }
  if (!(norm <= opts.refine_tol)) {
    std::ostringstream os;
    os << "Newton stalled at ||chi|| = " << norm << " from seed " << seed.transpose();
    throw NewtonDiverged(os.str());
  }
  out.x = x;
  out.chi_norm = norm;
  const Classification cls = classify(c, s, x, opts.classify_fd_step, opts.lambda_tol);
  out.label = cls.label;
  out.eigen_real_parts = cls.eigen_real_parts;
  return out;
}

double convex_hull_area(std::vector<Eigen::Vector2d> pts) {
  if (pts.size() < 3) return 0.0;
  std::sort(pts.begin(), pts.end(), [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Eigen::Vector2d> hull(2 * pts.size());
  std::size_t h = 0;
  for (const auto& p : pts) {
    while (h >= 2 && cross(hull[h - 2], hull[h - 1], p) <= 0) --h;
    hull[h++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = h + 1; i-- > 0;) {
    while (h >= lower && cross(hull[h - 2], hull[h - 1], pts[i]) <= 0) --h;
    hull[h++] = pts[i];
  }
  hull.resize(h - 1);
  double area = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    area += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * std::abs(area);
}

namespace {

bool on_box_face(const GridSpec& grid, const Vec& x) {
  for (std::size_t d = 0; d < grid.axes.size(); ++d) {
    const GridAxis& a = grid.axes[d];
    const double eps = 1e-9 * (a.hi - a.lo);
    const double v = x(static_cast<int>(d));
    if (std::abs(v - a.lo) <= eps || std::abs(v - a.hi) <= eps) return true;
  }
  return false;
}

}  // namespace

SingularCensus find_singular_set(const ConstraintSystem& c, const SurfaceStack& s,
                                 const GridSpec& grid, const PathSamples& path,
                                 const CensusOptions& opts) {
  SingularCensus out;
  out.scan = scan(c, s, grid, opts.scan);

  // Exact zeros on the grid, deduplicated by position (charts can map many
  // parameters to one point, e.g. a pole).
  std::vector<Vec> zeros;
  for (const GridSample& g : out.scan.samples) {
    if (g.chi_norm > opts.refine.refine_tol) continue;
    const bool dup = std::any_of(zeros.begin(), zeros.end(),
                                 [&](const Vec& z) { return (z - g.x).norm() <= 1e-9; });
    if (!dup) zeros.push_back(g.x);
  }
  if (zeros.size() >= opts.region_min_cells) {
    // Single-linkage clusters at merge radius; a big one is a filled region.
    std::vector<int> label(zeros.size(), -1);
    int clusters = 0;
    std::size_t biggest = 0;
    int biggest_label = -1;
    for (std::size_t i = 0; i < zeros.size(); ++i) {
      if (label[i] >= 0) continue;
      std::vector<std::size_t> stack{i};
      label[i] = clusters;
      std::size_t size = 0;
      while (!stack.empty()) {
        const std::size_t cur = stack.back();
        stack.pop_back();
        ++size;
        for (std::size_t j = 0; j < zeros.size(); ++j)
          if (label[j] < 0 && (zeros[j] - zeros[cur]).norm() <= out.scan.merge_radius) {
            label[j] = clusters;
            stack.push_back(j);
          }
      }
      if (size > biggest) {
        biggest = size;
        biggest_label = clusters;
      }
      ++clusters;
    }
    if (biggest >= opts.region_min_cells) {
      SingularRegion region;
      region.zero_cells = biggest;
      std::vector<Eigen::Vector2d> pts;
      for (std::size_t i = 0; i < zeros.size(); ++i)
        if (label[i] == biggest_label && c.ambient_dim == 2) pts.emplace_back(zeros[i](0), zeros[i](1));
      if (c.ambient_dim == 2) region.hull_area = convex_hull_area(pts);
      for (const Vec& sd : out.scan.seeds)
        if (field_value(c, s, sd).norm() <= opts.refine.refine_tol) region.seeds.push_back(sd);
      out.region = std::move(region);
    }
  }

  const double merge = std::max(1e-6, 0.5 * out.scan.merge_radius);
  for (const Vec& seed : out.scan.seeds) {
    if (out.region && field_value(c, s, seed).norm() <= opts.refine.refine_tol) continue;
    SingularPoint p;
    try {
      p = refine(c, s, seed, opts.refine);
    } catch (const Error& err) {
      out.diagnostics.push_back(std::string("seed discarded: ") + err.what());
      continue;
    }
    if (!p.refined && !grid.chart && on_box_face(grid, seed)) {
      // |chi| decaying towards the box face, not a zero inside it.
      std::ostringstream os;
      os << "unrefined minimum on the scan-box face discarded: " << seed.transpose()
         << " (|chi| = " << p.chi_norm << ")";
      out.diagnostics.push_back(os.str());
      continue;
    }
    if (!grid.contains(p.x)) {
      std::ostringstream os;
      os << "refined point outside scan box discarded: " << p.x.transpose();
      out.diagnostics.push_back(os.str());
      continue;
    }
    const bool dup = std::any_of(out.points.begin(), out.points.end(), [&](const SingularPoint& q) {
      return (q.x - p.x).norm() <= merge;
    });
    if (dup) continue;
    if (!path.empty()) p.dist_to_path = distance_to_path(path, p.x);
    out.points.push_back(std::move(p));
  }
  return out;
}

AssumptionReport check_assumptions(const ConstraintSystem& c, const SurfaceStack& s,
                                   const std::vector<SingularPoint>& singulars,
                                   const PathSamples& path, const std::vector<Vec>& samples,
                                   const std::vector<double>& kappas,
                                   const AssumptionOptions& opts) {
  (void)c;
  AssumptionReport rep;
  rep.singular_count = singulars.size();
  for (const SingularPoint& p : singulars)
    rep.min_dist_singular_to_path =
        std::min(rep.min_dist_singular_to_path, distance_to_path(path, p.x));
  rep.assumption1_ok = singulars.empty() || rep.min_dist_singular_to_path > opts.assumption1_tol;

  std::vector<double> dist(samples.size());
  std::vector<double> err(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    dist[i] = distance_to_path(path, samples[i]);
    err[i] = path_error(s, samples[i]).norm();
  }
  for (double kappa : kappas) {
    ShellFinding f;
    f.kappa = kappa;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (dist[i] < kappa) continue;
      ++f.samples;
      if (err[i] < f.min_e_norm) {
        f.min_e_norm = err[i];
        f.argmin = samples[i];
      }
    }
    f.flagged = f.samples > 0 && f.min_e_norm < opts.floor_tol;
    rep.assumption2_flagged = rep.assumption2_flagged || f.flagged;
    rep.shells.push_back(std::move(f));
  }
  return rep;
}

}  // namespace gvf
