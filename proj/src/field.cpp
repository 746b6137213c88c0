#include <gvf/field.hpp>

#include <cmath>
#include <sstream>

namespace gvf {

namespace {

// Minors never exceed 15 x 15 at the dimensions this library targets; the
// bounded type keeps them off the heap.
constexpr int kMaxMinor = 15;
using Minor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxMinor, kMaxMinor>;

// Determinant by Gaussian elimination with partial pivoting, in place.
double lu_determinant(Minor& a) {
  const int n = static_cast<int>(a.rows());
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::abs(a(col, col));
    for (int r = col + 1; r < n; ++r) {
      const double v = std::abs(a(r, col));
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best == 0.0) return 0.0;
    if (pivot != col) {
      a.row(pivot).swap(a.row(col));
      det = -det;
    }
    const double d = a(col, col);
    det *= d;
    for (int r = col + 1; r < n; ++r) {
      const double factor = a(r, col) / d;
      if (factor == 0.0) continue;
      for (int cc = col + 1; cc < n; ++cc) a(r, cc) -= factor * a(col, cc);
    }
  }
  return det;
}

struct FieldParts {
  std::vector<Vec> grads;
  Vec bot;
  Vec e;
  Vec conv;
};

FieldParts compute_parts(const ConstraintSystem& c, const SurfaceStack& s, const Vec& x) {
  const int m = c.ambient_dim;
  const int k = c.constraint_count();
  const int q = s.count();
  const TangentProjector proj(c, x);

  FieldParts p;
  p.grads.reserve(q);
  p.e.resize(q);
  p.conv = Vec::Zero(m);
  Mat columns(m, m - 1);
  if (k > 0) columns.leftCols(k) = proj.jacobian().transpose();
  for (int i = 0; i < q; ++i) {
    p.grads.push_back(proj.apply(s.grad_phi[i](x)));
    p.e(i) = s.phi[i](x);
    columns.col(k + i) = p.grads.back();
    p.conv += s.gains(i) * p.e(i) * p.grads.back();
  }
  p.bot = formal_cofactor_vector(columns);
  if (s.propagation_sign < 0) p.bot = -p.bot;
  return p;
}

}  // namespace

void SurfaceStack::validate(const ConstraintSystem& c) const {
  const int expected = c.manifold_dim() - 1;
  if (count() != expected || static_cast<int>(grad_phi.size()) != expected) {
    std::ostringstream os;
    os << "expected " << expected << " surface functions for " << c.name << ", got "
       << count();
    throw InvalidInput(os.str());
  }
  if (gains.size() != expected) throw InvalidInput("gain count does not match surface count");
  for (int i = 0; i < gains.size(); ++i)
    if (!(gains(i) > 0.0)) throw InvalidInput("gains must be strictly positive");
  if (propagation_sign != 1 && propagation_sign != -1)
    throw InvalidInput("propagation sign must be +1 or -1");
}

Vec path_error(const SurfaceStack& s, const Vec& x) {
  Vec e(s.count());
  for (int i = 0; i < s.count(); ++i) e(i) = s.phi[i](x);
  return e;
}

double lyapunov_value(const SurfaceStack& s, const Vec& e) {
  return e.dot(s.gains.cwiseProduct(e));
}

Vec riemannian_gradient(const ConstraintSystem& c, const SurfaceStack& s, const Vec& x,
                        int i) {
  return project_to_tangent(c, x, s.grad_phi.at(i)(x));
}

Vec cofactor_expansion(const Mat& columns) {
  const int m = static_cast<int>(columns.rows());
  if (columns.cols() != m - 1) throw InvalidInput("formal determinant needs m x (m-1) columns");
  if (m - 1 > kMaxMinor) throw InvalidInput("ambient dimension too large for cofactor expansion");
  Vec out(m);
  if (m == 1) {
    out(0) = 1.0;
    return out;
  }
  Minor minor(m - 1, m - 1);
  for (int i = 0; i < m; ++i) {
    // Drop row i.
    if (i > 0) minor.topRows(i) = columns.topRows(i);
    if (i < m - 1) minor.bottomRows(m - 1 - i) = columns.bottomRows(m - 1 - i);
    // 1-based sign (-1)^{(i+1)+m}.
    const double sign = ((i + 1 + m) % 2 == 0) ? 1.0 : -1.0;
    out(i) = sign * lu_determinant(minor);
  }
  return out;
}

Vec formal_cofactor_vector(const Mat& columns) {
  const int m = static_cast<int>(columns.rows());
  if (columns.cols() != m - 1) throw InvalidInput("formal determinant needs m x (m-1) columns");
  if (m <= 3) return cofactor_expansion(columns);
  // [A | v] = Q [R | Q^T v], so det([A | e_i]) = det(Q) prod(diag R) Q(i, m-1).
  const Eigen::HouseholderQR<Mat> qr(columns);
  double scale = qr.matrixQR().diagonal().prod();
  for (int j = 0; j < qr.hCoeffs().size(); ++j)
    if (qr.hCoeffs()(j) != 0.0) scale = -scale;
  Vec last = Vec::Unit(m, m - 1);
  last.applyOnTheLeft(qr.householderQ());
  return scale * last;
}

Vec orthogonal_term(const ConstraintSystem& c, const SurfaceStack& s, const Vec& x) {
  return compute_parts(c, s, x).bot;
}

FieldSample evaluate_field(const ConstraintSystem& c, const SurfaceStack& s, const Vec& x) {
  FieldParts p = compute_parts(c, s, x);
  FieldSample out;
  out.x = x;
  out.chi = p.bot - p.conv;
  out.V = lyapunov_value(s, p.e);
  out.V_dot = -2.0 * p.conv.squaredNorm();
  out.grads = std::move(p.grads);
  out.bot = std::move(p.bot);
  out.e = std::move(p.e);
  out.conv_term = std::move(p.conv);
  return out;
}

Vec field_value(const ConstraintSystem& c, const SurfaceStack& s, const Vec& x) {
  FieldParts p = compute_parts(c, s, x);
  return p.bot - p.conv;
}

RateComparison lyapunov_rate_fd_check(const ConstraintSystem& c, const SurfaceStack& s,
                                      const Vec& x, double h) {
  if (!(h > 0.0)) throw InvalidInput("finite-difference step must be positive");
  const FieldSample f = evaluate_field(c, s, x);
  // Symmetric pair of retracted steps; the one-sided quotient carries an
  // O(h |chi|^2 |hess V|) bias that dominates on steep fields.
  const ManifoldPoint fwd = retract(c, x + h * f.chi);
  const ManifoldPoint bwd = retract(c, x - h * f.chi);
  const double v_fwd = lyapunov_value(s, path_error(s, fwd.x));
  const double v_bwd = lyapunov_value(s, path_error(s, bwd.x));
  return {f.V_dot, (v_fwd - v_bwd) / (2.0 * h)};
}

}  // namespace gvf
