#pragma once

#include <gvf/types.hpp>

#include <limits>
#include <string>
#include <vector>

namespace gvf {

/// An embedded manifold M = F^{-1}(a) in R^m described by k scalar
/// constraints f_j(x) = a_j with analytic gradients. k = 0 is R^m itself.
struct ConstraintSystem {
  std::string name;
  int ambient_dim = 0;
  std::vector<ScalarField> f;
  std::vector<GradientField> grad_f;
  Vec regular_value;

  int constraint_count() const { return static_cast<int>(f.size()); }
  int manifold_dim() const { return ambient_dim - constraint_count(); }
  bool is_euclidean() const { return f.empty(); }

  /// Throws InvalidInput when the bookkeeping is inconsistent (n >= 2, sizes).
  void validate() const;

  static ConstraintSystem euclidean(int m, std::string name = "euclidean");
};

struct ManifoldPoint {
  Vec x;
  double residual = 0.0;
};

struct RetractionOptions {
  double on_manifold_tol = 1e-10;
  double capture_threshold = 0.5;
  int max_newton_iters = 50;
};

/// RankDeficient guard: sigma_min < rank_rel_tol * max(1, ||J||).
inline constexpr double kRankRelTol = 1e-8;

/// (f_1(x) - a_1, ..., f_k(x) - a_k); empty for k = 0.
Vec residual(const ConstraintSystem& c, const Vec& x);

/// max_j |f_j(x) - a_j|, 0 for k = 0.
double residual_norm(const ConstraintSystem& c, const Vec& x);

/// k x m matrix whose rows are the constraint gradients.
Mat constraint_jacobian(const ConstraintSystem& c, const Vec& x);

/// Orthogonal projector onto T_x M built once per point. Uses the Gram-matrix
/// least-squares form, so the constraint gradients need not be orthogonal.
class TangentProjector {
 public:
  TangentProjector(const ConstraintSystem& c, const Vec& x);

  Vec apply(const Vec& v) const;
  const Mat& jacobian() const { return jac_; }

 private:
  Mat jac_;
  Mat gram_inv_;
};

Vec project_to_tangent(const ConstraintSystem& c, const Vec& x, const Vec& v);

/// Gauss-Newton retraction x <- x - J^T (J J^T)^{-1} (F(x) - a).
ManifoldPoint retract(const ConstraintSystem& c, const Vec& x,
                      const RetractionOptions& opts = {});

/// Smallest singular value of the constraint Jacobian; +inf when k = 0.
double check_regularity(const ConstraintSystem& c, const Vec& x);

/// Orthonormal basis of T_x M as the columns of an m x n matrix.
Mat tangent_basis(const ConstraintSystem& c, const Vec& x);

}  // namespace gvf
