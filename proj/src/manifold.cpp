#include <gvf/manifold.hpp>

#include <cmath>
#include <sstream>

namespace gvf {

void ConstraintSystem::validate() const {
  if (ambient_dim <= 0) throw InvalidInput("ambient dimension must be positive");
  if (f.size() != grad_f.size())
    throw InvalidInput("constraint and gradient counts differ for " + name);
  if (regular_value.size() != constraint_count())
    throw InvalidInput("regular value size does not match constraint count for " + name);
  if (manifold_dim() < 2) {
    std::ostringstream os;
    os << "manifold dimension " << manifold_dim() << " < 2 for " << name;
    throw InvalidInput(os.str());
  }
}

ConstraintSystem ConstraintSystem::euclidean(int m, std::string name) {
  ConstraintSystem c;
  c.name = std::move(name);
  c.ambient_dim = m;
  c.regular_value = Vec(0);
  return c;
}

Vec residual(const ConstraintSystem& c, const Vec& x) {
  const int k = c.constraint_count();
  Vec r(k);
  for (int j = 0; j < k; ++j) r(j) = c.f[j](x) - c.regular_value(j);
  return r;
}

double residual_norm(const ConstraintSystem& c, const Vec& x) {
  if (c.is_euclidean()) return 0.0;
  return residual(c, x).cwiseAbs().maxCoeff();
}

Mat constraint_jacobian(const ConstraintSystem& c, const Vec& x) {
  const int k = c.constraint_count();
  Mat jac(k, c.ambient_dim);
  for (int j = 0; j < k; ++j) jac.row(j) = c.grad_f[j](x).transpose();
  return jac;
}

namespace {

// Inverse of the Gram matrix J J^T; throws RankDeficient when
// sigma_min(J) < kRankRelTol * max(1, sigma_max(J)).
Mat regular_gram_inverse(const Mat& jac) {
  const Mat gram = jac.lazyProduct(jac.transpose());
  const int k = static_cast<int>(gram.rows());
  if (k == 1) {
    const double g = gram(0, 0);
    const double sigma = std::sqrt(std::max(g, 0.0));
    if (!(sigma >= kRankRelTol * std::max(1.0, sigma))) {
      std::ostringstream os;
      os << "constraint Jacobian is rank deficient (sigma=" << sigma << ")";
      throw RankDeficient(os.str());
    }
    return Mat::Constant(1, 1, 1.0 / g);
  }
  // Cheap certificate: lambda_min >= 1 / |G^-1|_F and lambda_max <= trace(G).
  const double floor2 = kRankRelTol * kRankRelTol;
  Eigen::LLT<Mat> llt(gram);
  if (llt.info() == Eigen::Success) {
    Mat inv = llt.solve(Mat::Identity(k, k));
    const double lower = 1.0 / inv.norm();
    if (std::isfinite(lower) && lower >= floor2 * std::max(1.0, gram.trace())) return inv;
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(gram);
  const Vec& lambda = eig.eigenvalues();
  const double sigma_min = std::sqrt(std::max(lambda.minCoeff(), 0.0));
  const double sigma_max = std::sqrt(std::max(lambda.maxCoeff(), 0.0));
  if (!(sigma_min >= kRankRelTol * std::max(1.0, sigma_max))) {
    std::ostringstream os;
    os << "constraint Jacobian is rank deficient (sigma_min=" << sigma_min
       << ", sigma_max=" << sigma_max << ")";
    throw RankDeficient(os.str());
  }
  return eig.eigenvectors() * lambda.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

TangentProjector::TangentProjector(const ConstraintSystem& c, const Vec& x) {
  if (c.is_euclidean()) return;
  jac_ = constraint_jacobian(c, x);
  gram_inv_ = regular_gram_inverse(jac_);
}

Vec TangentProjector::apply(const Vec& v) const {
  if (jac_.rows() == 0) return v;
  return v - jac_.transpose() * (gram_inv_ * (jac_ * v));
}

Vec project_to_tangent(const ConstraintSystem& c, const Vec& x, const Vec& v) {
  return TangentProjector(c, x).apply(v);
}

ManifoldPoint retract(const ConstraintSystem& c, const Vec& x,
                      const RetractionOptions& opts) {
  ManifoldPoint p{x, 0.0};
  if (c.is_euclidean()) return p;
  if (!x.allFinite()) throw NumericFailure("retract: non-finite point");

  Vec r = residual(c, p.x);
  p.residual = r.cwiseAbs().maxCoeff();
  if (p.residual <= opts.on_manifold_tol) return p;
  if (!(p.residual <= opts.capture_threshold)) {
    std::ostringstream os;
    os << "retract: residual " << p.residual << " outside capture threshold "
       << opts.capture_threshold;
    throw RetractionDiverged(os.str());
  }

  for (int it = 0; it < opts.max_newton_iters; ++it) {
    const Mat jac = constraint_jacobian(c, p.x);
    p.x -= jac.transpose() * (regular_gram_inverse(jac) * r);
    r = residual(c, p.x);
    p.residual = r.cwiseAbs().maxCoeff();
    if (!std::isfinite(p.residual)) throw NumericFailure("retract: non-finite residual");
    if (p.residual <= opts.on_manifold_tol) return p;
  }
  std::ostringstream os;
  os << "retract: residual " << p.residual << " after " << opts.max_newton_iters
     << " Gauss-Newton iterations";
  throw RetractionDiverged(os.str());
}

double check_regularity(const ConstraintSystem& c, const Vec& x) {
  if (c.is_euclidean()) return std::numeric_limits<double>::infinity();
  const Mat jac = constraint_jacobian(c, x);
  Eigen::JacobiSVD<Mat> svd(jac);
  return svd.singularValues().minCoeff();
}

Mat tangent_basis(const ConstraintSystem& c, const Vec& x) {
  const int m = c.ambient_dim;
  if (c.is_euclidean()) return Mat::Identity(m, m);
  const Mat jac = constraint_jacobian(c, x);
  Eigen::JacobiSVD<Mat> svd(jac, Eigen::ComputeFullV);
  const Vec& sv = svd.singularValues();
  if (!(sv.minCoeff() >= kRankRelTol * std::max(1.0, sv.maxCoeff())))
    throw RankDeficient("constraint Jacobian is rank deficient");
  return svd.matrixV().rightCols(c.manifold_dim());
}

}  // namespace gvf
