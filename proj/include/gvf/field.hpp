#pragma once

#include <gvf/manifold.hpp>

#include <vector>

namespace gvf {

/// The n-1 surface functions (ambient extensions) whose common zero set is
/// the desired path, with their gains and the direction of travel.
struct SurfaceStack {
  std::vector<ScalarField> phi;
  std::vector<GradientField> grad_phi;
  Vec gains;
  int propagation_sign = 1;

  int count() const { return static_cast<int>(phi.size()); }

  /// Requires count == n - 1, positive gains, sign in {+1, -1}.
  void validate(const ConstraintSystem& c) const;
};

/// Everything a single field evaluation produces at a point.
struct FieldSample {
  Vec x;
  Vec chi;
  std::vector<Vec> grads;  // Riemannian gradients grad phi_i
  Vec bot;                 // orthogonal (propagation) term
  Vec e;                   // path-following error
  double V = 0.0;          // e^T K e
  double V_dot = 0.0;      // -2 ||conv_term||^2
  Vec conv_term;           // sum_i k_i phi_i grad phi_i
};

/// (phi_1(x), ..., phi_{n-1}(x)).
Vec path_error(const SurfaceStack& s, const Vec& x);

/// e^T K e.
double lyapunov_value(const SurfaceStack& s, const Vec& e);

/// Tangent projection of the ambient gradient of phi_i.
Vec riemannian_gradient(const ConstraintSystem& c, const SurfaceStack& s,
                        const Vec& x, int i);

/// Formal determinant with a column of basis vectors appended: component i is
/// the cofactor (-1)^{i+m} det(M_i), M_i being `columns` with row i deleted.
/// `columns` is m x (m-1). Reduces to the 90-degree rotation for m = 2 and the
/// cross product for m = 3. Evaluated from one Householder QR when m >= 4.
Vec formal_cofactor_vector(const Mat& columns);

/// The same vector by literal expansion: m determinants of the
/// (m-1) x (m-1) minors, each by partially pivoted elimination.
Vec cofactor_expansion(const Mat& columns);

/// Propagation term built from [grad f_1 .. grad f_k, grad phi_1 .. grad phi_{n-1}, b],
/// scaled by the propagation sign. May be the zero vector.
Vec orthogonal_term(const ConstraintSystem& c, const SurfaceStack& s, const Vec& x);

FieldSample evaluate_field(const ConstraintSystem& c, const SurfaceStack& s, const Vec& x);

/// Only chi; same arithmetic as evaluate_field without the bookkeeping.
Vec field_value(const ConstraintSystem& c, const SurfaceStack& s, const Vec& x);

struct RateComparison {
  double analytic = 0.0;
  double finite_difference = 0.0;
};

/// Analytic V_dot against (V(retract(x + h chi)) - V(retract(x - h chi))) / 2h.
RateComparison lyapunov_rate_fd_check(const ConstraintSystem& c, const SurfaceStack& s,
                                      const Vec& x, double h);

}  // namespace gvf
