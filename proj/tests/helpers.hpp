#pragma once

#include <gvf/scenarios.hpp>

#include <initializer_list>
#include <random>

namespace testing_support {

inline gvf::Vec v(std::initializer_list<double> xs) {
  gvf::Vec out(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) out(i++) = x;
  return out;
}

/// Central-difference gradient, used only as an oracle.
inline gvf::Vec fd_gradient(const gvf::ScalarField& f, const gvf::Vec& x, double h = 1e-6) {
  gvf::Vec g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    gvf::Vec a = x, b = x;
    a(i) += h;
    b(i) -= h;
    g(i) = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

inline gvf::Vec cross(const gvf::Vec& a, const gvf::Vec& b) {
  return v({a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0)});
}

inline gvf::Vec random_unit(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> n(0.0, 1.0);
  gvf::Vec x(m);
  for (int i = 0; i < m; ++i) x(i) = n(rng);
  return x / x.norm();
}

}  // namespace testing_support
