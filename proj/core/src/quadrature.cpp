// quadrature.cpp

#include "oqs/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include <gsl/gsl_integration.h>

namespace oqs {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(static_cast<size_t>(n));
  if (table == nullptr) throw std::runtime_error("gauss_legendre: table allocation failed");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i)
    gsl_integration_glfixed_point(-1.0, 1.0, static_cast<size_t>(i), &rule.nodes[i],
                                  &rule.weights[i], table);
  gsl_integration_glfixed_table_free(table);

  // GSL computes untabulated orders to about 1e-11; two Newton steps restore full precision.
  if (n > 1) {
    for (int i = 0; i < n; ++i) {
      double x = rule.nodes[i];
      for (int it = 0; it < 2; ++it) {
        const auto [p, dp] = legendre(n, x);
        x -= p / dp;
      }
      const double dp = legendre(n, x).second;
      rule.nodes[i] = x;
      rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
  return rule;
}

}  // namespace oqs
