#include "dmnls/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <memory>
#include <numeric>
#include <stdexcept>

namespace dmnls {

double QuadratureRule::weight_sum() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

QuadratureRule QuadratureRule::gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  if (!(b > a)) throw std::invalid_argument("gauss_legendre: empty interval");
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
      gsl_integration_glfixed_table_alloc(n), &gsl_integration_glfixed_table_free);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i)
    gsl_integration_glfixed_point(a, b, static_cast<std::size_t>(i), &rule.nodes[i], &rule.weights[i], table.get());
  return rule;
}

QuadratureRule QuadratureRule::composite_gauss_legendre(double a, double b, int panels, int n) {
  if (panels < 1) throw std::invalid_argument("composite_gauss_legendre: need at least one panel");
  QuadratureRule rule;
  const double h = (b - a) / panels;
  for (int j = 0; j < panels; ++j) {
    const auto panel = gauss_legendre(n, a + j * h, a + (j + 1) * h);
    rule.nodes.insert(rule.nodes.end(), panel.nodes.begin(), panel.nodes.end());
    rule.weights.insert(rule.weights.end(), panel.weights.begin(), panel.weights.end());
  }
  return rule;
}

}  // namespace dmnls
