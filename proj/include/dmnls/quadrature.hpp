#pragma once

#include <vector>

namespace dmnls {

/// Nodes and weights of a one-dimensional quadrature rule.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  double weight_sum() const;

  /// n-point Gauss-Legendre rule on [a, b].
  static QuadratureRule gauss_legendre(int n, double a = 0.0, double b = 1.0);
  /// `panels` equal panels on [a, b], each with an n-point Gauss-Legendre rule.
  static QuadratureRule composite_gauss_legendre(double a, double b, int panels, int n);
};

}  // namespace dmnls
