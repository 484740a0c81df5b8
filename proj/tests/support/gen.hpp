#pragma once
// Small seeded generators for property tests.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "dmnls/grid.hpp"

namespace testgen {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  /// Sum of a few modulated Gaussians, well inside the box and resolved on it.
  dmnls::ComplexField smooth_field(const dmnls::GridPtr& grid, int bumps = 3) {
    const double L = grid->box_length();
    struct Bump {
      double c, w, k, phase, amp;
    };
    std::vector<Bump> bs;
    for (int b = 0; b < bumps; ++b)
      bs.push_back({uniform(-0.1 * L, 0.1 * L), uniform(1.0, 2.5), uniform(-2.0, 2.0), uniform(0.0, 6.283),
                    uniform(0.2, 1.0)});
    return dmnls::sample(grid, [&](double x) {
      dmnls::cplx s{};
      for (const auto& b : bs) {
        const double y = (x - b.c) / b.w;
        s += b.amp * std::exp(-y * y) * std::polar(1.0, b.k * x + b.phase);
      }
      return s;
    });
  }

  /// Arbitrary finite values, no smoothness.
  dmnls::ComplexField rough_field(const dmnls::GridPtr& grid) {
    dmnls::ComplexField u(grid);
    for (auto& z : u.values) z = {uniform(-1, 1), uniform(-1, 1)};
    return u;
  }

 private:
  std::mt19937_64 rng_;
};

inline double rel_diff(const dmnls::ComplexField& a, const dmnls::ComplexField& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

inline double max_abs_diff(const dmnls::ComplexField& a, const dmnls::ComplexField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace testgen
