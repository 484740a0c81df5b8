#pragma once

#include <limits>
#include <vector>

#include "dmnls/grid.hpp"

namespace dmnls {

// Fourier-side helpers. "Spectral" fields hold unitary-DFT coefficients on the
// same grid, in FFT order.
ComplexField to_spectral(const ComplexField& u);
ComplexField from_spectral(const ComplexField& u_hat);

/// e^{it Laplacian} u, i.e. the Fourier multiplier exp(-i t |xi|^2).
ComplexField free_propagate(const ComplexField& u, double t);

/// Spectral partial derivatives, one field per axis. The Nyquist mode is
/// dropped for these odd symbols.
std::vector<ComplexField> gradient(const ComplexField& u);

/// Galilean vector field J(t)u = x u + 2 i t grad u, one field per axis.
std::vector<ComplexField> galilean_apply(const ComplexField& u, double t);

/// Below this |t| the fractional Galilean operator is evaluated as |x|^gamma.
inline constexpr double kGalileanTimeEps = 1e-8;

/// J^gamma(t) = M(t) |2 t xi|^gamma M(-t), M(t) = exp(i|x|^2 / 4t); |x|^gamma at t = 0.
/// Throws std::invalid_argument unless 0 < gamma <= 1.
ComplexField fractional_galilean(const ComplexField& u, double t, double gamma);

/// |x|^gamma u on the centered coordinate.
ComplexField radial_weight(const ComplexField& u, double gamma);

struct NormSpec {
  enum class Kind { Lr, SobolevHs, HomSobolev, WeightedL2, Sigma };
  Kind kind = Kind::Lr;
  double param = 2.0;  // r, s or gamma depending on kind

  static NormSpec lr(double r);
  static NormSpec l2() { return lr(2.0); }
  static NormSpec linf() { return lr(std::numeric_limits<double>::infinity()); }
  static NormSpec sobolev(double s);
  static NormSpec homogeneous_sobolev(double s);
  static NormSpec weighted_l2(double gamma);
  static NormSpec sigma();
};

/// Discrete quadrature of the requested norm. Sigma uses sqrt(||u||_{H^1}^2 + ||x u||_2^2).
double norm(const ComplexField& u, const NormSpec& spec);

/// Plain L2 norm (cell-volume weighted).
double l2_norm(const ComplexField& u);

/// Integral of |u|^r over the box (no root). r must be finite and >= 1.
double lebesgue_integral(const ComplexField& u, double r);

/// <a, b> = integral of conj(a) * b.
cplx inner_product(const ComplexField& a, const ComplexField& b);

/// Fraction of the mass lying in the outer band of the box: points whose
/// coordinate along some axis has |x_j| > (1 - band) * L / 2.
double boundary_mass_fraction(const ComplexField& u, double band = 0.1);

/// Samples of the continuous transform (2 pi)^{-d/2} int e^{-i x xi} u(x) dx on
/// the frequency lattice (FFT order), via the unitary DFT and the box offset.
ComplexField continuous_transform(const ComplexField& u);

}  // namespace dmnls
