#include "dmnls/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dmnls/fft.hpp"

namespace dmnls {

ComplexField to_spectral(const ComplexField& u) {
  ComplexField out(u.grid);
  fft::forward(*u.grid, u.values, out.values);
  return out;
}

ComplexField from_spectral(const ComplexField& u_hat) {
  ComplexField out(u_hat.grid);
  fft::inverse(*u_hat.grid, u_hat.values, out.values);
  return out;
}

ComplexField free_propagate(const ComplexField& u, double t) {
  u.require_finite("free_propagate");
  ComplexField f = to_spectral(u);
  const auto& xi2 = u.grid->frequency_squared();
  for (std::size_t k = 0; k < f.size(); ++k) f[k] *= std::polar(1.0, -t * xi2[k]);
  fft::inverse(*f.grid, f.values);
  return f;
}

std::vector<ComplexField> gradient(const ComplexField& u) {
  u.require_finite("gradient");
  const Grid& g = *u.grid;
  const ComplexField u_hat = to_spectral(u);
  const auto& xi = g.frequencies();
  const int nyquist = g.points_per_axis() / 2;
  std::vector<ComplexField> out;
  for (int axis = 0; axis < g.dimension(); ++axis) {
    ComplexField d(u.grid);
    for (std::size_t k = 0; k < d.size(); ++k) {
      const int idx = g.axis_index(k, axis);
      d[k] = idx == nyquist ? cplx{} : cplx{0.0, xi[idx]} * u_hat[k];
    }
    fft::inverse(g, d.values);
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<ComplexField> galilean_apply(const ComplexField& u, double t) {
  auto grad = gradient(u);
  const Grid& g = *u.grid;
  const auto& x = g.coordinates();
  for (int axis = 0; axis < g.dimension(); ++axis) {
    auto& d = grad[axis];
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = x[g.axis_index(k, axis)] * u[k] + cplx{0.0, 2.0 * t} * d[k];
  }
  return grad;
}

ComplexField radial_weight(const ComplexField& u, double gamma) {
  ComplexField out = u;
  const auto& r2 = u.grid->radius_squared();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] *= std::pow(r2[k], 0.5 * gamma);
  return out;
}

ComplexField fractional_galilean(const ComplexField& u, double t, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("fractional_galilean: gamma must lie in (0, 1]");
  u.require_finite("fractional_galilean");
  if (std::abs(t) < kGalileanTimeEps) return radial_weight(u, gamma);

  const auto& r2 = u.grid->radius_squared();
  const auto& xi2 = u.grid->frequency_squared();
  ComplexField f(u.grid);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = std::polar(1.0, -r2[k] / (4.0 * t)) * u[k];
  fft::forward(*f.grid, f.values);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] *= std::pow(4.0 * t * t * xi2[k], 0.5 * gamma);
  fft::inverse(*f.grid, f.values);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] *= std::polar(1.0, r2[k] / (4.0 * t));
  return f;
}

NormSpec NormSpec::lr(double r) {
  if (!(r >= 1.0)) throw std::invalid_argument("NormSpec: Lebesgue exponent must be >= 1");
  return {Kind::Lr, r};
}
NormSpec NormSpec::sobolev(double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("NormSpec: Sobolev index must be >= 0");
  return {Kind::SobolevHs, s};
}
NormSpec NormSpec::homogeneous_sobolev(double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("NormSpec: Sobolev index must be >= 0");
  return {Kind::HomSobolev, s};
}
NormSpec NormSpec::weighted_l2(double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("NormSpec: weight exponent must be >= 0");
  return {Kind::WeightedL2, gamma};
}
NormSpec NormSpec::sigma() { return {Kind::Sigma, 1.0}; }

double lebesgue_integral(const ComplexField& u, double r) {
  double acc = 0.0;
  if (r == 2.0) {
    for (const auto& z : u.values) acc += std::norm(z);
  } else {
    for (const auto& z : u.values) acc += std::pow(std::abs(z), r);
  }
  return acc * u.grid->cell_volume();
}

double l2_norm(const ComplexField& u) { return std::sqrt(lebesgue_integral(u, 2.0)); }

namespace {

// sqrt(dV * sum weight(|xi|^2) |u_hat|^2)
template <class W>
double spectral_weighted_norm(const ComplexField& u, W&& weight) {
  const ComplexField u_hat = to_spectral(u);
  const auto& xi2 = u.grid->frequency_squared();
  double acc = 0.0;
  for (std::size_t k = 0; k < u_hat.size(); ++k) acc += weight(xi2[k]) * std::norm(u_hat[k]);
  return std::sqrt(acc * u.grid->cell_volume());
}

double weighted_l2_value(const ComplexField& u, double gamma) {
  const auto& r2 = u.grid->radius_squared();
  double acc = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) acc += std::pow(r2[k], gamma) * std::norm(u[k]);
  return std::sqrt(acc * u.grid->cell_volume());
}

}  // namespace

double norm(const ComplexField& u, const NormSpec& spec) {
  switch (spec.kind) {
    case NormSpec::Kind::Lr: {
      if (!(spec.param >= 1.0)) throw std::invalid_argument("norm: Lebesgue exponent must be >= 1");
      if (std::isinf(spec.param)) {
        double m = 0.0;
        for (const auto& z : u.values) m = std::max(m, std::abs(z));
        return m;
      }
      return std::pow(lebesgue_integral(u, spec.param), 1.0 / spec.param);
    }
    case NormSpec::Kind::SobolevHs: {
      if (spec.param < 0.0) throw std::invalid_argument("norm: negative Sobolev index");
      const double s = spec.param;
      return spectral_weighted_norm(u, [s](double xi2) { return std::pow(1.0 + xi2, s); });
    }
    case NormSpec::Kind::HomSobolev: {
      if (spec.param < 0.0) throw std::invalid_argument("norm: negative Sobolev index");
      const double s = spec.param;
      return spectral_weighted_norm(u, [s](double xi2) { return s == 0.0 ? 1.0 : std::pow(xi2, s); });
    }
    case NormSpec::Kind::WeightedL2:
      if (spec.param < 0.0) throw std::invalid_argument("norm: negative weight exponent");
      return weighted_l2_value(u, spec.param);
    case NormSpec::Kind::Sigma: {
      const double h1 = spectral_weighted_norm(u, [](double xi2) { return 1.0 + xi2; });
      const double xu = weighted_l2_value(u, 1.0);
      return std::sqrt(h1 * h1 + xu * xu);
    }
  }
  throw std::invalid_argument("norm: unknown kind");
}

cplx inner_product(const ComplexField& a, const ComplexField& b) {
  cplx acc{};
  for (std::size_t k = 0; k < a.size(); ++k) acc += std::conj(a[k]) * b[k];
  return acc * a.grid->cell_volume();
}

double boundary_mass_fraction(const ComplexField& u, double band) {
  const Grid& g = *u.grid;
  const double cutoff = (1.0 - band) * 0.5 * g.box_length();
  const auto& x = g.coordinates();
  double total = 0.0, outer = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double m = std::norm(u[k]);
    total += m;
    bool out = false;
    for (int axis = 0; axis < g.dimension(); ++axis)
      out = out || std::abs(x[g.axis_index(k, axis)]) > cutoff;
    if (out) outer += m;
  }
  return total > 0.0 ? outer / total : 0.0;
}

ComplexField continuous_transform(const ComplexField& u) {
  const Grid& g = *u.grid;
  ComplexField f = to_spectral(u);
  const double n = g.points_per_axis();
  const double per_axis = g.spacing() * std::sqrt(n) / std::sqrt(2.0 * std::numbers::pi);
  const double scale = std::pow(per_axis, g.dimension());
  const auto& xi = g.frequencies();
  const double half = 0.5 * g.box_length();
  for (std::size_t k = 0; k < f.size(); ++k) {
    double phase = 0.0;
    for (int axis = 0; axis < g.dimension(); ++axis) phase += xi[g.axis_index(k, axis)] * half;
    f[k] *= scale * std::polar(1.0, phase);
  }
  return f;
}

}  // namespace dmnls
