#include "dmnls/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dmnls/dynamics.hpp"
#include "dmnls/fft.hpp"
#include "dmnls/spectral.hpp"

namespace dmnls {

QuadratureRule truncated_sigma_rule(double S, int nodes_per_unit) {
  if (!(S > 0.0) || !std::isfinite(S)) throw std::invalid_argument("sigma truncation S must be positive");
  if (nodes_per_unit < 1) throw std::invalid_argument("nodes_per_unit must be >= 1");
  const int panels = static_cast<int>(std::ceil(2.0 * S - 1e-12));
  return QuadratureRule::composite_gauss_legendre(-S, S, panels, nodes_per_unit);
}

void GroundStateConfig::validate() const {
  if (!(S > 0.0) || !std::isfinite(S)) throw std::invalid_argument("ground state: S must be positive");
  if (nodes_per_unit < 1) throw std::invalid_argument("ground state: nodes_per_unit must be >= 1");
  if (max_iterations < 1) throw std::invalid_argument("ground state: max_iterations must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("ground state: tol must be positive");
}

namespace {

double real_dot(const ComplexField& a, const ComplexField& b) { return inner_product(a, b).real(); }

// Pieces of the quotient for one field.
struct Evaluation {
  double num = 0.0;  // int int |w|^{p+2}
  double mass = 0.0;
  double kinetic = 0.0;
  ComplexField nonlinear;  // N_S = sum_j omega_j e^{-i sig_j Lap}[|w_j|^p w_j]
  ComplexField neg_laplacian;

  double log_quotient(double p) const {
    return std::log(num) - 0.25 * (p + 8.0) * std::log(mass) - 0.25 * (p - 4.0) * std::log(kinetic);
  }
};

void check_inputs(const ComplexField& phi, double p) {
  if (!phi.grid) throw std::invalid_argument("ground state: field has no grid");
  if (phi.grid->dimension() != 1) throw std::invalid_argument("ground state: only d = 1 is supported");
  if (!(p > 4.0) || !std::isfinite(p)) throw std::invalid_argument("ground state: requires p > 4");
  phi.require_finite("ground state input");
}

Evaluation evaluate(const ComplexField& phi, double p, const QuadratureRule& rule, bool with_gradient) {
  const Grid& g = *phi.grid;
  const auto& xi2 = g.frequency_squared();
  const ComplexField phi_hat = to_spectral(phi);

  Evaluation ev;
  double mass = 0.0, kinetic = 0.0;
  for (std::size_t k = 0; k < phi_hat.size(); ++k) {
    const double a = std::norm(phi_hat[k]);
    mass += a;
    kinetic += xi2[k] * a;
  }
  ev.mass = mass * g.cell_volume();
  ev.kinetic = kinetic * g.cell_volume();
  if (!(ev.mass > 0.0)) throw std::invalid_argument("ground state: zero field");
  if (!(ev.kinetic > 0.0)) throw std::invalid_argument("ground state: field has no gradient");

  std::vector<cplx> w(g.size());
  std::vector<cplx> acc(with_gradient ? g.size() : 0, cplx{});
  double num = 0.0;
  for (std::size_t j = 0; j < rule.size(); ++j) {
    const double s = rule.nodes[j];
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::polar(1.0, -s * xi2[k]) * phi_hat[k];
    fft::inverse(g, w);
    double integral = 0.0;
    for (const auto& z : w) integral += std::pow(std::norm(z), 0.5 * (p + 2.0));
    num += rule.weights[j] * integral;
    if (with_gradient) {
      apply_power_nonlinearity(w, p);
      fft::forward(g, w);
      for (std::size_t k = 0; k < w.size(); ++k) acc[k] += rule.weights[j] * std::polar(1.0, s * xi2[k]) * w[k];
    }
  }
  ev.num = num * g.cell_volume();
  if (!(ev.num > 0.0) || !std::isfinite(ev.num)) throw std::invalid_argument("ground state: degenerate numerator");

  if (with_gradient) {
    ev.nonlinear = from_spectral(ComplexField(phi.grid, std::move(acc)));
    ComplexField lap_hat = phi_hat;
    for (std::size_t k = 0; k < lap_hat.size(); ++k) lap_hat[k] *= xi2[k];
    ev.neg_laplacian = from_spectral(lap_hat);
  }
  return ev;
}

ComplexField gradient_from(const Evaluation& ev, const ComplexField& phi, double p) {
  ComplexField g = ev.nonlinear;
  const double cn = (p + 2.0) / ev.num;
  const double cm = 0.5 * (p + 8.0) / ev.mass;
  const double ck = 0.5 * (p - 4.0) / ev.kinetic;
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = cn * g[k] - cm * phi[k] - ck * ev.neg_laplacian[k];
  return g;
}

ComplexField precondition(const ComplexField& g) {
  ComplexField h = to_spectral(g);
  const auto& xi2 = g.grid->frequency_squared();
  for (std::size_t k = 0; k < h.size(); ++k) h[k] /= 1.0 + xi2[k];
  return from_spectral(h);
}

// x phi' + phi / 2, the L2-preserving dilation generator.
ComplexField dilation_generator(const ComplexField& phi) {
  const ComplexField d = gradient(phi).front();
  const auto& x = phi.grid->coordinates();
  ComplexField out(phi.grid);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = x[k] * d[k] + 0.5 * phi[k];
  return out;
}

// Removes the components of `d` along the symmetry directions of phi (real inner product).
void project_symmetries(ComplexField& d, const ComplexField& phi) {
  std::vector<ComplexField> basis;
  for (ComplexField v : {phi, cplx{0.0, 1.0} * phi, dilation_generator(phi)}) {
    for (const auto& b : basis) {
      const double c = real_dot(b, v);
      for (std::size_t k = 0; k < v.size(); ++k) v[k] -= c * b[k];
    }
    const double n = std::sqrt(real_dot(v, v));
    if (n > 1e-12 * std::sqrt(real_dot(phi, phi))) basis.push_back((1.0 / n) * v);
  }
  for (const auto& b : basis) {
    const double c = real_dot(b, d);
    for (std::size_t k = 0; k < d.size(); ++k) d[k] -= c * b[k];
  }
}

void rescale_to(ComplexField& f, double target_norm) { f *= target_norm / l2_norm(f); }

}  // namespace

double sgn_quotient(const ComplexField& phi, double p, double S, int nodes_per_unit) {
  check_inputs(phi, p);
  const auto rule = truncated_sigma_rule(S, nodes_per_unit);
  return std::exp(evaluate(phi, p, rule, false).log_quotient(p));
}

ComplexField sgn_gradient(const ComplexField& phi, double p, double S, int nodes_per_unit) {
  check_inputs(phi, p);
  const auto rule = truncated_sigma_rule(S, nodes_per_unit);
  return gradient_from(evaluate(phi, p, rule, true), phi, p);
}

GroundStateResult optimize(const ComplexField& init, double p, const GroundStateConfig& config) {
  config.validate();
  check_inputs(init, p);
  const auto rule = truncated_sigma_rule(config.S, config.nodes_per_unit);
  const double target = l2_norm(init);
  if (!(target > 0.0)) throw std::invalid_argument("ground state: zero initial data");

  GroundStateResult res;
  res.sigma_truncation = config.S;

  ComplexField phi = init;
  Evaluation ev = evaluate(phi, p, rule, true);
  double log_j = ev.log_quotient(p);
  res.quotient_history.push_back(std::exp(log_j));

  ComplexField grad = gradient_from(ev, phi, p);
  ComplexField pgrad = config.sobolev_preconditioner ? precondition(grad) : grad;
  ComplexField dir = pgrad;
  project_symmetries(dir, phi);
  double step = 0.1 * target / std::max(l2_norm(dir), 1e-300);
  int small_gains = 0;

  for (int it = 0; it < config.max_iterations; ++it) {
    res.iterations = it + 1;
    if (real_dot(dir, grad) <= 0.0) {
      dir = pgrad;
      project_symmetries(dir, phi);
    }
    if (!(l2_norm(dir) > 0.0)) {
      res.converged = true;
      res.stop_reason = "zero ascent direction";
      break;
    }

    // Backtracking with a sufficient-increase test; the fallback accepts any
    // non-decreasing step once the slope estimate is below rounding.
    const double slope = real_dot(grad, dir);
    bool accepted = false;
    double trial_step = 2.0 * step;
    ComplexField trial;
    Evaluation trial_ev;
    for (int halving = 0; halving < 60; ++halving, trial_step *= 0.5) {
      trial = phi;
      for (std::size_t k = 0; k < trial.size(); ++k) trial[k] += trial_step * dir[k];
      rescale_to(trial, target);
      try {
        trial_ev = evaluate(trial, p, rule, true);
      } catch (const OverflowError&) {
        continue;
      }
      const double rise = trial_ev.log_quotient(p) - log_j;
      if (rise >= 1e-4 * trial_step * slope || (rise >= 0.0 && trial_step * slope < 1e-15)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.converged = true;
      res.stop_reason = "line search found no ascent step";
      break;
    }

    const double new_log_j = trial_ev.log_quotient(p);
    const double gain = std::expm1(new_log_j - log_j);
    step = trial_step;
    phi = std::move(trial);
    ev = std::move(trial_ev);
    log_j = new_log_j;
    res.quotient_history.push_back(std::exp(log_j));

    const ComplexField new_grad = gradient_from(ev, phi, p);
    const ComplexField new_pgrad = config.sobolev_preconditioner ? precondition(new_grad) : new_grad;
    const double denom = real_dot(grad, pgrad);
    const double beta = denom > 0.0 ? std::max(0.0, real_dot(new_grad, new_pgrad - pgrad) / denom) : 0.0;
    ComplexField next = new_pgrad;
    for (std::size_t k = 0; k < next.size(); ++k) next[k] += beta * dir[k];
    project_symmetries(next, phi);
    dir = std::move(next);
    grad = new_grad;
    pgrad = new_pgrad;

    small_gains = gain < config.tol ? small_gains + 1 : 0;
    if (small_gains >= 2 || (it == 0 && gain == 0.0)) {
      res.converged = true;
      res.stop_reason = "relative quotient gain below tolerance";
      break;
    }
  }
  if (!res.converged) res.stop_reason = "maximum iterations reached";

  res.Q = phi;
  res.quotient_value = std::exp(log_j);
  res.mass_Q = ev.mass;
  res.kinetic_Q = ev.kinetic;
  res.gradient_norm = l2_norm(grad) / l2_norm(phi);

  const double a = 0.5 * (p + 8.0) * ev.num / ((p + 2.0) * ev.mass);
  const double b = 0.5 * (p - 4.0) * ev.num / ((p + 2.0) * ev.kinetic);
  res.multiplier_a = a;
  res.multiplier_b = b;
  ComplexField residual = ev.nonlinear;
  for (std::size_t k = 0; k < residual.size(); ++k) residual[k] += -a * phi[k] - b * ev.neg_laplacian[k];
  res.el_residual = l2_norm(residual) / l2_norm(ev.nonlinear);

  // alpha Q(beta x) solves -Q + Q'' + N[Q] = 0 (sigma over the scaled window).
  const double beta = std::sqrt(b / a);
  const double alpha = std::pow(b / (a * a), 1.0 / p);
  res.mass_normalized = alpha * alpha * ev.mass / beta;
  res.kinetic_normalized = alpha * alpha * beta * ev.kinetic;
  res.potential_normalized = std::pow(alpha, p + 2.0) * std::pow(beta, -3.0) * ev.num;
  const double energy = 0.5 * res.kinetic_normalized - res.potential_normalized;
  res.threshold_value = p != 8.0 ? std::pow(res.mass_normalized, (p + 8.0) / (p - 8.0)) * energy
                                 : std::numeric_limits<double>::quiet_NaN();

  // Unit-window energy of the normalized profile: sigma in [0, 1] for alpha Q(beta x)
  // is sigma in [0, beta^2] for Q.
  const auto unit = QuadratureRule::composite_gauss_legendre(
      0.0, beta * beta, std::max(1, static_cast<int>(std::ceil(beta * beta))), config.nodes_per_unit);
  const double unit_num = evaluate(phi, p, unit, false).num;
  res.energy_unit_window =
      0.5 * res.kinetic_normalized - std::pow(alpha, p + 2.0) * std::pow(beta, -3.0) * unit_num;

  // |sigma| > S tail: ||e^{i sig Lap} Q||_{p+2}^{p+2} ~ |sig|^{-p/2} in one dimension.
  QuadratureRule ends;
  ends.nodes = {-config.S, config.S};
  ends.weights = {1.0, 1.0};
  const double edge = evaluate(phi, p, ends, false).num;
  res.tail_estimate = edge * config.S / (0.5 * p - 1.0) / ev.num;
  return res;
}

}  // namespace dmnls
