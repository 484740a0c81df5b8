#pragma once

#include <string>
#include <vector>

#include "dmnls/grid.hpp"
#include "dmnls/quadrature.hpp"

namespace dmnls {

/// Composite Gauss-Legendre rule on [-S, S]: ceil(2S) equal panels with
/// `nodes_per_unit` nodes each.
QuadratureRule truncated_sigma_rule(double S, int nodes_per_unit);

/// J[phi] = int_{-S}^{S} int |e^{i sig Lap} phi|^{p+2} / (||phi||_2^{(p+8)/2} ||phi'||_2^{(p-4)/2}), d = 1.
/// Requires p > 4, S > 0 and a nonzero field.
double sgn_quotient(const ComplexField& phi, double p, double S, int nodes_per_unit);

/// L2 gradient of log J (real inner product Re<., .>).
ComplexField sgn_gradient(const ComplexField& phi, double p, double S, int nodes_per_unit);

struct GroundStateConfig {
  double S = 8.0;
  int nodes_per_unit = 16;
  int max_iterations = 3000;
  /// Stop once the relative quotient gain of an accepted step drops below this.
  double tol = 1e-10;
  /// Precondition the ascent direction with (1 - Lap)^{-1}.
  bool sobolev_preconditioner = true;

  void validate() const;
};

struct GroundStateResult {
  /// Converged iterate, at the L2 norm of the initial data.
  ComplexField Q;
  double quotient_value = 0.0;
  double mass_Q = 0.0;     // ||Q||_2^2
  double kinetic_Q = 0.0;  // ||Q'||_2^2
  /// Multipliers of N_S[Q] = a Q - b Q''.
  double multiplier_a = 0.0;
  double multiplier_b = 0.0;
  /// Mass, kinetic term and potential of the rescaling alpha Q(beta x)
  /// solving -Q + Q'' + N[Q] = 0.
  double mass_normalized = 0.0;
  double kinetic_normalized = 0.0;
  double potential_normalized = 0.0;
  /// M^{(p+8)/(p-8)} (1/2 ||Q'||^2 - int_{-S}^{S} int |e^{i sig Lap} Q|^{p+2}) on the normalized Q.
  double threshold_value = 0.0;
  /// 1/2 ||Q'||^2 - int_0^1 int |e^{i sig Lap} Q|^{p+2} on the normalized Q (unit sigma window).
  double energy_unit_window = 0.0;
  /// ||N_S - a Q + b Q''|| / ||N_S||.
  double el_residual = 0.0;
  double gradient_norm = 0.0;  // ||grad log J||_2 / ||Q||_2
  double sigma_truncation = 0.0;
  /// Relative size of the discarded |sigma| > S tail, from dispersive decay.
  double tail_estimate = 0.0;
  std::vector<double> quotient_history;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
};

/// Preconditioned nonlinear conjugate-gradient ascent on log J with a
/// backtracking line search that only accepts non-decreasing quotients.
/// Each iterate is renormalized to the L2 norm of `init`.
GroundStateResult optimize(const ComplexField& init, double p, const GroundStateConfig& config = {});

}  // namespace dmnls
