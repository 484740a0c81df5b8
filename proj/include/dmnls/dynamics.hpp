#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmnls/grid.hpp"
#include "dmnls/quadrature.hpp"

namespace dmnls {

enum class NonlinearitySign { defocusing, focusing };

/// Model: i u_t + Lap u = s * weight * int_0^1 e^{-i sig Lap}[|w|^p w] dsig, w = e^{i sig Lap} u,
/// with s = +1 (defocusing) or -1 (focusing). The sigma integral is replaced by
/// the quadrature rule `sigma`, whose weights must sum to one.
struct ModelParams {
  int dimension = 1;
  double power = 4.0;
  NonlinearitySign sign = NonlinearitySign::defocusing;
  QuadratureRule sigma = QuadratureRule::gauss_legendre(16);
  /// Scales the nonlinearity; 0 gives the free flow (used by tests and sanity presets).
  double nonlinearity_weight = 1.0;

  double sign_factor() const { return sign == NonlinearitySign::defocusing ? 1.0 : -1.0; }
  /// Throws std::invalid_argument describing the first violated invariant.
  void validate() const;
};

/// Raised when |w|^p w is not representable.
class OverflowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// |w|^p w in place; throws OverflowError when a result is non-finite.
void apply_power_nonlinearity(std::span<cplx> w, double p);

/// Evaluates sum_j omega_j e^{i(t+sig_j)|xi|^2} F[|w_j|^p w_j] with
/// w_j = F^{-1}[e^{-i(t+sig_j)|xi|^2} v_hat], i.e. the spectral form of
/// e^{-it Lap} N(e^{it Lap} v). Node phases are precomputed once per grid.
class NonlinearityKernel {
 public:
  NonlinearityKernel(GridPtr grid, const ModelParams& params);

  void apply(std::span<const cplx> v_hat, double t, std::span<cplx> out_hat) const;

  const GridPtr& grid() const { return grid_; }

 private:
  GridPtr grid_;
  double power_;
  std::vector<double> weights_;
  std::vector<double> nodes_;
  std::vector<std::vector<cplx>> node_phase_;  // exp(-i sig_j |xi|^2)
};

/// N(u) = sum_j omega_j e^{-i sig_j Lap}[|e^{i sig_j Lap}u|^p e^{i sig_j Lap}u].
ComplexField dmnls_nonlinearity(const ComplexField& u, const ModelParams& params);

/// dv/dt for v(t) = e^{-it Lap} u(t): -i s weight e^{-it Lap} N(e^{it Lap} v).
ComplexField rhs_interaction_picture(const ComplexField& v, double t, const ModelParams& params);

struct StepperConfig {
  double dt = 1e-3;
  bool adaptive = false;
  double tol = 1e-10;
  double max_dt = 0.1;
  double min_dt = 1e-9;
  double blowup_gradient_factor = 1e3;
  /// Allowed mass fraction in the outer 10% band of the box.
  double boundary_mass_threshold = 1e-8;
  bool monitor_boundary = true;

  void validate() const;
};

enum class RunStatus { completed, blowup_detected, invalidated_boundary_mass };

std::string to_string(RunStatus status);

struct Checkpoint {
  double t;
  ComplexField u;
};

struct Trajectory {
  ModelParams params;
  GridPtr grid;
  std::vector<Checkpoint> checkpoints;
  RunStatus status = RunStatus::completed;
  /// Time of the earliest failure when status != completed.
  std::optional<double> failure_time;
  std::string failure_reason;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  double initial_gradient_norm = 0.0;
  double max_gradient_ratio = 1.0;
};

/// Advances u0 from t = 0 to t_final (either sign) with classical RK4 in the
/// interaction picture, storing u at each requested checkpoint time.
/// Checkpoint times must be distinct and lie between 0 and t_final.
Trajectory evolve(const ComplexField& u0, const ModelParams& params, const StepperConfig& cfg, double t_final,
                  std::vector<double> checkpoint_times);

/// `count` evenly spaced values from a to b inclusive (count >= 2).
std::vector<double> linspace(double a, double b, int count);

}  // namespace dmnls
