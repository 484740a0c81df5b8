#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dmnls/dynamics.hpp"
#include "dmnls/grid.hpp"
#include "dmnls/spectral.hpp"

namespace dmnls {

/// Monitored quantities at one checkpoint. The potential terms are raw sigma
/// integrals; the energies and the pseudoconformal energy apply the model's
/// nonlinearity weight (1 for every physical run).
struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;                      // ||u||_2^2
  double kinetic = 0.0;                   // 1/2 ||grad u||_2^2
  double nl_potential = 0.0;              // int_0^1 int |w|^{p+2}
  double energy_defocusing = 0.0;         // kinetic + nl_potential / (p+2)
  double energy_focusing_CHL = 0.0;       // kinetic - nl_potential
  double hamiltonian = 0.0;               // kinetic + sign * nl_potential / (p+2), conserved by the run
  double Ju_norm = 0.0;                   // ||J(t) u||_2
  double pce = 0.0;                       // Ju_norm^2 + 8 t^2/(p+2) nl_potential
  double w_norm_p2 = 0.0;                 // nl_potential^{1/(p+2)}
  double w1_norm_p2 = 0.0;                // ||e^{i Lap} u||_{p+2}^{p+2}
  double sigma_weighted_potential = 0.0;  // int_0^1 sigma int |w|^{p+2}
  double boundary_mass_fraction = 0.0;
  bool boundary_flag = false;
};

struct DiagnosticsTimeSeries {
  int dimension = 1;
  double power = 1.0;
  double nonlinearity_weight = 1.0;
  double sign = 1.0;
  std::vector<DiagnosticsRecord> rows;

  /// CSV column names, identical to the record field names.
  static const std::vector<std::string>& column_names();
  /// Values of one row in column_names() order.
  static std::vector<double> row_values(const DiagnosticsRecord& r);
  std::vector<double> column(const std::string& name) const;
  std::vector<double> times() const;
};

/// Integral of |e^{i sig_j Lap} u|^r over the box for every node of `rule`.
std::vector<double> node_lebesgue_integrals(const ComplexField& u, const QuadratureRule& rule, double r);

DiagnosticsRecord measure(const ComplexField& u, double t, const ModelParams& params,
                          double boundary_threshold = 1e-8);

/// One record per checkpoint, sigma integrals on the model's own quadrature rule.
DiagnosticsTimeSeries record(const Trajectory& trajectory, const ModelParams& params,
                             double boundary_threshold = 1e-8);

enum class PceVariant { t_plus_1, two_t_plus_1 };
std::string to_string(PceVariant v);

struct PceReport {
  PceVariant variant = PceVariant::two_t_plus_1;
  std::vector<double> times;
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<double> residual;
  double residual_norm = 0.0;
  double rhs_norm = 0.0;
  /// ||lhs - rhs|| / ||rhs||, or the absolute residual when rhs vanishes.
  double aggregate = 0.0;
};

/// Compares the finite-difference derivative of the pseudoconformal energy with
/// the right-hand side of its evolution identity on [t_lo, t_hi]. The boundary
/// term uses coefficient 8(t+1)/(p+2) or 8(2t+1)/(p+2) according to `variant`.
/// Throws std::invalid_argument when the window contains t = 0 or checkpoints
/// inside it are spaced wider than max_spacing.
PceReport pce_identity_check(const DiagnosticsTimeSeries& series, PceVariant variant, double t_lo, double t_hi,
                             double max_spacing = 0.05);

struct FitResult {
  double exponent = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::size_t points = 0;
};

/// Least-squares line through (log x_i, log y_i). Throws on fewer than
/// `min_points` samples or non-positive data.
FitResult fit_power_law(const std::vector<double>& x, const std::vector<double>& y, std::size_t min_points = 3);

enum class DecayQuantity { Ju_norm, w_norm_p2 };

/// Slope of log(quantity) against log<t>, <t> = sqrt(1 + t^2), over checkpoints
/// in [t_lo, t_hi] (at least 8 of them, t_lo > 0).
FitResult decay_fit(const DiagnosticsTimeSeries& series, DecayQuantity quantity, double t_lo, double t_hi);

enum class SigmaMode { sup_over_sigma, Lq_in_sigma_and_t };

/// Trapezoidal time quadrature over checkpoints of ||w(sigma, t)||_{L^r_x}^q,
/// with sigma handled by the model's rule (sup over nodes, or L^q in sigma).
double spacetime_norm(const Trajectory& trajectory, const ModelParams& params, double q, double r, SigmaMode mode);

/// Running value of spacetime_norm over the first k checkpoints, k = 1..n.
std::vector<double> spacetime_norm_profile(const Trajectory& trajectory, const ModelParams& params, double q,
                                           double r, SigmaMode mode);

struct ScatteringReport {
  std::vector<double> times;
  /// Norm name -> ||v(t_{k+1}) - v(t_k)|| for consecutive checkpoints.
  std::map<std::string, std::vector<double>> differences;
  /// Norm name -> same norm of v at the first checkpoint.
  std::map<std::string, double> data_norms;
  /// Norms requested by the regime but undefined for it.
  std::vector<std::string> undefined;
  /// v(t_last) = e^{-i t_last Lap} u(t_last), the scattering-state candidate.
  ComplexField u_plus;
};

/// Cauchy differences of v(t) = e^{-it Lap} u(t) in L2, H^{s_c}, FH^gamma
/// (through || |x|^gamma v ||_2) and Sigma, as defined by the regime of (d, p).
ScatteringReport scattering_profile(const Trajectory& trajectory);

/// True when values[i] is non-increasing for all times[i] >= t_from.
bool decreasing_after(const std::vector<double>& times, const std::vector<double>& values, double t_from);

struct NonscatteringReport {
  std::vector<double> times;
  /// Im <u(t), e^{it Lap} psi> with <f, g> = int conj(f) g.
  std::vector<double> overlap;
  std::vector<double> derivative_times;
  std::vector<double> derivative;
  FitResult fit;
  bool fit_valid = false;
  /// The derivative changed sign inside the window.
  bool ill_conditioned = false;
  bool strictly_increasing = false;
  /// <|phi^|^p phi^, psi^> with the initial data standing in for phi.
  cplx c0{};
  std::vector<std::string> warnings;
};

/// Tracks the overlap with a free wave and fits d/dt of it against t on [t_lo, t_hi].
NonscatteringReport nonscattering_probe(const Trajectory& trajectory, const ComplexField& psi, double t_lo,
                                        double t_hi);

struct TimeReversalReport {
  double max_field_deviation = 0.0;
  double max_energy_deviation = 0.0;
  std::size_t matched = 0;
};

/// forward evolves e^{-i Lap} conj(u(0)) to +T; backward evolves u(0) to -T.
/// Compares forward(t) with e^{-i Lap} conj(backward(-t)) and the [0,1]-window
/// focusing energies. Throws std::invalid_argument on mismatched schedules.
TimeReversalReport time_reversal_check(const Trajectory& forward, const Trajectory& backward,
                                       const ModelParams& params);

/// e^{-i Lap} conj(u), the time-reversal partner of a state.
ComplexField time_reversed_state(const ComplexField& u);

struct ProfileError {
  double error = 0.0;
  bool early_time_warning = false;
};

/// Relative L2 distance between |u(t, x)| and (2t)^{-d/2} |phi^(x / 2t)|.
ProfileError asymptotic_profile_error(const ComplexField& u, double t, const ComplexField& phi);

/// Japanese bracket sqrt(1 + t^2).
inline double japanese(double t) { return std::sqrt(1.0 + t * t); }

}  // namespace dmnls
