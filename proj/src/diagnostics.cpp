#include "dmnls/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dmnls/exponents.hpp"
#include "dmnls/fft.hpp"

namespace dmnls {

const std::vector<std::string>& DiagnosticsTimeSeries::column_names() {
  static const std::vector<std::string> names = {
      "t",           "mass",     "kinetic",   "nl_potential",  "energy_defocusing",
      "energy_focusing_CHL",     "hamiltonian", "Ju_norm",     "pce",
      "w_norm_p2",   "w1_norm_p2", "sigma_weighted_potential", "boundary_mass_fraction",
      "boundary_flag"};
  return names;
}

std::vector<double> DiagnosticsTimeSeries::row_values(const DiagnosticsRecord& r) {
  return {r.t,           r.mass,        r.kinetic,
          r.nl_potential, r.energy_defocusing, r.energy_focusing_CHL,
          r.hamiltonian,  r.Ju_norm,     r.pce,
          r.w_norm_p2,    r.w1_norm_p2,  r.sigma_weighted_potential,
          r.boundary_mass_fraction, r.boundary_flag ? 1.0 : 0.0};
}

std::vector<double> DiagnosticsTimeSeries::column(const std::string& name) const {
  const auto& names = column_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw std::invalid_argument("unknown diagnostics column: " + name);
  const auto idx = static_cast<std::size_t>(it - names.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(row_values(r)[idx]);
  return out;
}

std::vector<double> DiagnosticsTimeSeries::times() const {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r.t);
  return out;
}

std::vector<double> node_lebesgue_integrals(const ComplexField& u, const QuadratureRule& rule, double r) {
  const Grid& g = *u.grid;
  const ComplexField u_hat = to_spectral(u);
  const auto& xi2 = g.frequency_squared();
  std::vector<double> out(rule.size());
  std::vector<cplx> w(g.size());
  for (std::size_t j = 0; j < rule.size(); ++j) {
    const double s = rule.nodes[j];
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::polar(1.0, -s * xi2[k]) * u_hat[k];
    fft::inverse(g, w);
    double acc = 0.0;
    if (std::isinf(r)) {
      for (const auto& z : w) acc = std::max(acc, std::abs(z));
      out[j] = acc;
    } else {
      for (const auto& z : w) acc += std::pow(std::norm(z), 0.5 * r);
      out[j] = acc * g.cell_volume();
    }
  }
  return out;
}

DiagnosticsRecord measure(const ComplexField& u, double t, const ModelParams& params, double boundary_threshold) {
  const double p = params.power;
  const double lambda = params.nonlinearity_weight;
  DiagnosticsRecord rec;
  rec.t = t;
  rec.mass = lebesgue_integral(u, 2.0);
  double grad2 = 0.0;
  for (const auto& d : gradient(u)) grad2 += lebesgue_integral(d, 2.0);
  rec.kinetic = 0.5 * grad2;

  const auto per_node = node_lebesgue_integrals(u, params.sigma, p + 2.0);
  for (std::size_t j = 0; j < per_node.size(); ++j) {
    rec.nl_potential += params.sigma.weights[j] * per_node[j];
    rec.sigma_weighted_potential += params.sigma.weights[j] * params.sigma.nodes[j] * per_node[j];
  }
  rec.energy_defocusing = rec.kinetic + lambda * rec.nl_potential / (p + 2.0);
  rec.energy_focusing_CHL = rec.kinetic - lambda * rec.nl_potential;
  rec.hamiltonian = rec.kinetic + params.sign_factor() * lambda * rec.nl_potential / (p + 2.0);

  double ju2 = 0.0;
  for (const auto& j : galilean_apply(u, t)) ju2 += lebesgue_integral(j, 2.0);
  rec.Ju_norm = std::sqrt(ju2);
  rec.pce = ju2 + lambda * 8.0 * t * t / (p + 2.0) * rec.nl_potential;
  rec.w_norm_p2 = std::pow(rec.nl_potential, 1.0 / (p + 2.0));
  rec.w1_norm_p2 = lebesgue_integral(free_propagate(u, 1.0), p + 2.0);
  rec.boundary_mass_fraction = boundary_mass_fraction(u);
  rec.boundary_flag = rec.boundary_mass_fraction > boundary_threshold;
  return rec;
}

DiagnosticsTimeSeries record(const Trajectory& trajectory, const ModelParams& params, double boundary_threshold) {
  DiagnosticsTimeSeries series;
  series.dimension = params.dimension;
  series.power = params.power;
  series.nonlinearity_weight = params.nonlinearity_weight;
  series.sign = params.sign_factor();
  series.rows.reserve(trajectory.checkpoints.size());
  for (const auto& cp : trajectory.checkpoints) series.rows.push_back(measure(cp.u, cp.t, params, boundary_threshold));
  return series;
}

std::string to_string(PceVariant v) { return v == PceVariant::t_plus_1 ? "t_plus_1" : "two_t_plus_1"; }

namespace {

// Second-order derivative at interior point i of an unevenly spaced series.
double centered_derivative(const std::vector<double>& t, const std::vector<double>& f, std::size_t i) {
  const double h1 = t[i] - t[i - 1];
  const double h2 = t[i + 1] - t[i];
  return -h2 / (h1 * (h1 + h2)) * f[i - 1] + (h2 - h1) / (h1 * h2) * f[i] + h1 / (h2 * (h1 + h2)) * f[i + 1];
}

double l2(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

}  // namespace

PceReport pce_identity_check(const DiagnosticsTimeSeries& series, PceVariant variant, double t_lo, double t_hi,
                             double max_spacing) {
  if (!(t_lo < t_hi)) throw std::invalid_argument("pce_identity_check: empty window");
  if (t_lo <= 0.0 && t_hi >= 0.0) throw std::invalid_argument("pce_identity_check: window contains t = 0");
  if (series.sign < 0.0) throw std::invalid_argument("pce_identity_check: identity is stated for the defocusing sign");
  const auto t = series.times();
  const auto e = series.column("pce");
  const double d = series.dimension, p = series.power, lambda = series.nonlinearity_weight;
  const double k = 8.0 / (p + 2.0);

  PceReport rep;
  rep.variant = variant;
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi) continue;
    if (t[i + 1] - t[i] > max_spacing || t[i] - t[i - 1] > max_spacing)
      throw std::invalid_argument("pce_identity_check: checkpoints too sparse inside the window");
    const auto& r = series.rows[i];
    const double ti = t[i];
    const double c = variant == PceVariant::t_plus_1 ? ti + 1.0 : 2.0 * ti + 1.0;
    const double rhs = lambda * (-(0.5 * d * p - 4.0) / ti * k * ti * ti * r.nl_potential -
                                 (0.5 * d * p - 2.0) / (ti * ti) * k * ti * ti * r.sigma_weighted_potential -
                                 k * c * r.w1_norm_p2);
    const double lhs = centered_derivative(t, e, i);
    rep.times.push_back(ti);
    rep.lhs.push_back(lhs);
    rep.rhs.push_back(rhs);
    rep.residual.push_back(lhs - rhs);
  }
  if (rep.times.empty()) throw std::invalid_argument("pce_identity_check: no interior checkpoints in window");
  rep.residual_norm = l2(rep.residual);
  rep.rhs_norm = l2(rep.rhs);
  rep.aggregate = rep.rhs_norm > 0.0 ? rep.residual_norm / rep.rhs_norm : rep.residual_norm;
  return rep;
}

FitResult fit_power_law(const std::vector<double>& x, const std::vector<double>& y, std::size_t min_points) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_power_law: size mismatch");
  if (x.size() < min_points) throw std::invalid_argument("fit_power_law: not enough points");
  const std::size_t n = x.size();
  double sx = 0, sy = 0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("fit_power_law: non-positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("fit_power_law: degenerate abscissae");
  FitResult fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  fit.points = n;
  return fit;
}

FitResult decay_fit(const DiagnosticsTimeSeries& series, DecayQuantity quantity, double t_lo, double t_hi) {
  if (!(t_lo > 0.0) || !(t_lo < t_hi)) throw std::invalid_argument("decay_fit: window must satisfy 0 < t_lo < t_hi");
  std::vector<double> x, y;
  for (const auto& r : series.rows) {
    if (r.t < t_lo || r.t > t_hi) continue;
    x.push_back(japanese(r.t));
    y.push_back(quantity == DecayQuantity::Ju_norm ? r.Ju_norm : r.w_norm_p2);
  }
  if (x.size() < 8) throw std::invalid_argument("decay_fit: fewer than 8 checkpoints in window");
  FitResult fit = fit_power_law(x, y, 8);
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  return fit;
}

namespace {

// Per-checkpoint integrand of the space-time norm (before the outer root).
double spacetime_integrand(const ComplexField& u, const ModelParams& params, double q, double r, SigmaMode mode) {
  const auto per_node = node_lebesgue_integrals(u, params.sigma, r);
  std::vector<double> norms(per_node.size());
  for (std::size_t j = 0; j < per_node.size(); ++j)
    norms[j] = std::isinf(r) ? per_node[j] : std::pow(per_node[j], 1.0 / r);
  if (mode == SigmaMode::sup_over_sigma) return std::pow(*std::max_element(norms.begin(), norms.end()), q);
  double acc = 0.0;
  for (std::size_t j = 0; j < norms.size(); ++j) acc += params.sigma.weights[j] * std::pow(norms[j], q);
  return acc;
}

}  // namespace

std::vector<double> spacetime_norm_profile(const Trajectory& trajectory, const ModelParams& params, double q,
                                           double r, SigmaMode mode) {
  if (!(q >= 1.0) || !(r >= 1.0)) throw std::invalid_argument("spacetime_norm: exponents must be >= 1");
  if (std::isinf(q)) throw std::invalid_argument("spacetime_norm: q must be finite");
  const auto& cps = trajectory.checkpoints;
  std::vector<double> out;
  if (cps.empty()) return out;
  double integral = 0.0;
  double prev = spacetime_integrand(cps[0].u, params, q, r, mode);
  out.push_back(0.0);
  for (std::size_t k = 1; k < cps.size(); ++k) {
    const double cur = spacetime_integrand(cps[k].u, params, q, r, mode);
    integral += 0.5 * std::abs(cps[k].t - cps[k - 1].t) * (prev + cur);
    prev = cur;
    out.push_back(std::pow(integral, 1.0 / q));
  }
  return out;
}

double spacetime_norm(const Trajectory& trajectory, const ModelParams& params, double q, double r, SigmaMode mode) {
  const auto profile = spacetime_norm_profile(trajectory, params, q, r, mode);
  return profile.empty() ? 0.0 : profile.back();
}

ScatteringReport scattering_profile(const Trajectory& trajectory) {
  const auto& cps = trajectory.checkpoints;
  if (cps.size() < 4) throw std::invalid_argument("scattering_profile: need at least 4 checkpoints");
  const auto rep = exponent_report(trajectory.params.dimension, trajectory.params.power);

  std::vector<std::pair<std::string, NormSpec>> norms = {{"L2", NormSpec::l2()}, {"Sigma", NormSpec::sigma()}};
  ScatteringReport out;
  if (rep.intercritical && rep.s_c >= 0.0 && rep.s_c <= 1.0)
    norms.emplace_back("H_sc", NormSpec::sobolev(rep.s_c));
  else
    out.undefined.push_back("H_sc");
  if (rep.subcritical && rep.gamma > 0.0 && rep.gamma <= 1.0)
    norms.emplace_back("FH_gamma", NormSpec::weighted_l2(rep.gamma));
  else
    out.undefined.push_back("FH_gamma");

  std::vector<ComplexField> v;
  v.reserve(cps.size());
  for (const auto& cp : cps) {
    out.times.push_back(cp.t);
    v.push_back(free_propagate(cp.u, -cp.t));
  }
  for (const auto& [name, spec] : norms) {
    out.data_norms[name] = norm(v.front(), spec);
    auto& diffs = out.differences[name];
    for (std::size_t k = 0; k + 1 < v.size(); ++k) diffs.push_back(norm(v[k + 1] - v[k], spec));
  }
  out.u_plus = v.back();
  return out;
}

bool decreasing_after(const std::vector<double>& times, const std::vector<double>& values, double t_from) {
  bool have_prev = false;
  double prev = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (times[i] < t_from) continue;
    if (have_prev && values[i] > prev) return false;
    prev = values[i];
    have_prev = true;
  }
  return true;
}

NonscatteringReport nonscattering_probe(const Trajectory& trajectory, const ComplexField& psi, double t_lo,
                                        double t_hi) {
  NonscatteringReport rep;
  const auto& params = trajectory.params;
  const double p = params.power;
  if (p > 1.0 || p > 2.0 / params.dimension)
    rep.warnings.push_back("power outside the long-range regime p <= min(1, 2/d)");
  const auto& cps = trajectory.checkpoints;
  if (cps.empty()) return rep;

  for (const auto& cp : cps) {
    rep.times.push_back(cp.t);
    rep.overlap.push_back(inner_product(free_propagate(cp.u, -cp.t), psi).imag());
  }

  // C0 with the initial state as the stand-in profile.
  const ComplexField& phi = cps.front().u;
  if (cps.front().t != 0.0) rep.warnings.push_back("first checkpoint is not t = 0; C0 uses it as the profile");
  const ComplexField phi_hat = continuous_transform(phi);
  const ComplexField psi_hat = continuous_transform(psi);
  cplx c0{};
  for (std::size_t k = 0; k < phi_hat.size(); ++k)
    c0 += std::conj(std::pow(std::abs(phi_hat[k]), p) * phi_hat[k]) * psi_hat[k];
  rep.c0 = c0 * phi.grid->frequency_cell_volume();

  std::vector<double> fx, fy;
  bool positive = true;
  bool increasing = true;
  std::optional<double> prev_overlap;
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    const double ti = rep.times[i];
    if (ti < t_lo || ti > t_hi) continue;
    if (prev_overlap && !(rep.overlap[i] > *prev_overlap)) increasing = false;
    prev_overlap = rep.overlap[i];
    if (i == 0 || i + 1 == rep.times.size()) continue;
    const double der = centered_derivative(rep.times, rep.overlap, i);
    rep.derivative_times.push_back(ti);
    rep.derivative.push_back(der);
    if (der > 0.0) {
      fx.push_back(ti);
      fy.push_back(der);
    } else {
      positive = false;
    }
  }
  rep.strictly_increasing = increasing && prev_overlap.has_value();
  rep.ill_conditioned = !positive;
  if (fx.size() >= 3) {
    rep.fit = fit_power_law(fx, fy);
    rep.fit.t_lo = t_lo;
    rep.fit.t_hi = t_hi;
    rep.fit_valid = true;
  }
  return rep;
}

ComplexField time_reversed_state(const ComplexField& u) { return free_propagate(conj(u), -1.0); }

TimeReversalReport time_reversal_check(const Trajectory& forward, const Trajectory& backward,
                                       const ModelParams& params) {
  const auto& f = forward.checkpoints;
  const auto& b = backward.checkpoints;
  if (f.size() != b.size()) throw std::invalid_argument("time_reversal_check: checkpoint counts differ");
  TimeReversalReport rep;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (std::abs(f[k].t + b[k].t) > 1e-12 * std::max(1.0, std::abs(f[k].t)))
      throw std::invalid_argument("time_reversal_check: checkpoint schedules are not mirrored");
    const ComplexField target = time_reversed_state(b[k].u);
    const double scale = l2_norm(target);
    const double dev = l2_norm(f[k].u - target);
    rep.max_field_deviation = std::max(rep.max_field_deviation, scale > 0.0 ? dev / scale : dev);

    const double ev = measure(f[k].u, f[k].t, params).energy_focusing_CHL;
    const double eu = measure(b[k].u, b[k].t, params).energy_focusing_CHL;
    const double escale = std::max(std::abs(eu), std::abs(ev));
    const double edev = std::abs(ev - eu);
    rep.max_energy_deviation = std::max(rep.max_energy_deviation, escale > 0.0 ? edev / escale : edev);
    ++rep.matched;
  }
  return rep;
}

namespace {

// |phi^| on a sorted frequency axis, linearly interpolated; zero outside.
class ModulusInterpolator {
 public:
  explicit ModulusInterpolator(const ComplexField& phi_hat) : grid_(*phi_hat.grid) {
    const int n = grid_.points_per_axis();
    const auto& xi = grid_.frequencies();
    order_.resize(n);
    for (int i = 0; i < n; ++i) order_[i] = (i + n / 2) % n;  // ascending frequencies
    axis_.resize(n);
    for (int i = 0; i < n; ++i) axis_[i] = xi[order_[i]];
    modulus_.resize(phi_hat.size());
    for (std::size_t k = 0; k < phi_hat.size(); ++k) modulus_[k] = std::abs(phi_hat[k]);
  }

  double operator()(double a) const {
    double wa = 0.0;
    const int ia = locate(a, wa);
    if (ia < 0) return 0.0;
    return (1 - wa) * modulus_[order_[ia]] + wa * modulus_[order_[ia + 1]];
  }

  double operator()(double a, double b) const {
    double wa = 0.0, wb = 0.0;
    const int ia = locate(a, wa), ib = locate(b, wb);
    if (ia < 0 || ib < 0) return 0.0;
    const int n = grid_.points_per_axis();
    auto at = [&](int i, int j) { return modulus_[static_cast<std::size_t>(order_[i]) * n + order_[j]]; };
    return (1 - wa) * ((1 - wb) * at(ia, ib) + wb * at(ia, ib + 1)) +
           wa * ((1 - wb) * at(ia + 1, ib) + wb * at(ia + 1, ib + 1));
  }

 private:
  int locate(double x, double& frac) const {
    if (x < axis_.front() || x > axis_.back()) return -1;
    const double dk = axis_[1] - axis_[0];
    int i = static_cast<int>(std::floor((x - axis_.front()) / dk));
    i = std::clamp(i, 0, static_cast<int>(axis_.size()) - 2);
    frac = (x - axis_[i]) / dk;
    return i;
  }

  const Grid& grid_;
  std::vector<int> order_;
  std::vector<double> axis_;
  std::vector<double> modulus_;
};

}  // namespace

ProfileError asymptotic_profile_error(const ComplexField& u, double t, const ComplexField& phi) {
  if (!(t > 0.0)) throw std::invalid_argument("asymptotic_profile_error: t must be positive");
  ProfileError out;
  out.early_time_warning = t < 1.0;
  const Grid& g = *u.grid;
  const ModulusInterpolator interp(continuous_transform(phi));
  const auto& x = g.coordinates();
  const double amp = std::pow(2.0 * t, -0.5 * g.dimension());
  const int n = g.points_per_axis();
  double diff2 = 0.0, ref2 = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    double profile;
    if (g.dimension() == 1) {
      profile = amp * interp(x[k] / (2.0 * t));
    } else {
      profile = amp * interp(x[k / n] / (2.0 * t), x[k % n] / (2.0 * t));
    }
    const double m = std::abs(u[k]);
    diff2 += (m - profile) * (m - profile);
    ref2 += m * m;
  }
  out.error = ref2 > 0.0 ? std::sqrt(diff2 / ref2) : std::sqrt(diff2);
  return out;
}

}  // namespace dmnls
