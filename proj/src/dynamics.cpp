#include "dmnls/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dmnls/fft.hpp"
#include "dmnls/spectral.hpp"

namespace dmnls {

void ModelParams::validate() const {
  if (dimension != 1 && dimension != 2) throw std::invalid_argument("ModelParams: dimension must be 1 or 2");
  if (!(power > 0.0) || !std::isfinite(power)) throw std::invalid_argument("ModelParams: power must be > 0");
  if (sigma.size() == 0) throw std::invalid_argument("ModelParams: empty sigma quadrature");
  if (std::abs(sigma.weight_sum() - 1.0) > 1e-14)
    throw std::invalid_argument("ModelParams: sigma weights must sum to 1");
  for (double s : sigma.nodes)
    if (s < 0.0 || s > 1.0) throw std::invalid_argument("ModelParams: sigma nodes must lie in [0, 1]");
  if (!std::isfinite(nonlinearity_weight)) throw std::invalid_argument("ModelParams: non-finite weight");
}

void StepperConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("StepperConfig: dt must be > 0");
  if (adaptive) {
    if (!(tol > 0.0)) throw std::invalid_argument("StepperConfig: tol must be > 0");
    if (!(min_dt > 0.0 && min_dt <= dt && dt <= max_dt))
      throw std::invalid_argument("StepperConfig: need 0 < min_dt <= dt <= max_dt");
  }
  if (!(blowup_gradient_factor > 1.0)) throw std::invalid_argument("StepperConfig: blowup factor must be > 1");
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::completed: return "completed";
    case RunStatus::blowup_detected: return "blowup_detected";
    case RunStatus::invalidated_boundary_mass: return "invalidated_boundary_mass";
  }
  return "unknown";
}

void apply_power_nonlinearity(std::span<cplx> w, double p) {
  const double rounded = std::round(p);
  const bool integral = std::abs(p - rounded) < 1e-15 && rounded <= 64.0;
  const int ip = static_cast<int>(rounded);
  bool finite = true;
  for (auto& z : w) {
    const double m = std::norm(z);
    double factor;
    if (integral && ip % 2 == 0) {
      factor = 1.0;
      for (int k = 0; k < ip / 2; ++k) factor *= m;
    } else if (integral) {
      factor = std::sqrt(m);
      for (int k = 0; k < ip / 2; ++k) factor *= m;
    } else {
      factor = std::pow(m, 0.5 * p);
    }
    z *= factor;
    finite = finite && std::isfinite(z.real()) && std::isfinite(z.imag());
  }
  if (!finite) throw OverflowError("nonlinearity overflow: |w|^p w is not finite");
}

NonlinearityKernel::NonlinearityKernel(GridPtr grid, const ModelParams& params)
    : grid_(std::move(grid)), power_(params.power), weights_(params.sigma.weights), nodes_(params.sigma.nodes) {
  params.validate();
  const auto& xi2 = grid_->frequency_squared();
  node_phase_.resize(nodes_.size());
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    node_phase_[j].resize(xi2.size());
    for (std::size_t k = 0; k < xi2.size(); ++k) node_phase_[j][k] = std::polar(1.0, -nodes_[j] * xi2[k]);
  }
}

void NonlinearityKernel::apply(std::span<const cplx> v_hat, double t, std::span<cplx> out_hat) const {
  const Grid& g = *grid_;
  const std::size_t n = g.size();
  const auto& xi2 = g.frequency_squared();
  std::vector<cplx> base(n), w(n);
  for (std::size_t k = 0; k < n; ++k) base[k] = std::polar(1.0, -t * xi2[k]) * v_hat[k];
  std::vector<cplx> acc(n, cplx{});
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    const auto& ph = node_phase_[j];
    for (std::size_t k = 0; k < n; ++k) w[k] = ph[k] * base[k];
    fft::inverse(g, w);
    apply_power_nonlinearity(w, power_);
    fft::forward(g, w);
    const double wj = weights_[j];
    for (std::size_t k = 0; k < n; ++k) acc[k] += wj * std::conj(ph[k]) * w[k];
  }
  for (std::size_t k = 0; k < n; ++k) out_hat[k] = std::polar(1.0, t * xi2[k]) * acc[k];
}

ComplexField dmnls_nonlinearity(const ComplexField& u, const ModelParams& params) {
  u.require_finite("dmnls_nonlinearity");
  const NonlinearityKernel kernel(u.grid, params);
  ComplexField u_hat = to_spectral(u);
  ComplexField out(u.grid);
  kernel.apply(u_hat.values, 0.0, out.values);
  fft::inverse(*u.grid, out.values);
  return out;
}

ComplexField rhs_interaction_picture(const ComplexField& v, double t, const ModelParams& params) {
  v.require_finite("rhs_interaction_picture");
  const NonlinearityKernel kernel(v.grid, params);
  ComplexField v_hat = to_spectral(v);
  ComplexField out(v.grid);
  kernel.apply(v_hat.values, t, out.values);
  const cplx factor{0.0, -params.sign_factor() * params.nonlinearity_weight};
  for (auto& z : out.values) z *= factor;
  fft::inverse(*v.grid, out.values);
  return out;
}

std::vector<double> linspace(double a, double b, int count) {
  if (count < 2) throw std::invalid_argument("linspace: count must be >= 2");
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = a + (b - a) * i / (count - 1);
  out.back() = b;
  return out;
}

namespace {

using Spectrum = std::vector<cplx>;

// RK4 on v_hat' = factor * K(v_hat, t), with the linear flow handled exactly
// by the interaction picture.
class InteractionStepper {
 public:
  InteractionStepper(const GridPtr& grid, const ModelParams& params)
      : kernel_(grid, params),
        factor_{0.0, -params.sign_factor() * params.nonlinearity_weight},
        linear_(params.nonlinearity_weight == 0.0),
        n_(grid->size()),
        k1_(n_), k2_(n_), k3_(n_), k4_(n_), stage_(n_) {}

  void step(Spectrum& v, double t, double h) {
    if (linear_) return;
    rhs(v, t, k1_);
    combine(v, k1_, 0.5 * h);
    rhs(stage_, t + 0.5 * h, k2_);
    combine(v, k2_, 0.5 * h);
    rhs(stage_, t + 0.5 * h, k3_);
    combine(v, k3_, h);
    rhs(stage_, t + h, k4_);
    const double c = h / 6.0;
    for (std::size_t k = 0; k < n_; ++k) v[k] += c * (k1_[k] + 2.0 * k2_[k] + 2.0 * k3_[k] + k4_[k]);
  }

 private:
  void rhs(const Spectrum& v, double t, Spectrum& out) {
    kernel_.apply(v, t, out);
    for (auto& z : out) z *= factor_;
  }
  void combine(const Spectrum& v, const Spectrum& k, double h) {
    for (std::size_t i = 0; i < n_; ++i) stage_[i] = v[i] + h * k[i];
  }

  NonlinearityKernel kernel_;
  cplx factor_;
  bool linear_;
  std::size_t n_;
  Spectrum k1_, k2_, k3_, k4_, stage_;
};

double spectral_l2(const Spectrum& v, double cell) {
  double acc = 0.0;
  for (const auto& z : v) acc += std::norm(z);
  return std::sqrt(acc * cell);
}

double spectral_gradient_norm(const Spectrum& v, const Grid& g) {
  const auto& xi2 = g.frequency_squared();
  double acc = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) acc += xi2[k] * std::norm(v[k]);
  return std::sqrt(acc * g.cell_volume());
}

bool all_finite(const Spectrum& v) {
  for (const auto& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

ComplexField physical_state(const Spectrum& v, double t, const GridPtr& grid) {
  ComplexField u(grid);
  const auto& xi2 = grid->frequency_squared();
  for (std::size_t k = 0; k < v.size(); ++k) u[k] = std::polar(1.0, -t * xi2[k]) * v[k];
  fft::inverse(*grid, u.values);
  return u;
}

std::string format_time(double t) {
  std::ostringstream os;
  os.precision(10);
  os << t;
  return os.str();
}

}  // namespace

Trajectory evolve(const ComplexField& u0, const ModelParams& params, const StepperConfig& cfg, double t_final,
                  std::vector<double> checkpoint_times) {
  params.validate();
  cfg.validate();
  u0.require_finite("evolve");
  if (u0.grid->dimension() != params.dimension)
    throw std::invalid_argument("evolve: grid dimension does not match model dimension");
  if (!std::isfinite(t_final)) throw std::invalid_argument("evolve: t_final must be finite");

  const double direction = t_final < 0.0 ? -1.0 : 1.0;
  const double lo = std::min(0.0, t_final), hi = std::max(0.0, t_final);
  for (double tc : checkpoint_times)
    if (tc < lo || tc > hi) throw std::invalid_argument("evolve: checkpoint time outside [0, t_final]");
  std::sort(checkpoint_times.begin(), checkpoint_times.end(),
            [direction](double a, double b) { return direction * a < direction * b; });
  for (std::size_t i = 1; i < checkpoint_times.size(); ++i)
    if (checkpoint_times[i] == checkpoint_times[i - 1])
      throw std::invalid_argument("evolve: duplicate checkpoint time");

  Trajectory traj;
  traj.params = params;
  traj.grid = u0.grid;
  const GridPtr& grid = u0.grid;
  const Grid& g = *grid;

  Spectrum v(g.size());
  fft::forward(g, u0.values, v);
  traj.initial_gradient_norm = spectral_gradient_norm(v, g);

  InteractionStepper stepper(grid, params);
  std::vector<double> targets = checkpoint_times;
  if (targets.empty() || targets.back() != t_final) targets.push_back(t_final);
  const std::size_t stored = checkpoint_times.size();

  double t = 0.0;
  double h_adaptive = cfg.dt;
  auto fail = [&](RunStatus status, double when, std::string reason) {
    traj.status = status;
    traj.failure_time = when;
    traj.failure_reason = std::move(reason);
  };
  // Returns false when the run must halt.
  auto post_step_checks = [&](double when) {
    if (!all_finite(v)) {
      fail(RunStatus::blowup_detected, when, "non-finite state at t=" + format_time(when));
      return false;
    }
    if (traj.initial_gradient_norm > 0.0) {
      const double ratio = spectral_gradient_norm(v, g) / traj.initial_gradient_norm;
      traj.max_gradient_ratio = std::max(traj.max_gradient_ratio, ratio);
      if (ratio > cfg.blowup_gradient_factor) {
        fail(RunStatus::blowup_detected, when, "gradient norm grew by factor " + format_time(ratio));
        return false;
      }
    }
    return true;
  };

  const double cell = g.cell_volume();
  Spectrum big(g.size()), half(g.size());

  for (std::size_t ti = 0; ti < targets.size(); ++ti) {
    const double target = targets[ti];
    try {
      if (!cfg.adaptive) {
        const double span = target - t;
        if (span != 0.0) {
          const auto steps = static_cast<long>(std::max(1.0, std::ceil(std::abs(span) / cfg.dt - 1e-9)));
          const double h = span / static_cast<double>(steps);
          const double start = t;
          for (long s = 0; s < steps; ++s) {
            const double t0 = start + h * static_cast<double>(s);
            stepper.step(v, t0, h);
            ++traj.accepted_steps;
            t = s + 1 == steps ? target : start + h * static_cast<double>(s + 1);
            if (!post_step_checks(t)) return traj;
          }
        }
      } else {
        while (direction * (target - t) > 0.0) {
          const double remaining = std::abs(target - t);
          const bool last = h_adaptive >= remaining;
          const double h = direction * (last ? remaining : h_adaptive);
          big = v;
          bool ok = true;
          try {
            stepper.step(big, t, h);
            half = v;
            stepper.step(half, t, 0.5 * h);
            stepper.step(half, t + 0.5 * h, 0.5 * h);
          } catch (const OverflowError&) {
            ok = false;
          }
          double err = 0.0;
          if (ok) {
            for (std::size_t k = 0; k < v.size(); ++k) err += std::norm(big[k] - half[k]);
            err = std::sqrt(err * cell);
          }
          const double target_err = cfg.tol * (1.0 + spectral_l2(v, cell));
          if (ok && std::isfinite(err) && err <= target_err) {
            v.swap(half);
            t = last ? target : t + h;
            ++traj.accepted_steps;
            if (!post_step_checks(t)) return traj;
            if (err < target_err / 32.0 && !last) h_adaptive = std::min(2.0 * h_adaptive, cfg.max_dt);
          } else {
            ++traj.rejected_steps;
            h_adaptive *= 0.5;
            if (h_adaptive < cfg.min_dt) {
              fail(RunStatus::blowup_detected, t, "step size underflow at t=" + format_time(t));
              return traj;
            }
          }
        }
      }
    } catch (const OverflowError& e) {
      fail(RunStatus::blowup_detected, t, e.what());
      return traj;
    }

    if (ti < stored) {
      ComplexField u = physical_state(v, target, grid);
      if (cfg.monitor_boundary) {
        const double frac = boundary_mass_fraction(u);
        if (frac > cfg.boundary_mass_threshold) {
          traj.checkpoints.push_back({target, std::move(u)});
          fail(RunStatus::invalidated_boundary_mass, target,
               "boundary mass fraction " + format_time(frac) + " exceeds threshold");
          return traj;
        }
      }
      traj.checkpoints.push_back({target, std::move(u)});
    }
  }
  return traj;
}

}  // namespace dmnls
