#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dmnls/dynamics.hpp"
#include "dmnls/quadrature.hpp"
#include "dmnls/spectral.hpp"
#include "gen.hpp"

using namespace dmnls;
using testgen::rel_diff;

namespace {

constexpr double pi = std::numbers::pi;

ModelParams model(double p, NonlinearitySign s = NonlinearitySign::defocusing, int nodes = 16) {
  ModelParams m;
  m.power = p;
  m.sign = s;
  m.sigma = QuadratureRule::gauss_legendre(nodes);
  return m;
}

// A' = -i (k^2 + |A|^p) A for u = A e^{ikx}
ComplexField plane_wave_exact(const GridPtr& g, double amp, double k, double p, double t) {
  const double omega = k * k + std::pow(amp, p);
  return sample(g, [=](double x) { return amp * std::polar(1.0, k * x - omega * t); });
}

double plane_wave_error(double dt) {
  auto g = make_grid(1, 64, 16.0);
  const double k = 2 * (2 * pi / 16.0);
  const double p = 4.0, amp = 0.5;
  StepperConfig cfg;
  cfg.dt = dt;
  cfg.monitor_boundary = false;
  auto u0 = plane_wave_exact(g, amp, k, p, 0.0);
  auto traj = evolve(u0, model(p), cfg, 1.0, {1.0});
  REQUIRE(traj.status == RunStatus::completed);
  return rel_diff(traj.checkpoints.back().u, plane_wave_exact(g, amp, k, p, 1.0));
}

}  // namespace

TEST_CASE("Gauss-Legendre rules") {
  for (int n : {1, 4, 16, 64}) {
    auto r = QuadratureRule::gauss_legendre(n);
    CHECK(std::abs(r.weight_sum() - 1.0) < 1e-14);
    for (double s : r.nodes) CHECK((s > 0.0 && s < 1.0));
  }
  auto r = QuadratureRule::gauss_legendre(5);
  double m = 0.0;
  for (std::size_t j = 0; j < r.size(); ++j) m += r.weights[j] * std::pow(r.nodes[j], 9);
  CHECK(m == doctest::Approx(0.1).epsilon(1e-14));
  auto c = QuadratureRule::composite_gauss_legendre(-2.0, 2.0, 4, 6);
  CHECK(c.size() == 24);
  CHECK(c.weight_sum() == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("model validation") {
  auto m = model(4.0);
  CHECK_NOTHROW(m.validate());
  m.power = -1.0;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = model(4.0);
  m.sigma.weights[0] *= 2.0;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  StepperConfig s;
  s.dt = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("nonlinearity on constants and single modes") {
  auto g = make_grid(1, 64, 16.0);
  const cplx c(0.4, -0.7);
  for (double p : {1.0, 2.5, 4.0, 10.0}) {
    auto u = sample(g, [c](double) { return c; });
    auto n = dmnls_nonlinearity(u, model(p, NonlinearitySign::defocusing, 3));
    const cplx expect = std::pow(std::abs(c), p) * c;
    CHECK(testgen::max_abs_diff(n, sample(g, [expect](double) { return expect; })) < 1e-14);
  }
  const double k = 3 * 2 * pi / 16.0;
  auto wave = sample(g, [k](double x) { return 0.6 * std::polar(1.0, k * x); });
  auto n = dmnls_nonlinearity(wave, model(3.0));
  CHECK(rel_diff(n, std::pow(0.6, 3.0) * wave) < 1e-13);
}

TEST_CASE("sigma quadrature self-convergence") {
  // broad profile, so the sigma integrand is smooth
  auto g = make_grid(1, 512, 128.0);
  auto u = sample(g, [](double x) { return cplx(std::exp(-x * x / 16.0), 0.0); });
  auto n16 = dmnls_nonlinearity(u, model(4.0, NonlinearitySign::defocusing, 16));
  auto n64 = dmnls_nonlinearity(u, model(4.0, NonlinearitySign::defocusing, 64));
  CHECK(rel_diff(n16, n64) < 1e-10);
}

TEST_CASE("overflow is reported") {
  auto g = make_grid(1, 16, 4.0);
  auto u = sample(g, [](double) { return cplx(1e40, 0.0); });
  CHECK_THROWS_AS(dmnls_nonlinearity(u, model(10.0, NonlinearitySign::defocusing, 2)), OverflowError);
}

TEST_CASE("interaction-picture right-hand side") {
  auto g = make_grid(1, 64, 16.0);
  auto lin = model(4.0);
  lin.nonlinearity_weight = 0.0;
  auto c = sample(g, [](double) { return cplx(1.0, 2.0); });
  CHECK(l2_norm(rhs_interaction_picture(c, 0.3, lin)) == 0.0);

  const double amp = 0.7, p = 3.0, k = 2 * pi / 16.0 * 2;
  auto wave = sample(g, [=](double x) { return amp * std::polar(1.0, k * x); });
  for (double t : {0.0, 0.4, -2.0}) {
    const double n = l2_norm(rhs_interaction_picture(wave, t, model(p)));
    CHECK(n == doctest::Approx(std::pow(amp, p + 1) * std::sqrt(16.0)).epsilon(1e-12));
  }
}

TEST_CASE("right-hand side matches a finite difference of the evolved v") {
  auto g = make_grid(1, 512, 64.0);
  auto u0 = sample(g, [](double x) { return cplx(std::exp(-x * x), 0.0); });
  const auto m = model(4.0);
  StepperConfig cfg;
  cfg.dt = 1e-4;
  const double t = 0.3, h = 1e-3;
  auto traj = evolve(u0, m, cfg, t + h, {t - h, t, t + h});
  REQUIRE(traj.status == RunStatus::completed);
  auto v = [&](int i) { return free_propagate(traj.checkpoints[i].u, -traj.checkpoints[i].t); };
  auto fd = (1.0 / (2 * h)) * (v(2) - v(0));
  auto rhs = rhs_interaction_picture(v(1), t, m);
  CHECK(rel_diff(fd, rhs) < 1e-5);
}

TEST_CASE("plane-wave exact solution and fourth-order convergence") {
  const double e1 = plane_wave_error(1e-3);
  CHECK(e1 < 1e-6);
  // Coarse steps keep the error well above rounding so the ratio is meaningful.
  const double a = plane_wave_error(0.1), b = plane_wave_error(0.05);
  CHECK(a / b >= 14.0);
  CHECK(a / b <= 18.0);
}

TEST_CASE("plane waves stay single-mode") {
  auto g = make_grid(1, 64, 16.0);
  const int mode = 2;
  const double k = mode * 2 * pi / 16.0;
  StepperConfig cfg;
  cfg.dt = 1e-2;
  cfg.monitor_boundary = false;
  auto traj = evolve(plane_wave_exact(g, 0.5, k, 4.0, 0.0), model(4.0), cfg, 1.0, {1.0});
  auto uh = to_spectral(traj.checkpoints.back().u);
  const double peak = std::abs(uh[mode]);
  for (std::size_t i = 0; i < uh.size(); ++i)
    if (static_cast<int>(i) != mode) CHECK(std::abs(uh[i]) < 1e-12 * peak);
}

TEST_CASE("zero data stays zero, checkpoints are ordered and include t = 0") {
  auto g = make_grid(1, 64, 16.0);
  StepperConfig cfg;
  cfg.dt = 0.05;
  auto traj = evolve(ComplexField(g), model(2.0), cfg, 1.0, linspace(0.0, 1.0, 5));
  REQUIRE(traj.checkpoints.size() == 5);
  CHECK(traj.checkpoints.front().t == 0.0);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(l2_norm(traj.checkpoints[i].u) == 0.0);
    if (i) CHECK(traj.checkpoints[i].t > traj.checkpoints[i - 1].t);
  }
}

TEST_CASE("backward evolution and time symmetry") {
  auto g = make_grid(1, 512, 64.0);
  auto u0 = sample(g, [](double x) { return cplx(0.8 * std::exp(-x * x), 0.0); });
  const auto m = model(4.0);
  StepperConfig cfg;
  cfg.dt = 1e-2;
  auto fwd = evolve(u0, m, cfg, 1.0, {1.0});
  auto back = evolve(fwd.checkpoints.back().u, m, cfg, -1.0, {-1.0});
  REQUIRE(back.status == RunStatus::completed);
  // one-way error estimated against a reference with dt/4
  StepperConfig fine = cfg;
  fine.dt = 2.5e-3;
  auto ref = evolve(u0, m, fine, 1.0, {1.0});
  const double one_way = rel_diff(fwd.checkpoints.back().u, ref.checkpoints.back().u);
  CHECK(rel_diff(back.checkpoints.back().u, u0) < 10 * one_way + 1e-13);

  auto neg = evolve(u0, m, cfg, -0.5, linspace(0.0, -0.5, 3));
  CHECK(neg.checkpoints.back().t == -0.5);
  CHECK(neg.checkpoints[1].t < 0.0);
}

TEST_CASE("mass conservation and determinism of the stepper") {
  testgen::Gen gen(31);
  auto g = make_grid(1, 256, 64.0);
  for (int trial = 0; trial < 3; ++trial) {
    auto u0 = gen.smooth_field(g, 2);
    StepperConfig cfg;
    cfg.dt = 5e-3;
    const auto m = model(gen.uniform(1.0, 6.0), gen.coin() ? NonlinearitySign::focusing : NonlinearitySign::defocusing, 8);
    auto a = evolve(u0, m, cfg, 0.5, linspace(0.0, 0.5, 6));
    auto b = evolve(u0, m, cfg, 0.5, linspace(0.0, 0.5, 6));
    REQUIRE(a.status == RunStatus::completed);
    const double m0 = std::pow(l2_norm(u0), 2);
    for (std::size_t i = 0; i < a.checkpoints.size(); ++i) {
      CHECK(std::abs(std::pow(l2_norm(a.checkpoints[i].u), 2) - m0) / m0 < 1e-8);
      CHECK(a.checkpoints[i].u.values == b.checkpoints[i].u.values);
    }
  }
}

TEST_CASE("adaptive stepping agrees with fixed steps") {
  auto g = make_grid(1, 256, 32.0);
  auto u0 = sample(g, [](double x) { return cplx(std::exp(-x * x), 0.0); });
  StepperConfig fixed;
  fixed.dt = 1e-3;
  StepperConfig adaptive;
  adaptive.adaptive = true;
  adaptive.dt = 1e-2;
  adaptive.tol = 1e-10;
  auto a = evolve(u0, model(4.0), fixed, 0.5, {0.25, 0.5});
  auto b = evolve(u0, model(4.0), adaptive, 0.5, {0.25, 0.5});
  REQUIRE(b.status == RunStatus::completed);
  CHECK(b.checkpoints.back().t == 0.5);
  CHECK(rel_diff(b.checkpoints.back().u, a.checkpoints.back().u) < 1e-7);
}

TEST_CASE("focusing blowup is detected") {
  // the large-data Gaussian concentrates quickly in backward time
  auto g = make_grid(1, 1024, 32.0);
  auto u0 = sample(g, [](double x) { return cplx(1.6 * std::exp(-x * x), 0.0); });
  StepperConfig cfg;
  cfg.adaptive = true;
  cfg.dt = 1e-3;
  cfg.tol = 1e-9;
  cfg.min_dt = 1e-6;
  cfg.monitor_boundary = false;
  auto traj = evolve(u0, model(10.0, NonlinearitySign::focusing, 16), cfg, -0.5, {-0.5});
  CHECK(traj.status == RunStatus::blowup_detected);
  REQUIRE(traj.failure_time.has_value());
  CHECK(*traj.failure_time < 0.0);
  CHECK(*traj.failure_time > -0.5);
}

TEST_CASE("boundary mass invalidates the run") {
  auto g = make_grid(1, 256, 16.0);
  auto u0 = sample(g, [](double x) { return cplx(std::exp(-x * x), 0.0); });
  StepperConfig cfg;
  cfg.dt = 1e-2;
  auto lin = model(2.0);
  lin.nonlinearity_weight = 0.0;
  auto traj = evolve(u0, lin, cfg, 5.0, linspace(0.0, 5.0, 11));
  CHECK(traj.status == RunStatus::invalidated_boundary_mass);
  for (const auto& c : traj.checkpoints) CHECK(c.u.is_finite());
}

TEST_CASE("checkpoints outside the time range are rejected") {
  auto g = make_grid(1, 64, 16.0);
  StepperConfig cfg;
  CHECK_THROWS_AS(evolve(ComplexField(g), model(2.0), cfg, 1.0, {2.0}), std::invalid_argument);
  CHECK_THROWS_AS(evolve(ComplexField(g), model(2.0), cfg, -1.0, {0.5}), std::invalid_argument);
}
