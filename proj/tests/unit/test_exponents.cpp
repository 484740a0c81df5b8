#include <doctest.h>

#include <cmath>
#include <limits>

#include "dmnls/exponents.hpp"
#include "gen.hpp"

using namespace dmnls;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

void check_relations(const ExponentReport& rep) {
  const double d = rep.d, p = rep.p;
  CHECK(std::abs(rep.s_c + rep.gamma) < 1e-15);
  if (rep.intercritical) {
    const auto& e = *rep.intercritical;
    CHECK(admissible(e.q, e.r, rep.d));
    CHECK(std::abs(d / e.r_c - (d / e.r - rep.s_c)) < 1e-12);
    CHECK(std::abs((1 - 1 / e.q) - (p + 1) / e.q) < 1e-12);
    CHECK(std::abs((1 - 1 / e.r) - (p / e.r_c + 1 / e.r)) < 1e-12);
  }
  if (rep.subcritical) {
    const auto& e = *rep.subcritical;
    CHECK(admissible(e.q, e.r, rep.d));
    CHECK(std::abs(d / e.r_c - (d / e.r - rep.gamma)) < 1e-12);
    CHECK(std::abs((1 - 1 / e.q) - ((p + 1) / e.q + p * rep.gamma)) < 1e-12);
    CHECK(std::abs((1 - 1 / e.r) - (p / e.r_c + 1 / e.r)) < 1e-12);
  }
  if (rep.companion) CHECK(admissible(rep.companion->q, rep.companion->r, rep.d));
}

}  // namespace

TEST_CASE("golden values") {
  auto r14 = exponent_report(1, 4.0);
  CHECK(r14.regime == Regime::mass_critical);
  CHECK(r14.s_c == 0.0);

  auto r34 = exponent_report(3, 4.0);
  CHECK(r34.regime == Regime::energy_critical);
  CHECK(r34.s_c == doctest::Approx(1.0).epsilon(1e-15));

  CHECK(p0() == doctest::Approx(5.2360679774997896964).epsilon(1e-15));
  CHECK_FALSE(exponent_report(1, 5.23).one_d_scattering_ok);
  CHECK(exponent_report(1, 5.24).one_d_scattering_ok);
  CHECK(exponent_report(2, 1.5).one_d_scattering_ok);

  auto r16 = exponent_report(1, 6.0);
  REQUIRE(r16.decay_c1);
  CHECK(*r16.decay_c1 == doctest::Approx(0.5));
  CHECK(*r16.decay_rate_w == doctest::Approx(-0.125));

  auto r110 = exponent_report(1, 10.0);
  REQUIRE(r110.q_threshold);
  CHECK(*r110.q_threshold == doctest::Approx(10.0 / 3.0).epsilon(1e-15));
  CHECK(*r110.decay_c1 == 0.0);
  CHECK(*r110.decay_rate_w == doctest::Approx(-2.0 / 12.0));

  auto r13 = exponent_report(1, 3.0);
  CHECK(r13.gamma == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(r13.regime == Regime::mass_subcritical);
  REQUIRE(r13.subcritical);
  CHECK(r13.subcritical->q == doctest::Approx(10.0));
  CHECK_FALSE(r13.intercritical);
  CHECK_FALSE(r13.q_threshold);
}

TEST_CASE("Q threshold in the lower intercritical range") {
  auto r = exponent_report(1, 6.0);
  REQUIRE(r.q_threshold);
  CHECK(*r.q_threshold == doctest::Approx(8.0 * 6 / 4.0));
}

TEST_CASE("regime classification") {
  CHECK(exponent_report(1, 2.0).regime == Regime::long_range);
  CHECK(exponent_report(1, 1.0).regime == Regime::long_range);
  CHECK(exponent_report(2, 1.0).regime == Regime::long_range);
  CHECK(exponent_report(2, 2.0).regime == Regime::mass_critical);
  CHECK(exponent_report(2, 50.0).regime == Regime::intercritical);
  CHECK(exponent_report(3, 5.0).regime == Regime::supercritical);
  CHECK(exponent_report(3, 3.0).regime == Regime::intercritical);
  auto snapped = exponent_report(3, 4.0 / 3.0 + 1e-13);
  CHECK(snapped.regime == Regime::mass_critical);
  CHECK(snapped.snapped_to_boundary);
  CHECK_FALSE(snapped.boundary_convention.empty());
}

TEST_CASE("mass-critical r_c equals r") {
  auto r = exponent_report(1, 4.0);
  REQUIRE(r.intercritical);
  CHECK(r.intercritical->r_c == doctest::Approx(r.intercritical->r));
}

TEST_CASE("undefined exponents are absent") {
  auto r = exponent_report(4, 0.5);
  CHECK_FALSE(r.subcritical);
  CHECK_FALSE(r.intercritical);
  CHECK_FALSE(r.decay_c1);
  CHECK_THROWS_AS(exponent_report(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(exponent_report(1, 0.0), std::invalid_argument);
}

TEST_CASE("admissibility") {
  for (int d = 1; d <= 5; ++d) CHECK(admissible(inf, 2.0, d));
  CHECK(admissible(2.0, 6.0, 3));
  CHECK_FALSE(admissible(2.0, inf, 2));
  CHECK(admissible(4.0, inf, 1));
  CHECK_FALSE(admissible(1.5, 2.0, 1));
  CHECK_FALSE(admissible(4.0, 4.0, 1));
}

TEST_CASE("property: random (d, p) satisfy every identity") {
  testgen::Gen gen(424242);
  for (int i = 0; i < 10000; ++i) {
    const int d = gen.integer(1, 6);
    const double p = gen.uniform(0.05, 12.0);
    check_relations(exponent_report(d, p));
  }
}

TEST_CASE("property: s_c increases and gamma decreases in p") {
  for (int d = 1; d <= 4; ++d) {
    double prev_sc = -inf, prev_g = inf;
    for (double p = 0.1; p < 12.0; p += 0.05) {
      auto r = exponent_report(d, p);
      CHECK(r.s_c > prev_sc);
      CHECK(r.gamma < prev_g);
      prev_sc = r.s_c;
      prev_g = r.gamma;
    }
  }
}
