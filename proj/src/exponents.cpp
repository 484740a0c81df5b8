#include "dmnls/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dmnls {

double p0() { return 3.0 + std::sqrt(5.0); }

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::long_range: return "long_range";
    case Regime::mass_subcritical: return "mass_subcritical";
    case Regime::mass_critical: return "mass_critical";
    case Regime::intercritical: return "intercritical";
    case Regime::energy_critical: return "energy_critical";
    case Regime::supercritical: return "supercritical";
  }
  return "unknown";
}

namespace {

double inv(double x) { return std::isinf(x) ? 0.0 : 1.0 / x; }

// -1: below, 0: on (within snap), +1: above
int compare(double p, double boundary, bool& snapped) {
  if (std::abs(p - boundary) <= kBoundarySnap * std::max(1.0, std::abs(boundary))) {
    snapped = true;
    return 0;
  }
  return p < boundary ? -1 : 1;
}

}  // namespace

bool admissible(double q, double r, int d) {
  if (d < 1) return false;
  if (!(q >= 2.0) || !(r >= 2.0)) return false;
  if (d == 2 && q == 2.0 && std::isinf(r)) return false;
  return std::abs(2.0 * inv(q) + d * inv(r) - 0.5 * d) <= 1e-12;
}

ExponentReport exponent_report(int d, double p) {
  if (d < 1) throw std::invalid_argument("exponent_report: d must be >= 1");
  if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("exponent_report: p must be positive");

  ExponentReport rep;
  rep.d = d;
  rep.p = p;
  rep.s_c = 0.5 * d - 2.0 / p;
  rep.gamma = 2.0 / p - 0.5 * d;
  rep.p0 = p0();
  rep.boundary_convention = "half-open intervals; |p - boundary| <= 1e-12 * max(1, boundary) snaps onto the boundary";

  const double long_range = 2.0 / d;
  const double mass_critical = 4.0 / d;
  const double energy_critical =
      d >= 3 ? 4.0 / (d - 2) : std::numeric_limits<double>::infinity();

  bool snapped = false;
  const int vs_long = compare(p, long_range, snapped);
  const int vs_mass = compare(p, mass_critical, snapped);
  const int vs_energy = d >= 3 ? compare(p, energy_critical, snapped) : -1;
  rep.snapped_to_boundary = snapped;

  if (vs_long <= 0)
    rep.regime = Regime::long_range;
  else if (vs_mass < 0)
    rep.regime = Regime::mass_subcritical;
  else if (vs_mass == 0)
    rep.regime = Regime::mass_critical;
  else if (vs_energy < 0)
    rep.regime = Regime::intercritical;
  else if (vs_energy == 0)
    rep.regime = Regime::energy_critical;
  else
    rep.regime = Regime::supercritical;

  // Pair used for small-data scattering above the mass-critical power.
  if (vs_mass >= 0 && vs_energy <= 0) {
    const double q = p + 2.0;
    const double r = 2.0 * d * (p + 2.0) / (2.0 * (d - 2) + d * p);
    const double r_c = d * p * (p + 2.0) / 4.0;
    rep.intercritical = ExponentTriple{q, r, vs_mass == 0 ? r : r_c};
  }

  // Triple used for weighted small-data scattering below it.
  bool dummy = false;
  if (vs_long > 0 && vs_mass < 0 && compare(p, 4.0 / (d + 2), dummy) >= 0) {
    const double q = 2.0 * (p + 2.0) / (d * p - 2.0);
    const double r = 2.0 * d * (p + 2.0) / (4.0 + d * (2.0 - p));
    const double r_c = d * p * (p + 2.0) / (2.0 * (d * p - 2.0));
    rep.subcritical = ExponentTriple{q, r, r_c};
  }

  if (vs_mass > 0) {
    const double dp4 = d * p - 4.0;
    const int vs_eight = compare(p, 8.0 / d, dummy);
    rep.q_threshold = vs_eight > 0 ? 2.0 * p / dp4 : 8.0 * p / (dp4 * dp4);
    if (vs_energy <= 0) {
      rep.decay_c1 = vs_eight > 0 ? 0.0 : 2.0 - d * p / 4.0;
      rep.decay_rate_w = vs_eight > 0 ? -2.0 / (p + 2.0) : -dp4 / (2.0 * (p + 2.0));
    }
    if (d == 1) {
      if (p > rep.p0) rep.critical = CriticalPair{2.0 * p, p, true};
    } else if (vs_energy <= 0) {
      const double q_c = 2.0 * std::max(p + 1.0, *rep.q_threshold);
      const double r_c = d / (2.0 / p - 2.0 / q_c);
      rep.critical = CriticalPair{q_c, r_c, false};
      const double q = 2.0 / (1.0 - p / q_c);
      const double r = 2.0 / (1.0 - p / r_c);
      rep.companion = ExponentPair{q, r};
    }
  }

  rep.one_d_scattering_ok = d != 1 || p > rep.p0;
  return rep;
}

}  // namespace dmnls
