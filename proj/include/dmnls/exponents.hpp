#pragma once

#include <optional>
#include <string>

namespace dmnls {

/// Snap tolerance used when deciding whether p sits on a regime boundary.
inline constexpr double kBoundarySnap = 1e-12;

/// The threshold power 3 + sqrt(5) below which the one-dimensional
/// large-data scattering argument does not close.
double p0();

enum class Regime { long_range, mass_subcritical, mass_critical, intercritical, energy_critical, supercritical };

std::string to_string(Regime regime);

struct ExponentPair {
  double q;
  double r;
};

struct ExponentTriple {
  double q;
  double r;
  double r_c;
};

/// Space-time exponents on the critical line 2/q_c + d/r_c = 2/p.
struct CriticalPair {
  double q_c;
  double r_c;
  /// true when the sigma variable is measured in L^infinity (d = 1 route),
  /// false when it shares the L^{q_c} time exponent.
  bool sup_over_sigma;
};

/// Every exponent derived from (d, p). Fields that are undefined for the given
/// (d, p) are empty, never zero-filled.
struct ExponentReport {
  int d = 1;
  double p = 1.0;
  double s_c = 0.0;
  double gamma = 0.0;
  Regime regime = Regime::mass_subcritical;
  /// True when p was within kBoundarySnap of a regime boundary and snapped onto it.
  bool snapped_to_boundary = false;
  /// Description of the interval convention, e.g. "half-open, snap 1e-12".
  std::string boundary_convention;

  /// (q, r) = (p+2, 2d(p+2)/(2(d-2)+dp)) and r_c = dp(p+2)/4, for p in [4/d, 4/(d-2)].
  std::optional<ExponentTriple> intercritical;
  /// (q, r, r_c) for p in (2/d, 4/d) intersected with [4/(d+2), 4/d).
  std::optional<ExponentTriple> subcritical;
  /// Critical-bound exponent threshold Q(d, p), p > 4/d.
  std::optional<double> q_threshold;
  /// Growth exponent c_1 of ||J u||_2 and decay exponent of ||w||_{L^{p+2}_{sigma,x}}, 4/d < p <= 4/(d-2).
  std::optional<double> decay_c1;
  std::optional<double> decay_rate_w;
  /// A concrete critical pair: (2p, p) with sup over sigma in d = 1 (p > p0);
  /// q_c = 2 max(p+1, Q) on the critical line for d >= 2.
  std::optional<CriticalPair> critical;
  /// Admissible companion pair p/q_c + 2/q = 1, p/r_c + 2/r = 1 (d >= 2).
  std::optional<ExponentPair> companion;
  double p0 = 0.0;
  /// d = 1 requires p > p0; always true otherwise.
  bool one_d_scattering_ok = true;
};

/// d >= 1, p > 0; throws std::invalid_argument otherwise.
ExponentReport exponent_report(int d, double p);

/// Schrodinger admissibility: 2 <= q, r <= inf, 2/q + d/r = d/2 (1e-12), (d,q,r) != (2,2,inf).
bool admissible(double q, double r, int d);

}  // namespace dmnls
