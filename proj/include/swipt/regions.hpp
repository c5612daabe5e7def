#pragma once

// Rate-energy region boundaries for the separated (SepRx) and integrated
// (IntRx) receivers under time switching, static, on-off and dynamic power
// splitting, with and without decoder circuit power.

#include <functional>
#include <span>

#include "swipt/core.hpp"

namespace swipt::regions {

/// Boundary of the on-off splitting region for a fixed net-energy target.
struct P0Solution {
  double alpha_star = 0.0;
  double rho_star = 0.0;
  double rate = 0.0;
  double q_target = 0.0;
  bool converged = false;
};

/// With s = 1 - alpha the on-off boundary rate at fixed Q reads
///     R(s) = s * log2(1 + (c s + d) / (a s + b)),
/// concave on [s_lo, s_hi].
struct RsCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double s_lo = 0.0;
  double s_hi = 0.0;

  double rate(double s) const;
  double d_rate(double s) const;
  double d2_rate(double s) const;
};

struct DominanceReport {
  double rate_dps = 0.0;
  double energy_dps = 0.0;
  double rate_reduced = 0.0;  // SPS (or OPS) point built from the mean split
  double energy_reduced = 0.0;
  bool energy_equal = false;
  bool dominates = false;
};

/// Rate of a separated decoder at split ratio rho: log2(1 + split_snr).
double split_rate(double rho, const LinkParams& lp);

REBoundary region_ts(const LinkParams& lp, int n_points);
REBoundary region_sps(const LinkParams& lp, int n_points);

/// Compares a dynamic split vector against static splitting at its mean.
DominanceReport check_dps_dominated_by_sps(const LinkParams& lp, std::span<const double> rho);

/// Same comparison with decoder circuit power: the first `alpha` fraction of
/// symbols harvests only, `on_rho` holds the split ratios of the on period.
DominanceReport check_dps_dominated_by_ops(const LinkParams& lp, double p_s, double alpha,
                                           std::span<const double> on_rho);

/// IntRx without circuit power: box with corner (cap, zeta hP).
REBoundary region_int_ideal(const LinkParams& lp, double cap_bits);

/// IntRx with ADC noise and a common split ratio: sweeps rho over
/// [0, 1 - 1e-3] and keeps the Pareto frontier of (cap_fn(rho), rho zeta hP).
REBoundary region_int_adc(const LinkParams& lp, int n_points,
                          const std::function<double(double)>& cap_fn);

RsCoefficients rs_coefficients(const LinkParams& lp, double p_s, double q_target);

/// Maximizes the on-off splitting rate at net energy `q_target` by bisection
/// on dR/ds.
P0Solution solve_p0(const LinkParams& lp, double p_s, double q_target);

/// SepRx on-off splitting region with circuit power.
REBoundary region_sep_circuit(const LinkParams& lp, double p_s, int n_points);

/// Time switching with circuit power, swept from the zero-net-energy point.
REBoundary region_ts_circuit(const LinkParams& lp, double p_s, int n_points);

/// Static splitting with circuit power (alpha = 0), swept from the
/// zero-net-energy point.
REBoundary region_sps_circuit(const LinkParams& lp, double p_s, int n_points);

/// IntRx on-off region with circuit power p_i and decoder rate cap.
REBoundary region_int_circuit(const LinkParams& lp, double p_i, double cap_bits);

}  // namespace swipt::regions
