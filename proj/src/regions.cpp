#include "swipt/regions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace swipt::regions {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::InvalidParams, what);
}

double grid(int i, int n, double lo, double hi) {
  return n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
}

// Reorders by energy and enforces the upper envelope: for each energy the
// rate is the best rate available at that energy or above.
REBoundary pareto_frontier(std::vector<REPoint> pts, std::string scheme, std::string receiver) {
  std::stable_sort(pts.begin(), pts.end(),
                   [](const REPoint& a, const REPoint& b) { return a.energy < b.energy; });
  double best = 0.0;
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
    best = std::max(best, it->rate);
    it->rate = best;
  }
  return {std::move(pts), std::move(scheme), std::move(receiver)};
}

}  // namespace

double RsCoefficients::rate(double s) const {
  return s * std::log2(1.0 + (c * s + d) / (a * s + b));
}

double RsCoefficients::d_rate(double s) const {
  const double u = (a + c) * s + b + d;
  const double v = a * s + b;
  return std::log2(1.0 + (c * s + d) / v) + s * (b * c - a * d) / (u * v * std::numbers::ln2);
}

double RsCoefficients::d2_rate(double s) const {
  const double u = (a + c) * s + b + d;
  const double v = a * s + b;
  const double k = b * c - a * d;
  return k * ((b * (a + c) + a * (b + d)) * s + 2.0 * b * (b + d)) /
         (u * u * v * v * std::numbers::ln2);
}

double split_rate(double rho, const LinkParams& lp) {
  return std::log2(1.0 + split_snr(rho, lp));
}

REBoundary region_ts(const LinkParams& lp, int n_points) {
  lp.validate();
  require(n_points >= 2, "n_points must be at least 2");
  const double r_max = awgn_rate(lp);
  const double q_max = lp.max_energy();
  REBoundary out{{}, "ts", "separated"};
  for (int i = 0; i < n_points; ++i) {
    const double alpha = grid(i, n_points, 0.0, 1.0);
    out.points.push_back({(1.0 - alpha) * r_max, alpha * q_max});
  }
  return out;
}

REBoundary region_sps(const LinkParams& lp, int n_points) {
  lp.validate();
  require(n_points >= 2, "n_points must be at least 2");
  const double q_max = lp.max_energy();
  REBoundary out{{}, "sps", "separated"};
  for (int i = 0; i < n_points; ++i) {
    const double rho = grid(i, n_points, 0.0, 1.0);
    out.points.push_back({split_rate(rho, lp), rho * q_max});
  }
  return out;
}

DominanceReport check_dps_dominated_by_sps(const LinkParams& lp, std::span<const double> rho) {
  require(!rho.empty(), "split vector must not be empty");
  const double n = static_cast<double>(rho.size());
  double rate_sum = 0.0;
  for (double r : rho) rate_sum += split_rate(r, lp);
  const double mean_rho = std::accumulate(rho.begin(), rho.end(), 0.0) / n;

  DominanceReport rep;
  rep.rate_dps = rate_sum / n;
  rep.energy_dps = harvested_energy(SplitVector{{rho.begin(), rho.end()}}, lp);
  rep.rate_reduced = split_rate(std::clamp(mean_rho, 0.0, 1.0), lp);
  rep.energy_reduced = lp.max_energy() * mean_rho;
  rep.energy_equal =
      std::abs(rep.energy_dps - rep.energy_reduced) <= 1e-12 * std::max(1.0, rep.energy_reduced);
  rep.dominates = rep.rate_reduced >= rep.rate_dps - 1e-12;
  return rep;
}

DominanceReport check_dps_dominated_by_ops(const LinkParams& lp, double p_s, double alpha,
                                           std::span<const double> on_rho) {
  require(alpha >= 0.0 && alpha < 1.0, "alpha must lie in [0, 1)");
  require(!on_rho.empty(), "on-period split vector must not be empty");
  require(p_s >= 0.0, "circuit power must be nonnegative");
  const double on = 1.0 - alpha;
  const double m = static_cast<double>(on_rho.size());
  const double q_max = lp.max_energy();

  double rate_sum = 0.0;
  double rho_sum = 0.0;
  for (double r : on_rho) {
    rate_sum += split_rate(r, lp);
    rho_sum += r;
  }
  const double mean_rho = rho_sum / m;

  DominanceReport rep;
  rep.rate_dps = on * rate_sum / m;
  rep.energy_dps = alpha * q_max + on * (rho_sum / m) * q_max - on * p_s;
  rep.rate_reduced = on * split_rate(std::clamp(mean_rho, 0.0, 1.0), lp);
  rep.energy_reduced = harvested_energy(OpsPair{alpha, std::clamp(mean_rho, 0.0, 1.0)}, lp) - on * p_s;
  rep.energy_equal =
      std::abs(rep.energy_dps - rep.energy_reduced) <= 1e-12 * std::max(1.0, std::abs(rep.energy_reduced));
  rep.dominates = rep.rate_reduced >= rep.rate_dps - 1e-12;
  return rep;
}

REBoundary region_int_ideal(const LinkParams& lp, double cap_bits) {
  lp.validate();
  require(cap_bits >= 0.0, "capacity must be nonnegative");
  const double q_max = lp.max_energy();
  return {{{cap_bits, 0.0}, {cap_bits, q_max}, {0.0, q_max}}, "int-ideal", "integrated"};
}

REBoundary region_int_adc(const LinkParams& lp, int n_points,
                          const std::function<double(double)>& cap_fn) {
  lp.validate();
  require(n_points >= 2, "n_points must be at least 2");
  constexpr double kEdge = 1e-3;
  const double q_max = lp.max_energy();
  std::vector<REPoint> pts;
  pts.reserve(static_cast<std::size_t>(n_points) + 1);
  for (int i = 0; i < n_points; ++i) {
    const double rho = grid(i, n_points, 0.0, 1.0 - kEdge);
    pts.push_back({std::max(0.0, cap_fn(rho)), rho * q_max});
  }
  // The union of boxes reaches the energy axis at rho -> 1.
  pts.push_back({0.0, q_max});
  return pareto_frontier(std::move(pts), "int-adc", "integrated");
}

RsCoefficients rs_coefficients(const LinkParams& lp, double p_s, double q_target) {
  lp.validate();
  require(p_s > 0.0, "rs_coefficients: p_s must be positive");
  const double hp = lp.received_power();
  const double q_max = lp.max_energy();
  if (!(q_target >= 0.0) || !(q_target < q_max)) {
    throw Error(ErrorKind::InfeasibleTarget, "rs_coefficients: need 0 <= Q < zeta hP");
  }
  const double frac = 1.0 - q_target / q_max;
  RsCoefficients k;
  k.a = lp.sigma2_cov - lp.sigma2_a * p_s / q_max;
  k.b = lp.sigma2_a * frac;
  k.c = -p_s / lp.zeta;
  k.d = hp * frac;
  k.s_lo = k.d / (hp - k.c);
  k.s_hi = std::min(-k.d / k.c, 1.0);
  return k;
}

P0Solution solve_p0(const LinkParams& lp, double p_s, double q_target) {
  lp.validate();
  if (p_s == 0.0) {
    throw Error(ErrorKind::DegenerateCircuitPower,
                "solve_p0: p_s = 0 reduces to static splitting");
  }
  require(p_s > 0.0, "solve_p0: p_s must be positive");
  const double q_max = lp.max_energy();
  if (!(q_target >= 0.0) || q_target > q_max) {
    throw Error(ErrorKind::InfeasibleTarget, "solve_p0: need 0 <= Q <= zeta hP");
  }

  P0Solution sol;
  sol.q_target = q_target;
  if (q_target == q_max) {
    sol.alpha_star = 1.0;
    sol.rho_star = 1.0;
    sol.rate = 0.0;
    sol.converged = true;
    return sol;
  }

  const RsCoefficients k = rs_coefficients(lp, p_s, q_target);
  constexpr double kWidth = 1e-9;
  double s_star;
  if (k.d_rate(k.s_hi) >= 0.0) {
    s_star = k.s_hi;
  } else if (k.d_rate(k.s_lo) <= 0.0) {
    s_star = k.s_lo;
  } else {
    double lo = k.s_lo;
    double hi = k.s_hi;
    while (hi - lo > kWidth) {
      const double mid = 0.5 * (lo + hi);
      if (k.d_rate(mid) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    s_star = 0.5 * (lo + hi);
  }

  sol.alpha_star = 1.0 - s_star;
  const double rho = (q_target - sol.alpha_star * q_max + s_star * p_s) / (s_star * q_max);
  constexpr double kSlack = 1e-12;
  require(rho >= -kSlack && rho <= 1.0 + kSlack, "solve_p0: split ratio left [0, 1]");
  sol.rho_star = std::clamp(rho, 0.0, 1.0);
  sol.rate = s_star * split_rate(sol.rho_star, lp);
  sol.converged = true;
  return sol;
}

REBoundary region_sep_circuit(const LinkParams& lp, double p_s, int n_points) {
  require(n_points >= 2, "n_points must be at least 2");
  const double q_max = lp.max_energy();
  REBoundary out{{}, "ops-circuit", "separated"};
  for (int i = 0; i < n_points; ++i) {
    const double q = i + 1 == n_points ? q_max : grid(i, n_points, 0.0, q_max);
    out.points.push_back({solve_p0(lp, p_s, q).rate, q});
  }
  return pareto_frontier(std::move(out.points), out.scheme, out.receiver);
}

REBoundary region_ts_circuit(const LinkParams& lp, double p_s, int n_points) {
  lp.validate();
  require(n_points >= 2 && p_s >= 0.0, "region_ts_circuit: bad arguments");
  const double r_max = awgn_rate(lp);
  const double q_max = lp.max_energy();
  // alpha q_max - (1 - alpha) p_s >= 0
  const double alpha0 = q_max + p_s > 0.0 ? p_s / (q_max + p_s) : 0.0;
  REBoundary out{{}, "ts-circuit", "separated"};
  for (int i = 0; i < n_points; ++i) {
    const double alpha = grid(i, n_points, alpha0, 1.0);
    const double q = std::max(0.0, alpha * q_max - (1.0 - alpha) * p_s);
    out.points.push_back({(1.0 - alpha) * r_max, q});
  }
  return out;
}

REBoundary region_sps_circuit(const LinkParams& lp, double p_s, int n_points) {
  lp.validate();
  require(n_points >= 2 && p_s >= 0.0, "region_sps_circuit: bad arguments");
  const double q_max = lp.max_energy();
  REBoundary out{{}, "sps-circuit", "separated"};
  if (p_s >= q_max) return out;  // decoder never breaks even
  const double rho0 = p_s / q_max;
  for (int i = 0; i < n_points; ++i) {
    const double rho = grid(i, n_points, rho0, 1.0);
    out.points.push_back({split_rate(rho, lp), std::max(0.0, rho * q_max - p_s)});
  }
  return out;
}

REBoundary region_int_circuit(const LinkParams& lp, double p_i, double cap_bits) {
  lp.validate();
  require(p_i >= 0.0 && cap_bits >= 0.0, "region_int_circuit: bad arguments");
  const double q_max = lp.max_energy();
  REBoundary out{{}, "int-circuit", "integrated"};
  if (p_i < q_max) {
    out.points = {{cap_bits, 0.0}, {cap_bits, q_max - p_i}, {0.0, q_max}};
  } else {
    out.points = {{q_max * cap_bits / p_i, 0.0}, {0.0, q_max}};
  }
  return out;
}

}  // namespace swipt::regions
