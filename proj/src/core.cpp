#include "swipt/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace swipt {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::ZeroNoise: return "ZeroNoise";
    case ErrorKind::NonPositivePower: return "NonPositivePower";
    case ErrorKind::SplitAtUnity: return "SplitAtUnity";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::InfeasibleTarget: return "InfeasibleTarget";
    case ErrorKind::DegenerateCircuitPower: return "DegenerateCircuitPower";
    case ErrorKind::BadConstellation: return "BadConstellation";
    case ErrorKind::AliasedCarrier: return "AliasedCarrier";
  }
  return "Unknown";
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::InvalidParams, what);
}

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

void LinkParams::validate() const {
  require(std::isfinite(h) && h > 0.0, "h must be positive");
  require(std::isfinite(p) && p >= 0.0, "P must be nonnegative");
  require(zeta > 0.0 && zeta <= 1.0, "zeta must lie in (0, 1]");
  require(std::isfinite(theta), "theta must be finite");
  for (double s : {sigma2_a, sigma2_cov, sigma2_rec, sigma2_adc}) {
    require(std::isfinite(s) && s >= 0.0, "noise powers must be nonnegative");
  }
}

double LinkParams::sigma_rec() const { return std::sqrt(sigma2_rec); }

void validate(const PowerSchedule& schedule) {
  if (const auto* ops = std::get_if<OpsPair>(&schedule)) {
    require(in_unit(ops->alpha) && in_unit(ops->rho),
            "alpha and rho must lie in [0, 1]");
    return;
  }
  const auto& split = std::get<SplitVector>(schedule);
  require(!split.rho.empty(), "split vector must not be empty");
  require(std::all_of(split.rho.begin(), split.rho.end(), in_unit),
          "split ratios must lie in [0, 1]");
}

std::optional<double> rate_at(const REBoundary& boundary, double energy) {
  const auto& pts = boundary.points;
  if (pts.empty() || energy > pts.back().energy) return std::nullopt;
  if (energy <= pts.front().energy) return pts.front().rate;

  std::optional<double> best;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const REPoint& a = pts[i];
    const REPoint& b = pts[i + 1];
    if (energy < a.energy || energy > b.energy) continue;
    double r;
    if (b.energy == a.energy) {
      r = std::max(a.rate, b.rate);
    } else {
      const double t = (energy - a.energy) / (b.energy - a.energy);
      r = a.rate + t * (b.rate - a.rate);
    }
    if (!best || r > *best) best = r;
  }
  return best;
}

bool is_pareto_ordered(const REBoundary& boundary, double tol) {
  const auto& pts = boundary.points;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].energy < pts[i - 1].energy - tol) return false;
    if (pts[i].rate > pts[i - 1].rate + tol) return false;
  }
  return true;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double awgn_rate(const LinkParams& lp) {
  const double hp = lp.received_power();
  if (hp == 0.0) return 0.0;
  const double noise = lp.sigma2_a + lp.sigma2_cov;
  if (noise <= 0.0) {
    throw Error(ErrorKind::ZeroNoise, "awgn_rate: both noise powers are zero");
  }
  return std::log2(1.0 + hp / noise);
}

double split_snr(double rho, const LinkParams& lp) {
  require(in_unit(rho), "rho must lie in [0, 1]");
  if (rho == 1.0) return 0.0;
  const double hp = lp.received_power();
  const double noise = (1.0 - rho) * lp.sigma2_a + lp.sigma2_cov;
  if (hp == 0.0) return 0.0;
  if (noise <= 0.0) {
    throw Error(ErrorKind::ZeroNoise, "split_snr: decoder noise is zero");
  }
  return (1.0 - rho) * hp / noise;
}

double harvested_energy(const PowerSchedule& schedule, const LinkParams& lp) {
  validate(schedule);
  const double q_max = lp.max_energy();
  if (const auto* ops = std::get_if<OpsPair>(&schedule)) {
    return q_max * (ops->alpha + (1.0 - ops->alpha) * ops->rho);
  }
  const auto& rho = std::get<SplitVector>(schedule).rho;
  const double sum = std::accumulate(rho.begin(), rho.end(), 0.0);
  return q_max * sum / static_cast<double>(rho.size());
}

REBoundary upper_bound_region(const LinkParams& lp, int n_points) {
  require(n_points >= 2, "n_points must be at least 2");
  const double hp = lp.received_power();
  double r_max = 0.0;
  if (hp > 0.0) {
    if (lp.sigma2_a <= 0.0) {
      throw Error(ErrorKind::ZeroNoise, "upper bound needs sigma2_a > 0");
    }
    r_max = std::log2(1.0 + hp / lp.sigma2_a);
  }

  REBoundary out{{}, "ub", "any"};
  out.points.reserve(static_cast<std::size_t>(n_points));
  const int edge = n_points - 1;
  for (int i = 0; i < edge; ++i) {
    const double t = edge == 1 ? 0.0 : static_cast<double>(i) / (edge - 1);
    out.points.push_back({r_max, t * hp});
  }
  out.points.push_back({0.0, hp});
  return out;
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) {
  if (!(watts > 0.0)) {
    throw Error(ErrorKind::NonPositivePower, "watts_to_dbm needs a positive power");
  }
  return 10.0 * std::log10(watts) + 30.0;
}

}  // namespace swipt
