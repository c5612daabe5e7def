#include "swipt/modulation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "swipt/regions.hpp"

namespace swipt::modulation {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::InvalidParams, what);
}

void check_constellation(int m) {
  if (!valid_constellation(m)) {
    throw Error(ErrorKind::BadConstellation, "constellation size must be 2^l with 1 <= l <= 10");
  }
}

double bits(int m) { return static_cast<double>(std::countr_zero(static_cast<unsigned>(m))); }

void check_target(const LinkParams& lp, double q_req, double ser_target) {
  lp.validate();
  require(ser_target > 0.0 && ser_target < 1.0, "SER target must lie in (0, 1)");
  if (!(q_req >= 0.0) || q_req > lp.max_energy()) {
    throw Error(ErrorKind::InfeasibleTarget, "need 0 <= Q_req <= zeta hP");
  }
}

struct Candidate {
  double rho = 0.0;
  double alpha = 0.0;
  std::optional<int> m;
  double rate = 0.0;
};

// Higher rate wins; ties go to the smaller constellation, then smaller rho.
bool better(const Candidate& a, const Candidate& b) {
  if (a.rate != b.rate) return a.rate > b.rate;
  const int ma = a.m.value_or(0);
  const int mb = b.m.value_or(0);
  if (ma != mb) return ma < mb;
  return a.rho < b.rho;
}

}  // namespace

std::string_view to_string(Family family) { return family == Family::QAM ? "QAM" : "PEM"; }

bool valid_constellation(int m) {
  return m >= 2 && m <= (1 << kMaxBitsPerSymbol) && std::has_single_bit(static_cast<unsigned>(m));
}

double ser_qam(int m, double snr) {
  check_constellation(m);
  require(snr >= 0.0, "SNR must be nonnegative");
  const double root = std::sqrt(static_cast<double>(m));
  return 4.0 * (root - 1.0) / root * q_function(std::sqrt(3.0 * snr / (m - 1.0)));
}

double ser_pem(int m, double snr) {
  check_constellation(m);
  require(snr >= 0.0, "SNR must be nonnegative");
  return 2.0 * (m - 1.0) / m * q_function(snr / (m - 1.0));
}

double ser(Family family, int m, double snr) {
  return family == Family::QAM ? ser_qam(m, snr) : ser_pem(m, snr);
}

std::optional<int> max_modulation(Family family, double snr, double ser_target) {
  require(ser_target > 0.0 && ser_target < 1.0, "SER target must lie in (0, 1)");
  for (int l = kMaxBitsPerSymbol; l >= 1; --l) {
    if (ser(family, 1 << l, snr) <= ser_target) return 1 << l;
  }
  return std::nullopt;
}

double p1_alpha(const LinkParams& lp, double p_s, double q_req, double rho) {
  const double q_max = lp.max_energy();
  const double den = (1.0 - rho) * q_max + p_s;
  if (den <= 0.0) return 0.0;  // rho = 1 and no circuit power
  return std::max(0.0, (q_req - rho * q_max + p_s) / den);
}

ModulationPlan solve_p1(const LinkParams& lp, double p_s, double q_req, double ser_target,
                        const P1Options& opts) {
  check_target(lp, q_req, ser_target);
  require(p_s >= 0.0, "circuit power must be nonnegative");
  require(opts.grid_points >= 3 && opts.refine_tol > 0.0, "bad P1 search options");

  ModulationPlan plan;
  plan.family = Family::QAM;
  plan.ser_target = ser_target;
  if (q_req == lp.max_energy() && p_s > 0.0) {
    plan.alpha = 1.0;
    return plan;
  }

  auto evaluate = [&](double rho) {
    Candidate c;
    c.rho = rho;
    c.alpha = p1_alpha(lp, p_s, q_req, rho);
    c.m = max_modulation(Family::QAM, split_snr(rho, lp), ser_target);
    c.rate = c.m ? (1.0 - c.alpha) * bits(*c.m) : 0.0;
    return c;
  };

  const int n = opts.grid_points;
  auto rho_at = [n](int i) { return static_cast<double>(i) / n; };  // [0, 1)
  Candidate best = evaluate(0.0);
  int best_i = 0;
  for (int i = 1; i < n; ++i) {
    const Candidate c = evaluate(rho_at(i));
    if (better(c, best)) {
      best = c;
      best_i = i;
    }
  }

  if (best.m) {
    // Golden-section search on the bracket around the best grid point. On
    // ties the left part is kept, which lands on the left edge of a plateau.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = rho_at(std::max(0, best_i - 1));
    double hi = best_i + 1 < n ? rho_at(best_i + 1) : std::nextafter(1.0, 0.0);
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    Candidate c1 = evaluate(x1);
    Candidate c2 = evaluate(x2);
    while (hi - lo > opts.refine_tol) {
      if (c1.rate >= c2.rate) {
        hi = x2;
        x2 = x1;
        c2 = c1;
        x1 = hi - inv_phi * (hi - lo);
        c1 = evaluate(x1);
      } else {
        lo = x1;
        x1 = x2;
        c1 = c2;
        x2 = lo + inv_phi * (hi - lo);
        c2 = evaluate(x2);
      }
    }
    for (const Candidate& c : {c1, c2, evaluate(lo)}) {
      if (better(c, best)) best = c;
    }
  } else {
    best = evaluate(0.0);
  }

  plan.m = best.m;
  plan.alpha = best.alpha;
  plan.rho = best.rho;
  plan.rate = best.rate;
  return plan;
}

ModulationPlan solve_p2(const LinkParams& lp, double p_i, double q_req, double ser_target) {
  check_target(lp, q_req, ser_target);
  require(p_i >= 0.0, "circuit power must be nonnegative");

  ModulationPlan plan;
  plan.family = Family::PEM;
  plan.ser_target = ser_target;
  plan.rho = 1.0;
  const double q_max = lp.max_energy();
  plan.alpha = p_i > 0.0 ? std::max(0.0, (q_req - q_max + p_i) / p_i) : 0.0;

  const double sigma_rec = lp.sigma_rec();
  const double hp = lp.received_power();
  double snr;
  if (sigma_rec > 0.0) {
    snr = hp / sigma_rec;
  } else if (hp > 0.0) {
    throw Error(ErrorKind::ZeroNoise, "solve_p2: rectifier noise is zero");
  } else {
    snr = 0.0;
  }
  plan.m = max_modulation(Family::PEM, snr, ser_target);
  plan.rate = plan.m ? (1.0 - plan.alpha) * bits(*plan.m) : 0.0;
  return plan;
}

OrderingReport check_alpha_ordering(const LinkParams& lp, double p_s, double p_i, double q_req,
                                    double ser_target) {
  require(p_i > 0.0 && p_s >= p_i, "ordering check needs p_s >= p_i > 0");
  OrderingReport rep;
  rep.separated = solve_p1(lp, p_s, q_req, ser_target);
  rep.integrated = solve_p2(lp, p_i, q_req, ser_target);
  rep.alpha_ordered = rep.separated.alpha >= rep.integrated.alpha;
  const int m1 = rep.separated.m.value_or(0);
  const int m2 = rep.integrated.m.value_or(0);
  rep.rate_implication = m1 > m2 || rep.separated.rate <= rep.integrated.rate;
  return rep;
}

LinkParams link_budget_to_params(const LinkBudget& lb) {
  require(lb.distance_m >= 1.0, "distance must be at least 1 m");
  require(lb.tx_power_w >= 0.0, "transmit power must be nonnegative");
  require(lb.bandwidth_hz > 0.0 && lb.carrier_hz > lb.bandwidth_hz,
          "need 0 < bandwidth < carrier");
  LinkParams lp;
  lp.h = std::pow(10.0, (-30.0 - 30.0 * std::log10(lb.distance_m)) / 10.0);
  lp.p = lb.tx_power_w;
  lp.zeta = lb.zeta;
  lp.sigma2_a = dbm_to_watts(lb.antenna_noise_dbm);
  lp.sigma2_cov = dbm_to_watts(lb.conv_noise_dbm);
  const double sigma_rec = dbm_to_watts(lb.rec_noise_dbm);
  lp.sigma2_rec = sigma_rec * sigma_rec;
  lp.validate();
  return lp;
}

}  // namespace swipt::modulation
