#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "swipt/core.hpp"
#include "swipt/regions.hpp"

using namespace swipt;
using namespace swipt::regions;

namespace {

LinkParams link(double zeta, double sa2, double scov2, double p = 100.0) {
  LinkParams lp;
  lp.h = 1.0;
  lp.p = p;
  lp.zeta = zeta;
  lp.sigma2_a = sa2;
  lp.sigma2_cov = scov2;
  return lp;
}

oracle::Link as_oracle(const LinkParams& lp) {
  return {lp.h * lp.p, lp.zeta, lp.sigma2_a, lp.sigma2_cov};
}

bool throws_kind(ErrorKind kind, auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

// Random link with a strictly positive noise floor.
LinkParams random_link(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> lg(-1.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LinkParams lp;
  lp.h = 1.0;
  lp.p = std::pow(10.0, 1.0 + 1.5 * u(rng));
  lp.zeta = 0.2 + 0.8 * u(rng);
  lp.sigma2_a = std::pow(10.0, lg(rng));
  lp.sigma2_cov = std::pow(10.0, lg(rng));
  return lp;
}

// Fourth-order Richardson of central differences.
template <class F>
double d1_fd(F&& f, double x, double h) {
  auto c = [&](double k) { return (f(x + k) - f(x - k)) / (2.0 * k); };
  return (4.0 * c(h / 2.0) - c(h)) / 3.0;
}

template <class F>
double d2_fd(F&& f, double x, double h) {
  auto c = [&](double k) { return (f(x + k) - 2.0 * f(x) + f(x - k)) / (k * k); };
  return (4.0 * c(h / 2.0) - c(h)) / 3.0;
}

}  // namespace

TEST_CASE("time switching chord") {
  const LinkParams lp = link(1.0, 1.0, 1.0);
  const REBoundary b = region_ts(lp, 513);
  REQUIRE(b.points.size() == 513);
  CHECK(b.points.front().rate == doctest::Approx(oracle::log2_1p(50.0)).epsilon(1e-14));
  CHECK(b.points.front().rate == doctest::Approx(5.6724).epsilon(1e-4));
  CHECK(b.points.front().energy == 0.0);
  CHECK(b.points.back().rate == 0.0);
  CHECK(b.points.back().energy == 100.0);
  CHECK(b.points[256].rate == doctest::Approx(0.5 * oracle::log2_1p(50.0)).epsilon(1e-14));
  CHECK(b.points[256].energy == doctest::Approx(50.0).epsilon(1e-14));
  CHECK(is_pareto_ordered(b));
}

TEST_CASE("static splitting sweep") {
  const LinkParams lp = link(1.0, 1.0, 1.0);
  const REBoundary b = region_sps(lp, 513);
  CHECK(b.points.front().rate == doctest::Approx(awgn_rate(lp)).epsilon(1e-14));
  CHECK(b.points.front().energy == 0.0);
  CHECK(b.points.back().rate == 0.0);
  CHECK(b.points.back().energy == 100.0);
  CHECK(b.points[256].rate == doctest::Approx(oracle::log2_1p(50.0 / 1.5)).epsilon(1e-14));
  // Above the TS chord at mid-energy.
  CHECK(b.points[256].rate > 0.5 * oracle::log2_1p(50.0));
  CHECK(is_pareto_ordered(b));

  for (int i = 0; i <= 20; ++i) {
    const double rho = i / 20.0;
    CHECK(split_rate(rho, lp) == doctest::Approx(as_oracle(lp).rate(rho)).epsilon(1e-13));
  }
}

TEST_CASE("dynamic splitting is dominated by its static mean") {
  const LinkParams lp = link(1.0, 1.0, 10.0);
  const std::vector<double> ends{0.0, 1.0};
  const DominanceReport r = check_dps_dominated_by_sps(lp, ends);
  CHECK(r.rate_dps == doctest::Approx(0.5 * oracle::log2_1p(100.0 / 11.0)).epsilon(1e-14));
  CHECK(r.rate_dps == doctest::Approx(1.6675).epsilon(1e-4));
  CHECK(r.rate_reduced == doctest::Approx(oracle::log2_1p(50.0 / 10.5)).epsilon(1e-14));
  CHECK(r.energy_dps == doctest::Approx(50.0));
  CHECK(r.energy_equal);
  CHECK(r.dominates);

  const std::vector<double> flat(17, 0.3);
  const DominanceReport c = check_dps_dominated_by_sps(lp, flat);
  CHECK(std::abs(c.rate_dps - c.rate_reduced) <= 1e-12);
  CHECK(c.energy_equal);
  CHECK(c.dominates);

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const LinkParams l = random_link(rng);
    std::vector<double> v(64);
    for (double& x : v) x = u(rng);
    const DominanceReport d = check_dps_dominated_by_sps(l, v);
    CHECK(d.energy_equal);
    CHECK(d.rate_reduced > d.rate_dps);
  }
}

TEST_CASE("on-off splitting dominates dynamic splitting with circuit power") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const LinkParams l = random_link(rng);
    const double ps = l.max_energy() * u(rng);
    const double alpha = 0.95 * u(rng);
    std::vector<double> v(32);
    for (double& x : v) x = u(rng);
    const DominanceReport d = check_dps_dominated_by_ops(l, ps, alpha, v);
    CHECK(d.energy_equal);
    CHECK(d.dominates);
    CHECK(d.rate_reduced > d.rate_dps);
    // Direct recomputation of the time-averaged DPS pair.
    double r = 0.0, e = 0.0;
    for (double x : v) {
      r += as_oracle(l).rate(x);
      e += x;
    }
    CHECK(d.rate_dps == doctest::Approx((1.0 - alpha) * r / 32.0).epsilon(1e-12));
    CHECK(d.energy_dps == doctest::Approx(alpha * l.max_energy() +
                                          (1.0 - alpha) * (e / 32.0 * l.max_energy() - ps))
                              .epsilon(1e-12));
  }
}

TEST_CASE("rs_coefficients") {
  const LinkParams lp = link(0.6, 1.0, 10.0);
  const RsCoefficients k = rs_coefficients(lp, 25.0, 0.0);
  CHECK(k.a == doctest::Approx(10.0 - 25.0 / 60.0).epsilon(1e-14));
  CHECK(k.a == doctest::Approx(9.5833).epsilon(1e-4));
  CHECK(k.b == 1.0);
  CHECK(k.c == doctest::Approx(-25.0 / 0.6).epsilon(1e-14));
  CHECK(k.d == 100.0);
  CHECK(k.s_lo == doctest::Approx(100.0 / (100.0 + 25.0 / 0.6)).epsilon(1e-14));
  CHECK(k.s_lo == doctest::Approx(0.7059).epsilon(1e-4));
  CHECK(k.s_hi == 1.0);

  const RsCoefficients near = rs_coefficients(lp, 25.0, 60.0 * (1.0 - 1e-9));
  CHECK(near.b < 1e-8);
  CHECK(near.d < 1e-6);
  CHECK(near.s_hi - near.s_lo < 1e-6);

  CHECK(throws_kind(ErrorKind::InfeasibleTarget, [&] { rs_coefficients(lp, 25.0, 60.0); }));

  // The closed form agrees with the (alpha, rho) parameterization on the
  // energy constraint.
  const oracle::Link ol = as_oracle(lp);
  for (double q : {0.0, 10.0, 30.0, 55.0}) {
    const RsCoefficients kk = rs_coefficients(lp, 25.0, q);
    for (int i = 0; i <= 10; ++i) {
      const double s = kk.s_lo + (kk.s_hi - kk.s_lo) * i / 10.0;
      const double rho = (q - (1.0 - s) * 60.0 + s * 25.0) / (s * 60.0);
      CHECK(kk.rate(s) == doctest::Approx(s * ol.rate(std::clamp(rho, 0.0, 1.0))).epsilon(1e-10));
    }
  }

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const LinkParams l = random_link(rng);
    const double ps = 2.0 * l.max_energy() * u(rng) + 1e-3;
    const double q = 0.999 * l.max_energy() * u(rng);
    const RsCoefficients kk = rs_coefficients(l, ps, q);
    CHECK(kk.b > 0.0);
    CHECK(kk.d > 0.0);
    CHECK(kk.c < 0.0);
    CHECK(kk.s_lo <= kk.s_hi);
    CHECK(kk.a * kk.s_lo + kk.b > 0.0);
    CHECK(kk.a * kk.s_hi + kk.b > 0.0);
  }
}

TEST_CASE("rate derivatives match finite differences and the rate is concave") {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int t = 0; t < 100; ++t) {
    const LinkParams l = random_link(rng);
    const double ps = 2.0 * l.max_energy() * u(rng) + 1e-3;
    const double q = 0.95 * l.max_energy() * u(rng);
    const RsCoefficients k = rs_coefficients(l, ps, q);
    const double width = k.s_hi - k.s_lo;
    if (width < 1e-6) continue;
    auto f = [&](double s) { return k.rate(s); };
    const double h = 1e-3 * width;
    for (int i = 1; i <= 50; ++i) {
      const double s = k.s_lo + width * i / 51.0;
      const double g1 = d1_fd(f, s, h);
      const double g2 = d2_fd(f, s, h);
      const double scale1 = std::max(std::abs(k.d_rate(s)), 1e-3 * std::abs(k.rate(s)));
      const double scale2 = std::max(std::abs(k.d2_rate(s)), 1e-3 * std::abs(k.rate(s)));
      CHECK(std::abs(k.d_rate(s) - g1) <= 1e-6 * scale1);
      CHECK(std::abs(k.d2_rate(s) - g2) <= 1e-5 * scale2);
      CHECK(k.d2_rate(s) <= 0.0);
      const double hh = 1e-2 * width / 51.0;
      CHECK(f(s + hh) - 2.0 * f(s) + f(s - hh) <= 1e-9);
      ++checked;
    }
  }
  CHECK(checked > 4000);
}

TEST_CASE("solve_p0") {
  const LinkParams lp = link(0.6, 1.0, 10.0);

  const P0Solution top = solve_p0(lp, 25.0, 60.0);
  CHECK(top.alpha_star == 1.0);
  CHECK(top.rate == 0.0);
  CHECK(throws_kind(ErrorKind::InfeasibleTarget, [&] { solve_p0(lp, 25.0, 60.5); }));
  CHECK(throws_kind(ErrorKind::DegenerateCircuitPower, [&] { solve_p0(lp, 0.0, 10.0); }));

  const oracle::Link ol = as_oracle(lp);
  const P0Solution s = solve_p0(lp, 25.0, 30.0);
  const oracle::GridBest g = oracle::p0_grid(ol, 25.0, 30.0, 2000);
  MESSAGE("P0 at Q=30: alpha " << s.alpha_star << " rho " << s.rho_star << " rate " << s.rate
                               << ", grid " << g.rate);
  CHECK(s.converged);
  CHECK(std::abs(s.rate - g.rate) <= 1e-4);
  CHECK(s.rate >= g.rate - 1e-9);

  // Low targets: the optimum is static splitting.
  for (double q : {0.0, 1.0, 5.0}) {
    const P0Solution low = solve_p0(lp, 25.0, q);
    CHECK(low.alpha_star == 0.0);
    CHECK(low.rate == doctest::Approx(ol.rate((q + 25.0) / 60.0)).epsilon(1e-12));
  }

  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const LinkParams l = random_link(rng);
    const double qmax = l.max_energy();
    const double ps = 2.0 * qmax * u(rng) + 1e-3;
    const double q = 0.999 * qmax * u(rng);
    const P0Solution p = solve_p0(l, ps, q);
    const double net = p.alpha_star * qmax + (1.0 - p.alpha_star) * (p.rho_star * qmax - ps);
    CHECK(net == doctest::Approx(q).epsilon(1e-9).scale(qmax));
    CHECK(p.rate ==
          doctest::Approx((1.0 - p.alpha_star) * as_oracle(l).rate(p.rho_star)).epsilon(1e-12));
    CHECK(p.alpha_star >= 0.0);
    CHECK(p.alpha_star <= 1.0);
    CHECK(p.rho_star >= 0.0);
    CHECK(p.rho_star <= 1.0);
  }

  for (int t = 0; t < 4; ++t) {
    const LinkParams l = random_link(rng);
    const double ps = l.max_energy() * u(rng) + 1e-3;
    const double q = 0.9 * l.max_energy() * u(rng);
    const double lib = solve_p0(l, ps, q).rate;
    const double ref = oracle::p0_grid(as_oracle(l), ps, q, 2000).rate;
    CHECK(std::abs(lib - ref) <= 1e-4);
    CHECK(lib >= ref - 1e-9);
  }
}

TEST_CASE("integrated receiver regions") {
  const LinkParams lp = link(0.6, 1.0, 1.0);
  const REBoundary box = region_int_ideal(lp, 4.5);
  CHECK(box.points.front() == REPoint{4.5, 0.0});
  CHECK(box.points[1] == REPoint{4.5, 60.0});
  CHECK(box.points.back() == REPoint{0.0, 60.0});
  const REBoundary flat = region_int_ideal(lp, 0.0);
  for (const auto& p : flat.points) CHECK(p.rate == 0.0);

  const REBoundary low = region_int_circuit(lp, 10.0, 4.5);
  CHECK(low.points[1] == REPoint{4.5, 50.0});
  CHECK(*rate_at(low, 55.0) == doctest::Approx(2.25));
  const REBoundary high = region_int_circuit(lp, 80.0, 4.0);
  CHECK(high.points.front().rate == doctest::Approx(0.75 * 4.0).epsilon(1e-15));
  CHECK(high.points.back() == REPoint{0.0, 60.0});
  CHECK(region_int_circuit(lp, 0.0, 4.5) == REBoundary{box.points, "int-circuit", "integrated"});

  // A noise-free ADC leaves the box.
  const REBoundary adc0 = region_int_adc(lp, 64, [](double) { return 3.0; });
  CHECK(is_pareto_ordered(adc0));
  CHECK(*rate_at(adc0, 59.9) == 3.0);
  CHECK(adc0.points.back() == REPoint{0.0, 60.0});

  // A cap that decays in rho lies strictly inside the box at high energy.
  const REBoundary adc = region_int_adc(lp, 64, [](double rho) { return 3.0 * (1.0 - rho); });
  CHECK(is_pareto_ordered(adc));
  CHECK(adc.points.front().rate == 3.0);
  CHECK(*rate_at(adc, 50.0) < 3.0);
}

TEST_CASE("circuit-power regions") {
  const LinkParams lp = link(0.6, 1.0, 10.0);
  const REBoundary ops = region_sep_circuit(lp, 25.0, 512);
  const REBoundary ts = region_ts_circuit(lp, 25.0, 512);
  const REBoundary sps = region_sps_circuit(lp, 25.0, 512);
  for (const auto* b : {&ops, &ts, &sps}) {
    CHECK(is_pareto_ordered(*b));
    CHECK(b->points.size() == 512);
  }
  CHECK(ts.points.front().energy == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ts.points.back() == REPoint{0.0, 60.0});
  CHECK(sps.points.front().rate == doctest::Approx(as_oracle(lp).rate(25.0 / 60.0)));
  CHECK(ops.points.front().rate >= ops.points.back().rate);

  // Matched energies: the on-off boundary is re-solved at each inner point.
  for (const auto* inner : {&ts, &sps}) {
    for (const auto& p : inner->points) {
      CHECK(solve_p0(lp, 25.0, p.energy).rate >= p.rate - 1e-9);
    }
  }

  LinkParams weak = lp;
  weak.p = 10.0;
  CHECK(region_sps_circuit(weak, 25.0, 16).points.empty());
}

TEST_CASE("containment without circuit power") {
  std::mt19937_64 rng(26);
  for (int t = 0; t < 20; ++t) {
    LinkParams l = random_link(rng);
    l.zeta = 1.0;
    const REBoundary ub = upper_bound_region(l, 256);
    const REBoundary ts = region_ts(l, 256);
    const REBoundary sps = region_sps(l, 256);
    for (int i = 0; i <= 100; ++i) {
      const double e = l.max_energy() * i / 100.0;
      const double rt = *rate_at(ts, e);
      const double rs = *rate_at(sps, e);
      const double ru = *rate_at(ub, e);
      CHECK(rt <= rs + 1e-9);
      CHECK(rs <= ru + 1e-9);
    }
  }
}
