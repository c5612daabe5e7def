#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "swipt/core.hpp"
#include "swipt/regions.hpp"

using namespace swipt;

namespace {

LinkParams fig5(double scov2) {
  LinkParams lp;
  lp.h = 1.0;
  lp.p = 100.0;
  lp.zeta = 1.0;
  lp.sigma2_a = 1.0;
  lp.sigma2_cov = scov2;
  return lp;
}

bool throws_kind(ErrorKind kind, auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

}  // namespace

TEST_CASE("q_function matches the Boost normal tail") {
  CHECK(q_function(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(q_function(-1.7) == doctest::Approx(1.0 - q_function(1.7)).epsilon(1e-14));
  CHECK(q_function(4.7534) == doctest::Approx(1.0e-6).epsilon(1e-4));
  for (double x = -8.0; x <= 8.0; x += 0.125) {
    const double ref = oracle::q(x);
    CHECK(std::abs(q_function(x) - ref) <= 1e-12 * ref);
    CHECK(std::abs(q_function(x) + q_function(-x) - 1.0) <= 1e-12);
  }
  for (double x = -8.0; x < 30.0; x += 0.5) CHECK(q_function(x + 0.5) < q_function(x));
}

TEST_CASE("awgn_rate") {
  LinkParams lp = fig5(0.0);
  CHECK(awgn_rate(lp) == doctest::Approx(std::log2(101.0)).epsilon(1e-14));
  CHECK(awgn_rate(lp) == doctest::Approx(6.6582).epsilon(1e-4));
  lp.sigma2_cov = 10.0;
  CHECK(awgn_rate(lp) == doctest::Approx(oracle::log2_1p(100.0 / 11.0)).epsilon(1e-14));
  CHECK(awgn_rate(lp) == doctest::Approx(3.3349).epsilon(1e-4));
  lp.p = 0.0;
  CHECK(awgn_rate(lp) == 0.0);
  LinkParams silent = fig5(0.0);
  silent.sigma2_a = 0.0;
  CHECK(throws_kind(ErrorKind::ZeroNoise, [&] { awgn_rate(silent); }));
}

TEST_CASE("split_snr") {
  const LinkParams lp = fig5(10.0);
  CHECK(split_snr(1.0, lp) == 0.0);
  CHECK(split_snr(0.0, lp) == 100.0 / 11.0);
  CHECK(split_snr(0.5, lp) == doctest::Approx(50.0 / 10.5).epsilon(1e-14));
  CHECK(throws_kind(ErrorKind::InvalidParams, [&] { split_snr(1.5, lp); }));
}

TEST_CASE("rates are monotone in noise and power") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  for (int i = 0; i < 200; ++i) {
    LinkParams lp = fig5(u(rng));
    lp.sigma2_a = u(rng);
    lp.p = 10.0 * u(rng);
    const double rho = u(rng) / 10.0;
    LinkParams noisier = lp;
    noisier.sigma2_cov *= 1.5;
    LinkParams louder = lp;
    louder.p *= 1.5;
    CHECK(awgn_rate(noisier) <= awgn_rate(lp));
    CHECK(split_snr(rho, noisier) <= split_snr(rho, lp));
    CHECK(awgn_rate(louder) >= awgn_rate(lp));
    CHECK(split_snr(rho, louder) >= split_snr(rho, lp));
  }
}

TEST_CASE("harvested_energy") {
  LinkParams lp = fig5(1.0);
  lp.zeta = 0.6;
  CHECK(harvested_energy(OpsPair{1.0, 0.3}, lp) == doctest::Approx(60.0).epsilon(1e-15));
  CHECK(harvested_energy(SplitVector{{0.0, 0.0, 0.0}}, lp) == 0.0);
  lp.zeta = 1.0;
  CHECK(harvested_energy(SplitVector{{1.0, 0.0}}, lp) == 50.0);
  CHECK(throws_kind(ErrorKind::InvalidParams,
                    [&] { harvested_energy(SplitVector{{0.2, 1.1}}, lp); }));

  // An on-off pair equals the split vector with alpha N ones and the rest rho.
  for (int n : {4, 10, 250, 1000}) {
    const int off = n / 4;
    const double alpha = static_cast<double>(off) / n;
    std::vector<double> v(n, 0.375);
    std::fill(v.begin(), v.begin() + off, 1.0);
    CHECK(harvested_energy(OpsPair{alpha, 0.375}, lp) ==
          doctest::Approx(harvested_energy(SplitVector{v}, lp)).epsilon(1e-13));
  }
}

TEST_CASE("upper_bound_region") {
  const LinkParams lp = fig5(1.0);
  const REBoundary ub = upper_bound_region(lp, 512);
  REQUIRE(ub.points.size() == 512);
  CHECK(ub.points.front().rate == doctest::Approx(std::log2(101.0)).epsilon(1e-14));
  CHECK(ub.points.front().energy == 0.0);
  CHECK(ub.points[510].energy == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(ub.points.back().rate == 0.0);
  CHECK(ub.points.back().energy == 100.0);
  CHECK(is_pareto_ordered(ub));

  LinkParams off = lp;
  off.p = 0.0;
  const REBoundary zero = upper_bound_region(off, 8);
  for (const auto& p : zero.points) CHECK((p.rate == 0.0 && p.energy == 0.0));

  // Every TS and SPS point lies inside the box.
  for (double scov2 : {1e-6, 1.0, 10.0}) {
    const LinkParams l = fig5(scov2);
    for (const auto& b : {regions::region_ts(l, 64), regions::region_sps(l, 64)}) {
      for (const auto& p : b.points) {
        CHECK(p.rate <= ub.points.front().rate + 1e-12);
        CHECK(p.energy <= 100.0 + 1e-12);
      }
    }
  }
}

TEST_CASE("rate_at interpolates the upper envelope") {
  REBoundary b{{{4.0, 0.0}, {4.0, 10.0}, {0.0, 20.0}}, "t", "t"};
  CHECK(*rate_at(b, 0.0) == 4.0);
  CHECK(*rate_at(b, 10.0) == 4.0);
  CHECK(*rate_at(b, 15.0) == doctest::Approx(2.0));
  CHECK(*rate_at(b, 20.0) == 0.0);
  CHECK_FALSE(rate_at(b, 20.5).has_value());
  CHECK(*rate_at(b, -1.0) == 4.0);
}

TEST_CASE("dBm conversions") {
  CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(dbm_to_watts(-70.0) == doctest::Approx(1e-10).epsilon(1e-14));
  CHECK(dbm_to_watts(-50.0) == doctest::Approx(1e-8).epsilon(1e-14));
  CHECK(dbm_to_watts(-104.0) == doctest::Approx(3.98e-14).epsilon(1e-3));
  for (double dbm = -150.0; dbm <= 60.0; dbm += 7.3) {
    CHECK(watts_to_dbm(dbm_to_watts(dbm)) == doctest::Approx(dbm).epsilon(1e-12));
  }
  CHECK(throws_kind(ErrorKind::NonPositivePower, [] { watts_to_dbm(0.0); }));
  CHECK(throws_kind(ErrorKind::NonPositivePower, [] { watts_to_dbm(-1.0); }));
}

TEST_CASE("LinkParams validation") {
  LinkParams lp = fig5(1.0);
  CHECK_NOTHROW(lp.validate());
  lp.zeta = 0.0;
  CHECK(throws_kind(ErrorKind::InvalidParams, [&] { lp.validate(); }));
  lp = fig5(1.0);
  lp.h = 0.0;
  CHECK(throws_kind(ErrorKind::InvalidParams, [&] { lp.validate(); }));
  lp = fig5(-1.0);
  CHECK(throws_kind(ErrorKind::InvalidParams, [&] { lp.validate(); }));
}
