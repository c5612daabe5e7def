#pragma once

// Capacity bounds for the integrated receiver's nonlinear channel
//
//     Y = |sqrt(hP X) + Z2|^2 + Z1,   Z2 ~ CN(0, sigma2_a), Z1 ~ N(0, sigma2_rec)
//
// with X >= 0 and E[X] <= 1. The two degenerate cases are the optical
// intensity channel (sigma2_a -> 0) and the noncoherent AWGN channel
// (sigma2_rec -> 0). Upper bounds are closed form; the lower bound is the
// mutual information of a chi-square (one degree of freedom) input,
// estimated by quadrature inside a Monte Carlo average.

#include <cstdint>
#include <functional>

namespace swipt::capacity {

/// Euler-Mascheroni constant.
inline constexpr double kEulerGamma = 0.57721566490153286061;

struct C1BoundParams {
  double beta = 1.0;   // > 0
  double delta = 0.0;  // >= 0
};

struct C1Optimum {
  double bits = 0.0;
  C1BoundParams params;
};

struct MiConfig {
  std::uint64_t n_samples = 100000;
  std::uint64_t seed = 1;
  double quad_tol = 1e-10;
  unsigned workers = 1;
};

struct MiEstimate {
  double value = 0.0;      // bits per channel use, clamped at 0
  double std_error = 0.0;  // bits
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  double quadrature_tolerance = 0.0;
};

struct EffectiveNoise {
  double sigma2_eff = 0.0;
};

/// Optical-intensity upper bound for free parameters (beta, delta).
/// `sigma_rec` is the rectifier noise standard deviation.
double c1_upper(double hp, double sigma_rec, const C1BoundParams& params);

/// Minimizes c1_upper over (beta, delta): log-spaced grid in beta, uniform
/// grid in delta, then coordinate descent. The returned params reproduce
/// the returned value through c1_upper.
C1Optimum c1_upper_optimized(double hp, double sigma_rec);

double c1_asymptotic(double hp, double sigma_rec);

/// Noncoherent AWGN upper bound.
double c2_upper(double hp, double sigma2_a);

/// High-power noncoherent capacity, attained by chi-square signaling.
double c2_asymptotic(double hp, double sigma2_a);

enum class UpperBranch { C1, C2 };

struct CnlUpper {
  double bits = 0.0;
  UpperBranch branch = UpperBranch::C1;
  double c1 = 0.0;  // +inf when sigma_rec == 0
  double c2 = 0.0;  // +inf when sigma2_a == 0
};

/// min(C1 bound, C2 bound). A branch whose noise vanishes is unbounded and
/// never selected.
CnlUpper cnl_upper(double hp, double sigma2_a, double sigma_rec);

/// Chi-square-input mutual information I(X;Y) in bits.
MiEstimate cnl_lower_chi2(double hp, double sigma2_a, double sigma2_rec,
                          const MiConfig& mc = {});

/// Conditional and marginal output densities of the nonlinear channel for a
/// chi-square input, exposed for testing. Both are evaluated in the units
/// of the caller (no internal rescaling).
double conditional_density(double y, double x, double hp, double sigma2_a,
                           double sigma2_rec, double quad_tol = 1e-10);
double marginal_density(double y, double hp, double sigma2_a, double sigma2_rec,
                        double quad_tol = 1e-10);

/// sigma2_rec + sigma2_adc / (1 - rho)^2.
EffectiveNoise effective_proc_noise(double sigma2_rec, double sigma2_adc, double rho);

}  // namespace swipt::capacity
