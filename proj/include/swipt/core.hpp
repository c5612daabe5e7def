#pragma once

// Shared domain types and the closed-form link quantities used by every
// other part of the library: rates, split SNRs, harvested energy, the
// rate-energy outer bound, the Gaussian Q-function and dBm conversions.
//
// Units: powers are in watts, energies are watts with a unit symbol period,
// rates are bits per channel use.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace swipt {

enum class ErrorKind {
  InvalidParams,
  ZeroNoise,
  NonPositivePower,
  SplitAtUnity,
  QuadratureFailure,
  InfeasibleTarget,
  DegenerateCircuitPower,
  BadConstellation,
  AliasedCarrier,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct LinkParams {
  double h = 1.0;           // channel power gain
  double theta = 0.0;       // channel phase, radians
  double p = 0.0;           // average transmit power
  double zeta = 1.0;        // energy conversion efficiency
  double sigma2_a = 0.0;    // antenna noise
  double sigma2_cov = 0.0;  // RF-to-baseband conversion noise
  double sigma2_rec = 0.0;  // rectifier noise (variance)
  double sigma2_adc = 0.0;  // ADC quantization noise

  /// Throws InvalidParams when a field is out of its domain.
  void validate() const;

  double received_power() const { return h * p; }
  double max_energy() const { return zeta * h * p; }
  double sigma_rec() const;
};

struct OpsPair {
  double alpha = 0.0;  // off-mode time fraction
  double rho = 0.0;    // split ratio while on
};

struct SplitVector {
  std::vector<double> rho;
};

/// Either an on-off pair or an explicit per-symbol split vector.
/// OpsPair{alpha, 0} is time switching, OpsPair{0, rho} is static splitting.
using PowerSchedule = std::variant<OpsPair, SplitVector>;

void validate(const PowerSchedule& schedule);

struct CircuitPower {
  double p_s = 0.0;  // separated receiver decoding power
  double p_i = 0.0;  // integrated receiver decoding power
};

struct REPoint {
  double rate = 0.0;
  double energy = 0.0;

  friend bool operator==(const REPoint&, const REPoint&) = default;
};

/// Sampled boundary of a rate-energy region. Points are ordered by
/// nondecreasing energy and carry nonincreasing rate.
struct REBoundary {
  std::vector<REPoint> points;
  std::string scheme;
  std::string receiver;

  friend bool operator==(const REBoundary&, const REBoundary&) = default;
};

/// Largest rate the boundary attains at `energy`, taking the upper envelope
/// of the linear segments between samples. Empty when `energy` lies beyond
/// the last sample (the region holds no point there).
std::optional<double> rate_at(const REBoundary& boundary, double energy);

/// True when energies are nondecreasing and rates nonincreasing.
bool is_pareto_ordered(const REBoundary& boundary, double tol = 0.0);

double q_function(double x);

/// log2(1 + hP / (sigma2_a + sigma2_cov)).
double awgn_rate(const LinkParams& lp);

double split_snr(double rho, const LinkParams& lp);

double harvested_energy(const PowerSchedule& schedule, const LinkParams& lp);

/// Box with corner (log2(1 + hP/sigma2_a), hP), sampled as `n_points`
/// points: n_points - 1 along the vertical edge plus the (0, hP) corner.
REBoundary upper_bound_region(const LinkParams& lp, int n_points);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

}  // namespace swipt
