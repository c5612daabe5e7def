#pragma once

// Monte Carlo oracles. Symbol-level simulators for the separated (QAM) and
// integrated (PEM) receiver chains, and a waveform-level rectifier model:
// passband synthesis, truncated diode polynomial, brick-wall low-pass.
//
// Every simulator splits its symbols into fixed blocks with their own RNG
// streams, so results are bit-identical for any worker count.

#include <cstdint>

#include "swipt/core.hpp"

namespace swipt::simkit {

struct DiodeModel {
  double i_s = 1e-6;          // saturation current, A
  double gamma = 1.0 / 0.025; // reciprocal thermal voltage, 1/V
  int truncation_order = 2;

  void validate() const;
  /// a_n = i_s gamma^n / n!
  double coefficient(int n) const;
};

enum class Signaling { Gaussian, Constant };

struct SimConfig {
  std::uint64_t n_symbols = 100000;
  std::uint64_t seed = 1;
  int oversampling = 16;       // samples per carrier period (waveform mode)
  double carrier_hz = 900e6;
  double bandwidth_hz = 10e6;
  unsigned workers = 1;
  // Importance sampling: noise is drawn with its standard deviation scaled
  // by this factor and every trial is reweighted by the likelihood ratio.
  double is_noise_scale = 1.0;
  Signaling signaling = Signaling::Gaussian;  // waveform mode only

  void validate() const;
};

struct SerEstimate {
  double ser_hat = 0.0;
  double ci_halfwidth = 0.0;  // 95%, normal approximation
  double std_error = 0.0;
  std::uint64_t errors = 0;   // raw error count (unweighted)
  std::uint64_t n_symbols = 0;
  std::uint64_t seed = 0;
};

struct QamSimResult {
  SerEstimate ser;
  double energy_hat = 0.0;
  double energy_std_error = 0.0;
};

struct RectifierResult {
  double dc_mean = 0.0;            // time-averaged DC output over a_2
  double dc_std_error = 0.0;
  double harmonic_residual = 0.0;  // power at f and 2f over DC power
  std::uint64_t n_symbols = 0;
  std::uint64_t seed = 0;
};

/// Unit-average-energy rectangular QAM: 2^ceil(l/2) x 2^floor(l/2) grid.
/// l = 1 is BPSK.
struct QamGrid {
  int side_i = 2;
  int side_q = 1;
  double scale = 1.0;  // multiplies the odd-integer coordinates

  explicit QamGrid(int m);
  double level_i(int k) const { return scale * (2.0 * k - (side_i - 1)); }
  double level_q(int k) const { return scale * (2.0 * k - (side_q - 1)); }
  /// Nearest index along an axis with `side` levels.
  int detect(double v, int side) const;
};

QamSimResult simulate_qam_separated(const LinkParams& lp, double rho, int m,
                                    const SimConfig& cfg);

/// Equispaced power levels 2(i-1)/(M-1) through |sqrt(hP x) e^{j theta} + n_A|^2 + n_rec,
/// detected by midpoint thresholds on y / hP.
SerEstimate simulate_pem_integrated(const LinkParams& lp, int m, const SimConfig& cfg);

RectifierResult simulate_rectifier_waveform(const LinkParams& lp, const DiodeModel& diode,
                                            const SimConfig& cfg);

}  // namespace swipt::simkit
