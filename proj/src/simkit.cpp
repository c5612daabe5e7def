#include "swipt/simkit.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>

#include "swipt/detail/blocks.hpp"
#include "swipt/modulation.hpp"

namespace swipt::simkit {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::InvalidParams, what);
}

constexpr double kZ95 = 1.959963984540054;

// Weighted Bernoulli sums for one block.
struct ErrorTally {
  double w_sum = 0.0;
  double w2_sum = 0.0;
  std::uint64_t errors = 0;
  double e_sum = 0.0;
  double e2_sum = 0.0;
};

SerEstimate finish(const std::vector<ErrorTally>& blocks, const SimConfig& cfg) {
  double w = 0.0;
  double w2 = 0.0;
  SerEstimate out;
  for (const auto& b : blocks) {
    w += b.w_sum;
    w2 += b.w2_sum;
    out.errors += b.errors;
  }
  const double n = static_cast<double>(cfg.n_symbols);
  out.ser_hat = w / n;
  const double var = std::max(0.0, w2 / n - out.ser_hat * out.ser_hat);
  out.std_error = std::sqrt(var / n);
  out.ci_halfwidth = kZ95 * out.std_error;
  out.n_symbols = cfg.n_symbols;
  out.seed = cfg.seed;
  return out;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Ideal low-pass over a run of whole symbols: keeps only bins below B.
class BrickWall {
 public:
  BrickWall(std::size_t len, std::size_t cutoff_bin) : len_(len), cutoff_(cutoff_bin) {
    time_ = fftw_alloc_real(len_);
    freq_ = fftw_alloc_complex(len_ / 2 + 1);
    std::lock_guard lock(fftw_planner_mutex());
    fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(len_), time_, freq_, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r_1d(static_cast<int>(len_), freq_, time_, FFTW_ESTIMATE);
  }
  BrickWall(const BrickWall&) = delete;
  BrickWall& operator=(const BrickWall&) = delete;
  ~BrickWall() {
    {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(fwd_);
      fftw_destroy_plan(inv_);
    }
    fftw_free(time_);
    fftw_free(freq_);
  }

  double* data() { return time_; }
  std::size_t size() const { return len_; }

  void apply() {
    fftw_execute(fwd_);
    const std::size_t bins = len_ / 2 + 1;
    for (std::size_t k = cutoff_; k < bins; ++k) {
      freq_[k][0] = 0.0;
      freq_[k][1] = 0.0;
    }
    fftw_execute(inv_);
    const double inv_len = 1.0 / static_cast<double>(len_);
    for (std::size_t i = 0; i < len_; ++i) time_[i] *= inv_len;
  }

 private:
  std::size_t len_;
  std::size_t cutoff_;
  double* time_ = nullptr;
  fftw_complex* freq_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan inv_ = nullptr;
};

struct WaveTally {
  double dc_sum = 0.0;
  double dc2_sum = 0.0;
  double harmonic_power = 0.0;
  double dc_power = 0.0;
};

}  // namespace

void DiodeModel::validate() const {
  require(i_s > 0.0 && gamma > 0.0, "diode constants must be positive");
  require(truncation_order >= 2, "truncation order must be at least 2");
}

double DiodeModel::coefficient(int n) const {
  return i_s * std::pow(gamma, n) / std::tgamma(n + 1.0);
}

void SimConfig::validate() const {
  require(n_symbols >= 1, "n_symbols must be at least 1");
  require(is_noise_scale >= 1.0, "importance-sampling scale must be >= 1");
  require(bandwidth_hz > 0.0 && carrier_hz > bandwidth_hz, "need 0 < bandwidth < carrier");
  if (oversampling < 8) {
    throw Error(ErrorKind::AliasedCarrier, "oversampling must be at least 8 samples per period");
  }
}

QamGrid::QamGrid(int m) {
  if (!modulation::valid_constellation(m)) {
    throw Error(ErrorKind::BadConstellation, "constellation size must be 2^l with 1 <= l <= 10");
  }
  const int l = std::countr_zero(static_cast<unsigned>(m));
  side_i = 1 << ((l + 1) / 2);
  side_q = 1 << (l / 2);
  const double energy = (side_i * side_i - 1.0) / 3.0 + (side_q * side_q - 1.0) / 3.0;
  scale = 1.0 / std::sqrt(energy);
}

int QamGrid::detect(double v, int side) const {
  const double idx = std::round((v / scale + (side - 1)) / 2.0);
  return static_cast<int>(std::clamp(idx, 0.0, side - 1.0));
}

QamSimResult simulate_qam_separated(const LinkParams& lp, double rho, int m,
                                    const SimConfig& cfg) {
  lp.validate();
  cfg.validate();
  require(rho >= 0.0 && rho < 1.0, "rho must lie in [0, 1)");
  const QamGrid grid(m);
  const double gain = std::sqrt((1.0 - rho) * lp.received_power());
  require(gain > 0.0, "received information power must be positive");
  const double noise = (1.0 - rho) * lp.sigma2_a + lp.sigma2_cov;
  const double c = cfg.is_noise_scale;
  const double noise_sd = std::sqrt(c * c * noise / 2.0);  // per real dimension
  const double energy_scale = lp.zeta * rho * lp.received_power();
  const std::complex<double> rot = std::polar(1.0, lp.theta);

  auto blocks = detail::run_blocks<ErrorTally>(
      cfg.n_symbols, cfg.workers, [&](std::uint64_t b, std::uint64_t, std::uint64_t count) {
        auto eng = detail::block_engine(cfg.seed, b);
        std::uniform_int_distribution<int> pick(0, m - 1);
        std::normal_distribution<double> gauss(0.0, 1.0);
        ErrorTally t;
        for (std::uint64_t k = 0; k < count; ++k) {
          const int s = pick(eng);
          const int ki = s % grid.side_i;
          const int kq = s / grid.side_i;
          const std::complex<double> x(grid.level_i(ki), grid.level_q(kq));
          std::complex<double> n(0.0, 0.0);
          double w = 1.0;
          if (noise > 0.0) {
            n = {noise_sd * gauss(eng), noise_sd * gauss(eng)};
            if (c != 1.0) w = c * c * std::exp(-std::norm(n) * (1.0 - 1.0 / (c * c)) / noise);
          }
          const std::complex<double> z = (gain * rot * x + n) / (gain * rot);
          const bool err =
              grid.detect(z.real(), grid.side_i) != ki || grid.detect(z.imag(), grid.side_q) != kq;
          if (err) {
            t.w_sum += w;
            t.w2_sum += w * w;
            ++t.errors;
          }
          const double e = energy_scale * std::norm(x);
          t.e_sum += e;
          t.e2_sum += e * e;
        }
        return t;
      });

  QamSimResult out;
  out.ser = finish(blocks, cfg);
  double e = 0.0;
  double e2 = 0.0;
  for (const auto& b : blocks) {
    e += b.e_sum;
    e2 += b.e2_sum;
  }
  const double n = static_cast<double>(cfg.n_symbols);
  out.energy_hat = e / n;
  out.energy_std_error = std::sqrt(std::max(0.0, e2 / n - out.energy_hat * out.energy_hat) / n);
  return out;
}

SerEstimate simulate_pem_integrated(const LinkParams& lp, int m, const SimConfig& cfg) {
  lp.validate();
  cfg.validate();
  if (!modulation::valid_constellation(m)) {
    throw Error(ErrorKind::BadConstellation, "constellation size must be 2^l with 1 <= l <= 10");
  }
  const double hp = lp.received_power();
  require(hp > 0.0, "received power must be positive");
  const double c = cfg.is_noise_scale;
  const double sa = std::sqrt(lp.sigma2_a / 2.0);
  const double sr = lp.sigma_rec();
  const std::complex<double> rot = std::polar(1.0, lp.theta);
  const double step = 2.0 / (m - 1.0);

  auto blocks = detail::run_blocks<ErrorTally>(
      cfg.n_symbols, cfg.workers, [&](std::uint64_t b, std::uint64_t, std::uint64_t count) {
        auto eng = detail::block_engine(cfg.seed, b);
        std::uniform_int_distribution<int> pick(0, m - 1);
        std::normal_distribution<double> gauss(0.0, 1.0);
        ErrorTally t;
        for (std::uint64_t k = 0; k < count; ++k) {
          const int s = pick(eng);
          const double x = step * s;
          const std::complex<double> na(sa * gauss(eng), sa * gauss(eng));
          double w = 1.0;
          double nr = 0.0;
          if (sr > 0.0) {
            const double g = gauss(eng);
            nr = c * sr * g;
            if (c != 1.0) w = c * std::exp(-0.5 * g * g * (c * c - 1.0));
          }
          const double y = std::norm(std::sqrt(hp * x) * rot + na) + nr;
          const double idx = std::clamp(std::round(y / hp / step), 0.0, m - 1.0);
          if (static_cast<int>(idx) != s) {
            t.w_sum += w;
            t.w2_sum += w * w;
            ++t.errors;
          }
        }
        return t;
      });
  return finish(blocks, cfg);
}

RectifierResult simulate_rectifier_waveform(const LinkParams& lp, const DiodeModel& diode,
                                            const SimConfig& cfg) {
  lp.validate();
  diode.validate();
  cfg.validate();
  if (cfg.oversampling <= 2 * diode.truncation_order) {
    throw Error(ErrorKind::AliasedCarrier,
                "oversampling must exceed twice the truncation order");
  }
  const double ratio = cfg.carrier_hz / cfg.bandwidth_hz;
  const double periods = std::round(ratio);
  require(periods >= 2.0 && std::abs(ratio - periods) <= 1e-9 * ratio,
          "carrier must be an integer multiple (>= 2) of the bandwidth");

  const int os = cfg.oversampling;
  const std::size_t per_symbol = static_cast<std::size_t>(periods) * os;
  const int order = diode.truncation_order;
  // Polynomial coefficients relative to a_2.
  std::vector<double> coef(order + 1, 0.0);
  for (int n = 1; n <= order; ++n) coef[n] = diode.coefficient(n) / diode.coefficient(2);

  std::vector<double> cos_t(os);
  std::vector<double> sin_t(os);
  std::vector<double> cos2_t(os);
  std::vector<double> sin2_t(os);
  for (int i = 0; i < os; ++i) {
    const double ph = 2.0 * std::numbers::pi * i / os;
    cos_t[i] = std::cos(ph);
    sin_t[i] = std::sin(ph);
    cos2_t[i] = std::cos(2.0 * ph);
    sin2_t[i] = std::sin(2.0 * ph);
  }

  const double amp = std::sqrt(lp.received_power());
  const std::complex<double> rot = std::polar(1.0, lp.theta);
  const double sa = std::sqrt(lp.sigma2_a / 2.0);
  constexpr std::uint64_t kChunk = 32;  // symbols per FFT

  auto blocks = detail::run_blocks<WaveTally>(
      cfg.n_symbols, cfg.workers, [&](std::uint64_t b, std::uint64_t, std::uint64_t count) {
        auto eng = detail::block_engine(cfg.seed, b);
        std::normal_distribution<double> gauss(0.0, 1.0);
        WaveTally t;
        std::unique_ptr<BrickWall> full;
        std::unique_ptr<BrickWall> tail;
        std::vector<std::complex<double>> env(kChunk);
        for (std::uint64_t first = 0; first < count; first += kChunk) {
          const std::uint64_t syms = std::min(kChunk, count - first);
          auto& filter = syms == kChunk ? full : tail;
          if (!filter || filter->size() != syms * per_symbol) {
            // Bin k sits at k B / syms; keep everything below B.
            filter = std::make_unique<BrickWall>(syms * per_symbol, syms);
          }
          for (std::uint64_t k = 0; k < syms; ++k) {
            std::complex<double> x(1.0, 0.0);
            if (cfg.signaling == Signaling::Gaussian) {
              x = {gauss(eng) * std::numbers::sqrt2 / 2.0, gauss(eng) * std::numbers::sqrt2 / 2.0};
            }
            std::complex<double> n(0.0, 0.0);
            if (sa > 0.0) n = {sa * gauss(eng), sa * gauss(eng)};
            env[k] = amp * rot * x + n;
          }
          double* y = filter->data();
          for (std::uint64_t k = 0; k < syms; ++k) {
            const double re = std::numbers::sqrt2 * env[k].real();
            const double im = std::numbers::sqrt2 * env[k].imag();
            for (std::size_t i = 0; i < per_symbol; ++i) {
              const int ph = static_cast<int>(i % os);
              const double s = re * cos_t[ph] - im * sin_t[ph];
              double acc = 0.0;
              for (int p = order; p >= 1; --p) acc = (acc + coef[p]) * s;
              y[k * per_symbol + i] = acc;
            }
          }
          filter->apply();

          const double len = static_cast<double>(filter->size());
          double chunk_sum = 0.0;
          std::complex<double> xf(0.0, 0.0);
          std::complex<double> x2f(0.0, 0.0);
          for (std::uint64_t k = 0; k < syms; ++k) {
            double sym_sum = 0.0;
            for (std::size_t i = 0; i < per_symbol; ++i) {
              const double v = y[k * per_symbol + i];
              const int ph = static_cast<int>(i % os);
              sym_sum += v;
              xf += std::complex<double>(v * cos_t[ph], -v * sin_t[ph]);
              x2f += std::complex<double>(v * cos2_t[ph], -v * sin2_t[ph]);
            }
            const double dc = sym_sum / static_cast<double>(per_symbol);
            t.dc_sum += dc;
            t.dc2_sum += dc * dc;
            chunk_sum += sym_sum;
          }
          const double dc = chunk_sum / len;
          // A tone of amplitude u carries power u^2 / 2, and |X| = u len / 2.
          t.harmonic_power += 2.0 * (std::norm(xf) + std::norm(x2f)) / (len * len);
          t.dc_power += dc * dc;
        }
        return t;
      });

  RectifierResult out;
  WaveTally sum;
  for (const auto& b : blocks) {
    sum.dc_sum += b.dc_sum;
    sum.dc2_sum += b.dc2_sum;
    sum.harmonic_power += b.harmonic_power;
    sum.dc_power += b.dc_power;
  }
  const double n = static_cast<double>(cfg.n_symbols);
  out.dc_mean = sum.dc_sum / n;
  out.dc_std_error = std::sqrt(std::max(0.0, sum.dc2_sum / n - out.dc_mean * out.dc_mean) / n);
  out.harmonic_residual = sum.dc_power > 0.0 ? sum.harmonic_power / sum.dc_power : 0.0;
  out.n_symbols = cfg.n_symbols;
  out.seed = cfg.seed;
  return out;
}

}  // namespace swipt::simkit
