#include "swipt/capacity.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_bessel.h>

#include <algorithm>
#include <array>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <vector>

#include "swipt/core.hpp"
#include "swipt/detail/blocks.hpp"

namespace swipt::capacity {

namespace {

constexpr double kLog2e = std::numbers::log2e;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::InvalidParams, what);
}

}  // namespace

// ---------------------------------------------------------------------------
// Closed-form bounds

double c1_upper(double hp, double sigma_rec, const C1BoundParams& params) {
  require(hp >= 0.0 && std::isfinite(hp), "c1_upper: hP must be nonnegative");
  require(sigma_rec > 0.0, "c1_upper: sigma_rec must be positive");
  if (!(params.beta > 0.0) || !(params.delta >= 0.0)) {
    throw Error(ErrorKind::InvalidParams, "c1_upper: need beta > 0 and delta >= 0");
  }
  const double beta = params.beta;
  const double delta = params.delta;
  const double s = sigma_rec;
  const double g = std::exp(-delta * delta / (2.0 * s * s));
  const double q_d = q_function(delta / s);
  const double root2pi = std::sqrt(2.0 * std::numbers::pi);

  const double t1 = std::log2(beta * g + root2pi * s * q_d);
  const double t2 = (0.5 * q_d + (delta + hp + s * g / root2pi) / beta) * kLog2e;
  const double t3 = (delta * g / (2.0 * root2pi * s) +
                     delta * delta / (2.0 * s * s) * (1.0 - q_function((delta + hp) / s))) *
                    kLog2e;
  const double t4 = -0.5 * std::log2(2.0 * std::numbers::pi * std::numbers::e * s * s);
  return t1 + t2 + t3 + t4;
}

C1Optimum c1_upper_optimized(double hp, double sigma_rec) {
  require(hp >= 0.0 && sigma_rec > 0.0, "c1_upper_optimized: bad arguments");

  const double log_b_lo = std::log(1e-3 * sigma_rec);
  const double log_b_hi = std::log(1e3 * (hp + sigma_rec));
  const double d_hi = 10.0 * sigma_rec;
  constexpr int kBetaGrid = 81;
  constexpr int kDeltaGrid = 41;
  const double log_b_step = (log_b_hi - log_b_lo) / (kBetaGrid - 1);
  const double d_step = d_hi / (kDeltaGrid - 1);

  auto eval = [&](double log_b, double delta) {
    return c1_upper(hp, sigma_rec, {std::exp(log_b), delta});
  };

  double best_lb = log_b_lo;
  double best_d = 0.0;
  double best = kInf;
  for (int i = 0; i < kBetaGrid; ++i) {
    for (int j = 0; j < kDeltaGrid; ++j) {
      const double lb = log_b_lo + i * log_b_step;
      const double d = j * d_step;
      const double v = eval(lb, d);
      if (v < best) {
        best = v;
        best_lb = lb;
        best_d = d;
      }
    }
  }

  // Coordinate descent with Brent line searches around the incumbent.
  constexpr int kBits = 50;
  for (int iter = 0; iter < 200; ++iter) {
    const double before = best;

    auto fb = [&](double lb) { return eval(lb, best_d); };
    auto [lb, vb] = boost::math::tools::brent_find_minima(
        fb, std::max(log_b_lo - 5.0, best_lb - 2.0 * log_b_step),
        best_lb + 2.0 * log_b_step, kBits);
    if (vb < best) {
      best = vb;
      best_lb = lb;
    }

    auto fd = [&](double d) { return eval(best_lb, d); };
    auto [d, vd] = boost::math::tools::brent_find_minima(
        fd, std::max(0.0, best_d - 2.0 * d_step), best_d + 2.0 * d_step, kBits);
    if (vd < best) {
      best = vd;
      best_d = d;
    }

    if (std::abs(before - best) <= 1e-6 * std::max(1.0, std::abs(best))) break;
  }

  C1Optimum out;
  out.params = {std::exp(best_lb), best_d};
  out.bits = c1_upper(hp, sigma_rec, out.params);
  return out;
}

double c1_asymptotic(double hp, double sigma_rec) {
  require(hp > 0.0 && sigma_rec > 0.0, "c1_asymptotic: need hP > 0 and sigma_rec > 0");
  return std::log2(hp / sigma_rec) + 0.5 * std::log2(std::numbers::e / (2.0 * std::numbers::pi));
}

double c2_upper(double hp, double sigma2_a) {
  require(hp >= 0.0 && sigma2_a > 0.0, "c2_upper: need hP >= 0 and sigma2_a > 0");
  return 0.5 * std::log2(1.0 + hp / sigma2_a) +
         0.5 * (std::log2(2.0 * std::numbers::pi / std::numbers::e) - kEulerGamma * kLog2e);
}

double c2_asymptotic(double hp, double sigma2_a) {
  require(hp >= 0.0 && sigma2_a > 0.0, "c2_asymptotic: need hP >= 0 and sigma2_a > 0");
  return 0.5 * std::log2(1.0 + hp / (2.0 * sigma2_a));
}

CnlUpper cnl_upper(double hp, double sigma2_a, double sigma_rec) {
  require(sigma2_a > 0.0 || sigma_rec > 0.0, "cnl_upper: both noises are zero");
  CnlUpper out;
  out.c1 = sigma_rec > 0.0 ? c1_upper_optimized(hp, sigma_rec).bits : kInf;
  out.c2 = sigma2_a > 0.0 ? c2_upper(hp, sigma2_a) : kInf;
  if (out.c1 <= out.c2) {
    out.bits = out.c1;
    out.branch = UpperBranch::C1;
  } else {
    out.bits = out.c2;
    out.branch = UpperBranch::C2;
  }
  return out;
}

EffectiveNoise effective_proc_noise(double sigma2_rec, double sigma2_adc, double rho) {
  require(sigma2_rec >= 0.0 && sigma2_adc >= 0.0, "noise powers must be nonnegative");
  require(rho >= 0.0 && rho <= 1.0, "rho must lie in [0, 1]");
  if (sigma2_adc == 0.0) return {sigma2_rec};
  if (rho == 1.0) {
    throw Error(ErrorKind::SplitAtUnity, "ADC noise is unbounded at rho = 1");
  }
  const double s = 1.0 - rho;
  return {sigma2_rec + sigma2_adc / (s * s)};
}

// ---------------------------------------------------------------------------
// Output densities of the nonlinear channel.
//
// With U = |sqrt(hP x) + Z2| the antenna stage is Rician in U; for a
// chi-square input sqrt(hP) G + Z2 is a complex Gaussian with unequal
// component variances s1 = hP + sigma2_a/2 and s2 = sigma2_a/2, so the
// marginal of R = |.| has a closed form. Both are integrated against the
// rectifier Gaussian in the amplitude variable, where the integrands stay
// smooth even when one noise dominates the other.

namespace {

constexpr double kSpan = 12.0;  // integration half-width in standard deviations
constexpr double kRelTol = 1e-9;
constexpr std::size_t kLimit = 512;

void silence_gsl() {
  static std::once_flag once;
  std::call_once(once, [] { gsl_set_error_handler_off(); });
}

struct WorkspaceDeleter {
  void operator()(gsl_integration_workspace* w) const { gsl_integration_workspace_free(w); }
};
using Workspace = std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter>;

Workspace make_workspace() {
  silence_gsl();
  return Workspace(gsl_integration_workspace_alloc(kLimit));
}

double gauss_pdf(double z, double sigma) {
  const double t = z / sigma;
  return std::exp(-0.5 * t * t) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

template <class F>
double integrate(F& f, std::vector<double> pts, double tol, gsl_integration_workspace* ws) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 2) return 0.0;
  gsl_function fn;
  fn.function = [](double x, void* p) { return (*static_cast<F*>(p))(x); };
  fn.params = &f;
  double result = 0.0;
  double abserr = 0.0;
  const int status = gsl_integration_qagp(&fn, pts.data(), pts.size(), tol, kRelTol, kLimit,
                                          ws, &result, &abserr);
  if (status != GSL_SUCCESS && abserr > std::max(tol, 1e-6 * std::abs(result))) {
    throw Error(ErrorKind::QuadratureFailure,
                std::string("quadrature did not converge: ") + gsl_strerror(status));
  }
  return result;
}

// Channel parameters in units where the output is divided by `scale`.
struct Channel {
  double hp;
  double a2;  // antenna noise
  double sr;  // rectifier noise standard deviation

  static Channel scaled(double hp, double sigma2_a, double sigma2_rec, double scale) {
    return {hp / scale, sigma2_a / scale, std::sqrt(sigma2_rec) / scale};
  }
};

// Amplitude window where the rectifier Gaussian phi(y - u^2) is non-negligible.
std::pair<double, double> rectifier_window(double y, double sr) {
  const double lo = std::sqrt(std::max(0.0, y - kSpan * sr));
  const double hi = std::sqrt(std::max(0.0, y + kSpan * sr));
  return {lo, hi};
}

double conditional_scaled(double y, double x, const Channel& ch, double tol,
                          gsl_integration_workspace* ws) {
  const double mu = std::sqrt(ch.hp * x);
  if (ch.a2 == 0.0) return gauss_pdf(y - mu * mu, ch.sr);
  if (ch.sr == 0.0) {
    if (y <= 0.0) return 0.0;
    const double u = std::sqrt(y);
    return std::exp(-(u - mu) * (u - mu) / ch.a2) * gsl_sf_bessel_I0_scaled(2.0 * u * mu / ch.a2) /
           ch.a2;
  }

  auto integrand = [&](double u) {
    return 2.0 * u / ch.a2 * std::exp(-(u - mu) * (u - mu) / ch.a2) *
           gsl_sf_bessel_I0_scaled(2.0 * u * mu / ch.a2) * gauss_pdf(y - u * u, ch.sr);
  };
  const double sa = std::sqrt(ch.a2);
  const double ric_lo = std::max(0.0, mu - kSpan * sa);
  const double ric_hi = mu + kSpan * sa;
  auto [rec_lo, rec_hi] = rectifier_window(y, ch.sr);
  double lo = std::max(ric_lo, rec_lo);
  double hi = std::min(ric_hi, rec_hi);
  if (!(lo < hi)) {
    lo = ric_lo;
    hi = ric_hi;
  }
  std::vector<double> pts{lo, hi};
  for (double b : {mu, std::sqrt(std::max(0.0, y))}) {
    if (b > lo && b < hi) pts.push_back(b);
  }
  return integrate(integrand, std::move(pts), tol, ws);
}

double marginal_scaled(double y, const Channel& ch, double tol, gsl_integration_workspace* ws) {
  const double s1 = ch.hp + 0.5 * ch.a2;
  const double s2 = 0.5 * ch.a2;
  if (s1 == 0.0) return gauss_pdf(y, ch.sr);

  if (ch.sr == 0.0) {
    if (y <= 0.0) return 0.0;
    return std::exp(-y / (2.0 * s1)) *
           gsl_sf_bessel_I0_scaled(0.25 * y * (1.0 / s2 - 1.0 / s1)) / (2.0 * std::sqrt(s1 * s2));
  }

  auto integrand = [&](double r) {
    double pr;
    if (s2 == 0.0) {
      pr = 2.0 * gauss_pdf(r, std::sqrt(s1));
    } else {
      pr = r / std::sqrt(s1 * s2) * std::exp(-r * r / (2.0 * s1)) *
           gsl_sf_bessel_I0_scaled(0.25 * r * r * (1.0 / s2 - 1.0 / s1));
    }
    return pr * gauss_pdf(y - r * r, ch.sr);
  };
  auto [lo, hi] = rectifier_window(y, ch.sr);
  hi = std::min(hi, 40.0 * std::sqrt(s1));
  if (!(lo < hi)) {
    lo = 0.0;
    hi = std::max(hi, std::sqrt(kSpan * ch.sr));
  }
  std::vector<double> pts{lo, hi};
  for (double b : {std::sqrt(std::max(0.0, y)), 10.0 * std::sqrt(s2)}) {
    if (b > lo && b < hi) pts.push_back(b);
  }
  return integrate(integrand, std::move(pts), tol, ws);
}

double pick_scale(double hp, double sigma2_a, double sigma2_rec) {
  const double s = std::max({hp, sigma2_a, std::sqrt(sigma2_rec)});
  return s > 0.0 ? s : 1.0;
}

}  // namespace

double conditional_density(double y, double x, double hp, double sigma2_a, double sigma2_rec,
                           double quad_tol) {
  require(sigma2_a > 0.0 || sigma2_rec > 0.0, "conditional_density: both noises are zero");
  require(x >= 0.0 && hp >= 0.0, "conditional_density: negative input");
  const double scale = pick_scale(hp, sigma2_a, sigma2_rec);
  auto ws = make_workspace();
  const Channel ch = Channel::scaled(hp, sigma2_a, sigma2_rec, scale);
  return conditional_scaled(y / scale, x, ch, quad_tol, ws.get()) / scale;
}

double marginal_density(double y, double hp, double sigma2_a, double sigma2_rec,
                        double quad_tol) {
  require(sigma2_a > 0.0 || sigma2_rec > 0.0, "marginal_density: both noises are zero");
  require(hp >= 0.0, "marginal_density: negative power");
  const double scale = pick_scale(hp, sigma2_a, sigma2_rec);
  auto ws = make_workspace();
  const Channel ch = Channel::scaled(hp, sigma2_a, sigma2_rec, scale);
  return marginal_scaled(y / scale, ch, quad_tol, ws.get()) / scale;
}

MiEstimate cnl_lower_chi2(double hp, double sigma2_a, double sigma2_rec, const MiConfig& mc) {
  require(std::isfinite(hp) && hp >= 0.0, "cnl_lower_chi2: hP must be nonnegative");
  require(sigma2_a >= 0.0 && sigma2_rec >= 0.0, "cnl_lower_chi2: negative noise");
  require(sigma2_a > 0.0 || sigma2_rec > 0.0, "cnl_lower_chi2: both noises are zero");
  require(mc.n_samples >= 2, "cnl_lower_chi2: need at least two samples");
  require(mc.quad_tol > 0.0, "cnl_lower_chi2: quad_tol must be positive");

  MiEstimate est;
  est.n_samples = mc.n_samples;
  est.seed = mc.seed;
  est.quadrature_tolerance = mc.quad_tol;
  if (hp == 0.0) return est;

  // Mutual information is invariant to output scaling; hP = 1 internally.
  const Channel ch = Channel::scaled(hp, sigma2_a, sigma2_rec, hp);
  const double half_a = std::sqrt(0.5 * ch.a2);

  struct Partial {
    double sum = 0.0;
    double sum_sq = 0.0;
  };
  auto blocks = detail::run_blocks<Partial>(
      mc.n_samples, mc.workers, [&](std::uint64_t b, std::uint64_t, std::uint64_t count) {
        auto rng = detail::block_engine(mc.seed, b);
        std::normal_distribution<double> normal(0.0, 1.0);
        auto ws = make_workspace();
        Partial part;
        for (std::uint64_t i = 0; i < count; ++i) {
          const double g = normal(rng);
          const double re = std::abs(g) + half_a * normal(rng);
          const double im = half_a * normal(rng);
          const double y = re * re + im * im + ch.sr * normal(rng);
          const double x = g * g;
          const double num = conditional_scaled(y, x, ch, mc.quad_tol, ws.get());
          const double den = marginal_scaled(y, ch, mc.quad_tol, ws.get());
          if (!(num > 0.0) || !(den > 0.0)) {
            throw Error(ErrorKind::QuadratureFailure,
                        "cnl_lower_chi2: density underflow; rescale the parameters");
          }
          const double v = std::log2(num / den);
          part.sum += v;
          part.sum_sq += v * v;
        }
        return part;
      });

  Partial total;
  for (const auto& p : blocks) {
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
  }
  const double n = static_cast<double>(mc.n_samples);
  const double mean = total.sum / n;
  const double var = std::max(0.0, (total.sum_sq - n * mean * mean) / (n - 1.0));
  est.value = std::max(0.0, mean);
  est.std_error = std::sqrt(var / n);
  return est;
}

}  // namespace swipt::capacity
