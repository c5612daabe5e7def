#pragma once

// Practical modulation: SER models for coherent QAM (separated receiver) and
// pulse energy modulation (integrated receiver), the SER- and energy-
// constrained rate maximizers, and the distance link budget.

#include <optional>
#include <string_view>

#include "swipt/core.hpp"

namespace swipt::modulation {

enum class Family { QAM, PEM };

std::string_view to_string(Family family);

inline constexpr int kMaxBitsPerSymbol = 10;

struct ModulationPlan {
  Family family = Family::QAM;
  std::optional<int> m;  // empty: no constellation meets the SER target
  double ser_target = 0.0;
  double alpha = 0.0;
  double rho = 0.0;  // QAM path only; PEM splits with rho -> 1
  double rate = 0.0;
};

struct LinkBudget {
  double distance_m = 1.0;
  double tx_power_w = 1.0;
  double carrier_hz = 900e6;
  double bandwidth_hz = 10e6;
  double antenna_noise_dbm = -104.0;
  double conv_noise_dbm = -70.0;
  double rec_noise_dbm = -50.0;  // rectifier noise standard deviation, in dBm
  double zeta = 0.6;
};

struct P1Options {
  int grid_points = 2048;
  double refine_tol = 1e-6;
};

struct OrderingReport {
  ModulationPlan separated;
  ModulationPlan integrated;
  bool alpha_ordered = false;      // alpha_1 >= alpha_2
  bool rate_implication = false;   // M_1 <= M_2 implies R_1 <= R_2
};

bool valid_constellation(int m);

/// 4 (sqrt(M) - 1) / sqrt(M) * Q(sqrt(3 snr / (M - 1))). Used as the
/// contract for every M = 2^l, including BPSK and non-square sizes; not
/// clamped to 1.
double ser_qam(int m, double snr);

/// 2 (M - 1) / M * Q(snr / (M - 1)) with snr = hP / sigma_rec.
double ser_pem(int m, double snr);

double ser(Family family, int m, double snr);

/// Largest M = 2^l, l in [1, 10], meeting ser <= ser_target.
std::optional<int> max_modulation(Family family, double snr, double ser_target);

/// Off-time fraction needed by the separated receiver at split ratio rho:
/// [(Q - rho zeta hP + P_S) / ((1 - rho) zeta hP + P_S)]^+.
double p1_alpha(const LinkParams& lp, double p_s, double q_req, double rho);

/// Separated receiver: maximizes (1 - alpha) log2 M over (alpha, rho, M).
ModulationPlan solve_p1(const LinkParams& lp, double p_s, double q_req, double ser_target,
                        const P1Options& opts = {});

/// Integrated receiver: maximizes (1 - alpha) log2 M over (alpha, M).
ModulationPlan solve_p2(const LinkParams& lp, double p_i, double q_req, double ser_target);

OrderingReport check_alpha_ordering(const LinkParams& lp, double p_s, double p_i, double q_req,
                                    double ser_target);

/// h = 10^((-30 - 30 log10 d) / 10); noise figures converted from dBm.
LinkParams link_budget_to_params(const LinkBudget& lb);

}  // namespace swipt::modulation
