#pragma once

// Command-line front end. `run` parses arguments (and an optional config
// file), dispatches one subcommand and returns the process exit code:
// 0 success, 2 invalid parameters, 3 infeasible problem, 4 numerical failure.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "swipt/core.hpp"

namespace swipt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitNumerical = 4;

int exit_code(ErrorKind kind);

struct FigureOptions {
  std::uint64_t mi_samples = 20000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  int points = 512;
  int adc_points = 25;  // rho samples for the ADC-noise regions (one MI estimate each)
};

/// Renders every curve of a figure. Returns (file name, contents) pairs.
std::vector<std::pair<std::string, std::string>> render_figure(const std::string& id,
                                                               const FigureOptions& opts);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace swipt::cli
