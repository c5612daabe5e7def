#pragma once

// Deterministic partitioning of Monte Carlo work. Samples are grouped into
// fixed-size blocks; every block draws from its own engine seeded by
// (seed, block index), and per-block results come back in block order. The
// aggregate is therefore independent of how many workers ran the blocks.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <random>
#include <thread>
#include <vector>

namespace swipt::detail {

inline constexpr std::uint64_t kBlockSize = 8192;

inline std::mt19937_64 block_engine(std::uint64_t seed, std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block),
                    static_cast<std::uint32_t>(block >> 32), 0x5717u};
  return std::mt19937_64(seq);
}

/// Runs fn(block, first, count) for every block of `n` samples on up to
/// `workers` threads and returns the results indexed by block.
template <class Result, class Fn>
std::vector<Result> run_blocks(std::uint64_t n, unsigned workers, Fn fn) {
  const std::uint64_t n_blocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<Result> out(n_blocks);
  std::vector<std::exception_ptr> errors(n_blocks);
  auto work = [&](std::uint64_t b) {
    const std::uint64_t first = b * kBlockSize;
    const std::uint64_t count = std::min(kBlockSize, n - first);
    try {
      out[b] = fn(b, first, count);
    } catch (...) {
      errors[b] = std::current_exception();
    }
  };
  auto rethrow = [&] {
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  };
  if (workers <= 1 || n_blocks <= 1) {
    for (std::uint64_t b = 0; b < n_blocks; ++b) work(b);
    rethrow();
    return out;
  }
  std::vector<std::thread> pool;
  const unsigned w = static_cast<unsigned>(std::min<std::uint64_t>(workers, n_blocks));
  for (unsigned t = 0; t < w; ++t) {
    pool.emplace_back([&, t] {
      for (std::uint64_t b = t; b < n_blocks; b += w) work(b);
    });
  }
  for (auto& th : pool) th.join();
  rethrow();
  return out;
}

}  // namespace swipt::detail
