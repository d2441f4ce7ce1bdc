// sampling.hpp — reproducible Monte Carlo over ordered simplices
//
// Samples are grouped in fixed-size blocks. Each block draws from its own generator keyed by
// (seed, stream, m, block index), and block partial sums are reduced in block order, so the
// estimate is bit-identical for any number of workers.

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "oqs/model.hpp"

namespace oqs {

inline constexpr std::uint64_t kSampleBlock = 4096;

struct McEstimate {
  cplx value{0.0, 0.0};
  double std_error{0.0};  // standard error of |value|: sqrt((var Re + var Im) / N)
  std::uint64_t samples{0};
};

/// Identifies an independent family of random streams. Calls sharing a key see the same
/// sample points (common random numbers).
struct StreamKey {
  std::uint64_t seed{0};
  std::uint32_t stream{0};
};

/// Resolves a worker count: 0 means hardware concurrency.
unsigned resolve_workers(unsigned requested);

/// Runs body(block) for block in [0, n_blocks) on up to `workers` threads.
void run_blocks(std::size_t n_blocks, unsigned workers,
                const std::function<void(std::size_t)>& body);

/// Generator for one block of one order.
std::mt19937_64 block_engine(const StreamKey& key, int m, std::uint64_t block);

/// Fills `s` with m sorted uniform points in (a, b). A draw that produces a tie or touches an
/// endpoint is redrawn once; a second failure throws NumericalError.
void draw_ordered(std::mt19937_64& gen, double a, double b, std::span<double> s);

/// Estimates the integral of f over a < s_1 < ... < s_m < b as ((b-a)^m / m!) mean f(sorted
/// uniforms). f must be safe to call concurrently.
McEstimate integrate_ordered_mc(int m, double a, double b, std::uint64_t samples,
                                const StreamKey& key, unsigned workers,
                                const std::function<cplx(std::span<const double>)>& f);

/// Several integrands evaluated on the same sample points; one estimate per integrand.
std::vector<McEstimate> integrate_ordered_mc_multi(
    int m, double a, double b, std::uint64_t samples, const StreamKey& key, unsigned workers,
    std::size_t n_outputs,
    const std::function<void(std::span<const double>, std::span<cplx>)>& f);

/// (b-a)^m / m!
double simplex_volume(int m, double width);

}  // namespace oqs
