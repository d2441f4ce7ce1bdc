// sampling.cpp

#include "oqs/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace oqs {

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void run_blocks(std::size_t n_blocks, unsigned workers,
                const std::function<void(std::size_t)>& body) {
  const unsigned n_threads =
      static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), n_blocks));
  if (n_threads <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) body(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      try {
        body(b);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n_blocks);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::mt19937_64 block_engine(const StreamKey& key, int m, std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(key.seed), static_cast<std::uint32_t>(key.seed >> 32),
                    key.stream, static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(block),
                    static_cast<std::uint32_t>(block >> 32)};
  return std::mt19937_64(seq);
}

void draw_ordered(std::mt19937_64& gen, double a, double b, std::span<double> s) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int attempt = 0; attempt < 2; ++attempt) {
    for (double& x : s) x = a + (b - a) * unif(gen);
    std::sort(s.begin(), s.end());
    bool ok = s.empty() || (s.front() > a && s.back() < b);
    for (std::size_t i = 1; ok && i < s.size(); ++i) ok = s[i] > s[i - 1];
    if (ok) return;
  }
  throw NumericalError("draw_ordered: repeated tie in sorted sample");
}

double simplex_volume(int m, double width) {
  double v = 1.0;
  for (int k = 1; k <= m; ++k) v *= width / k;
  return v;
}

std::vector<McEstimate> integrate_ordered_mc_multi(
    int m, double a, double b, std::uint64_t samples, const StreamKey& key, unsigned workers,
    std::size_t n_outputs,
    const std::function<void(std::span<const double>, std::span<cplx>)>& f) {
  if (samples < 1) throw std::invalid_argument("integrate_ordered_mc: need at least one sample");
  struct Partial {
    std::vector<cplx> sum;
    std::vector<double> sumsq;
  };
  const std::uint64_t n_blocks = (samples + kSampleBlock - 1) / kSampleBlock;
  std::vector<Partial> partial(n_blocks);

  run_blocks(n_blocks, workers, [&](std::size_t block) {
    auto gen = block_engine(key, m, block);
    const std::uint64_t begin = block * kSampleBlock;
    const std::uint64_t end = std::min(samples, begin + kSampleBlock);
    std::vector<double> s(static_cast<std::size_t>(m));
    std::vector<cplx> out(n_outputs);
    Partial p{std::vector<cplx>(n_outputs), std::vector<double>(n_outputs, 0.0)};
    for (std::uint64_t i = begin; i < end; ++i) {
      draw_ordered(gen, a, b, s);
      f(s, out);
      for (std::size_t k = 0; k < n_outputs; ++k) {
        p.sum[k] += out[k];
        p.sumsq[k] += std::norm(out[k]);
      }
    }
    partial[block] = std::move(p);
  });

  const double volume = simplex_volume(m, b - a);
  const double n = static_cast<double>(samples);
  std::vector<McEstimate> result(n_outputs);
  for (std::size_t k = 0; k < n_outputs; ++k) {
    cplx sum{0.0, 0.0};
    double sumsq = 0.0;
    for (const auto& p : partial) {
      sum += p.sum[k];
      sumsq += p.sumsq[k];
    }
    const cplx mean = sum / n;
    const double var = samples > 1 ? std::max(0.0, (sumsq - n * std::norm(mean)) / (n - 1.0)) : 0.0;
    result[k].value = volume * mean;
    result[k].std_error = volume * std::sqrt(var / n);
    result[k].samples = samples;
  }
  return result;
}

McEstimate integrate_ordered_mc(int m, double a, double b, std::uint64_t samples,
                                const StreamKey& key, unsigned workers,
                                const std::function<cplx(std::span<const double>)>& f) {
  return integrate_ordered_mc_multi(
      m, a, b, samples, key, workers, 1,
      [&](std::span<const double> s, std::span<cplx> out) { out[0] = f(s); })[0];
}

}  // namespace oqs
