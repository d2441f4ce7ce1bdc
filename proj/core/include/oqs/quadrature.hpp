// quadrature.hpp — Gauss–Legendre rules and nested quadrature over ordered simplices

#pragma once

#include <algorithm>
#include <functional>
#include <span>
#include <vector>

namespace oqs {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss–Legendre rule on [-1, 1].
GaussRule gauss_legendre(int n);

struct QuadratureEstimate {
  double value{0.0};
  double error{0.0};  // |I(n) - I(2n)|
};

/// Integrates f(s_1, ..., s_m) over a < s_1 < ... < s_m < b by nested Gauss–Legendre:
/// the outermost rule runs over s_m, each inner rule over [a, s_{k+1}]. Every interval is split
/// at the breakpoints it contains, so integrands that are smooth between breakpoints are
/// integrated to spectral accuracy.
template <typename F>
auto integrate_ordered_gauss(int m, double a, double b, std::span<const double> breakpoints,
                             const GaussRule& rule, F&& f) -> decltype(f(std::span<const double>{}));

// ---------------------------------------------------------------------------

namespace detail {

template <typename R, typename F>
void nested_level(int level, double a, double upper, std::span<const double> breaks,
                  const GaussRule& rule, std::vector<double>& s, double weight, R& acc, F& f) {
  if (level < 0) {
    acc += weight * f(std::span<const double>(s));
    return;
  }
  // panel edges: a, interior breakpoints, upper
  double lo = a;
  auto panel = [&](double p_lo, double p_hi) {
    const double half = 0.5 * (p_hi - p_lo);
    const double mid = 0.5 * (p_hi + p_lo);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      s[level] = mid + half * rule.nodes[i];
      nested_level(level - 1, a, s[level], breaks, rule, s, weight * half * rule.weights[i], acc,
                   f);
    }
  };
  for (double bp : breaks) {
    if (bp > lo && bp < upper) {
      panel(lo, bp);
      lo = bp;
    }
  }
  panel(lo, upper);
}

}  // namespace detail

template <typename F>
auto integrate_ordered_gauss(int m, double a, double b, std::span<const double> breakpoints,
                             const GaussRule& rule, F&& f) -> decltype(f(std::span<const double>{})) {
  using R = decltype(f(std::span<const double>{}));
  std::vector<double> s(static_cast<std::size_t>(std::max(m, 0)));
  if (m == 0) return f(std::span<const double>(s));
  if (!(b > a)) return R{};
  std::vector<double> breaks(breakpoints.begin(), breakpoints.end());
  std::sort(breaks.begin(), breaks.end());
  R acc{};
  detail::nested_level(m - 1, a, b, breaks, rule, s, 1.0, acc, f);
  return acc;
}

}  // namespace oqs
