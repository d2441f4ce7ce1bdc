// dyson.hpp — truncated Dyson/Wick series for <O(t)> on the unfolded contour

#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "oqs/bathcorr.hpp"
#include "oqs/contour.hpp"
#include "oqs/model.hpp"
#include "oqs/sampling.hpp"

namespace oqs {

struct OrderContribution {
  int m{0};
  cplx value{0.0, 0.0};
  double std_error{0.0};
};

struct DysonResult {
  cplx value{0.0, 0.0};
  std::vector<OrderContribution> per_order;
  double truncation_tail_bound{0.0};
  double sup_b{0.0};
  DysonConfig config_echo;

  /// sqrt of the summed per-order variances
  [[nodiscard]] double total_std_error() const;
  /// sum of |contribution_m|
  [[nodiscard]] double absolute_sum() const;
};

/// Stream tags separating the random streams of independent estimators.
namespace streams {
inline constexpr std::uint32_t dyson = 1;
inline constexpr std::uint32_t identity_rhs = 2;
inline constexpr std::uint32_t comb = 3;
}  // namespace streams

/// dyson_weight(s) * wick_sum(s, B). Requires even m.
cplx order_m_integrand(std::span<const double> times, const ContourSystem& sys,
                       const CorrelationFn& corr);

/// Contribution of order m. m = 0 is exact; m = 2 uses nested Gauss (panels split at the pivot)
/// when cfg.integrator is gauss; every other order uses simplex Monte Carlo.
OrderContribution integrate_order(int m, const ContourSystem& sys, const CorrelationFn& corr,
                                  const DysonConfig& cfg);

/// Integrates any per-sample integrand order by order with the rules of integrate_order.
/// Shared by the observable and by both sides of the perturbation identity.
OrderContribution integrate_contour_order(
    int m, double pivot, const DysonConfig& cfg, std::uint32_t stream,
    const std::vector<double>& breakpoints,
    const std::function<cplx(std::span<const double>)>& integrand);

/// <O(t)> truncated at cfg.max_order, with the tail bound of the absolute-convergence envelope.
DysonResult observable(const SystemSpec& sys, const CorrelationFn& corr, const DysonConfig& cfg);

/// ||O_s|| exp(C ||W_s||^2 (Sf - Si)^2 / 2)
double convergence_bound(const SystemSpec& sys, double sup_b, double interval);

/// ||O_s|| sum_{even m > M} ((Sf-Si)^m / m!!) (C ||W_s||^2)^{m/2}, summed to convergence.
double truncation_tail_bound(double norm_o, double norm_w, double sup_b, double interval,
                             int max_order);

/// sum_{k > M/2} x^k / k!, summed to convergence.
double exp_tail(double x, int max_order);

/// Columns m,re,im,stderr; 17 significant digits.
void write_orders_csv(std::ostream& out, const DysonResult& r);

}  // namespace oqs
