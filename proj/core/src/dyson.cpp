// dyson.cpp

#include "oqs/dyson.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "oqs/pairings.hpp"
#include "oqs/quadrature.hpp"

namespace oqs {

double DysonResult::total_std_error() const {
  double v = 0.0;
  for (const auto& c : per_order) v += c.std_error * c.std_error;
  return std::sqrt(v);
}

double DysonResult::absolute_sum() const {
  double s = 0.0;
  for (const auto& c : per_order) s += std::abs(c.value);
  return s;
}

cplx order_m_integrand(std::span<const double> times, const ContourSystem& sys,
                       const CorrelationFn& corr) {
  if (times.size() % 2 != 0) throw std::invalid_argument("order_m_integrand: m must be even");
  const cplx w = sys.dyson_weight(times);
  if (w == cplx{0.0, 0.0}) return w;
  return w * wick_sum(times, corr);
}

OrderContribution integrate_contour_order(
    int m, double pivot, const DysonConfig& cfg, std::uint32_t stream,
    const std::vector<double>& breakpoints,
    const std::function<cplx(std::span<const double>)>& integrand) {
  if (m < 0 || m % 2 != 0) throw std::invalid_argument("integrate_order: m must be even");
  if (m > cfg.max_order) throw std::invalid_argument("integrate_order: m exceeds max_order");
  OrderContribution out;
  out.m = m;
  if (m == 0) {
    out.value = integrand({});
    return out;
  }
  const double end = 2.0 * pivot;
  if (!(end > 0.0)) return out;

  if (m == 2 && cfg.integrator == Integrator::gauss) {
    std::vector<double> breaks(breakpoints);
    breaks.push_back(pivot);
    const cplx coarse = integrate_ordered_gauss(2, 0.0, end, breaks, gauss_legendre(cfg.gauss_points), integrand);
    const cplx fine =
        integrate_ordered_gauss(2, 0.0, end, breaks, gauss_legendre(2 * cfg.gauss_points), integrand);
    out.value = fine;
    out.std_error = std::abs(fine - coarse);
    return out;
  }

  const McEstimate est = integrate_ordered_mc(m, 0.0, end, cfg.samples_per_order,
                                              StreamKey{cfg.seed, stream}, cfg.workers, integrand);
  out.value = est.value;
  out.std_error = est.std_error;
  return out;
}

OrderContribution integrate_order(int m, const ContourSystem& sys, const CorrelationFn& corr,
                                  const DysonConfig& cfg) {
  return integrate_contour_order(
      m, sys.pivot(), cfg, streams::dyson, corr.breakpoints(),
      [&](std::span<const double> s) { return order_m_integrand(s, sys, corr); });
}

DysonResult observable(const SystemSpec& sys, const CorrelationFn& corr, const DysonConfig& cfg) {
  cfg.validate();
  DysonResult r;
  r.config_echo = cfg;
  r.sup_b = corr.sup_bound();
  if (!std::isfinite(r.sup_b)) throw std::invalid_argument("observable: correlation is unbounded");
  const ContourSystem contour(sys, cfg.t);
  for (int m = 0; m <= cfg.max_order; m += 2) {
    r.per_order.push_back(integrate_order(m, contour, corr, cfg));
    r.value += r.per_order.back().value;
  }
  r.truncation_tail_bound = truncation_tail_bound(operator_norm(sys.o_s()), operator_norm(sys.w_s()),
                                                  r.sup_b, 2.0 * cfg.t, cfg.max_order);
  return r;
}

double convergence_bound(const SystemSpec& sys, double sup_b, double interval) {
  if (!(sup_b >= 0.0)) throw std::invalid_argument("convergence_bound: C must be >= 0");
  const double w = operator_norm(sys.w_s());
  return operator_norm(sys.o_s()) * std::exp(sup_b * w * w * interval * interval / 2.0);
}

double exp_tail(double x, int max_order) {
  if (x <= 0.0) return 0.0;
  // term k = x^k / k!, starting at k = M/2 + 1
  const int k0 = max_order / 2 + 1;
  double term = 1.0;
  for (int k = 1; k <= k0; ++k) term *= x / k;
  double sum = 0.0;
  for (int k = k0; k < k0 + 10000; ++k) {
    sum += term;
    if (term <= 1e-17 * sum && k > x) break;
    term *= x / (k + 1);
  }
  return sum;
}

double truncation_tail_bound(double norm_o, double norm_w, double sup_b, double interval,
                             int max_order) {
  // (L^m / m!!) y^{m/2} with m = 2k equals x^k / k! for x = y L^2 / 2
  const double x = sup_b * norm_w * norm_w * interval * interval / 2.0;
  return norm_o * exp_tail(x, max_order);
}

void write_orders_csv(std::ostream& out, const DysonResult& r) {
  out << "m,re,im,stderr\n";
  const auto old = out.precision(17);
  for (const auto& c : r.per_order)
    out << c.m << ',' << c.value.real() << ',' << c.value.imag() << ',' << c.std_error << '\n';
  out.precision(old);
}

}  // namespace oqs
