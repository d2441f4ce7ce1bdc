// bounds.cpp

#include "oqs/bounds.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>

#include "oqs/contour.hpp"
#include "oqs/pairings.hpp"
#include "oqs/quadrature.hpp"
#include "oqs/sampling.hpp"

namespace oqs {

double error_bound_value(double norm_o, double norm_w, double integral_abs_db) {
  if (!(integral_abs_db >= 0.0)) throw std::invalid_argument("error bound: integral must be >= 0");
  return norm_o * std::expm1(norm_w * norm_w * integral_abs_db);
}

BoundReport observable_error_bound(const SystemSpec& sys, const PerturbationSpec& p, double t,
                                   int quad_points) {
  if (!(t > 0.0)) throw std::invalid_argument("observable_error_bound: t must be > 0");
  const CorrelationFn db = delta_correlation(p, t);
  if (!std::isfinite(db.sup_bound()))
    throw std::invalid_argument("observable_error_bound: Delta B is unbounded");
  const QuadratureEstimate q = abs_delta_double_integral(db, t, quad_points);
  BoundReport r;
  r.integral_abs_db = q.value;
  r.integral_error = q.error;
  r.bound_value = error_bound_value(operator_norm(sys.o_s()), operator_norm(sys.w_s()), q.value);
  return r;
}

BoundReport corollary_bound_spin_boson(const SystemSpec& sys, const PerturbationSpec& p, double t,
                                       int quad_points) {
  if (!(t > 0.0)) throw std::invalid_argument("corollary_bound_spin_boson: t must be > 0");
  if (sys.dim() != 2 || (sys.w_s() - pauli::sigma_z()).norm() > 1e-12)
    throw std::invalid_argument("corollary_bound_spin_boson: requires W_s = sigma_z");
  if (!std::holds_alternative<BathSpec>(p.base) || !std::holds_alternative<BathSpec>(p.perturbed))
    throw std::invalid_argument("corollary_bound_spin_boson: requires discrete-mode baths");
  const CorrelationFn db = delta_correlation(p, t);
  const QuadratureEstimate q = abs_delta_half_integral(db, t, quad_points);
  BoundReport r;
  r.integral_abs_db = 4.0 * q.value;
  r.integral_error = 4.0 * q.error;
  r.bound_value = error_bound_value(operator_norm(sys.o_s()), 1.0, r.integral_abs_db);
  return r;
}

void attach_observed(BoundReport& report, cplx observed, double allowance) {
  report.observed_delta = observed;
  report.slack = report.bound_value + allowance - std::abs(observed);
  report.satisfied = report.slack >= 0.0;
}

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

std::vector<double> inner_breakpoints(const CorrelationFn& corr, double si, double sf) {
  std::vector<double> out;
  for (double b : corr.breakpoints())
    if (b > si && b < sf) out.push_back(b);
  return out;
}

}  // namespace

CombReport comb_identity_check(int m, const CorrelationFn& corr, double si, double sf,
                               const DysonConfig& cfg) {
  if (m < 2 || m % 2 != 0) throw std::invalid_argument("comb_identity_check: m must be even and >= 2");
  if (!(sf > si)) throw std::invalid_argument("comb_identity_check: requires si < sf");
  cfg.validate();
  const std::vector<double> breaks = inner_breakpoints(corr, si, sf);
  auto wick = [&](std::span<const double> s) { return wick_sum(s, corr); };
  auto pair = [&](std::span<const double> s) { return corr(s[0], s[1]); };

  CombReport r;
  r.m = m;
  const GaussRule coarse = gauss_legendre(cfg.gauss_points);
  const GaussRule fine = gauss_legendre(2 * cfg.gauss_points);

  const cplx i2_coarse = integrate_ordered_gauss(2, si, sf, breaks, coarse, pair);
  const cplx i2_fine = integrate_ordered_gauss(2, si, sf, breaks, fine, pair);
  const int k = m / 2;
  r.rhs = std::pow(i2_fine, k) / factorial(k);
  r.rhs_error = std::abs(r.rhs - std::pow(i2_coarse, k) / factorial(k));

  if (m <= 4 && cfg.integrator == Integrator::gauss) {
    const cplx c = integrate_ordered_gauss(m, si, sf, breaks, coarse, wick);
    r.lhs = integrate_ordered_gauss(m, si, sf, breaks, fine, wick);
    r.lhs_error = std::abs(r.lhs - c);
    r.deterministic = true;
  } else {
    const McEstimate est = integrate_ordered_mc(m, si, sf, cfg.samples_per_order,
                                                StreamKey{cfg.seed, streams::comb}, cfg.workers,
                                                [&](std::span<const double> s) { return wick(s); });
    r.lhs = est.value;
    r.lhs_error = est.std_error;
    r.samples = est.samples;
  }
  r.discrepancy = std::abs(r.lhs - r.rhs);
  return r;
}

IdentitySide identity_lhs(const SystemSpec& sys, const PerturbationSpec& p, double t,
                          int max_order, const DysonConfig& cfg) {
  if (max_order < 0 || max_order % 2 != 0)
    throw std::invalid_argument("identity_lhs: max_order must be even");
  DysonConfig c = cfg;
  c.t = t;
  c.max_order = max_order;
  c.validate();
  const CorrelationFn b = make_correlation(p.base, t);
  const CorrelationFn bt = make_correlation(p.perturbed, t);
  const ContourSystem contour(sys, t);
  std::vector<double> breaks = b.breakpoints();
  for (double x : bt.breakpoints()) breaks.push_back(x);

  IdentitySide side;
  for (int m = 0; m <= max_order; m += 2) {
    const OrderContribution oc = integrate_contour_order(
        m, t, c, streams::dyson, breaks, [&](std::span<const double> s) -> cplx {
          const cplx w = contour.dyson_weight(s);
          if (w == cplx{0.0, 0.0}) return w;
          return w * (wick_sum(s, bt) - wick_sum(s, b));
        });
    side.per_order.push_back(oc);
    side.value += oc.value;
    side.std_error += oc.std_error * oc.std_error;
  }
  side.std_error = std::sqrt(side.std_error);

  // |Wick(B~) - Wick(B)| <= (m-1)!! ((C + D)^{m/2} - C^{m/2}) with C >= sup|B|, sup|B~|
  const double sup_c = std::max(b.sup_bound(), bt.sup_bound());
  const double sup_d = delta_correlation(p, t).sup_bound();
  const double norm_o = operator_norm(sys.o_s());
  const double norm_w = operator_norm(sys.w_s());
  side.tail_bound = truncation_tail_bound(norm_o, norm_w, sup_c + sup_d, 2.0 * t, max_order) -
                    truncation_tail_bound(norm_o, norm_w, sup_c, 2.0 * t, max_order);
  side.tail_bound = std::max(side.tail_bound, 0.0);
  return side;
}

IdentitySide identity_rhs(const CompositeModel& model, const CorrelationFn& delta_b, double t,
                          int max_order, const DysonConfig& cfg) {
  if (max_order < 2 || max_order % 2 != 0)
    throw std::invalid_argument("identity_rhs: max_order must be even and >= 2");
  DysonConfig c = cfg;
  c.t = t;
  c.max_order = max_order;
  c.validate();
  const std::vector<double> breaks = delta_b.breakpoints();

  IdentitySide side;
  for (int m = 2; m <= max_order; m += 2) {
    const OrderContribution oc = integrate_contour_order(
        m, t, c, streams::identity_rhs, breaks, [&](std::span<const double> s) -> cplx {
          const cplx l = wick_sum(s, delta_b);
          if (l == cplx{0.0, 0.0}) return l;
          return static_cast<double>(contour_sign(s, t)) * i_pow(s.size()) *
                 model.trace_u_ring(s, t) * l;
        });
    side.per_order.push_back(oc);
    side.value += oc.value;
    side.std_error += oc.std_error * oc.std_error;
  }
  side.std_error = std::sqrt(side.std_error);

  const double norm_o = operator_norm(model.system().o_s());
  const double norm_w = operator_norm(model.system().w_s());
  const double sup_d = delta_b.sup_bound();
  side.tail_bound = truncation_tail_bound(norm_o, norm_w, sup_d, 2.0 * t, max_order);

  // Truncation weight times the absolute envelope of the right-hand series.
  const TruncationDiagnostics d = model.diagnostics(t);
  const double envelope = norm_o * std::expm1(sup_d * norm_w * norm_w * 2.0 * t * t);
  side.fock_diagnostic = (d.thermal_tail_mass + d.edge_population) * envelope;
  return side;
}

namespace {

std::string scientific(double x) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(3) << x;
  return s.str();
}

}  // namespace

IdentitySide identity_rhs(const SystemSpec& sys, const PerturbationSpec& p, double t,
                          int max_order, const DysonConfig& cfg, const FockTruncation& trunc) {
  if (!std::holds_alternative<BathSpec>(p.base))
    throw std::invalid_argument("identity_rhs: the base bath must be given by discrete modes");
  const CompositeModel model(sys, std::get<BathSpec>(p.base), trunc);
  const TruncationDiagnostics d = model.diagnostics(t);
  if (d.thermal_tail_mass >= trunc.tail_threshold || d.edge_population >= trunc.edge_threshold)
    throw NumericalError("identity_rhs: Fock truncation diagnostics exceed thresholds (tail mass " +
                         scientific(d.thermal_tail_mass) + ", edge population " +
                         scientific(d.edge_population) + ")");
  return identity_rhs(model, delta_correlation(p, t), t, max_order, cfg);
}

IdentityReport identity_check(const SystemSpec& sys, const PerturbationSpec& p, double t,
                              int max_order, const DysonConfig& cfg, const FockTruncation& trunc) {
  IdentityReport r;
  r.lhs = identity_lhs(sys, p, t, max_order, cfg);
  r.rhs = identity_rhs(sys, p, t, max_order, cfg, trunc);
  r.discrepancy = std::abs(r.lhs.value - r.rhs.value);
  r.budget = 3.0 * (r.lhs.std_error + r.rhs.std_error + r.rhs.fock_diagnostic) + r.lhs.tail_bound +
             r.rhs.tail_bound;
  r.within_budget = r.discrepancy <= r.budget;
  return r;
}

FirstOrderReport first_order_check(const SystemSpec& sys, const BathSpec& base, double t,
                                   int max_order, const DysonConfig& cfg,
                                   const FockTruncation& trunc, double eps_coarse,
                                   double eps_fine) {
  if (!(eps_coarse > 0.0) || !(eps_fine > 0.0) || eps_coarse == eps_fine)
    throw std::invalid_argument("first_order_check: need two distinct positive epsilons");
  base.validate();
  FirstOrderReport r;

  // m = 2 right-hand term with Delta B = B
  DysonConfig c2 = cfg;
  const CompositeModel model(sys, base, trunc);
  const IdentitySide rhs = identity_rhs(model, CorrelationFn::discrete_modes(base, t), t, 2, c2);
  r.first_order_rhs = rhs.value;
  if (std::abs(rhs.value.real()) == 0.0)
    throw NumericalError("first_order_check: first-order term vanishes; ratio undefined");

  for (double eps : {eps_coarse, eps_fine}) {
    BathSpec perturbed = base;
    for (auto& mode : perturbed.modes) mode.c *= std::sqrt(1.0 + eps);
    const IdentitySide lhs = identity_lhs(sys, PerturbationSpec{base, perturbed}, t, max_order, cfg);
    r.epsilons.push_back(eps);
    r.ratios.push_back(lhs.value.real() / (eps * rhs.value.real()));
  }
  // r(eps) = r0 + a eps
  const double e1 = r.epsilons[0], e2 = r.epsilons[1];
  r.richardson = (e1 * r.ratios[1] - e2 * r.ratios[0]) / (e1 - e2);
  r.passed = r.richardson >= 0.9 && r.richardson <= 1.1;
  return r;
}

}  // namespace oqs
