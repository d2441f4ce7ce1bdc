// bounds.hpp — perturbation error bounds and numerical checks of the underlying identities

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "oqs/bathcorr.hpp"
#include "oqs/dyson.hpp"
#include "oqs/model.hpp"
#include "oqs/oracle.hpp"

namespace oqs {

struct BoundReport {
  double bound_value{0.0};
  double integral_abs_db{0.0};  // the double integral of |Delta B| entering the exponent
  double integral_error{0.0};   // quadrature error estimate of integral_abs_db
  std::optional<cplx> observed_delta;
  bool satisfied{true};
  double slack{0.0};  // bound_value - |observed_delta| (+ allowance), when observed
};

/// ||O|| (exp(||W||^2 I) - 1)
double error_bound_value(double norm_o, double norm_w, double integral_abs_db);

/// Bound with the integral over 0 < s_1 < s_2 < 2t.
BoundReport observable_error_bound(const SystemSpec& sys, const PerturbationSpec& p, double t,
                                   int quad_points);

/// Spin-boson form: ||W_s|| = 1 and 4 times the integral over 0 < s_1 < s_2 < t.
/// Requires W_s = sigma_z and both correlations given by discrete modes.
BoundReport corollary_bound_spin_boson(const SystemSpec& sys, const PerturbationSpec& p, double t,
                                       int quad_points);

/// Records an observed |Delta <O>| against the bound, allowing `allowance` of numerical error.
void attach_observed(BoundReport& report, cplx observed, double allowance = 0.0);

struct CombReport {
  int m{0};
  cplx lhs{0.0, 0.0};
  cplx rhs{0.0, 0.0};
  double discrepancy{0.0};
  double lhs_error{0.0};  // Monte Carlo standard error, or |I(n) - I(2n)| on the Gauss path
  double rhs_error{0.0};
  bool deterministic{false};
  std::uint64_t samples{0};
};

/// Simplex integral of the Wick sum against (1/(m/2)!) (int int B)^{m/2} on [si, sf].
/// m <= 4 with the gauss integrator runs nested Gauss; otherwise Monte Carlo.
CombReport comb_identity_check(int m, const CorrelationFn& corr, double si, double sf,
                               const DysonConfig& cfg);

struct IdentitySide {
  cplx value{0.0, 0.0};
  double std_error{0.0};      // root-sum-square of per-order errors
  double tail_bound{0.0};     // bound on the orders beyond max_order
  double fock_diagnostic{0.0};
  std::vector<OrderContribution> per_order;
};

/// sum_{even m <= M} int w(s) (Wick(B~) - Wick(B)), one sample stream for both baths.
IdentitySide identity_lhs(const SystemSpec& sys, const PerturbationSpec& p, double t,
                          int max_order, const DysonConfig& cfg);

/// sum_{even 2 <= m <= M} i^m int (-1)^{#fwd} tr(rho(0) U_ring(2t, s, 0)) Wick(Delta B), with the
/// full propagator of the base bath realized by the oracle. The base source must be a BathSpec.
IdentitySide identity_rhs(const SystemSpec& sys, const PerturbationSpec& p, double t,
                          int max_order, const DysonConfig& cfg, const FockTruncation& trunc);

/// Same as identity_rhs with an explicit Delta B, on a prebuilt model.
IdentitySide identity_rhs(const CompositeModel& model, const CorrelationFn& delta_b, double t,
                          int max_order, const DysonConfig& cfg);

struct IdentityReport {
  IdentitySide lhs;
  IdentitySide rhs;
  double discrepancy{0.0};
  double budget{0.0};  // 3 (sigma_lhs + sigma_rhs + fock) + both tail bounds
  bool within_budget{false};
};

IdentityReport identity_check(const SystemSpec& sys, const PerturbationSpec& p, double t,
                              int max_order, const DysonConfig& cfg, const FockTruncation& trunc);

struct FirstOrderReport {
  std::vector<double> epsilons;
  std::vector<double> ratios;  // Re lhs(eps) / (eps Re rhs_2)
  cplx first_order_rhs{0.0, 0.0};
  double richardson{0.0};
  bool passed{false};
};

/// Scales every coupling by sqrt(1 + eps), so Delta B = eps B exactly, and compares lhs(eps)/eps
/// with the m = 2 right-hand term for Delta B = B. The Richardson extrapolation to eps -> 0 of
/// the two ratios must lie in [0.9, 1.1].
FirstOrderReport first_order_check(const SystemSpec& sys, const BathSpec& base, double t,
                                   int max_order, const DysonConfig& cfg,
                                   const FockTruncation& trunc, double eps_coarse = 1e-2,
                                   double eps_fine = 1e-3);

}  // namespace oqs
