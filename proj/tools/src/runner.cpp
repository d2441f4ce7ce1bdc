// runner.cpp

#include "oqs_cli/runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "oqs/bounds.hpp"
#include "oqs/dyson.hpp"
#include "oqs/oracle.hpp"

#ifndef OQS_VERSION
#define OQS_VERSION "unknown"
#endif

namespace oqs::cli {

using nlohmann::json;

namespace {

json to_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json orders_json(const std::vector<OrderContribution>& orders) {
  json out = json::array();
  for (const auto& c : orders)
    out.push_back({{"m", c.m}, {"value", to_json(c.value)}, {"stderr", c.std_error}});
  return out;
}

std::string orders_csv(const DysonResult& r) {
  std::ostringstream out;
  write_orders_csv(out, r);
  return out.str();
}

std::optional<BathSpec> as_modes(const CorrelationSource& s) {
  if (const auto* b = std::get_if<BathSpec>(&s)) return *b;
  return std::nullopt;
}

CorrelationSource base_source(const RunConfig& cfg) { return cfg.bath.build(); }

CorrelationSource perturbed_source(const RunConfig& cfg, const CorrelationSource& base) {
  return cfg.perturbed_bath->build(as_modes(base));
}

double sf_of(const RunConfig& cfg) { return cfg.check.sf.value_or(2.0 * cfg.dyson.t); }

RunOutcome run_observable(const RunConfig& cfg) {
  const SystemSpec sys = cfg.system.build();
  const CorrelationFn corr = make_correlation(base_source(cfg), cfg.dyson.t);
  const DysonResult r = observable(sys, corr, cfg.dyson);
  const double envelope = convergence_bound(sys, r.sup_b, 2.0 * cfg.dyson.t);
  const bool envelope_ok = r.absolute_sum() <= envelope + 3.0 * r.total_std_error();

  RunOutcome out;
  out.results = {{"value", to_json(r.value)},
                 {"stderr", r.total_std_error()},
                 {"truncation_tail_bound", r.truncation_tail_bound},
                 {"sup_b", r.sup_b},
                 {"absolute_sum", r.absolute_sum()},
                 {"convergence_envelope", envelope},
                 {"envelope_satisfied", envelope_ok},
                 {"orders", orders_json(r.per_order)}};
  out.orders_csv = orders_csv(r);
  out.exit_code = envelope_ok ? kExitOk : kExitNumerical;
  return out;
}

// Oracle value of <O(t)> or the reason it is unavailable.
struct OracleAttempt {
  std::optional<OracleResult> result;
  std::string reason;
};

OracleAttempt try_oracle(const SystemSpec& sys, const CorrelationSource& src, const RunConfig& cfg,
                         double t) {
  OracleAttempt a;
  const auto bath = as_modes(src);
  if (!bath) {
    a.reason = "tabulated bath has no Hilbert-space realization";
    return a;
  }
  try {
    a.result = exact_observable_converged(sys, *bath, cfg.truncation, t, 1e-8, cfg.dyson.tol);
  } catch (const std::exception& e) {
    a.reason = e.what();
  }
  return a;
}

json oracle_json(const OracleResult& r) {
  return {{"value", r.value},
          {"imag", r.imag},
          {"thermal_tail_mass", r.diagnostics.thermal_tail_mass},
          {"edge_population", r.diagnostics.edge_population},
          {"cutoff_change", r.cutoff_change}};
}

json bound_json(const BoundReport& b) {
  json j{{"bound_value", b.bound_value},
         {"integral_abs_db", b.integral_abs_db},
         {"integral_error", b.integral_error},
         {"satisfied", b.satisfied},
         {"slack", b.slack}};
  j["observed_delta"] = b.observed_delta ? to_json(*b.observed_delta) : json(nullptr);
  return j;
}

RunOutcome run_bound(const RunConfig& cfg) {
  const SystemSpec sys = cfg.system.build();
  const CorrelationSource base = base_source(cfg);
  const PerturbationSpec p{base, perturbed_source(cfg, base)};
  const double t = cfg.dyson.t;
  BoundReport general = observable_error_bound(sys, p, t, cfg.check.quad_points);
  std::optional<BoundReport> corollary;
  std::string corollary_reason;
  try {
    corollary = corollary_bound_spin_boson(sys, p, t, cfg.check.quad_points);
  } catch (const std::invalid_argument& e) {
    corollary_reason = e.what();
  }

  RunOutcome out;
  const OracleAttempt a = try_oracle(sys, p.base, cfg, t);
  const OracleAttempt b = try_oracle(sys, p.perturbed, cfg, t);
  json observed = nullptr;
  if (a.result && b.result) {
    const double delta = b.result->value - a.result->value;
    const double allowance =
        a.result->cutoff_change + b.result->cutoff_change + general.integral_error + 1e-12;
    attach_observed(general, delta, allowance);
    if (corollary) attach_observed(*corollary, delta, allowance);
    observed = {{"base", oracle_json(*a.result)},
                {"perturbed", oracle_json(*b.result)},
                {"delta", delta},
                {"allowance", allowance}};
  } else {
    observed = {{"unavailable", a.result ? b.reason : a.reason}};
  }
  out.results = {{"general", bound_json(general)}, {"oracle", observed}};
  out.results["corollary"] = corollary ? bound_json(*corollary) : json{{"unavailable", corollary_reason}};
  const bool ok = general.satisfied && (!corollary || corollary->satisfied);
  out.exit_code = ok ? kExitOk : kExitNumerical;
  return out;
}

RunOutcome run_check_wick(const RunConfig& cfg) {
  const auto bath = as_modes(base_source(cfg));
  if (!bath) throw ConfigError("check-wick: [bath] must list discrete modes");
  RunOutcome out;
  json rows = json::array();
  bool ok = true;
  for (int m = 1; m <= cfg.check.m; ++m) {
    const WickReport w =
        wick_verification(m, *bath, cfg.truncation, cfg.dyson.t, cfg.check.samples, cfg.dyson.seed);
    const double tol = m % 2 == 0 ? cfg.check.wick_tolerance : 1e-10;
    const bool pass = w.max_deviation < tol;
    ok = ok && pass;
    rows.push_back({{"m", m},
                    {"samples", w.samples},
                    {"max_deviation", w.max_deviation},
                    {"deviation_kind", m % 2 == 0 ? "relative" : "absolute"},
                    {"tolerance", tol},
                    {"passed", pass}});
  }
  out.results = {{"orders", rows}, {"passed", ok}};
  out.exit_code = ok ? kExitOk : kExitNumerical;
  return out;
}

RunOutcome run_check_comb(const RunConfig& cfg) {
  const double si = cfg.check.si;
  const double sf = sf_of(cfg);
  const CorrelationFn corr = cfg.check.correlation == "constant"
                                 ? CorrelationFn::constant(cfg.check.constant)
                                 : make_correlation(base_source(cfg), cfg.dyson.t);
  const CombReport r = comb_identity_check(cfg.check.m, corr, si, sf, cfg.dyson);
  const double tol = r.deterministic ? 1e-10 + r.lhs_error + r.rhs_error
                                     : 3.0 * (r.lhs_error + r.rhs_error) + 1e-12;
  RunOutcome out;
  out.results = {{"m", r.m},
                 {"si", si},
                 {"sf", sf},
                 {"lhs", to_json(r.lhs)},
                 {"rhs", to_json(r.rhs)},
                 {"discrepancy", r.discrepancy},
                 {"lhs_error", r.lhs_error},
                 {"rhs_error", r.rhs_error},
                 {"deterministic", r.deterministic},
                 {"samples", r.samples},
                 {"tolerance", tol},
                 {"passed", r.discrepancy <= tol}};
  out.exit_code = r.discrepancy <= tol ? kExitOk : kExitNumerical;
  return out;
}

json side_json(const IdentitySide& s) {
  return {{"value", to_json(s.value)},
          {"stderr", s.std_error},
          {"tail_bound", s.tail_bound},
          {"fock_diagnostic", s.fock_diagnostic},
          {"orders", orders_json(s.per_order)}};
}

RunOutcome run_check_identity(const RunConfig& cfg) {
  const SystemSpec sys = cfg.system.build();
  const CorrelationSource base = base_source(cfg);
  const PerturbationSpec p{base, perturbed_source(cfg, base)};
  if (!as_modes(base)) throw ConfigError("check-identity: [bath] must be given by discrete modes");
  const double t = cfg.dyson.t;
  const int M = cfg.dyson.max_order;
  const IdentityReport r = identity_check(sys, p, t, M, cfg.dyson, cfg.truncation);

  RunOutcome out;
  out.results = {{"lhs", side_json(r.lhs)},
                 {"rhs", side_json(r.rhs)},
                 {"discrepancy", r.discrepancy},
                 {"budget", r.budget},
                 {"within_budget", r.within_budget}};
  bool ok = r.within_budget;
  if (cfg.check.first_order) {
    const FirstOrderReport f = first_order_check(sys, *as_modes(base), t, M, cfg.dyson,
                                                 cfg.truncation, cfg.check.eps_coarse, cfg.check.eps_fine);
    out.results["first_order"] = {{"epsilons", f.epsilons},
                                  {"ratios", f.ratios},
                                  {"first_order_rhs", to_json(f.first_order_rhs)},
                                  {"richardson", f.richardson},
                                  {"passed", f.passed}};
    ok = ok && f.passed;
  } else {
    out.results["first_order"] = nullptr;
  }

  std::ostringstream csv;
  csv << "side,m,re,im,stderr\n" << std::setprecision(17);
  for (const auto& [name, side] : {std::pair{"lhs", &r.lhs}, std::pair{"rhs", &r.rhs}})
    for (const auto& c : side->per_order)
      csv << name << ',' << c.m << ',' << c.value.real() << ',' << c.value.imag() << ',' << c.std_error
          << '\n';
  out.orders_csv = csv.str();
  out.exit_code = ok ? kExitOk : kExitNumerical;
  return out;
}

RunOutcome run_oracle(const RunConfig& cfg) {
  const auto bath = as_modes(base_source(cfg));
  if (!bath) throw ConfigError("oracle: [bath] must be given by discrete modes");
  const SystemSpec sys = cfg.system.build();
  RunOutcome out;
  const OracleResult r = exact_observable_converged(sys, *bath, cfg.truncation, cfg.dyson.t, 1e-8, cfg.dyson.tol);
  out.results = oracle_json(r);
  out.results["total_dim"] = static_cast<std::size_t>(sys.dim()) * cfg.truncation.bath_dim(bath->modes.size());
  return out;
}

RunOutcome run_convergence(const RunConfig& cfg) {
  const SystemSpec sys = cfg.system.build();
  const CorrelationSource src = base_source(cfg);
  const CorrelationFn corr = make_correlation(src, cfg.dyson.t);
  const DysonResult r = observable(sys, corr, cfg.dyson);
  const OracleAttempt exact = try_oracle(sys, src, cfg, cfg.dyson.t);
  const double norm_o = operator_norm(sys.o_s());
  const double norm_w = operator_norm(sys.w_s());

  RunOutcome out;
  json rows = json::array();
  cplx partial{0.0, 0.0};
  double var = 0.0;
  bool ok = true;
  std::optional<double> previous_gap;
  bool monotone = true;
  for (const auto& c : r.per_order) {
    partial += c.value;
    var += c.std_error * c.std_error;
    const double tail = truncation_tail_bound(norm_o, norm_w, r.sup_b, 2.0 * cfg.dyson.t, c.m);
    json row{{"max_order", c.m}, {"value", to_json(partial)}, {"stderr", std::sqrt(var)}, {"tail_bound", tail}};
    if (exact.result) {
      const double gap = std::abs(partial - cplx{exact.result->value, 0.0});
      const bool within = gap <= tail + 3.0 * std::sqrt(var) + exact.result->cutoff_change;
      ok = ok && within;
      if (previous_gap && gap > *previous_gap) monotone = false;
      previous_gap = gap;
      row["oracle_gap"] = gap;
      row["within_tail"] = within;
    }
    rows.push_back(row);
  }
  const double envelope = convergence_bound(sys, r.sup_b, 2.0 * cfg.dyson.t);
  const bool envelope_ok = r.absolute_sum() <= envelope + 3.0 * r.total_std_error();
  out.results = {{"partial_sums", rows},
                 {"absolute_sum", r.absolute_sum()},
                 {"convergence_envelope", envelope},
                 {"envelope_satisfied", envelope_ok},
                 {"sup_b", r.sup_b}};
  if (exact.result) {
    out.results["oracle"] = oracle_json(*exact.result);
    out.results["gap_monotone"] = monotone;
  } else {
    out.results["oracle"] = {{"unavailable", exact.reason}};
  }
  out.orders_csv = orders_csv(r);
  out.exit_code = ok && envelope_ok ? kExitOk : kExitNumerical;
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

}  // namespace

json versions() {
  return {{"oqs", OQS_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"compiler", __VERSION__},
          {"cxx_standard", __cplusplus}};
}

RunOutcome execute(const RunConfig& cfg) {
  const std::string& c = cfg.command;
  if (c == "observable") return run_observable(cfg);
  if (c == "bound") return run_bound(cfg);
  if (c == "check-wick") return run_check_wick(cfg);
  if (c == "check-comb") return run_check_comb(cfg);
  if (c == "check-identity") return run_check_identity(cfg);
  if (c == "oracle") return run_oracle(cfg);
  if (c == "convergence") return run_convergence(cfg);
  throw ConfigError("unknown command '" + c + "'");
}

int run(const RunConfig& cfg, std::ostream& log) {
  json summary{{"command", cfg.command},
               {"config", to_json(cfg)},
               {"seed", cfg.dyson.seed},
               {"versions", versions()}};
  RunOutcome out;
  try {
    out = execute(cfg);
  } catch (const ConfigError& e) {
    log << "oqs " << cfg.command << ": config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    out.exit_code = kExitNumerical;
    out.results = {{"error", e.what()}};
  } catch (const std::invalid_argument& e) {
    log << "oqs " << cfg.command << ": invalid input: " << e.what() << '\n';
    return kExitConfig;
  }
  summary["results"] = out.results;
  summary["exit_code"] = out.exit_code;
  summary["orders_csv"] = out.orders_csv ? json(cfg.out + "_orders.csv") : json(nullptr);
  summary["timestamp"] = utc_timestamp();

  const std::filesystem::path prefix(cfg.out);
  if (prefix.has_parent_path()) std::filesystem::create_directories(prefix.parent_path());
  {
    std::ofstream f(cfg.out + "_summary.json");
    if (!f) {
      log << "oqs " << cfg.command << ": cannot write " << cfg.out << "_summary.json\n";
      return kExitConfig;
    }
    f << summary.dump(2) << '\n';
  }
  if (out.orders_csv) {
    std::ofstream f(cfg.out + "_orders.csv");
    f << *out.orders_csv;
  }
  log << "oqs " << cfg.command << ": " << (out.exit_code == kExitOk ? "ok" : "numerical check failed")
      << " (summary: " << cfg.out << "_summary.json)\n";
  if (out.results.contains("error")) log << "  " << out.results["error"].get<std::string>() << '\n';
  return out.exit_code;
}

}  // namespace oqs::cli
