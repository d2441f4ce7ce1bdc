// oracle.cpp

#include "oqs/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "oqs/bathcorr.hpp"
#include "oqs/pairings.hpp"

namespace oqs {

namespace {

Operator kron(const Operator& a, const Operator& b) {
  Operator k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

// e^{-i tau E} applied to the rows of r, E diagonal
void scale_rows(Operator& r, const Eigen::VectorXd& energies, double tau) {
  for (Eigen::Index k = 0; k < energies.size(); ++k) r.row(k) *= std::polar(1.0, -tau * energies(k));
}

}  // namespace

FockTruncation FockTruncation::defaults_for(std::size_t n_modes) {
  FockTruncation t;
  if (n_modes <= 1) t.n_max = 20;
  else if (n_modes == 2) t.n_max = 8;
  else if (n_modes == 3) t.n_max = 4;
  else t.n_max = 2;
  return t;
}

std::size_t FockTruncation::bath_dim(std::size_t n_modes) const {
  std::size_t d = 1;
  for (std::size_t l = 0; l < n_modes; ++l) {
    d *= static_cast<std::size_t>(n_max + 1);
    if (d > memory_ceiling) return d;
  }
  return d;
}

BathOperators build_bath_operators(const BathSpec& bath, const FockTruncation& trunc) {
  bath.validate();
  if (trunc.n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  const std::size_t n_modes = bath.modes.size();
  const std::size_t dim = trunc.bath_dim(n_modes);
  if (dim > trunc.memory_ceiling)
    throw std::invalid_argument("bath dimension " + std::to_string(dim) + " exceeds memory ceiling " +
                                std::to_string(trunc.memory_ceiling));
  const auto d = static_cast<Eigen::Index>(dim);
  const Eigen::Index local = trunc.n_max + 1;

  Operator a1 = Operator::Zero(local, local);
  for (Eigen::Index n = 1; n < local; ++n) a1(n - 1, n) = std::sqrt(static_cast<double>(n));

  BathOperators ops;
  ops.h_b = Operator::Zero(d, d);
  ops.w_b = Operator::Zero(d, d);
  for (std::size_t l = 0; l < n_modes; ++l) {
    // mode 0 is the most significant tensor factor
    Operator a = Operator::Identity(1, 1);
    for (std::size_t k = 0; k < n_modes; ++k)
      a = kron(a, k == l ? a1 : Operator::Identity(local, local));
    const auto& mode = bath.modes[l];
    ops.h_b += mode.omega * (a.adjoint() * a);
    ops.w_b += (mode.c / std::sqrt(2.0 * mode.omega)) * (a + a.adjoint());
    ops.annihilators.push_back(std::move(a));
  }
  ops.energies = ops.h_b.diagonal().real();

  ops.at_edge.assign(dim, false);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    std::size_t rest = idx;
    for (std::size_t l = 0; l < n_modes; ++l) {
      if (rest % static_cast<std::size_t>(local) == static_cast<std::size_t>(trunc.n_max))
        ops.at_edge[idx] = true;
      rest /= static_cast<std::size_t>(local);
    }
  }

  // Thermal weights relative to the untruncated partition function prod_l 1/(1 - e^{-beta w_l}).
  double kept = 1.0;
  for (const auto& mode : bath.modes)
    kept *= -std::expm1(-bath.beta * mode.omega * (trunc.n_max + 1));
  ops.thermal_tail_mass = n_modes == 0 ? 0.0 : 1.0 - kept;

  const double e0 = ops.energies.minCoeff();
  Eigen::VectorXd w = (-bath.beta * (ops.energies.array() - e0)).exp();
  ops.rho_b = Operator::Zero(d, d);
  ops.rho_b.diagonal() = (w / w.sum()).cast<cplx>();
  return ops;
}

cplx direct_bath_trace(std::span<const double> times, const BathOperators& ops, double pivot) {
  // G_b(sf, si) is diagonal: e^{-i tau H_b} with tau from the case table
  auto tau_of = [&](double sf, double si) {
    if (sf < pivot) return sf - si;
    if (si >= pivot) return si - sf;
    return 2.0 * pivot - si - sf;
  };
  double prev = 0.0;
  for (double s : times) {
    if (!(s > prev) || !(s < 2.0 * pivot))
      throw std::invalid_argument("direct_bath_trace: times must be strictly increasing in (0, 2t)");
    prev = s;
  }
  Operator r = ops.rho_b;
  prev = 0.0;
  for (double s : times) {
    scale_rows(r, ops.energies, tau_of(s, prev));
    r = ops.w_b * r;
    prev = s;
  }
  scale_rows(r, ops.energies, tau_of(2.0 * pivot, prev));
  return r.trace();
}

cplx direct_bath_trace(const TimeSequence& s, const BathSpec& bath, const FockTruncation& trunc) {
  return direct_bath_trace(s.times(), build_bath_operators(bath, trunc), s.pivot());
}

WickReport wick_verification(int m, const BathSpec& bath, const FockTruncation& trunc,
                             double pivot, int samples, std::uint64_t seed) {
  if (m < 0) throw std::invalid_argument("wick_verification: m must be >= 0");
  const BathOperators ops = build_bath_operators(bath, trunc);
  const CorrelationFn corr = CorrelationFn::discrete_modes(bath, pivot);
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 2.0 * pivot);
  WickReport rep;
  rep.m = m;
  rep.samples = samples;
  std::vector<double> s(static_cast<std::size_t>(m));
  for (int i = 0; i < samples; ++i) {
    bool ok = false;
    while (!ok) {
      for (double& x : s) x = unif(gen);
      std::sort(s.begin(), s.end());
      ok = s.empty() || s.front() > 0.0;
      for (std::size_t k = 1; ok && k < s.size(); ++k) ok = s[k] > s[k - 1];
    }
    const cplx direct = direct_bath_trace(s, ops, pivot);
    if (m % 2 != 0) {
      rep.max_deviation = std::max(rep.max_deviation, std::abs(direct));
    } else {
      const cplx wick = wick_sum(std::span<const double>(s), corr);
      const double scale = std::max(std::abs(wick), 1e-300);
      rep.max_deviation = std::max(rep.max_deviation, std::abs(direct - wick) / scale);
    }
  }
  return rep;
}

CompositeModel::CompositeModel(SystemSpec sys, BathSpec bath, FockTruncation trunc)
    : sys_(std::move(sys)), bath_(std::move(bath)), trunc_(trunc) {
  const std::size_t bdim = trunc_.bath_dim(bath_.modes.size());
  const std::size_t total = bdim * static_cast<std::size_t>(sys_.dim());
  if (bdim > trunc_.memory_ceiling || total > trunc_.memory_ceiling)
    throw std::invalid_argument("total dimension " + std::to_string(total) +
                                " exceeds memory ceiling " + std::to_string(trunc_.memory_ceiling));
  bath_ops_ = build_bath_operators(bath_, trunc_);
  const auto db = static_cast<Eigen::Index>(bdim);
  const Operator id_b = Operator::Identity(db, db);
  const Operator id_s = Operator::Identity(sys_.dim(), sys_.dim());
  h_ = kron(sys_.h_s(), id_b) + kron(id_s, bath_ops_.h_b) + kron(sys_.w_s(), bath_ops_.w_b);
  o_full_ = kron(sys_.o_s(), id_b);
  w_ring_ = kron(sys_.w_s(), id_b);
  rho0_ = kron(sys_.rho_s(), bath_ops_.rho_b);

  Eigen::SelfAdjointEigenSolver<Operator> es(h_);
  v_ = es.eigenvectors();
  energies_ = es.eigenvalues();
  o_eig_ = v_.adjoint() * o_full_ * v_;
  w_ring_eig_ = v_.adjoint() * w_ring_ * v_;
  rho0_eig_ = v_.adjoint() * rho0_ * v_;

  at_edge_.reserve(total);
  for (Eigen::Index i = 0; i < sys_.dim(); ++i)
    at_edge_.insert(at_edge_.end(), bath_ops_.at_edge.begin(), bath_ops_.at_edge.end());
}

Operator CompositeModel::evolved_state(double t) const {
  Operator r = rho0_eig_;
  scale_rows(r, energies_, t);
  // right factor e^{i t H}: scale columns
  for (Eigen::Index k = 0; k < energies_.size(); ++k) r.col(k) *= std::polar(1.0, t * energies_(k));
  return v_ * r * v_.adjoint();
}

TruncationDiagnostics CompositeModel::diagnostics(double t) const {
  TruncationDiagnostics d;
  d.thermal_tail_mass = bath_ops_.thermal_tail_mass;
  const Operator rho_t = evolved_state(t);
  for (std::size_t i = 0; i < at_edge_.size(); ++i)
    if (at_edge_[i]) d.edge_population += std::real(rho_t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
  return d;
}

OracleResult CompositeModel::observable(double t, const Tolerances& tol) const {
  const Operator rho_t = evolved_state(t);
  const cplx v = (o_full_ * rho_t).trace();
  OracleResult r;
  r.value = v.real();
  r.imag = v.imag();
  r.diagnostics.thermal_tail_mass = bath_ops_.thermal_tail_mass;
  for (std::size_t i = 0; i < at_edge_.size(); ++i)
    if (at_edge_[i])
      r.diagnostics.edge_population +=
          std::real(rho_t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
  if (std::abs(r.imag) > tol.imag)
    throw NumericalError("exact_observable: imaginary part " + std::to_string(r.imag) +
                         " exceeds tolerance");
  return r;
}

void CompositeModel::apply_propagator(double sf, double si, double pivot, Operator& r) const {
  if (sf < pivot) {
    scale_rows(r, energies_, sf - si);
  } else if (si >= pivot) {
    scale_rows(r, energies_, si - sf);
  } else {
    scale_rows(r, energies_, pivot - si);
    r = o_eig_ * r;
    scale_rows(r, energies_, pivot - sf);
  }
}

Operator CompositeModel::full_propagator(double sf, double si, double pivot) const {
  if (si > sf) throw std::invalid_argument("full_propagator: requires si <= sf");
  Operator r = Operator::Identity(energies_.size(), energies_.size());
  apply_propagator(sf, si, pivot, r);
  return v_ * r * v_.adjoint();
}

Operator CompositeModel::u_ring(double sf, std::span<const double> times, double si,
                                double pivot) const {
  double prev = si;
  for (double s : times) {
    if (!(s > prev)) throw std::invalid_argument("u_ring: contour ordering violated");
    prev = s;
  }
  if (sf < prev) throw std::invalid_argument("u_ring: contour ordering violated");
  Operator r = Operator::Identity(energies_.size(), energies_.size());
  prev = si;
  for (double s : times) {
    apply_propagator(s, prev, pivot, r);
    r = w_ring_eig_ * r;
    prev = s;
  }
  apply_propagator(sf, prev, pivot, r);
  return v_ * r * v_.adjoint();
}

cplx CompositeModel::trace_u_ring(std::span<const double> times, double pivot) const {
  Operator r = rho0_eig_;
  double prev = 0.0;
  for (double s : times) {
    if (!(s > prev)) throw std::invalid_argument("trace_u_ring: contour ordering violated");
    apply_propagator(s, prev, pivot, r);
    r = w_ring_eig_ * r;
    prev = s;
  }
  apply_propagator(2.0 * pivot, prev, pivot, r);
  return r.trace();
}

namespace {

std::string scientific(double x) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(3) << x;
  return s.str();
}

void check_diagnostics(const OracleResult& r, const FockTruncation& trunc) {
  if (r.diagnostics.thermal_tail_mass >= trunc.tail_threshold)
    throw NumericalError("oracle: thermal tail mass " + scientific(r.diagnostics.thermal_tail_mass) +
                         " exceeds threshold; raise n_max");
  if (r.diagnostics.edge_population >= trunc.edge_threshold)
    throw NumericalError("oracle: population at the Fock cutoff " +
                         scientific(r.diagnostics.edge_population) +
                         " exceeds threshold; raise n_max");
}

}  // namespace

OracleResult exact_observable(const SystemSpec& sys, const BathSpec& bath,
                              const FockTruncation& trunc, double t, const Tolerances& tol) {
  const CompositeModel model(sys, bath, trunc);
  OracleResult r = model.observable(t, tol);
  check_diagnostics(r, trunc);
  return r;
}

OracleResult exact_observable_converged(const SystemSpec& sys, const BathSpec& bath,
                                        const FockTruncation& trunc, double t, double cutoff_tol,
                                        const Tolerances& tol) {
  OracleResult r = exact_observable(sys, bath, trunc, t, tol);
  FockTruncation wider = trunc;
  wider.n_max += 4;
  const CompositeModel model(sys, bath, wider);
  const OracleResult w = model.observable(t, tol);
  r.cutoff_change = std::abs(w.value - r.value);
  if (r.cutoff_change >= cutoff_tol)
    throw NumericalError("oracle: result changes by " + std::to_string(r.cutoff_change) +
                         " when n_max grows by 4; truncation not converged");
  return r;
}

}  // namespace oqs
