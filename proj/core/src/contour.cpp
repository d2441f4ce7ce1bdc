// contour.cpp

#include "oqs/contour.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace oqs {

TimeSequence::TimeSequence(std::vector<double> times, double pivot)
    : times_(std::move(times)), pivot_(pivot) {
  if (!(pivot_ > 0.0) || !std::isfinite(pivot_))
    throw std::invalid_argument("TimeSequence: pivot must be positive");
  double prev = 0.0;
  for (std::size_t i = 0; i < times_.size(); ++i) {
    const double s = times_[i];
    if (!std::isfinite(s) || !(s > prev) || !(s < 2.0 * pivot_))
      throw std::invalid_argument("TimeSequence: times must satisfy 0 < s_1 < ... < s_m < 2t (index " +
                                  std::to_string(i) + ")");
    prev = s;
  }
}

std::size_t count_forward(std::span<const double> times, double pivot) {
  std::size_t n = 0;
  for (double s : times)
    if (s < pivot) ++n;
  return n;
}

int contour_sign(std::span<const double> times, double pivot) {
  return count_forward(times, pivot) % 2 == 0 ? 1 : -1;
}

cplx i_pow(std::size_t m) {
  switch (m % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

ContourSystem::ContourSystem(SystemSpec sys, double pivot) : sys_(std::move(sys)), t_(pivot) {
  if (!(t_ >= 0.0) || !std::isfinite(t_)) throw std::invalid_argument("pivot must be >= 0");
  Eigen::SelfAdjointEigenSolver<Operator> es(sys_.h_s());
  v_ = es.eigenvectors();
  energies_ = es.eigenvalues();
  w_eig_ = v_.adjoint() * sys_.w_s() * v_;
  o_eig_ = v_.adjoint() * sys_.o_s() * v_;
  rho_eig_ = v_.adjoint() * sys_.rho_s() * v_;
}

// r <- G(sf, si) r, all in the eigenbasis of H_s.
void ContourSystem::apply_propagator(double sf, double si, Operator& r) const {
  const Eigen::Index d = energies_.size();
  auto scale_rows = [&](double tau) {
    // e^{-i tau H}
    for (Eigen::Index k = 0; k < d; ++k) r.row(k) *= std::polar(1.0, -tau * energies_(k));
  };
  if (sf < t_) {
    scale_rows(sf - si);
  } else if (si >= t_) {
    scale_rows(si - sf);
  } else {
    scale_rows(t_ - si);
    r = o_eig_ * r;
    scale_rows(t_ - sf);
  }
}

Operator ContourSystem::propagator(double sf, double si) const {
  if (si > sf) throw std::invalid_argument("propagator: requires si <= sf");
  Operator r = Operator::Identity(energies_.size(), energies_.size());
  apply_propagator(sf, si, r);
  return v_ * r * v_.adjoint();
}

void ContourSystem::check_chain(double sf, std::span<const double> times, double si) const {
  double prev = si;
  for (double s : times) {
    if (!(s > prev)) throw std::invalid_argument("u_s: contour times must be strictly increasing above si");
    prev = s;
  }
  if (!times.empty() && !(sf > prev)) throw std::invalid_argument("u_s: requires s_m < sf");
  if (times.empty() && si > sf) throw std::invalid_argument("u_s: requires si <= sf");
}

Operator ContourSystem::u_s(double sf, std::span<const double> times, double si) const {
  check_chain(sf, times, si);
  const Eigen::Index d = energies_.size();
  Operator r = Operator::Identity(d, d);
  double prev = si;
  for (double s : times) {
    apply_propagator(s, prev, r);
    r = w_eig_ * r;
    prev = s;
  }
  apply_propagator(sf, prev, r);
  return v_ * r * v_.adjoint();
}

cplx ContourSystem::trace_u_s(double sf, std::span<const double> times, double si) const {
  check_chain(sf, times, si);
  // tr(rho U) with U accumulated on top of rho: r = U rho, tr(r) = tr(rho U).
  Operator r = rho_eig_;
  double prev = si;
  for (double s : times) {
    apply_propagator(s, prev, r);
    r = w_eig_ * r;
    prev = s;
  }
  apply_propagator(sf, prev, r);
  return r.trace();
}

cplx ContourSystem::dyson_weight(std::span<const double> times) const {
  // At t = 0 the contour degenerates to a point; the zeroth term keeps its t -> 0+ limit.
  if (t_ == 0.0 && times.empty()) return (rho_eig_ * o_eig_).trace();
  const double sign = contour_sign(times, t_);
  return sign * i_pow(times.size()) * trace_u_s(2.0 * t_, times, 0.0);
}

Operator system_propagator(double sf, double si, const SystemSpec& sys, double pivot) {
  return ContourSystem(sys, pivot).propagator(sf, si);
}

Operator u_s(double sf, const TimeSequence& s, double si, const SystemSpec& sys) {
  return ContourSystem(sys, s.pivot()).u_s(sf, s.times(), si);
}

cplx dyson_weight(const TimeSequence& s, const SystemSpec& sys) {
  return ContourSystem(sys, s.pivot()).dyson_weight(s.times());
}

}  // namespace oqs
