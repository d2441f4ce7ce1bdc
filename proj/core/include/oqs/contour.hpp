// contour.hpp — unfolded Keldysh contour: branch bookkeeping and the system-side propagator chain
//
// The contour is parameterized by s in [0, 2t]. Points with s < t sit on the forward branch,
// points with s >= t on the backward branch (the fold point itself counts as backward).
// The observable O_s is inserted in any propagator whose interval crosses the fold.

#pragma once

#include <span>
#include <vector>

#include "oqs/model.hpp"

namespace oqs {

/// Strictly increasing contour times 0 < s_1 < ... < s_m < 2t.
class TimeSequence {
 public:
  TimeSequence(std::vector<double> times, double pivot);

  [[nodiscard]] std::span<const double> times() const { return times_; }
  [[nodiscard]] double pivot() const { return pivot_; }
  [[nodiscard]] std::size_t size() const { return times_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return times_[i]; }

 private:
  std::vector<double> times_;
  double pivot_;
};

/// Number of times on the forward branch, #{s < t}.
std::size_t count_forward(std::span<const double> times, double pivot);
inline std::size_t count_forward(const TimeSequence& s) {
  return count_forward(s.times(), s.pivot());
}
/// (-1)^{#{s < t}}
int contour_sign(std::span<const double> times, double pivot);

/// System-side contour algebra for one SystemSpec and pivot. H_s is diagonalized once and
/// every propagator is evaluated in its eigenbasis, so repeated calls are cheap.
/// Immutable after construction; safe for concurrent readers.
class ContourSystem {
 public:
  ContourSystem(SystemSpec sys, double pivot);

  [[nodiscard]] const SystemSpec& system() const { return sys_; }
  [[nodiscard]] double pivot() const { return t_; }

  /// G_s(sf, si). Requires si <= sf.
  [[nodiscard]] Operator propagator(double sf, double si) const;

  /// U_s(sf, s, si) = G_s(sf, s_m) W_s ... W_s G_s(s_1, si). Requires si < s_1 and s_m < sf.
  [[nodiscard]] Operator u_s(double sf, std::span<const double> times, double si) const;

  /// tr(rho_s U_s(sf, s, si)), evaluated in the eigenbasis without leaving it.
  [[nodiscard]] cplx trace_u_s(double sf, std::span<const double> times, double si) const;

  /// (-1)^{#{s<t}} i^m tr(rho_s U_s(2t, s, 0)).
  [[nodiscard]] cplx dyson_weight(std::span<const double> times) const;
  [[nodiscard]] cplx dyson_weight(const TimeSequence& s) const { return dyson_weight(s.times()); }

 private:
  void apply_propagator(double sf, double si, Operator& r) const;
  void check_chain(double sf, std::span<const double> times, double si) const;

  SystemSpec sys_;
  double t_;
  Operator v_;               // eigenvectors of H_s (columns)
  Eigen::VectorXd energies_;  // eigenvalues of H_s
  Operator w_eig_;
  Operator o_eig_;
  Operator rho_eig_;
};

Operator system_propagator(double sf, double si, const SystemSpec& sys, double pivot);
Operator u_s(double sf, const TimeSequence& s, double si, const SystemSpec& sys);
cplx dyson_weight(const TimeSequence& s, const SystemSpec& sys);

/// i^m for integer m >= 0.
cplx i_pow(std::size_t m);

}  // namespace oqs
