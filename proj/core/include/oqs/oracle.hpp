// oracle.hpp — brute-force ground truth on a Fock-truncated bath
//
// Each mode keeps occupancies 0..n_max. The thermal state is renormalized on the truncated
// space. The discarded mass and the population reaching the cutoff are reported as diagnostics.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "oqs/contour.hpp"
#include "oqs/model.hpp"

namespace oqs {

struct FockTruncation {
  int n_max{20};
  std::size_t memory_ceiling{4096};  // cap on total_dim
  double tail_threshold{1e-8};       // accepted thermal tail mass
  double edge_threshold{1e-8};       // accepted population at the cutoff after evolution

  /// n_max = 20 for one mode, 8 for two, smaller beyond.
  static FockTruncation defaults_for(std::size_t n_modes);

  [[nodiscard]] std::size_t bath_dim(std::size_t n_modes) const;
};

struct TruncationDiagnostics {
  double thermal_tail_mass{0.0};  // 1 - tr(truncated thermal weights) before renormalization
  double edge_population{0.0};    // weight on states with some n_l = n_max
};

struct BathOperators {
  Operator h_b;   // diagonal, sum omega_l n_l
  Operator w_b;   // sum c_l (a_l + a_l^+) / sqrt(2 omega_l)
  Operator rho_b; // e^{-beta H_b} / Z_b on the truncated space
  std::vector<Operator> annihilators;
  Eigen::VectorXd energies;  // diagonal of h_b
  std::vector<bool> at_edge; // basis state has some n_l = n_max
  double thermal_tail_mass{0.0};
};

BathOperators build_bath_operators(const BathSpec& bath, const FockTruncation& trunc);

/// L_b(s) = tr_b(rho_b G_b(2t, s_m) W_b ... W_b G_b(s_1, 0)) by explicit products.
cplx direct_bath_trace(std::span<const double> times, const BathOperators& ops, double pivot);
cplx direct_bath_trace(const TimeSequence& s, const BathSpec& bath, const FockTruncation& trunc);

struct WickReport {
  int m{0};
  int samples{0};
  double max_deviation{0.0};  // relative for even m, absolute |L_b| for odd m
};

/// Compares direct_bath_trace with the Wick sum of the spin-boson correlation over random
/// contour times.
WickReport wick_verification(int m, const BathSpec& bath, const FockTruncation& trunc,
                             double pivot, int samples, std::uint64_t seed = 7);

struct OracleResult {
  double value{0.0};
  double imag{0.0};
  TruncationDiagnostics diagnostics;
  double cutoff_change{0.0};  // |value(n_max + 4) - value(n_max)| when checked
};

/// System plus truncated bath, H = H_s x I + I x H_b + W_s x W_b, diagonalized once.
class CompositeModel {
 public:
  CompositeModel(SystemSpec sys, BathSpec bath, FockTruncation trunc);

  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(h_.rows()); }
  [[nodiscard]] const Operator& hamiltonian() const { return h_; }
  [[nodiscard]] const Operator& initial_state() const { return rho0_; }
  [[nodiscard]] const BathOperators& bath_operators() const { return bath_ops_; }
  [[nodiscard]] const SystemSpec& system() const { return sys_; }

  /// e^{-i t H} rho(0) e^{i t H}
  [[nodiscard]] Operator evolved_state(double t) const;
  [[nodiscard]] OracleResult observable(double t, const Tolerances& tol = {}) const;
  [[nodiscard]] TruncationDiagnostics diagnostics(double t) const;

  /// Full propagator G(sf, si) with O = O_s x I inserted across the pivot. Requires si <= sf.
  [[nodiscard]] Operator full_propagator(double sf, double si, double pivot) const;
  /// G(sf, s_m) W G(s_m, s_{m-1}) ... W G(s_1, si) with W = W_s x I.
  [[nodiscard]] Operator u_ring(double sf, std::span<const double> times, double si,
                                double pivot) const;
  /// tr(rho(0) U_ring(2t, s, 0)), evaluated in the eigenbasis of H.
  [[nodiscard]] cplx trace_u_ring(std::span<const double> times, double pivot) const;

 private:
  void apply_propagator(double sf, double si, double pivot, Operator& r) const;

  SystemSpec sys_;
  BathSpec bath_;
  FockTruncation trunc_;
  BathOperators bath_ops_;
  Operator h_;
  Operator o_full_;
  Operator w_ring_;
  Operator rho0_;
  Operator v_;
  Eigen::VectorXd energies_;
  Operator o_eig_;
  Operator w_ring_eig_;
  Operator rho0_eig_;
  std::vector<bool> at_edge_;
};

/// tr(O_s x I rho(t)); throws NumericalError when truncation diagnostics exceed thresholds or the
/// imaginary part exceeds tol.imag.
OracleResult exact_observable(const SystemSpec& sys, const BathSpec& bath,
                              const FockTruncation& trunc, double t, const Tolerances& tol = {});

/// exact_observable plus a rerun at n_max + 4; rejects when the two differ by more than
/// `cutoff_tol`.
OracleResult exact_observable_converged(const SystemSpec& sys, const BathSpec& bath,
                                        const FockTruncation& trunc, double t,
                                        double cutoff_tol = 1e-8, const Tolerances& tol = {});

}  // namespace oqs
