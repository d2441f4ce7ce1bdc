// model.hpp — domain types shared across the library: system, bath, run configuration

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oqs {

using cplx = std::complex<double>;
using Operator = Eigen::MatrixXcd;

/// Raised when a numerical diagnostic (truncation, convergence, tie) rules a result invalid.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double herm{1e-10};
  double psd{1e-10};
  double trace{1e-10};
  double imag{1e-8};
};

/// Finite-dimensional system part: H_s, W_s, O_s and the initial state rho_s.
/// Validated on construction and immutable afterwards.
class SystemSpec {
 public:
  SystemSpec(Operator h_s, Operator w_s, Operator o_s, Operator rho_s,
             const Tolerances& tol = {});

  [[nodiscard]] Eigen::Index dim() const { return h_s_.rows(); }
  [[nodiscard]] const Operator& h_s() const { return h_s_; }
  [[nodiscard]] const Operator& w_s() const { return w_s_; }
  [[nodiscard]] const Operator& o_s() const { return o_s_; }
  [[nodiscard]] const Operator& rho_s() const { return rho_s_; }

 private:
  Operator h_s_;
  Operator w_s_;
  Operator o_s_;
  Operator rho_s_;
};

struct Mode {
  double omega{1.0};
  double c{0.0};
};

/// Discrete bosonic bath: H_b = sum omega_l a_l^+ a_l, W_b = sum c_l (a_l + a_l^+)/sqrt(2 omega_l).
struct BathSpec {
  std::vector<Mode> modes;
  double beta{1.0};

  void validate() const;
};

enum class Integrator { gauss, monte_carlo };

struct DysonConfig {
  double t{1.0};
  int max_order{8};
  Integrator integrator{Integrator::gauss};
  std::uint64_t samples_per_order{200000};
  int gauss_points{24};
  std::uint64_t seed{20240501};
  unsigned workers{0};  // 0: hardware concurrency
  Tolerances tol{};

  void validate() const;
};

enum class SpinObservable { sigma_z, sigma_x, identity };
enum class SpinState { up, down, plus, minus };

namespace pauli {
Operator identity();
Operator sigma_x();
Operator sigma_y();
Operator sigma_z();
}  // namespace pauli

/// Density matrix of a named single-spin state; up is |1>, the +1 eigenvector of sigma_z.
Operator spin_state(SpinState s);

/// H_s = eps sigma_z + delta sigma_x, W_s = sigma_z.
SystemSpec spin_boson_system(double epsilon, double delta, SpinObservable observable,
                             SpinState initial = SpinState::up);

/// Spectral norm. Closed form for d <= 2, power iteration on a^+ a otherwise.
double operator_norm(const Operator& a);

bool is_hermitian(const Operator& a, double tol);

/// Midpoint discretization of a continuum spectral density J(omega) on the cells
/// [edges[i], edges[i+1]]: c_l^2 = 2 omega_l J(omega_l) d_omega / pi.
template <typename SpectralDensity>
BathSpec discretize_spectral_density(SpectralDensity&& J, const std::vector<double>& edges,
                                     double beta) {
  if (edges.size() < 2) throw std::invalid_argument("need at least two frequency edges");
  BathSpec bath;
  bath.beta = beta;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double lo = edges[i];
    const double hi = edges[i + 1];
    if (!(hi > lo) || !(lo >= 0.0))
      throw std::invalid_argument("frequency edges must be nonnegative and strictly increasing");
    const double w = 0.5 * (lo + hi);
    const double j = J(w);
    if (!(j >= 0.0)) throw std::invalid_argument("spectral density must be nonnegative");
    bath.modes.push_back({w, std::sqrt(2.0 * w * j * (hi - lo) / 3.14159265358979323846)});
  }
  bath.validate();
  return bath;
}

}  // namespace oqs
