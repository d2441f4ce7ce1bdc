// model.cpp

#include "oqs/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace oqs {

namespace {

void require_square(const Operator& a, Eigen::Index d, const char* name) {
  if (a.rows() != d || a.cols() != d)
    throw std::invalid_argument(std::string(name) + " must be " + std::to_string(d) + "x" +
                                std::to_string(d));
  if (!a.allFinite()) throw std::invalid_argument(std::string(name) + " has non-finite entries");
}

}  // namespace

bool is_hermitian(const Operator& a, double tol) {
  return a.rows() == a.cols() && (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

SystemSpec::SystemSpec(Operator h_s, Operator w_s, Operator o_s, Operator rho_s,
                       const Tolerances& tol)
    : h_s_(std::move(h_s)), w_s_(std::move(w_s)), o_s_(std::move(o_s)), rho_s_(std::move(rho_s)) {
  const Eigen::Index d = h_s_.rows();
  if (d < 1) throw std::invalid_argument("system dimension must be positive");
  require_square(h_s_, d, "h_s");
  require_square(w_s_, d, "w_s");
  require_square(o_s_, d, "o_s");
  require_square(rho_s_, d, "rho_s");
  if (!is_hermitian(h_s_, tol.herm)) throw std::invalid_argument("h_s is not Hermitian");
  if (!is_hermitian(w_s_, tol.herm)) throw std::invalid_argument("w_s is not Hermitian");
  if (!is_hermitian(o_s_, tol.herm)) throw std::invalid_argument("o_s is not Hermitian");
  if (!is_hermitian(rho_s_, tol.herm)) throw std::invalid_argument("rho_s is not Hermitian");
  if (std::abs(rho_s_.trace() - cplx{1.0, 0.0}) > tol.trace)
    throw std::invalid_argument("rho_s must have unit trace");
  Eigen::SelfAdjointEigenSolver<Operator> es(rho_s_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol.psd)
    throw std::invalid_argument("rho_s is not positive semidefinite");
}

void BathSpec::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("beta must be strictly positive");
  for (const auto& m : modes) {
    if (!(m.omega > 0.0) || !std::isfinite(m.omega))
      throw std::invalid_argument("mode frequencies must be strictly positive");
    if (!std::isfinite(m.c)) throw std::invalid_argument("mode coupling must be finite");
  }
}

void DysonConfig::validate() const {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("t must be nonnegative");
  if (max_order < 0 || max_order % 2 != 0) throw std::invalid_argument("max_order must be even");
  if (samples_per_order < 1) throw std::invalid_argument("samples_per_order must be >= 1");
  if (gauss_points < 1) throw std::invalid_argument("gauss_points must be >= 1");
}

namespace pauli {
Operator identity() { return Operator::Identity(2, 2); }
Operator sigma_x() {
  Operator s(2, 2);
  s << 0, 1, 1, 0;
  return s;
}
Operator sigma_y() {
  Operator s(2, 2);
  s << cplx{0, 0}, cplx{0, -1}, cplx{0, 1}, cplx{0, 0};
  return s;
}
Operator sigma_z() {
  Operator s(2, 2);
  s << 1, 0, 0, -1;
  return s;
}
}  // namespace pauli

Operator spin_state(SpinState s) {
  Eigen::VectorXcd v(2);
  const double r = 1.0 / std::sqrt(2.0);
  switch (s) {
    case SpinState::up: v << 1, 0; break;
    case SpinState::down: v << 0, 1; break;
    case SpinState::plus: v << r, r; break;
    case SpinState::minus: v << r, -r; break;
  }
  return v * v.adjoint();
}

SystemSpec spin_boson_system(double epsilon, double delta, SpinObservable observable,
                             SpinState initial) {
  if (!std::isfinite(epsilon) || !std::isfinite(delta))
    throw std::invalid_argument("epsilon and delta must be finite");
  Operator o;
  switch (observable) {
    case SpinObservable::sigma_z: o = pauli::sigma_z(); break;
    case SpinObservable::sigma_x: o = pauli::sigma_x(); break;
    case SpinObservable::identity: o = pauli::identity(); break;
  }
  return SystemSpec(epsilon * pauli::sigma_z() + delta * pauli::sigma_x(), pauli::sigma_z(), o,
                    spin_state(initial));
}

double operator_norm(const Operator& a) {
  if (!a.allFinite()) throw std::invalid_argument("operator_norm: non-finite entries");
  if (a.size() == 0) return 0.0;
  if (a.rows() <= 2 && a.cols() <= 2) {
    // sigma_max^2 = (|a|_F^2 + sqrt(|a|_F^4 - 4 |det a|^2)) / 2 for 2x2
    Operator b = Operator::Zero(2, 2);
    b.topLeftCorner(a.rows(), a.cols()) = a;
    const double f2 = b.squaredNorm();
    const double det = std::abs(b(0, 0) * b(1, 1) - b(0, 1) * b(1, 0));
    const double disc = std::max(0.0, f2 * f2 - 4.0 * det * det);
    return std::sqrt(0.5 * (f2 + std::sqrt(disc)));
  }

  const Operator g = a.adjoint() * a;
  const Eigen::Index n = g.cols();
  // Fixed, generic start vector so no eigendirection is structurally excluded.
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v(i) = cplx{1.0 + 0.37 * std::sin(1.3 * double(i) + 0.2), 0.11 * std::cos(2.1 * double(i))};
  v.normalize();

  double lambda = 0.0;
  for (int it = 0; it < 100000; ++it) {
    Eigen::VectorXcd w = g * v;
    const double next = std::real(v.dot(w));
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
    if (it > 0 && std::abs(next - lambda) <= 1e-12 * std::abs(next)) {
      lambda = std::max(next, std::real(v.dot(g * v)));
      return std::sqrt(std::max(lambda, 0.0));
    }
    lambda = next;
  }
  // Near-degenerate top of the spectrum: fall back to a direct eigensolve.
  Eigen::SelfAdjointEigenSolver<Operator> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
}

}  // namespace oqs
