// test_support.hpp — random operators and a reference matrix exponential for the unit tests

#pragma once

#include <complex>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "oqs/model.hpp"

namespace oqs::test {

inline Operator random_matrix(std::mt19937_64& gen, Eigen::Index d) {
  std::normal_distribution<double> n(0.0, 1.0);
  Operator a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = cplx{n(gen), n(gen)};
  return a;
}

inline Operator random_hermitian(std::mt19937_64& gen, Eigen::Index d, double scale = 1.0) {
  const Operator a = random_matrix(gen, d);
  return scale * 0.5 * (a + a.adjoint());
}

inline Operator random_unitary(std::mt19937_64& gen, Eigen::Index d) {
  Eigen::HouseholderQR<Operator> qr(random_matrix(gen, d));
  return qr.householderQ() * Operator::Identity(d, d);
}

inline Operator random_density(std::mt19937_64& gen, Eigen::Index d) {
  const Operator a = random_matrix(gen, d);
  Operator rho = a * a.adjoint();
  return rho / rho.trace().real();
}

/// e^{-i tau H} by Pade scaling and squaring, independent of any eigendecomposition.
inline Operator expm_minus_i(const Operator& h, double tau) {
  const Operator x = (cplx{0.0, -tau} * h).eval();
  return x.exp();
}

/// Largest singular value by SVD.
inline double svd_norm(const Operator& a) {
  Eigen::JacobiSVD<Operator> svd(a);
  return svd.singularValues()(0);
}

}  // namespace oqs::test
