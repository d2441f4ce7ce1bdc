#include <gtest/gtest.h>

#include <cmath>

#include "oqs/contour.hpp"
#include "test_support.hpp"

using namespace oqs;

namespace {

SystemSpec random_system(std::mt19937_64& gen, int d) {
  return SystemSpec(test::random_hermitian(gen, d), test::random_hermitian(gen, d),
                    test::random_hermitian(gen, d), test::random_density(gen, d));
}

// Case table written out with the Pade exponential.
Operator reference_propagator(double sf, double si, const SystemSpec& sys, double t) {
  if (sf < t) return test::expm_minus_i(sys.h_s(), sf - si);
  if (si >= t) return test::expm_minus_i(sys.h_s(), si - sf);
  return test::expm_minus_i(sys.h_s(), t - sf) * sys.o_s() * test::expm_minus_i(sys.h_s(), t - si);
}

Operator reference_chain(double sf, const std::vector<double>& s, double si, const SystemSpec& sys,
                         double t) {
  Operator u = Operator::Identity(sys.dim(), sys.dim());
  double prev = si;
  for (double x : s) {
    u = sys.w_s() * reference_propagator(x, prev, sys, t) * u;
    prev = x;
  }
  return reference_propagator(sf, prev, sys, t) * u;
}

std::vector<double> random_times(std::mt19937_64& gen, int m, double t) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * t);
  std::vector<double> s(static_cast<std::size_t>(m));
  for (double& x : s) x = u(gen);
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

TEST(TimeSequence, Validation) {
  EXPECT_NO_THROW(TimeSequence({0.3, 0.7}, 1.0));
  EXPECT_NO_THROW(TimeSequence({}, 1.0));
  EXPECT_THROW(TimeSequence({0.7, 0.3}, 1.0), std::invalid_argument);
  EXPECT_THROW(TimeSequence({0.3, 0.3}, 1.0), std::invalid_argument);
  EXPECT_THROW(TimeSequence({0.0, 0.3}, 1.0), std::invalid_argument);
  EXPECT_THROW(TimeSequence({0.3, 2.0}, 1.0), std::invalid_argument);
  EXPECT_THROW(TimeSequence({0.3}, 0.0), std::invalid_argument);
}

TEST(CountForward, BranchExamples) {
  const TimeSequence both_forward({0.3, 0.7}, 1.0);
  EXPECT_EQ(count_forward(both_forward), 2u);
  EXPECT_EQ(contour_sign(both_forward.times(), 1.0), 1);
  const TimeSequence split({0.5, 1.5}, 1.0);
  EXPECT_EQ(count_forward(split), 1u);
  EXPECT_EQ(contour_sign(split.times(), 1.0), -1);
  const TimeSequence empty({}, 1.0);
  EXPECT_EQ(count_forward(empty), 0u);
  EXPECT_EQ(contour_sign(empty.times(), 1.0), 1);
  // the fold point belongs to the backward branch
  const TimeSequence at_pivot({0.5, 1.0}, 1.0);
  EXPECT_EQ(count_forward(at_pivot), 1u);
}

TEST(IPow, Cycle) {
  EXPECT_EQ(i_pow(0), cplx(1, 0));
  EXPECT_EQ(i_pow(1), cplx(0, 1));
  EXPECT_EQ(i_pow(2), cplx(-1, 0));
  EXPECT_EQ(i_pow(3), cplx(0, -1));
  EXPECT_EQ(i_pow(6), cplx(-1, 0));
}

TEST(SystemPropagator, ZeroIntervalIsIdentity) {
  const SystemSpec sys = spin_boson_system(0.7, 0.3, SpinObservable::sigma_x);
  EXPECT_TRUE(system_propagator(0.4, 0.4, sys, 1.0).isApprox(Operator::Identity(2, 2)));
  // s = t uses the backward case: no insertion
  EXPECT_TRUE(system_propagator(1.0, 1.0, sys, 1.0).isApprox(Operator::Identity(2, 2)));
}

TEST(SystemPropagator, CrossingWithZeroHamiltonianIsObservable) {
  const SystemSpec sys = spin_boson_system(0.0, 0.0, SpinObservable::sigma_x);
  EXPECT_TRUE(system_propagator(1.5, 0.5, sys, 1.0).isApprox(pauli::sigma_x()));
  EXPECT_TRUE(system_propagator(1.0, 0.5, sys, 1.0).isApprox(pauli::sigma_x()));
}

TEST(SystemPropagator, MatchesPadeExponentialInAllCases) {
  std::mt19937_64 gen(21);
  const double t = 1.3;
  for (int d : {2, 3, 4}) {
    const SystemSpec sys = random_system(gen, d);
    const ContourSystem cs(sys, t);
    const double cases[][2] = {{0.9, 0.2}, {2.4, 1.5}, {2.0, 0.4}, {1.3, 0.1}, {1.3, 1.3}};
    for (const auto& c : cases)
      EXPECT_LT((cs.propagator(c[0], c[1]) - reference_propagator(c[0], c[1], sys, t)).norm(), 1e-11);
  }
}

TEST(SystemPropagator, UnitaryOffThePivot) {
  std::mt19937_64 gen(22);
  const SystemSpec sys = random_system(gen, 3);
  const ContourSystem cs(sys, 1.0);
  for (const auto& [sf, si] : {std::pair{0.9, 0.1}, std::pair{1.9, 1.0}, std::pair{1.7, 1.2}}) {
    const Operator g = cs.propagator(sf, si);
    EXPECT_LT((g * g.adjoint() - Operator::Identity(3, 3)).norm(), 1e-10);
  }
}

TEST(SystemPropagator, SemigroupOnEachBranchAndAcrossThePivot) {
  std::mt19937_64 gen(23);
  const SystemSpec sys = random_system(gen, 3);
  const ContourSystem cs(sys, 1.0);
  EXPECT_LT((cs.propagator(0.9, 0.5) * cs.propagator(0.5, 0.2) - cs.propagator(0.9, 0.2)).norm(), 1e-10);
  EXPECT_LT((cs.propagator(1.9, 1.5) * cs.propagator(1.5, 1.1) - cs.propagator(1.9, 1.1)).norm(), 1e-10);
  for (double s2 : {0.3, 0.99, 1.0, 1.4, 1.7})
    EXPECT_LT((cs.propagator(1.8, s2) * cs.propagator(s2, 0.2) - cs.propagator(1.8, 0.2)).norm(), 1e-10)
        << "split at " << s2;
  EXPECT_THROW(cs.propagator(0.2, 0.5), std::invalid_argument);
}

TEST(UChain, EmptySequenceGivesHeisenbergObservable) {
  const SystemSpec zero_h = spin_boson_system(0.0, 0.0, SpinObservable::sigma_x);
  EXPECT_TRUE(u_s(2.0, TimeSequence({}, 1.0), 0.0, zero_h).isApprox(pauli::sigma_x()));

  const SystemSpec sys = spin_boson_system(0.8, 0.3, SpinObservable::sigma_x);
  const double t = 1.2;
  const Operator heis = test::expm_minus_i(sys.h_s(), -t) * sys.o_s() * test::expm_minus_i(sys.h_s(), t);
  EXPECT_LT((u_s(2.0 * t, TimeSequence({}, t), 0.0, sys) - heis).norm(), 1e-12);
}

TEST(UChain, VanishesWithoutCoupling) {
  const Operator z = Operator::Zero(2, 2);
  const SystemSpec sys(pauli::sigma_x(), z, pauli::sigma_z(), spin_state(SpinState::up));
  EXPECT_EQ(u_s(2.0, TimeSequence({0.4, 1.3}, 1.0), 0.0, sys).norm(), 0.0);
}

TEST(UChain, MatchesReferenceProduct) {
  std::mt19937_64 gen(24);
  const double t = 0.9;
  for (int m : {1, 2, 3, 4, 6}) {
    const SystemSpec sys = random_system(gen, 3);
    const ContourSystem cs(sys, t);
    const auto s = random_times(gen, m, t);
    const Operator ref = reference_chain(2.0 * t, s, 0.0, sys, t);
    EXPECT_LT((cs.u_s(2.0 * t, s, 0.0) - ref).norm(), 1e-10 * (1.0 + ref.norm())) << "m=" << m;
    EXPECT_NEAR(std::abs(cs.trace_u_s(2.0 * t, s, 0.0) - (sys.rho_s() * ref).trace()), 0.0, 1e-10);
  }
}

TEST(DysonWeight, ZerothOrder) {
  const SystemSpec sys = spin_boson_system(0.8, 0.3, SpinObservable::sigma_x, SpinState::up);
  const double t = 0.7;
  const Operator heis = test::expm_minus_i(sys.h_s(), -t) * sys.o_s() * test::expm_minus_i(sys.h_s(), t);
  EXPECT_NEAR(std::abs(dyson_weight(TimeSequence({}, t), sys) - (sys.rho_s() * heis).trace()), 0.0, 1e-12);
  const ContourSystem at_zero(sys, 0.0);
  EXPECT_NEAR(std::abs(at_zero.dyson_weight(std::span<const double>{}) - (sys.rho_s() * sys.o_s()).trace()),
              0.0, 1e-15);
}

TEST(DysonWeight, SignAndPhaseFactors) {
  std::mt19937_64 gen(25);
  const SystemSpec sys = random_system(gen, 2);
  const double t = 1.0;
  const std::vector<double> s{0.2, 0.6, 1.1, 1.7};
  const cplx tr = (sys.rho_s() * reference_chain(2.0, s, 0.0, sys, t)).trace();
  // two forward points, i^4 = 1
  EXPECT_NEAR(std::abs(dyson_weight(TimeSequence(s, t), sys) - tr), 0.0, 1e-11);
  const std::vector<double> s3{0.2, 1.1, 1.7};
  const cplx tr3 = (sys.rho_s() * reference_chain(2.0, s3, 0.0, sys, t)).trace();
  EXPECT_NEAR(std::abs(dyson_weight(TimeSequence(s3, t), sys) - (-1.0) * cplx(0, -1) * tr3), 0.0, 1e-11);
}

TEST(DysonWeight, BoundedByNorms) {
  std::mt19937_64 gen(26);
  for (int rep = 0; rep < 200; ++rep) {
    const int m = rep % 7;
    const SystemSpec sys = random_system(gen, 2 + rep % 3);
    const ContourSystem cs(sys, 1.1);
    const auto s = random_times(gen, m, 1.1);
    const double bound = std::pow(operator_norm(sys.w_s()), m) * operator_norm(sys.o_s());
    EXPECT_LE(std::abs(cs.dyson_weight(s)), bound * (1.0 + 1e-12) + 1e-14);
  }
}

TEST(DysonWeight, LipschitzInTheTimes) {
  std::mt19937_64 gen(27);
  const SystemSpec sys = random_system(gen, 2);
  const ContourSystem cs(sys, 1.0);
  const double lip =
      2.0 * operator_norm(sys.h_s()) * std::pow(operator_norm(sys.w_s()), 4) * operator_norm(sys.o_s());
  std::vector<double> s{0.3, 0.8, 1.4, 1.6};
  const cplx w0 = cs.dyson_weight(s);
  for (double h : {1e-3, 1e-4, 1e-5}) {
    std::vector<double> moved = s;
    moved[1] += h;
    EXPECT_LE(std::abs(cs.dyson_weight(moved) - w0), lip * h * (1.0 + 1e-9));
  }
}
