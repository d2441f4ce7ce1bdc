#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <numeric>
#include <set>

#include "oqs/pairings.hpp"
#include "test_support.hpp"

using namespace oqs;

namespace {

using PairSet = std::set<std::vector<std::pair<int, int>>>;

// Every perfect matching obtained from a permutation by pairing consecutive entries.
PairSet brute_force_pairings(int m) {
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  PairSet out;
  do {
    std::vector<std::pair<int, int>> pairs;
    for (int k = 0; k < m; k += 2) pairs.emplace_back(std::min(perm[k], perm[k + 1]), std::max(perm[k], perm[k + 1]));
    std::sort(pairs.begin(), pairs.end());
    out.insert(pairs);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

std::vector<Pairing> collect(int m) {
  std::vector<Pairing> out;
  PairingEnumerator e(m);
  while (auto q = e.next()) out.push_back(*q);
  return out;
}

cplx brute_force_wick(const PairTable& t, int m) {
  cplx sum{0.0, 0.0};
  for (const auto& pairs : brute_force_pairings(m)) {
    cplx p{1.0, 0.0};
    for (const auto& [j, k] : pairs) p *= t(j, k);
    sum += p;
  }
  return sum;
}

PairTable random_table(std::mt19937_64& gen, int m) {
  PairTable t = test::random_matrix(gen, m);
  return t.triangularView<Eigen::StrictlyUpper>();
}

}  // namespace

TEST(PairingCount, DoubleFactorial) {
  EXPECT_EQ(pairing_count(0), 1u);
  EXPECT_EQ(pairing_count(2), 1u);
  EXPECT_EQ(pairing_count(4), 3u);
  EXPECT_EQ(pairing_count(6), 15u);
  EXPECT_EQ(pairing_count(10), 945u);
  EXPECT_EQ(pairing_count(14), 135135u);
  EXPECT_THROW(pairing_count(3), std::invalid_argument);
  EXPECT_THROW(pairing_count(-2), std::invalid_argument);
  EXPECT_THROW(pairing_count(80), std::overflow_error);
}

TEST(PairingEnumerator, SmallCasesInCanonicalOrder) {
  const auto two = collect(2);
  ASSERT_EQ(two.size(), 1u);
  EXPECT_EQ(two[0].pairs, (std::vector<std::pair<int, int>>{{0, 1}}));

  const auto four = collect(4);
  ASSERT_EQ(four.size(), 3u);
  EXPECT_EQ(four[0].pairs, (std::vector<std::pair<int, int>>{{0, 1}, {2, 3}}));
  EXPECT_EQ(four[1].pairs, (std::vector<std::pair<int, int>>{{0, 2}, {1, 3}}));
  EXPECT_EQ(four[2].pairs, (std::vector<std::pair<int, int>>{{0, 3}, {1, 2}}));

  const auto zero = collect(0);
  ASSERT_EQ(zero.size(), 1u);
  EXPECT_TRUE(zero[0].pairs.empty());
}

TEST(PairingEnumerator, MatchesBruteForceEnumeration) {
  for (int m : {2, 4, 6, 8}) {
    const PairSet expected = brute_force_pairings(m);
    PairSet got;
    for (const Pairing& q : collect(m)) {
      EXPECT_TRUE(is_valid_pairing(q, m));
      auto pairs = q.pairs;
      std::sort(pairs.begin(), pairs.end());
      EXPECT_TRUE(got.insert(pairs).second) << "duplicate pairing for m=" << m;
    }
    EXPECT_EQ(got, expected) << "m=" << m;
  }
}

TEST(PairingEnumerator, CountsDistinctValidUpToFourteen) {
  for (int m = 2; m <= 14; m += 2) {
    PairingEnumerator e(m);
    std::uint64_t n = 0;
    std::set<std::vector<std::pair<int, int>>> seen;
    while (auto q = e.next()) {
      ASSERT_TRUE(is_valid_pairing(*q, m));
      if (m <= 12) seen.insert(q->pairs);
      ++n;
    }
    EXPECT_EQ(n, pairing_count(m));
    if (m <= 12) EXPECT_EQ(seen.size(), n);
  }
  EXPECT_THROW(PairingEnumerator(5), std::invalid_argument);
}

TEST(IsValidPairing, RejectsMalformed) {
  EXPECT_TRUE(is_valid_pairing(Pairing{{{0, 1}, {2, 3}}}, 4));
  EXPECT_FALSE(is_valid_pairing(Pairing{{{1, 0}, {2, 3}}}, 4));
  EXPECT_FALSE(is_valid_pairing(Pairing{{{0, 1}, {1, 3}}}, 4));
  EXPECT_FALSE(is_valid_pairing(Pairing{{{0, 1}}}, 4));
  EXPECT_FALSE(is_valid_pairing(Pairing{{{0, 4}, {1, 2}}}, 4));
}

TEST(ForEachPairing, VisitsIndexListPairings) {
  const std::vector<int> idx{1, 4, 6, 7};
  std::vector<Pairing> got;
  for_each_pairing(std::span<const int>(idx), [&](const Pairing& q) { got.push_back(q); });
  ASSERT_EQ(got.size(), 3u);
  EXPECT_EQ(got[0].pairs, (std::vector<std::pair<int, int>>{{1, 4}, {6, 7}}));
  EXPECT_EQ(got[2].pairs, (std::vector<std::pair<int, int>>{{1, 7}, {4, 6}}));
}

TEST(WickProduct, ConstantCorrelation) {
  const std::vector<double> s2{0.1, 0.2};
  const std::vector<double> s4{0.1, 0.2, 0.3, 0.4};
  const cplx c{0.3, -0.2};
  auto constant = [&](double, double) { return c; };
  EXPECT_EQ(wick_product(Pairing{}, std::span<const double>(s2), constant), cplx(1.0, 0.0));
  EXPECT_EQ(wick_product(Pairing{{{0, 1}}}, std::span<const double>(s2), constant), c);
  for (const Pairing& q : collect(4))
    EXPECT_NEAR(std::abs(wick_product(q, std::span<const double>(s4), constant) - c * c), 0.0, 1e-16);
}

TEST(WickSum, ExplicitSmallCases) {
  auto corr = [](double a, double b) { return cplx{a + 2.0 * b, a * b}; };
  const std::vector<double> s1{0.4};
  EXPECT_EQ(wick_sum(std::span<const double>(s1), corr), cplx(0.0, 0.0));
  const std::vector<double> s2{0.4, 0.9};
  EXPECT_EQ(wick_sum(std::span<const double>(s2), corr), corr(0.4, 0.9));
  const std::vector<double> s{0.1, 0.3, 0.6, 0.8};
  const cplx expected = corr(s[0], s[1]) * corr(s[2], s[3]) + corr(s[0], s[2]) * corr(s[1], s[3]) +
                        corr(s[0], s[3]) * corr(s[1], s[2]);
  EXPECT_NEAR(std::abs(wick_sum(std::span<const double>(s), corr) - expected), 0.0, 1e-15);
}

TEST(WickSum, MatchesBruteForceOnRandomTables) {
  std::mt19937_64 gen(31);
  for (int m : {2, 4, 6, 8}) {
    const PairTable t = random_table(gen, m);
    const cplx ref = brute_force_wick(t, m);
    EXPECT_LT(std::abs(wick_sum(t) - ref), 1e-12 * (1.0 + std::abs(ref))) << "m=" << m;
  }
}

TEST(WickSum, SubTableRestriction) {
  std::mt19937_64 gen(32);
  const PairTable t = random_table(gen, 8);
  const std::vector<int> idx{0, 2, 3, 7};
  PairTable sub = PairTable::Zero(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) sub(a, b) = t(idx[a], idx[b]);
  EXPECT_LT(std::abs(wick_sum(t, std::span<const int>(idx)) - wick_sum(sub)), 1e-14);
}

TEST(WickSum, Homogeneity) {
  std::mt19937_64 gen(33);
  const cplx alpha{0.7, -1.3};
  for (int m : {2, 4, 6, 8, 10}) {
    const PairTable t = random_table(gen, m);
    const cplx lhs = wick_sum(PairTable(alpha * t));
    const cplx rhs = std::pow(alpha, m / 2) * wick_sum(t);
    EXPECT_LT(std::abs(lhs - rhs), 1e-11 * (1.0 + std::abs(rhs))) << "m=" << m;
  }
}

TEST(SplitPairings, SmallCases) {
  std::vector<SplitTerm> terms;
  for_each_split(2, 2, [&](const SplitTerm& s) { terms.push_back(s); });
  ASSERT_EQ(terms.size(), 1u);
  EXPECT_EQ(terms[0].subset, (std::vector<int>{0, 1}));
  EXPECT_EQ(terms[0].on_subset.pairs, (std::vector<std::pair<int, int>>{{0, 1}}));
  EXPECT_TRUE(terms[0].on_complement.pairs.empty());

  std::uint64_t n = 0;
  std::set<std::vector<int>> subsets;
  for_each_split(4, 2, [&](const SplitTerm& s) {
    ++n;
    subsets.insert(s.subset);
  });
  EXPECT_EQ(n, 6u);
  EXPECT_EQ(subsets.size(), 6u);
  EXPECT_THROW(for_each_split(4, 3, [](const SplitTerm&) {}), std::invalid_argument);
}

TEST(SplitPairings, CountsMatchEnumeration) {
  for (int m = 0; m <= 10; m += 2) {
    for (int k = 0; k <= m; k += 2) {
      std::uint64_t n = 0;
      for_each_split(m, k, [&](const SplitTerm& s) {
        // disjoint cover of {0..m-1}
        std::vector<int> all;
        for (auto [a, b] : s.on_subset.pairs) all.insert(all.end(), {a, b});
        for (auto [a, b] : s.on_complement.pairs) all.insert(all.end(), {a, b});
        std::sort(all.begin(), all.end());
        std::vector<int> expected(static_cast<std::size_t>(m));
        std::iota(expected.begin(), expected.end(), 0);
        ASSERT_EQ(all, expected);
        ++n;
      });
      EXPECT_EQ(n, split_count(m, k)) << "m=" << m << " k=" << k;
    }
  }
}

TEST(SplitPairings, BinomialSplittingIdentity) {
  // Wick(B + D) = sum_k sum_c Wick_B(complement) Wick_D(c)
  std::mt19937_64 gen(34);
  for (int m : {2, 4, 6, 8}) {
    for (int rep = 0; rep < 3; ++rep) {
      const PairTable b = random_table(gen, m);
      const PairTable d = random_table(gen, m);
      const cplx lhs = wick_sum(PairTable(b + d));
      cplx rhs{0.0, 0.0};
      for (int k = 0; k <= m; k += 2) {
        for_each_split(m, k, [&](const SplitTerm& s) {
          cplx pd{1.0, 0.0}, pb{1.0, 0.0};
          for (auto [x, y] : s.on_subset.pairs) pd *= d(x, y);
          for (auto [x, y] : s.on_complement.pairs) pb *= b(x, y);
          rhs += pd * pb;
        });
      }
      EXPECT_LT(std::abs(lhs - rhs), 1e-10 * (1.0 + std::abs(lhs))) << "m=" << m;
    }
  }
}

TEST(PairingEnumerator, TwelvePointsWithinBudget) {
  const auto start = std::chrono::steady_clock::now();
  for (int m = 2; m <= 12; m += 2) {
    PairingEnumerator e(m);
    std::uint64_t n = 0;
    while (e.next()) ++n;
    ASSERT_EQ(n, pairing_count(m));
  }
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 5.0);
}
