// pairings.cpp

#include "oqs/pairings.hpp"

#include <bit>
#include <limits>
#include <stdexcept>
#include <string>

namespace oqs {

namespace detail {
void check_even(int m, const char* what) {
  if (m < 0 || m % 2 != 0)
    throw std::invalid_argument(std::string(what) + " must be a nonnegative even integer, got " +
                                std::to_string(m));
}
}  // namespace detail

bool is_valid_pairing(const Pairing& q, int m) {
  if (m < 0 || m % 2 != 0 || static_cast<int>(q.pairs.size()) * 2 != m) return false;
  std::vector<bool> seen(m, false);
  for (const auto& [j, k] : q.pairs) {
    if (j < 0 || k >= m || !(j < k) || seen[j] || seen[k]) return false;
    seen[j] = seen[k] = true;
  }
  return true;
}

std::uint64_t pairing_count(int m) {
  detail::check_even(m, "pairing_count: m");
  std::uint64_t n = 1;
  for (std::uint64_t k = m - 1; k >= 3 && m > 0; k -= 2) {
    if (n > std::numeric_limits<std::uint64_t>::max() / k)
      throw std::overflow_error("pairing_count: (m-1)!! overflows 64 bits");
    n *= k;
  }
  return n;
}

std::uint64_t split_count(int m, int subset_size) {
  detail::check_even(m, "split_count: m");
  detail::check_even(subset_size, "split_count: subset_size");
  if (subset_size > m) throw std::invalid_argument("split_count: subset_size exceeds m");
  std::uint64_t binom = 1;
  for (int i = 1; i <= subset_size; ++i) binom = binom * (m - subset_size + i) / i;
  return binom * pairing_count(subset_size) * pairing_count(m - subset_size);
}

PairingEnumerator::PairingEnumerator(int m) : m_(m), choice_(m / 2, 0) {
  detail::check_even(m, "enumerate_pairings: m");
}

Pairing PairingEnumerator::decode() const {
  std::vector<int> free(m_);
  for (int i = 0; i < m_; ++i) free[i] = i;
  Pairing q;
  q.pairs.reserve(m_ / 2);
  for (int level = 0; level < m_ / 2; ++level) {
    const int first = free.front();
    const auto partner_pos = static_cast<std::size_t>(choice_[level]) + 1;
    const int partner = free[partner_pos];
    q.pairs.emplace_back(first, partner);
    free.erase(free.begin() + static_cast<std::ptrdiff_t>(partner_pos));
    free.erase(free.begin());
  }
  return q;
}

std::optional<Pairing> PairingEnumerator::next() {
  if (done_) return std::nullopt;
  Pairing q = decode();
  // advance the deepest level that still has options
  int level = m_ / 2 - 1;
  while (level >= 0) {
    const int options = m_ - 2 * level - 1;
    if (choice_[level] + 1 < options) {
      ++choice_[level];
      for (int deeper = level + 1; deeper < m_ / 2; ++deeper) choice_[deeper] = 0;
      break;
    }
    --level;
  }
  if (level < 0) done_ = true;
  return q;
}

namespace {

// Free indices are the set bits of `mask`; positions index into `idx`.
cplx wick_recurse(const PairTable& table, const int* idx, std::uint64_t mask) {
  if (mask == 0) return {1.0, 0.0};
  const int first = std::countr_zero(mask);
  mask &= mask - 1;
  cplx total{0.0, 0.0};
  for (std::uint64_t rest = mask; rest != 0; rest &= rest - 1) {
    const int p = std::countr_zero(rest);
    total += table(idx[first], idx[p]) * wick_recurse(table, idx, mask & ~(std::uint64_t{1} << p));
  }
  return total;
}

cplx wick_over(const PairTable& table, std::span<const int> indices) {
  if (indices.size() % 2 != 0) return {0.0, 0.0};
  if (indices.size() > 64) throw std::invalid_argument("wick_sum: at most 64 points");
  const std::uint64_t mask =
      indices.size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << indices.size()) - 1;
  return wick_recurse(table, indices.data(), mask);
}

}  // namespace

cplx wick_sum(const PairTable& table, std::span<const int> indices) {
  return wick_over(table, indices);
}

cplx wick_sum(const PairTable& table) {
  const auto m = static_cast<int>(table.rows());
  if (m % 2 != 0) return {0.0, 0.0};
  std::vector<int> idx(m);
  for (int i = 0; i < m; ++i) idx[i] = i;
  return wick_over(table, idx);
}

}  // namespace oqs
