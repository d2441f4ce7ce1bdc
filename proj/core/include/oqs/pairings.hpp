// pairings.hpp — ordered pairings of {0,...,m-1} and Wick sums over them
//
// Indices are 0-based: index k refers to the (k+1)-th smallest contour time.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "oqs/model.hpp"

namespace oqs {

/// Set of m/2 index pairs (j, k) with j < k that together cover {0,...,m-1} exactly once.
struct Pairing {
  std::vector<std::pair<int, int>> pairs;

  friend bool operator==(const Pairing&, const Pairing&) = default;
};

bool is_valid_pairing(const Pairing& q, int m);

/// (m-1)!! with (-1)!! = 1. Throws for odd or negative m and on overflow.
std::uint64_t pairing_count(int m);

/// Streams every ordered pairing of m points exactly once, in canonical order: the smallest
/// unpaired index is paired with each larger unpaired index in turn, recursing on the rest.
/// Constant memory in the number of pairings.
class PairingEnumerator {
 public:
  explicit PairingEnumerator(int m);

  /// Next pairing, or nullopt when exhausted.
  std::optional<Pairing> next();

 private:
  Pairing decode() const;

  int m_;
  std::vector<int> choice_;  // mixed-radix counter; level l has m - 2l - 1 options
  bool done_{false};
};

/// Visits every pairing of the given index list (canonical order relative to that list).
template <typename Visitor>
void for_each_pairing(std::span<const int> indices, Visitor&& visit);

/// prod over (j,k) in q of corr(s_j, s_k); the empty pairing gives 1.
template <typename Corr>
cplx wick_product(const Pairing& q, std::span<const double> times, Corr&& corr) {
  cplx p{1.0, 0.0};
  for (const auto& [j, k] : q.pairs) p *= corr(times[j], times[k]);
  return p;
}

/// Upper-triangular table of pair values: table(j, k) = corr(s_j, s_k) for j < k.
using PairTable = Eigen::MatrixXcd;

template <typename Corr>
PairTable pair_table(std::span<const double> times, Corr&& corr) {
  const auto m = static_cast<Eigen::Index>(times.size());
  PairTable t = PairTable::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index k = j + 1; k < m; ++k) t(j, k) = corr(times[j], times[k]);
  return t;
}

/// Sum over all ordered pairings of the product of table entries; 0 for odd size.
cplx wick_sum(const PairTable& table);

/// Sum over all ordered pairings of the sub-table restricted to `indices` (sorted ascending).
cplx wick_sum(const PairTable& table, std::span<const int> indices);

/// Wick sum of a correlation function over the given times; 0 when m is odd.
template <typename Corr>
cplx wick_sum(std::span<const double> times, Corr&& corr) {
  if (times.size() % 2 != 0) return {0.0, 0.0};
  return wick_sum(pair_table(times, corr));
}

/// One term of the splitting of a pairing set into a correlated subset and its complement.
struct SplitTerm {
  std::vector<int> subset;      // c, ascending
  Pairing on_subset;            // pairing carrying the perturbation
  Pairing on_complement;        // pairing carrying the unperturbed correlation
};

/// Streams every (c, q on c, q on complement) with |c| = subset_size exactly once.
/// Subsets are visited in lexicographic order.
template <typename Visitor>
void for_each_split(int m, int subset_size, Visitor&& visit);

/// Number of terms streamed by for_each_split: C(m,k) (k-1)!! (m-k-1)!!.
std::uint64_t split_count(int m, int subset_size);

// ---------------------------------------------------------------------------

namespace detail {

template <typename Visitor>
void pairing_recurse(std::vector<int>& free, Pairing& acc, Visitor& visit) {
  if (free.empty()) {
    visit(static_cast<const Pairing&>(acc));
    return;
  }
  const int first = free.front();
  for (std::size_t p = 1; p < free.size(); ++p) {
    const int partner = free[p];
    std::vector<int> rest;
    rest.reserve(free.size() - 2);
    for (std::size_t r = 1; r < free.size(); ++r)
      if (r != p) rest.push_back(free[r]);
    acc.pairs.emplace_back(first, partner);
    pairing_recurse(rest, acc, visit);
    acc.pairs.pop_back();
  }
}

void check_even(int m, const char* what);

}  // namespace detail

template <typename Visitor>
void for_each_pairing(std::span<const int> indices, Visitor&& visit) {
  detail::check_even(static_cast<int>(indices.size()), "for_each_pairing");
  std::vector<int> free(indices.begin(), indices.end());
  Pairing acc;
  detail::pairing_recurse(free, acc, visit);
}

template <typename Visitor>
void for_each_split(int m, int subset_size, Visitor&& visit) {
  detail::check_even(m, "split_pairings: m");
  detail::check_even(subset_size, "split_pairings: subset_size");
  if (subset_size > m) throw std::invalid_argument("split_pairings: subset_size exceeds m");

  std::vector<int> subset(subset_size);
  for (int i = 0; i < subset_size; ++i) subset[i] = i;
  while (true) {
    std::vector<int> complement;
    complement.reserve(m - subset_size);
    for (int i = 0, c = 0; i < m; ++i) {
      if (c < subset_size && subset[c] == i) {
        ++c;
      } else {
        complement.push_back(i);
      }
    }
    for_each_pairing(std::span<const int>(subset), [&](const Pairing& qd) {
      for_each_pairing(std::span<const int>(complement), [&](const Pairing& qb) {
        visit(SplitTerm{subset, qd, qb});
      });
    });
    // next combination in lexicographic order
    int i = subset_size - 1;
    while (i >= 0 && subset[i] == m - subset_size + i) --i;
    if (i < 0) break;
    ++subset[i];
    for (int j = i + 1; j < subset_size; ++j) subset[j] = subset[j - 1] + 1;
  }
}

}  // namespace oqs
