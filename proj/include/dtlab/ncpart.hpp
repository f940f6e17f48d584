#pragma once

// Non-crossing partitions, the Möbius function of NC(n), and scalar
// moment <-> free cumulant transforms for multivariate (*-)moment sequences.

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "dtlab/rational.hpp"

namespace dtlab::ncpart {

inline constexpr int kMaxEnumeration = 14;
inline constexpr int kMaxTransformOrder = 12;
inline constexpr int kMaxMixedOrder = 10;

/// A non-crossing partition of {1..n}, stored as a restricted growth string:
/// label[i] is the block index of element i+1, blocks numbered by their
/// smallest element.
class NCPartition {
 public:
  NCPartition() = default;
  /// Validates coverage, disjointness and the non-crossing condition.
  static NCPartition from_blocks(int n, const std::vector<std::vector<int>>& blocks);
  static NCPartition from_labels(std::vector<std::uint8_t> labels);
  static NCPartition singletons(int n);
  static NCPartition one_block(int n);

  int size() const { return static_cast<int>(labels_.size()); }
  int block_count() const;
  /// Sorted 1-based blocks ordered by their first element.
  std::vector<std::vector<int>> blocks() const;
  const std::vector<std::uint8_t>& labels() const { return labels_; }

  /// sigma <= pi in the refinement order (every block of *this inside a block of pi).
  bool refines(const NCPartition& pi) const;

  friend bool operator==(const NCPartition&, const NCPartition&) = default;
  friend auto operator<=>(const NCPartition&, const NCPartition&) = default;

 private:
  std::vector<std::uint8_t> labels_;
};

/// A non-crossing pair partition; pairs are (i, j) with i < j, 1-based,
/// sorted by i.
struct NCPairing {
  int n = 0;
  std::vector<std::pair<int, int>> pairs;
  friend bool operator==(const NCPairing&, const NCPairing&) = default;
};

/// Words are explicit letter sequences over an alphabet {0..alphabet-1}.
using Word = std::vector<int>;

/// Values on every word of length 1..order over the alphabet; the empty word
/// is implicitly 1.
class MomentSequence {
 public:
  MomentSequence(int alphabet, int order);

  int alphabet() const { return alphabet_; }
  int order() const { return order_; }

  void set(const Word& w, Rational value);
  /// Throws std::invalid_argument when the value is missing.
  const Rational& at(const Word& w) const;
  bool contains(const Word& w) const;
  /// True when every word of length 1..order has a value.
  bool complete() const;
  const std::map<Word, Rational>& values() const { return values_; }

  friend bool operator==(const MomentSequence&, const MomentSequence&) = default;

 private:
  int alphabet_;
  int order_;
  std::map<Word, Rational> values_;
};

std::uint64_t catalan(int n);

/// Visits every partition of NC(n) once. The callback receives the label
/// array (not canonicalized to any particular order).
void for_each_nc_partition(int n, const std::function<void(std::span<const int>)>& visit);

/// All of NC(n), 1 <= n <= 14, sorted lexicographically by label string.
std::vector<NCPartition> enumerate_nc_partitions(int n);

/// All non-crossing pairings of {1..n}; empty for odd n.
std::vector<NCPairing> enumerate_nc_pairings(int n);

/// Möbius function mu(sigma, pi) of NC(n). Requires sigma <= pi.
Rational moebius_nc(const NCPartition& sigma, const NCPartition& pi);

/// The Kreweras complement of pi in NC(n).
NCPartition kreweras_complement(const NCPartition& pi);

/// Free cumulants of a complete moment sequence (order <= 12).
MomentSequence moments_to_cumulants(const MomentSequence& moments);
/// Inverse of moments_to_cumulants.
MomentSequence cumulants_to_moments(const MomentSequence& cumulants);

/// kappa_w = sum over pi in NC(|w|) of mu(pi, 1) prod m_{w|V}, computed by a
/// literal sweep of the lattice. Slower reference route for the transform.
Rational cumulant_by_moebius(const MomentSequence& moments, const Word& w);

/// A letter of a word mixing two free families: (family 0 or 1, letter).
using MixedLetter = std::pair<int, int>;

/// Mixed moments of two free families, given their individual moment
/// sequences. Cumulants of each family are computed once at construction.
class FreeProduct {
 public:
  FreeProduct(const MomentSequence& family_a, const MomentSequence& family_b);
  Rational moment(std::span<const MixedLetter> word) const;
  int order() const;

 private:
  MomentSequence kappa_a_;
  MomentSequence kappa_b_;
};

/// One-shot form of FreeProduct::moment; word length must be <= order_cap <= 10.
Rational free_mixed_moments(const MomentSequence& family_a, const MomentSequence& family_b,
                            std::span<const MixedLetter> word, int order_cap);

/// All words of exactly `length` letters over the alphabet, in lexicographic order.
std::vector<Word> all_words(int alphabet, int length);

}  // namespace dtlab::ncpart
