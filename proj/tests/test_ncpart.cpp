#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "dtlab/ncpart.hpp"

using namespace dtlab;
using namespace dtlab::ncpart;

namespace {

// Every set partition of {0..n-1} as a restricted growth string.
void all_set_partitions(int n, std::vector<int>& rgs, int top, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(rgs.size()) == n) {
    out.push_back(rgs);
    return;
  }
  for (int b = 0; b <= top + 1; ++b) {
    rgs.push_back(b);
    all_set_partitions(n, rgs, std::max(top, b), out);
    rgs.pop_back();
  }
}

bool crossing(const std::vector<int>& rgs) {
  const int n = static_cast<int>(rgs.size());
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        for (int d = c + 1; d < n; ++d)
          if (rgs[a] == rgs[c] && rgs[b] == rgs[d] && rgs[a] != rgs[b]) return true;
  return false;
}

std::vector<std::vector<int>> brute_nc(int n) {
  std::vector<std::vector<int>> all, out;
  std::vector<int> rgs;
  all_set_partitions(n, rgs, -1, all);
  for (auto& p : all)
    if (!crossing(p)) out.push_back(p);
  return out;
}

// mu(s, p) on the lattice by the defining recursion.
Rational lattice_moebius(const std::vector<NCPartition>& all, const NCPartition& s, const NCPartition& p) {
  std::map<std::size_t, Rational> mu;
  std::vector<std::size_t> interval;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (s.refines(all[i]) && all[i].refines(p)) interval.push_back(i);
  // process by increasing number of elements below (finer first)
  std::sort(interval.begin(), interval.end(),
            [&](std::size_t a, std::size_t b) { return all[a].block_count() > all[b].block_count(); });
  for (std::size_t i : interval) {
    if (all[i] == s) {
      mu[i] = 1;
      continue;
    }
    Rational acc = 0;
    for (std::size_t j : interval)
      if (j != i && all[j].refines(all[i]) && mu.count(j)) acc += mu[j];
    mu[i] = -acc;
  }
  for (std::size_t i : interval)
    if (all[i] == p) return mu[i];
  return 0;
}

MomentSequence semicircle(Rational var, int order) {
  MomentSequence m(1, order);
  for (int k = 1; k <= order; ++k) {
    Rational v = 0;
    if (k % 2 == 0) {
      v = Rational(static_cast<unsigned long>(catalan(k / 2)));
      for (int j = 0; j < k / 2; ++j) v *= var;
    }
    m.set(Word(static_cast<std::size_t>(k), 0), v);
  }
  return m;
}

}  // namespace

TEST_SUITE("ncpart") {
  TEST_CASE("enumeration matches the brute-force filter of all set partitions") {
    for (int n = 1; n <= 8; ++n) {
      const auto brute = brute_nc(n);
      std::set<std::vector<int>> expected(brute.begin(), brute.end());
      std::set<std::vector<int>> got;
      for_each_nc_partition(n, [&](std::span<const int> lab) {
        std::vector<std::uint8_t> raw(lab.begin(), lab.end());
        const auto canon = NCPartition::from_labels(std::move(raw)).labels();
        got.insert({canon.begin(), canon.end()});
      });
      CHECK(got == expected);
      CHECK(enumerate_nc_partitions(n).size() == catalan(n));
    }
  }

  TEST_CASE("Catalan counts up to the enumeration cap") {
    const std::uint64_t cat[] = {1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796};
    for (int n = 0; n <= 10; ++n) CHECK(catalan(n) == cat[n]);
    std::uint64_t count = 0;
    for_each_nc_partition(12, [&](std::span<const int>) { ++count; });
    CHECK(count == catalan(12));
  }

  TEST_CASE("pairings") {
    CHECK(enumerate_nc_pairings(5).empty());
    for (int k = 1; k <= 6; ++k) {
      const auto ps = enumerate_nc_pairings(2 * k);
      CHECK(ps.size() == catalan(k));
      for (const auto& p : ps) {
        std::vector<std::vector<int>> blocks;
        for (auto [i, j] : p.pairs) blocks.push_back({i, j});
        CHECK_NOTHROW(NCPartition::from_blocks(2 * k, blocks));
      }
    }
  }

  TEST_CASE("from_blocks validation") {
    CHECK_THROWS_AS(NCPartition::from_blocks(4, {{1, 3}, {2, 4}}), std::invalid_argument);
    CHECK_THROWS_AS(NCPartition::from_blocks(3, {{1, 2}}), std::invalid_argument);
    CHECK_THROWS_AS(NCPartition::from_blocks(3, {{1, 2}, {2, 3}}), std::invalid_argument);
    CHECK_THROWS_AS(NCPartition::from_blocks(2, {{0, 1}}), std::invalid_argument);
    const auto p = NCPartition::from_blocks(4, {{1, 4}, {2, 3}});
    CHECK(p.block_count() == 2);
    CHECK(p.blocks() == std::vector<std::vector<int>>{{1, 4}, {2, 3}});
  }

  TEST_CASE("Kreweras complement: block counts add to n+1 and the map is a bijection") {
    for (int n = 1; n <= 7; ++n) {
      std::set<NCPartition> images;
      for (const auto& p : enumerate_nc_partitions(n)) {
        const auto k = kreweras_complement(p);
        CHECK(p.block_count() + k.block_count() == n + 1);
        images.insert(k);
      }
      CHECK(images.size() == catalan(n));
    }
    CHECK(kreweras_complement(NCPartition::singletons(4)) == NCPartition::one_block(4));
    CHECK(kreweras_complement(NCPartition::one_block(4)) == NCPartition::singletons(4));
  }

  TEST_CASE("Moebius function against the lattice recursion") {
    for (int n = 1; n <= 5; ++n) {
      const auto all = enumerate_nc_partitions(n);
      for (const auto& s : all)
        for (const auto& p : all)
          if (s.refines(p)) CHECK(moebius_nc(s, p) == lattice_moebius(all, s, p));
    }
    CHECK(moebius_nc(NCPartition::singletons(4), NCPartition::one_block(4)) == -5);
    CHECK_THROWS_AS(moebius_nc(NCPartition::one_block(3), NCPartition::singletons(3)), std::invalid_argument);
  }

  TEST_CASE("semicircular cumulants are concentrated in order two") {
    const auto kappa = moments_to_cumulants(semicircle(Rational(3, 2), 10));
    for (int k = 1; k <= 10; ++k) CHECK(kappa.at(Word(static_cast<std::size_t>(k), 0)) == (k == 2 ? Rational(3, 2) : 0));
  }

  TEST_CASE("free convolution of semicirculars adds variances") {
    const auto a = semicircle(Rational(1, 3), 8), b = semicircle(Rational(1, 2), 8);
    const auto target = semicircle(Rational(5, 6), 8);
    for (int k = 1; k <= 8; ++k) {
      // (s1 + s2)^k expands into all mixed words; sum them.
      Rational total = 0;
      for (int mask = 0; mask < (1 << k); ++mask) {
        std::vector<MixedLetter> w;
        for (int i = 0; i < k; ++i) w.push_back({(mask >> i) & 1, 0});
        total += free_mixed_moments(a, b, w, 8);
      }
      CHECK(total == target.at(Word(static_cast<std::size_t>(k), 0)));
    }
  }

  TEST_CASE("free independence: alternating centered words vanish") {
    MomentSequence a(1, 4), b(1, 4);
    for (int k = 1; k <= 4; ++k) {
      a.set(Word(static_cast<std::size_t>(k), 0), Rational(k + 1, 3));
      b.set(Word(static_cast<std::size_t>(k), 0), Rational(1, k + 1));
    }
    // phi(ab) = phi(a) phi(b), phi(abab) formula for free variables
    const std::vector<MixedLetter> ab{{0, 0}, {1, 0}};
    CHECK(free_mixed_moments(a, b, ab, 4) == a.at({0}) * b.at({0}));
    const std::vector<MixedLetter> abab{{0, 0}, {1, 0}, {0, 0}, {1, 0}};
    const Rational a1 = a.at({0}), a2 = a.at({0, 0}), b1 = b.at({0}), b2 = b.at({0, 0});
    CHECK(free_mixed_moments(a, b, abab, 4) == a2 * b1 * b1 + a1 * a1 * b2 - a1 * a1 * b1 * b1);
  }

  TEST_CASE("moment-cumulant round trip and agreement with the Moebius sum") {
    MomentSequence m(2, 6);
    int counter = 1;
    for (int len = 1; len <= 6; ++len)
      for (const auto& w : all_words(2, len)) m.set(w, Rational(counter++ % 7 - 3, 1 + counter % 5));
    const auto kappa = moments_to_cumulants(m);
    CHECK(cumulants_to_moments(kappa) == m);
    for (const auto& [w, v] : kappa.values()) CHECK(cumulant_by_moebius(m, w) == v);
  }

  TEST_CASE("transform preconditions") {
    MomentSequence incomplete(1, 3);
    incomplete.set({0}, 1);
    CHECK_THROWS_AS(moments_to_cumulants(incomplete), std::invalid_argument);
    CHECK_THROWS_AS(incomplete.at({0, 0}), std::invalid_argument);
    CHECK(all_words(2, 3).size() == 8);
  }
}
