#include "dtlab/ncpart.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dtlab::ncpart {

namespace {

std::vector<std::uint8_t> canonical_labels(std::span<const int> raw) {
  int top = -1;
  for (int v : raw) top = std::max(top, v);
  std::vector<int> remap(static_cast<std::size_t>(top + 1), -1);
  std::vector<std::uint8_t> out(raw.size());
  int next = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto& slot = remap[static_cast<std::size_t>(raw[i])];
    if (slot < 0) slot = next++;
    out[i] = static_cast<std::uint8_t>(slot);
  }
  return out;
}

bool labels_non_crossing(std::span<const std::uint8_t> lab) {
  const int n = static_cast<int>(lab.size());
  // a < b < c < d with lab[a] == lab[c] != lab[b] == lab[d]
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (lab[b] == lab[a]) continue;
      for (int c = b + 1; c < n; ++c) {
        if (lab[c] != lab[a]) continue;
        for (int d = c + 1; d < n; ++d) {
          if (lab[d] == lab[b]) return false;
        }
      }
    }
  }
  return true;
}

// Recursive first-element-block generator: the block of the first element
// of an interval is chosen, and the gaps it leaves are partitioned
// independently. Never produces a crossing candidate.
class Generator {
 public:
  Generator(int n, const std::function<void(std::span<const int>)>& visit)
      : lab_(static_cast<std::size_t>(n), 0), visit_(visit) {
    pending_.push_back({0, n - 1});
  }
  void run() { process(); }

 private:
  void process() {
    if (pending_.empty()) {
      visit_(lab_);
      return;
    }
    const auto interval = pending_.back();
    pending_.pop_back();
    const auto [l, r] = interval;
    if (l > r) {
      process();
    } else {
      const int label = next_label_++;
      lab_[static_cast<std::size_t>(l)] = label;
      extend(l, r, label);
      --next_label_;
    }
    pending_.push_back(interval);
  }

  void extend(int last, int r, int label) {
    pending_.push_back({last + 1, r});
    process();
    pending_.pop_back();
    for (int v = last + 1; v <= r; ++v) {
      pending_.push_back({last + 1, v - 1});
      lab_[static_cast<std::size_t>(v)] = label;
      extend(v, r, label);
      pending_.pop_back();
    }
  }

  std::vector<int> lab_;
  std::vector<std::pair<int, int>> pending_;
  int next_label_ = 0;
  const std::function<void(std::span<const int>)>& visit_;
};

// Möbius value mu(pi, 1_n) from the cycle type of the Kreweras complement:
// a product of signed Catalan numbers (-1)^{k-1} C_{k-1} over its blocks.
Rational moebius_to_top(std::span<const int> lab) {
  const int n = static_cast<int>(lab.size());
  if (n == 0) return 1;
  std::vector<int> next(static_cast<std::size_t>(n)), prev(static_cast<std::size_t>(n));
  std::vector<int> first(static_cast<std::size_t>(n), -1), last(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    const auto b = static_cast<std::size_t>(lab[static_cast<std::size_t>(i)]);
    if (first[b] < 0) first[b] = i;
    if (last[b] >= 0) next[static_cast<std::size_t>(last[b])] = i;
    last[b] = i;
  }
  for (std::size_t b = 0; b < first.size(); ++b) {
    if (first[b] >= 0) next[static_cast<std::size_t>(last[b])] = first[b];
  }
  for (int i = 0; i < n; ++i) prev[static_cast<std::size_t>(next[static_cast<std::size_t>(i)])] = i;
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  Rational mu = 1;
  for (int i = 0; i < n; ++i) {
    if (seen[static_cast<std::size_t>(i)]) continue;
    int len = 0;
    int j = i;
    while (!seen[static_cast<std::size_t>(j)]) {
      seen[static_cast<std::size_t>(j)] = true;
      ++len;
      j = prev[static_cast<std::size_t>((j + 1) % n)];
    }
    Rational factor(static_cast<unsigned long>(catalan(len - 1)));
    if (len % 2 == 0) factor = -factor;
    mu *= factor;
  }
  return mu;
}

// Dense storage for complete sequences: words of length L live at
// offset[L] + base-A value of the word.
class FlatSequence {
 public:
  FlatSequence(int alphabet, int order) : alphabet_(alphabet), order_(order) {
    offset_.resize(static_cast<std::size_t>(order) + 2, 0);
    std::size_t count = 1;
    for (int len = 0; len <= order; ++len) {
      offset_[static_cast<std::size_t>(len) + 1] = offset_[static_cast<std::size_t>(len)] + count;
      count *= static_cast<std::size_t>(alphabet);
    }
    values_.resize(offset_.back());
    values_[0] = 1;
  }

  std::size_t index_of(std::span<const int> w) const {
    std::size_t code = 0;
    for (int letter : w) code = code * static_cast<std::size_t>(alphabet_) + static_cast<std::size_t>(letter);
    return offset_[w.size()] + code;
  }
  Rational& operator[](std::size_t i) { return values_[i]; }
  const Rational& operator[](std::size_t i) const { return values_[i]; }

  static FlatSequence from(const MomentSequence& m) {
    if (!m.complete()) {
      throw std::invalid_argument("moment sequence is missing values below its order");
    }
    FlatSequence flat(m.alphabet(), m.order());
    for (const auto& [w, v] : m.values()) {
      if (static_cast<int>(w.size()) <= m.order()) flat[flat.index_of(w)] = v;
    }
    return flat;
  }

  MomentSequence to_sequence() const {
    MomentSequence out(alphabet_, order_);
    for (int len = 1; len <= order_; ++len) {
      for (const Word& w : all_words(alphabet_, len)) out.set(w, values_[index_of(w)]);
    }
    return out;
  }

 private:
  int alphabet_;
  int order_;
  std::vector<std::size_t> offset_;
  std::vector<Rational> values_;
};

// Sum over the first-element block V of w (V != whole word when
// skip_full): inner(w|V) * prod outer(gap), gaps being the maximal runs
// of positions outside V.
Rational first_block_sum(const Word& w, const FlatSequence& inner, const FlatSequence& outer,
                         bool skip_full) {
  const int n = static_cast<int>(w.size());
  const unsigned full = (n > 1) ? ((1u << (n - 1)) - 1u) : 0u;
  Rational total = 0;
  Word block;
  Word gap;
  block.reserve(static_cast<std::size_t>(n));
  gap.reserve(static_cast<std::size_t>(n));
  for (unsigned mask = 0; mask <= full; ++mask) {
    if (skip_full && mask == full) break;
    block.assign(1, w[0]);
    Rational term = 1;
    gap.clear();
    for (int pos = 1; pos < n; ++pos) {
      if (mask & (1u << (pos - 1))) {
        if (!gap.empty()) {
          term *= outer[outer.index_of(gap)];
          gap.clear();
        }
        block.push_back(w[static_cast<std::size_t>(pos)]);
      } else {
        gap.push_back(w[static_cast<std::size_t>(pos)]);
      }
      if (sgn(term) == 0) break;
    }
    if (sgn(term) == 0) continue;
    if (!gap.empty()) term *= outer[outer.index_of(gap)];
    if (sgn(term) == 0) continue;
    total += inner[inner.index_of(block)] * term;
  }
  return total;
}

void check_transform_order(const MomentSequence& m) {
  if (m.order() < 1 || m.order() > kMaxTransformOrder) {
    throw std::invalid_argument("transform order must be in [1, " +
                                std::to_string(kMaxTransformOrder) + "]");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

NCPartition NCPartition::from_labels(std::vector<std::uint8_t> labels) {
  std::vector<int> raw(labels.begin(), labels.end());
  for (int v : raw) {
    if (v >= static_cast<int>(raw.size())) throw std::invalid_argument("partition label out of range");
  }
  NCPartition p;
  p.labels_ = canonical_labels(raw);
  if (!labels_non_crossing(p.labels_)) throw std::invalid_argument("partition is crossing");
  return p;
}

NCPartition NCPartition::from_blocks(int n, const std::vector<std::vector<int>>& blocks) {
  if (n < 0 || n > 255) throw std::invalid_argument("partition size out of range");
  std::vector<int> raw(static_cast<std::size_t>(n), -1);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].empty()) throw std::invalid_argument("empty block");
    for (int e : blocks[b]) {
      if (e < 1 || e > n) throw std::invalid_argument("block element outside {1..n}");
      auto& slot = raw[static_cast<std::size_t>(e - 1)];
      if (slot >= 0) throw std::invalid_argument("blocks are not disjoint");
      slot = static_cast<int>(b);
    }
  }
  if (std::ranges::find(raw, -1) != raw.end()) throw std::invalid_argument("blocks do not cover {1..n}");
  NCPartition p;
  p.labels_ = canonical_labels(raw);
  if (!labels_non_crossing(p.labels_)) throw std::invalid_argument("partition is crossing");
  return p;
}

NCPartition NCPartition::singletons(int n) {
  NCPartition p;
  p.labels_.resize(static_cast<std::size_t>(n));
  std::iota(p.labels_.begin(), p.labels_.end(), std::uint8_t{0});
  return p;
}

NCPartition NCPartition::one_block(int n) {
  NCPartition p;
  p.labels_.assign(static_cast<std::size_t>(n), 0);
  return p;
}

int NCPartition::block_count() const {
  if (labels_.empty()) return 0;
  return *std::ranges::max_element(labels_) + 1;
}

std::vector<std::vector<int>> NCPartition::blocks() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(block_count()));
  for (std::size_t i = 0; i < labels_.size(); ++i) out[labels_[i]].push_back(static_cast<int>(i) + 1);
  return out;
}

bool NCPartition::refines(const NCPartition& pi) const {
  if (pi.size() != size()) return false;
  std::vector<int> owner(static_cast<std::size_t>(block_count()), -1);
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    auto& o = owner[labels_[i]];
    if (o < 0) {
      o = pi.labels_[i];
    } else if (o != pi.labels_[i]) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

MomentSequence::MomentSequence(int alphabet, int order) : alphabet_(alphabet), order_(order) {
  if (alphabet < 1) throw std::invalid_argument("alphabet must be non-empty");
  if (order < 0) throw std::invalid_argument("order must be non-negative");
}

void MomentSequence::set(const Word& w, Rational value) {
  value.canonicalize();
  if (w.empty()) {
    if (value != 1) throw std::invalid_argument("the empty word has value 1");
    return;
  }
  if (static_cast<int>(w.size()) > order_) throw std::invalid_argument("word longer than sequence order");
  for (int letter : w) {
    if (letter < 0 || letter >= alphabet_) throw std::invalid_argument("letter outside alphabet");
  }
  values_[w] = std::move(value);
}

const Rational& MomentSequence::at(const Word& w) const {
  static const Rational one = 1;
  if (w.empty()) return one;
  auto it = values_.find(w);
  if (it == values_.end()) throw std::invalid_argument("missing value for word of length " + std::to_string(w.size()));
  return it->second;
}

bool MomentSequence::contains(const Word& w) const { return w.empty() || values_.contains(w); }

bool MomentSequence::complete() const {
  std::size_t expected = 0;
  std::size_t count = 1;
  for (int len = 1; len <= order_; ++len) {
    count *= static_cast<std::size_t>(alphabet_);
    expected += count;
  }
  return values_.size() == expected;
}

// ---------------------------------------------------------------------------

std::uint64_t catalan(int n) {
  if (n < 0) return 0;
  std::uint64_t c = 1;
  for (int k = 0; k < n; ++k) c = c * 2 * (2 * static_cast<std::uint64_t>(k) + 1) / (static_cast<std::uint64_t>(k) + 2);
  return c;
}

void for_each_nc_partition(int n, const std::function<void(std::span<const int>)>& visit) {
  if (n == 0) {
    visit({});
    return;
  }
  Generator(n, visit).run();
}

std::vector<NCPartition> enumerate_nc_partitions(int n) {
  if (n < 1 || n > kMaxEnumeration) {
    throw std::invalid_argument("enumerate_nc_partitions: n must be in [1, " +
                                std::to_string(kMaxEnumeration) + "]");
  }
  std::vector<NCPartition> out;
  out.reserve(catalan(n));
  for_each_nc_partition(n, [&](std::span<const int> lab) {
    std::vector<std::uint8_t> l = canonical_labels(lab);
    NCPartition p = NCPartition::from_labels(std::move(l));
    out.push_back(std::move(p));
  });
  std::ranges::sort(out);
  return out;
}

namespace {

void pairings_rec(int lo, int hi, std::vector<std::pair<int, int>>& acc,
                  std::vector<std::vector<std::pair<int, int>>>& out,
                  std::vector<std::pair<int, int>>& pending) {
  if (lo > hi) {
    if (pending.empty()) {
      auto sorted = acc;
      std::ranges::sort(sorted);
      out.push_back(std::move(sorted));
      return;
    }
    auto next = pending.back();
    pending.pop_back();
    pairings_rec(next.first, next.second, acc, out, pending);
    pending.push_back(next);
    return;
  }
  for (int j = lo + 1; j <= hi; j += 2) {
    acc.emplace_back(lo, j);
    pending.emplace_back(j + 1, hi);
    pairings_rec(lo + 1, j - 1, acc, out, pending);
    pending.pop_back();
    acc.pop_back();
  }
}

}  // namespace

std::vector<NCPairing> enumerate_nc_pairings(int n) {
  std::vector<NCPairing> out;
  if (n < 0 || n % 2 != 0) return out;
  std::vector<std::vector<std::pair<int, int>>> raw;
  std::vector<std::pair<int, int>> acc;
  std::vector<std::pair<int, int>> pending;
  pairings_rec(1, n, acc, raw, pending);
  out.reserve(raw.size());
  for (auto& pairs : raw) out.push_back(NCPairing{n, std::move(pairs)});
  return out;
}

NCPartition kreweras_complement(const NCPartition& pi) {
  const int n = pi.size();
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (const auto& block : pi.blocks()) {
    for (std::size_t i = 0; i < block.size(); ++i) {
      perm[static_cast<std::size_t>(block[i] - 1)] = block[(i + 1) % block.size()] - 1;
    }
  }
  std::vector<int> inverse(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) inverse[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i;
  std::vector<int> lab(static_cast<std::size_t>(n), -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    if (lab[static_cast<std::size_t>(i)] >= 0) continue;
    for (int j = i; lab[static_cast<std::size_t>(j)] < 0; j = inverse[static_cast<std::size_t>((j + 1) % n)]) {
      lab[static_cast<std::size_t>(j)] = next;
    }
    ++next;
  }
  std::vector<std::uint8_t> labels(lab.begin(), lab.end());
  return NCPartition::from_labels(std::move(labels));
}

Rational moebius_nc(const NCPartition& sigma, const NCPartition& pi) {
  if (sigma.size() != pi.size()) throw std::invalid_argument("moebius_nc: partitions of different sizes");
  if (!sigma.refines(pi)) throw std::invalid_argument("moebius_nc: sigma does not refine pi");
  // [sigma, pi] factors over the blocks of pi as intervals [sigma|V, 1_V].
  Rational mu = 1;
  const auto& sl = sigma.labels();
  for (const auto& block : pi.blocks()) {
    std::vector<int> restricted;
    restricted.reserve(block.size());
    for (int e : block) restricted.push_back(sl[static_cast<std::size_t>(e - 1)]);
    std::vector<std::uint8_t> canon = canonical_labels(restricted);
    std::vector<int> as_int(canon.begin(), canon.end());
    mu *= moebius_to_top(as_int);
  }
  return mu;
}

MomentSequence moments_to_cumulants(const MomentSequence& moments) {
  check_transform_order(moments);
  const FlatSequence m = FlatSequence::from(moments);
  FlatSequence kappa(moments.alphabet(), moments.order());
  for (int len = 1; len <= moments.order(); ++len) {
    for (const Word& w : all_words(moments.alphabet(), len)) {
      const std::size_t idx = m.index_of(w);
      kappa[idx] = m[idx] - first_block_sum(w, kappa, m, /*skip_full=*/true);
    }
  }
  return kappa.to_sequence();
}

MomentSequence cumulants_to_moments(const MomentSequence& cumulants) {
  check_transform_order(cumulants);
  const FlatSequence kappa = FlatSequence::from(cumulants);
  FlatSequence m(cumulants.alphabet(), cumulants.order());
  for (int len = 1; len <= cumulants.order(); ++len) {
    for (const Word& w : all_words(cumulants.alphabet(), len)) {
      const std::size_t idx = m.index_of(w);
      m[idx] = kappa[idx] + first_block_sum(w, kappa, m, /*skip_full=*/true);
    }
  }
  return m.to_sequence();
}

Rational cumulant_by_moebius(const MomentSequence& moments, const Word& w) {
  const int n = static_cast<int>(w.size());
  if (n < 1 || n > kMaxEnumeration) throw std::invalid_argument("cumulant_by_moebius: bad word length");
  Rational total = 0;
  std::vector<Word> parts;
  for_each_nc_partition(n, [&](std::span<const int> lab) {
    parts.assign(static_cast<std::size_t>(n), Word{});
    for (int i = 0; i < n; ++i) parts[static_cast<std::size_t>(lab[static_cast<std::size_t>(i)])].push_back(w[static_cast<std::size_t>(i)]);
    Rational term = moebius_to_top(lab);
    for (const Word& part : parts) {
      if (!part.empty()) term *= moments.at(part);
    }
    total += term;
  });
  return total;
}

// ---------------------------------------------------------------------------

FreeProduct::FreeProduct(const MomentSequence& family_a, const MomentSequence& family_b)
    : kappa_a_(moments_to_cumulants(family_a)), kappa_b_(moments_to_cumulants(family_b)) {}

int FreeProduct::order() const { return std::min(kappa_a_.order(), kappa_b_.order()); }

Rational FreeProduct::moment(std::span<const MixedLetter> word) const {
  const int n = static_cast<int>(word.size());
  if (n == 0) return 1;
  for (const auto& [family, letter] : word) {
    const MomentSequence& k = family == 0 ? kappa_a_ : kappa_b_;
    if ((family != 0 && family != 1) || letter < 0 || letter >= k.alphabet()) {
      throw std::invalid_argument("free_mixed_moments: letter outside both alphabets");
    }
  }
  if (n > kMaxMixedOrder || n > order()) {
    throw std::invalid_argument("free_mixed_moments: word longer than the available order");
  }
  Rational total = 0;
  std::vector<Word> parts;
  std::vector<int> family_of(static_cast<std::size_t>(n));
  for_each_nc_partition(n, [&](std::span<const int> lab) {
    parts.assign(static_cast<std::size_t>(n), Word{});
    std::ranges::fill(family_of, -1);
    for (int i = 0; i < n; ++i) {
      const auto b = static_cast<std::size_t>(lab[static_cast<std::size_t>(i)]);
      const int fam = word[static_cast<std::size_t>(i)].first;
      if (family_of[b] >= 0 && family_of[b] != fam) return;  // mixed cumulants vanish
      family_of[b] = fam;
      parts[b].push_back(word[static_cast<std::size_t>(i)].second);
    }
    Rational term = 1;
    for (std::size_t b = 0; b < parts.size() && sgn(term) != 0; ++b) {
      if (parts[b].empty()) continue;
      term *= (family_of[b] == 0 ? kappa_a_ : kappa_b_).at(parts[b]);
    }
    total += term;
  });
  return total;
}

Rational free_mixed_moments(const MomentSequence& family_a, const MomentSequence& family_b,
                            std::span<const MixedLetter> word, int order_cap) {
  if (order_cap < 1 || order_cap > kMaxMixedOrder) {
    throw std::invalid_argument("free_mixed_moments: order cap must be in [1, 10]");
  }
  if (static_cast<int>(word.size()) > order_cap) {
    throw std::invalid_argument("free_mixed_moments: word longer than order cap");
  }
  return FreeProduct(family_a, family_b).moment(word);
}

std::vector<Word> all_words(int alphabet, int length) {
  std::vector<Word> out;
  if (length < 0) return out;
  Word w(static_cast<std::size_t>(length), 0);
  while (true) {
    out.push_back(w);
    int pos = length - 1;
    while (pos >= 0 && w[static_cast<std::size_t>(pos)] == alphabet - 1) {
      w[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++w[static_cast<std::size_t>(pos)];
  }
  return out;
}

}  // namespace dtlab::ncpart
