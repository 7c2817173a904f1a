#ifndef ENVLAB_BITSET_HPP
#define ENVLAB_BITSET_HPP

#include <cstdint>
#include <cstddef>
#include <functional>
#include <vector>

namespace envlab {

// Fixed-width bitset with value semantics. Spaces in this library range from
// a handful of points to a few hundred (materialised opens lattices), so the
// width is a runtime parameter.
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(int n) : n_(n), blocks_((n + 63) / 64, 0) {}

  int universe_size() const { return n_; }

  bool test(int i) const { return (blocks_[i >> 6] >> (i & 63)) & 1; }
  void set(int i) { blocks_[i >> 6] |= (std::uint64_t{1} << (i & 63)); }
  void reset(int i) { blocks_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

  int count() const {
    int c = 0;
    for (auto b : blocks_) c += __builtin_popcountll(b);
    return c;
  }
  bool any() const {
    for (auto b : blocks_)
      if (b) return true;
    return false;
  }
  bool none() const { return !any(); }

  Bitset& operator|=(const Bitset& o) {
    for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] |= o.blocks_[i];
    return *this;
  }
  Bitset& operator&=(const Bitset& o) {
    for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] &= o.blocks_[i];
    return *this;
  }
  friend Bitset operator|(Bitset a, const Bitset& b) { return a |= b; }
  friend Bitset operator&(Bitset a, const Bitset& b) { return a &= b; }

  Bitset complement() const {
    Bitset r(*this);
    for (auto& b : r.blocks_) b = ~b;
    r.trim();
    return r;
  }
  // Set difference: elements of *this not in o.
  Bitset minus(const Bitset& o) const {
    Bitset r(*this);
    for (std::size_t i = 0; i < blocks_.size(); ++i)
      r.blocks_[i] &= ~o.blocks_[i];
    return r;
  }

  bool subset_of(const Bitset& o) const {
    for (std::size_t i = 0; i < blocks_.size(); ++i)
      if (blocks_[i] & ~o.blocks_[i]) return false;
    return true;
  }
  bool intersects(const Bitset& o) const {
    for (std::size_t i = 0; i < blocks_.size(); ++i)
      if (blocks_[i] & o.blocks_[i]) return true;
    return false;
  }

  friend bool operator==(const Bitset& a, const Bitset& b) {
    return a.n_ == b.n_ && a.blocks_ == b.blocks_;
  }
  friend bool operator!=(const Bitset& a, const Bitset& b) { return !(a == b); }
  // Arbitrary total order, used for map keys only.
  friend bool operator<(const Bitset& a, const Bitset& b) {
    if (a.n_ != b.n_) return a.n_ < b.n_;
    return a.blocks_ < b.blocks_;
  }

  std::vector<int> members() const {
    std::vector<int> out;
    for (int i = 0; i < n_; ++i)
      if (test(i)) out.push_back(i);
    return out;
  }

  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < blocks_.size(); ++w) {
      std::uint64_t b = blocks_[w];
      while (b) {
        int i = static_cast<int>(w * 64) + __builtin_ctzll(b);
        f(i);
        b &= b - 1;
      }
    }
  }

  std::size_t hash() const {
    std::size_t h = std::hash<int>{}(n_);
    for (auto b : blocks_) h = h * 1099511628211ULL + std::hash<std::uint64_t>{}(b);
    return h;
  }

  static Bitset full(int n) {
    Bitset r(n);
    for (auto& b : r.blocks_) b = ~std::uint64_t{0};
    r.trim();
    return r;
  }
  static Bitset single(int n, int i) {
    Bitset r(n);
    r.set(i);
    return r;
  }

 private:
  void trim() {
    int rem = n_ & 63;
    if (rem && !blocks_.empty())
      blocks_.back() &= (std::uint64_t{1} << rem) - 1;
  }
  int n_ = 0;
  std::vector<std::uint64_t> blocks_;
};

struct BitsetHash {
  std::size_t operator()(const Bitset& b) const { return b.hash(); }
};

}  // namespace envlab

#endif  // ENVLAB_BITSET_HPP
