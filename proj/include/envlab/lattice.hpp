#ifndef ENVLAB_LATTICE_HPP
#define ENVLAB_LATTICE_HPP

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "envlab/finspace.hpp"

namespace envlab {

class Lattice;
using LatticePtr = std::shared_ptr<const Lattice>;

// A finite space verified to be a complete lattice, with cached binary
// meet/join tables. Finite completeness reduces to pairwise meets/joins plus
// a top and a bottom.
class Lattice {
 public:
  static LatticePtr from_space(const SpacePtr& s, const Config& cfg = {}) {
    if (s->size() > cfg.cap_lattice)
      throw CapExceeded("lattice", cfg.cap_lattice, s->size());
    auto lat = std::shared_ptr<Lattice>(new Lattice());
    lat->space_ = s;
    int n = s->size();
    lat->meet_.assign(n, std::vector<int>(n, -1));
    lat->join_.assign(n, std::vector<int>(n, -1));
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        int m = bound(*s, i, j, /*meet=*/true);
        int v = bound(*s, i, j, /*meet=*/false);
        if (m < 0 || v < 0)
          throw NotALattice("elements '" + s->name(i) + "' and '" + s->name(j) +
                            "' lack a " + (m < 0 ? "meet" : "join"));
        lat->meet_[i][j] = lat->meet_[j][i] = m;
        lat->join_[i][j] = lat->join_[j][i] = v;
      }
    lat->bottom_ = lat->top_ = 0;
    for (int i = 1; i < n; ++i) {
      lat->bottom_ = lat->meet_[lat->bottom_][i];
      lat->top_ = lat->join_[lat->top_][i];
    }
    return lat;
  }

  const SpacePtr& space() const { return space_; }
  int size() const { return space_->size(); }
  bool leq(int a, int b) const { return space_->le(a, b); }
  int meet(int a, int b) const { return meet_[a][b]; }
  int join(int a, int b) const { return join_[a][b]; }
  int top() const { return top_; }
  int bottom() const { return bottom_; }

  // Meet over a subset; the empty meet is the top element.
  int meet_of(const Bitset& sub) const {
    int acc = top_;
    sub.for_each([&](int i) { acc = meet_[acc][i]; });
    return acc;
  }
  // Join over a subset; the empty join is the bottom element.
  int join_of(const Bitset& sub) const {
    int acc = bottom_;
    sub.for_each([&](int i) { acc = join_[acc][i]; });
    return acc;
  }

 private:
  Lattice() = default;

  // Greatest lower / least upper bound of {i, j} if it exists.
  static int bound(const FinSpace& s, int i, int j, bool meet) {
    const Bitset& ci = meet ? s.down_of(i) : s.up_of(i);
    const Bitset& cj = meet ? s.down_of(j) : s.up_of(j);
    Bitset cand = ci & cj;
    int best = -1;
    cand.for_each([&](int c) {
      if (best == -1) {
        best = c;
        return;
      }
      // keep the extremal candidate if comparable
      bool better = meet ? s.le(best, c) : s.le(c, best);
      if (better) best = c;
    });
    if (best < 0) return -1;
    // verify extremality against every candidate
    bool ok = true;
    cand.for_each([&](int c) {
      bool dominated = meet ? s.le(c, best) : s.le(best, c);
      if (!dominated) ok = false;
    });
    return ok ? best : -1;
  }

  SpacePtr space_;
  std::vector<std::vector<int>> meet_, join_;
  int top_ = 0, bottom_ = 0;
};

// The opens of a space as a complete lattice (inclusion order).
inline LatticePtr opens_lattice(const OpensLattice& ol, const Config& cfg = {}) {
  return Lattice::from_space(ol.as_space(), cfg);
}

}  // namespace envlab

#endif  // ENVLAB_LATTICE_HPP
