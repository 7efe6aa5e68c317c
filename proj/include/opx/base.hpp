#ifndef OPX_BASE_HPP
#define OPX_BASE_HPP

// Ground-level vocabulary: colors, profiles, permutations, truncation windows
// and the structured error types shared by every module. Everything here is a
// plain value; all operations are pure.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace opx {

using Color = std::string;

// A permutation of {0,...,n-1}, stored as its image list: sigma[i] is where
// position i is sent when reading "sigma applied to a list" as
// (l sigma)[i] = l[sigma[i]].
using Perm = std::vector<int>;

inline Perm permIdentity(int n) {
  Perm p(n);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

inline bool permIsIdentity(const Perm& p) {
  for (int i = 0; i < static_cast<int>(p.size()); ++i)
    if (p[i] != i) return false;
  return true;
}

// Function composition (p ∘ q)(i) = p[q[i]].
inline Perm permCompose(const Perm& p, const Perm& q) {
  Perm r(q.size());
  for (size_t i = 0; i < q.size(); ++i) r[i] = p[q[i]];
  return r;
}

inline Perm permInverse(const Perm& p) {
  Perm r(p.size());
  for (int i = 0; i < static_cast<int>(p.size()); ++i) r[p[i]] = i;
  return r;
}

inline std::vector<Perm> allPerms(int n) {
  std::vector<Perm> out;
  Perm p = permIdentity(n);
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

inline Perm transposition(int n, int i, int j) {
  Perm p = permIdentity(n);
  std::swap(p[i], p[j]);
  return p;
}

inline std::string permStr(const Perm& p) {
  std::string s = "[";
  for (size_t i = 0; i < p.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(p[i]);
  }
  return s + "]";
}

struct Profile {
  std::vector<Color> inputs;
  Color output;

  auto operator<=>(const Profile&) const = default;

  int arity() const { return static_cast<int>(inputs.size()); }

  std::string str() const {
    std::string s = "(";
    for (size_t i = 0; i < inputs.size(); ++i) {
      if (i) s += ",";
      s += inputs[i];
    }
    s += ";" + output + ")";
    return s;
  }
};

// Applies sigma to the input list: result.inputs[i] = inputs[sigma[i]].
inline Profile permuteProfile(const Profile& p, const Perm& sigma) {
  Profile r;
  r.output = p.output;
  r.inputs.resize(p.inputs.size());
  for (size_t i = 0; i < sigma.size(); ++i) r.inputs[i] = p.inputs[sigma[i]];
  return r;
}

struct ColorSet {
  std::vector<Color> colors;

  bool contains(const Color& c) const {
    return std::find(colors.begin(), colors.end(), c) != colors.end();
  }
  size_t size() const { return colors.size(); }
};

// Finitization contract: a computation may only touch profiles admitted by the
// window. maxSlots optionally bounds a per-profile weight (used by the
// graph-built operads, where the weight of a profile is the total number of
// half-edge slots it describes); weight<=0 disables the bound.
struct TruncationWindow {
  ColorSet colorsIn;
  ColorSet colorsOut;
  int maxArity = 0;
  int maxSlots = 0;                                  // 0 = unbounded
  std::function<int(const Profile&)> slotWeight;     // used only when maxSlots > 0

  bool admits(const Profile& p) const {
    if (p.arity() > maxArity) return false;
    if (!colorsOut.contains(p.output)) return false;
    for (const auto& c : p.inputs)
      if (!colorsIn.contains(c)) return false;
    if (maxSlots > 0 && slotWeight && slotWeight(p) > maxSlots) return false;
    return true;
  }
};

// A computation needed a profile outside the window. Loud by design: callers
// either propagate (hard error) or convert to an "indeterminate" verdict.
class TruncationError : public std::runtime_error {
 public:
  Profile profile;
  explicit TruncationError(const Profile& p, const std::string& context = "")
      : std::runtime_error("truncation: profile " + p.str() +
                           " is outside the window" +
                           (context.empty() ? "" : " (" + context + ")")),
        profile(p) {}
};

class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Deterministic, platform-independent seeded randomness helper.
struct Rng {
  uint64_t state;
  explicit Rng(uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
  uint64_t next() {
    // splitmix64: stable across platforms, good enough for sampling tests.
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // Uniform-ish integer in [0, n); n > 0.
  int below(int n) { return static_cast<int>(next() % static_cast<uint64_t>(n)); }
};

// Small union-find used by every quotient computation in the artifact.
class UnionFind {
 public:
  explicit UnionFind(size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) const {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }
  size_t size() const { return parent_.size(); }

 private:
  mutable std::vector<int> parent_;
  std::vector<int> rank_;
};

}  // namespace opx

#endif  // OPX_BASE_HPP
