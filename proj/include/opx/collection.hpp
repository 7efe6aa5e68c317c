#ifndef OPX_COLLECTION_HPP
#define OPX_COLLECTION_HPP

// Symmetric colored collections over finite sets: a carrier set per profile
// plus a contravariant action of the symmetric groups permuting inputs
// (id* = id, sigma* tau* = (tau sigma)*).

#include <memory>

#include "opx/base.hpp"

namespace opx {

class SymmetricCollection;
using CollPtr = std::shared_ptr<const SymmetricCollection>;

// (profile, index into its carrier) — the identity of one operation.
struct ElemRef {
  Profile profile;
  int idx = -1;
  auto operator<=>(const ElemRef&) const = default;
};

class SymmetricCollection {
 public:
  TruncationWindow window;

  // Every stored profile is admitted by the window. Profiles absent from the
  // table but admitted by the window have empty carriers.
  std::map<Profile, std::vector<std::string>> carriers;

  // action(p, sigma, x): index of sigma*(x) inside the carrier of
  // permuteProfile(p, sigma). Required for every stored profile.
  std::function<int(const Profile&, const Perm&, int)> action;

  // ---- queries -------------------------------------------------------------

  // Loud: throws TruncationError outside the window.
  const std::vector<std::string>& carrierAt(const Profile& p) const {
    if (!window.admits(p)) throw TruncationError(p, "carrier lookup");
    auto it = carriers.find(p);
    if (it != carriers.end()) return it->second;
    static const std::vector<std::string> kEmpty;
    return kEmpty;
  }

  size_t sizeAt(const Profile& p) const { return carrierAt(p).size(); }

  int act(const Profile& p, const Perm& sigma, int x) const {
    const auto& car = carrierAt(p);
    if (x < 0 || x >= static_cast<int>(car.size()))
      throw DomainError("act: unknown element " + std::to_string(x) + " at " + p.str());
    if (static_cast<int>(sigma.size()) != p.arity())
      throw DomainError("act: permutation size mismatch at " + p.str());
    if (permIsIdentity(sigma)) return x;
    int y = action(p, sigma, x);
    const auto& tcar = carrierAt(permuteProfile(p, sigma));
    if (y < 0 || y >= static_cast<int>(tcar.size()))
      throw DomainError("act: action image out of range at " + p.str());
    return y;
  }

  ElemRef act(const ElemRef& e, const Perm& sigma) const {
    return ElemRef{permuteProfile(e.profile, sigma), act(e.profile, sigma, e.idx)};
  }

  const std::string& nameOf(const ElemRef& e) const { return carrierAt(e.profile)[e.idx]; }

  int indexOfName(const Profile& p, const std::string& name) const {
    const auto& car = carrierAt(p);
    for (size_t i = 0; i < car.size(); ++i)
      if (car[i] == name) return static_cast<int>(i);
    throw DomainError("unknown element '" + name + "' at " + p.str());
  }

  size_t totalElements() const {
    size_t n = 0;
    for (const auto& [p, car] : carriers) n += car.size();
    return n;
  }

  bool isArityOne() const {
    for (const auto& [p, car] : carriers)
      if (!car.empty() && p.arity() != 1) return false;
    return true;
  }

  // ---- law checking --------------------------------------------------------

  // Returns the violations (empty = pass): id* = id, sigma* tau* = (tau sigma)*
  // and action images landing in the right carriers, exhaustively over stored
  // profiles. maxArityChecked bounds the |Sigma_n| blow-up.
  std::vector<std::string> checkActionLaws(int maxArityChecked = 5) const;
};

// Equivariant map of collections, possibly over different color sets: the
// profile translation says where a source profile lands.
struct CollectionMap {
  CollPtr src;
  CollPtr dst;
  std::function<Profile(const Profile&)> profileMap;  // identity when null
  std::function<int(const Profile&, int)> component;  // index in dst at profileMap(p)

  Profile mapProfile(const Profile& p) const { return profileMap ? profileMap(p) : p; }

  ElemRef apply(const ElemRef& e) const {
    return ElemRef{mapProfile(e.profile), component(e.profile, e.idx)};
  }

  // Equivariance violations, exhaustive over stored source profiles.
  std::vector<std::string> checkEquivariance(int maxArityChecked = 5) const;
};

// Convenience builders ---------------------------------------------------------

// Collection with trivial action derived from carrier names: the action must be
// supplied by `act`; when act is null the collection must be concentrated in
// arities 0 and 1 (where the action is forced).
SymmetricCollection makeCollection(
    TruncationWindow window, std::map<Profile, std::vector<std::string>> carriers,
    std::function<int(const Profile&, const Perm&, int)> act = nullptr);

// The unit collection 1_A: singleton in every (a;a), empty elsewhere.
SymmetricCollection unitCollection(const ColorSet& colors, int maxArity = 1);

}  // namespace opx

#endif  // OPX_COLLECTION_HPP
