#ifndef OPX_COMPOSE_HPP
#define OPX_COMPOSE_HPP

// The composition product X ◁ Y of symmetric collections, computed as an
// explicit quotient of composite elements by the generated symmetric/coend
// relations, with canonical class representatives via union-find. Also: Day
// powers, the arity-one internal hom ⟨X,Z⟩ with its adjunction, collections of
// a color function with their unit/counit, unitors, associators, and a generic
// reflexive-coequalizer quotient.

#include <unordered_map>

#include "opx/collection.hpp"

namespace opx {

// One representative of (X ◁ Y)(ā;c): an outer operation x ∈ X(b̄;c), inner
// operations y_j ∈ Y(w̄_j;b_j), and the matching permutation sigma ∈ Σ_n with
// concat(w̄)[k] = ā[sigma[k]].
struct CompositeElement {
  ElemRef outer;
  Perm sigma;
  std::vector<ElemRef> inners;

  auto operator<=>(const CompositeElement&) const = default;

  std::vector<Color> concatInputs() const {
    std::vector<Color> w;
    for (const auto& y : inners)
      w.insert(w.end(), y.profile.inputs.begin(), y.profile.inputs.end());
    return w;
  }

  // Result profile (ā; c): ā[sigma[k]] = concat(w̄)[k].
  Profile resultProfile() const {
    auto w = concatInputs();
    Profile p;
    p.output = outer.profile.output;
    p.inputs.resize(w.size());
    for (size_t k = 0; k < w.size(); ++k) p.inputs[sigma[k]] = w[k];
    return p;
  }
};

// Hook for extra profile-preserving relations (the ◁_Q middle quotient, the
// Rezk coproduct relations, ...): called once per result profile with the raw
// element list; call relate(a, b) for each extra generating relation.
using RelationHook = std::function<void(
    const Profile&, const std::vector<CompositeElement>&,
    const std::function<void(const CompositeElement&, const CompositeElement&)>&)>;

// Encoding-level variant for large quotients: called once per result profile
// with the shared tables and the raw encodings; call relate(i, enc) to
// identify raw i with the raw whose encoding is enc.
using EncodedRelationHook =
    std::function<void(const Profile&, const struct CompData&,
                       const std::vector<const std::vector<int>*>&,
                       const std::function<void(int, const std::vector<int>&)>&)>;

// Shared quotient tables (also captured by the result collection's action).
// Raw elements are stored only as compact integer encodings
// [outerProfileId, outerIdx, innerProfileId, innerIdx, ..., sigma...] so the
// union-find quotient never touches profile color strings; decode through
// CompositeProduct::rawsAt when the full element is needed.
struct CompData {
  // Canonical representative of each class, per result profile.
  std::map<Profile, std::vector<CompositeElement>> reps;
  // Interned profiles shared by the encodings.
  std::map<Profile, int> profId;
  std::vector<Profile> profiles;
  std::vector<int> profArity;
  struct IntVecHash {
    size_t operator()(const std::vector<int>& v) const {
      size_t h = 1469598103934665603ull;
      for (int x : v) {
        h ^= static_cast<size_t>(static_cast<unsigned>(x));
        h *= 1099511628211ull;
      }
      return h;
    }
  };
  struct Classes {
    std::unordered_map<std::vector<int>, int, IntVecHash> index;  // encoding -> raw index
    std::vector<const std::vector<int>*> enc;  // raw index -> encoding (into index keys)
    std::vector<int> classOfRaw;
  };
  std::map<Profile, Classes> classes;
};

// Decode one raw encoding back into a composite element.
CompositeElement decodeRaw(const CompData& d, const std::vector<int>& enc);

struct CompositeProduct {
  CollPtr X, Y;
  CollPtr result;  // carrier = coend classes, deterministic canonical order
  std::shared_ptr<const CompData> data;

  // Decoded raw elements at a result profile, in quotient order; the class of
  // raw i is data->classes.at(p).classOfRaw[i].
  std::vector<CompositeElement> rawsAt(const Profile& p) const;
  const std::map<Profile, std::vector<CompositeElement>>& reps() const { return data->reps; }

  int classIndex(const CompositeElement& e) const;
  ElemRef classRef(const CompositeElement& e) const {
    Profile p = e.resultProfile();
    return ElemRef{p, classIndex(e)};
  }
  const CompositeElement& rep(const ElemRef& classElem) const;
};

// Computes X ◁ Y restricted to the window (result profiles outside the window
// are not materialized; profiles *needed* but outside X's or Y's windows raise
// TruncationError).
CompositeProduct composeProduct(CollPtr X, CollPtr Y, const TruncationWindow& window,
                                const RelationHook& extra = nullptr,
                                const EncodedRelationHook& encodedExtra = nullptr);

// Day power Y^{b̄}(ā): matchings of ā onto blocks for b̄ with inner operations,
// modulo the inner symmetric relations only. Returns canonical class
// representatives (pairs of sigma and inner list).
std::vector<CompositeElement> dayPower(CollPtr Y, const std::vector<Color>& bbar,
                                       const std::vector<Color>& abar);

// ---- arity-one internal hom -------------------------------------------------

struct AngleHom {
  CollPtr X;  // arity-one, over (B,C)
  CollPtr Z;  // over (A,C)
  CollPtr coll;  // ⟨X,Z⟩ over (A,B)
  // tables[p][i]: for output color c of C, the function X(b;c) -> Z(ā;c).
  std::map<Profile, std::vector<std::map<Color, std::vector<int>>>> tables;

  int indexOfTable(const Profile& p, const std::map<Color, std::vector<int>>& t) const;
};

AngleHom angleHom(CollPtr X, CollPtr Z, const TruncationWindow& windowAB,
                  const ColorSet& outputColors);

// The adjunction Hom(X ◁ Y, Z) ≅ Hom(Y, ⟨X,Z⟩) realized on explicit maps.
// XY must be composeProduct(X, Y, ...) for the same X.
CollectionMap angleTranspose(const AngleHom& hom, const CompositeProduct& XY, CollPtr Y,
                             const CollectionMap& g);          // g: X◁Y -> Z
CollectionMap angleUntranspose(const AngleHom& hom, const CompositeProduct& XY, CollPtr Y,
                               const CollectionMap& ghat);     // ĝ: Y -> ⟨X,Z⟩

// ---- collections of a color function ---------------------------------------

struct FunctionCollections {
  std::function<Color(const Color&)> f;
  ColorSet A, B;
  CollPtr fwd;   // f  over (A,B): singleton at (a; f(a))
  CollPtr bwd;   // f̄ over (B,A): singleton at (f(a); a)
  // unit 1_A -> f̄ ◁ f and counit f ◁ f̄ -> 1_B, with their products.
  std::shared_ptr<CompositeProduct> barF_F;  // f̄ ◁ f, over (A,A)
  std::shared_ptr<CompositeProduct> f_barF;  // f ◁ f̄, over (B,B)
  CollectionMap unit;    // 1_A -> f̄◁f
  CollectionMap counit;  // f◁f̄ -> 1_B  (the fold map)
  CollPtr unitA;         // 1_A
  CollPtr unitB;         // 1_B
};

FunctionCollections functionCollections(const ColorSet& A, const ColorSet& B,
                                        std::function<Color(const Color&)> f);

// Both triangle identities for f ⊣ f̄, checked by explicit element chases
// through the composition products. Returns violations (empty = pass).
std::vector<std::string> checkTriangleIdentities(const FunctionCollections& fc);

// ---- unitors / associator ----------------------------------------------------

// For XU = composeProduct(X, unitCollection, ...): the bijection X◁1 ≅ X.
// Returns per-class image in X; throws on malformed input.
ElemRef rightUnitor(const CompositeProduct& XU, const ElemRef& classElem);
// For UX = composeProduct(unitCollection, X, ...): 1◁X ≅ X.
ElemRef leftUnitor(const CompositeProduct& UX, const ElemRef& classElem);

// The canonical bijection ((X◁Y)◁Z)(ā;c) -> (X◁(Y◁Z))(ā;c).
// XY_Z must be built over XY.result, X_YZ over YZ.result.
ElemRef associate(const CompositeProduct& XY, const CompositeProduct& XY_Z,
                  const CompositeProduct& YZ, const CompositeProduct& X_YZ,
                  const ElemRef& classElem);

// ---- generic coequalizer ------------------------------------------------------

struct Coequalizer {
  CollPtr quotient;
  CollectionMap projection;                     // target -> quotient
  std::map<Profile, std::vector<int>> repOf;    // class -> representative index in target
};

// Coequalizes a parallel pair f, g: Z ⇉ W of profile-preserving collection
// maps by union-find on each carrier of W. The quotient action is the induced
// one (well-definedness is the caller's obligation, as for any coequalizer of
// equivariant maps; checkActionLaws on the quotient verifies it).
Coequalizer coequalize(const CollectionMap& f, const CollectionMap& g);

// Universal property: if cand coequalizes (f,g), returns the unique mediating
// map from the quotient; nullopt if cand does not coequalize or descends
// inconsistently.
std::optional<CollectionMap> mediate(const Coequalizer& q, const CollectionMap& f,
                                     const CollectionMap& g, const CollectionMap& cand);

}  // namespace opx

#endif  // OPX_COMPOSE_HPP
