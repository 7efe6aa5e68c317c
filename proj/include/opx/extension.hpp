#ifndef OPX_EXTENSION_HPP
#define OPX_EXTENSION_HPP

// The extension morphism of an operad map phi: P -> Q over f: A -> B, the
// categorical-extension decision procedure, the factorization oracle, the
// monochrome special case, and the maximal-sieve shortcut.
//
// The source P ◁_{⌞P⌟} (f̄ ◁ ⌞Q⌟) is realized as the composite product of
// P's collection with the unary collection Y(b;a) := Q(b; f(a)), quotiented by
// the symmetric relations plus the middle relation generated by single
// insertions of unary P-operations:
//   (p ∘_i u, sigma, q̄) ~ (p, sigma, q̄[i -> mu_Q(phi(u), q_i)]).
// The morphism sends [(p, sigma, q̄)] to sigma^{-1} * mu_Q(phi(p), q̄), an
// element of Q(b̄; f(a)).

#include "opx/operad.hpp"

namespace opx {

struct ExtensionMorphism {
  OperadMap phi;
  CollPtr Y;                                 // unary Q-collection over (B, A)
  TruncationWindow window;                   // source window over (B, A)
  std::shared_ptr<CompositeProduct> source;  // quotient incl. middle relations

  // Image of a source class: an element of Q at (b̄; f(a)).
  ElemRef apply(const ElemRef& cls) const;
  // Target profile of a source profile.
  Profile targetProfile(const Profile& p) const;
};

ExtensionMorphism extensionMorphism(const OperadMap& phi);

struct ExtensionReport {
  enum class Verdict { Yes, No, Indeterminate };
  Verdict verdict = Verdict::Indeterminate;

  struct ProfileEntry {
    Profile profile;       // source profile (b̄; a)
    std::string status;    // bijection | not-injective | not-surjective | truncated
    std::string witness;   // offending element/class names, if any
    bool clean = false;    // no truncation boundary involved
  };
  std::vector<ProfileEntry> entries;  // all non-bijection or unclean profiles
  long profilesChecked = 0;
  long bijections = 0;

  // Present iff verdict == Yes: per source profile, target element index in
  // Q(b̄; f(a)) -> source class index.
  std::map<Profile, std::vector<int>> factorization;

  std::string verdictStr() const {
    switch (verdict) {
      case Verdict::Yes: return "yes";
      case Verdict::No: return "no";
      default: return "indeterminate";
    }
  }
};

// Decides categorical extension on every window profile. A "no" is only
// issued from a profile with no truncation exposure; otherwise indeterminate.
ExtensionReport isCategoricalExtension(const OperadMap& phi);

// For a yes verdict: the canonical representative (p, sigma, unary list) of
// the unique class mapping to q, where q indexes Q(b̄; f(a)) and sourceProfile
// is (b̄; a). Throws DomainError if the verdict is not yes.
CompositeElement factorize(const ExtensionMorphism& ext, const ExtensionReport& report,
                           const Profile& sourceProfile, int q);

// Monochrome special case, computed semi-independently: raws are aligned
// pairs (p, q̄) with identity matching, quotiented by simultaneous
// permutations and middle moves only.
ExtensionReport::Verdict isMonoidalExtension(const OperadMap& phi);

struct SieveReport {
  bool sieve = false;
  std::string failedCondition;  // "fully-faithful" or "ideal", with witness
};

// Maximal-sieve shortcut for injective color maps: components bijective
// (fully faithful) and no nonempty Q-carrier over an image output color with
// an input color outside the image (ideal condition).
SieveReport checkMaximalSieve(const OperadMap& phi);

}  // namespace opx

#endif  // OPX_EXTENSION_HPP
