#ifndef OPX_OPERAD_HPP
#define OPX_OPERAD_HPP

// Colored operads over finite sets: carriers + units + full simultaneous
// substitution, law checking, operad maps with their two adjoint
// presentations, underlying categories, positivization, and the module
// structures induced by a map. Also small builders used throughout the test
// surface: the terminal operad, endomorphism operads, and free operads on
// monochrome generators.

#include "opx/compose.hpp"

#include <optional>

namespace opx {

// A declared finiteness/grading guarantee: every nonempty carrier profile
// satisfies `admissible`, and composition respects it (e.g. a conserved
// quantity computed by `degree`).
struct GradingCertificate {
  std::string rule;  // human-readable statement of the relation
  std::function<int(const Profile&)> degree;
  std::function<bool(const Profile&)> admissible;
};

// Outcome of one substitution: either a carrier index at the composite
// profile, or an overflow/defect (result outside the window, or a composite
// falling outside the carriers, e.g. a closed component in a graph operad).
struct SubResult {
  bool ok = false;
  int value = -1;
  std::string reason;  // set when !ok
};

using SubFn = std::function<SubResult(const ElemRef&, const std::vector<ElemRef>&)>;

struct Operad {
  std::string name;
  ColorSet colors;
  CollPtr coll;                 // symmetric collection over (colors, colors)
  std::map<Color, int> units;   // color -> index in coll at (a;a)
  SubFn subFn;                  // full simultaneous substitution
  std::optional<GradingCertificate> grading;

  const TruncationWindow& window() const { return coll->window; }

  ElemRef unit(const Color& a) const;
  // The composite profile of a substitution instance (inputs concatenated in
  // block order).
  static Profile subProfile(const ElemRef& outer, const std::vector<ElemRef>& inners);
  // Substitution; checks window admission of the composite profile before
  // delegating to subFn.
  SubResult sub(const ElemRef& outer, const std::vector<ElemRef>& inners) const;
  // Same, but throws TruncationError on overflow.
  ElemRef subOrThrow(const ElemRef& outer, const std::vector<ElemRef>& inners) const;
  // Partial composition x ∘_i y, derived by padding with units.
  ElemRef composeAt(const ElemRef& x, int i, const ElemRef& y) const;
};

using OperadPtr = std::shared_ptr<const Operad>;

struct OperadMap {
  std::string name;
  OperadPtr src, dst;
  std::function<Color(const Color&)> colorMap;
  // component at a source profile: source carrier index -> target carrier
  // index at the mapped profile.
  std::function<int(const Profile&, int)> component;

  Profile mapProfile(const Profile& p) const;
  ElemRef apply(const ElemRef& e) const;
};

// Law reports: every violated instance is listed (up to a listing cap);
// overflow instances (windows not closed under the composite being tested)
// are counted separately and never conflated with violations.
struct LawReport {
  std::vector<std::string> violations;
  long violationCount = 0;
  std::vector<std::string> overflowSamples;
  long overflowCount = 0;
  long instancesChecked = 0;
  bool budgetExhausted = false;
  bool pass() const { return violationCount == 0 && !budgetExhausted; }
};

// Unitality, equivariance (against separately-checked action laws, adjacent
// transpositions generate), and associativity of nested substitution,
// exhaustive over all window-admitted instances up to maxInstances.
LawReport checkOperadLaws(const Operad& P, long maxInstances = 4000000000L);

// Units to units, equivariance of components, and the substitution square,
// exhaustive over window-admitted instances.
LawReport checkMapLaws(const OperadMap& phi, long maxInstances = 20000000);

// Validates units (present, correct profile) and that the grading certificate
// (if any) admits every nonempty carrier. Throws DomainError on failure.
Operad makeOperad(std::string name, ColorSet colors, CollPtr coll, std::map<Color, int> units,
                  SubFn subFn, std::optional<GradingCertificate> grading = std::nullopt);

OperadMap identityMap(OperadPtr P);

// The arity-one part of P with restricted units/substitution.
Operad underlyingCategory(const Operad& P);

// P_+ : empty carriers at empty-input profiles, everything else unchanged;
// iota is the inclusion P_+ -> P.
std::pair<OperadPtr, OperadMap> positivize(OperadPtr P);

// ---- adjoint presentations ---------------------------------------------------

// The two mates of an operad map phi: P -> Q along f ⊣ f̄:
//   chi: P -> f̄ ◁ (Q ◁ f)   and   psi: P ◁ f̄ -> f̄ ◁ Q.
struct AdjointPresentations {
  FunctionCollections fc;
  std::shared_ptr<CompositeProduct> Qf;      // Q ◁ f        over (A,B)
  std::shared_ptr<CompositeProduct> fbarQf;  // f̄ ◁ (Q ◁ f)  over (A,A)
  std::shared_ptr<CompositeProduct> Pfbar;   // P ◁ f̄        over (B,A)
  std::shared_ptr<CompositeProduct> fbarQ;   // f̄ ◁ Q        over (B,A)
  CollectionMap chi;  // P.coll -> fbarQf.result
  CollectionMap psi;  // Pfbar.result -> fbarQ.result
};

AdjointPresentations adjointPresentations(const OperadMap& phi);

// Verifies chi's and psi's commuting diagrams (unit and multiplication
// compatibility) by element chases, and the round-trip chi -> phi.
std::vector<std::string> checkAdjointPresentations(const OperadMap& phi,
                                                   const AdjointPresentations& ap);

// ---- induced modules ----------------------------------------------------------

// lambda: P ◁ (f̄◁Q) -> f̄◁Q (left P-action) and rho: (Q◁f) ◁ P -> Q◁f
// (right P-action) induced by phi.
struct InducedModules {
  std::shared_ptr<CompositeProduct> fbarQ;  // left-module carrier
  std::shared_ptr<CompositeProduct> Qf;     // right-module carrier
  std::shared_ptr<CompositeProduct> PM;     // P ◁ (f̄◁Q)
  std::shared_ptr<CompositeProduct> MP;     // (Q◁f) ◁ P
  CollectionMap lambda;  // PM.result -> fbarQ.result
  CollectionMap rho;     // MP.result -> Qf.result
};

InducedModules inducedModules(const OperadMap& phi);

// Unit triangles and associativity squares for both actions, by exhaustive
// element chases within the window.
std::vector<std::string> checkModuleLaws(const InducedModules& im, const OperadMap& phi,
                                         long maxInstances = 2000000);

// ---- builders ------------------------------------------------------------------

// One color, singleton carrier in every arity <= maxArity.
Operad terminalOperad(int maxArity);

// End(T): carriers at (ā;a) are all functions Π T(a_i) -> T(a); substitution
// is composition of functions.
Operad endomorphismOperad(const std::map<Color, std::vector<std::string>>& sets, int maxArity);

// Free one-color operad on generators of the given arities, truncated at
// maxArity. Elements are canonically-labelled generator trees.
struct FreeOperad {
  OperadPtr op;
  int generatorCount;
  // Carrier index of the bare generator g (identity leaf labelling) at its
  // own arity.
  std::function<int(int g)> generatorElement;
  // Evaluate element idx at the given arity in a target operad at a single
  // target color, given per-generator images (target carrier indices at the
  // monochrome profile of each generator's arity).
  std::function<ElemRef(const Operad& target, const Color& c, const std::vector<int>& genImages,
                        int arity, int idx)> evaluate;
};

FreeOperad freeOperad(const std::vector<int>& generatorArities, int maxArity);

// The operad map F -> target determined by generator images.
OperadMap freeOperadMap(const FreeOperad& F, OperadPtr target, const Color& targetColor,
                        const std::vector<int>& genImages);

// ---- shared iteration helper ----------------------------------------------------

// Enumerates inner tuples (one element of coll per outer input, outputs
// matching the outer inputs) whose composite profile the window admits.
void forEachInnerTuple(const SymmetricCollection& coll, const TruncationWindow& window,
                       const Profile& outer,
                       const std::function<void(const std::vector<ElemRef>&)>& fn,
                       const std::function<void(const Profile&)>& onOverflow = nullptr);

}  // namespace opx

#endif  // OPX_OPERAD_HPP
