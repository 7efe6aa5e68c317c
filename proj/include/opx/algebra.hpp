#ifndef OPX_ALGEBRA_HPP
#define OPX_ALGEBRA_HPP

// Finite algebras over an operad: law checking, hom enumeration, the initial
// algebra, restriction along an operad map, free algebras, induction (the left
// adjoint of restriction), finite coproducts via the reflexive-coequalizer
// presentation, and the multilinear-summand cross-check of the extension
// morphism.

#include "opx/compose.hpp"
#include "opx/extension.hpp"
#include "opx/operad.hpp"

namespace opx {

struct FiniteAlgebra {
  OperadPtr P;
  std::map<Color, std::vector<std::string>> carriers;
  // action(p, x̄): index in the carrier of p's output; x̄[j] indexes the
  // carrier of p's j-th input color.
  std::function<int(const ElemRef&, const std::vector<int>&)> action;

  size_t sizeAt(const Color& a) const {
    auto it = carriers.find(a);
    return it == carriers.end() ? 0 : it->second.size();
  }
  const std::string& nameAt(const Color& a, int i) const { return carriers.at(a)[i]; }
  int act(const ElemRef& p, const std::vector<int>& xs) const { return action(p, xs); }
};

using AlgPtr = std::shared_ptr<const FiniteAlgebra>;

// Unit identity, substitution associativity, and equivariance, exhaustively
// over the operad's stored carriers (subject to the instance budget).
LawReport checkAlgebraLaws(const FiniteAlgebra& A, long maxInstances = 2000000);

struct AlgebraMap {
  AlgPtr src, dst;
  std::map<Color, std::vector<int>> components;  // per color: src index -> dst index

  int apply(const Color& a, int x) const { return components.at(a)[x]; }
};

// Empty list iff the map commutes with every action instance; otherwise
// capped violation messages.
std::vector<std::string> checkAlgebraMap(const AlgebraMap& h);

// All P-algebra maps A -> B, by backtracking over per-color function tables
// with action-compatibility pruning. Deterministic order.
std::vector<AlgebraMap> enumerateAlgebraMaps(AlgPtr A, AlgPtr B);

// Carrier at a is P(;a); action is operad substitution.
AlgPtr initialAlgebra(OperadPtr P);

// The unique map out of initialAlgebra(P).
AlgebraMap initialMap(AlgPtr init, AlgPtr B);

// phi^*: carrier at a is B's carrier at f(a); p acts through phi(p).
AlgPtr restrictAlgebra(const OperadMap& phi, AlgPtr B);

// A free algebra or a quotient-presented algebra carries its coequalizer
// presentation: per color a, the classes of the composite product at (;a).
struct PresentedAlgebra {
  AlgPtr alg;
  std::shared_ptr<CompositeProduct> pres;  // carriers = pres->reps() at (;a)

  // The class of a raw (outer, sigma-empty, arity-zero inners).
  int classOf(const Color& a, const CompositeElement& raw) const;
  const CompositeElement& repOf(const Color& a, int cls) const;
};

// F_Q(X): carrier at b is (Q <| X)(;b) for the arity-zero collection X;
// generators[a] lists the carrier indices of the X-elements at color a.
struct FreeAlgebra {
  PresentedAlgebra pa;
  std::map<Color, std::vector<std::string>> generators;
  int generatorIndex(const Color& a, int g) const;  // index in the carrier at a
};
FreeAlgebra freeAlgebra(OperadPtr Q, const std::map<Color, std::vector<std::string>>& X);

// The unique algebra map F_Q(X) -> B extending a choice of images for the
// generators.
AlgebraMap freeExtension(const FreeAlgebra& F, AlgPtr B,
                         const std::map<Color, std::vector<int>>& genImages);

// phi_!: carriers are the classes of (Q <| f) <|_P A at (;b); the quotient is
// by the simultaneous symmetric moves and by every insertion of a P-operation
// (acting on A versus composing through phi).
PresentedAlgebra induceAlgebra(const OperadMap& phi, AlgPtr A);

// Index bookkeeping for a disjoint union of algebra carriers.
struct SumIndex {
  std::map<Color, std::vector<int>> offsets;  // per color: base index per summand
  int summands = 0;
  int global(const Color& a, int i, int local) const { return offsets.at(a)[i] + local; }
  std::pair<int, int> split(const Color& a, int g) const {
    const auto& off = offsets.at(a);
    int i = 0;
    while (i + 1 < summands && off[i + 1] <= g) ++i;
    return {i, g - off[i]};
  }
};

// Finite coproducts by Rezk's reflexive coequalizer: classes of
// (p, x̄ with entries drawn from the disjoint union of the A_i), quotiented by
// symmetric moves and by collapsing any single-summand block through its own
// algebra action.
struct AlgebraCoproduct {
  PresentedAlgebra pa;
  std::vector<AlgebraMap> injections;
  std::shared_ptr<const SumIndex> sumIndex;
  // Mediating map for a cocone (h_i: A_i -> B); empty optional if some class
  // receives inconsistent values (cannot happen for a genuine cocone).
  std::optional<AlgebraMap> mediate(AlgPtr B, const std::vector<AlgebraMap>& cocone) const;
};
AlgebraCoproduct algebraCoproduct(OperadPtr P, const std::vector<AlgPtr>& As);

// ---- multilinear decomposition ---------------------------------------------

enum class MultilinearTag { Mul, Non };

// Tag of a coproduct-of-free-restrictions raw (p, x̄): Mul iff every entry x_j
// is an arity-one free element (exactly one generator inside) and the summand
// indices j -> i are a bijection onto the k coproduct summands.
// Homogeneity (class invariance of the tag) is rechecked by the summand check.
struct SummandReport {
  bool agrees = false;            // mul summand coincides with the extension component
  bool homogeneous = false;       // tag constant on every coequalizer class
  long mulClasses = 0;            // classes in the mul summand at (;a)
  long extensionClasses = 0;      // classes of the extension source at (b̄;a)
  std::vector<std::string> notes; // mismatch witnesses, capped
};

// Builds coprod_i phi^* F_Q(b_i) -> phi^* F_Q({b_1,...,b_k}) via the coproduct
// universal property, extracts the multilinear summand at (;a), and compares
// it with the extension morphism component at (b̄;a): same class count, and
// the comparison map's restriction agrees with ext.apply element by element
// (including the same surjectivity failures).
SummandReport comparisonSummandCheck(const OperadMap& phi, const std::vector<Color>& bbar,
                                     const Color& a);

// ---- stock lawful algebras ---------------------------------------------------

// Every carrier is the given commutative monoid and every operation acts by
// the product of its inputs; lawful over any operad (units, equivariance and
// associativity all reduce to the monoid laws). mult must be commutative,
// associative and unital at `unit`; validated on construction.
AlgPtr multiplicativeAlgebra(OperadPtr P, std::vector<std::string> names, int unit,
                             std::vector<std::vector<int>> mult);

// A seeded commutative monoid with `size` elements (unit 0), drawn uniformly
// from the tables found by rejection; deterministic per (seed, size).
std::vector<std::vector<int>> randomCommutativeMonoid(Rng& rng, int size);

}  // namespace opx

#endif  // OPX_ALGEBRA_HPP
