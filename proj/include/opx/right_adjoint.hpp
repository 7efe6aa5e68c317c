#ifndef OPX_RIGHT_ADJOINT_HPP
#define OPX_RIGHT_ADJOINT_HPP

// The exceptional right adjoint phi_* on finite algebras: the underlying
// equivariant-family object (an end over unary P-operations), the Q-action
// obtained through the factorization oracle of a categorical extension, and
// the full adjunction verification phi^* -| phi_*.

#include "opx/algebra.hpp"
#include "opx/extension.hpp"

namespace opx {

// A point of the end over unary P-operations at base color `base`: for each
// source color a, a function table on the unary carrier Q(base; f(a)) with
// values in the algebra carrier at a. Stored extensionally.
struct EquivariantFamily {
  Color base;
  std::map<Color, std::vector<int>> values;  // a -> (index in Q(base; f(a)) -> A_a)

  std::vector<int> flatten() const;
  bool operator==(const EquivariantFamily& o) const {
    return base == o.base && values == o.values;
  }
};

// Whether g satisfies the end condition against every unary P-operation u:
// g_{a'}(phi(u) o q) = A(u)(g_a(q)). Violations are returned for reporting.
std::vector<std::string> endConditionViolations(const OperadMap& phi, const FiniteAlgebra& A,
                                                const EquivariantFamily& g);

// The underlying right adjoint: per base color, all families satisfying the
// end condition, enumerated by functional constraint propagation.
struct UnderlyingRightAdjoint {
  std::map<Color, std::vector<EquivariantFamily>> families;
  std::map<Color, std::map<std::vector<int>, int>> index;  // flattened -> position

  int indexOf(const Color& base, const EquivariantFamily& g) const;
};
UnderlyingRightAdjoint underlyingRightAdjoint(const OperadMap& phi, const FiniteAlgebra& A);

// The action of mu in Q(b1..bn; b) on families g1..gn at b1..bn: for each a
// and q in Q(b; f(a)), factor q o mu through the extension morphism as
// (p, sigma, qbar) and act by p on the sigma-arranged values of the inputs.
// Requires a yes verdict (factorization tables present).
EquivariantFamily qAction(const ExtensionMorphism& ext, const ExtensionReport& report,
                          const FiniteAlgebra& A, const ElemRef& mu,
                          const std::vector<EquivariantFamily>& gs);

// phi_*(A): carriers from underlyingRightAdjoint, action from qAction.
struct RightAdjointAlgebra {
  AlgPtr alg;                      // Q-algebra on the family carriers
  UnderlyingRightAdjoint tables;   // the underlying families, in carrier order
};
RightAdjointAlgebra phiStar(const ExtensionMorphism& ext, const ExtensionReport& report,
                            AlgPtr A);
RightAdjointAlgebra phiStar(const OperadMap& phi, AlgPtr A);  // decides the extension itself

// The transpose of h: phi^*(B) -> A under the adjunction: B -> phi_*(A),
// x |-> (a, q |-> h_a(B(q)(x))).
AlgebraMap transposeMap(const ExtensionMorphism& ext, const RightAdjointAlgebra& S, AlgPtr B,
                        const AlgebraMap& h);

struct AdjunctionReport {
  bool counitIsMap = false;     // eps: phi^* phi_* A -> A is a P-algebra map
  bool unitIsMap = false;       // eta: B -> phi_* phi^* B is a Q-algebra map
  bool triangle1 = false;       // eps_{phi^*B} o phi^*(eta_B) = id
  bool triangle2 = false;       // phi_*(eps_A) o eta_{phi_*A} = id
  bool homBijection = false;    // transpose is a bijection Hom_P(phi^*B, A) = Hom_Q(B, phi_*A)
  long homP = 0, homQ = 0;
  std::vector<std::string> notes;

  bool pass() const {
    return counitIsMap && unitIsMap && triangle1 && triangle2 && homBijection;
  }
};

AdjunctionReport verifyAdjunction(const ExtensionMorphism& ext, const ExtensionReport& report,
                                  AlgPtr A, AlgPtr B);

}  // namespace opx

#endif  // OPX_RIGHT_ADJOINT_HPP
