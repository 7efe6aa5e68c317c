#include "opx/right_adjoint.hpp"

#include <algorithm>
#include <queue>
#include <set>

namespace opx {

namespace {

// The unary carrier Q(base; f(a)), as a profile. Loud about window exposure:
// the end formula is only correct when the window closes Q here.
Profile unaryProfile(const OperadMap& phi, const Color& base, const Color& a) {
  Profile yp;
  yp.inputs = {base};
  yp.output = phi.colorMap(a);
  if (!phi.dst->coll->window.admits(yp))
    throw TruncationError(yp, "right adjoint: unary carrier outside the window");
  return yp;
}

int unarySize(const Operad& Q, const Profile& yp) {
  auto it = Q.coll->carriers.find(yp);
  return it == Q.coll->carriers.end() ? 0 : static_cast<int>(it->second.size());
}

// All unary P-operations, as (u, a, a') with u in P(a; a').
std::vector<ElemRef> unaryOps(const Operad& P) {
  std::vector<ElemRef> out;
  for (const auto& [p, car] : P.coll->carriers) {
    if (p.arity() != 1 || car.empty()) continue;
    for (int i = 0; i < static_cast<int>(car.size()); ++i) out.push_back(ElemRef{p, i});
  }
  return out;
}

}  // namespace

std::vector<int> EquivariantFamily::flatten() const {
  std::vector<int> flat;
  for (const auto& [a, vals] : values) flat.insert(flat.end(), vals.begin(), vals.end());
  return flat;
}

std::vector<std::string> endConditionViolations(const OperadMap& phi, const FiniteAlgebra& A,
                                                const EquivariantFamily& g) {
  std::vector<std::string> out;
  const Operad& Q = *phi.dst;
  for (const ElemRef& u : unaryOps(*phi.src)) {
    const Color& a = u.profile.inputs[0];
    const Color& a2 = u.profile.output;
    Profile ypa = unaryProfile(phi, g.base, a);
    ElemRef fu = phi.apply(u);
    const auto& vals = g.values.at(a);
    for (int q = 0; q < static_cast<int>(vals.size()); ++q) {
      ElemRef moved = Q.subOrThrow(fu, {ElemRef{ypa, q}});
      int lhs = g.values.at(a2)[moved.idx];
      int rhs = A.act(u, {vals[q]});
      if (lhs != rhs)
        out.push_back("end condition fails at base " + g.base + " against " +
                      phi.src->coll->nameOf(u) + "@" + u.profile.str() + " on entry " +
                      std::to_string(q));
    }
  }
  return out;
}

UnderlyingRightAdjoint underlyingRightAdjoint(const OperadMap& phi, const FiniteAlgebra& A) {
  const Operad& P = *phi.src;
  const Operad& Q = *phi.dst;
  UnderlyingRightAdjoint out;
  std::vector<ElemRef> unaries = unaryOps(P);

  for (const auto& b : Q.colors.colors) {
    // Variables: one per (color a, element of Q(b; f(a))), valued in A's
    // carrier at a.
    std::vector<Color> varColor;
    std::map<std::pair<Color, int>, int> vid;
    std::vector<std::pair<Color, int>> slots;  // (a, local index) in flatten order
    for (const auto& a : P.colors.colors) {
      Profile yp = unaryProfile(phi, b, a);
      int n = unarySize(Q, yp);
      for (int q = 0; q < n; ++q) {
        vid[{a, q}] = static_cast<int>(varColor.size());
        varColor.push_back(a);
        slots.emplace_back(a, q);
      }
    }

    // Functional constraints: assigning the source of an edge forces its
    // target through the action table of the unary operation.
    struct Edge {
      int to;
      std::vector<int> table;  // A_a -> A_{a'}
    };
    std::vector<std::vector<Edge>> edges(varColor.size());
    for (const ElemRef& u : unaries) {
      const Color& a = u.profile.inputs[0];
      const Color& a2 = u.profile.output;
      Profile ypa = unaryProfile(phi, b, a);
      int n = unarySize(Q, ypa);
      if (n == 0) continue;
      ElemRef fu = phi.apply(u);
      std::vector<int> table(A.sizeAt(a));
      for (int x = 0; x < static_cast<int>(table.size()); ++x) table[x] = A.act(u, {x});
      for (int q = 0; q < n; ++q) {
        ElemRef moved = Q.subOrThrow(fu, {ElemRef{ypa, q}});
        edges[vid.at({a, q})].push_back(Edge{vid.at({a2, moved.idx}), table});
      }
    }

    std::vector<int> val(varColor.size(), -1);
    std::vector<EquivariantFamily>& fams = out.families[b];
    auto& idxMap = out.index[b];

    // Assign v := x and propagate the functional closure; the trail records
    // assignments for undo. Returns false on conflict.
    std::vector<int> trail;
    auto propagate = [&](int v, int x) -> bool {
      std::queue<int> work;
      val[v] = x;
      trail.push_back(v);
      work.push(v);
      while (!work.empty()) {
        int n0 = work.front();
        work.pop();
        for (const Edge& e : edges[n0]) {
          int req = e.table[val[n0]];
          if (val[e.to] == -1) {
            val[e.to] = req;
            trail.push_back(e.to);
            work.push(e.to);
          } else if (val[e.to] != req) {
            return false;
          }
        }
      }
      return true;
    };

    std::function<void()> rec = [&]() {
      int v = -1;
      for (int i = 0; i < static_cast<int>(val.size()); ++i)
        if (val[i] == -1) {
          v = i;
          break;
        }
      if (v == -1) {
        EquivariantFamily g;
        g.base = b;
        for (const auto& a : P.colors.colors) g.values[a];  // ensure all colors present
        for (size_t i = 0; i < slots.size(); ++i) g.values[slots[i].first].push_back(val[i]);
        idxMap.emplace(g.flatten(), static_cast<int>(fams.size()));
        fams.push_back(std::move(g));
        return;
      }
      int dom = static_cast<int>(A.sizeAt(varColor[v]));
      for (int x = 0; x < dom; ++x) {
        size_t mark = trail.size();
        if (propagate(v, x)) rec();
        while (trail.size() > mark) {
          val[trail.back()] = -1;
          trail.pop_back();
        }
      }
    };
    rec();
  }
  return out;
}

int UnderlyingRightAdjoint::indexOf(const Color& base, const EquivariantFamily& g) const {
  auto it = index.find(base);
  if (it == index.end()) return -1;
  auto jt = it->second.find(g.flatten());
  return jt == it->second.end() ? -1 : jt->second;
}

EquivariantFamily qAction(const ExtensionMorphism& ext, const ExtensionReport& report,
                          const FiniteAlgebra& A, const ElemRef& mu,
                          const std::vector<EquivariantFamily>& gs) {
  const OperadMap& phi = ext.phi;
  const Operad& Q = *phi.dst;
  if (static_cast<int>(gs.size()) != mu.profile.arity())
    throw DomainError("qAction: one family per input of the acting operation");
  const Color& b = mu.profile.output;
  EquivariantFamily f0;
  f0.base = b;
  for (const auto& a : phi.src->colors.colors) {
    Profile yp = unaryProfile(phi, b, a);
    int n = unarySize(Q, yp);
    std::vector<int> vals(n);
    for (int q = 0; q < n; ++q) {
      ElemRef qm = Q.subOrThrow(ElemRef{yp, q}, {mu});  // q o mu in Q(b1..bk; f(a))
      Profile src;
      src.output = a;
      src.inputs = mu.profile.inputs;
      CompositeElement ce = factorize(ext, report, src, qm.idx);
      int m = ce.outer.profile.arity();
      std::vector<int> xs(m);
      for (int j = 0; j < m; ++j) {
        const EquivariantFamily& g = gs[ce.sigma[j]];
        xs[j] = g.values.at(ce.outer.profile.inputs[j])[ce.inners[j].idx];
      }
      vals[q] = A.act(ce.outer, xs);
    }
    f0.values[a] = std::move(vals);
  }
  return f0;
}

RightAdjointAlgebra phiStar(const ExtensionMorphism& ext, const ExtensionReport& report,
                            AlgPtr A) {
  if (report.verdict != ExtensionReport::Verdict::Yes)
    throw DomainError("phiStar needs a categorical extension (verdict " +
                      report.verdictStr() + ")");
  RightAdjointAlgebra out;
  out.tables = underlyingRightAdjoint(ext.phi, *A);

  auto F = std::make_shared<FiniteAlgebra>();
  F->P = ext.phi.dst;
  for (const auto& [b, fams] : out.tables.families) {
    auto& names = F->carriers[b];
    for (const auto& g : fams) {
      std::string s = "[";
      auto flat = g.flatten();
      for (size_t i = 0; i < flat.size(); ++i)
        s += (i ? "," : "") + std::to_string(flat[i]);
      names.push_back(s + "]");
    }
  }
  // Keep the ingredients of the action alive inside the closure.
  auto held = std::make_shared<std::tuple<ExtensionMorphism, ExtensionReport, AlgPtr,
                                          UnderlyingRightAdjoint>>(ext, report, A,
                                                                   out.tables);
  F->action = [held](const ElemRef& mu, const std::vector<int>& xs) -> int {
    const auto& [e, r, alg, tab] = *held;
    std::vector<EquivariantFamily> gs(xs.size());
    for (size_t i = 0; i < xs.size(); ++i)
      gs[i] = tab.families.at(mu.profile.inputs[i])[xs[i]];
    EquivariantFamily f0 = qAction(e, r, *alg, mu, gs);
    int idx = tab.indexOf(mu.profile.output, f0);
    if (idx < 0)
      throw DomainError("phiStar action left the end (base " + mu.profile.output + ")");
    return idx;
  };
  out.alg = F;
  return out;
}

RightAdjointAlgebra phiStar(const OperadMap& phi, AlgPtr A) {
  return phiStar(extensionMorphism(phi), isCategoricalExtension(phi), std::move(A));
}

AlgebraMap transposeMap(const ExtensionMorphism& ext, const RightAdjointAlgebra& S, AlgPtr B,
                        const AlgebraMap& h) {
  const OperadMap& phi = ext.phi;
  const Operad& Q = *phi.dst;
  AlgebraMap t;
  t.src = B;
  t.dst = S.alg;
  for (const auto& b : Q.colors.colors) {
    auto& comp = t.components[b];
    for (int x = 0; x < static_cast<int>(B->sizeAt(b)); ++x) {
      EquivariantFamily g;
      g.base = b;
      for (const auto& a : phi.src->colors.colors) {
        Profile yp = unaryProfile(phi, b, a);
        int n = unarySize(Q, yp);
        auto& vals = g.values[a];
        vals.resize(n);
        for (int q = 0; q < n; ++q)
          vals[q] = h.apply(a, B->act(ElemRef{yp, q}, {x}));
      }
      int idx = S.tables.indexOf(b, g);
      if (idx < 0)
        throw DomainError("transpose left the end at base " + b);
      comp.push_back(idx);
    }
  }
  return t;
}

AdjunctionReport verifyAdjunction(const ExtensionMorphism& ext, const ExtensionReport& report,
                                  AlgPtr A, AlgPtr B) {
  const OperadMap& phi = ext.phi;
  const Operad& Q = *phi.dst;
  AdjunctionReport R;

  RightAdjointAlgebra S = phiStar(ext, report, A);
  AlgPtr resB = restrictAlgebra(phi, B);
  AlgPtr resS = restrictAlgebra(phi, S.alg);

  // Counit eps: phi^* phi_* A -> A, evaluation at the Q-unit.
  AlgebraMap eps;
  eps.src = resS;
  eps.dst = A;
  for (const auto& a : phi.src->colors.colors) {
    Color fa = phi.colorMap(a);
    int uq = Q.unit(fa).idx;
    auto& comp = eps.components[a];
    for (const auto& g : S.tables.families.at(fa)) comp.push_back(g.values.at(a)[uq]);
  }
  auto epsErrs = checkAlgebraMap(eps);
  R.counitIsMap = epsErrs.empty();
  for (size_t i = 0; i < epsErrs.size() && i < 5; ++i)
    R.notes.push_back("counit: " + epsErrs[i]);

  // Unit eta: B -> phi_* phi^* B, x |-> (a, q |-> B(q)(x)).
  RightAdjointAlgebra SB = phiStar(ext, report, resB);
  AlgebraMap eta;
  eta.src = B;
  eta.dst = SB.alg;
  bool etaBuilt = true;
  for (const auto& b : Q.colors.colors) {
    auto& comp = eta.components[b];
    for (int x = 0; x < static_cast<int>(B->sizeAt(b)); ++x) {
      EquivariantFamily g;
      g.base = b;
      for (const auto& a : phi.src->colors.colors) {
        Profile yp = unaryProfile(phi, b, a);
        int n = unarySize(Q, yp);
        auto& vals = g.values[a];
        vals.resize(n);
        for (int q = 0; q < n; ++q) vals[q] = B->act(ElemRef{yp, q}, {x});
      }
      int idx = SB.tables.indexOf(b, g);
      if (idx < 0) {
        etaBuilt = false;
        R.notes.push_back("unit image violates the end condition at base " + b);
        idx = 0;
      }
      comp.push_back(idx);
    }
  }
  auto etaErrs = checkAlgebraMap(eta);
  R.unitIsMap = etaBuilt && etaErrs.empty();
  for (size_t i = 0; i < etaErrs.size() && i < 5; ++i)
    R.notes.push_back("unit: " + etaErrs[i]);

  // Triangle 1: eps_{phi^*B} o phi^*(eta_B) = id on phi^*B.
  R.triangle1 = etaBuilt;
  for (const auto& a : phi.src->colors.colors) {
    Color fa = phi.colorMap(a);
    int uq = Q.unit(fa).idx;
    for (int x = 0; x < static_cast<int>(B->sizeAt(fa)) && R.triangle1; ++x) {
      const EquivariantFamily& g = SB.tables.families.at(fa)[eta.apply(fa, x)];
      if (g.values.at(a)[uq] != x) {
        R.triangle1 = false;
        R.notes.push_back("triangle 1 fails at color " + a);
      }
    }
  }

  // Triangle 2: phi_*(eps_A) o eta_{phi_*A} = id on phi_*A.
  R.triangle2 = true;
  for (const auto& [b, fams] : S.tables.families) {
    for (const auto& g : fams) {
      for (const auto& a : phi.src->colors.colors) {
        Profile yp = unaryProfile(phi, b, a);
        int uq = Q.unit(phi.colorMap(a)).idx;
        const auto& vals = g.values.at(a);
        for (int q = 0; q < static_cast<int>(vals.size()); ++q) {
          EquivariantFamily g2 = qAction(ext, report, *A, ElemRef{yp, q}, {g});
          if (g2.values.at(a)[uq] != vals[q]) {
            R.triangle2 = false;
            R.notes.push_back("triangle 2 fails at base " + b + ", color " + a + ", entry " +
                              std::to_string(q));
          }
        }
      }
    }
    if (!R.triangle2) break;
  }

  // Hom bijection, realized by the transpose.
  auto homP = enumerateAlgebraMaps(resB, A);
  auto homQ = enumerateAlgebraMaps(B, S.alg);
  R.homP = static_cast<long>(homP.size());
  R.homQ = static_cast<long>(homQ.size());
  std::set<std::map<Color, std::vector<int>>> seen;
  bool allFound = true;
  for (const auto& h : homP) {
    AlgebraMap t = transposeMap(ext, S, B, h);
    bool found = false;
    for (const auto& k : homQ)
      if (k.components == t.components) {
        found = true;
        break;
      }
    if (!found) allFound = false;
    seen.insert(t.components);
  }
  R.homBijection = (R.homP == R.homQ) && allFound &&
                   static_cast<long>(seen.size()) == R.homP;
  if (!R.homBijection)
    R.notes.push_back("hom bijection: |Hom_P| = " + std::to_string(R.homP) +
                      ", |Hom_Q| = " + std::to_string(R.homQ) + ", transposes distinct = " +
                      std::to_string(seen.size()));
  return R;
}

}  // namespace opx
