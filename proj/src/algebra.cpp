#include "opx/algebra.hpp"

#include <algorithm>
#include <set>

namespace opx {

namespace {

constexpr size_t kListingCap = 50;

// Enumerate tuples x̄ over the carriers of the given colors.
void forEachArgTuple(const FiniteAlgebra& A, const std::vector<Color>& colors,
                     const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> xs(colors.size(), 0);
  std::function<void(size_t)> rec = [&](size_t j) {
    if (j == colors.size()) {
      fn(xs);
      return;
    }
    size_t n = A.sizeAt(colors[j]);
    for (xs[j] = 0; xs[j] < static_cast<int>(n); ++xs[j]) rec(j + 1);
  };
  rec(0);
}

std::string tupleStr(const FiniteAlgebra& A, const std::vector<Color>& colors,
                     const std::vector<int>& xs) {
  std::string s = "(";
  for (size_t j = 0; j < xs.size(); ++j) {
    if (j) s += ",";
    s += A.nameAt(colors[j], xs[j]);
  }
  return s + ")";
}

}  // namespace

LawReport checkAlgebraLaws(const FiniteAlgebra& A, long maxInstances) {
  LawReport report;
  const Operad& P = *A.P;
  const auto& coll = *P.coll;
  long budget = maxInstances;
  auto violate = [&](std::string s) {
    ++report.violationCount;
    if (report.violations.size() < kListingCap) report.violations.push_back(std::move(s));
  };

  // Units act as identity.
  for (const auto& [a, car] : A.carriers) {
    if (!P.units.count(a)) continue;
    for (int x = 0; x < static_cast<int>(car.size()); ++x) {
      if (--budget < 0) {
        report.budgetExhausted = true;
        return report;
      }
      ++report.instancesChecked;
      if (A.act(P.unit(a), {x}) != x) violate("unit fails on " + car[x] + "@" + a);
    }
  }

  for (const auto& [p, pcar] : coll.carriers) {
    if (pcar.empty() || report.budgetExhausted) continue;
    int m = p.arity();
    forEachArgTuple(A, p.inputs, [&](const std::vector<int>& xs) {
      if (report.budgetExhausted) return;
      for (int e = 0; e < static_cast<int>(pcar.size()); ++e) {
        if (--budget < 0) {
          report.budgetExhausted = true;
          return;
        }
        ++report.instancesChecked;
        ElemRef pe{p, e};
        int base = A.act(pe, xs);
        // Equivariance under adjacent transpositions.
        for (int j = 0; j + 1 < m; ++j) {
          Perm rho = transposition(m, j, j + 1);
          ElemRef pr = coll.act(pe, rho);
          std::vector<int> xr(m);
          for (int t = 0; t < m; ++t) xr[t] = xs[rho[t]];
          if (A.act(pr, xr) != base)
            violate("equivariance fails at " + coll.nameOf(pe) + p.str() +
                    tupleStr(A, p.inputs, xs) + " swap " + std::to_string(j));
        }
        // Associativity against single insertions.
        for (int i = 0; i < m; ++i) {
          for (const auto& [q, qcar] : coll.carriers) {
            if (q.output != p.inputs[i] || qcar.empty()) continue;
            std::vector<ElemRef> pad(m);
            for (int t = 0; t < m; ++t) pad[t] = P.unit(p.inputs[t]);
            pad[i] = ElemRef{q, 0};
            if (!P.window().admits(Operad::subProfile(pe, pad))) {
              ++report.overflowCount;
              continue;
            }
            for (int u = 0; u < static_cast<int>(qcar.size()); ++u) {
              pad[i] = ElemRef{q, u};
              SubResult comp = P.sub(pe, pad);
              if (!comp.ok) {
                ++report.overflowCount;
                continue;
              }
              Profile cp = Operad::subProfile(pe, pad);
              forEachArgTuple(A, q.inputs, [&](const std::vector<int>& ys) {
                if (--budget < 0) {
                  report.budgetExhausted = true;
                  return;
                }
                ++report.instancesChecked;
                // Composite arguments: xs with slot i expanded to ys.
                std::vector<int> zs;
                zs.reserve(cp.arity());
                for (int t = 0; t < m; ++t) {
                  if (t == i)
                    zs.insert(zs.end(), ys.begin(), ys.end());
                  else
                    zs.push_back(xs[t]);
                }
                std::vector<int> folded = xs;
                folded[i] = A.act(ElemRef{q, u}, ys);
                if (A.act(ElemRef{cp, comp.value}, zs) != A.act(pe, folded))
                  violate("associativity fails at " + coll.nameOf(pe) + p.str() + " slot " +
                          std::to_string(i) + " with " + coll.nameOf(ElemRef{q, u}));
              });
              if (report.budgetExhausted) return;
            }
          }
        }
      }
    });
  }
  return report;
}

std::vector<std::string> checkAlgebraMap(const AlgebraMap& h) {
  std::vector<std::string> bad;
  const FiniteAlgebra& A = *h.src;
  const FiniteAlgebra& B = *h.dst;
  for (const auto& [a, car] : A.carriers) {
    if (!h.components.count(a) ||
        h.components.at(a).size() != car.size()) {
      bad.push_back("missing or mis-sized component at color " + a);
      return bad;
    }
  }
  for (const auto& [p, pcar] : A.P->coll->carriers) {
    if (pcar.empty()) continue;
    forEachArgTuple(A, p.inputs, [&](const std::vector<int>& xs) {
      std::vector<int> hx(xs.size());
      for (size_t j = 0; j < xs.size(); ++j) hx[j] = h.apply(p.inputs[j], xs[j]);
      for (int e = 0; e < static_cast<int>(pcar.size()); ++e) {
        ElemRef pe{p, e};
        if (h.apply(p.output, A.act(pe, xs)) != B.act(pe, hx)) {
          if (bad.size() < kListingCap)
            bad.push_back("map fails at " + A.P->coll->nameOf(pe) + p.str() +
                          tupleStr(A, p.inputs, xs));
        }
      }
    });
  }
  return bad;
}

std::vector<AlgebraMap> enumerateAlgebraMaps(AlgPtr A, AlgPtr B) {
  // Flatten assignment slots (color, element index).
  struct Slot {
    Color a;
    int x;
  };
  std::vector<Slot> slots;
  std::map<Color, int> slotBase;
  for (const auto& [a, car] : A->carriers) {
    slotBase[a] = static_cast<int>(slots.size());
    for (int x = 0; x < static_cast<int>(car.size()); ++x) slots.push_back({a, x});
  }
  // Action instances, indexed by the latest slot they mention.
  struct Inst {
    ElemRef p;
    std::vector<int> xs;
    int result;
    std::vector<int> argSlots;  // slot ids of arguments
    int resultSlot;
  };
  std::vector<Inst> insts;
  for (const auto& [p, pcar] : A->P->coll->carriers) {
    if (pcar.empty()) continue;
    forEachArgTuple(*A, p.inputs, [&](const std::vector<int>& xs) {
      for (int e = 0; e < static_cast<int>(pcar.size()); ++e) {
        Inst in;
        in.p = ElemRef{p, e};
        in.xs = xs;
        in.result = A->act(in.p, xs);
        for (size_t j = 0; j < xs.size(); ++j)
          in.argSlots.push_back(slotBase.at(p.inputs[j]) + xs[j]);
        in.resultSlot = slotBase.at(p.output) + in.result;
        insts.push_back(std::move(in));
      }
    });
  }
  std::vector<std::vector<int>> bySlot(slots.size());
  for (size_t i = 0; i < insts.size(); ++i) {
    int latest = insts[i].resultSlot;
    for (int s : insts[i].argSlots) latest = std::max(latest, s);
    if (latest >= 0) bySlot[latest].push_back(static_cast<int>(i));
  }

  std::vector<int> assign(slots.size(), -1);
  std::vector<AlgebraMap> out;
  std::function<void(size_t)> dfs = [&](size_t s) {
    if (s == slots.size()) {
      AlgebraMap h;
      h.src = A;
      h.dst = B;
      for (const auto& [a, car] : A->carriers) {
        auto& comp = h.components[a];
        comp.resize(car.size());
        for (int x = 0; x < static_cast<int>(car.size()); ++x)
          comp[x] = assign[slotBase.at(a) + x];
      }
      out.push_back(std::move(h));
      return;
    }
    int nb = static_cast<int>(B->sizeAt(slots[s].a));
    for (int v = 0; v < nb; ++v) {
      assign[s] = v;
      bool ok = true;
      for (int i : bySlot[s]) {
        const Inst& in = insts[i];
        std::vector<int> hx(in.xs.size());
        bool ready = assign[in.resultSlot] >= 0;
        for (size_t j = 0; j < in.xs.size() && ready; ++j) {
          hx[j] = assign[in.argSlots[j]];
          if (hx[j] < 0) ready = false;
        }
        if (!ready) continue;
        if (B->act(in.p, hx) != assign[in.resultSlot]) {
          ok = false;
          break;
        }
      }
      if (ok) dfs(s + 1);
    }
    assign[s] = -1;
  };
  dfs(0);
  return out;
}

AlgPtr initialAlgebra(OperadPtr P) {
  auto A = std::make_shared<FiniteAlgebra>();
  A->P = P;
  for (const auto& a : P->colors.colors) {
    Profile pa{{}, a};
    if (!P->window().admits(pa)) continue;
    auto it = P->coll->carriers.find(pa);
    A->carriers[a] = it == P->coll->carriers.end() ? std::vector<std::string>{} : it->second;
  }
  OperadPtr Pp = P;
  A->action = [Pp](const ElemRef& p, const std::vector<int>& xs) {
    std::vector<ElemRef> inners;
    inners.reserve(xs.size());
    for (size_t j = 0; j < xs.size(); ++j)
      inners.push_back(ElemRef{Profile{{}, p.profile.inputs[j]}, xs[j]});
    return Pp->subOrThrow(p, inners).idx;
  };
  return A;
}

AlgebraMap initialMap(AlgPtr init, AlgPtr B) {
  AlgebraMap h;
  h.src = init;
  h.dst = B;
  for (const auto& [a, car] : init->carriers) {
    auto& comp = h.components[a];
    comp.resize(car.size());
    for (int x = 0; x < static_cast<int>(car.size()); ++x) {
      // x is an arity-zero operation; its image is forced by the action on
      // the empty tuple.
      comp[x] = B->act(ElemRef{Profile{{}, a}, x}, {});
    }
  }
  return h;
}

AlgPtr restrictAlgebra(const OperadMap& phi, AlgPtr B) {
  auto A = std::make_shared<FiniteAlgebra>();
  A->P = phi.src;
  for (const auto& a : phi.src->colors.colors) A->carriers[a] = B->carriers.at(phi.colorMap(a));
  OperadMap ph = phi;
  AlgPtr Bp = B;
  A->action = [ph, Bp](const ElemRef& p, const std::vector<int>& xs) {
    return Bp->act(ph.apply(p), xs);
  };
  return A;
}

// ---- presented algebras -----------------------------------------------------

int PresentedAlgebra::classOf(const Color& a, const CompositeElement& raw) const {
  return pres->classIndex(raw);
}

const CompositeElement& PresentedAlgebra::repOf(const Color& a, int cls) const {
  return pres->rep(ElemRef{Profile{{}, a}, cls});
}

namespace {

// Arity-zero collection over the operad's colors with the given carriers.
CollPtr nullaryCollection(const ColorSet& colors,
                          std::map<Profile, std::vector<std::string>> carriers) {
  SymmetricCollection X;
  X.window.colorsIn = colors;
  X.window.colorsOut = colors;
  X.window.maxArity = 0;
  X.carriers = std::move(carriers);
  X.action = nullptr;
  return std::make_shared<SymmetricCollection>(std::move(X));
}

// Quotient-presented algebra over P whose carriers are the classes of
// composeProduct(outerColl, inner0, ...) at the arity-zero profiles, with the
// P-action given by composing outers and concatenating inner tuples.
PresentedAlgebra presentAlgebra(
    OperadPtr P, CollPtr outerColl, CollPtr inner0, const RelationHook& hook,
    const std::function<ElemRef(const ElemRef&, const std::vector<ElemRef>&)>& composeOuter) {
  TruncationWindow w;
  w.colorsIn = P->colors;
  w.colorsOut = P->colors;
  w.maxArity = 0;
  auto pres = std::make_shared<CompositeProduct>(composeProduct(outerColl, inner0, w, hook));

  auto A = std::make_shared<FiniteAlgebra>();
  A->P = P;
  for (const auto& a : P->colors.colors) {
    Profile pa{{}, a};
    auto it = pres->reps().find(pa);
    auto& names = A->carriers[a];
    if (it == pres->reps().end()) continue;
    names.reserve(it->second.size());
    for (const auto& r : it->second) names.push_back(pres->result->nameOf(pres->classRef(r)));
  }
  auto presC = pres;
  A->action = [presC, composeOuter](const ElemRef& p, const std::vector<int>& xs) {
    std::vector<ElemRef> outers;
    std::vector<ElemRef> allInners;
    outers.reserve(xs.size());
    for (size_t j = 0; j < xs.size(); ++j) {
      const CompositeElement& r =
          presC->rep(ElemRef{Profile{{}, p.profile.inputs[j]}, xs[j]});
      outers.push_back(r.outer);
      allInners.insert(allInners.end(), r.inners.begin(), r.inners.end());
    }
    ElemRef newOuter = composeOuter(p, outers);
    CompositeElement raw{newOuter, Perm{}, std::move(allInners)};
    return presC->classIndex(raw);
  };

  PresentedAlgebra out;
  out.alg = A;
  out.pres = pres;
  return out;
}

}  // namespace

FreeAlgebra freeAlgebra(OperadPtr Q, const std::map<Color, std::vector<std::string>>& X) {
  std::map<Profile, std::vector<std::string>> car;
  for (const auto& [a, names] : X)
    if (!names.empty()) car[Profile{{}, a}] = names;
  CollPtr X0 = nullaryCollection(Q->colors, std::move(car));
  OperadPtr Qp = Q;
  FreeAlgebra F;
  F.pa = presentAlgebra(Q, Q->coll, X0, nullptr,
                        [Qp](const ElemRef& p, const std::vector<ElemRef>& outers) {
                          return Qp->subOrThrow(p, outers);
                        });
  F.generators = X;
  return F;
}

int FreeAlgebra::generatorIndex(const Color& a, int g) const {
  CompositeElement raw{pa.alg->P->unit(a), Perm{}, {ElemRef{Profile{{}, a}, g}}};
  return pa.pres->classIndex(raw);
}

AlgebraMap freeExtension(const FreeAlgebra& F, AlgPtr B,
                         const std::map<Color, std::vector<int>>& genImages) {
  AlgebraMap h;
  h.src = F.pa.alg;
  h.dst = B;
  for (const auto& [a, car] : F.pa.alg->carriers) {
    auto& comp = h.components[a];
    comp.resize(car.size());
    for (int c = 0; c < static_cast<int>(car.size()); ++c) {
      const CompositeElement& r = F.pa.repOf(a, c);
      std::vector<int> xs;
      xs.reserve(r.inners.size());
      for (const auto& g : r.inners)
        xs.push_back(genImages.at(g.profile.output)[g.idx]);
      comp[c] = B->act(r.outer, xs);
    }
  }
  return h;
}

PresentedAlgebra induceAlgebra(const OperadMap& phi, AlgPtr A) {
  OperadPtr P = phi.src;
  OperadPtr Q = phi.dst;
  auto f = phi.colorMap;

  // Q <| f over (A-colors, B-colors): carriers pulled back along f.
  SymmetricCollection Qf;
  Qf.window.colorsIn = P->colors;
  Qf.window.colorsOut = Q->colors;
  Qf.window.maxArity = Q->window().maxArity;
  if (Q->window().slotWeight) {
    auto base = Q->window().slotWeight;
    Qf.window.maxSlots = Q->window().maxSlots;
    Qf.window.slotWeight = [base, f](const Profile& p) {
      Profile t;
      t.output = p.output;
      for (const auto& c : p.inputs) t.inputs.push_back(f(c));
      return base(t);
    };
  }
  for (const auto& [q, qcar] : Q->coll->carriers) {
    if (qcar.empty()) continue;
    // All A-color tuples mapping onto q's inputs.
    std::vector<std::vector<Color>> pre(q.arity());
    bool any = true;
    for (int j = 0; j < q.arity() && any; ++j) {
      for (const auto& a : P->colors.colors)
        if (f(a) == q.inputs[j]) pre[j].push_back(a);
      any = !pre[j].empty();
    }
    if (!any) continue;
    std::vector<Color> abar(q.arity());
    std::function<void(int)> rec = [&](int j) {
      if (j == q.arity()) {
        Qf.carriers[Profile{abar, q.output}] = qcar;
        return;
      }
      for (const auto& a : pre[j]) {
        abar[j] = a;
        rec(j + 1);
      }
    };
    rec(0);
  }
  CollPtr Qcoll = Q->coll;
  Qf.action = [Qcoll, f](const Profile& p, const Perm& rho, int i) {
    Profile t;
    t.output = p.output;
    for (const auto& c : p.inputs) t.inputs.push_back(f(c));
    return Qcoll->act(t, rho, i);
  };
  auto QfP = std::make_shared<SymmetricCollection>(std::move(Qf));

  std::map<Profile, std::vector<std::string>> acar;
  for (const auto& [a, names] : A->carriers)
    if (!names.empty()) acar[Profile{{}, a}] = names;
  CollPtr A0 = nullaryCollection(P->colors, std::move(acar));

  OperadMap ph = phi;
  AlgPtr Ap = A;
  // Middle relation: (q composed with phi(u) at slot i, x̄ with block ȳ) ~
  // (q, x̄ with the block collapsed to u acting on ȳ in A); u of any arity.
  RelationHook hook = [P, Q, ph, Ap, f](
                          const Profile&, const std::vector<CompositeElement>& raws,
                          const std::function<void(const CompositeElement&,
                                                   const CompositeElement&)>& relate) {
    std::map<ElemRef, std::vector<const CompositeElement*>> byOuter;
    for (const auto& e : raws) byOuter[e.outer].push_back(&e);
    std::vector<ElemRef> outers;
    for (const auto& [x, _] : byOuter) outers.push_back(x);
    for (const auto& x : outers) {
      int m = x.profile.arity();
      Profile qprof;
      qprof.output = x.profile.output;
      for (const auto& c : x.profile.inputs) qprof.inputs.push_back(f(c));
      ElemRef qx{qprof, x.idx};
      for (int i = 0; i < m; ++i) {
        for (const auto& [pu, ucar] : P->coll->carriers) {
          if (pu.output != x.profile.inputs[i] || ucar.empty()) continue;
          for (int u = 0; u < static_cast<int>(ucar.size()); ++u) {
            ElemRef ue{pu, u};
            ElemRef fu = ph.apply(ue);
            std::vector<ElemRef> pad(m);
            for (int t = 0; t < m; ++t)
              pad[t] = t == i ? fu : Q->unit(f(x.profile.inputs[t]));
            SubResult qs = Q->sub(qx, pad);
            if (!qs.ok) continue;
            // Left outer in Q <| f coordinates.
            Profile lp;
            lp.output = x.profile.output;
            for (int t = 0; t < m; ++t) {
              if (t == i)
                lp.inputs.insert(lp.inputs.end(), pu.inputs.begin(), pu.inputs.end());
              else
                lp.inputs.push_back(x.profile.inputs[t]);
            }
            ElemRef xL{lp, qs.value};
            auto it = byOuter.find(xL);
            if (it == byOuter.end()) continue;
            int nu = pu.arity();
            for (const CompositeElement* L : it->second) {
              std::vector<int> ys(nu);
              for (int s = 0; s < nu; ++s) ys[s] = L->inners[i + s].idx;
              int collapsed = Ap->act(ue, ys);
              CompositeElement R;
              R.outer = x;
              R.sigma = Perm{};
              R.inners.assign(L->inners.begin(), L->inners.begin() + i);
              R.inners.push_back(ElemRef{Profile{{}, x.profile.inputs[i]}, collapsed});
              R.inners.insert(R.inners.end(), L->inners.begin() + i + nu, L->inners.end());
              relate(*L, R);
            }
          }
        }
      }
    }
  };

  OperadPtr Qp = Q;
  return presentAlgebra(
      // The induced algebra lives over Q; carriers indexed by B-colors.
      Q, QfP, A0, hook, [Qp, f](const ElemRef& p, const std::vector<ElemRef>& outers) {
        std::vector<ElemRef> qs;
        qs.reserve(outers.size());
        std::vector<Color> cat;
        for (const auto& o : outers) {
          Profile t;
          t.output = o.profile.output;  // a B-color here: outer inputs of p
          for (const auto& c : o.profile.inputs) t.inputs.push_back(f(c));
          qs.push_back(ElemRef{t, o.idx});
          cat.insert(cat.end(), o.profile.inputs.begin(), o.profile.inputs.end());
        }
        ElemRef r = Qp->subOrThrow(p, qs);
        return ElemRef{Profile{cat, p.profile.output}, r.idx};
      });
}

AlgebraCoproduct algebraCoproduct(OperadPtr P, const std::vector<AlgPtr>& As) {
  auto sum = std::make_shared<SumIndex>();
  sum->summands = static_cast<int>(As.size());
  std::map<Profile, std::vector<std::string>> car;
  for (const auto& a : P->colors.colors) {
    auto& off = sum->offsets[a];
    off.resize(As.size(), 0);
    std::vector<std::string> names;
    for (size_t i = 0; i < As.size(); ++i) {
      off[i] = static_cast<int>(names.size());
      size_t n = As[i]->sizeAt(a);
      for (size_t x = 0; x < n; ++x)
        names.push_back(std::to_string(i) + ":" + As[i]->nameAt(a, static_cast<int>(x)));
    }
    if (!names.empty()) car[Profile{{}, a}] = names;
  }
  CollPtr S0 = nullaryCollection(P->colors, std::move(car));

  std::vector<AlgPtr> algs = As;
  RelationHook hook = [P, algs, sum](const Profile&, const std::vector<CompositeElement>& raws,
                                     const std::function<void(const CompositeElement&,
                                                              const CompositeElement&)>& relate) {
    std::map<ElemRef, std::vector<const CompositeElement*>> byOuter;
    for (const auto& e : raws) byOuter[e.outer].push_back(&e);
    std::vector<ElemRef> outers;
    for (const auto& [x, _] : byOuter) outers.push_back(x);
    for (const auto& x : outers) {
      int m = x.profile.arity();
      for (int i = 0; i < m; ++i) {
        for (const auto& [pu, ucar] : P->coll->carriers) {
          if (pu.output != x.profile.inputs[i] || ucar.empty()) continue;
          for (int u = 0; u < static_cast<int>(ucar.size()); ++u) {
            ElemRef ue{pu, u};
            std::vector<ElemRef> pad(m);
            for (int t = 0; t < m; ++t)
              pad[t] = t == i ? ue : P->unit(x.profile.inputs[t]);
            SubResult xs = P->sub(x, pad);
            if (!xs.ok) continue;
            ElemRef xL{Operad::subProfile(x, pad), xs.value};
            auto it = byOuter.find(xL);
            if (it == byOuter.end()) continue;
            int nu = pu.arity();
            for (const CompositeElement* L : it->second) {
              // The u-block must sit inside one summand.
              int s = -1;
              bool same = true;
              std::vector<int> ys(nu);
              for (int t = 0; t < nu && same; ++t) {
                auto [si, loc] = sum->split(pu.inputs[t], L->inners[i + t].idx);
                if (t == 0)
                  s = si;
                else if (si != s)
                  same = false;
                ys[t] = loc;
              }
              // Arity-zero u: collapse into whichever summand provides the
              // constant; relate once per summand possessing it.
              if (nu == 0) {
                for (int si = 0; si < sum->summands; ++si) {
                  Profile pa0{{}, pu.output};
                  // Constant u exists in summand si iff A_si can evaluate it;
                  // every summand algebra acts on all of P, so collapse is
                  // always defined.
                  int collapsed = algs[si]->act(ue, {});
                  CompositeElement R;
                  R.outer = x;
                  R.sigma = Perm{};
                  R.inners.assign(L->inners.begin(), L->inners.begin() + i);
                  R.inners.push_back(ElemRef{Profile{{}, x.profile.inputs[i]},
                                             sum->global(x.profile.inputs[i], si, collapsed)});
                  R.inners.insert(R.inners.end(), L->inners.begin() + i, L->inners.end());
                  relate(*L, R);
                }
                continue;
              }
              if (!same) continue;
              int collapsed = algs[s]->act(ue, ys);
              CompositeElement R;
              R.outer = x;
              R.sigma = Perm{};
              R.inners.assign(L->inners.begin(), L->inners.begin() + i);
              R.inners.push_back(ElemRef{Profile{{}, x.profile.inputs[i]},
                                         sum->global(x.profile.inputs[i], s, collapsed)});
              R.inners.insert(R.inners.end(), L->inners.begin() + i + nu, L->inners.end());
              relate(*L, R);
            }
          }
        }
      }
    }
  };

  OperadPtr Pp = P;
  AlgebraCoproduct out;
  out.pa = presentAlgebra(P, P->coll, S0, hook,
                          [Pp](const ElemRef& p, const std::vector<ElemRef>& outers) {
                            return Pp->subOrThrow(p, outers);
                          });
  for (size_t i = 0; i < As.size(); ++i) {
    AlgebraMap inj;
    inj.src = As[i];
    inj.dst = out.pa.alg;
    for (const auto& [a, carr] : As[i]->carriers) {
      auto& comp = inj.components[a];
      comp.resize(carr.size());
      for (int x = 0; x < static_cast<int>(carr.size()); ++x) {
        CompositeElement raw{
            P->unit(a), Perm{},
            {ElemRef{Profile{{}, a}, sum->global(a, static_cast<int>(i), x)}}};
        comp[x] = out.pa.pres->classIndex(raw);
      }
    }
    out.injections.push_back(std::move(inj));
  }
  out.sumIndex = sum;
  return out;
}

std::optional<AlgebraMap> AlgebraCoproduct::mediate(AlgPtr B,
                                                    const std::vector<AlgebraMap>& cocone) const {
  const SumIndex& sum = *sumIndex;
  AlgebraMap h;
  h.src = pa.alg;
  h.dst = B;
  for (const auto& [a, car] : pa.alg->carriers) {
    auto& comp = h.components[a];
    comp.assign(car.size(), -1);
  }
  // Evaluate every raw; all raws in a class must agree.
  for (const auto& [p, pcls] : pa.pres->data->classes) {
    for (size_t ri = 0; ri < pcls.enc.size(); ++ri) {
      CompositeElement r = decodeRaw(*pa.pres->data, *pcls.enc[ri]);
      std::vector<int> xs(r.inners.size());
      for (size_t j = 0; j < r.inners.size(); ++j) {
        auto [s, loc] = sum.split(r.inners[j].profile.output, r.inners[j].idx);
        xs[j] = cocone[s].apply(r.inners[j].profile.output, loc);
      }
      int v = B->act(r.outer, xs);
      int cls = pcls.classOfRaw[ri];
      int& slot = h.components[p.output][cls];
      if (slot >= 0 && slot != v) return std::nullopt;
      slot = v;
    }
  }
  return h;
}

// ---- multilinear summand cross-check ---------------------------------------

SummandReport comparisonSummandCheck(const OperadMap& phi, const std::vector<Color>& bbar,
                                     const Color& a) {
  SummandReport rep;
  OperadPtr P = phi.src;
  OperadPtr Q = phi.dst;
  auto f = phi.colorMap;
  int k = static_cast<int>(bbar.size());

  // Free Q-algebras on single generators, and on all of them together.
  std::vector<FreeAlgebra> Fs;
  std::map<Color, std::vector<std::string>> X;
  std::map<Color, std::vector<int>> genSlot;  // per summand i: position in X[b_i]
  std::vector<int> slotOf(k);
  for (int i = 0; i < k; ++i) {
    std::map<Color, std::vector<std::string>> Xi;
    Xi[bbar[i]] = {"g"};
    Fs.push_back(freeAlgebra(Q, Xi));
    slotOf[i] = static_cast<int>(X[bbar[i]].size());
    X[bbar[i]].push_back("g" + std::to_string(i));
  }
  FreeAlgebra FX = freeAlgebra(Q, X);
  AlgPtr RX = restrictAlgebra(phi, FX.pa.alg);

  // Coproduct of the restrictions over P.
  std::vector<AlgPtr> Rs;
  for (auto& F : Fs) Rs.push_back(restrictAlgebra(phi, F.pa.alg));
  AlgebraCoproduct cp = algebraCoproduct(P, Rs);

  // Cocone R_i -> phi^* F_Q(X): rename the single generator to slot i.
  std::vector<AlgebraMap> cocone;
  for (int i = 0; i < k; ++i) {
    AlgebraMap h;
    h.src = Rs[i];
    h.dst = RX;
    for (const auto& [ac, car] : Rs[i]->carriers) {
      auto& comp = h.components[ac];
      comp.resize(car.size());
      Color bc = f(ac);
      for (int c = 0; c < static_cast<int>(car.size()); ++c) {
        const CompositeElement& r = Fs[i].pa.repOf(bc, c);
        CompositeElement moved = r;
        for (auto& g : moved.inners) g.idx = slotOf[i];
        comp[c] = FX.pa.pres->classIndex(moved);
      }
    }
    cocone.push_back(std::move(h));
  }
  auto comparison = cp.mediate(RX, cocone);
  if (!comparison) {
    rep.notes.push_back("comparison map is not well-defined on coequalizer classes");
    return rep;
  }

  // Multilinear tag of a coproduct raw at (;a).
  auto tagOf = [&](const CompositeElement& r) {
    std::vector<int> used;
    for (size_t j = 0; j < r.inners.size(); ++j) {
      Color ac = r.inners[j].profile.output;
      auto [s, loc] = cp.sumIndex->split(ac, r.inners[j].idx);
      const CompositeElement& free = Fs[s].pa.repOf(f(ac), loc);
      if (free.outer.profile.arity() != 1) return MultilinearTag::Non;
      used.push_back(s);
    }
    std::sort(used.begin(), used.end());
    for (int i = 0; i < k; ++i)
      if (i >= static_cast<int>(used.size()) || used[i] != i) return MultilinearTag::Non;
    if (static_cast<int>(used.size()) != k) return MultilinearTag::Non;
    return MultilinearTag::Mul;
  };

  Profile pa0{{}, a};
  rep.homogeneous = true;
  std::map<int, MultilinearTag> classTag;
  auto rit = cp.pa.pres->data->classes.find(pa0);
  if (rit != cp.pa.pres->data->classes.end()) {
    for (size_t ri = 0; ri < rit->second.enc.size(); ++ri) {
      CompositeElement r = decodeRaw(*cp.pa.pres->data, *rit->second.enc[ri]);
      int cls = rit->second.classOfRaw[ri];
      MultilinearTag t = tagOf(r);
      auto it = classTag.find(cls);
      if (it == classTag.end())
        classTag[cls] = t;
      else if (it->second != t) {
        rep.homogeneous = false;
        if (rep.notes.size() < 20)
          rep.notes.push_back("tag not class-invariant in class " + std::to_string(cls));
      }
    }
  }

  // Extension morphism component at (b̄; a).
  ExtensionMorphism ext = extensionMorphism(phi);
  Profile sp{bbar, a};
  Profile tq{bbar, f(a)};
  auto eit = ext.source->reps().find(sp);
  long extClasses = eit == ext.source->reps().end() ? 0 : static_cast<long>(eit->second.size());
  rep.extensionClasses = extClasses;

  // Identify the codomain class of the comparison with an element of
  // Q(b̄; f(a)): arrange the generators into slot order by acting with the
  // matching permutation.
  auto codomainElem = [&](int fxClass) -> std::optional<ElemRef> {
    const CompositeElement& r = FX.pa.repOf(f(a), fxClass);
    int n = r.outer.profile.arity();
    if (n != k) return std::nullopt;
    // generator of inner t:
    std::vector<int> gen(n, -1);
    std::vector<bool> seen(k, false);
    for (int t = 0; t < n; ++t) {
      Color bc = r.inners[t].profile.output;
      int slot = r.inners[t].idx;
      int which = -1;
      for (int i = 0; i < k; ++i)
        if (bbar[i] == bc && slotOf[i] == slot) which = i;
      if (which < 0 || seen[which]) return std::nullopt;
      seen[which] = true;
      gen[t] = which;
    }
    // sigma with permuteProfile(outer.profile, sigma).inputs[j] = bbar[j]:
    // position j should take the input currently at the position holding
    // generator j.
    Perm sigma(n);
    for (int t = 0; t < n; ++t) sigma[gen[t]] = t;
    ElemRef moved = Q->coll->act(r.outer, sigma);
    return moved;
  };

  // Map each mul class through the comparison and through the extension, and
  // compare the two correspondences.
  std::map<int, int> extOfCp;  // cp mul class -> ext source class
  bool ok = true;
  long mulCount = 0;
  std::set<int> extSeen;
  for (const auto& [cls, tag] : classTag) {
    if (tag != MultilinearTag::Mul) continue;
    ++mulCount;
    const CompositeElement& r = cp.pa.repOf(a, cls);
    // Build the corresponding extension-source raw.
    int m = static_cast<int>(r.inners.size());
    CompositeElement er;
    er.outer = r.outer;
    er.sigma.resize(m);
    er.inners.resize(m);
    bool good = true;
    for (int j = 0; j < m && good; ++j) {
      Color ac = r.inners[j].profile.output;
      auto [s, loc] = cp.sumIndex->split(ac, r.inners[j].idx);
      const CompositeElement& free = Fs[s].pa.repOf(f(ac), loc);
      if (free.outer.profile.arity() != 1) {
        good = false;
        break;
      }
      er.sigma[j] = s;
      er.inners[j] = ElemRef{Profile{{bbar[s]}, ac}, free.outer.idx};
    }
    if (!good) {
      ok = false;
      continue;
    }
    int extCls = ext.source->classIndex(er);
    extOfCp[cls] = extCls;
    extSeen.insert(extCls);
    // Comparison value vs extension value in Q(b̄; f(a)).
    int fxClass = comparison->components.at(a)[cls];
    auto viaComparison = codomainElem(fxClass);
    ElemRef viaExtension = ext.apply(ElemRef{sp, extCls});
    if (!viaComparison || viaComparison->idx != viaExtension.idx ||
        viaComparison->profile != viaExtension.profile) {
      ok = false;
      if (rep.notes.size() < 20)
        rep.notes.push_back("comparison and extension disagree on class " +
                            std::to_string(cls));
    }
  }
  rep.mulClasses = mulCount;
  // The identification must be a bijection of the two presentations.
  if (static_cast<long>(extSeen.size()) != mulCount || mulCount != extClasses) {
    ok = false;
    rep.notes.push_back("mul summand has " + std::to_string(mulCount) +
                        " classes; extension source has " + std::to_string(extClasses));
  }
  rep.agrees = ok && rep.homogeneous;
  return rep;
}

// ---- stock lawful algebras ---------------------------------------------------

AlgPtr multiplicativeAlgebra(OperadPtr P, std::vector<std::string> names, int unit,
                             std::vector<std::vector<int>> mult) {
  int n = static_cast<int>(names.size());
  if (unit < 0 || unit >= n || static_cast<int>(mult.size()) != n)
    throw DomainError("multiplicativeAlgebra: malformed monoid table");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (mult[i][j] < 0 || mult[i][j] >= n || mult[i][j] != mult[j][i])
        throw DomainError("multiplicativeAlgebra: table not commutative");
      if (mult[unit][j] != j)
        throw DomainError("multiplicativeAlgebra: unit law fails");
      for (int k = 0; k < n; ++k)
        if (mult[mult[i][j]][k] != mult[i][mult[j][k]])
          throw DomainError("multiplicativeAlgebra: table not associative");
    }
  auto A = std::make_shared<FiniteAlgebra>();
  A->P = P;
  for (const auto& a : P->colors.colors) A->carriers[a] = names;
  auto table = std::make_shared<std::vector<std::vector<int>>>(std::move(mult));
  int u = unit;
  A->action = [table, u](const ElemRef&, const std::vector<int>& xs) {
    int acc = u;
    for (int x : xs) acc = (*table)[acc][x];
    return acc;
  };
  return A;
}

std::vector<std::vector<int>> randomCommutativeMonoid(Rng& rng, int size) {
  if (size < 1) throw DomainError("randomCommutativeMonoid: size must be positive");
  std::vector<std::vector<int>> m(size, std::vector<int>(size, 0));
  for (;;) {
    // Unit row/column fixed; draw the rest symmetrically.
    for (int i = 1; i < size; ++i) {
      m[0][i] = m[i][0] = i;
      for (int j = i; j < size; ++j)
        m[i][j] = m[j][i] = static_cast<int>(rng.next() % size);
    }
    bool ok = true;
    for (int i = 1; i < size && ok; ++i)
      for (int j = 1; j < size && ok; ++j)
        for (int k = 1; k < size && ok; ++k)
          if (m[m[i][j]][k] != m[i][m[j][k]]) ok = false;
    if (ok) return m;
  }
}

}  // namespace opx
