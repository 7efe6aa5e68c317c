#include "opx/extension.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace opx {

namespace {

Profile translateBoth(const OperadMap& phi, const Profile& p) {
  Profile q;
  q.output = phi.colorMap(p.output);
  q.inputs.reserve(p.inputs.size());
  for (const auto& a : p.inputs) q.inputs.push_back(phi.colorMap(a));
  return q;
}

// The unary collection Y(b;a) = Q(b; f(a)) over (B, A).
CollPtr unaryCollection(const OperadMap& phi) {
  const Operad& P = *phi.src;
  const Operad& Q = *phi.dst;
  auto f = phi.colorMap;

  TruncationWindow w;
  w.colorsIn = Q.colors;
  w.colorsOut = P.colors;
  w.maxArity = 1;
  w.maxSlots = Q.window().maxSlots;
  if (Q.window().slotWeight) {
    auto base = Q.window().slotWeight;
    w.slotWeight = [base, f](const Profile& p) {
      return base(Profile{p.inputs, f(p.output)});
    };
  }

  SymmetricCollection Y;
  Y.window = w;
  for (const auto& b : Q.colors.colors) {
    for (const auto& a : P.colors.colors) {
      Profile yp{{b}, a};
      Profile qp{{b}, f(a)};
      if (!w.admits(yp) || !Q.window().admits(qp)) continue;
      if (!Q.coll->carriers.count(qp)) continue;
      Y.carriers[yp] = Q.coll->carriers.at(qp);
    }
  }
  Y.action = nullptr;  // arity one: only the identity acts
  return std::make_shared<SymmetricCollection>(std::move(Y));
}

// Middle relation: (p ∘_i u, sigma, q̄) ~ (p, sigma, q̄[i -> mu_Q(phi u, q_i)]),
// applied on raw encodings. Rewrite candidates (x, i, u) with x ∘_i u stored
// are precomputed once (on the first profile) from the interned tables.
EncodedRelationHook encodedMiddleHook(const OperadMap& phi) {
  OperadPtr Pp = phi.src;
  OperadPtr Qp = phi.dst;
  OperadMap ph = phi;
  struct Rewrite {
    int xPid, xIdx, leg;
    int uid;     // identity of u, for the memo key
    ElemRef fu;  // phi(u) in Q(f(c); f(ai))
    Color c;     // input color of u
    Color ai;    // output color of u (= input color `leg` of x)
  };
  struct State {
    bool built = false;
    std::map<std::pair<int, int>, std::vector<Rewrite>> rewrites;  // (pid of x∘u, idx) -> rules
    // (uid, q profile id, q) -> (target inner profile id, value); (-1,.) if the
    // substitute falls outside the window.
    std::map<std::array<int, 3>, std::pair<int, int>> mem;
  };
  auto st = std::make_shared<State>();
  return [Pp, Qp, ph, st](const Profile& rp, const CompData& d,
                          const std::vector<const std::vector<int>*>& enc,
                          const std::function<void(int, const std::vector<int>&)>& relate) {
    if (!st->built) {
      st->built = true;
      int uid = 0;
      for (const auto& [pu, ucar] : Pp->coll->carriers) {
        if (pu.arity() != 1 || ucar.empty()) continue;
        const Color& c = pu.inputs[0];
        const Color& ai = pu.output;
        for (int u = 0; u < static_cast<int>(ucar.size()); ++u) {
          ElemRef ue{pu, u};
          ElemRef fu = ph.apply(ue);
          int myUid = uid++;
          for (const auto& [px, xcar] : Pp->coll->carriers) {
            if (xcar.empty()) continue;
            auto xPid = d.profId.find(px);
            if (xPid == d.profId.end()) continue;  // x never occurs as an outer
            for (int i = 0; i < px.arity(); ++i) {
              if (px.inputs[i] != ai) continue;
              Profile pL = px;
              pL.inputs[i] = c;  // profile of x ∘_i u
              auto pidL = d.profId.find(pL);
              if (pidL == d.profId.end()) continue;
              std::vector<ElemRef> pad;
              pad.reserve(px.arity());
              for (int j = 0; j < px.arity(); ++j)
                pad.push_back(j == i ? ue : Pp->unit(px.inputs[j]));
              for (int x = 0; x < static_cast<int>(xcar.size()); ++x) {
                SubResult xs = Pp->sub(ElemRef{px, x}, pad);
                if (!xs.ok) continue;  // relation instance outside the window
                st->rewrites[{pidL->second, xs.value}].push_back(
                    Rewrite{xPid->second, x, i, myUid, fu, c, ai});
              }
            }
          }
        }
      }
    }

    std::vector<int> partner;
    for (int i = 0; i < static_cast<int>(enc.size()); ++i) {
      const auto& e = *enc[i];
      auto rit = st->rewrites.find({e[0], e[1]});
      if (rit == st->rewrites.end()) continue;
      for (const Rewrite& rw : rit->second) {
        int qPid = e[2 + 2 * rw.leg];
        int q = e[3 + 2 * rw.leg];
        std::array<int, 3> key{rw.uid, qPid, q};
        auto mt = st->mem.find(key);
        if (mt == st->mem.end()) {
          const Profile& yq = d.profiles[qPid];  // Y(b; c)
          const Color& b = yq.inputs[0];
          ElemRef qQ{Profile{{b}, ph.colorMap(rw.c)}, q};
          SubResult s = Qp->sub(rw.fu, {qQ});
          std::pair<int, int> val{-1, -1};
          if (s.ok) {
            auto tgt = d.profId.find(Profile{{b}, rw.ai});
            if (tgt == d.profId.end())
              throw DomainError("middle relation left the raw element set at " + rp.str());
            val = {tgt->second, s.value};
          }
          mt = st->mem.emplace(key, val).first;
        }
        if (mt->second.first < 0) continue;
        partner = e;
        partner[0] = rw.xPid;
        partner[1] = rw.xIdx;
        partner[2 + 2 * rw.leg] = mt->second.first;
        partner[3 + 2 * rw.leg] = mt->second.second;
        relate(i, partner);
      }
    }
  };
}

}  // namespace

Profile ExtensionMorphism::targetProfile(const Profile& p) const {
  return Profile{p.inputs, phi.colorMap(p.output)};
}

ElemRef ExtensionMorphism::apply(const ElemRef& cls) const {
  const CompositeElement& r = source->rep(cls);
  const Operad& Q = *phi.dst;
  ElemRef fp = phi.apply(r.outer);
  std::vector<ElemRef> qs;
  qs.reserve(r.inners.size());
  for (size_t j = 0; j < r.inners.size(); ++j) {
    const ElemRef& y = r.inners[j];
    qs.push_back(ElemRef{Profile{y.profile.inputs, phi.colorMap(y.profile.output)}, y.idx});
  }
  ElemRef q = Q.subOrThrow(fp, qs);
  return Q.coll->act(q, permInverse(r.sigma));
}

ExtensionMorphism extensionMorphism(const OperadMap& phi) {
  const Operad& P = *phi.src;
  const Operad& Q = *phi.dst;
  auto f = phi.colorMap;

  ExtensionMorphism ext;
  ext.phi = phi;
  ext.Y = unaryCollection(phi);

  TruncationWindow w;
  w.colorsIn = Q.colors;
  w.colorsOut = P.colors;
  w.maxArity = std::min(P.window().maxArity, Q.window().maxArity);
  w.maxSlots = Q.window().maxSlots;
  if (Q.window().slotWeight) {
    auto base = Q.window().slotWeight;
    w.slotWeight = [base, f](const Profile& p) {
      return base(Profile{p.inputs, f(p.output)});
    };
  }
  ext.window = w;
  ext.source =
      std::make_shared<CompositeProduct>(composeProduct(P.coll, ext.Y, w, nullptr, encodedMiddleHook(phi)));
  return ext;
}

ExtensionReport isCategoricalExtension(const OperadMap& phi) {
  const Operad& P = *phi.src;
  const Operad& Q = *phi.dst;
  auto f = phi.colorMap;
  ExtensionMorphism ext = extensionMorphism(phi);

  // Per B-color b: the A-colors a with Y(b;a) stored nonempty, and whether any
  // (b; f(a)) fell outside Q's window (which taints every profile using b).
  std::map<Color, std::vector<Color>> candidates;
  std::map<Color, bool> tainted;
  for (const auto& b : Q.colors.colors) {
    tainted[b] = false;
    for (const auto& a : P.colors.colors) {
      Profile qp{{b}, f(a)};
      if (!Q.window().admits(qp) || !Q.coll->carriers.count(qp)) {
        tainted[b] = true;
        continue;
      }
      if (!Q.coll->carriers.at(qp).empty()) candidates[b].push_back(a);
    }
  }

  // Enumerate all admitted source profiles (b̄; a).
  std::vector<Profile> profiles;
  for (const auto& a : P.colors.colors) {
    std::vector<Color> in;
    std::function<void()> rec = [&] {
      Profile p{in, a};
      if (ext.window.admits(p)) profiles.push_back(p);
      if (static_cast<int>(in.size()) == ext.window.maxArity) return;
      for (const auto& b : Q.colors.colors) {
        in.push_back(b);
        rec();
        in.pop_back();
      }
    };
    rec();
  }

  ExtensionReport report;
  bool anyUnclean = false;
  bool anyCleanFailure = false;

  for (const auto& sp : profiles) {
    Profile tq{sp.inputs, f(sp.output)};
    if (!Q.window().admits(tq) || !Q.coll->carriers.count(tq)) continue;
    ++report.profilesChecked;
    int n = sp.arity();

    // Cleanliness: every potentially-contributing P-profile is in the window.
    bool clean = true;
    for (const auto& b : sp.inputs)
      if (tainted[b]) clean = false;
    if (clean) {
      std::vector<Color> abar(n);
      std::function<bool(int)> checkA = [&](int j) -> bool {
        if (j == n) {
          Profile pp{abar, sp.output};
          return P.window().admits(pp) && P.coll->carriers.count(pp);
        }
        for (const auto& a : candidates[sp.inputs[j]]) {
          abar[j] = a;
          if (!checkA(j + 1)) return false;
        }
        return true;
      };
      clean = checkA(0);
    }

    const auto& targetCar = Q.coll->carriers.at(tq);
    int classCount = 0;
    auto rit = ext.source->reps().find(sp);
    if (rit != ext.source->reps().end()) classCount = static_cast<int>(rit->second.size());

    std::vector<int> preimage(targetCar.size(), -1);
    std::string status = "bijection";
    std::string witness;
    try {
      for (int c = 0; c < classCount; ++c) {
        ElemRef img = ext.apply(ElemRef{sp, c});
        if (preimage[img.idx] >= 0) {
          status = "not-injective";
          witness = ext.source->result->nameOf(ElemRef{sp, preimage[img.idx]}) + " and " +
                    ext.source->result->nameOf(ElemRef{sp, c}) + " -> " +
                    Q.coll->nameOf(img);
          break;
        }
        preimage[img.idx] = c;
      }
      if (status == "bijection") {
        for (size_t t = 0; t < targetCar.size(); ++t) {
          if (preimage[t] < 0) {
            status = "not-surjective";
            witness = Q.coll->nameOf(ElemRef{tq, static_cast<int>(t)});
            break;
          }
        }
      }
    } catch (const TruncationError& te) {
      status = "truncated";
      witness = te.what();
      clean = false;
    }

    if (status == "bijection") {
      ++report.bijections;
      report.factorization[sp] = preimage;
      if (!clean) {
        anyUnclean = true;
        report.entries.push_back({sp, "bijection", "truncation boundary nearby", false});
      }
    } else {
      if (clean) anyCleanFailure = true;
      else anyUnclean = true;
      report.entries.push_back({sp, status, witness, clean});
    }
  }

  if (anyCleanFailure)
    report.verdict = ExtensionReport::Verdict::No;
  else if (anyUnclean || report.bijections < report.profilesChecked)
    report.verdict = ExtensionReport::Verdict::Indeterminate;
  else
    report.verdict = ExtensionReport::Verdict::Yes;
  if (report.verdict != ExtensionReport::Verdict::Yes) report.factorization.clear();
  return report;
}

CompositeElement factorize(const ExtensionMorphism& ext, const ExtensionReport& report,
                           const Profile& sourceProfile, int q) {
  if (report.verdict != ExtensionReport::Verdict::Yes)
    throw DomainError("factorize requires a yes verdict");
  auto it = report.factorization.find(sourceProfile);
  if (it == report.factorization.end())
    throw DomainError("factorize: no factorization table at " + sourceProfile.str());
  if (q < 0 || q >= static_cast<int>(it->second.size()))
    throw DomainError("factorize: target index out of range at " + sourceProfile.str());
  return ext.source->rep(ElemRef{sourceProfile, it->second[q]});
}

ExtensionReport::Verdict isMonoidalExtension(const OperadMap& phi) {
  const Operad& P = *phi.src;
  const Operad& Q = *phi.dst;
  if (P.colors.colors.size() != 1 || Q.colors.colors.size() != 1)
    throw DomainError("isMonoidalExtension requires monochrome operads");
  Color a = P.colors.colors[0];
  Color b = Q.colors.colors[0];
  int maxN = std::min(P.window().maxArity, Q.window().maxArity);

  Profile unaryP{{a}, a};
  Profile unaryQ{{b}, b};
  size_t nu = P.coll->carriers.count(unaryP) ? P.coll->sizeAt(unaryP) : 0;
  size_t nq = Q.coll->carriers.count(unaryQ) ? Q.coll->sizeAt(unaryQ) : 0;

  bool clean = true;
  bool failure = false;
  for (int n = 0; n <= maxN; ++n) {
    Profile pp{std::vector<Color>(n, a), a};
    Profile qp{std::vector<Color>(n, b), b};
    if (!P.window().admits(pp) || !Q.window().admits(qp) || !P.coll->carriers.count(pp) ||
        !Q.coll->carriers.count(qp)) {
      clean = false;
      continue;
    }
    size_t np = P.coll->sizeAt(pp);
    // Aligned pairs (p, q̄), q_j unary in Q.
    struct Pair {
      int p;
      std::vector<int> qs;
      auto operator<=>(const Pair&) const = default;
    };
    std::vector<Pair> raws;
    std::vector<int> qs(n, 0);
    std::function<void(int)> gen = [&](int j) {
      if (j == n) {
        for (int p = 0; p < static_cast<int>(np); ++p) raws.push_back({p, qs});
        return;
      }
      for (qs[j] = 0; qs[j] < static_cast<int>(nq); ++qs[j]) gen(j + 1);
    };
    if (n == 0 || nq > 0) gen(0);
    std::sort(raws.begin(), raws.end());
    std::map<Pair, int> index;
    for (size_t i = 0; i < raws.size(); ++i) index[raws[i]] = static_cast<int>(i);
    UnionFind uf(raws.size());
    // Middle moves: (p ∘_j u, q̄) ~ (p, q̄[j -> phi(u)∘q_j]) for unary u.
    for (size_t i = 0; i < raws.size(); ++i) {
      const Pair& e = raws[i];
      ElemRef pe{pp, e.p};
      for (int j = 0; j < n; ++j) {
        for (int u = 0; u < static_cast<int>(nu); ++u) {
          ElemRef ue{unaryP, u};
          std::vector<ElemRef> pad;
          for (int k = 0; k < n; ++k) pad.push_back(k == j ? ue : P.unit(a));
          SubResult left = P.sub(pe, pad);
          SubResult comp = Q.sub(phi.apply(ue), {ElemRef{unaryQ, e.qs[j]}});
          if (!left.ok || !comp.ok) {
            clean = false;
            continue;
          }
          Pair L{left.value, e.qs};
          Pair R{e.p, e.qs};
          R.qs[j] = comp.value;
          uf.unite(index.at(L), index.at(R));
        }
      }
    }
    // Image of each class under mu(phi(p), q̄).
    std::vector<int> preimage(Q.coll->sizeAt(qp), -1);
    std::set<int> roots;
    bool profileFail = false;
    for (size_t i = 0; i < raws.size(); ++i) {
      int r = uf.find(static_cast<int>(i));
      std::vector<ElemRef> qrefs;
      for (int j = 0; j < n; ++j) qrefs.push_back(ElemRef{unaryQ, raws[i].qs[j]});
      SubResult img = Q.sub(phi.apply(ElemRef{pp, raws[i].p}), qrefs);
      if (!img.ok) {
        clean = false;
        continue;
      }
      if (preimage[img.value] >= 0 && preimage[img.value] != r) profileFail = true;
      preimage[img.value] = r;
      roots.insert(r);
    }
    size_t hit = 0;
    for (int v : preimage)
      if (v >= 0) ++hit;
    if (hit != preimage.size() || roots.size() != hit) profileFail = true;
    if (profileFail) failure = true;
  }
  if (failure && clean) return ExtensionReport::Verdict::No;
  if (failure || !clean) return ExtensionReport::Verdict::Indeterminate;
  return ExtensionReport::Verdict::Yes;
}

SieveReport checkMaximalSieve(const OperadMap& phi) {
  const Operad& P = *phi.src;
  const Operad& Q = *phi.dst;
  auto f = phi.colorMap;

  std::set<Color> image;
  for (const auto& a : P.colors.colors) {
    Color b = f(a);
    if (image.count(b)) {
      SieveReport r;
      r.failedCondition = "color map not injective at " + b;
      return r;
    }
    image.insert(b);
  }

  // Fully faithful: each component is a bijection.
  for (const auto& [p, car] : P.coll->carriers) {
    Profile q = translateBoth(phi, p);
    if (!Q.window().admits(q) || !Q.coll->carriers.count(q)) continue;
    size_t target = Q.coll->sizeAt(q);
    std::set<int> seen;
    for (int x = 0; x < static_cast<int>(car.size()); ++x) seen.insert(phi.component(p, x));
    if (seen.size() != car.size() || seen.size() != target) {
      SieveReport r;
      r.failedCondition = "fully-faithful fails at " + p.str();
      return r;
    }
  }

  // Ideal: nonempty Q-carriers over an image output color use only image
  // input colors.
  for (const auto& [q, car] : Q.coll->carriers) {
    if (car.empty() || !image.count(q.output)) continue;
    for (const auto& b : q.inputs) {
      if (!image.count(b)) {
        SieveReport r;
        r.failedCondition = "ideal fails at " + q.str() + " (input color " + b + ")";
        return r;
      }
    }
  }
  SieveReport r;
  r.sieve = true;
  return r;
}

}  // namespace opx
