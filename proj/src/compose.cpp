#include "opx/compose.hpp"

#include <algorithm>
#include <cassert>

namespace opx {

namespace {

std::string elemTag(const CollPtr& coll, const ElemRef& e) {
  return e.profile.str() + ":" + coll->nameOf(e);
}

std::string compositeName(const CollPtr& X, const CollPtr& Y, const CompositeElement& e) {
  std::string s = "[" + elemTag(X, e.outer) + "]" + permStr(e.sigma) + "(";
  for (size_t j = 0; j < e.inners.size(); ++j) {
    if (j) s += ",";
    s += elemTag(Y, e.inners[j]);
  }
  return s + ")";
}

// Block offsets of the inner operations inside the concatenated input list.
std::vector<int> blockOffsets(const CompositeElement& e) {
  std::vector<int> off(e.inners.size() + 1, 0);
  for (size_t j = 0; j < e.inners.size(); ++j)
    off[j + 1] = off[j] + e.inners[j].profile.arity();
  return off;
}

// Inner move: act by tau on inner block j; sigma composes with the block-local
// permutation of the concatenated positions. Used by the small-scale dayPower
// quotient; composeProduct works on integer encodings instead.
CompositeElement innerMove(const CollPtr& Y, const CompositeElement& e, int j, const Perm& tau) {
  CompositeElement r = e;
  r.inners[j] = Y->act(e.inners[j], tau);
  auto off = blockOffsets(e);
  for (size_t t = 0; t < tau.size(); ++t) r.sigma[off[j] + t] = e.sigma[off[j] + tau[t]];
  return r;
}

// Lookup-only encoding; profiles must already be interned.
std::vector<int> encodeElem(const CompData& d, const CompositeElement& e) {
  auto pid = [&](const Profile& p) {
    auto it = d.profId.find(p);
    if (it == d.profId.end())
      throw DomainError("composite product: unknown profile " + p.str());
    return it->second;
  };
  std::vector<int> k;
  k.reserve(2 + 2 * e.inners.size() + e.sigma.size());
  k.push_back(pid(e.outer.profile));
  k.push_back(e.outer.idx);
  for (const auto& y : e.inners) {
    k.push_back(pid(y.profile));
    k.push_back(y.idx);
  }
  k.insert(k.end(), e.sigma.begin(), e.sigma.end());
  return k;
}

int classIndexIn(const CompData& d, const Profile& p, const CompositeElement& e) {
  auto it = d.classes.find(p);
  if (it == d.classes.end())
    throw DomainError("composite product: no classes at " + p.str());
  std::vector<int> key = encodeElem(d, e);
  auto jt = it->second.index.find(key);
  if (jt == it->second.index.end())
    throw DomainError("composite product: unknown composite element at " + p.str());
  return it->second.classOfRaw[jt->second];
}

}  // namespace

int CompositeProduct::classIndex(const CompositeElement& e) const {
  return classIndexIn(*data, e.resultProfile(), e);
}

const CompositeElement& CompositeProduct::rep(const ElemRef& classElem) const {
  auto it = data->reps.find(classElem.profile);
  if (it == data->reps.end() || classElem.idx < 0 ||
      classElem.idx >= static_cast<int>(it->second.size()))
    throw DomainError("composite product: unknown class at " + classElem.profile.str());
  return it->second[classElem.idx];
}

CompositeElement decodeRaw(const CompData& d, const std::vector<int>& e) {
  CompositeElement r;
  int m = d.profArity[e[0]];
  r.outer = ElemRef{d.profiles[e[0]], e[1]};
  r.inners.reserve(m);
  int n = 0;
  for (int t = 0; t < m; ++t) {
    int pid = e[2 + 2 * t];
    r.inners.push_back(ElemRef{d.profiles[pid], e[3 + 2 * t]});
    n += d.profArity[pid];
  }
  r.sigma.assign(e.begin() + 2 + 2 * m, e.begin() + 2 + 2 * m + n);
  return r;
}

std::vector<CompositeElement> CompositeProduct::rawsAt(const Profile& p) const {
  std::vector<CompositeElement> out;
  auto it = data->classes.find(p);
  if (it == data->classes.end()) return out;
  out.reserve(it->second.enc.size());
  for (const auto* e : it->second.enc) out.push_back(decodeRaw(*data, *e));
  return out;
}

CompositeProduct composeProduct(CollPtr X, CollPtr Y, const TruncationWindow& window,
                                const RelationHook& extra,
                                const EncodedRelationHook& encodedExtra) {
  auto data = std::make_shared<CompData>();

  auto intern = [&](const Profile& p) -> int {
    auto it = data->profId.find(p);
    if (it != data->profId.end()) return it->second;
    int id = static_cast<int>(data->profiles.size());
    data->profId.emplace(p, id);
    data->profiles.push_back(p);
    data->profArity.push_back(p.arity());
    return id;
  };
  auto encode = [&](const CompositeElement& e) {
    std::vector<int> k;
    k.reserve(2 + 2 * e.inners.size() + e.sigma.size());
    k.push_back(intern(e.outer.profile));
    k.push_back(e.outer.idx);
    for (const auto& y : e.inners) {
      k.push_back(intern(y.profile));
      k.push_back(y.idx);
    }
    k.insert(k.end(), e.sigma.begin(), e.sigma.end());
    return k;
  };

  // Index Y's nonempty profiles by output color.
  std::map<Color, std::vector<Profile>> byOutput;
  for (const auto& [p, car] : Y->carriers)
    if (!car.empty()) byOutput[p.output].push_back(p);

  // Enumerate raw composite elements directly as encodings, grouped by result
  // profile.
  std::map<Profile, std::vector<std::vector<int>>> encBuf;
  for (const auto& [po, carX] : X->carriers) {
    if (carX.empty()) continue;
    int m = po.arity();
    // Choose an inner profile for each outer input.
    std::vector<Profile> chosen(m);
    std::function<void(int, int)> chooseProfiles = [&](int j, int aritySoFar) {
      if (aritySoFar > window.maxArity) return;
      if (j == m) {
        int n = aritySoFar;
        // The result profile depends only on the profile tuple and sigma, so
        // group the admitted sigmas by result profile before touching elements.
        std::vector<Color> wbar;
        wbar.reserve(n);
        for (int t = 0; t < m; ++t)
          wbar.insert(wbar.end(), chosen[t].inputs.begin(), chosen[t].inputs.end());
        std::vector<std::pair<std::vector<std::vector<int>>*, std::vector<Perm>>> groups;
        {
          std::map<Profile, std::vector<Perm>> byProfile;
          for (const auto& sigma : allPerms(n)) {
            Profile rp;
            rp.output = po.output;
            rp.inputs.resize(n);
            for (int k = 0; k < n; ++k) rp.inputs[sigma[k]] = wbar[k];
            if (!window.admits(rp)) continue;
            byProfile[rp].push_back(sigma);
          }
          for (auto& [rp, sigmas] : byProfile)
            groups.emplace_back(&encBuf[rp], std::move(sigmas));
        }
        if (groups.empty()) return;
        std::vector<int> tmpl(2 + 2 * m + n);
        tmpl[0] = intern(po);
        for (int t = 0; t < m; ++t) tmpl[2 + 2 * t] = intern(chosen[t]);
        // Iterate element tuples.
        std::vector<int> pick(m, 0);
        std::function<void(int)> chooseElems = [&](int jj) {
          if (jj == m) {
            for (int t = 0; t < m; ++t) tmpl[3 + 2 * t] = pick[t];
            for (int x = 0; x < static_cast<int>(carX.size()); ++x) {
              tmpl[1] = x;
              for (const auto& [bucket, sigmas] : groups)
                for (const auto& sigma : sigmas) {
                  std::copy(sigma.begin(), sigma.end(), tmpl.begin() + 2 + 2 * m);
                  bucket->push_back(tmpl);
                }
            }
            return;
          }
          int sz = static_cast<int>(Y->carrierAt(chosen[jj]).size());
          for (pick[jj] = 0; pick[jj] < sz; ++pick[jj]) chooseElems(jj + 1);
        };
        chooseElems(0);
        return;
      }
      auto it = byOutput.find(po.inputs[j]);
      if (it == byOutput.end()) return;
      for (const auto& pi : it->second) {
        chosen[j] = pi;
        chooseProfiles(j + 1, aritySoFar + pi.arity());
      }
    };
    chooseProfiles(0, 0);
  }

  // Per-(profile, adjacent transposition) action tables for the moves below.
  struct AdjTab {
    int movedPid;          // profile id after the transposition
    std::vector<int> tab;  // element index map
  };
  std::map<std::pair<int, int>, AdjTab> adjX, adjY;
  auto adjTab = [&](const CollPtr& C, std::map<std::pair<int, int>, AdjTab>& cache, int pid,
                    int j) -> const AdjTab& {
    auto key = std::make_pair(pid, j);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const Profile p = data->profiles[pid];
    Perm tau = transposition(p.arity(), j, j + 1);
    AdjTab t;
    t.movedPid = intern(permuteProfile(p, tau));
    int sz = static_cast<int>(C->carriers.at(p).size());
    t.tab.resize(sz);
    for (int x = 0; x < sz; ++x) t.tab[x] = C->act(ElemRef{p, x}, tau).idx;
    return cache.emplace(key, std::move(t)).first->second;
  };

  // Quotient each profile by the generated relations.
  for (auto& [rp, rows] : encBuf) {
    // Index in enumeration order (already duplicate-free, but the hash index
    // also dedupes defensively). Key storage lives in the index; cls.enc holds
    // stable pointers to it.
    CompData::Classes cls;
    cls.index.reserve(rows.size() * 2);
    cls.enc.reserve(rows.size());
    for (auto& row : rows) {
      auto [it, fresh] = cls.index.emplace(std::move(row), static_cast<int>(cls.enc.size()));
      if (fresh) cls.enc.push_back(&it->first);
    }
    rows.clear();
    rows.shrink_to_fit();
    const int N = static_cast<int>(cls.enc.size());

    auto indexOfKey = [&](const std::vector<int>& key) -> int {
      auto it = cls.index.find(key);
      if (it == cls.index.end())
        throw DomainError("composite relation left the raw element set at " + rp.str());
      return it->second;
    };

    UnionFind uf(N);
    std::vector<int> out, off;
    for (int i = 0; i < N; ++i) {
      const auto& e = *cls.enc[i];
      int m = data->profArity[e[0]];
      int base = 2 + 2 * m;
      off.assign(m + 1, 0);
      for (int t = 0; t < m; ++t) off[t + 1] = off[t] + data->profArity[e[2 + 2 * t]];
      // Outer moves: adjacent block swaps.
      for (int j = 0; j + 1 < m; ++j) {
        const AdjTab& tx = adjTab(X, adjX, e[0], j);
        out = e;
        out[0] = tx.movedPid;
        out[1] = tx.tab[e[1]];
        out[2 + 2 * j] = e[2 + 2 * (j + 1)];
        out[3 + 2 * j] = e[3 + 2 * (j + 1)];
        out[2 + 2 * (j + 1)] = e[2 + 2 * j];
        out[3 + 2 * (j + 1)] = e[3 + 2 * j];
        int aj = data->profArity[e[2 + 2 * j]];
        int aj1 = data->profArity[e[2 + 2 * (j + 1)]];
        for (int s = 0; s < aj1; ++s) out[base + off[j] + s] = e[base + off[j + 1] + s];
        for (int s = 0; s < aj; ++s) out[base + off[j] + aj1 + s] = e[base + off[j] + s];
        uf.unite(i, indexOfKey(out));
      }
      // Inner moves: adjacent transpositions inside one block.
      for (int j = 0; j < m; ++j) {
        int pj = e[2 + 2 * j];
        int l = data->profArity[pj];
        for (int t = 0; t + 1 < l; ++t) {
          const AdjTab& ty = adjTab(Y, adjY, pj, t);
          out = e;
          out[2 + 2 * j] = ty.movedPid;
          out[3 + 2 * j] = ty.tab[e[3 + 2 * j]];
          std::swap(out[base + off[j] + t], out[base + off[j] + t + 1]);
          uf.unite(i, indexOfKey(out));
        }
      }
    }

    if (encodedExtra) {
      auto relate = [&](int i, const std::vector<int>& partner) {
        uf.unite(i, indexOfKey(partner));
      };
      encodedExtra(rp, *data, cls.enc, relate);
    }
    if (extra) {
      std::vector<CompositeElement> decoded;
      decoded.reserve(N);
      for (int i = 0; i < N; ++i) decoded.push_back(decodeRaw(*data, *cls.enc[i]));
      auto relate = [&](const CompositeElement& a, const CompositeElement& b) {
        uf.unite(indexOfKey(encode(a)), indexOfKey(encode(b)));
      };
      extra(rp, decoded, relate);
    }

    // Canonical representative: first member of each class in enumeration
    // order (deterministic).
    std::map<int, int> rootToClass;
    std::vector<CompositeElement> reps;
    cls.classOfRaw.assign(N, -1);
    for (int i = 0; i < N; ++i) {
      int r = uf.find(i);
      auto it = rootToClass.find(r);
      if (it == rootToClass.end()) {
        rootToClass[r] = static_cast<int>(reps.size());
        cls.classOfRaw[i] = static_cast<int>(reps.size());
        reps.push_back(decodeRaw(*data, *cls.enc[i]));
      } else {
        cls.classOfRaw[i] = it->second;
      }
    }
    data->reps[rp] = std::move(reps);
    data->classes[rp] = std::move(cls);
  }

  // Assemble the result collection.
  SymmetricCollection res;
  res.window = window;
  for (const auto& [rp, reps] : data->reps) {
    auto& car = res.carriers[rp];
    car.reserve(reps.size());
    for (const auto& r : reps) car.push_back(compositeName(X, Y, r));
  }
  std::shared_ptr<const CompData> dataC = data;
  res.action = [dataC](const Profile& p, const Perm& rho, int idx) {
    const auto& reps = dataC->reps.at(p);
    const auto& r = reps[idx];
    CompositeElement moved = r;
    moved.sigma = permCompose(permInverse(rho), r.sigma);
    Profile q = permuteProfile(p, rho);
    return classIndexIn(*dataC, q, moved);
  };

  CompositeProduct out;
  out.X = std::move(X);
  out.Y = std::move(Y);
  out.result = std::make_shared<SymmetricCollection>(std::move(res));
  out.data = std::move(data);
  return out;
}

std::vector<CompositeElement> dayPower(CollPtr Y, const std::vector<Color>& bbar,
                                       const std::vector<Color>& abar) {
  // Same raw shape as a composite element, with a dummy outer slot; quotient by
  // the inner relations only (the outer coend is not taken here).
  std::map<Color, std::vector<Profile>> byOutput;
  for (const auto& [p, car] : Y->carriers)
    if (!car.empty()) byOutput[p.output].push_back(p);

  int m = static_cast<int>(bbar.size());
  int n = static_cast<int>(abar.size());
  std::vector<CompositeElement> raws;
  std::vector<Profile> chosen(m);
  std::function<void(int, int)> chooseProfiles = [&](int j, int aritySoFar) {
    if (aritySoFar > n) return;
    if (j == m) {
      if (aritySoFar != n) return;
      std::vector<int> pick(m, 0);
      std::function<void(int)> chooseElems = [&](int jj) {
        if (jj == m) {
          CompositeElement e;
          e.outer = ElemRef{Profile{{}, "*"}, 0};  // dummy
          for (int t = 0; t < m; ++t) e.inners.push_back(ElemRef{chosen[t], pick[t]});
          auto w = e.concatInputs();
          for (const auto& sigma : allPerms(n)) {
            bool ok = true;
            for (int k = 0; k < n && ok; ++k) ok = (w[k] == abar[sigma[k]]);
            if (!ok) continue;
            e.sigma = sigma;
            raws.push_back(e);
          }
          return;
        }
        int sz = static_cast<int>(Y->carrierAt(chosen[jj]).size());
        for (pick[jj] = 0; pick[jj] < sz; ++pick[jj]) chooseElems(jj + 1);
      };
      chooseElems(0);
      return;
    }
    auto it = byOutput.find(bbar[j]);
    if (it == byOutput.end()) return;
    for (const auto& pi : it->second) {
      chosen[j] = pi;
      chooseProfiles(j + 1, aritySoFar + pi.arity());
    }
  };
  chooseProfiles(0, 0);

  std::sort(raws.begin(), raws.end());
  raws.erase(std::unique(raws.begin(), raws.end()), raws.end());
  std::map<CompositeElement, int> index;
  for (size_t i = 0; i < raws.size(); ++i) index[raws[i]] = static_cast<int>(i);
  UnionFind uf(raws.size());
  for (size_t i = 0; i < raws.size(); ++i) {
    const auto& e = raws[i];
    for (int j = 0; j < m; ++j) {
      int l = e.inners[j].profile.arity();
      for (int t = 0; t + 1 < l; ++t)
        uf.unite(static_cast<int>(i), index.at(innerMove(Y, e, j, transposition(l, t, t + 1))));
    }
  }
  std::vector<CompositeElement> reps;
  std::map<int, bool> seen;
  for (size_t i = 0; i < raws.size(); ++i) {
    int r = uf.find(static_cast<int>(i));
    if (!seen[r]) {
      seen[r] = true;
      reps.push_back(raws[i]);
    }
  }
  return reps;
}

// ---- angle hom ----------------------------------------------------------------

int AngleHom::indexOfTable(const Profile& p, const std::map<Color, std::vector<int>>& t) const {
  const auto& all = tables.at(p);
  for (size_t i = 0; i < all.size(); ++i)
    if (all[i] == t) return static_cast<int>(i);
  throw DomainError("angle hom: unknown table at " + p.str());
}

AngleHom angleHom(CollPtr X, CollPtr Z, const TruncationWindow& windowAB,
                  const ColorSet& outputColors) {
  if (!X->isArityOne()) throw DomainError("angle hom requires an arity-one first argument");
  AngleHom out;
  out.X = X;
  out.Z = Z;

  auto data = std::make_shared<std::map<Profile, std::vector<std::map<Color, std::vector<int>>>>>();

  // Profiles (ā;b): ā from Z's stored input lists, b from the (A,B) window.
  std::vector<std::vector<Color>> inputLists;
  for (const auto& [p, car] : Z->carriers) inputLists.push_back(p.inputs);
  std::sort(inputLists.begin(), inputLists.end());
  inputLists.erase(std::unique(inputLists.begin(), inputLists.end()), inputLists.end());

  for (const auto& abar : inputLists) {
    for (const auto& b : windowAB.colorsOut.colors) {
      Profile p{abar, b};
      if (!windowAB.admits(p)) continue;
      // Enumerate families: for each c, a function X(b;c) -> Z(ā;c).
      std::vector<std::map<Color, std::vector<int>>> families{{}};
      bool empty = false;
      for (const auto& c : outputColors.colors) {
        size_t dom = X->sizeAt(Profile{{b}, c});
        size_t cod = Z->sizeAt(Profile{abar, c});
        if (dom == 0) continue;
        if (cod == 0) {
          empty = true;
          break;
        }
        std::vector<std::map<Color, std::vector<int>>> next;
        std::vector<int> table(dom, 0);
        std::function<void(size_t)> fill = [&](size_t i) {
          if (i == dom) {
            for (const auto& fam : families) {
              auto f2 = fam;
              f2[c] = table;
              next.push_back(std::move(f2));
            }
            return;
          }
          for (table[i] = 0; table[i] < static_cast<int>(cod); ++table[i]) fill(i + 1);
        };
        fill(0);
        families = std::move(next);
      }
      if (empty) continue;
      (*data)[p] = std::move(families);
    }
  }

  SymmetricCollection coll;
  coll.window = windowAB;
  for (const auto& [p, fams] : *data) {
    auto& car = coll.carriers[p];
    for (size_t i = 0; i < fams.size(); ++i) {
      std::string name = "h" + std::to_string(i) + "@" + p.str();
      car.push_back(name);
    }
  }
  CollPtr Zc = Z;
  auto dataC = data;
  coll.action = [dataC, Zc](const Profile& p, const Perm& rho, int idx) {
    const auto& fam = dataC->at(p)[idx];
    std::map<Color, std::vector<int>> moved;
    for (const auto& [c, table] : fam) {
      std::vector<int> t2(table.size());
      Profile zp{p.inputs, c};
      for (size_t i = 0; i < table.size(); ++i) t2[i] = Zc->act(zp, rho, table[i]);
      moved[c] = std::move(t2);
    }
    const auto& all = dataC->at(permuteProfile(p, rho));
    for (size_t i = 0; i < all.size(); ++i)
      if (all[i] == moved) return static_cast<int>(i);
    throw DomainError("angle hom action left the family set at " + p.str());
  };

  out.coll = std::make_shared<SymmetricCollection>(std::move(coll));
  out.tables = *data;
  return out;
}

CollectionMap angleTranspose(const AngleHom& hom, const CompositeProduct& XY, CollPtr Y,
                             const CollectionMap& g) {
  CollectionMap out;
  out.src = Y;
  out.dst = hom.coll;
  auto homP = std::make_shared<AngleHom>(hom);
  auto XYp = std::make_shared<CompositeProduct>(XY);
  auto gp = std::make_shared<CollectionMap>(g);
  out.component = [homP, XYp, gp](const Profile& p, int y) {
    // ĝ(y): c -> (x -> g([x, id, y])).
    std::map<Color, std::vector<int>> table;
    int n = p.arity();
    for (const auto& [xp, xcar] : homP->X->carriers) {
      if (xcar.empty() || xp.inputs != std::vector<Color>{p.output}) continue;
      const Color& c = xp.output;
      std::vector<int> t(xcar.size());
      for (size_t x = 0; x < xcar.size(); ++x) {
        CompositeElement e;
        e.outer = ElemRef{xp, static_cast<int>(x)};
        e.sigma = permIdentity(n);
        e.inners = {ElemRef{p, y}};
        ElemRef cls = XYp->classRef(e);
        t[x] = gp->component(cls.profile, cls.idx);
      }
      table[c] = std::move(t);
    }
    Profile hp{p.inputs, p.output};
    return homP->indexOfTable(hp, table);
  };
  return out;
}

CollectionMap angleUntranspose(const AngleHom& hom, const CompositeProduct& XY, CollPtr Y,
                               const CollectionMap& ghat) {
  CollectionMap out;
  out.src = XY.result;
  out.dst = hom.Z;
  auto homP = std::make_shared<AngleHom>(hom);
  auto XYp = std::make_shared<CompositeProduct>(XY);
  auto gp = std::make_shared<CollectionMap>(ghat);
  out.component = [homP, XYp, gp](const Profile& p, int idx) {
    const CompositeElement& r = XYp->rep(ElemRef{p, idx});
    // r = (x, sigma, [y]) with x arity-one; evaluate ĝ(y) at x, then undo sigma.
    const ElemRef& y = r.inners[0];
    int famIdx = gp->component(y.profile, y.idx);
    const auto& fam = homP->tables.at(Profile{y.profile.inputs, y.profile.output})[famIdx];
    const Color& c = r.outer.profile.output;
    int z = fam.at(c)[r.outer.idx];  // z ∈ Z(w̄;c) with w̄ = ā∘sigma
    Profile zp{y.profile.inputs, c};
    return homP->Z->act(zp, permInverse(r.sigma), z);
  };
  return out;
}

// ---- function collections ------------------------------------------------------

FunctionCollections functionCollections(const ColorSet& A, const ColorSet& B,
                                        std::function<Color(const Color&)> f) {
  FunctionCollections fc;
  fc.f = f;
  fc.A = A;
  fc.B = B;

  TruncationWindow wAB{A, B, 1};
  TruncationWindow wBA{B, A, 1};
  std::map<Profile, std::vector<std::string>> carF, carBarF;
  for (const auto& a : A.colors) {
    carF[Profile{{a}, f(a)}] = {"f@" + a};
    carBarF[Profile{{f(a)}, a}] = {"fbar@" + a};
  }
  fc.fwd = std::make_shared<SymmetricCollection>(makeCollection(wAB, std::move(carF)));
  fc.bwd = std::make_shared<SymmetricCollection>(makeCollection(wBA, std::move(carBarF)));

  TruncationWindow wAA{A, A, 1};
  TruncationWindow wBB{B, B, 1};
  fc.barF_F = std::make_shared<CompositeProduct>(composeProduct(fc.bwd, fc.fwd, wAA));
  fc.f_barF = std::make_shared<CompositeProduct>(composeProduct(fc.fwd, fc.bwd, wBB));
  fc.unitA = std::make_shared<SymmetricCollection>(unitCollection(A));
  fc.unitB = std::make_shared<SymmetricCollection>(unitCollection(B));

  // unit: 1_A(a;a) -> (f̄◁f)(a;a), the inclusion picking (fbar@a, f@a).
  fc.unit.src = fc.unitA;
  fc.unit.dst = fc.barF_F->result;
  auto barF_F = fc.barF_F;
  auto bwd = fc.bwd;
  auto fwd = fc.fwd;
  auto fcopy = f;
  fc.unit.component = [barF_F, fcopy](const Profile& p, int) {
    const Color& a = p.output;
    CompositeElement e;
    e.outer = ElemRef{Profile{{fcopy(a)}, a}, 0};
    e.sigma = permIdentity(1);
    e.inners = {ElemRef{Profile{{a}, fcopy(a)}, 0}};
    return barF_F->classIndex(e);
  };

  // counit: (f◁f̄)(b;b) -> 1_B(b;b), the fold map.
  fc.counit.src = fc.f_barF->result;
  fc.counit.dst = fc.unitB;
  fc.counit.component = [](const Profile&, int) { return 0; };
  return fc;
}

std::vector<std::string> checkTriangleIdentities(const FunctionCollections& fc) {
  std::vector<std::string> bad;
  // First triangle: f --(f◁η)--> f◁(f̄◁f) ≅ (f◁f̄)◁f --(ε◁f)--> f.
  for (const auto& a : fc.A.colors) {
    Color b = fc.f(a);
    // Element chase. Start: f@a ∈ f(a;b). f◁η gives (f@a, id, η(a)); reassociate
    // to ((f@a, f̄@a), id, f@a); apply ε to the outer class (it must be a class of
    // (f◁f̄)(b;b)); land in (1_B ◁ f)(a;b) ≅ f(a;b) and compare with f@a.
    CompositeElement inner;  // η(a) as a class of (f̄◁f)(a;a)
    inner.outer = ElemRef{Profile{{b}, a}, 0};
    inner.sigma = permIdentity(1);
    inner.inners = {ElemRef{Profile{{a}, b}, 0}};
    int etaClass = fc.barF_F->classIndex(inner);
    // Reassociation by hand (all carriers are singletons): the outer part is
    // the class of (f@a, id, f̄@a) in f◁f̄ at (b;b).
    CompositeElement outerPart;
    outerPart.outer = ElemRef{Profile{{a}, b}, 0};
    outerPart.sigma = permIdentity(1);
    outerPart.inners = {ElemRef{Profile{{b}, a}, 0}};
    int cls = fc.f_barF->classIndex(outerPart);
    int folded = fc.counit.component(Profile{{b}, b}, cls);
    (void)etaClass;
    if (folded != 0)
      bad.push_back("triangle 1 fails at color " + a);
    // The remaining inner factor is f@a itself, so the composite is the
    // identity iff the chase above returned the unique element, which it did
    // when both class lookups succeeded.
  }
  // Second triangle: f̄ --(η◁f̄)--> (f̄◁f)◁f̄ ≅ f̄◁(f◁f̄) --(f̄◁ε)--> f̄.
  for (const auto& a : fc.A.colors) {
    Color b = fc.f(a);
    CompositeElement outerPart;  // (f@a, id, f̄@a) in f◁f̄ at (b;b)
    outerPart.outer = ElemRef{Profile{{a}, b}, 0};
    outerPart.sigma = permIdentity(1);
    outerPart.inners = {ElemRef{Profile{{b}, a}, 0}};
    int cls = fc.f_barF->classIndex(outerPart);
    int folded = fc.counit.component(Profile{{b}, b}, cls);
    if (folded != 0) bad.push_back("triangle 2 fails at color " + a);
  }
  return bad;
}

// ---- unitors / associator -------------------------------------------------------

ElemRef rightUnitor(const CompositeProduct& XU, const ElemRef& classElem) {
  const CompositeElement& r = XU.rep(classElem);
  // r = (x, sigma, units); x ∈ X(b̄;c) with b̄ = ā∘sigma, so x = sigma*(x0).
  Profile p = classElem.profile;
  return ElemRef{p, XU.X->act(r.outer.profile, permInverse(r.sigma), r.outer.idx)};
}

ElemRef leftUnitor(const CompositeProduct& UX, const ElemRef& classElem) {
  const CompositeElement& r = UX.rep(classElem);
  // r = (unit, sigma, [x]); x ∈ X(w̄;c) with w̄ = ā∘sigma.
  const ElemRef& x = r.inners[0];
  return ElemRef{classElem.profile, UX.Y->act(x.profile, permInverse(r.sigma), x.idx)};
}

ElemRef associate(const CompositeProduct& XY, const CompositeProduct& XY_Z,
                  const CompositeProduct& YZ, const CompositeProduct& X_YZ,
                  const ElemRef& classElem) {
  const CompositeElement& R = XY_Z.rep(classElem);
  const CompositeElement& r = XY.rep(R.outer);  // (x, tau, ybar)

  auto offU = blockOffsets(R);   // offsets of the z-blocks in R's concat
  auto offW = blockOffsets(r);   // offsets of the y-blocks in r's concat

  CompositeElement target;
  target.outer = r.outer;
  int mX = static_cast<int>(r.inners.size());
  for (int j = 0; j < mX; ++j) {
    const ElemRef& y = r.inners[j];
    CompositeElement w;  // element of Y◁Z for input j of x
    w.outer = y;
    int lj = y.profile.arity();
    int zArity = 0;
    for (int k = 0; k < lj; ++k) {
      int i = r.sigma[offW[j] + k];  // outer input index of XY feeding this slot
      w.inners.push_back(R.inners[i]);
      zArity += R.inners[i].profile.arity();
    }
    w.sigma = permIdentity(zArity);
    ElemRef wCls = YZ.classRef(w);
    target.inners.push_back(wCls);
    // Matching into the final input list.
    for (int k = 0; k < lj; ++k) {
      int i = r.sigma[offW[j] + k];
      for (int s = 0; s < R.inners[i].profile.arity(); ++s)
        target.sigma.push_back(R.sigma[offU[i] + s]);
    }
  }
  return X_YZ.classRef(target);
}

// ---- generic coequalizer --------------------------------------------------------

Coequalizer coequalize(const CollectionMap& f, const CollectionMap& g) {
  if (f.src != g.src || f.dst != g.dst)
    throw DomainError("coequalize: maps are not parallel");
  CollPtr W = f.dst;

  // Union-find per carrier of W.
  std::map<Profile, UnionFind> uf;
  for (const auto& [p, car] : W->carriers) uf.emplace(p, UnionFind(car.size()));
  for (const auto& [p, car] : f.src->carriers) {
    for (int z = 0; z < static_cast<int>(car.size()); ++z) {
      ElemRef a = f.apply(ElemRef{p, z});
      ElemRef b = g.apply(ElemRef{p, z});
      if (a.profile != b.profile)
        throw DomainError("coequalize: parallel pair is not profile-aligned at " + p.str());
      uf.at(a.profile).unite(a.idx, b.idx);
    }
  }

  auto repOf = std::make_shared<std::map<Profile, std::vector<int>>>();
  auto classOf = std::make_shared<std::map<Profile, std::vector<int>>>();
  SymmetricCollection q;
  q.window = W->window;
  for (const auto& [p, car] : W->carriers) {
    auto& ufp = uf.at(p);
    std::map<int, int> rootToClass;
    auto& reps = (*repOf)[p];
    auto& cls = (*classOf)[p];
    cls.resize(car.size());
    for (int i = 0; i < static_cast<int>(car.size()); ++i) {
      int r = ufp.find(i);
      auto it = rootToClass.find(r);
      if (it == rootToClass.end()) {
        rootToClass[r] = static_cast<int>(reps.size());
        cls[i] = static_cast<int>(reps.size());
        reps.push_back(i);
      } else {
        cls[i] = it->second;
      }
    }
    auto& carQ = q.carriers[p];
    for (int r : reps) carQ.push_back(car[r]);
  }
  CollPtr Wc = W;
  q.action = [repOf, classOf, Wc](const Profile& p, const Perm& rho, int idx) {
    int rep = repOf->at(p)[idx];
    int moved = Wc->act(p, rho, rep);
    return classOf->at(permuteProfile(p, rho))[moved];
  };

  Coequalizer out;
  out.quotient = std::make_shared<SymmetricCollection>(std::move(q));
  out.repOf = *repOf;
  out.projection.src = W;
  out.projection.dst = out.quotient;
  out.projection.component = [classOf](const Profile& p, int i) { return classOf->at(p)[i]; };
  return out;
}

std::optional<CollectionMap> mediate(const Coequalizer& q, const CollectionMap& f,
                                     const CollectionMap& g, const CollectionMap& cand) {
  // cand must coequalize the pair.
  for (const auto& [p, car] : f.src->carriers)
    for (int z = 0; z < static_cast<int>(car.size()); ++z) {
      ElemRef a = f.apply(ElemRef{p, z});
      ElemRef b = g.apply(ElemRef{p, z});
      if (cand.apply(a) != cand.apply(b)) return std::nullopt;
    }
  // Define on classes via representatives; check well-definedness.
  auto repOf = q.repOf;
  auto candP = std::make_shared<CollectionMap>(cand);
  CollectionMap m;
  m.src = q.quotient;
  m.dst = cand.dst;
  m.profileMap = cand.profileMap;
  m.component = [repOf, candP](const Profile& p, int cls) {
    return candP->component(p, repOf.at(p)[cls]);
  };
  // Well-definedness: projection followed by m equals cand on every element.
  for (const auto& [p, car] : f.dst->carriers)
    for (int i = 0; i < static_cast<int>(car.size()); ++i) {
      ElemRef c = q.projection.apply(ElemRef{p, i});
      if (m.apply(c) != cand.apply(ElemRef{p, i})) return std::nullopt;
    }
  return m;
}

}  // namespace opx
