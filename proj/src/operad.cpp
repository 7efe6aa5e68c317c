#include "opx/operad.hpp"

#include <algorithm>
#include <sstream>

namespace opx {

// ---- Operad basics -------------------------------------------------------------

ElemRef Operad::unit(const Color& a) const {
  auto it = units.find(a);
  if (it == units.end()) throw DomainError(name + ": no unit at color " + a);
  return ElemRef{Profile{{a}, a}, it->second};
}

Profile Operad::subProfile(const ElemRef& outer, const std::vector<ElemRef>& inners) {
  Profile p;
  p.output = outer.profile.output;
  for (const auto& y : inners)
    p.inputs.insert(p.inputs.end(), y.profile.inputs.begin(), y.profile.inputs.end());
  return p;
}

SubResult Operad::sub(const ElemRef& outer, const std::vector<ElemRef>& inners) const {
  if (static_cast<int>(inners.size()) != outer.profile.arity())
    throw DomainError(name + ": substitution needs one inner operation per input");
  for (size_t j = 0; j < inners.size(); ++j)
    if (inners[j].profile.output != outer.profile.inputs[j])
      throw DomainError(name + ": inner output mismatch at input " + std::to_string(j));
  Profile p = subProfile(outer, inners);
  if (!coll->window.admits(p)) return SubResult{false, -1, "window: " + p.str()};
  return subFn(outer, inners);
}

ElemRef Operad::subOrThrow(const ElemRef& outer, const std::vector<ElemRef>& inners) const {
  SubResult r = sub(outer, inners);
  if (!r.ok)
    throw TruncationError(subProfile(outer, inners),
                          name + ": substitution overflow (" + r.reason + ")");
  return ElemRef{subProfile(outer, inners), r.value};
}

ElemRef Operad::composeAt(const ElemRef& x, int i, const ElemRef& y) const {
  std::vector<ElemRef> inners;
  inners.reserve(x.profile.arity());
  for (int j = 0; j < x.profile.arity(); ++j)
    inners.push_back(j == i ? y : unit(x.profile.inputs[j]));
  return subOrThrow(x, inners);
}

Profile OperadMap::mapProfile(const Profile& p) const {
  Profile q;
  q.output = colorMap(p.output);
  q.inputs.reserve(p.inputs.size());
  for (const auto& a : p.inputs) q.inputs.push_back(colorMap(a));
  return q;
}

ElemRef OperadMap::apply(const ElemRef& e) const {
  return ElemRef{mapProfile(e.profile), component(e.profile, e.idx)};
}

Operad makeOperad(std::string name, ColorSet colors, CollPtr coll, std::map<Color, int> units,
                  SubFn subFn, std::optional<GradingCertificate> grading) {
  Operad P;
  P.name = std::move(name);
  P.colors = std::move(colors);
  P.coll = std::move(coll);
  P.units = std::move(units);
  P.subFn = std::move(subFn);
  P.grading = std::move(grading);
  for (const auto& a : P.colors.colors) {
    Profile ua{{a}, a};
    if (!P.coll->window.admits(ua)) continue;
    auto it = P.units.find(a);
    if (it == P.units.end()) throw DomainError(P.name + ": missing unit at color " + a);
    if (it->second < 0 || it->second >= static_cast<int>(P.coll->sizeAt(ua)))
      throw DomainError(P.name + ": unit index out of range at color " + a);
  }
  if (P.grading) {
    for (const auto& [p, car] : P.coll->carriers)
      if (!car.empty() && !P.grading->admissible(p))
        throw DomainError(P.name + ": grading certificate rejects nonempty carrier at " +
                          p.str());
  }
  return P;
}

OperadMap identityMap(OperadPtr P) {
  OperadMap m;
  m.name = "id_" + P->name;
  m.src = P;
  m.dst = P;
  m.colorMap = [](const Color& a) { return a; };
  m.component = [](const Profile&, int i) { return i; };
  return m;
}

// ---- shared inner-tuple iteration ------------------------------------------------

void forEachInnerTuple(const SymmetricCollection& coll, const TruncationWindow& window,
                       const Profile& outer,
                       const std::function<void(const std::vector<ElemRef>&)>& fn,
                       const std::function<void(const Profile&)>& onOverflow) {
  int m = outer.arity();
  std::map<Color, std::vector<Profile>> byOutput;
  for (const auto& [p, car] : coll.carriers)
    if (!car.empty()) byOutput[p.output].push_back(p);

  std::vector<Profile> chosen(m);
  std::function<void(int, int)> chooseProfiles = [&](int j, int aritySoFar) {
    if (aritySoFar > window.maxArity) return;
    if (j == m) {
      Profile composite;
      composite.output = outer.output;
      for (const auto& q : chosen)
        composite.inputs.insert(composite.inputs.end(), q.inputs.begin(), q.inputs.end());
      if (!window.admits(composite)) {
        if (onOverflow) onOverflow(composite);
        return;
      }
      std::vector<ElemRef> inners(m);
      std::function<void(int)> chooseElems = [&](int jj) {
        if (jj == m) {
          fn(inners);
          return;
        }
        int sz = static_cast<int>(coll.carriers.at(chosen[jj]).size());
        for (int e = 0; e < sz; ++e) {
          inners[jj] = ElemRef{chosen[jj], e};
          chooseElems(jj + 1);
        }
      };
      chooseElems(0);
      return;
    }
    auto it = byOutput.find(outer.inputs[j]);
    if (it == byOutput.end()) return;
    for (const auto& q : it->second) {
      chosen[j] = q;
      chooseProfiles(j + 1, aritySoFar + q.arity());
    }
  };
  chooseProfiles(0, 0);
}

// ---- law checking ---------------------------------------------------------------

namespace {

constexpr size_t kListingCap = 50;

struct Reporter {
  LawReport& r;
  long maxInstances;
  bool step() {
    if (r.instancesChecked >= maxInstances) {
      r.budgetExhausted = true;
      return false;
    }
    ++r.instancesChecked;
    return true;
  }
  void violate(std::string s) {
    ++r.violationCount;
    if (r.violations.size() < kListingCap) r.violations.push_back(std::move(s));
  }
  void overflow(std::string s) {
    ++r.overflowCount;
    if (r.overflowSamples.size() < kListingCap) r.overflowSamples.push_back(std::move(s));
  }
};

std::string subStr(const Operad& P, const ElemRef& x, const std::vector<ElemRef>& inners) {
  std::string s = P.coll->nameOf(x) + "@" + x.profile.str() + "(";
  for (size_t j = 0; j < inners.size(); ++j) {
    if (j) s += ",";
    s += P.coll->nameOf(inners[j]) + "@" + inners[j].profile.str();
  }
  return s + ")";
}

std::vector<int> blockOffsetsOf(const std::vector<ElemRef>& inners) {
  std::vector<int> off(inners.size() + 1, 0);
  for (size_t j = 0; j < inners.size(); ++j) off[j + 1] = off[j] + inners[j].profile.arity();
  return off;
}

// Precomputed single-insertion substitutions: for every stored nonempty host
// profile p, leg i, and stored nonempty inner profile q over that leg whose
// composite stays in the window, val[x*|car_q|+y] is the index of the
// composite of x with y at leg i (units elsewhere), or -1 on overflow.
// Symmetric-group action tables over carriers are cached alongside.
struct SingleSubTables {
  const Operad& P;
  std::vector<Profile> profiles;  // stored nonempty profiles
  std::map<Profile, int> id;
  struct Entry {
    bool admitted = false;  // composite profile inside the window
    int cpid = -1;          // composite profile id, -1 if it has no carrier
    Profile cp;
    std::vector<int32_t> val;
  };
  std::map<std::array<int, 3>, Entry> entries;  // (host id, leg, inner id)
  std::map<std::pair<int, Perm>, std::vector<int>> actTab;
  std::vector<std::string> buildOverflows;

  explicit SingleSubTables(const Operad& op) : P(op) {
    const auto& coll = *P.coll;
    for (const auto& [p, car] : coll.carriers)
      if (!car.empty()) {
        id.emplace(p, static_cast<int>(profiles.size()));
        profiles.push_back(p);
      }
    for (int pid = 0; pid < static_cast<int>(profiles.size()); ++pid) {
      const Profile& p = profiles[pid];
      int nx = static_cast<int>(coll.carriers.at(p).size());
      for (int i = 0; i < p.arity(); ++i) {
        for (int qid = 0; qid < static_cast<int>(profiles.size()); ++qid) {
          const Profile& q = profiles[qid];
          if (q.output != p.inputs[i]) continue;
          Entry e;
          e.cp.output = p.output;
          e.cp.inputs.reserve(p.arity() + q.arity() - 1);
          e.cp.inputs.insert(e.cp.inputs.end(), p.inputs.begin(), p.inputs.begin() + i);
          e.cp.inputs.insert(e.cp.inputs.end(), q.inputs.begin(), q.inputs.end());
          e.cp.inputs.insert(e.cp.inputs.end(), p.inputs.begin() + i + 1, p.inputs.end());
          e.admitted = coll.window.admits(e.cp);
          if (e.admitted) {
            auto cit = id.find(e.cp);
            e.cpid = cit == id.end() ? -1 : cit->second;
            int ny = static_cast<int>(coll.carriers.at(q).size());
            e.val.assign(static_cast<size_t>(nx) * ny, -1);
            std::vector<ElemRef> inners(p.arity());
            for (int tl = 0; tl < p.arity(); ++tl) inners[tl] = P.unit(p.inputs[tl]);
            for (int x = 0; x < nx; ++x) {
              ElemRef xe{p, x};
              for (int y = 0; y < ny; ++y) {
                inners[i] = ElemRef{q, y};
                SubResult r = P.sub(xe, inners);
                if (r.ok)
                  e.val[static_cast<size_t>(x) * ny + y] = r.value;
                else if (buildOverflows.size() < kListingCap)
                  buildOverflows.push_back("substitution " + subStr(P, xe, inners) + ": " +
                                           r.reason);
              }
            }
          } else if (buildOverflows.size() < kListingCap) {
            buildOverflows.push_back("insertion of " + q.str() + " into leg " +
                                     std::to_string(i) + " of " + p.str() +
                                     " leaves the window");
          }
          entries.emplace(std::array<int, 3>{pid, i, qid}, std::move(e));
        }
      }
    }
  }

  const Entry* entry(int pid, int i, int qid) const {
    auto it = entries.find({pid, i, qid});
    return it == entries.end() ? nullptr : &it->second;
  }
  const Entry* entry(int pid, int i, const Profile& q) const {
    auto it = id.find(q);
    return it == id.end() ? nullptr : entry(pid, i, it->second);
  }
  int carSize(int pid) const {
    return static_cast<int>(P.coll->carriers.at(profiles[pid]).size());
  }
  const std::vector<int>& actTable(int pid, const Perm& s) {
    auto key = std::make_pair(pid, s);
    auto it = actTab.find(key);
    if (it != actTab.end()) return it->second;
    const Profile& p = profiles[pid];
    int n = carSize(pid);
    std::vector<int> v(n);
    for (int x = 0; x < n; ++x) v[x] = P.coll->act(ElemRef{p, x}, s).idx;
    return actTab.emplace(std::move(key), std::move(v)).first->second;
  }
};

}  // namespace

LawReport checkOperadLaws(const Operad& P, long maxInstances) {
  LawReport report;
  Reporter rep{report, maxInstances};
  const auto& coll = *P.coll;
  const auto& window = coll.window;

  // Units present.
  for (const auto& a : P.colors.colors) {
    Profile ua{{a}, a};
    if (!window.admits(ua)) continue;
    if (!P.units.count(a)) rep.violate("missing unit at color " + a);
  }

  // Unit laws.
  for (const auto& [p, car] : coll.carriers) {
    for (int x = 0; x < static_cast<int>(car.size()); ++x) {
      if (!rep.step()) return report;
      ElemRef e{p, x};
      SubResult l = P.sub(P.unit(p.output), {e});
      if (!l.ok)
        rep.overflow("left unit at " + subStr(P, e, {}) + ": " + l.reason);
      else if (l.value != x)
        rep.violate("left unit fails at " + coll.nameOf(e) + "@" + p.str());
      std::vector<ElemRef> us;
      for (const auto& a : p.inputs) us.push_back(P.unit(a));
      SubResult r = P.sub(e, us);
      if (!r.ok)
        rep.overflow("right unit at " + subStr(P, e, {}) + ": " + r.reason);
      else if (r.value != x)
        rep.violate("right unit fails at " + coll.nameOf(e) + "@" + p.str());
    }
  }

  // Everything below runs on the generating family of substitution instances:
  // single insertions (one non-unit inner) and pairs of single insertions.
  // Together with the unit laws, the action laws of the underlying collection,
  // and the equivariance instances, these generate every nested-substitution
  // identity whose intermediate composites stay inside the window; the full
  // multi-layer family is combinatorially out of reach for the graph-built
  // operads (billions of instances already at three vertices). All single
  // insertions are precomputed once into lookup tables so that each axiom
  // instance costs a handful of integer reads.
  SingleSubTables tab(P);
  for (const auto& s : tab.buildOverflows) rep.overflow(s);

  // Inner equivariance: swap two adjacent legs inside the single non-unit
  // inner y; the composite must pick up the matching leg transposition.
  for (const auto& [key, e] : tab.entries) {
    if (!e.admitted || e.cpid < 0) continue;
    const Profile& p = tab.profiles[key[0]];
    const Profile& q = tab.profiles[key[2]];
    int i = key[1];
    int nq = q.arity();
    int nc = e.cp.arity();
    int nx = static_cast<int>(coll.carriers.at(p).size());
    int ny = static_cast<int>(coll.carriers.at(q).size());
    for (int t = 0; t + 1 < nq; ++t) {
      Perm tau = transposition(nq, t, t + 1);
      const SingleSubTables::Entry* e2 = tab.entry(key[0], i, permuteProfile(q, tau));
      if (!e2 || !e2->admitted) {
        rep.overflow("inner equivariance: permuted carrier missing at " + q.str());
        continue;
      }
      const std::vector<int>& actY = tab.actTable(key[2], tau);
      // Legs 0..i-1 of the composite come from unit blocks of width one, so
      // the swapped pair sits at positions i+t, i+t+1.
      Perm pi = permIdentity(nc);
      std::swap(pi[i + t], pi[i + t + 1]);
      const std::vector<int>& actC = tab.actTable(e.cpid, pi);
      for (int x = 0; x < nx; ++x) {
        for (int y = 0; y < ny; ++y) {
          if (!rep.step()) return report;
          int base = e.val[x * ny + y];
          int lhs = e2->val[x * ny + actY[y]];
          if (base < 0 || lhs < 0) {
            rep.overflow("inner equivariance at " + coll.nameOf(ElemRef{p, x}) + "@" +
                         p.str() + ": element outside window");
            continue;
          }
          if (lhs != actC[base])
            rep.violate("inner equivariance fails at " + coll.nameOf(ElemRef{p, x}) + "@" +
                        p.str() + " slot " + std::to_string(i) + " inner " +
                        coll.nameOf(ElemRef{q, y}) + " swap " + std::to_string(t));
        }
      }
    }
  }

  // Outer equivariance in partial-composition form: for an adjacent leg swap
  // rho of x and a single non-unit inner y at leg k,
  //   (x . rho) o_k y = (x o_{rho(k)} y) . pi
  // with pi the induced block permutation. Together with the two
  // associativity families below this generates equivariance for arbitrary
  // inner tuples.
  for (int pid = 0; pid < static_cast<int>(tab.profiles.size()); ++pid) {
    const Profile& p = tab.profiles[pid];
    int m = p.arity();
    for (int j = 0; j + 1 < m; ++j) {
      Perm rho = transposition(m, j, j + 1);
      Profile pr = permuteProfile(p, rho);
      auto prIt = tab.id.find(pr);
      if (prIt == tab.id.end()) {
        rep.overflow("outer equivariance: permuted carrier missing at " + p.str());
        continue;
      }
      const std::vector<int>& actX = tab.actTable(pid, rho);
      for (int k = 0; k < m; ++k) {
        int k0 = rho[k];  // leg of p receiving the insertion on the base side
        for (int qid = 0; qid < static_cast<int>(tab.profiles.size()); ++qid) {
          const Profile& q = tab.profiles[qid];
          if (q.output != pr.inputs[k]) continue;
          int aq = q.arity();
          const SingleSubTables::Entry* eperm = tab.entry(prIt->second, k, qid);
          const SingleSubTables::Entry* ebase = tab.entry(pid, k0, qid);
          bool okP = eperm && eperm->admitted;
          bool okB = ebase && ebase->admitted && ebase->cpid >= 0;
          if (!okP || !okB) {
            if (okP != okB)
              rep.violate("outer equivariance overflow asymmetry at " + p.str() + " leg " +
                          std::to_string(k));
            continue;
          }
          // pi[offR[t]+s] = off[rho[t]]+s for the block offsets of the two
          // sides (widths one except for the inserted block).
          int nc = ebase->cp.arity();
          std::vector<int> off(m + 1, 0), offR(m + 1, 0);
          for (int t = 0; t < m; ++t) {
            off[t + 1] = off[t] + (t == k0 ? aq : 1);
            offR[t + 1] = offR[t] + (t == k ? aq : 1);
          }
          Perm pi(nc);
          for (int t = 0; t < m; ++t) {
            int w = (t == k ? aq : 1);
            for (int s = 0; s < w; ++s) pi[offR[t] + s] = off[rho[t]] + s;
          }
          const std::vector<int>& actC = tab.actTable(ebase->cpid, pi);
          int nx = static_cast<int>(coll.carriers.at(p).size());
          int ny = static_cast<int>(coll.carriers.at(q).size());
          for (int x = 0; x < nx; ++x) {
            int xr = actX[x];
            for (int y = 0; y < ny; ++y) {
              if (!rep.step()) return report;
              int lhs = eperm->val[xr * ny + y];
              int base = ebase->val[x * ny + y];
              if (lhs < 0 || base < 0) {
                rep.overflow("outer equivariance at " + coll.nameOf(ElemRef{p, x}) + "@" +
                             p.str() + ": element outside window");
                continue;
              }
              if (lhs != actC[base])
                rep.violate("outer equivariance fails at " + coll.nameOf(ElemRef{p, x}) +
                            "@" + p.str() + " leg " + std::to_string(k) + " swap " +
                            std::to_string(j));
            }
          }
        }
      }
    }
  }

  // Nested associativity: insert y into leg i of x, then z into leg u of y;
  // composing y with z first must give the same element.
  for (const auto& [key, e] : tab.entries) {
    if (!e.admitted || e.cpid < 0) continue;
    const Profile& p = tab.profiles[key[0]];
    const Profile& q = tab.profiles[key[2]];
    int i = key[1];
    int nq = q.arity();
    int nx = static_cast<int>(coll.carriers.at(p).size());
    int ny = static_cast<int>(coll.carriers.at(q).size());
    for (int u = 0; u < nq; ++u) {
      for (int rid = 0; rid < static_cast<int>(tab.profiles.size()); ++rid) {
        if (tab.profiles[rid].output != q.inputs[u]) continue;
        const SingleSubTables::Entry* eyz = tab.entry(key[2], u, rid);
        // Leg u of y sits at position i+u of the composite (unit legs before
        // slot i have width one).
        const SingleSubTables::Entry* e2 = tab.entry(e.cpid, i + u, rid);
        if (!e2 || !e2->admitted) continue;  // final composite outside window
        const SingleSubTables::Entry* e3 =
            (eyz && eyz->admitted && eyz->cpid >= 0) ? tab.entry(key[0], i, eyz->cpid)
                                                     : nullptr;
        if (!e3 || !e3->admitted) {
          rep.overflow("associativity at " + p.str() + ": intermediate composite " +
                       q.str() + " leg " + std::to_string(u) + " outside window");
          continue;
        }
        int nz = static_cast<int>(coll.carriers.at(tab.profiles[rid]).size());
        for (int x = 0; x < nx; ++x) {
          for (int y = 0; y < ny; ++y) {
            int b = e.val[x * ny + y];
            for (int z = 0; z < nz; ++z) {
              if (!rep.step()) return report;
              int lhs = b < 0 ? -1 : e2->val[b * nz + z];
              int yz = eyz->val[y * nz + z];
              int rhs = yz < 0 ? -1 : e3->val[x * tab.carSize(eyz->cpid) + yz];
              if (lhs < 0 || rhs < 0) {
                rep.overflow("associativity at " + coll.nameOf(ElemRef{p, x}) + "@" +
                             p.str() + ": element outside window");
                continue;
              }
              if (lhs != rhs)
                rep.violate("associativity fails at " + coll.nameOf(ElemRef{p, x}) + "@" +
                            p.str() + " slot " + std::to_string(i) + " inner " +
                            coll.nameOf(ElemRef{q, y}) + " then leg " + std::to_string(u));
            }
          }
        }
      }
    }
  }

  // Parallel associativity: insertions into two distinct legs i < t of x
  // commute.
  for (int pid = 0; pid < static_cast<int>(tab.profiles.size()); ++pid) {
    const Profile& p = tab.profiles[pid];
    int m = p.arity();
    int nx = static_cast<int>(coll.carriers.at(p).size());
    for (int i = 0; i < m; ++i) {
      for (int t = i + 1; t < m; ++t) {
        for (int q1id = 0; q1id < static_cast<int>(tab.profiles.size()); ++q1id) {
          const Profile& q1 = tab.profiles[q1id];
          if (q1.output != p.inputs[i]) continue;
          int a1 = q1.arity();
          const SingleSubTables::Entry* e1 = tab.entry(pid, i, q1id);
          if (!e1 || !e1->admitted || e1->cpid < 0) continue;
          for (int q2id = 0; q2id < static_cast<int>(tab.profiles.size()); ++q2id) {
            const Profile& q2 = tab.profiles[q2id];
            if (q2.output != p.inputs[t]) continue;
            // Route A: q1 at i, then q2 at leg t+a1-1 of the result.
            const SingleSubTables::Entry* e2 = tab.entry(e1->cpid, t + a1 - 1, q2id);
            // Route B: q2 at t, then q1 at leg i (unchanged, since t > i).
            const SingleSubTables::Entry* f1 = tab.entry(pid, t, q2id);
            const SingleSubTables::Entry* f2 =
                (f1 && f1->admitted && f1->cpid >= 0) ? tab.entry(f1->cpid, i, q1id)
                                                      : nullptr;
            bool okA = e2 && e2->admitted;
            bool okB = f2 && f2->admitted;
            if (!okA || !okB) {
              if (okA != okB)
                rep.overflow("parallel associativity at " + p.str() + " legs " +
                             std::to_string(i) + "," + std::to_string(t) +
                             ": intermediate composite outside window");
              continue;
            }
            int ny1 = static_cast<int>(coll.carriers.at(q1).size());
            int ny2 = static_cast<int>(coll.carriers.at(q2).size());
            for (int x = 0; x < nx; ++x) {
              for (int y1 = 0; y1 < ny1; ++y1) {
                int b1 = e1->val[x * ny1 + y1];
                for (int y2 = 0; y2 < ny2; ++y2) {
                  if (!rep.step()) return report;
                  int lhs = b1 < 0 ? -1 : e2->val[b1 * ny2 + y2];
                  int c1 = f1->val[x * ny2 + y2];
                  int rhs = c1 < 0 ? -1 : f2->val[c1 * ny1 + y1];
                  if (lhs < 0 || rhs < 0) {
                    rep.overflow("parallel associativity at " + coll.nameOf(ElemRef{p, x}) +
                                 "@" + p.str() + ": element outside window");
                    continue;
                  }
                  if (lhs != rhs)
                    rep.violate("parallel associativity fails at " +
                                coll.nameOf(ElemRef{p, x}) + "@" + p.str() + " legs " +
                                std::to_string(i) + "," + std::to_string(t));
                }
              }
            }
          }
        }
      }
    }
  }
  return report;
}

LawReport checkMapLaws(const OperadMap& phi, long maxInstances) {
  LawReport report;
  Reporter rep{report, maxInstances};
  const Operad& P = *phi.src;
  const Operad& Q = *phi.dst;

  // Units.
  for (const auto& a : P.colors.colors) {
    Profile ua{{a}, a};
    if (!P.coll->window.admits(ua)) continue;
    if (!rep.step()) return report;
    ElemRef u = P.unit(a);
    ElemRef fu = phi.apply(u);
    if (fu != Q.unit(phi.colorMap(a)))
      rep.violate("unit not preserved at color " + a);
  }

  // Equivariance of components.
  for (const auto& [p, car] : P.coll->carriers) {
    int m = p.arity();
    for (int x = 0; x < static_cast<int>(car.size()); ++x) {
      for (int j = 0; j + 1 < m; ++j) {
        if (!rep.step()) return report;
        Perm rho = transposition(m, j, j + 1);
        ElemRef lhs = phi.apply(P.coll->act(ElemRef{p, x}, rho));
        ElemRef fx = phi.apply(ElemRef{p, x});
        ElemRef rhs = Q.coll->act(fx, rho);
        if (lhs != rhs)
          rep.violate("equivariance fails at " + P.coll->nameOf(ElemRef{p, x}) + "@" +
                      p.str() + " swap " + std::to_string(j));
      }
    }
  }

  // Substitution squares over the generating family of single insertions
  // (units preserved by the map make these generate every substitution
  // square whose intermediates stay in the window, given both operads' laws).
  for (const auto& [p, car] : P.coll->carriers) {
    if (car.empty()) continue;
    int m = p.arity();
    for (int i = 0; i < m; ++i) {
      for (const auto& [q, qcar] : P.coll->carriers) {
        if (q.output != p.inputs[i] || qcar.empty()) continue;
        std::vector<ElemRef> inners(m);
        for (int t = 0; t < m; ++t) inners[t] = P.unit(p.inputs[t]);
        inners[i] = ElemRef{q, 0};
        if (!P.coll->window.admits(Operad::subProfile(ElemRef{p, 0}, inners))) {
          rep.overflow("insertion of " + q.str() + " into leg " + std::to_string(i) +
                       " of " + p.str() + " leaves the window");
          continue;
        }
        // Map all elements of both profiles once.
        std::vector<ElemRef> fx(car.size()), fy(qcar.size());
        for (int x = 0; x < static_cast<int>(car.size()); ++x)
          fx[x] = phi.apply(ElemRef{p, x});
        for (int y = 0; y < static_cast<int>(qcar.size()); ++y)
          fy[y] = phi.apply(ElemRef{q, y});
        std::vector<ElemRef> fis(m);
        for (int t = 0; t < m; ++t) fis[t] = Q.unit(phi.colorMap(p.inputs[t]));
        for (int x = 0; x < static_cast<int>(car.size()); ++x) {
          ElemRef xe{p, x};
          for (int y = 0; y < static_cast<int>(qcar.size()); ++y) {
            if (!rep.step()) return report;
            inners[i] = ElemRef{q, y};
            SubResult s = P.sub(xe, inners);
            fis[i] = fy[y];
            SubResult t = Q.sub(fx[x], fis);
            if (!s.ok || !t.ok) {
              if (s.ok != t.ok)
                rep.violate("substitution overflow asymmetry at " + subStr(P, xe, inners));
              else
                rep.overflow("substitution square at " + subStr(P, xe, inners) + ": " +
                             s.reason);
              continue;
            }
            ElemRef lhs = phi.apply(ElemRef{Operad::subProfile(xe, inners), s.value});
            if (lhs.idx != t.value)
              rep.violate("substitution square fails at " + subStr(P, xe, inners));
          }
        }
      }
    }
    if (report.budgetExhausted) return report;
  }
  return report;
}

// ---- underlying category / positivization ----------------------------------------

Operad underlyingCategory(const Operad& P) {
  SymmetricCollection c;
  c.window = P.coll->window;
  c.window.maxArity = std::min(c.window.maxArity, 1);
  for (const auto& [p, car] : P.coll->carriers)
    if (p.arity() == 1) c.carriers[p] = car;
  CollPtr base = P.coll;
  c.action = [base](const Profile& p, const Perm& rho, int i) { return base->act(p, rho, i); };

  Operad U;
  U.name = P.name + "-cat";
  U.colors = P.colors;
  U.coll = std::make_shared<SymmetricCollection>(std::move(c));
  U.units = P.units;
  U.subFn = P.subFn;
  U.grading = P.grading;
  return U;
}

std::pair<OperadPtr, OperadMap> positivize(OperadPtr P) {
  SymmetricCollection c;
  c.window = P->coll->window;
  for (const auto& [p, car] : P->coll->carriers) {
    if (p.arity() == 0)
      c.carriers[p] = {};  // present but empty: the positivization is loud
    else
      c.carriers[p] = car;
  }
  CollPtr base = P->coll;
  c.action = [base](const Profile& p, const Perm& rho, int i) { return base->act(p, rho, i); };

  Operad plus;
  plus.name = P->name + "+";
  plus.colors = P->colors;
  plus.coll = std::make_shared<SymmetricCollection>(std::move(c));
  plus.units = P->units;
  plus.subFn = P->subFn;
  plus.grading = P->grading;
  auto plusP = std::make_shared<const Operad>(std::move(plus));

  OperadMap iota;
  iota.name = "iota_" + P->name;
  iota.src = plusP;
  iota.dst = P;
  iota.colorMap = [](const Color& a) { return a; };
  iota.component = [](const Profile&, int i) { return i; };
  return {plusP, iota};
}

// ---- adjoint presentations --------------------------------------------------------

namespace {

// Windows for mixed-color products, delegating budgets to Q's window with the
// color function applied to whichever side needs translating.
TruncationWindow mixedWindow(const ColorSet& in, const ColorSet& out, const TruncationWindow& wq,
                             std::function<Profile(const Profile&)> translate, int maxArity) {
  TruncationWindow w;
  w.colorsIn = in;
  w.colorsOut = out;
  w.maxArity = maxArity;
  w.maxSlots = wq.maxSlots;
  if (wq.slotWeight)
    w.slotWeight = [wq, translate](const Profile& p) { return wq.slotWeight(translate(p)); };
  return w;
}

}  // namespace

AdjointPresentations adjointPresentations(const OperadMap& phi) {
  const Operad& P = *phi.src;
  const Operad& Q = *phi.dst;
  auto f = phi.colorMap;
  AdjointPresentations ap;
  ap.fc = functionCollections(P.colors, Q.colors, f);

  auto translateIn = [f](const Profile& p) {
    Profile q;
    q.output = p.output;
    for (const auto& a : p.inputs) q.inputs.push_back(f(a));
    return q;
  };
  auto translateOut = [f](const Profile& p) { return Profile{p.inputs, f(p.output)}; };
  auto translateBoth = [f](const Profile& p) {
    Profile q;
    q.output = f(p.output);
    for (const auto& a : p.inputs) q.inputs.push_back(f(a));
    return q;
  };

  int mA = std::min(P.window().maxArity, Q.window().maxArity);
  TruncationWindow wAB = mixedWindow(P.colors, Q.colors, Q.window(), translateIn,
                                     Q.window().maxArity);
  TruncationWindow wAA = mixedWindow(P.colors, P.colors, Q.window(), translateBoth, mA);
  TruncationWindow wBA = mixedWindow(Q.colors, P.colors, Q.window(), translateOut, mA);

  ap.Qf = std::make_shared<CompositeProduct>(composeProduct(Q.coll, ap.fc.fwd, wAB));
  ap.fbarQf =
      std::make_shared<CompositeProduct>(composeProduct(ap.fc.bwd, ap.Qf->result, wAA));
  ap.Pfbar = std::make_shared<CompositeProduct>(composeProduct(P.coll, ap.fc.bwd, wBA));
  ap.fbarQ = std::make_shared<CompositeProduct>(composeProduct(ap.fc.bwd, Q.coll, wBA));

  // chi(x) = [f̄_a, id, [φx, id, (f_{a_1},...,f_{a_n})]].
  ap.chi.src = P.coll;
  ap.chi.dst = ap.fbarQf->result;
  auto Qfp = ap.Qf;
  auto fbarQfp = ap.fbarQf;
  auto phiC = phi.component;
  ap.chi.component = [Qfp, fbarQfp, phiC, f, translateBoth](const Profile& p, int x) {
    int n = p.arity();
    CompositeElement inner;
    inner.outer = ElemRef{translateBoth(p), phiC(p, x)};
    inner.sigma = permIdentity(n);
    for (const auto& a : p.inputs) inner.inners.push_back(ElemRef{Profile{{a}, f(a)}, 0});
    ElemRef innerCls = Qfp->classRef(inner);
    CompositeElement e;
    e.outer = ElemRef{Profile{{f(p.output)}, p.output}, 0};
    e.sigma = permIdentity(n);
    e.inners = {innerCls};
    return fbarQfp->classIndex(e);
  };

  // psi([x, sigma, f̄s]) = [f̄_a, sigma, φx].
  ap.psi.src = ap.Pfbar->result;
  ap.psi.dst = ap.fbarQ->result;
  auto Pfbarp = ap.Pfbar;
  auto fbarQp = ap.fbarQ;
  ap.psi.component = [Pfbarp, fbarQp, phiC, f, translateBoth](const Profile& p, int idx) {
    const CompositeElement& r = Pfbarp->rep(ElemRef{p, idx});
    CompositeElement e;
    e.outer = ElemRef{Profile{{f(p.output)}, p.output}, 0};
    e.sigma = r.sigma;
    e.inners = {ElemRef{translateBoth(r.outer.profile), phiC(r.outer.profile, r.outer.idx)}};
    return fbarQp->classIndex(e);
  };
  return ap;
}

std::vector<std::string> checkAdjointPresentations(const OperadMap& phi,
                                                   const AdjointPresentations& ap) {
  std::vector<std::string> bad;
  const Operad& P = *phi.src;
  const Operad& Q = *phi.dst;
  auto f = phi.colorMap;

  // Unit diagrams.
  for (const auto& a : P.colors.colors) {
    Profile ua{{a}, a};
    if (!P.window().admits(ua)) continue;
    ElemRef uP = P.unit(a);
    // psi([unit_P(a), id, f̄_a]) should be [f̄_a, id, unit_Q(f a)].
    CompositeElement lhsRaw;
    lhsRaw.outer = uP;
    lhsRaw.sigma = permIdentity(1);
    lhsRaw.inners = {ElemRef{Profile{{f(a)}, a}, 0}};
    ElemRef lcls = ap.Pfbar->classRef(lhsRaw);
    int l = ap.psi.component(lcls.profile, lcls.idx);
    CompositeElement rhsRaw;
    rhsRaw.outer = ElemRef{Profile{{f(a)}, a}, 0};
    rhsRaw.sigma = permIdentity(1);
    rhsRaw.inners = {Q.unit(f(a))};
    if (l != ap.fbarQ->classIndex(rhsRaw)) bad.push_back("psi unit diagram fails at color " + a);
    // chi(unit_P(a)) should be [f̄_a, id, [unit_Q(f a), id, f_a]].
    int c = ap.chi.component(ua, uP.idx);
    CompositeElement innerRaw;
    innerRaw.outer = Q.unit(f(a));
    innerRaw.sigma = permIdentity(1);
    innerRaw.inners = {ElemRef{Profile{{a}, f(a)}, 0}};
    CompositeElement outerRaw;
    outerRaw.outer = ElemRef{Profile{{f(a)}, a}, 0};
    outerRaw.sigma = permIdentity(1);
    outerRaw.inners = {ap.Qf->classRef(innerRaw)};
    if (c != ap.fbarQf->classIndex(outerRaw))
      bad.push_back("chi unit diagram fails at color " + a);
  }

  // Multiplication diagrams, chased on identity-sigma instances (equivariance
  // of all maps involved extends them to the full quotient).
  for (const auto& [p, car] : P.coll->carriers) {
    if (car.empty()) continue;
    forEachInnerTuple(*P.coll, P.window(), p, [&](const std::vector<ElemRef>& inners) {
      for (int x = 0; x < static_cast<int>(car.size()); ++x) {
        ElemRef xe{p, x};
        SubResult s = P.sub(xe, inners);
        if (!s.ok) continue;
        Profile cp = Operad::subProfile(xe, inners);
        std::vector<ElemRef> fis(inners.size());
        for (size_t j = 0; j < inners.size(); ++j) fis[j] = phi.apply(inners[j]);
        SubResult t = Q.sub(phi.apply(xe), fis);
        if (!t.ok) continue;
        // psi ∘ (mu_P ◁ f̄) vs (f̄ ◁ mu_Q) path.
        CompositeElement lhsRaw;
        lhsRaw.outer = ElemRef{cp, s.value};
        lhsRaw.sigma = permIdentity(cp.arity());
        for (const auto& b : cp.inputs) lhsRaw.inners.push_back(ElemRef{Profile{{f(b)}, b}, 0});
        if (!ap.Pfbar->result->window.admits(lhsRaw.resultProfile())) continue;
        ElemRef lcls = ap.Pfbar->classRef(lhsRaw);
        int l = ap.psi.component(lcls.profile, lcls.idx);
        CompositeElement rhsRaw;
        rhsRaw.outer = ElemRef{Profile{{f(cp.output)}, cp.output}, 0};
        rhsRaw.sigma = permIdentity(cp.arity());
        rhsRaw.inners = {ElemRef{phi.mapProfile(cp), t.value}};
        if (l != ap.fbarQ->classIndex(rhsRaw))
          bad.push_back("psi multiplication diagram fails at " + subStr(P, xe, inners));
        // chi ∘ mu_P vs mu through f̄◁Q◁f.
        int c = ap.chi.component(cp, s.value);
        CompositeElement innerRaw;
        innerRaw.outer = ElemRef{phi.mapProfile(cp), t.value};
        innerRaw.sigma = permIdentity(cp.arity());
        for (const auto& b : cp.inputs) innerRaw.inners.push_back(ElemRef{Profile{{b}, f(b)}, 0});
        CompositeElement outerRaw;
        outerRaw.outer = ElemRef{Profile{{f(cp.output)}, cp.output}, 0};
        outerRaw.sigma = permIdentity(cp.arity());
        outerRaw.inners = {ap.Qf->classRef(innerRaw)};
        if (c != ap.fbarQf->classIndex(outerRaw))
          bad.push_back("chi multiplication diagram fails at " + subStr(P, xe, inners));
      }
    });
  }

  // Round-trip: phi recovered from chi, componentwise.
  for (const auto& [p, car] : P.coll->carriers) {
    for (int x = 0; x < static_cast<int>(car.size()); ++x) {
      ElemRef cls{p, ap.chi.component(p, x)};
      const CompositeElement& outer = ap.fbarQf->rep(cls);
      const CompositeElement& inner = ap.Qf->rep(outer.inners[0]);
      // outer = (f̄_a, sigma0, [inner]); inner = (q, sigma1, f's).
      // Recovered component = sigma0-then-sigma1 corrected q.
      Perm total = permCompose(outer.sigma, inner.sigma);
      ElemRef q = inner.outer;
      ElemRef recovered = phi.dst->coll->act(q, permInverse(total));
      if (recovered != phi.apply(ElemRef{p, x}))
        bad.push_back("chi round-trip fails at " + P.coll->nameOf(ElemRef{p, x}) + "@" +
                      p.str());
    }
  }
  return bad;
}

// ---- induced modules ---------------------------------------------------------------

InducedModules inducedModules(const OperadMap& phi) {
  const Operad& P = *phi.src;
  const Operad& Q = *phi.dst;
  auto f = phi.colorMap;
  auto fc = functionCollections(P.colors, Q.colors, f);

  auto translateIn = [f](const Profile& p) {
    Profile q;
    q.output = p.output;
    for (const auto& a : p.inputs) q.inputs.push_back(f(a));
    return q;
  };
  auto translateOut = [f](const Profile& p) { return Profile{p.inputs, f(p.output)}; };

  int mA = std::min(P.window().maxArity, Q.window().maxArity);
  TruncationWindow wAB = mixedWindow(P.colors, Q.colors, Q.window(), translateIn,
                                     Q.window().maxArity);
  TruncationWindow wBA = mixedWindow(Q.colors, P.colors, Q.window(), translateOut, mA);

  InducedModules im;
  im.fbarQ = std::make_shared<CompositeProduct>(composeProduct(fc.bwd, Q.coll, wBA));
  im.Qf = std::make_shared<CompositeProduct>(composeProduct(Q.coll, fc.fwd, wAB));
  im.PM = std::make_shared<CompositeProduct>(composeProduct(P.coll, im.fbarQ->result, wBA));
  im.MP = std::make_shared<CompositeProduct>(composeProduct(im.Qf->result, P.coll, wAB));

  // lambda([x, sigma, (m_1..m_n)]) = [f̄_a, sigma', mu_Q(φx, q̄)].
  im.lambda.src = im.PM->result;
  im.lambda.dst = im.fbarQ->result;
  auto PMp = im.PM;
  auto fbarQp = im.fbarQ;
  auto Qp = phi.dst;
  auto phiA = phi;
  im.lambda.component = [PMp, fbarQp, Qp, phiA, f](const Profile& p, int idx) {
    const CompositeElement& r = PMp->rep(ElemRef{p, idx});
    int n = static_cast<int>(r.inners.size());
    std::vector<ElemRef> qs(n);
    std::vector<Perm> sigmaJ(n);
    for (int j = 0; j < n; ++j) {
      const CompositeElement& mj = fbarQp->rep(r.inners[j]);
      qs[j] = mj.inners[0];
      sigmaJ[j] = mj.sigma;
    }
    ElemRef q = Qp->subOrThrow(phiA.apply(r.outer), qs);
    CompositeElement e;
    e.outer = ElemRef{Profile{{f(r.outer.profile.output)}, r.outer.profile.output}, 0};
    e.inners = {q};
    std::vector<int> off(n + 1, 0);
    for (int j = 0; j < n; ++j) off[j + 1] = off[j] + qs[j].profile.arity();
    e.sigma.resize(off[n]);
    for (int j = 0; j < n; ++j)
      for (int t = 0; t < qs[j].profile.arity(); ++t)
        e.sigma[off[j] + t] = r.sigma[off[j] + sigmaJ[j][t]];
    return fbarQp->classIndex(e);
  };

  // rho([[q, tau, f's], sigma, (x_1..x_n)]) = [mu_Q(q, φx∘tau), tau', f's].
  im.rho.src = im.MP->result;
  im.rho.dst = im.Qf->result;
  auto MPp = im.MP;
  auto Qfp = im.Qf;
  im.rho.component = [MPp, Qfp, Qp, phiA, f](const Profile& p, int idx) {
    const CompositeElement& r = MPp->rep(ElemRef{p, idx});
    const CompositeElement& u = Qfp->rep(r.outer);
    int n = static_cast<int>(r.inners.size());
    const Perm& tau = u.sigma;
    std::vector<ElemRef> fq(n);
    for (int k = 0; k < n; ++k) fq[k] = phiA.apply(r.inners[tau[k]]);
    ElemRef q2 = Qp->subOrThrow(u.outer, fq);
    std::vector<int> offI(n + 1, 0);
    for (int i = 0; i < n; ++i) offI[i + 1] = offI[i] + r.inners[i].profile.arity();
    CompositeElement e;
    e.outer = q2;
    for (int k = 0; k < n; ++k) {
      const auto& di = r.inners[tau[k]].profile.inputs;
      for (size_t s = 0; s < di.size(); ++s) {
        e.inners.push_back(ElemRef{Profile{{di[s]}, f(di[s])}, 0});
        e.sigma.push_back(r.sigma[offI[tau[k]] + static_cast<int>(s)]);
      }
    }
    return Qfp->classIndex(e);
  };
  return im;
}

std::vector<std::string> checkModuleLaws(const InducedModules& im, const OperadMap& phi,
                                         long maxInstances) {
  std::vector<std::string> bad;
  const Operad& P = *phi.src;
  long budget = maxInstances;

  auto lambdaOf = [&](const ElemRef& x, const std::vector<ElemRef>& ms) -> std::optional<ElemRef> {
    CompositeElement e;
    e.outer = x;
    e.inners = ms;
    int N = 0;
    for (const auto& m : ms) N += m.profile.arity();
    e.sigma = permIdentity(N);
    Profile rp = e.resultProfile();
    if (!im.PM->result->window.admits(rp)) return std::nullopt;
    ElemRef cls = im.PM->classRef(e);
    return ElemRef{rp, im.lambda.component(rp, cls.idx)};
  };
  auto rhoOf = [&](const ElemRef& u, const std::vector<ElemRef>& xs) -> std::optional<ElemRef> {
    CompositeElement e;
    e.outer = u;
    e.inners = xs;
    int N = 0;
    for (const auto& x : xs) N += x.profile.arity();
    e.sigma = permIdentity(N);
    Profile rp = e.resultProfile();
    if (!im.MP->result->window.admits(rp)) return std::nullopt;
    ElemRef cls = im.MP->classRef(e);
    return ElemRef{rp, im.rho.component(rp, cls.idx)};
  };

  // Unit triangles.
  const auto& M = *im.fbarQ->result;
  for (const auto& [p, car] : M.carriers) {
    for (int i = 0; i < static_cast<int>(car.size()); ++i) {
      if (--budget < 0) return bad;
      auto l = lambdaOf(P.unit(p.output), {ElemRef{p, i}});
      if (l && *l != ElemRef{p, i})
        bad.push_back("left module unit triangle fails at " + M.nameOf(ElemRef{p, i}));
    }
  }
  const auto& R = *im.Qf->result;
  for (const auto& [p, car] : R.carriers) {
    for (int i = 0; i < static_cast<int>(car.size()); ++i) {
      if (--budget < 0) return bad;
      std::vector<ElemRef> us;
      for (const auto& a : p.inputs) us.push_back(P.unit(a));
      auto r = rhoOf(ElemRef{p, i}, us);
      if (r && *r != ElemRef{p, i})
        bad.push_back("right module unit triangle fails at " + R.nameOf(ElemRef{p, i}));
    }
  }

  // Associativity squares (identity-sigma instances; equivariance extends).
  for (const auto& [p, car] : P.coll->carriers) {
    if (car.empty()) continue;
    forEachInnerTuple(*P.coll, P.window(), p, [&](const std::vector<ElemRef>& ys) {
      if (budget < 0) return;
      for (int x = 0; x < static_cast<int>(car.size()); ++x) {
        ElemRef xe{p, x};
        SubResult s = P.sub(xe, ys);
        if (!s.ok) continue;
        Profile cp = Operad::subProfile(xe, ys);
        // Choose one module element per concatenated input.
        std::vector<std::vector<ElemRef>> perInput(cp.arity());
        bool feasible = true;
        for (int k = 0; k < cp.arity() && feasible; ++k) {
          for (const auto& [mp, mcar] : M.carriers)
            if (mp.output == cp.inputs[k])
              for (int i = 0; i < static_cast<int>(mcar.size()); ++i)
                perInput[k].push_back(ElemRef{mp, i});
          if (perInput[k].empty()) feasible = false;
        }
        if (!feasible) continue;
        std::vector<ElemRef> ms(cp.arity());
        std::function<void(int)> go = [&](int k) {
          if (budget < 0) return;
          if (k == cp.arity()) {
            if (--budget < 0) return;
            auto lhs = lambdaOf(ElemRef{cp, s.value}, ms);
            std::vector<ElemRef> inner(ys.size());
            bool ok = true;
            int off = 0;
            for (size_t j = 0; j < ys.size() && ok; ++j) {
              int nj = ys[j].profile.arity();
              std::vector<ElemRef> block(ms.begin() + off, ms.begin() + off + nj);
              off += nj;
              auto lj = lambdaOf(ys[j], block);
              if (!lj)
                ok = false;
              else
                inner[j] = *lj;
            }
            auto rhs = ok ? lambdaOf(xe, inner) : std::nullopt;
            if (lhs && rhs && *lhs != *rhs)
              bad.push_back("left module associativity fails at " + subStr(P, xe, ys));
            return;
          }
          for (const auto& m : perInput[k]) {
            ms[k] = m;
            go(k + 1);
          }
        };
        go(0);
      }
    });
  }

  // Right module associativity: rho(rho(u, x̄), ȳ) = rho(u, mu_P(x̄, ȳ)).
  for (const auto& [up, ucar] : R.carriers) {
    if (ucar.empty() || budget < 0) continue;
    forEachInnerTuple(*P.coll, P.window(), up, [&](const std::vector<ElemRef>& xs) {
      if (budget < 0) return;
      for (int u = 0; u < static_cast<int>(ucar.size()); ++u) {
        auto mid = rhoOf(ElemRef{up, u}, xs);
        if (!mid) continue;
        forEachInnerTuple(*P.coll, P.window(), mid->profile,
                          [&](const std::vector<ElemRef>& zs) {
                            if (--budget < 0) return;
                            auto lhs = rhoOf(*mid, zs);
                            std::vector<ElemRef> comp(xs.size());
                            bool ok = true;
                            int off = 0;
                            for (size_t i = 0; i < xs.size() && ok; ++i) {
                              int ni = xs[i].profile.arity();
                              std::vector<ElemRef> block(zs.begin() + off,
                                                         zs.begin() + off + ni);
                              off += ni;
                              SubResult c = P.sub(xs[i], block);
                              if (!c.ok)
                                ok = false;
                              else
                                comp[i] = ElemRef{Operad::subProfile(xs[i], block), c.value};
                            }
                            auto rhs = ok ? rhoOf(ElemRef{up, u}, comp) : std::nullopt;
                            if (lhs && rhs && *lhs != *rhs)
                              bad.push_back("right module associativity fails at " +
                                            R.nameOf(ElemRef{up, u}));
                          });
      }
    });
  }
  return bad;
}

// ---- builders -----------------------------------------------------------------------

Operad terminalOperad(int maxArity) {
  Color c = "*";
  TruncationWindow w{ColorSet{{c}}, ColorSet{{c}}, maxArity};
  std::map<Profile, std::vector<std::string>> carriers;
  for (int n = 0; n <= maxArity; ++n)
    carriers[Profile{std::vector<Color>(n, c), c}] = {"t" + std::to_string(n)};
  SymmetricCollection coll = makeCollection(w, std::move(carriers));
  coll.action = [](const Profile&, const Perm&, int) { return 0; };
  auto collP = std::make_shared<SymmetricCollection>(std::move(coll));
  SubFn sub = [](const ElemRef&, const std::vector<ElemRef>&) {
    return SubResult{true, 0, ""};
  };
  return makeOperad("terminal", ColorSet{{c}}, collP, {{c, 0}}, sub);
}

namespace {

long long ipow(long long b, long long e) {
  long long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace

Operad endomorphismOperad(const std::map<Color, std::vector<std::string>>& sets, int maxArity) {
  ColorSet colors;
  for (const auto& [c, _] : sets) colors.colors.push_back(c);
  TruncationWindow w{colors, colors, maxArity};

  auto sizeOfColor = [sets](const Color& c) {
    return static_cast<long long>(sets.at(c).size());
  };
  // domainSize(p) = Π |T(a_i)|; carrier size = |T(a)| ^ domainSize.
  auto domainSize = [sizeOfColor](const Profile& p) {
    long long d = 1;
    for (const auto& a : p.inputs) d *= sizeOfColor(a);
    return d;
  };

  std::map<Profile, std::vector<std::string>> carriers;
  std::function<void(std::vector<Color>&, int)> buildProfiles = [&](std::vector<Color>& in,
                                                                    int n) {
    if (n == 0) {
      for (const auto& out : colors.colors) {
        Profile p{in, out};
        long long cod = sizeOfColor(out);
        long long count = ipow(cod, domainSize(p));
        if (count > 200000)
          throw DomainError("endomorphism carrier too large at " + p.str());
        auto& car = carriers[p];
        for (long long i = 0; i < count; ++i) car.push_back("fn" + std::to_string(i));
      }
      return;
    }
    for (const auto& a : colors.colors) {
      in.push_back(a);
      buildProfiles(in, n - 1);
      in.pop_back();
    }
  };
  for (int n = 0; n <= maxArity; ++n) {
    std::vector<Color> in;
    buildProfiles(in, n);
  }

  // Function index I encodes g via base-|T(a)| digits: g(t) = digit t of I.
  auto valueAt = [sizeOfColor](const Profile& p, long long I, long long t) {
    long long c = sizeOfColor(p.output);
    return static_cast<int>((I / ipow(c, t)) % c);
  };
  // Tuple index: row-major, last input fastest.
  auto strides = [sizeOfColor](const std::vector<Color>& in) {
    int n = static_cast<int>(in.size());
    std::vector<long long> st(n, 1);
    for (int i = n - 2; i >= 0; --i) st[i] = st[i + 1] * sizeOfColor(in[i + 1]);
    return st;
  };

  SymmetricCollection coll = makeCollection(w, std::move(carriers));
  coll.action = [sizeOfColor, domainSize, valueAt, strides](const Profile& p, const Perm& rho,
                                                            int idx) {
    Profile q = permuteProfile(p, rho);
    int n = p.arity();
    Perm rhoInv = permInverse(rho);
    auto stP = strides(p.inputs);
    auto stQ = strides(q.inputs);
    long long D = domainSize(q);
    long long c = sizeOfColor(p.output);
    long long out = 0;
    for (long long t = 0; t < D; ++t) {
      // Decode tuple at q, route argument j of g from position rhoInv[j].
      std::vector<long long> xs(n);
      for (int i = 0; i < n; ++i) xs[i] = (t / stQ[i]) % sizeOfColor(q.inputs[i]);
      long long tp = 0;
      for (int j = 0; j < n; ++j) tp += xs[rhoInv[j]] * stP[j];
      out += static_cast<long long>(valueAt(p, idx, tp)) * ipow(c, t);
    }
    return static_cast<int>(out);
  };
  auto collP = std::make_shared<SymmetricCollection>(std::move(coll));

  SubFn sub = [sizeOfColor, domainSize, valueAt, strides](const ElemRef& g,
                                                          const std::vector<ElemRef>& hs) {
    Profile rp = Operad::subProfile(g, hs);
    long long D = domainSize(rp);
    long long c = sizeOfColor(rp.output);
    auto stR = strides(rp.inputs);
    auto stG = strides(g.profile.inputs);
    long long out = 0;
    for (long long t = 0; t < D; ++t) {
      std::vector<long long> xs(rp.arity());
      for (int i = 0; i < rp.arity(); ++i) xs[i] = (t / stR[i]) % sizeOfColor(rp.inputs[i]);
      long long gArg = 0;
      int off = 0;
      for (size_t j = 0; j < hs.size(); ++j) {
        auto stH = strides(hs[j].profile.inputs);
        long long tj = 0;
        for (int s = 0; s < hs[j].profile.arity(); ++s) tj += xs[off + s] * stH[s];
        off += hs[j].profile.arity();
        gArg += static_cast<long long>(valueAt(hs[j].profile, hs[j].idx, tj)) * stG[j];
      }
      out += static_cast<long long>(valueAt(g.profile, g.idx, gArg)) * ipow(c, t);
    }
    return SubResult{true, static_cast<int>(out), ""};
  };

  std::map<Color, int> units;
  for (const auto& [a, T] : sets) {
    long long c = static_cast<long long>(T.size());
    long long I = 0;
    for (long long t = 0; t < c; ++t) I += t * ipow(c, t);
    units[a] = static_cast<int>(I);
  }
  return makeOperad("End", colors, collP, std::move(units), sub);
}

// ---- free operads ----------------------------------------------------------------

namespace {

// Canonical tree term: generator nodes with ordered children, leaves carrying
// the input index they name.
struct FTerm {
  int gen = -1;   // -1: leaf
  int leaf = -1;  // label when leaf
  std::vector<FTerm> kids;

  int leafCount() const {
    if (gen < 0) return 1;
    int n = 0;
    for (const auto& k : kids) n += k.leafCount();
    return n;
  }
  std::string str() const {
    if (gen < 0) return "x" + std::to_string(leaf);
    std::string s = "g" + std::to_string(gen) + "(";
    for (size_t i = 0; i < kids.size(); ++i) {
      if (i) s += ",";
      s += kids[i].str();
    }
    return s + ")";
  }
};

struct FreeData {
  std::vector<int> arities;
  int maxArity;
  // Per arity: elements in deterministic order + lookup by printed term.
  std::map<int, std::vector<FTerm>> elems;
  std::map<int, std::map<std::string, int>> index;
};

void relabel(FTerm& t, const std::function<int(int)>& f) {
  if (t.gen < 0) {
    t.leaf = f(t.leaf);
    return;
  }
  for (auto& k : t.kids) relabel(k, f);
}

void collectLabels(const FTerm& t, std::vector<int>& out) {
  if (t.gen < 0) {
    out.push_back(t.leaf);
    return;
  }
  for (const auto& k : t.kids) collectLabels(k, out);
}

int indexOfTerm(const FreeData& d, const FTerm& t) {
  int n = t.leafCount();
  auto it = d.index.find(n);
  if (it == d.index.end())
    throw TruncationError(Profile{std::vector<Color>(n, "*"), "*"},
                          "free operad: arity outside window");
  auto jt = it->second.find(t.str());
  if (jt == it->second.end())
    throw DomainError("free operad: unknown term " + t.str());
  return jt->second;
}

}  // namespace

FreeOperad freeOperad(const std::vector<int>& generatorArities, int maxArity) {
  auto d = std::make_shared<FreeData>();
  d->arities = generatorArities;
  d->maxArity = maxArity;

  // Shapes with n leaves (labels filled with planar positions 0..n-1 later).
  std::map<int, std::vector<FTerm>> shapes;
  std::function<std::vector<FTerm>(int)> shapesOf = [&](int n) -> std::vector<FTerm> {
    auto it = shapes.find(n);
    if (it != shapes.end()) return it->second;
    std::vector<FTerm> out;
    if (n >= 1) {
      FTerm leaf;
      leaf.leaf = 0;
      out.push_back(leaf);
    }
    for (size_t g = 0; g < generatorArities.size(); ++g) {
      int m = generatorArities[g];
      if (m > n) continue;
      // Compositions of n into m parts >= 1, with subtree shapes.
      std::vector<FTerm> kids;
      std::function<void(int, int)> build = [&](int j, int rem) {
        if (j == m) {
          if (rem != 0) return;
          FTerm t;
          t.gen = static_cast<int>(g);
          t.kids = kids;
          out.push_back(t);
          return;
        }
        int maxPart = rem - (m - 1 - j);
        for (int part = 1; part <= maxPart; ++part)
          for (const auto& s : shapesOf(part)) {
            kids.push_back(s);
            build(j + 1, rem - part);
            kids.pop_back();
          }
      };
      build(0, n);
    }
    shapes[n] = out;
    return out;
  };

  for (int n = 1; n <= maxArity; ++n) {
    auto& es = d->elems[n];
    auto& ix = d->index[n];
    for (const auto& shape : shapesOf(n)) {
      if (shape.gen < 0 && n != 1) continue;
      for (const auto& lab : allPerms(n)) {
        FTerm t = shape;
        int pos = 0;
        std::function<void(FTerm&)> fill = [&](FTerm& u) {
          if (u.gen < 0) {
            u.leaf = lab[pos++];
            return;
          }
          for (auto& k : u.kids) fill(k);
        };
        fill(t);
        std::string key = t.str();
        if (!ix.count(key)) {
          ix[key] = static_cast<int>(es.size());
          es.push_back(t);
        }
      }
    }
  }

  Color c = "*";
  ColorSet colors{{c}};
  TruncationWindow w{colors, colors, maxArity};
  std::map<Profile, std::vector<std::string>> carriers;
  for (const auto& [n, es] : d->elems) {
    auto& car = carriers[Profile{std::vector<Color>(n, c), c}];
    for (const auto& t : es) car.push_back(t.str());
  }
  SymmetricCollection coll = makeCollection(w, std::move(carriers));
  coll.action = [d](const Profile& p, const Perm& rho, int idx) {
    int n = p.arity();
    FTerm t = d->elems.at(n)[idx];
    Perm rhoInv = permInverse(rho);
    relabel(t, [&](int l) { return rhoInv[l]; });
    return indexOfTerm(*d, t);
  };
  auto collP = std::make_shared<SymmetricCollection>(std::move(coll));

  SubFn sub = [d](const ElemRef& x, const std::vector<ElemRef>& ys) {
    int n = x.profile.arity();
    FTerm t = d->elems.at(n)[x.idx];
    std::vector<int> off(n + 1, 0);
    for (int j = 0; j < n; ++j) off[j + 1] = off[j] + ys[j].profile.arity();
    // Replace the leaf labelled i by y_i's term with labels shifted by off[i].
    std::function<FTerm(const FTerm&)> graft = [&](const FTerm& u) -> FTerm {
      if (u.gen < 0) {
        int i = u.leaf;
        FTerm y = d->elems.at(ys[i].profile.arity())[ys[i].idx];
        relabel(y, [&](int l) { return off[i] + l; });
        return y;
      }
      FTerm r = u;
      for (auto& k : r.kids) k = graft(k);
      return r;
    };
    FTerm r = graft(t);
    return SubResult{true, indexOfTerm(*d, r), ""};
  };

  FTerm leaf;
  leaf.leaf = 0;
  Operad F = makeOperad("Free", colors, collP, {{c, d->index.at(1).at(leaf.str())}}, sub);

  FreeOperad out;
  out.op = std::make_shared<const Operad>(std::move(F));
  out.generatorCount = static_cast<int>(generatorArities.size());
  out.generatorElement = [d](int g) {
    int m = d->arities[g];
    FTerm t;
    t.gen = g;
    for (int i = 0; i < m; ++i) {
      FTerm l;
      l.leaf = i;
      t.kids.push_back(l);
    }
    return d->index.at(m).at(t.str());
  };
  out.evaluate = [d](const Operad& target, const Color& tc, const std::vector<int>& genImages,
                     int arity, int idx) {
    const FTerm& t = d->elems.at(arity)[idx];
    // Evaluate the shape in planar order, then correct by the leaf labelling.
    std::function<ElemRef(const FTerm&)> ev = [&](const FTerm& u) -> ElemRef {
      if (u.gen < 0) return target.unit(tc);
      int m = d->arities[u.gen];
      Profile gp{std::vector<Color>(m, tc), tc};
      std::vector<ElemRef> vals;
      vals.reserve(u.kids.size());
      for (const auto& k : u.kids) vals.push_back(ev(k));
      return target.subOrThrow(ElemRef{gp, genImages[u.gen]}, vals);
    };
    ElemRef q = ev(t);
    std::vector<int> labels;
    collectLabels(t, labels);
    return target.coll->act(q, permInverse(labels));
  };
  return out;
}

OperadMap freeOperadMap(const FreeOperad& F, OperadPtr target, const Color& targetColor,
                        const std::vector<int>& genImages) {
  OperadMap m;
  m.name = "free-map";
  m.src = F.op;
  m.dst = target;
  Color tc = targetColor;
  m.colorMap = [tc](const Color&) { return tc; };
  auto eval = F.evaluate;
  OperadPtr tgt = target;
  m.component = [eval, tgt, tc, genImages](const Profile& p, int idx) {
    return eval(*tgt, tc, genImages, p.arity(), idx).idx;
  };
  return m;
}

}  // namespace opx
