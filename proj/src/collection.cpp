#include "opx/collection.hpp"

namespace opx {

std::vector<std::string> SymmetricCollection::checkActionLaws(int maxArityChecked) const {
  std::vector<std::string> bad;
  for (const auto& [p, car] : carriers) {
    int n = p.arity();
    if (car.empty() || n > maxArityChecked) continue;
    auto perms = allPerms(n);
    for (int x = 0; x < static_cast<int>(car.size()); ++x) {
      if (act(p, permIdentity(n), x) != x)
        bad.push_back("id* != id at " + p.str() + " on " + car[x]);
      for (const auto& tau : perms) {
        Profile pt = permuteProfile(p, tau);
        int xt = act(p, tau, x);
        for (const auto& sigma : perms) {
          // sigma* tau* = (tau sigma)* with (tau sigma)(i) = tau(sigma(i)).
          int lhs = act(pt, sigma, xt);
          int rhs = act(p, permCompose(tau, sigma), x);
          if (lhs != rhs) {
            bad.push_back("sigma*tau* != (tau sigma)* at " + p.str() + " on " + car[x] +
                          " sigma=" + permStr(sigma) + " tau=" + permStr(tau));
          }
        }
      }
    }
  }
  return bad;
}

std::vector<std::string> CollectionMap::checkEquivariance(int maxArityChecked) const {
  std::vector<std::string> bad;
  for (const auto& [p, car] : src->carriers) {
    int n = p.arity();
    if (car.empty() || n > maxArityChecked) continue;
    Profile q = mapProfile(p);
    for (const auto& sigma : allPerms(n)) {
      Profile ps = permuteProfile(p, sigma);
      Profile qs = mapProfile(ps);
      if (qs != permuteProfile(q, sigma)) {
        bad.push_back("profile map not compatible with permutation at " + p.str());
        continue;
      }
      for (int x = 0; x < static_cast<int>(car.size()); ++x) {
        int viaSrc = component(ps, src->act(p, sigma, x));
        int viaDst = dst->act(q, sigma, component(p, x));
        if (viaSrc != viaDst)
          bad.push_back("equivariance fails at " + p.str() + " sigma=" + permStr(sigma) +
                        " on " + car[x]);
      }
    }
  }
  return bad;
}

SymmetricCollection makeCollection(
    TruncationWindow window, std::map<Profile, std::vector<std::string>> carriers,
    std::function<int(const Profile&, const Perm&, int)> act) {
  SymmetricCollection c;
  c.window = std::move(window);
  c.carriers = std::move(carriers);
  for (const auto& [p, car] : c.carriers)
    if (!c.window.admits(p)) throw TruncationError(p, "carrier outside declared window");
  if (act) {
    c.action = std::move(act);
  } else {
    for (const auto& [p, car] : c.carriers)
      if (!car.empty() && p.arity() > 1)
        throw DomainError("collection with arity>1 carriers needs an explicit action");
    c.action = [](const Profile&, const Perm&, int x) { return x; };
  }
  return c;
}

SymmetricCollection unitCollection(const ColorSet& colors, int maxArity) {
  TruncationWindow w{colors, colors, maxArity};
  std::map<Profile, std::vector<std::string>> car;
  for (const auto& a : colors.colors) car[Profile{{a}, a}] = {"1_" + a};
  return makeCollection(std::move(w), std::move(car));
}

}  // namespace opx
