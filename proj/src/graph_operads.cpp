#include "opx/graph_operads.hpp"

#include <algorithm>
#include <sstream>

namespace opx {

namespace {

std::vector<std::string> splitOn(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

int mgValence(const Color& c) { return std::stoi(splitOn(c, ',')[0]); }
int mgGenus(const Color& c) { return std::stoi(splitOn(c, ',')[1]); }

bool isPositiveKind(GraphOperadKind k) {
  return k == GraphOperadKind::Oplus || k == GraphOperadKind::OplusTrunc;
}

std::vector<Color> colorsFor(const GraphOperadSpec& spec, const GraphWindowParams& prm) {
  std::vector<Color> out;
  auto range = [&](int lo, int hi) {
    for (int k = lo; k <= hi; ++k) out.push_back(std::to_string(k));
  };
  switch (spec.kind) {
    case GraphOperadKind::M:
    case GraphOperadKind::C:
      range(0, prm.maxValence);
      break;
    case GraphOperadKind::Mg:
      for (int k = 0; k <= prm.maxValence; ++k)
        for (int g = 0; g <= prm.maxGenus; ++g)
          out.push_back(std::to_string(k) + "," + std::to_string(g));
      break;
    case GraphOperadKind::CGK:
    case GraphOperadKind::O:
    case GraphOperadKind::Ons:
    case GraphOperadKind::Oplus:
      range(1, prm.maxValence);
      break;
    case GraphOperadKind::OplusTrunc:
      range(1, std::min(prm.maxValence, spec.truncation + 1));
      break;
    case GraphOperadKind::As:
      out.push_back("2");
      break;
    case GraphOperadKind::OColored: {
      std::vector<std::string> words = {""};
      for (int len = 1; len <= prm.maxValence; ++len) {
        std::vector<std::string> next;
        for (const auto& w : words)
          for (const auto& a : spec.alphabet) next.push_back(w.empty() ? a : w + "." + a);
        for (const auto& w : next) out.push_back(w);
        words = std::move(next);
      }
      break;
    }
  }
  return out;
}

std::vector<Color> wordLetters(const Color& c) { return splitOn(c, '.'); }

bool coloringConsistent(const OrderedGraph& g, const Profile& p) {
  std::vector<std::vector<Color>> inW;
  inW.reserve(p.inputs.size());
  for (const auto& c : p.inputs) inW.push_back(wordLetters(c));
  std::vector<Color> outW = wordLetters(p.output);
  auto ends = edgeEnds(g);
  for (int e = 0; e < g.edgeCount; ++e) {
    bool seen = false;
    Color letter;
    for (const auto& end : ends[e]) {
      Color l = end.atBoundary ? outW[end.slot] : inW[end.vertex][end.slot];
      if (seen && l != letter) return false;
      letter = l;
      seen = true;
    }
  }
  return true;
}

// Profile-independent part of the admission predicate, computed once per
// enumerated graph and cached alongside it.
struct ShapedGraph {
  OrderedGraph g;
  bool shapeOk = true;
  int betti = 0;  // genus-decorated kinds compare against the profile
};

ShapedGraph shapeGraph(const GraphOperadSpec& spec, OrderedGraph g) {
  ShapedGraph s{std::move(g)};
  switch (spec.kind) {
    case GraphOperadKind::M:
      break;
    case GraphOperadKind::Mg:
      s.betti = firstBetti(s.g);
      break;
    case GraphOperadKind::C:
    case GraphOperadKind::CGK:
      s.shapeOk = isSimplyConnected(s.g);
      break;
    case GraphOperadKind::O:
    case GraphOperadKind::Oplus:
    case GraphOperadKind::OplusTrunc:
    case GraphOperadKind::As:
    case GraphOperadKind::OColored:
      s.shapeOk = isRootedTree(s.g);
      break;
    case GraphOperadKind::Ons:
      s.shapeOk = isNsCompatible(s.g);
      break;
  }
  return s;
}

}  // namespace

int colorValence(const GraphOperadSpec& spec, const Color& c) {
  switch (spec.kind) {
    case GraphOperadKind::Mg:
      return mgValence(c);
    case GraphOperadKind::OColored:
      return static_cast<int>(wordLetters(c).size());
    default:
      return std::stoi(c);
  }
}

int GraphOperad::indexOf(const Profile& p, const OrderedGraph& g) const {
  auto it = index->find(p);
  if (it == index->end()) throw DomainError("no graph carrier at " + p.str());
  auto jt = it->second.find(g);
  if (jt == it->second.end())
    throw DomainError("graph not in carrier at " + p.str() + ": " + printGraph(g));
  return jt->second;
}

GraphOperad buildGraphOperad(const GraphOperadSpec& spec, const GraphWindowParams& prm) {
  std::vector<Color> colors = colorsFor(spec, prm);
  GraphOperadSpec sp = spec;

  TruncationWindow w;
  w.colorsIn = ColorSet{colors};
  w.colorsOut = ColorSet{colors};
  w.maxArity = prm.maxArity;
  w.maxSlots = prm.maxSlots;
  w.slotWeight = [sp](const Profile& p) {
    int s = colorValence(sp, p.output);
    for (const auto& c : p.inputs) s += colorValence(sp, c);
    return s;
  };

  // All window-admitted profiles, pruned by partial slot weight.
  std::vector<Profile> profiles;
  for (const auto& outc : colors) {
    std::vector<Color> in;
    std::function<void(int)> rec = [&](int weight) {
      Profile p{in, outc};
      if (w.admits(p)) profiles.push_back(p);
      if (static_cast<int>(in.size()) == w.maxArity) return;
      for (const auto& c : colors) {
        int v = colorValence(sp, c);
        if (weight + v > w.maxSlots) continue;
        in.push_back(c);
        rec(weight + v);
        in.pop_back();
      }
    };
    rec(colorValence(sp, outc));
  }

  // Carriers, with the base enumeration cached per (valences, boundary).
  auto graphs = std::make_shared<std::map<Profile, std::vector<OrderedGraph>>>();
  auto index = std::make_shared<std::map<Profile, std::map<OrderedGraph, int>>>();
  std::map<std::pair<std::vector<int>, int>, std::vector<ShapedGraph>> cache;
  for (const auto& p : profiles) {
    auto& car = (*graphs)[p];
    auto& ix = (*index)[p];
    if (isPositiveKind(sp.kind) && p.arity() == 0) continue;  // loudly empty
    std::vector<int> valences;
    valences.reserve(p.inputs.size());
    for (const auto& c : p.inputs) valences.push_back(colorValence(sp, c));
    int boundary = colorValence(sp, p.output);
    auto key = std::make_pair(valences, boundary);
    auto it = cache.find(key);
    if (it == cache.end()) {
      std::vector<ShapedGraph> shaped;
      for (auto& g : enumerateGraphs(valences, boundary))
        shaped.push_back(shapeGraph(sp, std::move(g)));
      it = cache.emplace(key, std::move(shaped)).first;
    }
    for (const auto& s : it->second) {
      if (!s.shapeOk) continue;
      if (sp.kind == GraphOperadKind::Mg) {
        int decorated = mgGenus(p.output);
        for (const auto& c : p.inputs) decorated -= mgGenus(c);
        if (s.betti != decorated) continue;
      }
      if (sp.kind == GraphOperadKind::OColored && !coloringConsistent(s.g, p)) continue;
      ix[s.g] = static_cast<int>(car.size());
      car.push_back(s.g);
    }
  }

  SymmetricCollection coll;
  coll.window = w;
  for (const auto& [p, car] : *graphs) {
    auto& names = coll.carriers[p];
    names.reserve(car.size());
    for (const auto& g : car) names.push_back(printGraph(g));
  }
  coll.action = [graphs, index](const Profile& p, const Perm& rho, int i) {
    const OrderedGraph& g = graphs->at(p)[i];
    OrderedGraph h;
    h.edgeCount = g.edgeCount;
    h.boundary = g.boundary;
    h.germs.resize(g.germs.size());
    for (size_t k = 0; k < g.germs.size(); ++k) h.germs[k] = g.germs[rho[k]];
    return index->at(permuteProfile(p, rho)).at(canonicalize(h));
  };
  auto collP = std::make_shared<SymmetricCollection>(std::move(coll));

  SubFn sub = [graphs, index](const ElemRef& outer, const std::vector<ElemRef>& inners) {
    const OrderedGraph& G = graphs->at(outer.profile)[outer.idx];
    std::vector<OrderedGraph> H;
    H.reserve(inners.size());
    for (const auto& y : inners) H.push_back(graphs->at(y.profile)[y.idx]);
    OrderedGraph r = substitute(G, H);
    if (circleCount(r) > 0)
      return SubResult{false, -1, "substitution closed a circle"};
    Profile rp = Operad::subProfile(outer, inners);
    auto it = index->find(rp);
    if (it == index->end()) return SubResult{false, -1, "no carrier at " + rp.str()};
    auto jt = it->second.find(r);
    if (jt == it->second.end())
      throw DomainError("graph substitution left the carrier at " + rp.str() + ": " +
                        printGraph(r));
    return SubResult{true, jt->second, ""};
  };

  std::map<Color, int> units;
  for (const auto& c : colors) {
    Profile uc{{c}, c};
    if (!w.admits(uc)) continue;
    units[c] = index->at(uc).at(corolla(colorValence(sp, c)));
  }

  std::optional<GradingCertificate> grading;
  if (isPositiveKind(sp.kind)) {
    GradingCertificate cert;
    cert.rule = "p = 2 + sum(k_i - 2) on positive rooted trees";
    GraphOperadSpec sc = sp;
    cert.degree = [sc](const Profile& p) { return colorValence(sc, p.output); };
    cert.admissible = [sc](const Profile& p) {
      if (p.arity() == 0) return false;
      int rhs = 2;
      for (const auto& c : p.inputs) rhs += colorValence(sc, c) - 2;
      return colorValence(sc, p.output) == rhs;
    };
    grading = std::move(cert);
  }

  std::string name;
  switch (sp.kind) {
    case GraphOperadKind::M: name = "M"; break;
    case GraphOperadKind::Mg: name = "Mg"; break;
    case GraphOperadKind::C: name = "C"; break;
    case GraphOperadKind::CGK: name = "CGK"; break;
    case GraphOperadKind::O: name = "O"; break;
    case GraphOperadKind::Ons: name = "Ons"; break;
    case GraphOperadKind::Oplus: name = "Oplus"; break;
    case GraphOperadKind::OplusTrunc:
      name = "Oplus" + std::to_string(sp.truncation);
      break;
    case GraphOperadKind::As: name = "As"; break;
    case GraphOperadKind::OColored: {
      name = "O^{";
      for (size_t i = 0; i < sp.alphabet.size(); ++i)
        name += (i ? "," : "") + sp.alphabet[i];
      name += "}";
      break;
    }
  }

  GraphOperad out;
  out.op = std::make_shared<const Operad>(
      makeOperad(name, ColorSet{colors}, collP, std::move(units), sub, std::move(grading)));
  out.spec = sp;
  out.graphs = graphs;
  out.index = index;
  return out;
}

OperadPtr buildOperad(const GraphOperadSpec& spec, const GraphWindowParams& params) {
  return buildGraphOperad(spec, params).op;
}

OperadMap graphInclusion(std::string name, const GraphOperad& src, const GraphOperad& dst,
                         std::function<Color(const Color&)> colorMap) {
  OperadMap m;
  m.name = std::move(name);
  m.src = src.op;
  m.dst = dst.op;
  m.colorMap = colorMap;
  auto srcG = src.graphs;
  auto dstI = dst.index;
  m.component = [srcG, dstI, colorMap](const Profile& p, int idx) {
    Profile q;
    q.output = colorMap(p.output);
    for (const auto& a : p.inputs) q.inputs.push_back(colorMap(a));
    const OrderedGraph& g = srcG->at(p)[idx];
    auto it = dstI->find(q);
    if (it == dstI->end()) throw TruncationError(q, "inclusion target carrier missing");
    auto jt = it->second.find(g);
    if (jt == it->second.end())
      throw DomainError("inclusion: graph missing in target at " + q.str() + ": " +
                        printGraph(g));
    return jt->second;
  };
  return m;
}

std::vector<OperadMap> builtinMaps(const GraphWindowParams& prm) {
  auto id = [](const Color& c) { return c; };
  GraphOperad M = buildGraphOperad({GraphOperadKind::M}, prm);
  GraphOperad Mg = buildGraphOperad({GraphOperadKind::Mg}, prm);
  GraphOperad C = buildGraphOperad({GraphOperadKind::C}, prm);
  GraphOperad CGK = buildGraphOperad({GraphOperadKind::CGK}, prm);
  GraphOperad O = buildGraphOperad({GraphOperadKind::O}, prm);
  GraphOperad Ons = buildGraphOperad({GraphOperadKind::Ons}, prm);
  GraphOperad Oplus = buildGraphOperad({GraphOperadKind::Oplus}, prm);
  GraphOperad As = buildGraphOperad({GraphOperadKind::As}, prm);
  GraphOperad Ot2 = buildGraphOperad({GraphOperadKind::OplusTrunc, 2}, prm);
  GraphOperad Ot3 = buildGraphOperad({GraphOperadKind::OplusTrunc, 3}, prm);
  GraphOperad OcA = buildGraphOperad({GraphOperadKind::OColored, 0, {"a"}}, prm);
  GraphOperad OcAB = buildGraphOperad({GraphOperadKind::OColored, 0, {"a", "b"}}, prm);

  std::vector<OperadMap> maps;
  maps.push_back(graphInclusion("O->CGK", O, CGK, id));
  maps.push_back(graphInclusion("CGK->C", CGK, C, id));
  maps.push_back(graphInclusion("C->M", C, M, id));
  maps.push_back(graphInclusion("C->Mg", C, Mg, [](const Color& c) { return c + ",0"; }));
  maps.push_back(graphInclusion("Mg->M", Mg, M,
                                [](const Color& c) { return splitOn(c, ',')[0]; }));
  maps.push_back(graphInclusion("Ons->O", Ons, O, id));
  maps.push_back(graphInclusion("As->O", As, O, id));

  // As+ -> Oplus: positivize the source first (Oplus has no nullary content).
  auto [AsPlus, iota] = positivize(As.op);
  OperadMap asPlus = graphInclusion("As+->Oplus", As, Oplus, id);
  asPlus.src = AsPlus;  // same carriers at positive profiles, same indices
  maps.push_back(std::move(asPlus));

  maps.push_back(graphInclusion("Oplus2->Oplus3", Ot2, Ot3, id));
  maps.push_back(graphInclusion("O^{a}->O^{a,b}", OcA, OcAB, id));
  return maps;
}

}  // namespace opx
