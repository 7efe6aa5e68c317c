#include "opx/graphs.hpp"

#include <algorithm>
#include <numeric>

namespace opx {

std::vector<std::vector<EdgeEnd>> edgeEnds(const OrderedGraph& g) {
  std::vector<std::vector<EdgeEnd>> ends(g.edgeCount);
  for (int v = 0; v < g.vertexCount(); ++v)
    for (int i = 0; i < static_cast<int>(g.germs[v].size()); ++i) {
      int e = g.germs[v][i];
      if (e >= 0 && e < g.edgeCount) ends[e].push_back({false, v, i});
    }
  for (int i = 0; i < static_cast<int>(g.boundary.size()); ++i) {
    int e = g.boundary[i];
    if (e >= 0 && e < g.edgeCount) ends[e].push_back({true, -1, i});
  }
  return ends;
}

std::vector<std::string> validateGraph(const OrderedGraph& g) {
  std::vector<std::string> bad;
  for (int v = 0; v < g.vertexCount(); ++v)
    for (int e : g.germs[v])
      if (e < 0 || e >= g.edgeCount)
        bad.push_back("germ of vertex " + std::to_string(v) + " names unknown edge " +
                      std::to_string(e));
  for (int e : g.boundary)
    if (e < 0 || e >= g.edgeCount)
      bad.push_back("boundary leg names unknown edge " + std::to_string(e));
  if (!bad.empty()) return bad;

  auto ends = edgeEnds(g);
  for (int e = 0; e < g.edgeCount; ++e) {
    size_t total = ends[e].size();
    if (total != 0 && total != 2)
      bad.push_back("edge " + std::to_string(e) + " has " + std::to_string(total) +
                    " attachment points (want 0 or 2)");
    int germEnds = 0, boundaryEnds = 0;
    for (const auto& p : ends[e]) (p.atBoundary ? boundaryEnds : germEnds)++;
    if (germEnds > 2) bad.push_back("edge " + std::to_string(e) + " germ fiber too large");
    if (boundaryEnds > 2)
      bad.push_back("edge " + std::to_string(e) + " boundary fiber too large");
  }
  return bad;
}

int circleCount(const OrderedGraph& g) {
  auto ends = edgeEnds(g);
  int c = 0;
  for (const auto& e : ends)
    if (e.empty()) ++c;
  return c;
}

namespace {

// Components of the incidence structure: vertices joined through shared edges.
// Returns (component id per vertex, number of vertex components).
std::pair<std::vector<int>, int> vertexComponents(const OrderedGraph& g) {
  int n = g.vertexCount();
  UnionFind uf(n);
  auto ends = edgeEnds(g);
  for (const auto& e : ends) {
    int firstVertex = -1;
    for (const auto& p : e) {
      if (p.atBoundary) continue;
      if (firstVertex < 0)
        firstVertex = p.vertex;
      else
        uf.unite(firstVertex, p.vertex);
    }
  }
  std::vector<int> comp(n, -1);
  int count = 0;
  std::map<int, int> seen;
  for (int v = 0; v < n; ++v) {
    int r = uf.find(v);
    auto it = seen.find(r);
    if (it == seen.end()) {
      seen[r] = count;
      comp[v] = count++;
    } else {
      comp[v] = it->second;
    }
  }
  return {comp, count};
}

}  // namespace

bool isConnected(const OrderedGraph& g) {
  // Components: vertex components, plus one per circle, plus one per edge with
  // both ends on the boundary (an interval disjoint from every vertex).
  auto [comp, nComp] = vertexComponents(g);
  int extra = 0;
  auto ends = edgeEnds(g);
  for (const auto& e : ends) {
    if (e.empty()) ++extra;  // circle
    if (e.size() == 2 && e[0].atBoundary && e[1].atBoundary) ++extra;  // interval
  }
  int total = nComp + extra;
  return total == 1;
}

int firstBetti(const OrderedGraph& g) {
  auto ends = edgeEnds(g);
  int internal = 0, circles = 0;
  for (const auto& e : ends) {
    if (e.empty()) ++circles;
    if (e.size() == 2 && !e[0].atBoundary && !e[1].atBoundary) ++internal;
  }
  auto [comp, nComp] = vertexComponents(g);
  return internal - g.vertexCount() + nComp + circles;
}

OrderedGraph canonicalize(const OrderedGraph& g) {
  std::vector<int> relabel(g.edgeCount, -1);
  int next = 0;
  auto visit = [&](int e) {
    if (relabel[e] < 0) relabel[e] = next++;
  };
  for (const auto& germList : g.germs)
    for (int e : germList) visit(e);
  for (int e : g.boundary) visit(e);
  // Circles (never scanned) take the trailing ids.
  for (int e = 0; e < g.edgeCount; ++e)
    if (relabel[e] < 0) relabel[e] = next++;

  OrderedGraph out;
  out.edgeCount = g.edgeCount;
  out.germs.resize(g.germs.size());
  for (size_t v = 0; v < g.germs.size(); ++v) {
    out.germs[v].reserve(g.germs[v].size());
    for (int e : g.germs[v]) out.germs[v].push_back(relabel[e]);
  }
  out.boundary.reserve(g.boundary.size());
  for (int e : g.boundary) out.boundary.push_back(relabel[e]);
  return out;
}

std::string printGraph(const OrderedGraph& g) {
  std::string s = "V " + std::to_string(g.vertexCount());
  for (int v = 0; v < g.vertexCount(); ++v) {
    s += " / germs " + std::to_string(v) + ":";
    for (int e : g.germs[v]) s += " " + std::to_string(e);
  }
  s += " / B:";
  for (int e : g.boundary) s += " " + std::to_string(e);
  int c = circleCount(g);
  if (c > 0) s += " / circles " + std::to_string(c);
  return s;
}

std::string graphKey(const OrderedGraph& g) { return printGraph(canonicalize(g)); }

OrderedGraph substitute(const OrderedGraph& g, const std::vector<OrderedGraph>& h) {
  if (static_cast<int>(h.size()) != g.vertexCount())
    throw DomainError("substitute: need one graph per vertex");
  // Edge pool: g's edges first, then each h[j]'s block.
  std::vector<int> offset(h.size() + 1);
  offset[0] = g.edgeCount;
  for (size_t j = 0; j < h.size(); ++j) offset[j + 1] = offset[j] + h[j].edgeCount;
  UnionFind uf(offset.back());

  for (int j = 0; j < g.vertexCount(); ++j) {
    if (static_cast<int>(h[j].boundary.size()) != static_cast<int>(g.germs[j].size()))
      throw DomainError("substitute: boundary of inner graph " + std::to_string(j) +
                        " does not match the valence of vertex " + std::to_string(j));
    for (size_t t = 0; t < g.germs[j].size(); ++t)
      uf.unite(g.germs[j][t], offset[j] + h[j].boundary[t]);
  }

  // Collect result edges (one per union-find class); ids assigned on first use
  // and canonicalized at the end anyway.
  std::vector<int> classId(offset.back(), -1);
  int next = 0;
  auto edgeOf = [&](int pooled) {
    int r = uf.find(pooled);
    if (classId[r] < 0) classId[r] = next++;
    return classId[r];
  };

  OrderedGraph out;
  for (size_t j = 0; j < h.size(); ++j)
    for (const auto& germList : h[j].germs) {
      std::vector<int> mapped;
      mapped.reserve(germList.size());
      for (int e : germList) mapped.push_back(edgeOf(offset[j] + e));
      out.germs.push_back(std::move(mapped));
    }
  for (int e : g.boundary) out.boundary.push_back(edgeOf(e));
  // Account for wires with no remaining attachment point (circles): classes
  // never touched above. This covers circles of g, circles of the h[j], and
  // circles created by gluing (e.g. an exceptional edge into a loop vertex).
  for (int pooled = 0; pooled < static_cast<int>(classId.size()); ++pooled)
    if (uf.find(pooled) == pooled && classId[pooled] < 0) classId[pooled] = next++;
  out.edgeCount = next;
  return canonicalize(out);
}

OrderedGraph corolla(int k) {
  OrderedGraph g;
  g.edgeCount = k;
  g.germs.push_back({});
  for (int i = 0; i < k; ++i) {
    g.germs[0].push_back(i);
    g.boundary.push_back(i);
  }
  return g;
}

OrderedGraph exceptionalEdge() {
  OrderedGraph g;
  g.edgeCount = 1;
  g.boundary = {0, 0};
  return g;
}

std::vector<OrderedGraph> enumerateGraphs(
    const std::vector<int>& valences, int boundarySize,
    const std::function<bool(const OrderedGraph&)>& predicate) {
  std::vector<OrderedGraph> out;
  int n = static_cast<int>(valences.size());
  int totalSlots = std::accumulate(valences.begin(), valences.end(), 0) + boundarySize;
  if (totalSlots % 2 != 0) return out;

  // Slot layout: germs of v0, v1, ..., then boundary (scan order). A graph is
  // a perfect matching on the slots; assigning edge ids in order of each
  // pair's first slot yields the canonical labelling directly.
  std::vector<int> slotOwner(totalSlots);  // vertex index, or -1 for boundary
  std::vector<int> slotPos(totalSlots);
  {
    int s = 0;
    for (int v = 0; v < n; ++v)
      for (int i = 0; i < valences[v]; ++i) {
        slotOwner[s] = v;
        slotPos[s] = i;
        ++s;
      }
    for (int i = 0; i < boundarySize; ++i) {
      slotOwner[s] = -1;
      slotPos[s] = i;
      ++s;
    }
  }

  std::vector<int> match(totalSlots, -1);
  OrderedGraph proto;
  proto.germs.resize(n);
  for (int v = 0; v < n; ++v) proto.germs[v].assign(valences[v], -1);
  proto.boundary.assign(boundarySize, -1);

  std::function<void(int, int)> rec = [&](int firstFree, int edgesSoFar) {
    while (firstFree < totalSlots && match[firstFree] >= 0) ++firstFree;
    if (firstFree == totalSlots) {
      OrderedGraph g = proto;
      g.edgeCount = edgesSoFar;
      if (!isConnected(g)) return;
      if (predicate && !predicate(g)) return;
      out.push_back(g);
      return;
    }
    for (int other = firstFree + 1; other < totalSlots; ++other) {
      if (match[other] >= 0) continue;
      match[firstFree] = other;
      match[other] = firstFree;
      auto place = [&](int s, int id) {
        if (slotOwner[s] < 0)
          proto.boundary[slotPos[s]] = id;
        else
          proto.germs[slotOwner[s]][slotPos[s]] = id;
      };
      place(firstFree, edgesSoFar);
      place(other, edgesSoFar);
      rec(firstFree + 1, edgesSoFar + 1);
      match[firstFree] = match[other] = -1;
    }
  };
  rec(0, 0);
  return out;
}

bool isSimplyConnected(const OrderedGraph& g) {
  return isConnected(g) && firstBetti(g) == 0 && circleCount(g) == 0;
}

namespace {

// For a simply connected graph with nonempty boundary: orient every vertex
// towards boundary leg 0. Returns for each vertex the slot of the germ on the
// path to the root, or nullopt if the graph is not a tree of this shape.
std::optional<std::vector<int>> rootwardSlots(const OrderedGraph& g) {
  if (g.boundary.empty()) return std::nullopt;
  auto ends = edgeEnds(g);
  int n = g.vertexCount();
  std::vector<int> rootSlot(n, -1);
  std::vector<bool> visited(n, false);

  // Walk inward from the root edge.
  struct Item {
    int vertex;
    int viaSlot;
  };
  std::vector<Item> stack;
  int rootEdge = g.boundary[0];
  for (const auto& p : ends[rootEdge])
    if (!p.atBoundary) stack.push_back({p.vertex, p.slot});
  while (!stack.empty()) {
    auto [v, slot] = stack.back();
    stack.pop_back();
    if (visited[v]) return std::nullopt;  // cycle
    visited[v] = true;
    rootSlot[v] = slot;
    for (int i = 0; i < static_cast<int>(g.germs[v].size()); ++i) {
      if (i == slot) continue;
      int e = g.germs[v][i];
      for (const auto& p : ends[e])
        if (!p.atBoundary && !(p.vertex == v && p.slot == i)) stack.push_back({p.vertex, p.slot});
    }
  }
  for (int v = 0; v < n; ++v)
    if (!visited[v]) return std::nullopt;
  return rootSlot;
}

}  // namespace

bool isRootedTree(const OrderedGraph& g) {
  if (!isSimplyConnected(g)) return false;
  if (g.vertexCount() == 0) return true;  // exceptional edge
  if (g.boundary.empty()) return false;
  auto slots = rootwardSlots(g);
  if (!slots) return false;
  for (int s : *slots)
    if (s != 0) return false;
  return true;
}

std::vector<int> planarLeafOrder(const OrderedGraph& g) {
  std::vector<int> leaves;
  if (g.vertexCount() == 0) {
    // Exceptional edge: the non-root end of the single edge.
    if (g.boundary.size() == 2) leaves.push_back(g.boundary[1]);
    return leaves;
  }
  auto ends = edgeEnds(g);
  std::function<void(int)> walk = [&](int v) {
    for (int i = 1; i < static_cast<int>(g.germs[v].size()); ++i) {
      int e = g.germs[v][i];
      bool descended = false;
      for (const auto& p : ends[e])
        if (!p.atBoundary && !(p.vertex == v && p.slot == i)) {
          walk(p.vertex);
          descended = true;
        }
      if (!descended) leaves.push_back(e);
    }
  };
  int rootEdge = g.boundary[0];
  for (const auto& p : ends[rootEdge])
    if (!p.atBoundary) walk(p.vertex);
  return leaves;
}

bool isNsCompatible(const OrderedGraph& g) {
  if (!isRootedTree(g)) return false;
  auto leaves = planarLeafOrder(g);
  if (leaves.size() + 1 != g.boundary.size()) return false;
  for (size_t i = 0; i < leaves.size(); ++i)
    if (g.boundary[i + 1] != leaves[i]) return false;
  return true;
}

}  // namespace opx
