#ifndef OPX_GRAPHS_HPP
#define OPX_GRAPHS_HPP

// Graphs with loose ends: finitely many vertices with ordered germ (half-edge)
// lists, an ordered boundary of dangling legs, and edges that either join two
// attachment points or float freely as circles. Everything is stored up to the
// canonical edge labelling, so structural equality of canonical forms is
// isomorphism of ordered graphs.

#include <functional>
#include <string>
#include <vector>

#include "opx/base.hpp"

namespace opx {

struct OrderedGraph {
  // germs[v][i] = edge id attached at vertex v, slot i (orders are the vector
  // orders). boundary[i] = edge id of the i-th boundary leg.
  std::vector<std::vector<int>> germs;
  std::vector<int> boundary;
  // Edge ids run 0..edgeCount-1; an id with no attachment point is a circle.
  int edgeCount = 0;

  int vertexCount() const { return static_cast<int>(germs.size()); }
  auto operator<=>(const OrderedGraph&) const = default;
};

// One attachment point of an edge.
struct EdgeEnd {
  bool atBoundary = false;
  int vertex = -1;  // meaningful when !atBoundary
  int slot = -1;    // germ slot or boundary position
};

// Per edge id, its attachment points in scan order (germs of v0, v1, ..., then
// boundary).
std::vector<std::vector<EdgeEnd>> edgeEnds(const OrderedGraph& g);

// Validation: every edge has zero or two attachment points, ids are in range,
// and each germ/boundary fiber has fewer than three points. Returns violation
// messages (empty = valid).
std::vector<std::string> validateGraph(const OrderedGraph& g);

int circleCount(const OrderedGraph& g);
bool isConnected(const OrderedGraph& g);

// Combinatorial first Betti number:
//   (#edges with both ends at germs) - |V| + (#components among vertices)
//   + (#circle edges).
int firstBetti(const OrderedGraph& g);

// Relabels edges by first occurrence in the scan order (germs of v0, v1, ...,
// then boundary); circles take the trailing ids. Two ordered graphs are
// isomorphic (preserving vertex, germ and boundary orders) iff their canonical
// forms are equal.
OrderedGraph canonicalize(const OrderedGraph& g);
std::string graphKey(const OrderedGraph& g);

// Serialization used by the text format and reports:
//   V n / germs v: e1 e2 ... / B: e1 e2 ...  (single line, slash-separated)
std::string printGraph(const OrderedGraph& g);

// Substitution: replace vertex j of g by h[j], gluing h[j]'s boundary to the
// germs of vertex j in order (|B(h[j])| must equal the valence of vertex j).
// Result vertex order is lexicographic (outer j, then h[j]'s vertex order),
// germ orders come from the h[j], boundary order from g. The result is
// canonical. Throws DomainError on arity mismatch.
OrderedGraph substitute(const OrderedGraph& g, const std::vector<OrderedGraph>& h);

// The k-corolla: one vertex of valence k, k boundary legs, germ i glued to
// boundary leg i. The operadic unit of the graph-built operads.
OrderedGraph corolla(int k);

// The exceptional edge: no vertices, one edge with both ends on the boundary.
OrderedGraph exceptionalEdge();

// Complete duplicate-free enumeration of connected ordered graphs with the
// given vertex valences and boundary size, in canonical form, filtered by the
// predicate. Enumerates perfect matchings on the attachment points; free
// circles never occur. Deterministic order.
std::vector<OrderedGraph> enumerateGraphs(
    const std::vector<int>& valences, int boundarySize,
    const std::function<bool(const OrderedGraph&)>& predicate = nullptr);

// ---- structural predicates used by the operad constructors -----------------

bool isSimplyConnected(const OrderedGraph& g);  // connected tree, no circles

// Rooted tree: simply connected, nonempty boundary whose first leg is the
// root, and each vertex's germ towards the root sits at slot 0. Vertexless
// exceptional edges count as rooted.
bool isRootedTree(const OrderedGraph& g);

// Rooted tree whose boundary order agrees with the planar traversal induced by
// the germ orders (root leg first, then leaves in depth-first order).
bool isNsCompatible(const OrderedGraph& g);

// For a rooted tree: boundary legs other than the root, in planar traversal
// order. Precondition: isRootedTree(g).
std::vector<int> planarLeafOrder(const OrderedGraph& g);

}  // namespace opx

#endif  // OPX_GRAPHS_HPP
