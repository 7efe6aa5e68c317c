#ifndef OPX_GRAPH_OPERADS_HPP
#define OPX_GRAPH_OPERADS_HPP

// The graph-built operads: carriers are canonical connected ordered graphs
// with a per-kind structural filter, substitution is graph substitution, and
// units are corollas. Kinds:
//   M      all connected graphs; colors are valences "0".."maxValence"
//   Mg     genus-decorated M; colors "k,g", carrier Betti = g_out - sum g_in
//   C      simply-connected graphs (Betti 0)
//   CGK    simply-connected with nonempty boundary; colors "1".."maxValence"
//   O      rooted trees
//   Ons    rooted trees with planar-compatible boundary order
//   Oplus  positive rooted trees (no nullary content), graded by
//          p = 2 + sum(k_i - 2)
//   OplusTrunc(l)  Oplus with valences <= l+1 (operations of arity <= l)
//   As     rooted linear trees; one color "2"
//   OColored(alphabet)  rooted trees with consistently colored edges; colors
//          are germ-colour words "a.b.c" (slot 0 = root germ / boundary leg 0)

#include "opx/graphs.hpp"
#include "opx/operad.hpp"

namespace opx {

enum class GraphOperadKind { M, Mg, C, CGK, O, Ons, Oplus, OplusTrunc, As, OColored };

struct GraphOperadSpec {
  GraphOperadKind kind;
  int truncation = 0;                 // OplusTrunc only
  std::vector<std::string> alphabet;  // OColored only
};

struct GraphWindowParams {
  int maxValence = 5;
  int maxBoundary = 5;
  int maxArity = 3;   // vertices per carrier element / inner operations
  int maxSlots = 10;  // per-profile budget: sum of input valences + output valence
  int maxGenus = 2;   // Mg color genus bound
};

// Operad plus the graph tables behind it (for element lookup by structure).
struct GraphOperad {
  OperadPtr op;
  GraphOperadSpec spec;
  std::shared_ptr<const std::map<Profile, std::vector<OrderedGraph>>> graphs;
  std::shared_ptr<const std::map<Profile, std::map<OrderedGraph, int>>> index;

  const OrderedGraph& graphOf(const ElemRef& e) const { return graphs->at(e.profile)[e.idx]; }
  int indexOf(const Profile& p, const OrderedGraph& g) const;
};

GraphOperad buildGraphOperad(const GraphOperadSpec& spec, const GraphWindowParams& params = {});
OperadPtr buildOperad(const GraphOperadSpec& spec, const GraphWindowParams& params = {});

// Valence of a color under the kind's encoding (integer string, "k,g" pair,
// or dotted word).
int colorValence(const GraphOperadSpec& spec, const Color& c);

// Inclusion-style map between graph operads: colors translated by colorMap,
// elements carried to the same graph.
OperadMap graphInclusion(std::string name, const GraphOperad& src, const GraphOperad& dst,
                         std::function<Color(const Color&)> colorMap);

// The built-in maps: O->CGK, CGK->C, C->M, C->Mg, Mg->M, Ons->O, As->O,
// As+->Oplus, OplusTrunc(2)->OplusTrunc(3), OColored({a})->OColored({a,b}).
std::vector<OperadMap> builtinMaps(const GraphWindowParams& params = {});

}  // namespace opx

#endif  // OPX_GRAPH_OPERADS_HPP
