#ifndef OPX_FORMATS_HPP
#define OPX_FORMATS_HPP

// Line-oriented text format for documents the CLI operates on, and the
// serializers for reports. Grammar (LL(1), one construct per line, '#' starts
// a comment, blank lines ignored):
//
//   document := { section }
//   section  := "section" kind name NL { line } "end" NL
//   kind     := "colorset" | "collection" | "operad" | "map" | "algebra"
//             | "graph"
//
// Per-kind line grammars are documented in README.md. Sections may reference
// earlier sections by name; operads and maps may be drawn from the built-in
// graph operad corpus with a `builtin` line.

#include "opx/algebra.hpp"
#include "opx/extension.hpp"
#include "opx/graph_operads.hpp"

namespace opx {

// Lexical: malformed tokens. Syntactic: unexpected token (carries the
// expected-token set). Reference: unknown section or element name.
// Semantic: a section that parses but denotes no lawful value.
enum class ParseCategory { Lexical, Syntactic, Reference, Semantic };

class ParseError : public std::runtime_error {
 public:
  ParseCategory category;
  int line, col;
  std::string expected;

  ParseError(ParseCategory cat, int line, int col, const std::string& msg,
             std::string expectedTokens = "");
};

struct Document {
  std::map<std::string, ColorSet> colorsets;
  std::map<std::string, CollPtr> collections;
  std::map<std::string, OperadPtr> operads;
  std::map<std::string, GraphOperad> builtinOperads;  // operad sections built from graphs
  std::map<std::string, OperadMap> maps;
  std::map<std::string, AlgPtr> algebras;
  std::map<std::string, OrderedGraph> graphs;
  // Per map section: expectation key -> value (from `expect` lines).
  std::map<std::string, std::map<std::string, std::string>> expectations;
  // Canonical serialized form of each section, in declaration order.
  std::vector<std::string> sectionTexts;
};

Document parseDocument(const std::string& text, const GraphWindowParams& params = {});
std::string printDocument(const Document& doc);

// Monoid-as-algebra over a built-in As operad: elements act by multiplying
// their inputs in the root-to-leaf chain order of the tree.
AlgPtr monoidAlgebra(const GraphOperad& as, std::vector<std::string> names, int unit,
                     std::vector<std::vector<int>> mult);

// "--window valence=5,boundary=5,arity=3,slots=10,genus=2" (any subset).
GraphWindowParams parseWindowFlag(const std::string& s);

// Report serializers. Machine form is the key=value list; the text form is
// human-oriented. Both end with the verdict.
std::string renderReport(const std::vector<std::pair<std::string, std::string>>& keys,
                         const std::string& verdict, bool machine);

}  // namespace opx

#endif  // OPX_FORMATS_HPP
