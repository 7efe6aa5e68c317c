#include "opx/formats.hpp"

#include <algorithm>
#include <sstream>

namespace opx {

ParseError::ParseError(ParseCategory cat, int line, int col, const std::string& msg,
                       std::string expectedTokens)
    : std::runtime_error("line " + std::to_string(line) + ", col " + std::to_string(col) +
                         ": " + msg +
                         (expectedTokens.empty() ? "" : " (expected: " + expectedTokens + ")")),
      category(cat),
      line(line),
      col(col),
      expected(std::move(expectedTokens)) {}

namespace {

struct Tok {
  std::string text;
  int col;
};

struct Line {
  int number;
  std::vector<Tok> toks;
};

std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> lines;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    Line line{number, {}};
    size_t i = 0;
    while (i < raw.size()) {
      if (raw[i] == '#') break;
      if (std::isspace(static_cast<unsigned char>(raw[i]))) {
        ++i;
        continue;
      }
      size_t j = i;
      while (j < raw.size() && !std::isspace(static_cast<unsigned char>(raw[j])) &&
             raw[j] != '#')
        ++j;
      line.toks.push_back(Tok{raw.substr(i, j - i), static_cast<int>(i) + 1});
      i = j;
    }
    if (!line.toks.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

[[noreturn]] void fail(ParseCategory cat, const Line& l, int col, const std::string& msg,
                       const std::string& expected = "") {
  throw ParseError(cat, l.number, col, msg, expected);
}

const Tok& need(const Line& l, size_t i, const std::string& what) {
  if (i >= l.toks.size())
    throw ParseError(ParseCategory::Syntactic, l.number,
                     l.toks.empty() ? 1 : l.toks.back().col, "missing token", what);
  return l.toks[i];
}

void needEnd(const Line& l, size_t i) {
  if (i < l.toks.size())
    fail(ParseCategory::Syntactic, l, l.toks[i].col, "unexpected trailing token",
         "end of line");
}

int needInt(const Line& l, size_t i, const std::string& what) {
  const Tok& t = need(l, i, what);
  try {
    size_t pos = 0;
    int v = std::stoi(t.text, &pos);
    if (pos != t.text.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    fail(ParseCategory::Lexical, l, t.col, "malformed integer '" + t.text + "'", what);
  }
}

Profile parseProfile(const Line& l, const Tok& t) {
  const std::string& s = t.text;
  if (s.size() < 3 || s.front() != '(' || s.back() != ')')
    fail(ParseCategory::Lexical, l, t.col, "malformed profile '" + s + "'",
         "(colors;color)");
  size_t semi = s.find(';');
  if (semi == std::string::npos)
    fail(ParseCategory::Lexical, l, t.col, "profile '" + s + "' has no ';'",
         "(colors;color)");
  Profile p;
  p.output = s.substr(semi + 1, s.size() - semi - 2);
  std::string ins = s.substr(1, semi - 1);
  size_t i = 0;
  while (i < ins.size()) {
    size_t j = ins.find(',', i);
    if (j == std::string::npos) j = ins.size();
    p.inputs.push_back(ins.substr(i, j - i));
    i = j + 1;
  }
  if (p.output.empty())
    fail(ParseCategory::Lexical, l, t.col, "profile '" + s + "' has empty output", "");
  for (const auto& c : p.inputs)
    if (c.empty())
      fail(ParseCategory::Lexical, l, t.col, "profile '" + s + "' has an empty input", "");
  return p;
}

std::string joinTokens(const std::vector<std::string>& v, const std::string& sep = " ") {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

// Built-in operad specs by token.
std::optional<GraphOperadSpec> builtinSpec(const std::string& name) {
  if (name == "O") return GraphOperadSpec{GraphOperadKind::O};
  if (name == "Ons") return GraphOperadSpec{GraphOperadKind::Ons};
  if (name == "Oplus") return GraphOperadSpec{GraphOperadKind::Oplus};
  if (name == "As") return GraphOperadSpec{GraphOperadKind::As};
  if (name == "CGK") return GraphOperadSpec{GraphOperadKind::CGK};
  if (name == "C") return GraphOperadSpec{GraphOperadKind::C};
  if (name == "M") return GraphOperadSpec{GraphOperadKind::M};
  if (name == "Mg") return GraphOperadSpec{GraphOperadKind::Mg};
  if (name.rfind("Oplus", 0) == 0 && name.size() > 5) {
    try {
      return GraphOperadSpec{GraphOperadKind::OplusTrunc, std::stoi(name.substr(5)), {}};
    } catch (...) {
      return std::nullopt;
    }
  }
  if (name.rfind("O^{", 0) == 0 && name.back() == '}') {
    GraphOperadSpec s{GraphOperadKind::OColored, 0, {}};
    std::string body = name.substr(3, name.size() - 4);
    size_t i = 0;
    while (i <= body.size()) {
      size_t j = body.find(',', i);
      if (j == std::string::npos) j = body.size();
      if (j > i) s.alphabet.push_back(body.substr(i, j - i));
      i = j + 1;
    }
    if (!s.alphabet.empty()) return s;
  }
  return std::nullopt;
}

// Element name tables for literal operads, used by maps and table algebras.
struct ElemTable {
  std::map<std::string, ElemRef> byName;
  std::map<std::pair<Profile, int>, std::string> byRef;
};

struct ParserState {
  const GraphWindowParams& params;
  Document doc;
  std::map<std::string, ElemTable> operadElems;  // literal operad sections
};

// ---- per-kind section parsers ------------------------------------------------

void parseColorset(ParserState& st, const std::string& name, const std::vector<Line>& body) {
  ColorSet cs;
  for (const Line& l : body) {
    const Tok& head = l.toks[0];
    if (head.text != "colors")
      fail(ParseCategory::Syntactic, l, head.col, "unexpected '" + head.text + "'",
           "colors");
    for (size_t i = 1; i < l.toks.size(); ++i) cs.colors.push_back(l.toks[i].text);
  }
  if (cs.colors.empty())
    throw ParseError(ParseCategory::Semantic, body.empty() ? 0 : body.front().number, 1,
                     "colorset '" + name + "' declares no colors");
  std::string text = "section colorset " + name + "\ncolors " + joinTokens(cs.colors) +
                     "\nend\n";
  st.doc.colorsets[name] = std::move(cs);
  st.doc.sectionTexts.push_back(std::move(text));
}

struct WindowLines {
  int arity = 3, slots = 0;
  std::map<Color, int> weights;

  TruncationWindow window(ColorSet in, ColorSet out) const {
    TruncationWindow w;
    w.colorsIn = std::move(in);
    w.colorsOut = std::move(out);
    w.maxArity = arity;
    w.maxSlots = slots;
    if (slots > 0) {
      auto wt = std::make_shared<std::map<Color, int>>(weights);
      w.slotWeight = [wt](const Profile& p) {
        auto of = [&](const Color& c) {
          auto it = wt->find(c);
          return it == wt->end() ? 1 : it->second;
        };
        int s = of(p.output);
        for (const auto& c : p.inputs) s += of(c);
        return s;
      };
    }
    return w;
  }

  std::string print() const {
    std::string s = "window arity " + std::to_string(arity) + " slots " +
                    std::to_string(slots) + "\n";
    for (const auto& [c, w] : weights) s += "weight " + c + " " + std::to_string(w) + "\n";
    return s;
  }
};

void parseWindowLine(WindowLines& w, const Line& l) {
  // window arity N slots M
  size_t i = 1;
  while (i < l.toks.size()) {
    const std::string& key = l.toks[i].text;
    if (key == "arity")
      w.arity = needInt(l, i + 1, "integer");
    else if (key == "slots")
      w.slots = needInt(l, i + 1, "integer");
    else
      fail(ParseCategory::Syntactic, l, l.toks[i].col, "unexpected '" + key + "'",
           "arity | slots");
    i += 2;
  }
}

// Shared carrier/action table parsing for collections and literal operads.
struct CarrierLines {
  std::map<Profile, std::vector<std::string>> carriers;
  // (profile, perm, source index) -> target index
  std::map<std::tuple<Profile, Perm, int>, int> actions;
  std::vector<std::string> actTexts;

  int indexOf(const Line& l, int col, const Profile& p, const std::string& name) const {
    auto it = carriers.find(p);
    if (it != carriers.end())
      for (size_t i = 0; i < it->second.size(); ++i)
        if (it->second[i] == name) return static_cast<int>(i);
    fail(ParseCategory::Reference, l, col,
         "unknown element '" + name + "' at " + p.str());
  }

  std::function<int(const Profile&, const Perm&, int)> actionFn() const {
    auto table =
        std::make_shared<std::map<std::tuple<Profile, Perm, int>, int>>(actions);
    return [table](const Profile& p, const Perm& s, int x) -> int {
      auto it = table->find({p, s, x});
      if (it == table->end())
        throw DomainError("action not tabulated at " + p.str() + " " + permStr(s));
      return it->second;
    };
  }
};

void parseProfileLine(CarrierLines& c, const Line& l) {
  Profile p = parseProfile(l, need(l, 1, "profile"));
  auto& car = c.carriers[p];
  for (size_t i = 2; i < l.toks.size(); ++i) car.push_back(l.toks[i].text);
}

void parseActLine(CarrierLines& c, const Line& l) {
  // act (a,b;c) 1 0 : x -> y
  Profile p = parseProfile(l, need(l, 1, "profile"));
  Perm s;
  size_t i = 2;
  while (i < l.toks.size() && l.toks[i].text != ":") {
    s.push_back(needInt(l, i, "permutation image or ':'"));
    ++i;
  }
  if (static_cast<int>(s.size()) != p.arity())
    fail(ParseCategory::Semantic, l, l.toks[1].col, "permutation length != arity");
  const Tok& colon = need(l, i, ":");
  if (colon.text != ":")
    fail(ParseCategory::Syntactic, l, colon.col, "unexpected '" + colon.text + "'", ":");
  const Tok& x = need(l, i + 1, "element");
  const Tok& arrow = need(l, i + 2, "->");
  if (arrow.text != "->")
    fail(ParseCategory::Syntactic, l, arrow.col, "unexpected '" + arrow.text + "'", "->");
  const Tok& y = need(l, i + 3, "element");
  needEnd(l, i + 4);
  int xi = c.indexOf(l, x.col, p, x.text);
  int yi = c.indexOf(l, y.col, permuteProfile(p, s), y.text);
  c.actions[{p, s, xi}] = yi;
  std::string perm;
  for (int v : s) perm += std::to_string(v) + " ";
  c.actTexts.push_back("act " + p.str() + " " + perm + ": " + x.text + " -> " + y.text);
}

std::string printCarriers(const CarrierLines& c) {
  std::string s;
  for (const auto& [p, car] : c.carriers) {
    s += "profile " + p.str();
    for (const auto& n : car) s += " " + n;
    s += "\n";
  }
  auto acts = c.actTexts;
  std::sort(acts.begin(), acts.end());
  for (const auto& a : acts) s += a + "\n";
  return s;
}

void parseCollection(ParserState& st, const std::string& name,
                     const std::vector<Line>& body) {
  std::string inName, outName;
  WindowLines w;
  CarrierLines c;
  for (const Line& l : body) {
    const std::string& head = l.toks[0].text;
    if (head == "in" || head == "out") {
      const Tok& t = need(l, 1, "colorset name");
      if (!st.doc.colorsets.count(t.text))
        fail(ParseCategory::Reference, l, t.col, "unknown colorset '" + t.text + "'");
      (head == "in" ? inName : outName) = t.text;
    } else if (head == "window") {
      parseWindowLine(w, l);
    } else if (head == "weight") {
      w.weights[need(l, 1, "color").text] = needInt(l, 2, "integer");
    } else if (head == "profile") {
      parseProfileLine(c, l);
    } else if (head == "act") {
      parseActLine(c, l);
    } else {
      fail(ParseCategory::Syntactic, l, l.toks[0].col, "unexpected '" + head + "'",
           "in | out | window | weight | profile | act");
    }
  }
  if (inName.empty() || outName.empty())
    throw ParseError(ParseCategory::Semantic, body.empty() ? 0 : body.front().number, 1,
                     "collection '" + name + "' needs 'in' and 'out' colorsets");
  TruncationWindow win = w.window(st.doc.colorsets[inName], st.doc.colorsets[outName]);
  for (const auto& [p, car] : c.carriers)
    if (!win.admits(p))
      throw ParseError(ParseCategory::Semantic, body.front().number, 1,
                       "profile " + p.str() + " is outside the declared window");
  auto coll = std::make_shared<SymmetricCollection>(
      makeCollection(win, c.carriers, c.actions.empty() ? nullptr : c.actionFn()));
  std::string text = "section collection " + name + "\nin " + inName + "\nout " + outName +
                     "\n" + w.print() + printCarriers(c) + "end\n";
  st.doc.collections[name] = std::move(coll);
  st.doc.sectionTexts.push_back(std::move(text));
}

void parseOperad(ParserState& st, const std::string& name, const std::vector<Line>& body) {
  if (!body.empty() && body[0].toks[0].text == "builtin") {
    const Tok& t = need(body[0], 1, "builtin operad name");
    needEnd(body[0], 2);
    if (body.size() > 1)
      fail(ParseCategory::Syntactic, body[1], body[1].toks[0].col,
           "builtin sections take no further lines", "end");
    auto spec = builtinSpec(t.text);
    if (!spec)
      fail(ParseCategory::Reference, body[0], t.col,
           "unknown builtin operad '" + t.text + "'");
    GraphOperad G = buildGraphOperad(*spec, st.params);
    st.doc.operads[name] = G.op;
    st.doc.builtinOperads[name] = std::move(G);
    st.doc.sectionTexts.push_back("section operad " + name + "\nbuiltin " + t.text +
                                  "\nend\n");
    return;
  }

  ColorSet colors;
  WindowLines w;
  CarrierLines c;
  std::map<Color, std::string> unitNames;
  struct SubLine {
    std::string outer;
    std::vector<std::string> inners;
    std::string result;
  };
  std::vector<SubLine> subs;
  for (const Line& l : body) {
    const std::string& head = l.toks[0].text;
    if (head == "colors") {
      for (size_t i = 1; i < l.toks.size(); ++i) colors.colors.push_back(l.toks[i].text);
    } else if (head == "window") {
      parseWindowLine(w, l);
    } else if (head == "weight") {
      w.weights[need(l, 1, "color").text] = needInt(l, 2, "integer");
    } else if (head == "profile") {
      parseProfileLine(c, l);
    } else if (head == "act") {
      parseActLine(c, l);
    } else if (head == "unit") {
      unitNames[need(l, 1, "color").text] = need(l, 2, "element").text;
      needEnd(l, 3);
    } else if (head == "sub") {
      SubLine s;
      s.outer = need(l, 1, "element").text;
      const Tok& colon = need(l, 2, ":");
      if (colon.text != ":")
        fail(ParseCategory::Syntactic, l, colon.col, "unexpected '" + colon.text + "'", ":");
      size_t i = 3;
      while (i < l.toks.size() && l.toks[i].text != "->") {
        s.inners.push_back(l.toks[i].text);
        ++i;
      }
      const Tok& arrow = need(l, i, "->");
      if (arrow.text != "->")
        fail(ParseCategory::Syntactic, l, arrow.col, "unexpected '" + arrow.text + "'",
             "->");
      s.result = need(l, i + 1, "element").text;
      needEnd(l, i + 2);
      subs.push_back(std::move(s));
    } else {
      fail(ParseCategory::Syntactic, l, l.toks[0].col, "unexpected '" + head + "'",
           "builtin | colors | window | weight | profile | act | unit | sub");
    }
  }

  int startLine = body.empty() ? 0 : body.front().number;
  // Element names must be unique across the section: maps and algebras refer
  // to them bare.
  ElemTable elems;
  for (const auto& [p, car] : c.carriers)
    for (size_t i = 0; i < car.size(); ++i) {
      if (elems.byName.count(car[i]))
        throw ParseError(ParseCategory::Semantic, startLine, 1,
                         "duplicate element name '" + car[i] + "' in operad '" + name + "'");
      elems.byName[car[i]] = ElemRef{p, static_cast<int>(i)};
      elems.byRef[{p, static_cast<int>(i)}] = car[i];
    }

  TruncationWindow win = w.window(colors, colors);
  for (const auto& [p, car] : c.carriers)
    if (!win.admits(p))
      throw ParseError(ParseCategory::Semantic, startLine, 1,
                       "profile " + p.str() + " is outside the declared window");

  std::map<Color, int> units;
  for (const auto& [a, n] : unitNames) {
    auto it = elems.byName.find(n);
    if (it == elems.byName.end() || it->second.profile != Profile{{a}, a})
      throw ParseError(ParseCategory::Reference, startLine, 1,
                       "unit '" + n + "' is not an element at (" + a + ";" + a + ")");
    units[a] = it->second.idx;
  }

  // Substitution table keyed by the element names of outer and inners.
  auto table = std::make_shared<std::map<std::vector<std::string>, ElemRef>>();
  for (const auto& s : subs) {
    auto oit = elems.byName.find(s.outer);
    if (oit == elems.byName.end())
      throw ParseError(ParseCategory::Reference, startLine, 1,
                       "unknown element '" + s.outer + "' in sub line");
    std::vector<std::string> key{s.outer};
    for (const auto& n : s.inners) {
      if (!elems.byName.count(n))
        throw ParseError(ParseCategory::Reference, startLine, 1,
                         "unknown element '" + n + "' in sub line");
      key.push_back(n);
    }
    auto rit = elems.byName.find(s.result);
    if (rit == elems.byName.end())
      throw ParseError(ParseCategory::Reference, startLine, 1,
                       "unknown element '" + s.result + "' in sub line");
    (*table)[key] = rit->second;
  }

  auto names = std::make_shared<std::map<std::pair<Profile, int>, std::string>>(elems.byRef);
  std::map<Color, int> unitsCopy = units;
  SubFn subFn = [table, names, unitsCopy](const ElemRef& outer,
                                          const std::vector<ElemRef>& inners) -> SubResult {
    if (inners.empty()) return SubResult{true, outer.idx, ""};
    std::vector<std::string> key{names->at({outer.profile, outer.idx})};
    for (const auto& e : inners) key.push_back(names->at({e.profile, e.idx}));
    auto it = table->find(key);
    if (it != table->end()) return SubResult{true, it->second.idx, ""};
    // Unit shortcuts so small fixtures need not tabulate unit instances.
    bool allUnits = true;
    for (const auto& e : inners) {
      auto u = unitsCopy.find(e.profile.output);
      if (e.profile.arity() != 1 || u == unitsCopy.end() || u->second != e.idx)
        allUnits = false;
    }
    if (allUnits) return SubResult{true, outer.idx, ""};
    if (outer.profile.arity() == 1) {
      auto u = unitsCopy.find(outer.profile.output);
      if (u != unitsCopy.end() && u->second == outer.idx && inners.size() == 1)
        return SubResult{true, inners[0].idx, ""};
    }
    return SubResult{false, -1, "substitution not tabulated for " + key[0]};
  };

  auto coll = std::make_shared<SymmetricCollection>(
      makeCollection(win, c.carriers, c.actions.empty() ? nullptr : c.actionFn()));
  OperadPtr P;
  try {
    P = std::make_shared<Operad>(makeOperad(name, colors, coll, units, subFn));
  } catch (const DomainError& e) {
    throw ParseError(ParseCategory::Semantic, startLine, 1, e.what());
  }

  std::string text = "section operad " + name + "\ncolors " + joinTokens(colors.colors) +
                     "\n" + w.print() + printCarriers(c);
  for (const auto& [a, n] : unitNames) text += "unit " + a + " " + n + "\n";
  std::vector<std::string> subTexts;
  for (const auto& [key, res] : *table) {
    std::string s = "sub " + key[0] + " :";
    for (size_t i = 1; i < key.size(); ++i) s += " " + key[i];
    s += " -> " + elems.byRef.at({res.profile, res.idx});
    subTexts.push_back(s);
  }
  std::sort(subTexts.begin(), subTexts.end());
  for (const auto& s : subTexts) text += s + "\n";
  text += "end\n";

  st.doc.operads[name] = std::move(P);
  st.operadElems[name] = std::move(elems);
  st.doc.sectionTexts.push_back(std::move(text));
}

void parseMap(ParserState& st, const std::string& name, const std::vector<Line>& body) {
  std::vector<std::pair<std::string, std::string>> expects;
  std::string text = "section map " + name + "\n";

  auto finish = [&](OperadMap m) {
    for (auto& [k, v] : expects) {
      st.doc.expectations[name][k] = v;
      text += "expect " + k + " " + v + "\n";
    }
    text += "end\n";
    st.doc.maps[name] = std::move(m);
    st.doc.sectionTexts.push_back(std::move(text));
  };

  std::string builtin;
  std::string fromName, toName;
  std::map<Color, Color> colorMap;
  std::vector<std::pair<std::string, std::string>> sends;
  for (const Line& l : body) {
    const std::string& head = l.toks[0].text;
    if (head == "builtin") {
      builtin = need(l, 1, "builtin map name").text;
      needEnd(l, 2);
    } else if (head == "expect") {
      const Tok& k = need(l, 1, "expectation key");
      std::vector<std::string> rest;
      for (size_t i = 2; i < l.toks.size(); ++i) rest.push_back(l.toks[i].text);
      expects.emplace_back(k.text, joinTokens(rest));
    } else if (head == "from" || head == "to") {
      const Tok& t = need(l, 1, "operad name");
      if (!st.doc.operads.count(t.text))
        fail(ParseCategory::Reference, l, t.col, "unknown operad '" + t.text + "'");
      (head == "from" ? fromName : toName) = t.text;
    } else if (head == "color") {
      const Tok& a = need(l, 1, "color");
      const Tok& arrow = need(l, 2, "->");
      if (arrow.text != "->")
        fail(ParseCategory::Syntactic, l, arrow.col, "unexpected '" + arrow.text + "'",
             "->");
      colorMap[a.text] = need(l, 3, "color").text;
    } else if (head == "send") {
      const Tok& x = need(l, 1, "element");
      const Tok& arrow = need(l, 2, "->");
      if (arrow.text != "->")
        fail(ParseCategory::Syntactic, l, arrow.col, "unexpected '" + arrow.text + "'",
             "->");
      sends.emplace_back(x.text, need(l, 3, "element").text);
    } else {
      fail(ParseCategory::Syntactic, l, l.toks[0].col, "unexpected '" + head + "'",
           "builtin | expect | from | to | color | send");
    }
  }
  std::sort(expects.begin(), expects.end());

  int startLine = body.empty() ? 0 : body.front().number;
  if (!builtin.empty()) {
    for (auto& m : builtinMaps(st.params))
      if (m.name == builtin) {
        text += "builtin " + builtin + "\n";
        finish(std::move(m));
        return;
      }
    throw ParseError(ParseCategory::Reference, startLine, 1,
                     "unknown builtin map '" + builtin + "'");
  }

  if (fromName.empty() || toName.empty())
    throw ParseError(ParseCategory::Semantic, startLine, 1,
                     "map '" + name + "' needs 'from' and 'to' operads");
  auto seIt = st.operadElems.find(fromName);
  auto deIt = st.operadElems.find(toName);
  if (seIt == st.operadElems.end() || deIt == st.operadElems.end())
    throw ParseError(ParseCategory::Semantic, startLine, 1,
                     "literal maps need literal operads on both sides");

  OperadMap m;
  m.name = name;
  m.src = st.doc.operads[fromName];
  m.dst = st.doc.operads[toName];
  auto cm = std::make_shared<std::map<Color, Color>>(colorMap);
  m.colorMap = [cm](const Color& a) -> Color {
    auto it = cm->find(a);
    if (it == cm->end()) throw DomainError("color '" + a + "' has no image");
    return it->second;
  };
  // Component table keyed by source (profile, index).
  auto comp = std::make_shared<std::map<std::pair<Profile, int>, int>>();
  for (const auto& [xn, yn] : sends) {
    auto x = seIt->second.byName.find(xn);
    auto y = deIt->second.byName.find(yn);
    if (x == seIt->second.byName.end())
      throw ParseError(ParseCategory::Reference, startLine, 1,
                       "unknown source element '" + xn + "'");
    if (y == deIt->second.byName.end())
      throw ParseError(ParseCategory::Reference, startLine, 1,
                       "unknown target element '" + yn + "'");
    (*comp)[{x->second.profile, x->second.idx}] = y->second.idx;
  }
  m.component = [comp](const Profile& p, int i) -> int {
    auto it = comp->find({p, i});
    if (it == comp->end())
      throw DomainError("component not tabulated at " + p.str() + " #" + std::to_string(i));
    return it->second;
  };

  text += "from " + fromName + "\nto " + toName + "\n";
  for (const auto& [a, b] : colorMap) text += "color " + a + " -> " + b + "\n";
  auto sorted = sends;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& [x, y] : sorted) text += "send " + x + " -> " + y + "\n";
  finish(std::move(m));
}

// Root-to-leaf vertex order of a rooted linear tree (all vertices valence 2).
std::vector<int> chainOrder(const OrderedGraph& g) {
  std::vector<int> order;
  int n = g.vertexCount();
  if (n == 0) return order;
  int cur = g.boundary[0];
  for (int step = 0; step < n; ++step) {
    int found = -1;
    for (int v = 0; v < n; ++v)
      if (g.germs[v].size() == 2 && g.germs[v][0] == cur) {
        found = v;
        break;
      }
    if (found < 0) throw DomainError("monoid algebra: element is not a rooted chain");
    order.push_back(found);
    cur = g.germs[found][1];
  }
  return order;
}

void parseAlgebra(ParserState& st, const std::string& name, const std::vector<Line>& body) {
  std::string overName;
  std::vector<std::string> monoidElems;
  std::map<std::pair<std::string, std::string>, std::string> mults;
  std::map<Color, std::vector<std::string>> freeGens;
  bool initial = false;
  CarrierLines c;  // table kind
  struct ActLine {
    std::string op;
    std::vector<std::string> args;
    std::string result;
  };
  std::vector<ActLine> acts;

  for (const Line& l : body) {
    const std::string& head = l.toks[0].text;
    if (head == "over") {
      const Tok& t = need(l, 1, "operad name");
      if (!st.doc.operads.count(t.text))
        fail(ParseCategory::Reference, l, t.col, "unknown operad '" + t.text + "'");
      overName = t.text;
    } else if (head == "monoid") {
      for (size_t i = 1; i < l.toks.size(); ++i) monoidElems.push_back(l.toks[i].text);
    } else if (head == "mult") {
      const Tok& x = need(l, 1, "element");
      const Tok& y = need(l, 2, "element");
      const Tok& arrow = need(l, 3, "->");
      if (arrow.text != "->")
        fail(ParseCategory::Syntactic, l, arrow.col, "unexpected '" + arrow.text + "'",
             "->");
      mults[{x.text, y.text}] = need(l, 4, "element").text;
    } else if (head == "free") {
      const Tok& a = need(l, 1, "color");
      for (size_t i = 2; i < l.toks.size(); ++i) freeGens[a.text].push_back(l.toks[i].text);
    } else if (head == "initial") {
      initial = true;
    } else if (head == "carrier") {
      Profile p{{}, need(l, 1, "color").text};
      (void)p;
      auto& car = c.carriers[Profile{{}, l.toks[1].text}];
      for (size_t i = 2; i < l.toks.size(); ++i) car.push_back(l.toks[i].text);
    } else if (head == "act") {
      ActLine al;
      al.op = need(l, 1, "operad element").text;
      const Tok& colon = need(l, 2, ":");
      if (colon.text != ":")
        fail(ParseCategory::Syntactic, l, colon.col, "unexpected '" + colon.text + "'", ":");
      size_t i = 3;
      while (i < l.toks.size() && l.toks[i].text != "->") {
        al.args.push_back(l.toks[i].text);
        ++i;
      }
      const Tok& arrow = need(l, i, "->");
      if (arrow.text != "->")
        fail(ParseCategory::Syntactic, l, arrow.col, "unexpected '" + arrow.text + "'",
             "->");
      al.result = need(l, i + 1, "element").text;
      needEnd(l, i + 2);
      acts.push_back(std::move(al));
    } else {
      fail(ParseCategory::Syntactic, l, l.toks[0].col, "unexpected '" + head + "'",
           "over | monoid | mult | free | initial | carrier | act");
    }
  }

  int startLine = body.empty() ? 0 : body.front().number;
  if (overName.empty())
    throw ParseError(ParseCategory::Semantic, startLine, 1,
                     "algebra '" + name + "' needs an 'over' operad");
  OperadPtr P = st.doc.operads[overName];
  std::string text = "section algebra " + name + "\nover " + overName + "\n";
  AlgPtr A;

  if (!monoidElems.empty()) {
    auto git = st.doc.builtinOperads.find(overName);
    if (git == st.doc.builtinOperads.end())
      throw ParseError(ParseCategory::Semantic, startLine, 1,
                       "monoid algebras need a builtin chain operad");
    int n = static_cast<int>(monoidElems.size());
    std::map<std::string, int> id;
    for (int i = 0; i < n; ++i) id[monoidElems[i]] = i;
    std::vector<std::vector<int>> mult(n, std::vector<int>(n, -1));
    for (int j = 0; j < n; ++j) mult[0][j] = mult[j][0] = j;  // first element is the unit
    for (const auto& [xy, z] : mults) {
      if (!id.count(xy.first) || !id.count(xy.second) || !id.count(z))
        throw ParseError(ParseCategory::Reference, startLine, 1,
                         "unknown monoid element in mult line");
      mult[id[xy.first]][id[xy.second]] = id[z];
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (mult[i][j] < 0)
          throw ParseError(ParseCategory::Semantic, startLine, 1,
                           "mult table missing " + monoidElems[i] + " * " + monoidElems[j]);
    try {
      A = monoidAlgebra(git->second, monoidElems, 0, mult);
    } catch (const DomainError& e) {
      throw ParseError(ParseCategory::Semantic, startLine, 1, e.what());
    }
    text += "monoid " + joinTokens(monoidElems) + "\n";
    for (const auto& [xy, z] : mults)
      text += "mult " + xy.first + " " + xy.second + " -> " + z + "\n";
  } else if (!freeGens.empty()) {
    try {
      A = freeAlgebra(P, freeGens).pa.alg;
    } catch (const DomainError& e) {
      throw ParseError(ParseCategory::Semantic, startLine, 1, e.what());
    }
    for (const auto& [a, gens] : freeGens) text += "free " + a + " " + joinTokens(gens) + "\n";
  } else if (initial) {
    A = initialAlgebra(P);
    text += "initial\n";
  } else {
    // Explicit table over a literal operad.
    auto eIt = st.operadElems.find(overName);
    if (eIt == st.operadElems.end())
      throw ParseError(ParseCategory::Semantic, startLine, 1,
                       "table algebras need a literal operad");
    auto F = std::make_shared<FiniteAlgebra>();
    F->P = P;
    for (const auto& [p, car] : c.carriers) F->carriers[p.output] = car;
    auto findElem = [&](const Color& a, const std::string& n) -> int {
      const auto& car = F->carriers.count(a) ? F->carriers.at(a) : std::vector<std::string>{};
      for (size_t i = 0; i < car.size(); ++i)
        if (car[i] == n) return static_cast<int>(i);
      throw ParseError(ParseCategory::Reference, startLine, 1,
                       "unknown algebra element '" + n + "' at color " + a);
    };
    auto table = std::make_shared<std::map<std::vector<int>, int>>();
    auto refId = std::make_shared<std::map<std::pair<Profile, int>, int>>();
    int nextOp = 0;
    for (const auto& [n, e] : eIt->second.byName) {
      (void)n;
      (*refId)[{e.profile, e.idx}] = nextOp++;
    }
    for (const auto& al : acts) {
      auto op = eIt->second.byName.find(al.op);
      if (op == eIt->second.byName.end())
        throw ParseError(ParseCategory::Reference, startLine, 1,
                         "unknown operad element '" + al.op + "'");
      if (static_cast<int>(al.args.size()) != op->second.profile.arity())
        throw ParseError(ParseCategory::Semantic, startLine, 1,
                         "act line arity mismatch for '" + al.op + "'");
      std::vector<int> key{refId->at({op->second.profile, op->second.idx})};
      for (int j = 0; j < static_cast<int>(al.args.size()); ++j)
        key.push_back(findElem(op->second.profile.inputs[j], al.args[j]));
      (*table)[key] = findElem(op->second.profile.output, al.result);
    }
    F->action = [table, refId](const ElemRef& p, const std::vector<int>& xs) -> int {
      auto rid = refId->find({p.profile, p.idx});
      if (rid == refId->end()) throw DomainError("action: unknown operation at " + p.profile.str());
      std::vector<int> key{rid->second};
      key.insert(key.end(), xs.begin(), xs.end());
      auto it = table->find(key);
      if (it == table->end())
        throw DomainError("action not tabulated at " + p.profile.str());
      return it->second;
    };
    A = F;
    for (const auto& [p, car] : c.carriers)
      text += "carrier " + p.output + " " + joinTokens(car) + "\n";
    for (const auto& al : acts)
      text += "act " + al.op + " : " + joinTokens(al.args) + " -> " + al.result + "\n";
  }

  text += "end\n";
  st.doc.algebras[name] = std::move(A);
  st.doc.sectionTexts.push_back(std::move(text));
}

void parseGraph(ParserState& st, const std::string& name, const std::vector<Line>& body) {
  OrderedGraph g;
  int edges = -1;
  for (const Line& l : body) {
    const std::string& head = l.toks[0].text;
    if (head == "V") {
      g.germs.resize(needInt(l, 1, "integer"));
    } else if (head == "edges") {
      edges = needInt(l, 1, "integer");
    } else if (head == "germs") {
      int v = needInt(l, 1, "vertex index");
      const Tok& colon = need(l, 2, ":");
      if (colon.text != ":")
        fail(ParseCategory::Syntactic, l, colon.col, "unexpected '" + colon.text + "'", ":");
      if (v < 0 || v >= g.vertexCount())
        fail(ParseCategory::Semantic, l, l.toks[1].col, "vertex index out of range");
      for (size_t i = 3; i < l.toks.size(); ++i)
        g.germs[v].push_back(needInt(l, i, "edge id"));
    } else if (head == "B") {
      const Tok& colon = need(l, 1, ":");
      if (colon.text != ":")
        fail(ParseCategory::Syntactic, l, colon.col, "unexpected '" + colon.text + "'", ":");
      for (size_t i = 2; i < l.toks.size(); ++i)
        g.boundary.push_back(needInt(l, i, "edge id"));
    } else {
      fail(ParseCategory::Syntactic, l, l.toks[0].col, "unexpected '" + head + "'",
           "V | edges | germs | B");
    }
  }
  int maxId = -1;
  for (const auto& gv : g.germs)
    for (int e : gv) maxId = std::max(maxId, e);
  for (int e : g.boundary) maxId = std::max(maxId, e);
  g.edgeCount = edges >= 0 ? edges : maxId + 1;
  int startLine = body.empty() ? 0 : body.front().number;
  auto errs = validateGraph(g);
  if (!errs.empty())
    throw ParseError(ParseCategory::Semantic, startLine, 1,
                     "invalid graph: " + errs.front());
  g = canonicalize(g);

  std::string text = "section graph " + name + "\nV " + std::to_string(g.vertexCount()) +
                     "\nedges " + std::to_string(g.edgeCount) + "\n";
  for (int v = 0; v < g.vertexCount(); ++v) {
    text += "germs " + std::to_string(v) + " :";
    for (int e : g.germs[v]) text += " " + std::to_string(e);
    text += "\n";
  }
  text += "B :";
  for (int e : g.boundary) text += " " + std::to_string(e);
  text += "\nend\n";
  st.doc.graphs[name] = std::move(g);
  st.doc.sectionTexts.push_back(std::move(text));
}

}  // namespace

Document parseDocument(const std::string& text, const GraphWindowParams& params) {
  ParserState st{params, {}, {}};
  auto lines = tokenize(text);
  size_t i = 0;
  while (i < lines.size()) {
    const Line& head = lines[i];
    if (head.toks[0].text != "section")
      fail(ParseCategory::Syntactic, head, head.toks[0].col,
           "unexpected '" + head.toks[0].text + "'", "section");
    const Tok& kind = need(head, 1, "section kind");
    const Tok& name = need(head, 2, "section name");
    needEnd(head, 3);
    static const char* kKinds = "colorset | collection | operad | map | algebra | graph";
    std::vector<Line> body;
    size_t j = i + 1;
    while (j < lines.size() && lines[j].toks[0].text != "end") {
      if (lines[j].toks[0].text == "section")
        fail(ParseCategory::Syntactic, lines[j], lines[j].toks[0].col,
             "section '" + name.text + "' is not closed", "end");
      body.push_back(lines[j]);
      ++j;
    }
    if (j == lines.size())
      fail(ParseCategory::Syntactic, head, head.toks[0].col,
           "section '" + name.text + "' is not closed", "end");
    needEnd(lines[j], 1);

    auto taken = [&](const std::string& n) {
      return st.doc.colorsets.count(n) || st.doc.collections.count(n) ||
             st.doc.operads.count(n) || st.doc.maps.count(n) || st.doc.algebras.count(n) ||
             st.doc.graphs.count(n);
    };
    if (taken(name.text))
      throw ParseError(ParseCategory::Semantic, head.number, name.col,
                       "duplicate section name '" + name.text + "'");

    if (kind.text == "colorset")
      parseColorset(st, name.text, body);
    else if (kind.text == "collection")
      parseCollection(st, name.text, body);
    else if (kind.text == "operad")
      parseOperad(st, name.text, body);
    else if (kind.text == "map")
      parseMap(st, name.text, body);
    else if (kind.text == "algebra")
      parseAlgebra(st, name.text, body);
    else if (kind.text == "graph")
      parseGraph(st, name.text, body);
    else
      fail(ParseCategory::Syntactic, head, kind.col, "unknown section kind '" + kind.text +
           "'", kKinds);
    i = j + 1;
  }
  return std::move(st.doc);
}

std::string printDocument(const Document& doc) {
  std::string out;
  for (size_t i = 0; i < doc.sectionTexts.size(); ++i) {
    if (i) out += "\n";
    out += doc.sectionTexts[i];
  }
  return out;
}

AlgPtr monoidAlgebra(const GraphOperad& as, std::vector<std::string> names, int unit,
                     std::vector<std::vector<int>> mult) {
  int n = static_cast<int>(names.size());
  if (unit != 0 || static_cast<int>(mult.size()) != n)
    throw DomainError("monoidAlgebra: table must be n x n with unit first");
  for (int j = 0; j < n; ++j)
    if (mult[0][j] != j || mult[j][0] != j)
      throw DomainError("monoidAlgebra: unit law fails in the table");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (mult[mult[i][j]][k] != mult[i][mult[j][k]])
          throw DomainError("monoidAlgebra: table not associative");

  auto F = std::make_shared<FiniteAlgebra>();
  F->P = as.op;
  for (const auto& a : as.op->colors.colors) F->carriers[a] = names;
  auto G = std::make_shared<GraphOperad>(as);
  auto table = std::make_shared<std::vector<std::vector<int>>>(std::move(mult));
  F->action = [G, table](const ElemRef& p, const std::vector<int>& xs) -> int {
    std::vector<int> order = chainOrder(G->graphOf(p));
    int acc = 0;
    for (int v : order) acc = (*table)[acc][xs[v]];
    return acc;
  };
  return F;
}

GraphWindowParams parseWindowFlag(const std::string& s) {
  GraphWindowParams p;
  size_t i = 0;
  while (i < s.size()) {
    size_t j = s.find(',', i);
    if (j == std::string::npos) j = s.size();
    std::string kv = s.substr(i, j - i);
    size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw DomainError("window flag: expected key=value, got '" + kv + "'");
    std::string key = kv.substr(0, eq);
    int v = std::stoi(kv.substr(eq + 1));
    if (key == "valence")
      p.maxValence = v;
    else if (key == "boundary")
      p.maxBoundary = v;
    else if (key == "arity")
      p.maxArity = v;
    else if (key == "slots")
      p.maxSlots = v;
    else if (key == "genus")
      p.maxGenus = v;
    else
      throw DomainError("window flag: unknown key '" + key + "'");
    i = j + 1;
  }
  return p;
}

std::string renderReport(const std::vector<std::pair<std::string, std::string>>& keys,
                         const std::string& verdict, bool machine) {
  std::string out;
  for (const auto& [k, v] : keys) out += k + (machine ? "=" : ": ") + v + "\n";
  out += machine ? "verdict=" + verdict + "\n" : "verdict: " + verdict + "\n";
  return out;
}

}  // namespace opx
