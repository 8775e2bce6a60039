#include "frobpair/theory.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace frobpair {

namespace {

SortWord w(std::string_view s) { return parse_word(s); }

}  // namespace

const std::vector<GeneratorSig>& signature() {
  static const std::vector<GeneratorSig> sig = {
      {"mu_A", w("AA"), w("A"), "Delta_A", "mu_A"},
      {"eta", w("()"), w("A"), "eps", "eta"},
      {"eps", w("A"), w("()"), "eta", "eps"},
      {"Delta_A", w("A"), w("AA"), "mu_A", "Delta_A"},
      {"beta", w("AA"), w("()"), "gamma", "beta"},
      {"gamma", w("()"), w("AA"), "beta", "gamma"},
      {"mu_AE", w("AE"), w("E"), "Delta_AE", "mu_EA"},
      {"mu_EA", w("EA"), w("E"), "Delta_EA", "mu_AE"},
      {"Delta_AE", w("E"), w("AE"), "mu_AE", "Delta_EA"},
      {"Delta_EA", w("E"), w("EA"), "mu_EA", "Delta_AE"},
      {"mu_E", w("EE"), w("E"), "Delta_E", "mu_E"},
      {"Delta_E", w("E"), w("EE"), "mu_E", "Delta_E"},
      {"mu_EEA", w("EE"), w("A"), "Delta_AEE", "mu_EEA"},
      {"Delta_AEE", w("A"), w("EE"), "mu_EEA", "Delta_AEE"},
      {"nu_AE", w("A"), w("E"), "nu_EA", "nu_AE"},
      {"nu_EA", w("E"), w("A"), "nu_AE", "nu_EA"},
      {"nu_EE", w("E"), w("E"), "nu_EE", "nu_EE"},
  };
  return sig;
}

const GeneratorSig* find_generator(std::string_view name) {
  for (const auto& g : signature())
    if (g.name == name) return &g;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Items and terms

SortWord Item::domain() const {
  switch (kind) {
    case Kind::generator:
      return find_generator(name)->domain;
    case Kind::identity:
      return {sort};
    case Kind::swap:
      if (!swap_sorts) throw Error("untyped swap");
      return {swap_sorts->first, swap_sorts->second};
  }
  return {};
}

SortWord Item::codomain() const {
  switch (kind) {
    case Kind::generator:
      return find_generator(name)->codomain;
    case Kind::identity:
      return {sort};
    case Kind::swap:
      if (!swap_sorts) throw Error("untyped swap");
      return {swap_sorts->second, swap_sorts->first};
  }
  return {};
}

std::string Item::to_string() const {
  switch (kind) {
    case Kind::generator:
      return name;
    case Kind::identity:
      return fmt::format("id_{}", sort_letter(sort));
    case Kind::swap:
      if (!swap_sorts) return "swap";
      return fmt::format("swap_{}{}", sort_letter(swap_sorts->first), sort_letter(swap_sorts->second));
  }
  return "?";
}

std::string Term::to_string() const {
  std::string out;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (l) out += " ; ";
    const auto& layer = layers[l];
    if (layer.size() == 1) {
      out += layer[0].to_string();
      continue;
    }
    out += "(";
    for (std::size_t i = 0; i < layer.size(); ++i) {
      if (i) out += " (x) ";
      out += layer[i].to_string();
    }
    out += ")";
  }
  return out;
}

std::set<std::string> Term::generators() const {
  std::set<std::string> out;
  for (const auto& layer : layers)
    for (const auto& it : layer)
      if (it.kind == Item::Kind::generator) out.insert(it.name);
  return out;
}

TermType typecheck(Term& term) {
  if (term.layers.empty()) throw Error("empty term");
  TermType type;
  SortWord running;
  for (std::size_t l = 0; l < term.layers.size(); ++l) {
    auto& layer = term.layers[l];
    if (layer.empty()) throw Error(fmt::format("empty layer {}", l + 1));
    SortWord out;
    if (l == 0) {
      for (auto& it : layer) {
        if (it.kind == Item::Kind::swap && !it.swap_sorts)
          throw Error("cannot infer the sorts of 'swap' in the first layer; write swap_AE etc.");
        auto d = it.domain();
        running.insert(running.end(), d.begin(), d.end());
      }
      type.domain = running;
    }
    std::size_t pos = 0;
    for (auto& it : layer) {
      if (it.kind == Item::Kind::swap && !it.swap_sorts) {
        if (pos + 2 > running.size())
          throw Error(fmt::format("type error in layer {}: swap runs past word {}", l + 1, word_string(running)));
        it.swap_sorts = std::pair{running[pos], running[pos + 1]};
      }
      auto d = it.domain();
      if (pos + d.size() > running.size() || !std::equal(d.begin(), d.end(), running.begin() + pos))
        throw Error(fmt::format("type error in layer {}: {} expects {} but the word is {}", l + 1, it.to_string(),
                                word_string(d), word_string(running)));
      pos += d.size();
      auto c = it.codomain();
      out.insert(out.end(), c.begin(), c.end());
    }
    if (pos != running.size())
      throw Error(fmt::format("type error in layer {}: layer consumes {} of {} factors of {}", l + 1, pos,
                              running.size(), word_string(running)));
    running = std::move(out);
  }
  type.codomain = running;
  return type;
}

TermType typecheck(const Term& term) {
  Term copy = term;
  return typecheck(copy);
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class TermLexer {
 public:
  explicit TermLexer(std::string_view text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }
  bool accept(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  bool peek(std::string_view tok) {
    skip_ws();
    return text_.substr(pos_, tok.size()) == tok;
  }
  std::string ident() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    if (start == pos_) fail("expected a generator name");
    return std::string(text_.substr(start, pos_ - start));
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(fmt::format("syntax error at position {} in '{}': {}", pos_, text_, what));
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

Item make_item(const std::string& name, TermLexer& lex) {
  Item it;
  if (name == "id_A" || name == "id_E") {
    it.kind = Item::Kind::identity;
    it.sort = name == "id_A" ? Sort::A : Sort::E;
    return it;
  }
  if (name == "swap") {
    it.kind = Item::Kind::swap;
    return it;
  }
  if (name.size() == 7 && name.rfind("swap_", 0) == 0) {
    it.kind = Item::Kind::swap;
    it.swap_sorts = std::pair{parse_sort(name[5]), parse_sort(name[6])};
    return it;
  }
  if (!find_generator(name)) lex.fail(fmt::format("unknown generator {}", name));
  it.kind = Item::Kind::generator;
  it.name = name;
  return it;
}

std::vector<Item> parse_items(TermLexer& lex, bool parenthesized) {
  std::vector<Item> items;
  for (;;) {
    if (!parenthesized && lex.peek("(") && !lex.peek("(x)")) {
      // nested group inside an unparenthesized layer: flatten
      lex.accept("(");
      auto inner = parse_items(lex, true);
      items.insert(items.end(), inner.begin(), inner.end());
    } else {
      items.push_back(make_item(lex.ident(), lex));
    }
    if (!lex.accept("(x)")) break;
  }
  if (parenthesized && !lex.accept(")")) lex.fail("expected ')'");
  return items;
}

Term parse_term_lex(TermLexer& lex) {
  Term t;
  for (;;) {
    std::vector<Item> layer;
    if (lex.peek("(") && !lex.peek("(x)")) {
      lex.accept("(");
      layer = parse_items(lex, true);
      // allow "(a (x) b) (x) c"
      while (lex.accept("(x)")) {
        auto more = parse_items(lex, false);
        layer.insert(layer.end(), more.begin(), more.end());
      }
    } else {
      layer = parse_items(lex, false);
    }
    t.layers.push_back(std::move(layer));
    if (!lex.accept(";")) break;
  }
  return t;
}

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

Provenance parse_provenance(std::string_view s) {
  if (s == "verbatim") return Provenance::verbatim;
  if (s == "corrected") return Provenance::corrected;
  if (s == "generated") return Provenance::generated;
  throw Error(fmt::format("unknown provenance '{}'", s));
}

}  // namespace

Term parse_term(std::string_view text) {
  TermLexer lex(text);
  Term t = parse_term_lex(lex);
  if (!lex.at_end()) lex.fail("trailing input");
  return t;
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::verbatim:
      return "verbatim";
    case Provenance::corrected:
      return "corrected";
    case Provenance::generated:
      return "generated";
  }
  return "?";
}

std::set<std::string> Equation::generators() const {
  auto g = lhs.generators();
  auto r = rhs.generators();
  g.insert(r.begin(), r.end());
  return g;
}

std::string Equation::to_string() const {
  std::string head = fmt::format("eq {} [{}", name, group);
  if (provenance != Provenance::verbatim) head += fmt::format(", {}", frobpair::to_string(provenance));
  head += "]: " + lhs.to_string() + " == " + rhs.to_string();
  if (!note.empty()) head += "  # " + note;
  return head;
}

const std::vector<std::string>& known_groups() {
  static const std::vector<std::string> g = {"frobA",    "moduleE", "comoduleE",   "cancel",  "muDeltaE", "EEA",
                                             "compat",   "consistency", "derived", "mobius", "quarantine"};
  return g;
}

Theory parse_theory(std::string_view text) {
  Theory th;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string body = line, note;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      body = line.substr(0, hash);
      note = trim(std::string_view(line).substr(hash + 1));
    }
    body = trim(body);
    if (body.empty()) continue;
    try {
      if (body.rfind("version", 0) == 0) {
        th.version = std::stoi(trim(std::string_view(body).substr(7)));
        continue;
      }
      if (body.rfind("eq ", 0) != 0) throw Error("expected 'eq NAME [GROUP]: TERM == TERM'");
      auto colon = body.find(':');
      if (colon == std::string::npos) throw Error("missing ':'");
      std::string head = trim(std::string_view(body).substr(3, colon - 3));
      std::string rest = body.substr(colon + 1);

      Equation eq;
      eq.group = "user";
      if (auto lb = head.find('['); lb != std::string::npos) {
        auto rb = head.find(']', lb);
        if (rb == std::string::npos) throw Error("missing ']'");
        std::string inside = head.substr(lb + 1, rb - lb - 1);
        eq.name = trim(std::string_view(head).substr(0, lb));
        auto comma = inside.find(',');
        eq.group = trim(std::string_view(inside).substr(0, comma));
        if (comma != std::string::npos) eq.provenance = parse_provenance(trim(std::string_view(inside).substr(comma + 1)));
      } else {
        eq.name = head;
      }
      if (eq.name.empty()) throw Error("missing equation name");
      eq.note = note;

      auto sep = rest.find("==");
      if (sep == std::string::npos) throw Error("missing '=='");
      eq.lhs = parse_term(rest.substr(0, sep));
      eq.rhs = parse_term(rest.substr(sep + 2));
      TermType lt = typecheck(eq.lhs);
      TermType rt = typecheck(eq.rhs);
      if (lt.domain != rt.domain || lt.codomain != rt.codomain)
        throw Error(fmt::format("type error: lhs is {} -> {} but rhs is {} -> {}", word_string(lt.domain),
                                word_string(lt.codomain), word_string(rt.domain), word_string(rt.codomain)));
      eq.type = lt;
      for (const auto& other : th.equations)
        if (other.name == eq.name) throw Error(fmt::format("duplicate equation name {}", eq.name));
      th.equations.push_back(std::move(eq));
    } catch (const Error& e) {
      throw Error(fmt::format("line {}: {}", lineno, e.what()));
    }
  }
  return th;
}

Theory load_theory_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(fmt::format("cannot open axiom file {}", path));
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_theory(ss.str());
}

const Theory& default_theory() {
  static const Theory th = [] {
    if (const char* env = std::getenv("FROBPAIR_AXIOMS"); env && *env) return load_theory_file(env);
    return parse_theory(embedded_axioms_text());
  }();
  return th;
}

// ---------------------------------------------------------------------------
// Formal transforms

Term dagger(const Term& t) {
  Term out;
  for (auto l = t.layers.rbegin(); l != t.layers.rend(); ++l) {
    std::vector<Item> layer;
    for (const auto& it : *l) {
      Item n = it;
      if (it.kind == Item::Kind::generator) n.name = find_generator(it.name)->dagger;
      if (it.kind == Item::Kind::swap && it.swap_sorts) n.swap_sorts = std::pair{it.swap_sorts->second, it.swap_sorts->first};
      layer.push_back(std::move(n));
    }
    out.layers.push_back(std::move(layer));
  }
  return out;
}

Term mirror(const Term& t) {
  Term out;
  for (const auto& l : t.layers) {
    std::vector<Item> layer;
    for (auto it = l.rbegin(); it != l.rend(); ++it) {
      Item n = *it;
      if (n.kind == Item::Kind::generator) n.name = find_generator(n.name)->mirror;
      if (n.kind == Item::Kind::swap && n.swap_sorts) n.swap_sorts = std::pair{n.swap_sorts->second, n.swap_sorts->first};
      layer.push_back(std::move(n));
    }
    out.layers.push_back(std::move(layer));
  }
  return out;
}

std::vector<Equation> mechanical_images(const Equation& eq) {
  std::vector<Equation> out;
  auto same = [](const Equation& a, const Term& l, const Term& r) {
    return (a.lhs == l && a.rhs == r) || (a.lhs == r && a.rhs == l);
  };
  auto add = [&](const std::string& suffix, Term l, Term r) {
    if (same(eq, l, r)) return;
    for (const auto& o : out)
      if (same(o, l, r)) return;
    Equation n;
    n.name = eq.name + suffix;
    n.group = eq.group;
    n.provenance = Provenance::generated;
    n.note = fmt::format("{} image of {}", suffix.substr(1), eq.name);
    n.lhs = std::move(l);
    n.rhs = std::move(r);
    n.type = typecheck(n.lhs);
    out.push_back(std::move(n));
  };
  add("_dagger", dagger(eq.lhs), dagger(eq.rhs));
  add("_mirror", mirror(eq.lhs), mirror(eq.rhs));
  add("_dagger_mirror", dagger(mirror(eq.lhs)), dagger(mirror(eq.rhs)));
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

LinMap evaluate_term(const Term& term, const BasisPtr& basis, const GeneratorLookup& lookup) {
  Term resolved = term;
  typecheck(resolved);
  std::optional<LinMap> acc;
  for (const auto& layer : resolved.layers) {
    std::optional<LinMap> lm;
    for (const auto& it : layer) {
      LinMap piece;
      switch (it.kind) {
        case Item::Kind::identity:
          piece = LinMap::identity(basis, {it.sort});
          break;
        case Item::Kind::swap:
          piece = LinMap::transposition(basis, it.domain(), 1);
          break;
        case Item::Kind::generator: {
          const LinMap* g = lookup(it.name);
          if (!g) throw Error(fmt::format("missing generator {}", it.name));
          piece = *g;
          break;
        }
      }
      lm = lm ? tensor(*lm, piece) : std::move(piece);
    }
    acc = acc ? compose(*lm, *acc) : std::move(*lm);
  }
  return *acc;
}

}  // namespace frobpair
