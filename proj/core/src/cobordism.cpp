#include "frobpair/cobordism.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <future>
#include <map>
#include <sstream>

namespace frobpair {

namespace {

std::string_view kind_name(EventKind k) {
  switch (k) {
    case EventKind::birth:
      return "birth";
    case EventKind::death:
      return "death";
    case EventKind::merge:
      return "merge";
    case EventKind::split:
      return "split";
    case EventKind::mobius:
      return "mobius";
    case EventKind::swap:
      return "swap";
  }
  return "?";
}

std::optional<EventKind> parse_kind(std::string_view s) {
  for (auto k : {EventKind::birth, EventKind::death, EventKind::merge, EventKind::split, EventKind::mobius,
                 EventKind::swap})
    if (kind_name(k) == s) return k;
  return std::nullopt;
}

std::string letters(const SortWord& w) {
  std::string s;
  for (Sort x : w) s += sort_letter(x);
  return s;
}

// Sorts consumed and produced by a generator event, and where.
struct Step {
  std::size_t first;  // 0-based start of the consumed range
  SortWord in, out;
  std::string generator;  // empty for swap
};

Step step_of(const Event& e, const SortWord& word) {
  const std::size_t n = word.size();
  auto need = [&](std::size_t count, std::size_t limit) {
    if (e.pos < 1 || e.pos + count - 1 > limit)
      throw Error(fmt::format("{} {}: position out of range for word {}", kind_name(e.kind), e.pos,
                              word_string(word)));
  };
  auto out_count = [&](std::size_t k) {
    if (e.out.size() != k)
      throw Error(fmt::format("{} {}: expected {} output sort{}", kind_name(e.kind), e.pos, k, k == 1 ? "" : "s"));
  };
  Step s;
  switch (e.kind) {
    case EventKind::birth:
      need(1, n + 1);
      s = {e.pos - 1, {}, {Sort::A}, "eta"};
      break;
    case EventKind::death:
      need(1, n);
      if (word[e.pos - 1] != Sort::A) throw Error(fmt::format("death {}: only A circles can die", e.pos));
      s = {e.pos - 1, {Sort::A}, {}, "eps"};
      break;
    case EventKind::merge:
      need(2, n);
      out_count(1);
      s = {e.pos - 1, {word[e.pos - 1], word[e.pos]}, e.out, ""};
      break;
    case EventKind::split:
      need(1, n);
      out_count(2);
      s = {e.pos - 1, {word[e.pos - 1]}, e.out, ""};
      break;
    case EventKind::mobius:
      need(1, n);
      out_count(1);
      s = {e.pos - 1, {word[e.pos - 1]}, e.out, ""};
      break;
    case EventKind::swap:
      need(2, n);
      s = {e.pos - 1, {word[e.pos - 1], word[e.pos]}, {word[e.pos], word[e.pos - 1]}, ""};
      break;
  }
  if (s.generator.empty() && e.kind != EventKind::swap) s.generator = generator_for(e.kind, s.in, s.out);
  return s;
}

SortWord apply_step(const SortWord& w, const Step& s) {
  SortWord out(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(s.first));
  out.insert(out.end(), s.out.begin(), s.out.end());
  out.insert(out.end(), w.begin() + static_cast<std::ptrdiff_t>(s.first + s.in.size()), w.end());
  return out;
}

}  // namespace

std::string Event::to_string() const {
  std::string s = fmt::format("{} {}", kind_name(kind), pos);
  for (Sort x : out) s += fmt::format(" {}", sort_letter(x));
  return s;
}

std::string generator_for(EventKind kind, const SortWord& in, const SortWord& out) {
  static const std::map<std::pair<std::string, std::string>, std::string> table = {
      {{"AA", "A"}, "mu_A"},      {{"AE", "E"}, "mu_AE"},   {{"EA", "E"}, "mu_EA"},
      {{"EE", "A"}, "mu_EEA"},    {{"EE", "E"}, "mu_E"},    {{"A", "AA"}, "Delta_A"},
      {{"E", "AE"}, "Delta_AE"},  {{"E", "EA"}, "Delta_EA"}, {{"A", "EE"}, "Delta_AEE"},
      {{"E", "EE"}, "Delta_E"},   {{"A", "E"}, "nu_AE"},    {{"E", "A"}, "nu_EA"},
      {{"E", "E"}, "nu_EE"},
  };
  const bool arity_ok = (kind == EventKind::merge && in.size() == 2 && out.size() == 1) ||
                        (kind == EventKind::split && in.size() == 1 && out.size() == 2) ||
                        (kind == EventKind::mobius && in.size() == 1 && out.size() == 1);
  auto it = table.find({letters(in), letters(out)});
  if (!arity_ok || it == table.end())
    throw Error(fmt::format("no generator for {}→{}", letters(in), letters(out)));
  return it->second;
}

std::vector<SortWord> CobordismWord::words() const {
  std::vector<SortWord> out{input};
  for (const auto& e : events) out.push_back(apply_step(out.back(), step_of(e, out.back())));
  return out;
}

SortWord CobordismWord::output() const { return words().back(); }

std::string CobordismWord::to_string() const {
  std::string s = "input";
  for (Sort x : input) s += fmt::format(" {}", sort_letter(x));
  s += "\n";
  for (const auto& e : events) s += e.to_string() + "\n";
  return s;
}

void validate(const CobordismWord& w) { (void)w.words(); }

CobordismWord parse_cobordism(std::string_view text) {
  CobordismWord w;
  bool have_input = false;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  SortWord running;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    auto fail = [&](const std::string& msg) { throw Error(fmt::format("line {}: {}", lineno, msg)); };
    std::vector<std::string> args;
    for (std::string a; ls >> a;) args.push_back(a);
    auto sorts_from = [&](std::size_t from) {
      SortWord s;
      for (std::size_t i = from; i < args.size(); ++i) {
        if (args[i].size() != 1 || (args[i][0] != 'A' && args[i][0] != 'E')) fail("expected a sort A or E, got '" + args[i] + "'");
        s.push_back(parse_sort(args[i][0]));
      }
      return s;
    };
    if (head == "input") {
      if (have_input) fail("input given twice");
      w.input = running = sorts_from(0);
      have_input = true;
      continue;
    }
    if (!have_input) fail("the first line must be 'input'");
    auto kind = parse_kind(head);
    if (!kind) fail(fmt::format("unknown event '{}'", head));
    if (args.empty()) fail(fmt::format("{} needs a position", head));
    Event e;
    e.kind = *kind;
    try {
      std::size_t used = 0;
      long p = std::stol(args[0], &used);
      if (used != args[0].size() || p < 1) throw std::invalid_argument("pos");
      e.pos = static_cast<std::size_t>(p);
    } catch (const std::exception&) {
      fail(fmt::format("bad position '{}'", args[0]));
    }
    e.out = sorts_from(1);
    if ((e.kind == EventKind::birth || e.kind == EventKind::death || e.kind == EventKind::swap) && !e.out.empty())
      fail(fmt::format("{} takes only a position", head));
    try {
      running = apply_step(running, step_of(e, running));
    } catch (const Error& err) {
      fail(err.what());
    }
    w.events.push_back(std::move(e));
  }
  if (!have_input) throw Error("cobordism has no 'input' line");
  return w;
}

CobordismWord load_cobordism(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(fmt::format("cannot open {}", path));
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_cobordism(ss.str());
}

CobordismWord concat(const CobordismWord& a, const CobordismWord& b) {
  if (a.output() != b.input)
    throw Error(fmt::format("cannot concatenate: output {} against input {}", word_string(a.output()),
                            word_string(b.input)));
  CobordismWord out = a;
  out.events.insert(out.events.end(), b.events.begin(), b.events.end());
  return out;
}

LinMap evaluate(const CobordismWord& w, const FrobeniusPair& pair) {
  const auto& basis = pair.basis();
  SortWord word = w.input;
  LinMap acc = LinMap::identity(basis, word);
  for (const auto& e : w.events) {
    Step s = step_of(e, word);
    LinMap local;
    if (e.kind == EventKind::swap) {
      local = LinMap::transposition(basis, s.in, 1);
    } else {
      local = pair.at(s.generator);
    }
    SortWord left(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(s.first));
    SortWord right(word.begin() + static_cast<std::ptrdiff_t>(s.first + s.in.size()), word.end());
    acc = compose(embed(local, left, right), acc);
    word = apply_step(word, s);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Saddle exchange

namespace {

// A band move on named circles.
struct Move {
  EventKind kind;  // merge, split or mobius
  std::vector<std::string> in, out;
};

struct CaseDef {
  std::string name, description;
  std::vector<std::string> start;
  std::vector<Move> first, second;  // the two orders of the saddles
};

Move mg(std::string x, std::string y, std::string z) { return {EventKind::merge, {x, y}, {z}}; }
Move sp(std::string x, std::string y, std::string z) { return {EventKind::split, {x}, {y, z}}; }
Move tw(std::string x, std::string y) { return {EventKind::mobius, {x}, {y}}; }

// Two bands v, w on up to three circles, up to symmetry. On one circle the
// chords are interleaved or not and each band is twisted (one circle to one
// circle) or not; twisting flips the other band exactly when interleaved.
// Bands on disjoint circles commute trivially and are left out.
const std::vector<CaseDef>& case_table() {
  static const std::vector<CaseDef> t = {
      {"case01", "one circle, interleaved untwisted bands: split then merge", {"a"},
       {sp("a", "b1", "b2"), mg("b1", "b2", "d")}, {sp("a", "c1", "c2"), mg("c1", "c2", "d")}},
      {"case02", "one circle, parallel untwisted bands: two splits", {"a"},
       {sp("a", "p", "bq"), sp("bq", "g", "r")}, {sp("a", "g", "cq"), sp("cq", "p", "r")}},
      {"case03", "one circle, parallel bands, w twisted", {"a"},
       {sp("a", "p", "bq"), tw("bq", "r")}, {tw("a", "c"), sp("c", "p", "r")}},
      {"case04", "one circle, parallel twisted bands", {"a"},
       {tw("a", "b"), tw("b", "d")}, {tw("a", "c"), tw("c", "d")}},
      {"case05", "one circle, interleaved twisted bands: the second saddle splits", {"a"},
       {tw("a", "b"), sp("b", "d1", "d2")}, {tw("a", "c"), sp("c", "d1", "d2")}},
      {"case06", "one circle, interleaved bands, w twisted", {"a"},
       {sp("a", "b1", "b2"), mg("b1", "b2", "d")}, {tw("a", "c"), tw("c", "d")}},
      {"case07", "two circles joined by both bands: merge then split", {"a1", "a2"},
       {mg("a1", "a2", "b"), sp("b", "d1", "d2")}, {mg("a1", "a2", "c"), sp("c", "d1", "d2")}},
      {"case08", "two circles joined by both bands, relatively twisted", {"a1", "a2"},
       {mg("a1", "a2", "b"), tw("b", "d")}, {mg("a1", "a2", "c"), tw("c", "d")}},
      {"case09", "two circles joined by v, untwisted w on the first", {"a1", "a2"},
       {mg("a1", "a2", "b"), sp("b", "x", "z")}, {sp("a1", "x", "y"), mg("y", "a2", "z")}},
      {"case10", "two circles joined by v, twisted w on the first", {"a1", "a2"},
       {mg("a1", "a2", "b"), tw("b", "d")}, {tw("a1", "y"), mg("y", "a2", "d")}},
      {"case11", "three circles in a chain: two merges", {"a1", "a2", "a3"},
       {mg("a1", "a2", "b"), mg("b", "a3", "d")}, {mg("a2", "a3", "c"), mg("a1", "c", "d")}},
  };
  return t;
}

std::vector<std::string> circles_of(const CaseDef& c) {
  std::vector<std::string> names = c.start;
  auto add = [&](const std::string& n) {
    if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
  };
  for (const auto* path : {&c.first, &c.second})
    for (const auto& m : *path) {
      for (const auto& n : m.in) add(n);
      for (const auto& n : m.out) add(n);
    }
  return names;
}

// Position of a name, 0-based.
std::size_t where(const std::vector<std::string>& list, const std::string& n) {
  return static_cast<std::size_t>(std::find(list.begin(), list.end(), n) - list.begin());
}

void push_swap(CobordismWord& w, std::vector<std::string>& list, std::size_t i) {
  std::swap(list[i], list[i + 1]);
  w.events.push_back({EventKind::swap, i + 1, {}});
}

CobordismWord build_path(const std::vector<Move>& moves, const std::vector<std::string>& start,
                         const std::map<std::string, Sort>& label, std::vector<std::string>& list) {
  CobordismWord w;
  list = start;
  for (const auto& n : start) w.input.push_back(label.at(n));
  for (const auto& m : moves) {
    SortWord out;
    for (const auto& n : m.out) out.push_back(label.at(n));
    if (m.kind == EventKind::merge) {
      // Bring the second circle just after the first.
      while (where(list, m.in[1]) != where(list, m.in[0]) + 1) {
        std::size_t px = where(list, m.in[0]), py = where(list, m.in[1]);
        if (py > px) push_swap(w, list, py - 1);
        else push_swap(w, list, py);
      }
      std::size_t px = where(list, m.in[0]);
      w.events.push_back({EventKind::merge, px + 1, out});
      list.erase(list.begin() + static_cast<std::ptrdiff_t>(px + 1));
      list[px] = m.out[0];
    } else if (m.kind == EventKind::split) {
      std::size_t px = where(list, m.in[0]);
      w.events.push_back({EventKind::split, px + 1, out});
      list[px] = m.out[0];
      list.insert(list.begin() + static_cast<std::ptrdiff_t>(px + 1), m.out[1]);
    } else {
      std::size_t px = where(list, m.in[0]);
      w.events.push_back({EventKind::mobius, px + 1, out});
      list[px] = m.out[0];
    }
  }
  return w;
}

bool legal(const CaseDef& c, const std::map<std::string, Sort>& label) {
  for (const auto* path : {&c.first, &c.second})
    for (const auto& m : *path) {
      SortWord in, out;
      for (const auto& n : m.in) in.push_back(label.at(n));
      for (const auto& n : m.out) out.push_back(label.at(n));
      // A saddle from one circle to one circle needs an essential side.
      if (m.kind == EventKind::mobius && in[0] == Sort::A && out[0] == Sort::A) return false;
      try {
        generator_for(m.kind, in, out);
      } catch (const Error&) {
        return false;
      }
    }
  return true;
}

std::vector<EquationResult> run_case(const CaseDef& c, const FrobeniusPair& pair) {
  std::vector<EquationResult> out;
  const auto names = circles_of(c);
  const std::size_t n = names.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::map<std::string, Sort> label;
    for (std::size_t i = 0; i < n; ++i) label[names[i]] = (mask >> (n - 1 - i)) & 1 ? Sort::E : Sort::A;
    if (!legal(c, label)) continue;
    std::string lname = c.name + ":";
    for (const auto& nm : names) lname += fmt::format(" {}={}", nm, sort_letter(label[nm]));
    EquationResult r{lname, c.name, Provenance::generated, Outcome::pass, std::nullopt, {}};

    std::vector<std::string> end1, end2;
    CobordismWord w1 = build_path(c.first, c.start, label, end1);
    CobordismWord w2 = build_path(c.second, c.start, label, end2);
    // Align the final circle order of the second path with the first.
    for (std::size_t i = 0; i < end1.size(); ++i)
      for (std::size_t p = where(end2, end1[i]); p > i; --p) push_swap(w2, end2, p - 1);

    for (const auto* w : {&w1, &w2}) {
      SortWord word = w->input;
      for (const auto& e : w->events) {
        Step s = step_of(e, word);
        if (!s.generator.empty() && !pair.has(s.generator) && r.outcome != Outcome::skip) {
          r.outcome = Outcome::skip;
          r.reason = fmt::format("missing generator {}", s.generator);
        }
        word = apply_step(word, s);
      }
    }
    if (r.outcome != Outcome::skip) {
      EqualResult eq = equal(evaluate(w1, pair), evaluate(w2, pair));
      if (!eq.equal) {
        r.outcome = Outcome::fail;
        r.witness = eq.witness;
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

const std::vector<DiamondCase>& diamond_cases() {
  static const std::vector<DiamondCase> out = [] {
    std::vector<DiamondCase> v;
    for (const auto& c : case_table()) v.push_back({c.name, c.description});
    return v;
  }();
  return out;
}

VerifyReport diamond_exchange_suite(const FrobeniusPair& pair) {
  VerifyReport rep;
  rep.pair_name = pair.name();
  std::vector<std::future<std::vector<EquationResult>>> jobs;
  for (const auto& c : case_table())
    jobs.push_back(std::async(std::launch::async, [&c, &pair] { return run_case(c, pair); }));
  for (auto& j : jobs) {
    auto rs = j.get();
    rep.results.insert(rep.results.end(), std::make_move_iterator(rs.begin()), std::make_move_iterator(rs.end()));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Poles

PoleWord parse_poles(std::string_view s) {
  PoleWord w;
  for (char c : s) {
    if (c == '+') w.push_back(PoleSide::left);
    else if (c == '-') w.push_back(PoleSide::right);
    else throw Error(fmt::format("pole words use '+' and '-', got '{}'", c));
  }
  return w;
}

std::string pole_string(const PoleWord& w) {
  std::string s;
  for (auto p : w) s += p == PoleSide::left ? '+' : '-';
  return s;
}

std::size_t pole_degree(const PoleWord& w) {
  if (w.size() % 2) throw Error("pole count must be even");
  // A linear stack reduction leaves an alternating word of even length,
  // whose ends differ, so it is already cyclically reduced.
  std::vector<PoleSide> st;
  for (auto p : w) {
    if (!st.empty() && st.back() == p) st.pop_back();
    else st.push_back(p);
  }
  return st.size() / 2;
}

std::size_t total_degree(const std::vector<PoleWord>& components) {
  std::size_t d = 0;
  for (const auto& c : components) d += pole_degree(c);
  return d;
}

bool is_essential(const std::vector<PoleWord>& components) { return total_degree(components) > 0; }

}  // namespace frobpair
