#include "frobpair/pair.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace frobpair {

using ojson = nlohmann::ordered_json;

std::string save_pair_string(const FrobeniusPair& pair) {
  const auto& b = *pair.basis();
  ojson j;
  j["name"] = pair.name();
  ojson vars = ojson::array();
  for (const auto& v : pair.ring()->vars()) vars.push_back({{"name", v.name}, {"invertible", v.invertible}});
  j["ring"] = {{"domain", to_string(pair.ring()->domain())}, {"vars", vars}};
  j["basis"] = {{"A", b.labels(Sort::A)}, {"E", b.labels(Sort::E)}};
  ojson maps = ojson::object();
  for (const auto& sig : signature()) {
    auto it = pair.stored().find(sig.name);
    if (it == pair.stored().end()) continue;
    const LinMap& m = it->second;
    ojson cols = ojson::array();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (m.column(c).empty()) continue;
      ojson outs = ojson::array();
      for (const auto& [r, v] : m.column(c))
        outs.push_back({{"basis", b.tuple_labels(m.codomain(), r)}, {"coeff", v.to_string()}});
      cols.push_back({{"in", b.tuple_labels(m.domain(), c)}, {"out", outs}});
    }
    maps[sig.name] = cols;
  }
  j["maps"] = maps;
  if (!pair.provisional().empty()) j["provisional"] = pair.provisional();
  ojson meta = ojson::object();
  for (const auto& [k, v] : pair.meta()) meta[k] = v;
  j["meta"] = meta;
  return j.dump(2) + "\n";
}

namespace {

// Reads a field with a path-qualified error.
const nlohmann::json& field(const nlohmann::json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw Error(fmt::format("{}: missing field '{}'", path, key));
  return j.at(key);
}

std::string as_string(const nlohmann::json& j, const std::string& path) {
  if (!j.is_string()) throw Error(fmt::format("{}: expected a string", path));
  return j.get<std::string>();
}

std::vector<std::string> as_labels(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array()) throw Error(fmt::format("{}: expected an array of labels", path));
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_string(j[i], fmt::format("{}[{}]", path, i)));
  return out;
}

bool tuple_fits(const BasisSpec& b, const SortWord& w, const std::vector<std::string>& labels) {
  if (labels.size() != w.size()) return false;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (!b.label_index(w[i], labels[i])) return false;
  return true;
}

}  // namespace

FrobeniusPair load_pair_string(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(fmt::format("structure file is not valid JSON: {}", e.what()));
  }
  const auto& rj = field(j, "ring", "$");
  CoefficientDomain dom = parse_domain(as_string(field(rj, "domain", "$.ring"), "$.ring.domain"));
  std::vector<VarDecl> vars;
  if (rj.contains("vars")) {
    const auto& vj = rj.at("vars");
    if (!vj.is_array()) throw Error("$.ring.vars: expected an array");
    for (std::size_t i = 0; i < vj.size(); ++i) {
      std::string p = fmt::format("$.ring.vars[{}]", i);
      VarDecl v;
      v.name = as_string(field(vj[i], "name", p), p + ".name");
      if (vj[i].contains("invertible")) {
        if (!vj[i].at("invertible").is_boolean()) throw Error(p + ".invertible: expected a boolean");
        v.invertible = vj[i].at("invertible").get<bool>();
      }
      vars.push_back(v);
    }
  }
  RingPtr ring = Ring::make(dom, vars);
  const auto& bj = field(j, "basis", "$");
  auto basis = std::make_shared<const BasisSpec>(ring, as_labels(field(bj, "A", "$.basis"), "$.basis.A"),
                                                 as_labels(field(bj, "E", "$.basis.E"), "$.basis.E"));
  std::string name = j.contains("name") ? as_string(j.at("name"), "$.name") : "pair";
  FrobeniusPair pair(name, basis);

  const auto& mj = field(j, "maps", "$");
  if (!mj.is_object()) throw Error("$.maps: expected an object");
  for (const auto& [gname, cols] : mj.items()) {
    const std::string mp = "$.maps." + gname;
    const GeneratorSig* sig = find_generator(gname);
    if (!sig) throw Error(fmt::format("{}: unknown generator {}", mp, gname));
    if (!cols.is_array()) throw Error(mp + ": expected an array of columns");
    LinMap m(basis, sig->domain, sig->codomain);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const std::string cp = fmt::format("{}[{}]", mp, c);
      auto in = as_labels(field(cols[c], "in", cp), cp + ".in");
      if (!tuple_fits(*basis, sig->domain, in))
        throw Error(fmt::format("{}: signature mismatch for {}: input tuple does not fit {}", cp, gname,
                                word_string(sig->domain)));
      const std::size_t col = basis->index_of_labels(sig->domain, in);
      const auto& outs = field(cols[c], "out", cp);
      if (!outs.is_array()) throw Error(cp + ".out: expected an array");
      for (std::size_t k = 0; k < outs.size(); ++k) {
        const std::string op = fmt::format("{}.out[{}]", cp, k);
        auto out = as_labels(field(outs[k], "basis", op), op + ".basis");
        if (!tuple_fits(*basis, sig->codomain, out))
          throw Error(fmt::format("{}: signature mismatch for {}: output tuple does not fit {}", op, gname,
                                  word_string(sig->codomain)));
        RingElem v;
        try {
          v = parse_ring_elem(as_string(field(outs[k], "coeff", op), op + ".coeff"), ring);
        } catch (const Error& e) {
          throw Error(fmt::format("{}.coeff: {}", op, e.what()));
        }
        m.add_entry(basis->index_of_labels(sig->codomain, out), col, v);
      }
    }
    try {
      pair.set(gname, std::move(m));
    } catch (const Error& e) {
      throw Error(fmt::format("{}: {}", mp, e.what()));
    }
  }
  if (j.contains("provisional")) {
    for (const auto& g : as_labels(j.at("provisional"), "$.provisional")) {
      if (!pair.has(g)) throw Error(fmt::format("$.provisional: {} is not defined", g));
      pair.mark_provisional(g);
    }
  }
  if (j.contains("meta")) {
    const auto& meta = j.at("meta");
    if (!meta.is_object()) throw Error("$.meta: expected an object");
    for (const auto& [k, v] : meta.items()) pair.meta()[k] = v.is_string() ? v.get<std::string>() : v.dump();
  }
  return pair;
}

void save_pair(const FrobeniusPair& pair, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(fmt::format("cannot write {}", path));
  f << save_pair_string(pair);
}

FrobeniusPair load_pair(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(fmt::format("cannot open {}", path));
  std::stringstream ss;
  ss << f.rdbuf();
  return load_pair_string(ss.str());
}

FrobeniusPair specialize_pair(const FrobeniusPair& pair, const Assignment& assignment, const RingPtr& target) {
  const auto& b = *pair.basis();
  auto tb = std::make_shared<const BasisSpec>(target, b.labels(Sort::A), b.labels(Sort::E));
  FrobeniusPair out(pair.name(), tb);
  for (const auto& [g, m] : pair.stored())
    out.set(g, m.map_coefficients(tb, [&](const RingElem& v) { return specialize(v, assignment, target); }));
  for (const auto& g : pair.provisional()) out.mark_provisional(g);
  out.meta() = pair.meta();
  if (!assignment.empty()) {
    std::string s;
    for (const auto& [k, v] : assignment) s += (s.empty() ? "" : ",") + k + "=" + v.to_string();
    out.meta()["specialized"] = s;
  }
  return out;
}

}  // namespace frobpair
