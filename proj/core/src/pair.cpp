#include "frobpair/pair.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>

namespace frobpair {

FrobeniusPair::FrobeniusPair(std::string name, BasisPtr basis) : name_(std::move(name)), basis_(std::move(basis)) {}

void FrobeniusPair::set(const std::string& generator, LinMap map) {
  const GeneratorSig* sig = find_generator(generator);
  if (!sig) throw Error(fmt::format("unknown generator {}", generator));
  if (generator == "beta" || generator == "gamma")
    throw Error(fmt::format("{} is derived from the counit and coproduct and cannot be set", generator));
  if (!same_basis(map.basis(), basis_) || map.domain() != sig->domain || map.codomain() != sig->codomain)
    throw Error(fmt::format("signature mismatch for {}: expected {} -> {}, got {} -> {}", generator,
                            word_string(sig->domain), word_string(sig->codomain), word_string(map.domain()),
                            word_string(map.codomain())));
  maps_.insert_or_assign(generator, std::move(map));
  refresh_derived();
}

void FrobeniusPair::erase(const std::string& generator) {
  maps_.erase(generator);
  provisional_.erase(generator);
  refresh_derived();
}

void FrobeniusPair::refresh_derived() {
  derived_.clear();
  auto eps = maps_.find("eps"), mu = maps_.find("mu_A");
  if (eps != maps_.end() && mu != maps_.end()) derived_.emplace("beta", compose(eps->second, mu->second));
  auto delta = maps_.find("Delta_A"), eta = maps_.find("eta");
  if (delta != maps_.end() && eta != maps_.end()) derived_.emplace("gamma", compose(delta->second, eta->second));
}

bool FrobeniusPair::has(std::string_view generator) const { return get(generator) != nullptr; }

const LinMap* FrobeniusPair::get(std::string_view generator) const {
  if (auto it = maps_.find(std::string(generator)); it != maps_.end()) return &it->second;
  if (auto it = derived_.find(std::string(generator)); it != derived_.end()) return &it->second;
  return nullptr;
}

const LinMap& FrobeniusPair::at(std::string_view generator) const {
  const LinMap* m = get(generator);
  if (!m) throw Error(fmt::format("missing generator {}", generator));
  return *m;
}

GeneratorLookup FrobeniusPair::lookup() const {
  return [this](std::string_view g) { return get(g); };
}

bool operator==(const FrobeniusPair& a, const FrobeniusPair& b) {
  return a.name_ == b.name_ && same_basis(a.basis_, b.basis_) && a.maps_ == b.maps_ &&
         a.provisional_ == b.provisional_ && a.meta_ == b.meta_;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::pass:
      return "pass";
    case Outcome::fail:
      return "fail";
    case Outcome::skip:
      return "skip";
  }
  return "?";
}

std::map<std::string, GroupSummary> VerifyReport::summary() const {
  std::map<std::string, GroupSummary> out;
  for (const auto& r : results) {
    auto& s = out[r.group];
    switch (r.outcome) {
      case Outcome::pass:
        ++s.pass;
        break;
      case Outcome::fail:
        ++s.fail;
        break;
      case Outcome::skip:
        ++s.skip;
        break;
    }
  }
  return out;
}

std::vector<std::string> VerifyReport::groups() const {
  std::vector<std::string> out;
  for (const auto& g : known_groups())
    if (std::any_of(results.begin(), results.end(), [&](const auto& r) { return r.group == g; })) out.push_back(g);
  for (const auto& r : results)
    if (std::find(out.begin(), out.end(), r.group) == out.end()) out.push_back(r.group);
  return out;
}

std::size_t VerifyReport::failures() const {
  return static_cast<std::size_t>(std::count_if(results.begin(), results.end(), [](const auto& r) {
    return r.outcome == Outcome::fail && r.group != quarantine_group;
  }));
}

bool VerifyReport::ok() const { return failures() == 0; }

std::set<std::string> VerifyReport::failing_groups() const {
  std::set<std::string> out;
  for (const auto& r : results)
    if (r.outcome == Outcome::fail) out.insert(r.group);
  return out;
}

std::string VerifyReport::to_text() const {
  std::string out = fmt::format("pair: {}\nmanifest version: {}\n", pair_name, manifest_version);
  if (strict_partial) out += "mode: strict-partial\n";
  out += fmt::format("{:<12} {:>5} {:>5} {:>5}\n", "group", "pass", "fail", "skip");
  auto sum = summary();
  for (const auto& g : groups()) {
    const auto& s = sum[g];
    out += fmt::format("{:<12} {:>5} {:>5} {:>5}{}\n", g, s.pass, s.fail, s.skip,
                       g == quarantine_group ? "  (not scored)" : "");
  }
  out += "\n";
  for (const auto& r : results) {
    out += fmt::format("{:<4} {} [{}, {}]", to_string(r.outcome), r.name, r.group, to_string(r.provenance));
    if (r.outcome == Outcome::skip) out += ": " + r.reason;
    out += "\n";
    if (r.witness) {
      out += fmt::format("       input {}\n", r.witness->input);
      out += fmt::format("       lhs   {}\n", r.witness->lhs);
      out += fmt::format("       rhs   {}\n", r.witness->rhs);
    }
  }
  out += fmt::format("\nresult: {} ({} scored failure{})\n", ok() ? "ok" : "FAILED", failures(),
                     failures() == 1 ? "" : "s");
  return out;
}

std::string VerifyReport::to_json() const {
  nlohmann::ordered_json j;
  j["pair"] = pair_name;
  j["manifest_version"] = manifest_version;
  j["strict_partial"] = strict_partial;
  j["ok"] = ok();
  j["failures"] = failures();
  auto sum = summary();
  nlohmann::ordered_json groups_j = nlohmann::ordered_json::object();
  for (const auto& g : groups()) {
    const auto& s = sum[g];
    groups_j[g] = {{"pass", s.pass}, {"fail", s.fail}, {"skip", s.skip}, {"scored", g != quarantine_group}};
  }
  j["groups"] = groups_j;
  nlohmann::ordered_json eqs = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json e;
    e["name"] = r.name;
    e["group"] = r.group;
    e["provenance"] = to_string(r.provenance);
    e["outcome"] = to_string(r.outcome);
    if (!r.reason.empty()) e["reason"] = r.reason;
    if (r.witness) e["witness"] = {{"input", r.witness->input}, {"lhs", r.witness->lhs}, {"rhs", r.witness->rhs}};
    eqs.push_back(std::move(e));
  }
  j["equations"] = eqs;
  return j.dump(2) + "\n";
}

namespace {

bool selected(const VerifyOptions& opt, const std::string& group) {
  return opt.groups.empty() || std::find(opt.groups.begin(), opt.groups.end(), group) != opt.groups.end();
}

}  // namespace

VerifyReport verify(const FrobeniusPair& pair, const Theory& theory, const VerifyOptions& options) {
  VerifyReport rep;
  rep.pair_name = pair.name();
  rep.manifest_version = theory.version;
  rep.strict_partial = options.strict_partial;
  auto lookup = pair.lookup();
  for (const auto& eq : theory.equations) {
    if (!selected(options, eq.group)) continue;
    EquationResult r{eq.name, eq.group, eq.provenance, Outcome::pass, std::nullopt, {}};
    const auto gens = eq.generators();
    for (const auto& g : gens) {
      if (!pair.has(g)) {
        r.outcome = Outcome::skip;
        r.reason = fmt::format("missing generator {}", g);
        break;
      }
      if (pair.provisional().count(g)) {
        if (options.strict_partial) {
          r.outcome = Outcome::skip;
          r.reason = fmt::format("provisional generator {} treated as missing", g);
          break;
        }
        if (eq.group != "consistency") {
          r.outcome = Outcome::skip;
          r.reason = fmt::format("provisional generator {} is probed only by the consistency group", g);
          break;
        }
      }
    }
    if (r.outcome != Outcome::skip) {
      LinMap lhs = evaluate_term(eq.lhs, pair.basis(), lookup);
      LinMap rhs = evaluate_term(eq.rhs, pair.basis(), lookup);
      EqualResult eqr = equal(lhs, rhs);
      if (!eqr.equal) {
        r.outcome = Outcome::fail;
        r.witness = eqr.witness;
      }
    }
    const bool stop = options.stop_at_first_failure && r.outcome == Outcome::fail && r.group != quarantine_group;
    rep.results.push_back(std::move(r));
    if (stop) break;
  }
  return rep;
}

TensorVec handle_element(const FrobeniusPair& pair) {
  LinMap h = compose(pair.at("mu_A"), compose(pair.at("Delta_A"), pair.at("eta")));
  return TensorVec{pair.basis(), {Sort::A}, h.column(0)};
}

namespace {

RingElem determinant(std::vector<std::vector<RingElem>> m, const RingPtr& ring) {
  // Laplace expansion along the first row; ranks here are tiny.
  const std::size_t n = m.size();
  if (n == 0) return RingElem(ring, 1);
  if (n == 1) return m[0][0];
  RingElem det(ring);
  for (std::size_t c = 0; c < n; ++c) {
    if (m[0][c].is_zero()) continue;
    std::vector<std::vector<RingElem>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<RingElem> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != c) row.push_back(m[r][k]);
      minor.push_back(std::move(row));
    }
    RingElem term = m[0][c] * determinant(std::move(minor), ring);
    if (c % 2) det -= term;
    else det += term;
  }
  return det;
}

}  // namespace

RingElem gram_determinant(const FrobeniusPair& pair) {
  const LinMap& beta = pair.at("beta");
  const std::size_t n = pair.basis()->rank(Sort::A);
  std::vector<std::vector<RingElem>> m(n, std::vector<RingElem>(n, RingElem(pair.ring())));
  const SortWord aa{Sort::A, Sort::A};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      std::array<std::size_t, 2> t{i, j};
      m[i][j] = beta.entry(0, pair.basis()->encode(aa, t));
    }
  return determinant(std::move(m), pair.ring());
}

}  // namespace frobpair
