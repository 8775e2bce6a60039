#include "frobpair/cube.hpp"

#include "frobpair/cobordism.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <future>
#include <numeric>
#include <set>
#include <sstream>

namespace frobpair {

namespace {

std::string_view kind_name(EdgeKind k) {
  switch (k) {
    case EdgeKind::merge:
      return "merge";
    case EdgeKind::split:
      return "split";
    case EdgeKind::mobius:
      return "mobius";
  }
  return "?";
}

std::string endpoint(const std::string& edge, char bit) {
  std::string v = edge;
  std::replace(v.begin(), v.end(), '*', bit);
  return v;
}

std::size_t weight(const std::string& v) { return static_cast<std::size_t>(std::count(v.begin(), v.end(), '1')); }

// Consumed source positions (0-based) of a move.
std::vector<std::size_t> consumed(const EdgeMove& m) {
  if (m.kind == EdgeKind::merge) return {m.i - 1, m.j - 1};
  return {m.i - 1};
}

// Where each source circle lands (nullopt when consumed by the move).
std::vector<std::optional<std::size_t>> carry(const EdgeMove& m, std::size_t source_size, std::size_t target_size) {
  auto used = consumed(m);
  std::set<std::size_t> produced;
  for (auto o : m.outs) produced.insert(o - 1);
  std::vector<std::size_t> free_targets;
  for (std::size_t t = 0; t < target_size; ++t)
    if (!produced.count(t)) free_targets.push_back(t);
  std::vector<std::optional<std::size_t>> out(source_size);
  std::size_t k = 0;
  for (std::size_t s = 0; s < source_size; ++s) {
    if (std::find(used.begin(), used.end(), s) != used.end()) continue;
    if (k < free_targets.size()) out[s] = free_targets[k++];
  }
  return out;
}

std::optional<std::string> check_move(const EdgeMove& m, const SortWord& src, const SortWord& tgt) {
  const std::size_t ns = src.size(), nt = tgt.size();
  const std::size_t want_outs = m.kind == EdgeKind::split ? 2 : 1;
  if (m.outs.size() != want_outs || m.sorts.size() != want_outs)
    return fmt::format("{} needs {} output position{} and sort{}", kind_name(m.kind), want_outs,
                       want_outs == 1 ? "" : "s", want_outs == 1 ? "" : "s");
  const std::size_t want_nt = m.kind == EdgeKind::merge ? ns - 1 : m.kind == EdgeKind::split ? ns + 1 : ns;
  if (m.kind == EdgeKind::merge && ns < 2)
    return fmt::format("merge needs two circles, the source vertex has {}", ns);
  if (ns == 0) return fmt::format("{} on a vertex without circles", kind_name(m.kind));
  if (nt != want_nt)
    return fmt::format("{} takes {} circles to {}, the target vertex has {}", kind_name(m.kind), ns, want_nt, nt);
  for (auto p : consumed(m))
    if (p >= ns) return fmt::format("{}: input position {} out of range 1..{}", kind_name(m.kind), p + 1, ns);
  if (m.kind == EdgeKind::merge && m.i == m.j) return "merge of a circle with itself";
  std::set<std::size_t> seen;
  for (std::size_t k = 0; k < m.outs.size(); ++k) {
    if (m.outs[k] < 1 || m.outs[k] > nt)
      return fmt::format("{}: output position {} out of range 1..{}", kind_name(m.kind), m.outs[k], nt);
    if (!seen.insert(m.outs[k]).second) return fmt::format("{}: repeated output position", kind_name(m.kind));
    if (tgt[m.outs[k] - 1] != m.sorts[k])
      return fmt::format("{}: output {} is declared {} but the target vertex has {}", kind_name(m.kind), m.outs[k],
                         sort_letter(m.sorts[k]), sort_letter(tgt[m.outs[k] - 1]));
  }
  SortWord in;
  for (auto p : consumed(m)) in.push_back(src[p]);
  try {
    generator_for(m.kind == EdgeKind::merge ? EventKind::merge
                  : m.kind == EdgeKind::split ? EventKind::split
                                              : EventKind::mobius,
                  in, m.sorts);
  } catch (const Error& e) {
    return std::string(e.what());
  }
  auto c = carry(m, ns, nt);
  for (std::size_t s = 0; s < ns; ++s)
    if (c[s] && src[s] != tgt[*c[s]])
      return fmt::format("untouched circle {} changes sort from {} to {}", s + 1, sort_letter(src[s]),
                         sort_letter(tgt[*c[s]]));
  return std::nullopt;
}

std::string generator_of(const EdgeMove& m, const SortWord& src) {
  SortWord in;
  for (auto p : consumed(m)) in.push_back(src[p]);
  return generator_for(m.kind == EdgeKind::merge ? EventKind::merge
                       : m.kind == EdgeKind::split ? EventKind::split
                                                   : EventKind::mobius,
                       in, m.sorts);
}

}  // namespace

// ---------------------------------------------------------------------------
// Files

StateCube parse_cube_string(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(fmt::format("cube file is not valid JSON: {}", e.what()));
  }
  auto need = [](const nlohmann::json& o, const char* key, const std::string& path) -> const nlohmann::json& {
    if (!o.is_object() || !o.contains(key)) throw Error(fmt::format("{}: missing field '{}'", path, key));
    return o.at(key);
  };
  auto index = [](const nlohmann::json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<long>() < 1) throw Error(path + ": expected a positive integer");
    return static_cast<std::size_t>(v.get<long>());
  };
  auto sort_of = [](const nlohmann::json& v, const std::string& path) {
    if (!v.is_string() || (v != "A" && v != "E")) throw Error(path + ": expected \"A\" or \"E\"");
    return parse_sort(v.get<std::string>()[0]);
  };
  StateCube c;
  const auto& nj = need(j, "n", "$");
  if (!nj.is_number_integer() || nj.get<long>() < 0 || nj.get<long>() > 16)
    throw Error("$.n: expected an integer in 0..16");
  c.n = static_cast<std::size_t>(nj.get<long>());
  const auto& vj = need(j, "vertices", "$");
  if (!vj.is_object()) throw Error("$.vertices: expected an object");
  for (const auto& [key, word] : vj.items()) {
    const std::string p = "$.vertices." + key;
    if (!word.is_array()) throw Error(p + ": expected an array of sorts");
    SortWord w;
    for (std::size_t k = 0; k < word.size(); ++k) w.push_back(sort_of(word[k], fmt::format("{}[{}]", p, k)));
    c.vertices[key] = w;
  }
  if (j.contains("edges")) {
    const auto& ej = j.at("edges");
    if (!ej.is_object()) throw Error("$.edges: expected an object");
    for (const auto& [key, e] : ej.items()) {
      const std::string p = "$.edges." + key;
      EdgeMove m;
      const auto& kj = need(e, "kind", p);
      if (kj == "merge") {
        m.kind = EdgeKind::merge;
        m.i = index(need(e, "i", p), p + ".i");
        m.j = index(need(e, "j", p), p + ".j");
        m.outs = {index(need(e, "out", p), p + ".out")};
        m.sorts = {sort_of(need(e, "sort", p), p + ".sort")};
      } else if (kj == "split") {
        m.kind = EdgeKind::split;
        m.i = index(need(e, "i", p), p + ".i");
        const auto& oj = need(e, "outs", p);
        const auto& sj = need(e, "sorts", p);
        if (!oj.is_array() || oj.size() != 2) throw Error(p + ".outs: expected two positions");
        if (!sj.is_array() || sj.size() != 2) throw Error(p + ".sorts: expected two sorts");
        m.outs = {index(oj[0], p + ".outs[0]"), index(oj[1], p + ".outs[1]")};
        m.sorts = {sort_of(sj[0], p + ".sorts[0]"), sort_of(sj[1], p + ".sorts[1]")};
      } else if (kj == "mobius") {
        m.kind = EdgeKind::mobius;
        m.i = index(need(e, "i", p), p + ".i");
        m.outs = {index(need(e, "out", p), p + ".out")};
        m.sorts = {sort_of(need(e, "sort", p), p + ".sort")};
      } else {
        throw Error(p + ".kind: expected merge, split or mobius");
      }
      c.edges[key] = m;
    }
  }
  return c;
}

StateCube load_cube(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(fmt::format("cannot open {}", path));
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_cube_string(ss.str());
}

std::string save_cube_string(const StateCube& cube) {
  nlohmann::ordered_json j;
  j["n"] = cube.n;
  nlohmann::ordered_json vs = nlohmann::ordered_json::object();
  for (const auto& [k, w] : cube.vertices) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (Sort s : w) arr.push_back(std::string(1, sort_letter(s)));
    vs[k] = arr;
  }
  j["vertices"] = vs;
  nlohmann::ordered_json es = nlohmann::ordered_json::object();
  for (const auto& [k, m] : cube.edges) {
    nlohmann::ordered_json e;
    e["kind"] = kind_name(m.kind);
    e["i"] = m.i;
    if (m.kind == EdgeKind::merge) e["j"] = m.j;
    if (m.kind == EdgeKind::split) {
      e["outs"] = m.outs;
      e["sorts"] = {std::string(1, sort_letter(m.sorts[0])), std::string(1, sort_letter(m.sorts[1]))};
    } else {
      e["out"] = m.outs[0];
      e["sort"] = std::string(1, sort_letter(m.sorts[0]));
    }
    es[k] = e;
  }
  j["edges"] = es;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Validation

std::optional<std::string> validate_cube(const StateCube& cube) {
  const std::size_t nv = std::size_t{1} << cube.n;
  auto is_bits = [&](const std::string& s, bool allow_star) {
    if (s.size() != cube.n) return false;
    std::size_t stars = 0;
    for (char ch : s) {
      if (ch == '*') ++stars;
      else if (ch != '0' && ch != '1') return false;
    }
    return allow_star ? stars == 1 : stars == 0;
  };
  for (const auto& [k, w] : cube.vertices)
    if (!is_bits(k, false)) return fmt::format("vertex '{}' is not a bit string of length {}", k, cube.n);
  if (cube.vertices.size() != nv)
    return fmt::format("expected {} vertices, found {}", nv, cube.vertices.size());
  for (const auto& [k, m] : cube.edges)
    if (!is_bits(k, true)) return fmt::format("edge '{}' needs length {} with exactly one '*'", k, cube.n);
  const std::size_t ne = cube.n * (nv / 2);
  for (const auto& [v, w] : cube.vertices)
    for (std::size_t b = 0; b < cube.n; ++b) {
      if (v[b] != '0') continue;
      std::string key = v;
      key[b] = '*';
      if (!cube.edges.count(key)) return fmt::format("missing edge {}", key);
    }
  if (cube.edges.size() != ne) return fmt::format("expected {} edges, found {}", ne, cube.edges.size());
  for (const auto& [k, m] : cube.edges) {
    const auto& src = cube.vertices.at(endpoint(k, '0'));
    const auto& tgt = cube.vertices.at(endpoint(k, '1'));
    if (auto err = check_move(m, src, tgt)) return fmt::format("edge {}: {}", k, *err);
  }
  // Squares: circles untouched along both paths must end in the same place.
  for (const auto& [v, w] : cube.vertices)
    for (std::size_t a = 0; a < cube.n; ++a)
      for (std::size_t b = a + 1; b < cube.n; ++b) {
        if (v[a] != '0' || v[b] != '0') continue;
        auto path = [&](std::size_t first, std::size_t second) {
          std::string e1 = v, mid = v, e2;
          e1[first] = '*';
          mid[first] = '1';
          e2 = mid;
          e2[second] = '*';
          std::string end = mid;
          end[second] = '1';
          auto c1 = carry(cube.edges.at(e1), w.size(), cube.vertices.at(mid).size());
          auto c2 = carry(cube.edges.at(e2), cube.vertices.at(mid).size(), cube.vertices.at(end).size());
          std::vector<std::optional<std::size_t>> out(w.size());
          for (std::size_t s = 0; s < w.size(); ++s)
            if (c1[s]) out[s] = c2[*c1[s]];
          return out;
        };
        auto p1 = path(a, b), p2 = path(b, a);
        std::string end = v;
        end[a] = end[b] = '1';
        std::string sq = v;
        sq[a] = sq[b] = '*';
        const auto& ew = cube.vertices.at(end);
        for (std::size_t s = 0; s < w.size(); ++s)
          if (p1[s] && p2[s] && *p1[s] != *p2[s])
            return fmt::format("square {}: paths disagree on circle {}: it ends at position {} ({}) along one "
                               "path and {} ({}) along the other",
                               sq, s + 1, *p1[s] + 1, sort_letter(ew[*p1[s]]), *p2[s] + 1,
                               sort_letter(ew[*p2[s]]));
      }
  return std::nullopt;
}

void require_valid(const StateCube& cube) {
  if (auto err = validate_cube(cube)) throw Error(*err);
}

std::vector<std::string> vertices_of_degree(const StateCube& cube, std::size_t degree) {
  std::vector<std::string> out;
  for (const auto& [v, w] : cube.vertices)
    if (weight(v) == degree) out.push_back(v);
  return out;
}

// ---------------------------------------------------------------------------
// Differentials

LinMap edge_map(const StateCube& cube, const std::string& edge, const FrobeniusPair& pair) {
  const auto& basis = pair.basis();
  const EdgeMove& m = cube.edges.at(edge);
  const SortWord& src = cube.vertices.at(endpoint(edge, '0'));
  const SortWord& tgt = cube.vertices.at(endpoint(edge, '1'));
  auto used = consumed(m);
  // Bring the consumed circles to the front, keeping the rest in order.
  std::vector<std::size_t> perm = used;
  for (std::size_t s = 0; s < src.size(); ++s)
    if (std::find(used.begin(), used.end(), s) == used.end()) perm.push_back(s);
  SortWord front;
  for (auto p : perm) front.push_back(src[p]);
  LinMap to_front = LinMap::permutation(basis, src, perm);

  SortWord rest(front.begin() + static_cast<std::ptrdiff_t>(used.size()), front.end());
  LinMap local = embed(pair.at(generator_of(m, src)), {}, rest);

  // Produced circles sit in front; place them at their declared positions.
  std::vector<std::size_t> back(tgt.size());
  std::set<std::size_t> produced;
  for (std::size_t k = 0; k < m.outs.size(); ++k) {
    back[m.outs[k] - 1] = k;
    produced.insert(m.outs[k] - 1);
  }
  std::size_t next = m.outs.size();
  for (std::size_t t = 0; t < tgt.size(); ++t)
    if (!produced.count(t)) back[t] = next++;
  LinMap place = LinMap::permutation(basis, local.codomain(), back);
  return compose(place, compose(local, to_front));
}

RingElem BlockMap::entry(std::size_t row, std::size_t col) const {
  for (const auto& [r, v] : columns[col])
    if (r == row) return v;
  return RingElem();
}

namespace {

std::string describe(const std::vector<std::string>& vertices, const std::vector<std::size_t>& offsets,
                     const BasisPtr& basis, const StateCube& cube, std::size_t index) {
  auto it = std::upper_bound(offsets.begin(), offsets.end(), index);
  std::size_t k = static_cast<std::size_t>(it - offsets.begin()) - 1;
  const auto& v = vertices[k];
  return fmt::format("{}:{}", v, basis->tuple_string(cube.vertices.at(v), index - offsets[k]));
}

// Offsets of each vertex block and the total dimension.
std::size_t layout(const std::vector<std::string>& vertices, const StateCube& cube, const BasisPtr& basis,
                   std::vector<std::size_t>& offsets) {
  std::size_t total = 0;
  offsets.clear();
  for (const auto& v : vertices) {
    offsets.push_back(total);
    total += basis->dimension(cube.vertices.at(v));
  }
  return total;
}

void accumulate(std::vector<std::map<std::uint32_t, RingElem>>& cols, std::size_t row, std::size_t col,
                const RingElem& v) {
  auto [it, fresh] = cols[col].try_emplace(static_cast<std::uint32_t>(row), v);
  if (!fresh) it->second += v;
}

std::vector<SparseVec> finish(std::vector<std::map<std::uint32_t, RingElem>>& cols) {
  std::vector<SparseVec> out(cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (auto& [r, v] : cols[c])
      if (!v.is_zero()) out[c].emplace_back(r, std::move(v));
  return out;
}

}  // namespace

std::string BlockMap::describe_row(const BasisPtr& basis, const StateCube& cube, std::size_t row) const {
  return describe(targets, target_offset, basis, cube, row);
}

std::string BlockMap::describe_col(const BasisPtr& basis, const StateCube& cube, std::size_t col) const {
  return describe(sources, source_offset, basis, cube, col);
}

BlockMap differential(const StateCube& cube, const FrobeniusPair& pair, std::size_t i, SignRule rule) {
  require_valid(cube);
  const auto& basis = pair.basis();
  BlockMap d;
  d.sources = vertices_of_degree(cube, i);
  d.targets = vertices_of_degree(cube, i + 1);
  d.cols = layout(d.sources, cube, basis, d.source_offset);
  d.rows = layout(d.targets, cube, basis, d.target_offset);

  struct Job {
    std::size_t source, target;
    bool negative;
    std::future<LinMap> map;
  };
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < d.sources.size(); ++s) {
    const auto& v = d.sources[s];
    for (std::size_t b = 0; b < cube.n; ++b) {
      if (v[b] != '0') continue;
      std::string key = v, end = v;
      key[b] = '*';
      end[b] = '1';
      std::size_t ones = rule == SignRule::ones_before
                             ? static_cast<std::size_t>(std::count(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(b), '1'))
                             : static_cast<std::size_t>(std::count(v.begin() + static_cast<std::ptrdiff_t>(b) + 1, v.end(), '1'));
      std::size_t t = static_cast<std::size_t>(std::find(d.targets.begin(), d.targets.end(), end) - d.targets.begin());
      jobs.push_back({s, t, ones % 2 == 1,
                      std::async(std::launch::async, [&cube, &pair, key] { return edge_map(cube, key, pair); })});
    }
  }
  std::vector<std::map<std::uint32_t, RingElem>> cols(d.cols);
  for (auto& job : jobs) {
    LinMap m = job.map.get();
    for (std::size_t c = 0; c < m.cols(); ++c)
      for (const auto& [r, v] : m.column(c))
        accumulate(cols, d.target_offset[job.target] + r, d.source_offset[job.source] + c, job.negative ? -v : v);
  }
  d.columns = finish(cols);
  return d;
}

DSquaredResult check_d_squared(const StateCube& cube, const FrobeniusPair& pair, SignRule rule) {
  DSquaredResult res;
  if (cube.n < 2) return res;
  const auto& basis = pair.basis();
  BlockMap lower = differential(cube, pair, 0, rule);
  for (std::size_t i = 0; i + 1 < cube.n; ++i) {
    BlockMap upper = differential(cube, pair, i + 1, rule);
    for (std::size_t c = 0; c < lower.cols; ++c) {
      std::map<std::uint32_t, RingElem> acc;
      for (const auto& [mid, v] : lower.columns[c])
        for (const auto& [r, w] : upper.columns[mid]) {
          auto [it, fresh] = acc.try_emplace(r, v * w);
          if (!fresh) it->second += v * w;
        }
      std::string image;
      for (const auto& [r, v] : acc)
        if (!v.is_zero())
          image += fmt::format("{}{}*{}", image.empty() ? "" : " + ", v.to_string(), upper.describe_row(basis, cube, r));
      if (!image.empty()) {
        res.zero = false;
        res.degree = i;
        res.witness = fmt::format("d_{} d_{} sends {} to {}", i + 1, i, lower.describe_col(basis, cube, c), image);
        return res;
      }
    }
    lower = std::move(upper);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Linear algebra

IntMatrix identity_matrix(std::size_t n) {
  IntMatrix m(n, std::vector<mpz_class>(n, 0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) {
  const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  IntMatrix out(n, std::vector<mpz_class>(m, 0));
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].size() != k) throw Error("matrix dimensions do not match");
    for (std::size_t x = 0; x < k; ++x) {
      if (a[i][x] == 0) continue;
      for (std::size_t j = 0; j < m; ++j) out[i][j] += a[i][x] * b[x][j];
    }
  }
  return out;
}

mpz_class determinant(const IntMatrix& m0) {
  const std::size_t n = m0.size();
  for (const auto& r : m0)
    if (r.size() != n) throw Error("determinant of a non-square matrix");
  if (n == 0) return 1;
  IntMatrix m = m0;
  mpz_class prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t p = k + 1;
      while (p < n && m[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(m[k], m[p]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        mpz_class num = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        mpz_divexact(m[i][j].get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
      }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

SmithForm smith_normal_form(const IntMatrix& mat) {
  const std::size_t rows = mat.size(), cols = rows ? mat[0].size() : 0;
  for (const auto& r : mat)
    if (r.size() != cols) throw Error("matrix rows have different lengths");
  SmithForm f{mat, identity_matrix(rows), identity_matrix(cols)};
  auto& D = f.D;
  auto row_op = [&](std::size_t r, std::size_t t, const mpz_class& q) {  // row r -= q row t
    for (std::size_t c = 0; c < cols; ++c) D[r][c] -= q * D[t][c];
    for (std::size_t c = 0; c < rows; ++c) f.U[r][c] -= q * f.U[t][c];
  };
  auto col_op = [&](std::size_t c, std::size_t t, const mpz_class& q) {  // col c -= q col t
    for (std::size_t r = 0; r < rows; ++r) D[r][c] -= q * D[r][t];
    for (std::size_t r = 0; r < cols; ++r) f.V[r][c] -= q * f.V[r][t];
  };
  auto swap_rows = [&](std::size_t a, std::size_t b) {
    std::swap(D[a], D[b]);
    std::swap(f.U[a], f.U[b]);
  };
  auto swap_cols = [&](std::size_t a, std::size_t b) {
    for (auto& r : D) std::swap(r[a], r[b]);
    for (auto& r : f.V) std::swap(r[a], r[b]);
  };
  for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
    for (;;) {
      // Smallest nonzero entry of the remaining block becomes the pivot.
      std::size_t pr = rows, pc = cols;
      for (std::size_t r = t; r < rows; ++r)
        for (std::size_t c = t; c < cols; ++c)
          if (D[r][c] != 0 && (pr == rows || abs(D[r][c]) < abs(D[pr][pc]))) {
            pr = r;
            pc = c;
          }
      if (pr == rows) return f;
      swap_rows(t, pr);
      swap_cols(t, pc);
      bool clean = true;
      for (std::size_t r = t + 1; r < rows; ++r) {
        mpz_class q;
        mpz_tdiv_q(q.get_mpz_t(), D[r][t].get_mpz_t(), D[t][t].get_mpz_t());
        if (q != 0) row_op(r, t, q);
        if (D[r][t] != 0) clean = false;
      }
      for (std::size_t c = t + 1; c < cols; ++c) {
        mpz_class q;
        mpz_tdiv_q(q.get_mpz_t(), D[t][c].get_mpz_t(), D[t][t].get_mpz_t());
        if (q != 0) col_op(c, t, q);
        if (D[t][c] != 0) clean = false;
      }
      if (!clean) continue;
      // Enforce divisibility by folding an offending row into the pivot row.
      bool divides = true;
      for (std::size_t r = t + 1; r < rows && divides; ++r)
        for (std::size_t c = t + 1; c < cols; ++c)
          if (D[r][c] % D[t][t] != 0) {
            row_op(t, r, -1);
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (D[t][t] < 0) {
      for (auto& x : D[t]) x = -x;
      for (auto& x : f.U[t]) x = -x;
    }
  }
  return f;
}

IntMatrix parse_int_matrix(std::string_view text) {
  IntMatrix m;
  std::string s(text);
  auto first = s.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && s[first] == '[') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(s);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(fmt::format("matrix is not valid JSON: {}", e.what()));
    }
    if (!j.is_array()) throw Error("matrix: expected an array of rows");
    for (std::size_t r = 0; r < j.size(); ++r) {
      if (!j[r].is_array()) throw Error(fmt::format("matrix row {}: expected an array", r + 1));
      std::vector<mpz_class> row;
      for (const auto& x : j[r]) {
        if (x.is_number_integer()) row.emplace_back(x.get<long>());
        else if (x.is_string()) row.emplace_back(x.get<std::string>());
        else throw Error(fmt::format("matrix row {}: entries must be integers", r + 1));
      }
      m.push_back(std::move(row));
    }
  } else {
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) {
      if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
      std::istringstream ls(line);
      std::vector<mpz_class> row;
      for (std::string tok; ls >> tok;) {
        mpz_class v;
        if (v.set_str(tok, 10) != 0) throw Error(fmt::format("matrix row {}: '{}' is not an integer", m.size() + 1, tok));
        row.push_back(v);
      }
      if (!row.empty()) m.push_back(std::move(row));
    }
  }
  for (const auto& r : m)
    if (r.size() != m[0].size()) throw Error("matrix rows have different lengths");
  return m;
}

std::string format_int_matrix(const IntMatrix& m) {
  std::string out;
  for (const auto& r : m) {
    for (std::size_t c = 0; c < r.size(); ++c) out += (c ? " " : "") + r[c].get_str();
    out += "\n";
  }
  return out;
}

std::size_t rank_of(const std::vector<std::vector<mpq_class>>& m0, bool mod2) {
  const std::size_t rows = m0.size(), cols = rows ? m0[0].size() : 0;
  std::size_t rank = 0;
  if (mod2) {
    std::vector<std::vector<std::uint8_t>> m(rows, std::vector<std::uint8_t>(cols, 0));
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) {
        const mpq_class& x = m0[r][c];
        if (mpz_even_p(x.get_den_mpz_t())) throw Error(fmt::format("entry {} is not defined mod 2", x.get_str()));
        m[r][c] = mpz_odd_p(x.get_num_mpz_t()) ? 1 : 0;
      }
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
      std::size_t p = rank;
      while (p < rows && !m[p][c]) ++p;
      if (p == rows) continue;
      std::swap(m[p], m[rank]);
      for (std::size_t r = 0; r < rows; ++r)
        if (r != rank && m[r][c])
          for (std::size_t k = c; k < cols; ++k) m[r][k] ^= m[rank][k];
      ++rank;
    }
    return rank;
  }
  auto m = m0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t p = rank;
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[rank]);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      if (m[r][c] == 0) continue;
      mpq_class q = m[r][c] / m[rank][c];
      for (std::size_t k = c; k < cols; ++k) m[r][k] -= q * m[rank][k];
    }
    ++rank;
  }
  return rank;
}

Coefficients parse_coefficients(std::string_view s) {
  if (s == "q") return Coefficients::rationals;
  if (s == "z") return Coefficients::integers;
  if (s == "z2") return Coefficients::integers_mod_2;
  throw Error(fmt::format("unknown coefficients '{}' (use q, z or z2)", s));
}

std::string_view to_string(Coefficients c) {
  switch (c) {
    case Coefficients::rationals:
      return "q";
    case Coefficients::integers:
      return "z";
    case Coefficients::integers_mod_2:
      return "z2";
  }
  return "?";
}

std::string HomologyResult::to_text() const {
  std::string out = fmt::format("coefficients: {}\nsign rule: {}\n", to_string(coefficients), sign_rule);
  for (const auto& d : degrees) {
    out += fmt::format("H^{}: betti {}", d.degree, d.betti);
    if (!d.torsion.empty()) {
      out += ", torsion";
      for (const auto& t : d.torsion) out += " Z/" + t.get_str();
    }
    out += "\n";
  }
  return out;
}

HomologyResult homology(const StateCube& cube, const FrobeniusPair& pair, Coefficients coefficients, SignRule rule) {
  require_valid(cube);
  if (pair.ring()->domain() == CoefficientDomain::integers_mod_2 && coefficients != Coefficients::integers_mod_2)
    throw Error("a pair over Z/2 supports only z2 coefficients");
  HomologyResult res;
  res.coefficients = coefficients;
  res.sign_rule = rule == SignRule::ones_before ? "(-1)^(1-bits before the flipped index)"
                                                : "(-1)^(1-bits after the flipped index)";
  // Dense matrices of d_0 .. d_{n-1}.
  std::vector<std::vector<std::vector<mpq_class>>> mats;
  std::vector<std::size_t> dims;
  for (std::size_t i = 0; i <= cube.n; ++i) {
    std::vector<std::size_t> offs;
    dims.push_back(layout(vertices_of_degree(cube, i), cube, pair.basis(), offs));
  }
  for (std::size_t i = 0; i < cube.n; ++i) {
    BlockMap d = differential(cube, pair, i, rule);
    std::vector<std::vector<mpq_class>> m(d.rows, std::vector<mpq_class>(d.cols, 0));
    for (std::size_t c = 0; c < d.cols; ++c)
      for (const auto& [r, v] : d.columns[c]) {
        if (!v.is_constant())
          throw Error(fmt::format("specialize first: the differential has entry {} with free parameters",
                                  v.to_string()));
        m[r][c] = v.constant_value();
        if (coefficients == Coefficients::integers && m[r][c].get_den() != 1)
          throw Error(fmt::format("entry {} is not an integer; use q coefficients", m[r][c].get_str()));
      }
    mats.push_back(std::move(m));
  }
  std::vector<std::size_t> ranks;
  std::vector<std::vector<mpz_class>> torsion;
  for (const auto& m : mats) {
    if (coefficients == Coefficients::integers) {
      IntMatrix im(m.size(), std::vector<mpz_class>(m.empty() ? 0 : m[0].size()));
      for (std::size_t r = 0; r < m.size(); ++r)
        for (std::size_t c = 0; c < m[r].size(); ++c) im[r][c] = m[r][c].get_num();
      SmithForm f = smith_normal_form(im);
      std::size_t rk = 0;
      std::vector<mpz_class> tor;
      for (std::size_t k = 0; k < std::min(f.D.size(), f.D.empty() ? 0 : f.D[0].size()); ++k) {
        if (f.D[k][k] == 0) continue;
        ++rk;
        if (abs(f.D[k][k]) > 1) tor.push_back(abs(f.D[k][k]));
      }
      ranks.push_back(rk);
      torsion.push_back(std::move(tor));
    } else {
      ranks.push_back(rank_of(m, coefficients == Coefficients::integers_mod_2));
      torsion.emplace_back();
    }
  }
  for (std::size_t i = 0; i <= cube.n; ++i) {
    DegreeHomology h;
    h.degree = i;
    std::size_t out_rank = i < ranks.size() ? ranks[i] : 0;
    std::size_t in_rank = i > 0 ? ranks[i - 1] : 0;
    h.betti = dims[i] - out_rank - in_rank;
    if (i > 0) h.torsion = torsion[i - 1];
    res.degrees.push_back(std::move(h));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Random cubes

namespace {

// Circles with chord endpoints; endpoint e belongs to band e / 2.
struct BandModel {
  std::size_t bands = 0;
  std::vector<std::vector<std::size_t>> circles;  // cyclic endpoint sequences
  std::vector<bool> twisted;
};

// Each state circle is the sorted list of arcs it runs along.
using StateCircles = std::vector<std::vector<std::size_t>>;

StateCircles resolve(const BandModel& bm, std::size_t state) {
  const std::size_t ne = 2 * bm.bands;
  // Half-ends: 2e is the end before e, 2e+1 the end after e.
  std::vector<std::size_t> arc_partner(2 * ne), arc_id(2 * ne);
  std::vector<std::vector<std::size_t>> loose;  // circles without endpoints
  std::size_t arcs = 0;
  for (const auto& c : bm.circles) {
    if (c.empty()) {
      loose.push_back({arcs++});
      continue;
    }
    for (std::size_t r = 0; r < c.size(); ++r) {
      std::size_t from = 2 * c[r] + 1, to = 2 * c[(r + 1) % c.size()];
      arc_partner[from] = to;
      arc_partner[to] = from;
      arc_id[from] = arc_id[to] = arcs++;
    }
  }
  auto local = [&](std::size_t h) {
    std::size_t e = h / 2, band = e / 2;
    if (!((state >> band) & 1)) return h ^ 1;
    std::size_t other = e ^ 1;
    bool plus = h & 1;
    if (bm.twisted[band]) return 2 * other + (plus ? 1 : 0);
    return 2 * other + (plus ? 0 : 1);
  };
  StateCircles out = loose;
  std::vector<bool> seen(2 * ne, false);
  for (std::size_t start = 0; start < 2 * ne; ++start) {
    if (seen[start]) continue;
    std::vector<std::size_t> circle;
    std::size_t h = start;
    do {
      seen[h] = true;
      std::size_t a = arc_partner[h];
      seen[a] = true;
      circle.push_back(arc_id[h]);
      h = local(a);
    } while (h != start);
    std::sort(circle.begin(), circle.end());
    circle.erase(std::unique(circle.begin(), circle.end()), circle.end());
    out.push_back(std::move(circle));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string bits(std::size_t state, std::size_t n) {
  std::string s(n, '0');
  for (std::size_t b = 0; b < n; ++b)
    if ((state >> b) & 1) s[b] = '1';
  return s;
}

// Combinatorial edge move between two resolved states.
std::optional<EdgeMove> move_between(const StateCircles& src, const StateCircles& tgt) {
  std::vector<std::size_t> gone, made;
  for (std::size_t s = 0; s < src.size(); ++s)
    if (std::find(tgt.begin(), tgt.end(), src[s]) == tgt.end()) gone.push_back(s);
  for (std::size_t t = 0; t < tgt.size(); ++t)
    if (std::find(src.begin(), src.end(), tgt[t]) == src.end()) made.push_back(t);
  EdgeMove m;
  if (gone.size() == 2 && made.size() == 1) {
    m.kind = EdgeKind::merge;
    m.i = gone[0] + 1;
    m.j = gone[1] + 1;
    m.outs = {made[0] + 1};
  } else if (gone.size() == 1 && made.size() == 2) {
    m.kind = EdgeKind::split;
    m.i = gone[0] + 1;
    m.outs = {made[0] + 1, made[1] + 1};
  } else if (gone.size() == 1 && made.size() == 1) {
    m.kind = EdgeKind::mobius;
    m.i = gone[0] + 1;
    m.outs = {made[0] + 1};
  } else {
    return std::nullopt;
  }
  m.sorts.assign(m.outs.size(), Sort::A);
  return m;
}

}  // namespace

std::optional<StateCube> random_cube(std::mt19937_64& rng, const RandomCubeOptions& options) {
  const std::size_t n = options.crossings;
  const std::size_t nv = std::size_t{1} << n;
  for (std::size_t attempt = 0; attempt < options.max_attempts; ++attempt) {
    BandModel bm;
    bm.bands = n;
    std::uniform_int_distribution<std::size_t> ncirc(1, std::max<std::size_t>(1, options.max_circles));
    bm.circles.resize(ncirc(rng));
    std::uniform_int_distribution<std::size_t> pick(0, bm.circles.size() - 1);
    for (std::size_t e = 0; e < 2 * n; ++e) bm.circles[pick(rng)].push_back(e);
    for (auto& c : bm.circles) std::shuffle(c.begin(), c.end(), rng);
    std::bernoulli_distribution twist(options.twist_probability);
    for (std::size_t b = 0; b < n; ++b) bm.twisted.push_back(twist(rng));

    std::vector<StateCircles> states(nv);
    bool small = true;
    for (std::size_t s = 0; s < nv; ++s) {
      states[s] = resolve(bm, s);
      small = small && states[s].size() <= options.max_circles;
    }
    if (!small) continue;
    StateCube cube;
    cube.n = n;
    bool ok = true;
    std::map<std::string, std::pair<std::size_t, std::size_t>> edge_ends;
    for (std::size_t s = 0; s < nv && ok; ++s)
      for (std::size_t b = 0; b < n && ok; ++b) {
        if ((s >> b) & 1) continue;
        auto m = move_between(states[s], states[s | (std::size_t{1} << b)]);
        if (!m) {
          ok = false;
          break;
        }
        std::string key = bits(s, n);
        key[b] = '*';
        cube.edges[key] = *m;
        edge_ends[key] = {s, s | (std::size_t{1} << b)};
      }
    if (!ok) continue;

    // Sorts by backtracking over states in increasing order; every edge
    // into a state comes from a smaller one.
    std::vector<SortWord> words(nv);
    std::size_t budget = 20000;
    std::function<bool(std::size_t)> assign = [&](std::size_t s) -> bool {
      if (s == nv) return true;
      const std::size_t k = states[s].size();
      std::vector<std::size_t> choices(std::size_t{1} << k);
      std::iota(choices.begin(), choices.end(), 0);
      std::shuffle(choices.begin(), choices.end(), rng);
      for (std::size_t mask : choices) {
        if (budget == 0) return false;
        --budget;
        SortWord w(k);
        for (std::size_t c = 0; c < k; ++c) w[c] = (mask >> c) & 1 ? Sort::E : Sort::A;
        words[s] = w;
        bool legal = true;
        for (std::size_t b = 0; b < n && legal; ++b) {
          if (!((s >> b) & 1)) continue;
          std::size_t from = s & ~(std::size_t{1} << b);
          std::string key = bits(from, n);
          key[b] = '*';
          EdgeMove m = cube.edges.at(key);
          for (std::size_t o = 0; o < m.outs.size(); ++o) m.sorts[o] = w[m.outs[o] - 1];
          legal = !check_move(m, words[from], w);
        }
        if (legal && assign(s + 1)) return true;
      }
      return false;
    };
    if (!assign(0)) continue;
    for (std::size_t s = 0; s < nv; ++s) cube.vertices[bits(s, n)] = words[s];
    for (auto& [key, m] : cube.edges) {
      const auto& w = words[edge_ends[key].second];
      for (std::size_t o = 0; o < m.outs.size(); ++o) m.sorts[o] = w[m.outs[o] - 1];
    }
    if (!validate_cube(cube)) return cube;
  }
  return std::nullopt;
}

}  // namespace frobpair
