// frobpair: verify, construct and evaluate Frobenius pairs from the shell.
//
// Exit codes: 0 success, 1 a check failed, 2 bad input.

#include "frobpair/cobordism.hpp"
#include "frobpair/cube.hpp"
#include "frobpair/pair.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string_view>

namespace fp = frobpair;

namespace {

constexpr int kFailed = 1;
constexpr int kBadInput = 2;

const char* kRank2Default = "a=0,cYZ=1,dYZ=1,eY=1,eZ=1,fY=1,fZ=1";

struct PairSource {
  std::string file;
  std::string builtin;
  std::string params;
  std::string specialize;

  void add_to(CLI::App* cmd) {
    auto* f = cmd->add_option("--pair", file, "structure file (JSON)");
    auto* b = cmd->add_option("--builtin", builtin, "built-in pair")
                  ->check(CLI::IsMember({"aps", "tt", "it", "rank2", "sqrt", "double", "universal"}));
    f->excludes(b);
    cmd->add_option("--params", params, "construction parameters, KEY=VAL,...");
  }
};

fp::DoubleExponents double_exponents(const std::string& text) {
  fp::DoubleExponents e{-1, -2, -2, 1, -1, 0};
  if (text.empty()) return e;
  static const char* names[] = {"e0", "e1", "e2", "nu0", "nu1", "nu2"};
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw fp::Error(fmt::format("expected KEY=VALUE, got '{}'", item));
    std::string key = item.substr(0, eq);
    auto it = std::find(std::begin(names), std::end(names), key);
    if (it == std::end(names)) throw fp::Error(fmt::format("unknown double parameter '{}' (e0 e1 e2 nu0 nu1 nu2)", key));
    try {
      e[static_cast<std::size_t>(it - std::begin(names))] = std::stoi(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw fp::Error(fmt::format("{}: expected an integer", key));
    }
  }
  return e;
}

fp::FrobeniusPair build_builtin(const std::string& name, const std::string& params) {
  if (!params.empty() && name != "rank2" && name != "double")
    throw fp::Error(fmt::format("builtin {} takes no parameters", name));
  if (name == "aps") return fp::build_aps();
  if (name == "tt") return fp::build_tt();
  if (name == "it") return fp::build_it();
  if (name == "sqrt") return fp::build_laurent_sqrt();
  if (name == "universal") return fp::build_universal();
  if (name == "rank2") {
    auto ring = fp::Ring::make(fp::CoefficientDomain::integers);
    return fp::build_rank2(fp::Rank2Params::parse(params.empty() ? kRank2Default : params, ring));
  }
  auto alg = fp::double_test_algebra();
  return fp::build_double(alg.algebra, alg.phi_inv, double_exponents(params));
}

// "h=0,t=1": names are read first so the target ring can drop them.
fp::FrobeniusPair specialized(const fp::FrobeniusPair& pair, const std::string& text) {
  if (text.empty()) return pair;
  std::vector<std::string> names;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw fp::Error(fmt::format("expected KEY=VALUE, got '{}'", item));
    names.push_back(item.substr(0, eq));
  }
  auto target = fp::specialized_ring(pair.ring(), names);
  return fp::specialize_pair(pair, fp::parse_assignment(text, target), target);
}

fp::FrobeniusPair load(const PairSource& src) {
  fp::FrobeniusPair pair;
  if (!src.file.empty()) {
    if (!src.params.empty()) throw fp::Error("--params applies to --builtin only");
    pair = fp::load_pair(src.file);
  } else if (!src.builtin.empty()) {
    pair = build_builtin(src.builtin, src.params);
  } else {
    throw fp::Error("give --pair FILE or --builtin NAME");
  }
  return specialized(pair, src.specialize);
}

fp::Theory axioms(const std::string& path) {
  if (!path.empty()) return fp::load_theory_file(path);
  if (const char* env = std::getenv("FROBPAIR_AXIOMS"); env && *env) return fp::load_theory_file(env);
  return fp::default_theory();
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw fp::Error(fmt::format("cannot open {}", path));
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact verification of commutative Frobenius pairs with Mobius maps"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "frobpair 0.1.0");

  // verify
  PairSource vsrc;
  std::string axioms_path, groups, report = "text";
  bool strict = false;
  auto* verify = app.add_subcommand("verify", "check a pair against the axiom manifest");
  vsrc.add_to(verify);
  verify->add_option("--axioms", axioms_path, "axiom manifest (default: built in, or $FROBPAIR_AXIOMS)");
  verify->add_option("--groups", groups, "comma-separated groups to check");
  verify->add_option("--report", report, "report format")->check(CLI::IsMember({"text", "json"}));
  verify->add_flag("--strict-partial", strict, "treat provisional generators as absent");

  // construct
  PairSource csrc;
  std::string out_path;
  auto* construct = app.add_subcommand("construct", "write a built-in pair as a structure file");
  construct->add_option("--builtin", csrc.builtin, "built-in pair")
      ->required()
      ->check(CLI::IsMember({"aps", "tt", "it", "rank2", "sqrt", "double", "universal"}));
  construct->add_option("--params", csrc.params, "construction parameters, KEY=VAL,...");
  construct->add_option("-o,--output", out_path, "output file (default: stdout)");

  // eval
  PairSource esrc;
  std::string cob_path;
  auto* eval = app.add_subcommand("eval", "evaluate a cobordism word");
  esrc.add_to(eval);
  eval->add_option("--specialize", esrc.specialize, "substitute parameters, KEY=VAL,...");
  eval->add_option("cobordism", cob_path, "cobordism file")->required();

  // diamond
  PairSource dsrc;
  std::string dreport = "text";
  auto* diamond = app.add_subcommand("diamond", "compare both orders of every pair of saddles");
  dsrc.add_to(diamond);
  diamond->add_option("--report", dreport, "report format")->check(CLI::IsMember({"text", "json"}));

  // cube
  PairSource qsrc;
  std::string cube_path, coeff = "q";
  auto* cube = app.add_subcommand("cube", "d^2 check and homology of a state cube");
  qsrc.add_to(cube);
  cube->add_option("--specialize", qsrc.specialize, "substitute parameters, KEY=VAL,...");
  cube->add_option("--coeff", coeff, "coefficients")->check(CLI::IsMember({"q", "z", "z2"}));
  cube->add_option("cube", cube_path, "cube file (JSON)")->required();

  // degree
  std::vector<std::string> poles;
  auto* degree = app.add_subcommand("degree", "pole degrees of virtual circles");
  degree->add_option("poles", poles, "one pole word per component over {+,-}");

  // snf
  std::string matrix_path;
  auto* snf = app.add_subcommand("snf", "Smith normal form of an integer matrix");
  snf->add_option("matrix", matrix_path, "whitespace rows or a JSON array of rows")->required();

  // Pole words such as "++" or "-+" collide with CLI11 syntax, so degree
  // reads its arguments as they are.
  if (argc >= 2 && std::string_view(argv[1]) == "degree") {
    bool help = false;
    for (int k = 2; k < argc; ++k) {
      std::string_view a = argv[k];
      if (a == "-h" || a == "--help") help = true;
      else if (a != "--" || k != 2) poles.emplace_back(a);
    }
    if (!help) {
      try {
        std::vector<fp::PoleWord> comps;
        for (const auto& p : poles) comps.push_back(fp::parse_poles(p));
        for (const auto& c : comps) std::cout << fp::pole_degree(c) << " ";
        std::size_t total = fp::total_degree(comps);
        std::cout << fmt::format("total={} {}\n", total, total > 0 ? "essential" : "inessential");
        return 0;
      } catch (const fp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadInput;
      }
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  try {
    if (*verify) {
      fp::Theory theory = axioms(axioms_path);
      fp::FrobeniusPair pair = load(vsrc);
      fp::VerifyOptions opt;
      opt.groups = split_list(groups);
      for (const auto& g : opt.groups) {
        const auto& known = fp::known_groups();
        if (std::find(known.begin(), known.end(), g) == known.end())
          throw fp::Error(fmt::format("unknown group '{}'", g));
      }
      opt.strict_partial = strict;
      auto rep = fp::verify(pair, theory, opt);
      std::cout << (report == "json" ? rep.to_json() : rep.to_text());
      return rep.ok() ? 0 : kFailed;
    }
    if (*construct) {
      std::string text = fp::save_pair_string(build_builtin(csrc.builtin, csrc.params));
      if (out_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream f(out_path);
        if (!f) throw fp::Error(fmt::format("cannot write {}", out_path));
        f << text;
      }
      return 0;
    }
    if (*eval) {
      fp::FrobeniusPair pair = load(esrc);
      fp::CobordismWord w = fp::load_cobordism(cob_path);
      fp::LinMap m = fp::evaluate(w, pair);
      if (m.domain().empty() && m.codomain().empty()) {
        std::cout << m.entry(0, 0).to_string() << "\n";
      } else {
        std::cout << m.to_string();
      }
      return 0;
    }
    if (*diamond) {
      auto rep = fp::diamond_exchange_suite(load(dsrc));
      std::cout << (dreport == "json" ? rep.to_json() : rep.to_text());
      return rep.ok() ? 0 : kFailed;
    }
    if (*cube) {
      fp::FrobeniusPair pair = load(qsrc);
      fp::StateCube c = fp::load_cube(cube_path);
      fp::require_valid(c);
      auto d2 = fp::check_d_squared(c, pair);
      if (!d2.zero) {
        std::cout << "d^2 = 0: no\n" << d2.witness << "\n";
        return kFailed;
      }
      auto h = fp::homology(c, pair, fp::parse_coefficients(coeff));
      std::cout << "d^2 = 0: yes\n" << h.to_text() << "betti:";
      for (const auto& d : h.degrees) std::cout << " " << d.betti;
      std::cout << "\n";
      return 0;
    }
    if (*snf) {
      fp::IntMatrix m = fp::parse_int_matrix(read_file(matrix_path));
      auto f = fp::smith_normal_form(m);
      std::cout << "D\n" << fp::format_int_matrix(f.D) << "U\n" << fp::format_int_matrix(f.U) << "V\n"
                << fp::format_int_matrix(f.V);
      return 0;
    }
  } catch (const fp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  }
  return kBadInput;
}
