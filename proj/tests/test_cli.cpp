#include "support.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + (env.empty() ? "" : " ") + "'" FROBPAIR_CLI "' " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& rel) { return "'" + fptest::data_path(rel) + "'"; }

std::string golden(const std::string& name) {
  std::ifstream f(std::string(FROBPAIR_GOLDEN) + "/" + name);
  REQUIRE(f);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("verify exit codes and reports", "[cli]") {
  auto aps = run("verify --builtin aps");
  CHECK(aps.code == 0);
  CHECK(aps.out == golden("verify_aps.txt"));

  auto it = run("verify --builtin it");
  CHECK(it.code == 1);
  CHECK(it.out == golden("verify_it.txt"));

  auto itj = run("verify --builtin it --report json");
  CHECK(itj.code == 1);
  auto j = nlohmann::json::parse(itj.out);
  for (const auto& [group, s] : j["groups"].items())
    if (group != "consistency" && s["scored"].get<bool>()) CHECK(s["fail"] == 0);
  CHECK(j["groups"]["consistency"]["fail"].get<int>() > 0);

  CHECK(run("verify --builtin rank2 --params a=0,cYZ=1,dYZ=1,eY=1,eZ=1,fY=1,fZ=1").code == 0);
  CHECK(run("verify --builtin rank2 --params a=0,eY=1,fY=1").code == 1);
  CHECK(run("verify --builtin it --strict-partial").code == 0);
  CHECK(run("verify --pair " + data("pairs/tt.json") + " --groups frobA,mobius").code == 0);
}

TEST_CASE("bad input exits with 2", "[cli]") {
  CHECK(run("verify --pair /nonexistent/pair.json").code == 2);
  CHECK(run("verify --builtin nope").code == 2);
  CHECK(run("verify --builtin aps --groups nope").code == 2);
  CHECK(run("verify --builtin aps --params a=1").code == 2);
  CHECK(run("eval --builtin aps /nonexistent.cob").code == 2);
  CHECK(run("degree +").code == 2);
  CHECK(run("").code == 2);
}

TEST_CASE("reports are deterministic", "[cli]") {
  auto a = run("verify --builtin aps --report json");
  auto b = run("verify --builtin aps --report json");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == golden("verify_aps.json"));
  CHECK(run("diamond --builtin it").out == golden("diamond_it.txt"));
}

TEST_CASE("other subcommands", "[cli]") {
  auto d = run("degree +- ++");
  CHECK(d.code == 0);
  CHECK(d.out == "1 0 total=1 essential\n");
  CHECK(run("degree").out == "total=0 inessential\n");

  auto e = run("eval --pair " + data("pairs/aps.json") + " " + data("cobordisms/torus.cob"));
  CHECK(e.code == 0);
  CHECK(e.out == "2\n");
  auto u = run("eval --builtin universal --specialize h=0,t=0 " + data("cobordisms/torus.cob"));
  CHECK(u.out == "2\n");

  auto c = run("cube --pair " + data("pairs/aps.json") + " " + data("cubes/split1.json") + " --coeff q");
  CHECK(c.code == 0);
  CHECK(c.out == golden("cube_split1.txt"));
  CHECK(run("cube --builtin it " + data("cubes/chain_essential.json")).code == 1);
  CHECK(run("cube --builtin universal " + data("cubes/split1.json")).code == 2);

  auto s = run("snf " + data("matrices/diag_2_3.txt"));
  CHECK(s.code == 0);
  CHECK(s.out == golden("snf_diag_2_3.txt"));

  CHECK(run("diamond --builtin aps").code == 0);
  CHECK(run("diamond --builtin it").code == 1);

  auto con = run("construct --builtin aps");
  CHECK(con.code == 0);
  std::ifstream f(fptest::data_path("pairs/aps.json"));
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(con.out == ss.str());
}

TEST_CASE("FROBPAIR_AXIOMS overrides the manifest", "[cli]") {
  auto tmp = std::filesystem::temp_directory_path() / "frobpair_axioms_override.eq";
  {
    std::ofstream f(tmp);
    f << "version 7\neq assoc_only [frobA]: (mu_A (x) id_A) ; mu_A == (id_A (x) mu_A) ; mu_A\n";
  }
  auto r = run("verify --builtin aps --report json", "FROBPAIR_AXIOMS='" + tmp.string() + "'");
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["manifest_version"] == 7);
  CHECK(j["groups"]["frobA"]["pass"] == 1);
  std::filesystem::remove(tmp);
}
