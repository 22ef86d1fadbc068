#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "resub/cli.hpp"
#include "resub/models.hpp"
#include "support/fixtures.hpp"

using namespace resub;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  auto* co = std::cout.rdbuf(out.rdbuf());
  auto* ce = std::cerr.rdbuf(err.rdbuf());
  int code = run_cli(args);
  std::cout.rdbuf(co);
  std::cerr.rdbuf(ce);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("resub_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

struct EnvGuard {
  std::string name;
  explicit EnvGuard(const std::string& n, const std::string& value) : name(n) {
    ::setenv(name.c_str(), value.c_str(), 1);
  }
  ~EnvGuard() { ::unsetenv(name.c_str()); }
};

json slurp_json(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  json j;
  in >> j;
  return j;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

void write_instance(const Instance& inst, const std::string& path) {
  write_file(path, inst.to_json().dump(2) + "\n");
}

// Two nodes, one rigid arc: every assignment leaves imbalance 2, so any
// stage-2 cap below that is provably infeasible.
Instance make_rigid() {
  InstanceData d;
  d.nodes = {"u", "v"};
  d.resources = {"r1"};
  d.schedulers = {{"s1", {"u", "v"}}};
  d.arcs = {fixtures::arc("a1", "u", "v", "r1", {"r1"})};
  return Instance::from_data(std::move(d));
}

std::vector<std::string> gen_args(const TempDir& dir, const std::string& name, uint64_t seed) {
  return {"gen",     "--nodes", "6",      "--arcs",  "12",
          "--resources", "4",   "--schedulers", "2", "--seed",
          std::to_string(seed), "--out",  dir.file(name)};
}

}  // namespace

TEST_CASE("usage and input errors exit with code 1") {
  CHECK(run({}).code == 1);
  CHECK(run({"conquer"}).code == 1);
  CHECK(run({"solve"}).code == 1);  // --instance is required

  TempDir dir;
  Instance d1 = fixtures::make_d1();
  write_instance(d1, dir.file("d1.json"));

  CliResult no_istar = run({"solve", "--instance", dir.file("d1.json"), "--model",
                            "stage2-efficient", "--out", dir.file("s.json")});
  CHECK(no_istar.code == 1);
  CHECK(no_istar.err.find("--istar") != std::string::npos);

  CliResult both = run({"solve", "--instance", dir.file("d1.json"), "--model", "stage2-efficient",
                        "--istar", "0", "--istar-file", dir.file("d1.json"), "--out",
                        dir.file("s.json")});
  CHECK(both.code == 1);
  CHECK(both.err.find("not both") != std::string::npos);

  CHECK(run({"solve", "--instance", dir.file("absent.json")}).code == 1);
  CHECK(run({"solve", "--instance", dir.file("d1.json"), "--model", "stage0"}).code == 1);
  CHECK(run({"sweep", "--instance", dir.file("d1.json"), "--istar", "0"}).code == 1);
  CHECK(run({"sweep", "--instance", dir.file("d1.json"), "--istar", "0", "--alphas", "0",
             "--omegas", "0"})
            .code == 1);
  CHECK(run({"gen", "--nodes", "8", "--arcs", "4", "--out", dir.file("x.json")}).code == 1);
}

TEST_CASE("generate then solve both stages through artifacts") {
  TempDir dir;
  CliResult g = run(gen_args(dir, "inst.json", 3));
  REQUIRE(g.code == 0);
  CHECK(g.out.find("wrote") != std::string::npos);

  json inst = slurp_json(dir.file("inst.json"));
  CHECK(inst.at("meta").at("config").at("hash").is_string());
  CHECK(inst.at("meta").at("generator").at("seed") == 3);

  CliResult s1 = run({"solve", "--instance", dir.file("inst.json"), "--model", "stage1", "--out",
                      dir.file("s1.json")});
  REQUIRE(s1.code == 0);
  CHECK(s1.out.find("status=optimal") != std::string::npos);
  json a1 = slurp_json(dir.file("s1.json"));
  CHECK(a1.at("status") == "optimal");
  CHECK(a1.at("istar").is_number());
  CHECK(a1.at("fingerprint").is_string());
  CHECK(a1.at("_config").at("seed") == 1);
  int64_t istar = a1.at("istar").get<int64_t>();

  CliResult s2 = run({"solve", "--instance", dir.file("inst.json"), "--model", "stage2-efficient",
                      "--istar-file", dir.file("s1.json"), "--out", dir.file("s2.json")});
  REQUIRE(s2.code == 0);
  json a2 = slurp_json(dir.file("s2.json"));
  CHECK(a2.at("imbalance_cap") == istar);
  CHECK(a2.at("objective").at("imbalance").get<int64_t>() <= istar);
  CHECK(a2.at("objective").at("changes").get<int64_t>() >= 0);

  // --kind is an alias for --model
  CHECK(run({"solve", "--instance", dir.file("inst.json"), "--kind", "stage2-minimax",
             "--istar-file", dir.file("s1.json"), "--out", dir.file("s3.json")})
            .code == 0);
  CHECK(run({"solve", "--instance", dir.file("inst.json"), "--model", "stage2-weighted",
             "--alpha", "0.25", "--istar", std::to_string(istar), "--out", dir.file("s4.json")})
            .code == 0);
  CHECK(run({"solve", "--instance", dir.file("inst.json"), "--model", "stage2-gini", "--omega",
             "0.5", "--istar", std::to_string(istar), "--backend", "ils", "--out",
             dir.file("s5.json")})
            .code == 0);
}

TEST_CASE("stage 2 refuses an istar artifact from different candidate sets") {
  TempDir dir;
  REQUIRE(run(gen_args(dir, "inst.json", 5)).code == 0);
  REQUIRE(run({"solve", "--instance", dir.file("inst.json"), "--model", "stage1", "--out",
               dir.file("s1_full.json")})
              .code == 0);

  Instance inst = Instance::load_file(dir.file("inst.json"));
  CandidateSets frozen(inst.num_arcs());
  for (int32_t a = 0; a < inst.num_arcs(); ++a) frozen[a] = {inst.arcs()[a].initial};
  write_file(dir.file("frozen.json"), candidates_to_json(inst, frozen).dump(2) + "\n");

  CliResult bad = run({"solve", "--instance", dir.file("inst.json"), "--model",
                       "stage2-efficient", "--istar-file", dir.file("s1_full.json"),
                       "--candidates", dir.file("frozen.json"), "--out", dir.file("bad.json")});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("fingerprint mismatch") != std::string::npos);

  // stage 1 solved on the same frozen sets is accepted, and freezing every arc
  // at its current resource makes the zero-change plan the only option
  REQUIRE(run({"solve", "--instance", dir.file("inst.json"), "--model", "stage1", "--candidates",
               dir.file("frozen.json"), "--out", dir.file("s1_frozen.json")})
              .code == 0);
  CliResult ok = run({"solve", "--instance", dir.file("inst.json"), "--model", "stage2-efficient",
                      "--istar-file", dir.file("s1_frozen.json"), "--candidates",
                      dir.file("frozen.json"), "--out", dir.file("ok.json")});
  CHECK(ok.code == 0);
  CHECK(slurp_json(dir.file("ok.json")).at("objective").at("changes") == 0);
}

TEST_CASE("repeated runs are byte-identical up to wall times") {
  TempDir dir;
  REQUIRE(run(gen_args(dir, "inst.json", 11)).code == 0);

  auto solve_to = [&](const std::string& out) {
    return run({"solve", "--instance", dir.file("inst.json"), "--model", "stage1", "--seed", "9",
                "--out", dir.file(out)});
  };
  REQUIRE(solve_to("one.json").code == 0);
  REQUIRE(solve_to("two.json").code == 0);
  json one = slurp_json(dir.file("one.json"));
  json two = slurp_json(dir.file("two.json"));
  one.erase("wall_ms");
  two.erase("wall_ms");
  CHECK(one == two);

  auto pool_to = [&](const std::string& sub) {
    return run({"gen", "--nodes", "4", "--arcs", "7", "--resources", "3", "--schedulers", "2",
                "--seed", "21", "--pool", "2", "--alternates", "1", "--out-dir", dir.file(sub)});
  };
  REQUIRE(pool_to("pa").code == 0);
  REQUIRE(pool_to("pb").code == 0);
  for (const char* name : {"manifest.csv", "refs.csv", "week01.json", "week02.json",
                           "week01_ref1.json", "week02_ref1.json"})
    CHECK(slurp(dir.file(std::string("pa/") + name)) == slurp(dir.file(std::string("pb/") + name)));
}

TEST_CASE("portfolio pipeline writes the full artifact set") {
  TempDir dir;
  write_instance(fixtures::make_d1(), dir.file("d1.json"));
  CliResult r = run({"portfolio", "--instance", dir.file("d1.json"), "--alphas", "0,1",
                     "--levels", "0,0.5,1", "--out-dir", dir.file("pf")});
  REQUIRE(r.code == 0);

  json s1 = slurp_json(dir.file("pf/stage1.json"));
  CHECK(s1.at("istar") == 0);

  json pf = slurp_json(dir.file("pf/portfolio.json"));
  CHECK(pf.at("istar") == 0);
  REQUIRE(pf.at("entries").size() == 4);  // efficient, minimax, alpha=0, alpha=1
  CHECK(pf.at("front").size() >= 1);
  for (const json& e : pf.at("entries")) CHECK(e.at("status") == "optimal");

  std::string entries = slurp(dir.file("pf/entries.csv"));
  CHECK(entries.find("# config=") == 0);
  CHECK(entries.find("efficient,optimal,0,1,1,") != std::string::npos);
  CHECK(entries.find("minimax,optimal,0,1,1,") != std::string::npos);

  std::string summary = slurp(dir.file("pf/summary.csv"));
  CHECK(summary.find("istar,delta_efficient") != std::string::npos);
  CHECK(summary.find("\n0,1,1,1,1,0.0000,0.0000,") != std::string::npos);

  std::string curves = slurp(dir.file("pf/curves.csv"));
  CHECK(curves.find("efficient,0,4") != std::string::npos);
  CHECK(curves.find("efficient,0.5,0") != std::string::npos);
  CHECK(curves.find("efficient,1,0") != std::string::npos);
  CHECK(curves.find("minimax,0,4") != std::string::npos);

  std::string alpha_curve = slurp(dir.file("pf/alpha_curve.csv"));
  CHECK(alpha_curve.find("alpha,changes,max_burden") != std::string::npos);
  CHECK(alpha_curve.find("\n0,1,1,") != std::string::npos);
  CHECK(alpha_curve.find("\n1,1,1,") != std::string::npos);
}

TEST_CASE("a cap below the structural floor exits with code 2") {
  TempDir dir;
  write_instance(make_rigid(), dir.file("rigid.json"));
  CliResult r = run({"solve", "--instance", dir.file("rigid.json"), "--model", "stage2-efficient",
                     "--istar", "0", "--out", dir.file("s.json")});
  CHECK(r.code == 2);
  CHECK(r.out.find("status=infeasible") != std::string::npos);
  CHECK(slurp_json(dir.file("s.json")).at("status") == "infeasible");

  // stage 1 on the same instance is fine: imbalance 2 is simply the optimum
  CliResult s1 = run({"solve", "--instance", dir.file("rigid.json"), "--model", "stage1", "--out",
                      dir.file("s1.json")});
  CHECK(s1.code == 0);
  CHECK(slurp_json(dir.file("s1.json")).at("istar") == 2);
}

TEST_CASE("relative outputs land under RESUB_OUT_DIR") {
  TempDir dir;
  {
    EnvGuard env("RESUB_OUT_DIR", dir.path.string());
    REQUIRE(run({"gen", "--nodes", "6", "--arcs", "12", "--resources", "4", "--schedulers", "2",
                 "--seed", "8", "--out", "nested/inst.json"})
                .code == 0);
    CHECK(fs::exists(dir.path / "nested/inst.json"));

    // absolute paths are taken as-is
    REQUIRE(run(gen_args(dir, "abs.json", 8)).code == 0);
    CHECK(fs::exists(dir.path / "abs.json"));
  }
  CHECK(std::getenv("RESUB_OUT_DIR") == nullptr);
}

TEST_CASE("betweenness subcommand writes a tagged kappa table") {
  TempDir dir;
  REQUIRE(run(gen_args(dir, "inst.json", 13)).code == 0);
  CliResult r = run({"betweenness", "--instance", dir.file("inst.json"), "--kappas", "1,2,3",
                     "--out", dir.file("bc.csv")});
  REQUIRE(r.code == 0);

  std::istringstream body(slurp(dir.file("bc.csv")));
  std::string line;
  REQUIRE(std::getline(body, line));
  CHECK(line.rfind("# config=", 0) == 0);
  REQUIRE(std::getline(body, line));
  CHECK(line == "arc_id,betweenness,class,kappa");
  int rows = 0;
  while (std::getline(body, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 12);
}

TEST_CASE("train score solve chain runs on a generated pool") {
  TempDir dir;
  REQUIRE(run({"gen", "--nodes", "5", "--arcs", "9", "--resources", "4", "--schedulers", "2",
               "--seed", "40", "--pool", "3", "--alternates", "1", "--out-dir", dir.file("pool")})
              .code == 0);

  CliResult t = run({"train", "--refs", dir.file("pool/refs.csv"), "--seed", "2", "--epochs", "3",
                     "--hidden", "8", "--embedding-dim", "2", "--batch", "8", "--out",
                     dir.file("model.json")});
  REQUIRE(t.code == 0);
  CHECK(t.out.find("training set:") != std::string::npos);
  json model = slurp_json(dir.file("model.json"));
  CHECK(model.at("meta").at("config").at("hash").is_string());
  CHECK(model.at("meta").at("test_top_kappa").is_object());
  CHECK(model.at("meta").at("baseline_test_top_kappa").is_object());

  CliResult sc = run({"score", "--instance", dir.file("pool/week01.json"), "--scorer",
                      dir.file("model.json"), "--kappas", "1,2,3", "--out",
                      dir.file("cands.json"), "--kappa-csv", dir.file("kappa.csv")});
  REQUIRE(sc.code == 0);
  json cands = slurp_json(dir.file("cands.json"));
  CHECK(cands.at("pairs_after").get<int64_t>() <= cands.at("pairs_before").get<int64_t>());
  CHECK(cands.at("fingerprint").is_string());
  CHECK(fs::exists(dir.file("kappa.csv")));

  Instance inst = Instance::load_file(dir.file("pool/week01.json"));
  CandidateSets parsed = candidates_from_json(inst, cands.at("candidates"));
  for (int32_t a = 0; a < inst.num_arcs(); ++a)
    CHECK(std::find(parsed[a].begin(), parsed[a].end(), inst.arcs()[a].initial) !=
          parsed[a].end());

  REQUIRE(run({"solve", "--instance", dir.file("pool/week01.json"), "--model", "stage1",
               "--candidates", dir.file("cands.json"), "--out", dir.file("s1.json")})
              .code == 0);
  CHECK(slurp_json(dir.file("s1.json")).at("status") == "optimal");
}

TEST_CASE("sweep and export-lp round out the toolchain") {
  TempDir dir;
  write_instance(fixtures::make_e1(), dir.file("e1.json"));
  REQUIRE(run({"solve", "--instance", dir.file("e1.json"), "--model", "stage1", "--out",
               dir.file("s1.json")})
              .code == 0);

  CliResult sw = run({"sweep", "--instance", dir.file("e1.json"), "--istar-file",
                      dir.file("s1.json"), "--alphas", "0,0.5,1", "--out", dir.file("pf.json"),
                      "--report", dir.file("pf.csv")});
  REQUIRE(sw.code == 0);
  json pf = slurp_json(dir.file("pf.json"));
  CHECK(pf.at("entries").size() == 3);
  CHECK(pf.at("istar") == 0);
  CHECK(slurp(dir.file("pf.csv")).find("label,status") != std::string::npos);

  CliResult lp = run({"export-lp", "--instance", dir.file("e1.json"), "--model",
                      "stage2-minimax", "--istar", "0", "--out", dir.file("m.lp")});
  REQUIRE(lp.code == 0);
  std::string text = slurp(dir.file("m.lp"));
  CHECK(text.rfind("\\ config=", 0) == 0);
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("imbalance_cap") != std::string::npos);
  CHECK(text.find("Binaries") != std::string::npos);
}

TEST_CASE("built binary reports the same exit codes across a process boundary") {
#ifdef RESUB_CLI_PATH
  const char* cli = RESUB_CLI_PATH;
#else
  const char* cli = std::getenv("RESUB_CLI_PATH");
#endif
  REQUIRE(cli != nullptr);
  REQUIRE(fs::exists(cli));
  TempDir dir;

  auto shell = [&](const std::string& args) {
    int st = std::system((std::string(cli) + " " + args + " > /dev/null 2>&1").c_str());
    REQUIRE(st != -1);
    REQUIRE(WIFEXITED(st));
    return WEXITSTATUS(st);
  };

  CHECK(shell("--help") == 0);
  CHECK(shell("conquer") == 1);
  CHECK(shell("solve --instance " + dir.file("absent.json")) == 1);

  CHECK(shell("gen --nodes 6 --arcs 12 --resources 4 --schedulers 2 --seed 3 --out " +
              dir.file("inst.json")) == 0);
  CHECK(fs::exists(dir.file("inst.json")));
  CHECK(shell("solve --instance " + dir.file("inst.json") + " --model stage1 --out " +
              dir.file("s1.json")) == 0);

  write_instance(make_rigid(), dir.file("rigid.json"));
  CHECK(shell("solve --instance " + dir.file("rigid.json") +
              " --model stage2-efficient --istar 0 --out " + dir.file("s2.json")) == 2);
}
