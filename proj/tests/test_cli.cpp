#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pscat/commands.hpp"
#include "pscat/errors.hpp"
#include "pscat/lattice.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("pscat_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Run run(const std::string& args, const fs::path& dir) {
  const auto err = dir / "stderr.txt";
  const std::string cmd = std::string(PSCAT_CLI_PATH) + " " + args + " > " +
                          (dir / "stdout.txt").string() + " 2> " + err.string();
  const int rc = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  std::ifstream in(err);
  std::stringstream ss;
  ss << in.rdbuf();
  r.err = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// File contents after the first line (the manifest hash comment).
std::string body(const fs::path& p) {
  const std::string s = slurp(p);
  return s.substr(s.find('\n') + 1);
}

std::size_t data_rows(const fs::path& p) {
  std::size_t n = 0;
  std::string line;
  std::ifstream in(p);
  while (std::getline(in, line)) n += !line.empty() && line[0] != '#';
  return n - 1;  // header
}

}  // namespace

TEST_CASE("spectrum writes one row per interval below X/2") {
  const auto d = scratch("spectrum");
  const auto r = run("spectrum --gamma golden --X 1000 --phi 1.5707963267948966 --out " +
                         (d / "out").string(),
                     d);
  REQUIRE(r.status == 0);
  const auto t = pscat::build_norm_table(pscat::TorusGeometry::from_spec("golden"), 1000.0);
  CHECK(data_rows(d / "out" / "eigenvalues.csv") == pscat::weyl_count(t, 500.0) - 1);
  CHECK(data_rows(d / "out" / "norms.csv") == pscat::weyl_count(t, 1000.0));
  const std::string manifest = slurp(d / "out" / "manifest.json");
  CHECK(manifest.find("\"interlacing_failures\": 0") != std::string::npos);
  const std::string first = slurp(d / "out" / "eigenvalues.csv");
  CHECK(first.rfind("# manifest_hash: ", 0) == 0);
}

TEST_CASE("identical configs give byte-identical bodies") {
  const auto d = scratch("determinism");
  REQUIRE(run("spectrum --X 600 --phi 1.1 --threads 1 --out " + (d / "a").string(), d).status == 0);
  REQUIRE(run("spectrum --X 600 --phi 1.1 --out " + (d / "b").string(), d).status == 0);
  CHECK(body(d / "a" / "eigenvalues.csv") == body(d / "b" / "eigenvalues.csv"));
  CHECK(body(d / "a" / "norms.csv") == body(d / "b" / "norms.csv"));
  // Same config, same output directory: identical files including the hash.
  const auto first = slurp(d / "a" / "eigenvalues.csv");
  REQUIRE(run("spectrum --X 600 --phi 1.1 --threads 1 --out " + (d / "a").string(), d).status == 0);
  CHECK(slurp(d / "a" / "eigenvalues.csv") == first);
}

TEST_CASE("config file and flag overrides") {
  const auto d = scratch("config");
  {
    std::ofstream cfg(d / "cfg.json");
    cfg << R"({"gamma": "sqrt2", "X": 300, "phi": 0.5})";
  }
  REQUIRE(run("spectrum --config " + (d / "cfg.json").string() + " --X 400 --out " +
                  (d / "out").string(),
              d).status == 0);
  const std::string m = slurp(d / "out" / "manifest.json");
  CHECK(m.find("\"gamma\": \"sqrt2\"") != std::string::npos);
  CHECK(m.find("\"X\": 400.0") != std::string::npos);
}

TEST_CASE("exit codes") {
  const auto d = scratch("exit");
  CHECK(run("spectrum --gamma 2 --X 100 --out " + (d / "o").string(), d).status == 2);
  CHECK(run("spectrum --phi 3.2 --X 100 --out " + (d / "o").string(), d).status == 2);
  CHECK(run("spectrum --X -5 --out " + (d / "o").string(), d).status == 2);
  {
    std::ofstream bad(d / "bad.json");
    bad << R"({"gamma": "golden", "unknown_key": 1})";
  }
  CHECK(run("spectrum --config " + (d / "bad.json").string(), d).status == 2);
  {
    std::ofstream broken(d / "broken.json");
    broken << "{ not json";
  }
  CHECK(run("spectrum --config " + (d / "broken.json").string(), d).status == 2);
  CHECK(run("oracle --X 1e6 --out " + (d / "o").string(), d).status == 2);
  CHECK(run("spectrum --X 1e12 --out " + (d / "o").string(), d).status == 2);
  CHECK(pscat::exit_code(std::make_exception_ptr(pscat::CapacityError(10, 1))) == 4);
  CHECK(pscat::exit_code(std::make_exception_ptr(pscat::BracketError(1, 2))) == 3);
  CHECK(pscat::exit_code(std::make_exception_ptr(pscat::RangeError("r"))) == 2);
}

TEST_CASE("dirichlet centre emits a non-generic warning") {
  const auto d = scratch("centre");
  const auto r = run("spectrum --mode dirichlet --z center --X 400 --out " +
                         (d / "out").string(),
                     d);
  CHECK(r.status == 0);
  CHECK(r.err.find("non-generic") != std::string::npos);
  const auto g = run("spectrum --mode dirichlet --X 400 --out " + (d / "gen").string(), d);
  CHECK(g.status == 0);
  CHECK(g.err.find("non-generic") == std::string::npos);
}

TEST_CASE("oracle command passes at a small ceiling") {
  const auto d = scratch("oracle");
  const auto r = run("oracle --X 300 --out " + (d / "out").string(), d);
  CHECK(r.status == 0);
  CHECK(fs::exists(d / "out" / "oracle.csv"));
}

TEST_CASE("stats and scars commands write their files") {
  const auto d = scratch("stats");
  REQUIRE(run("stats --X 2000 --oracle --out " + (d / "s").string(), d).status == 0);
  for (const char* f : {"paircorr.csv", "gaps.csv", "clumping.csv", "lemma_checks.json"}) {
    CHECK(fs::exists(d / "s" / f));
    CHECK(slurp(d / "s" / f).find("manifest_hash") != std::string::npos);
  }
  REQUIRE(run("scars --X 600 --out " + (d / "c").string(), d).status == 0);
  CHECK(fs::exists(d / "c" / "scar_deviation.csv"));
  CHECK(fs::exists(d / "c" / "scar_summary.json"));
  REQUIRE(run("dirichlet --X 600 --out " + (d / "r").string(), d).status == 0);
  CHECK(fs::exists(d / "r" / "dirichlet_scars.csv"));
  CHECK(fs::exists(d / "r" / "dirichlet_summary.json"));
}
