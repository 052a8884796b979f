#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dioforge/cli.hpp"
#include "dioforge/diophantine.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int exit_code;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = dioforge::cli::run(args, out, err);
  return CliResult{code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

// Fresh scratch directory for cache tests.
fs::path make_scratch_dir() {
  std::random_device rd;
  const fs::path dir =
      fs::temp_directory_path() / ("dioforge-cli-test-" + std::to_string(rd()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("usage errors exit 2, help exits 0", "[cli][usage]") {
  CHECK(run_cli({}).exit_code == 2);
  CHECK(run_cli({"bogus"}).exit_code == 2);
  CHECK(run_cli({"search"}).exit_code == 2);  // missing required --a
  CHECK(run_cli({"search", "-a", "1", "--bad-flag"}).exit_code == 2);
  CHECK(run_cli({"search", "-a", "1", "-x", "5", "--x-min", "-3"}).exit_code == 2);
  CHECK(run_cli({"search", "-a", "1", "--format", "xml"}).exit_code == 2);
  CHECK(run_cli({"obstruct", "-a", "1"}).exit_code == 2);  // no alpha selector
  CHECK(run_cli({"obstruct", "-a", "1", "--alpha", "2", "--alpha-range=0:5"}).exit_code == 2);
  CHECK(run_cli({"obstruct", "-a", "1", "--alpha-range=5:0"}).exit_code == 2);
  CHECK(run_cli({"probe", "-a", "1", "-m", "1"}).exit_code == 2);
  CHECK(run_cli({"curve", "-a", "1", "-m", "0"}).exit_code == 2);

  const CliResult help = run_cli({"--help"});
  CHECK(help.exit_code == 0);
  CHECK(help.out.find("search") != std::string::npos);
  CHECK(help.out.find("obstruct") != std::string::npos);
  CHECK(help.out.find("torsion") != std::string::npos);
}

TEST_CASE("validation errors exit 2 and name the hypothesis", "[cli][usage]") {
  const CliResult bad_a = run_cli({"search", "-a", "2", "-x", "5", "-z", "5", "--no-cache"});
  CHECK(bad_a.exit_code == 2);
  CHECK(bad_a.err.find("a-class") != std::string::npos);

  const CliResult bad_d = run_cli({"obstruct", "-a", "1", "-d", "4", "--alpha", "2"});
  CHECK(bad_d.exit_code == 2);
  CHECK(bad_d.err.find("d-parity") != std::string::npos);
}

TEST_CASE("search emits JSON lines with fixed key order", "[cli][search]") {
  const CliResult res =
      run_cli({"search", "-a", "1", "-r", "3", "-x", "40", "-z", "120", "--no-cache"});
  REQUIRE(res.exit_code == 0);
  CHECK(res.out.find("{\"x\":5,\"y\":0,\"z\":-12}\n") != std::string::npos);
  CHECK(res.out.find("{\"x\":5,\"y\":0,\"z\":12}\n") != std::string::npos);
  CHECK(res.out.find("{\"x\":5,\"y\":-60,\"z\":-12}\n") != std::string::npos);
  CHECK(res.out.find("{\"x\":5,\"y\":60,\"z\":12}\n") != std::string::npos);
  CHECK(res.err.find("sieve=on") != std::string::npos);
  CHECK(res.err.find("source=fresh") != std::string::npos);

  // Every line is valid JSON whose triple really solves the equation.
  const auto params = dioforge::diophantine::make_params(1, 3, 3);
  for (const std::string& line : lines_of(res.out)) {
    const json doc = json::parse(line);
    const mpz_class x(doc["x"].get<long>()), y(doc["y"].get<long>()), z(doc["z"].get<long>());
    CHECK(dioforge::diophantine::eval_residual(params, x, y, z) == 0);
  }
}

TEST_CASE("search reports empty ranges honestly", "[cli][search]") {
  const CliResult res = run_cli({"search", "-a", "1", "-x", "10", "-z", "10", "--no-cache"});
  CHECK(res.exit_code == 0);
  CHECK(res.out.empty());
  CHECK(res.err.find("no solutions in range") != std::string::npos);
}

TEST_CASE("search csv output", "[cli][search]") {
  const CliResult res = run_cli({"search", "-a", "1", "-r", "3", "-x", "40", "-z", "120",
                                 "--format", "csv", "--no-cache"});
  REQUIRE(res.exit_code == 0);
  const auto lines = lines_of(res.out);
  REQUIRE_FALSE(lines.empty());
  CHECK(lines[0] == "x,y,z");
  CHECK(std::find(lines.begin(), lines.end(), "5,0,-12") != lines.end());
}

TEST_CASE("--b is a cross-check, not an input", "[cli][search]") {
  CHECK(run_cli({"search", "-a", "1", "-r", "3", "-b", "-19", "-x", "5", "-z", "5", "--no-cache"})
            .exit_code == 0);
  const CliResult bad =
      run_cli({"search", "-a", "1", "-r", "3", "-b", "7", "-x", "5", "-z", "5", "--no-cache"});
  CHECK(bad.exit_code == 2);
  CHECK(bad.err.find("cross-check") != std::string::npos);
}

TEST_CASE("exploratory search reaches solvable relatives", "[cli][search]") {
  const CliResult res = run_cli({"search", "-a", "13", "-r", "2", "--validation", "exploratory",
                                 "-x", "3", "-z", "10", "--no-cache"});
  REQUIRE(res.exit_code == 0);
  CHECK(res.out.find("{\"x\":2,\"y\":-10,\"z\":-7}\n") != std::string::npos);
  CHECK(res.err.find("sieve=off") != std::string::npos);
}

TEST_CASE("obstruct certifies single alpha and ranges", "[cli][obstruct]") {
  const CliResult single = run_cli({"obstruct", "-a", "1", "--alpha", "2"});
  REQUIRE(single.exit_code == 0);
  CHECK(single.out == "{\"alpha\":2,\"modulus\":4,\"case_tag\":\"EvenMod4\"}\n");
  CHECK(single.err.find("obstruct: certified=1 failures=0") != std::string::npos);

  const CliResult witness = run_cli({"obstruct", "-a", "1", "--alpha", "9"});
  REQUIRE(witness.exit_code == 0);
  CHECK(witness.out ==
        "{\"alpha\":9,\"modulus\":7,\"case_tag\":\"PrimeFactorOfAlphaMinus2\","
        "\"prime_witness\":7,\"nonresidue_witness\":3}\n");

  const CliResult range = run_cli({"obstruct", "-a", "1", "--alpha-range=-3:3"});
  REQUIRE(range.exit_code == 0);
  CHECK(lines_of(range.out).size() == 7);
  CHECK(range.err.find("certified=7 failures=0") != std::string::npos);

  const CliResult csv = run_cli({"obstruct", "-a", "1", "--alpha", "9", "--format", "csv"});
  REQUIRE(csv.exit_code == 0);
  const auto lines = lines_of(csv.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "alpha,modulus,case_tag,prime_witness,nonresidue_witness");
  CHECK(lines[1] == "9,7,PrimeFactorOfAlphaMinus2,7,3");
}

TEST_CASE("obstruct reports unprovable classes as failures with exit 3", "[cli][obstruct]") {
  const CliResult res = run_cli({"obstruct", "-a", "1", "-r", "3", "--alpha", "5"});
  CHECK(res.exit_code == 3);
  CHECK(res.out.empty());
  CHECK(res.err.find("failure at alpha=5") != std::string::npos);
  CHECK(res.err.find("certified=0 failures=1") != std::string::npos);

  // The rest of the r = 3 ladder still works.
  const CliResult ok = run_cli({"obstruct", "-a", "1", "-r", "3", "--alpha", "2"});
  CHECK(ok.exit_code == 0);
}

TEST_CASE("probe reports local solvability", "[cli][probe]") {
  const CliResult res = run_cli({"probe", "-a", "1", "-m", "36"});
  REQUIRE(res.exit_code == 0);
  CHECK(res.out == "{\"modulus\":36,\"solvable\":true}\n");

  const CliResult csv = run_cli({"probe", "-a", "1", "-m", "7", "--format", "csv"});
  REQUIRE(csv.exit_code == 0);
  const auto lines = lines_of(csv.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "modulus,solvable");
  CHECK(lines[1] == "7,true");
}

TEST_CASE("curve prints the reference model", "[cli][curve]") {
  const CliResult res = run_cli({"curve", "-a", "1", "-m", "2"});
  REQUIRE(res.exit_code == 0);
  const json doc = json::parse(res.out);
  CHECK(doc["model"] == "Y^2 = X^3 + X^2 - 9");
  CHECK(doc["a"] == "1");
  CHECK(doc["b"] == "5");
  CHECK(doc["m"] == 2);
  CHECK(doc["parity_branch"] == "even");
  CHECK(doc["genus"] == 1);
  CHECK(doc["discriminant"] == "-2151");
  CHECK(doc["squarefree"] == true);
  CHECK(doc["f"] == json::array({"-9", "0", "1", "1"}));

  const CliResult csv = run_cli({"curve", "-a", "1", "-m", "2", "--format", "csv"});
  REQUIRE(csv.exit_code == 0);
  const auto lines = lines_of(csv.out);
  CHECK(lines[0] == "key,value");
  CHECK(std::find(lines.begin(), lines.end(), "discriminant,-2151") != lines.end());
  CHECK(std::find(lines.begin(), lines.end(), "f,-9;0;1;1") != lines.end());
}

TEST_CASE("torsion reproduces the frozen report", "[cli][torsion]") {
  const CliResult res = run_cli({"torsion", "-a", "1", "-m", "2"});
  REQUIRE(res.exit_code == 0);
  const json doc = json::parse(res.out);
  CHECK(doc["verdict"] == "torsion_free");
  CHECK(doc["curve"]["discriminant"] == "-2151");
  CHECK(doc["disc_factorization"]["complete"] == true);
  CHECK(doc["disc_factorization"]["factors"] ==
        json::array({json::array({"3", 2}), json::array({"239", 1})}));
  CHECK(doc["y_values_checked"] == json::array({"0", "1", "-1", "3", "-3"}));
  CHECK(doc["candidates"].empty());

  const CliResult csv = run_cli({"torsion", "-a", "1", "-m", "2", "--format", "csv"});
  REQUIRE(csv.exit_code == 0);
  const auto lines = lines_of(csv.out);
  CHECK(lines[0] == "key,value");
  CHECK(std::find(lines.begin(), lines.end(), "verdict,torsion_free") != lines.end());
  CHECK(std::find(lines.begin(), lines.end(), "disc_factors,3^2;239^1") != lines.end());
}

TEST_CASE("table re-derives the reference rows", "[cli][table]") {
  const CliResult res = run_cli({"table"});
  REQUIRE(res.exit_code == 0);
  const json rows = json::parse(res.out);
  REQUIRE(rows.size() == 8);

  int verified = 0, erratum = 0, resolved = 0;
  for (const auto& row : rows) {
    const std::string status = row["status"].get<std::string>();
    if (status == "verified") {
      ++verified;
      CHECK(row["residual"] == "0");
      if (row.contains("search_confirmed")) CHECK(row["search_confirmed"] == true);
    } else if (status == "erratum") {
      ++erratum;
      CHECK(row["a"] == "25");
      CHECK(row["residual"] == "1188");
    } else if (status == "resolved") {
      ++resolved;
      CHECK(row["a"] == "13");
      CHECK(row["r"] == 7);
      CHECK(row["solution"] == "?");
      bool has_point = false;
      for (const auto& s : row["found"])
        if (s == "(-31, 240, -60)") has_point = true;
      CHECK(has_point);
    }
  }
  CHECK(verified == 6);
  CHECK(erratum == 1);
  CHECK(resolved == 1);

  CHECK(rows[0]["b"] == "-19");
  CHECK(rows[0]["equation"] == "x^3-y^2-z^2+xyz+19=0");
  CHECK(rows[4]["a"] == "13");
  CHECK(rows[4]["solution"] == "(5, -18, -102)");
}

TEST_CASE("table csv has the fixed header and quoting", "[cli][table]") {
  const CliResult res = run_cli({"table", "--format", "csv"});
  REQUIRE(res.exit_code == 0);
  const auto lines = lines_of(res.out);
  REQUIRE(lines.size() == 9);
  CHECK(lines[0] == "a,d,r,equation,solution,status");
  CHECK(lines[1] == "1,3,3,x^3-y^2-z^2+xyz+19=0,\"(5, 0, -12)\",verified");
  CHECK(std::find(lines.begin(), lines.end(),
                  "25,3,3,25x^3-y^2-z^2+xyz-173=0,\"(5, 0, -42)\",erratum") != lines.end());
  CHECK(std::find(lines.begin(), lines.end(),
                  "13,3,7,13x^3-y^2-z^2+xyz+2083=0,?,resolved") != lines.end());
}

TEST_CASE("search cache: fresh, replay, resume, env, no-cache", "[cli][cache]") {
  unsetenv("DIOFORGE_CACHE");
  const fs::path dir = make_scratch_dir();
  const std::vector<std::string> base = {"search", "-a", "1",  "-r",     "3",
                                         "--x-min=-20",  "--x-max=20",
                                         "--no-sieve",   "-z", "30", "--jobs", "1"};

  auto with_cache = base;
  with_cache.insert(with_cache.end(), {"--cache-dir", dir.string()});

  const CliResult fresh = run_cli(with_cache);
  REQUIRE(fresh.exit_code == 0);
  CHECK(fresh.err.find("source=fresh") != std::string::npos);
  CHECK(fresh.out.find("{\"x\":5,\"y\":0,\"z\":-12}\n") != std::string::npos);
  const fs::path cache_file = dir / "dioforge-cache.txt";
  REQUIRE(fs::exists(cache_file));

  const CliResult replay = run_cli(with_cache);
  REQUIRE(replay.exit_code == 0);
  CHECK(replay.out == fresh.out);
  CHECK(replay.err.find("source=cache") != std::string::npos);

  // Simulate an interrupted run: keep everything up to (and including) the
  // first progress record, drop the rest.  41 unsieved columns at chunk size
  // 16 means two more chunks remain.
  std::vector<std::string> kept;
  {
    std::ifstream in(cache_file);
    std::string line;
    bool cut = false;
    int progress_seen = 0;
    while (std::getline(in, line)) {
      if (cut) break;
      kept.push_back(line);
      if (line.rfind("progress ", 0) == 0 && ++progress_seen == 1) cut = true;
    }
  }
  REQUIRE(kept.size() >= 2);  // run header + at least the progress record
  {
    std::ofstream outf(cache_file, std::ios::trunc);
    for (const auto& line : kept) outf << line << "\n";
  }
  const CliResult resumed = run_cli(with_cache);
  REQUIRE(resumed.exit_code == 0);
  CHECK(resumed.out == fresh.out);
  CHECK(resumed.err.find("source=resumed") != std::string::npos);

  // After resuming, the cache is complete again.
  const CliResult replay2 = run_cli(with_cache);
  CHECK(replay2.out == fresh.out);
  CHECK(replay2.err.find("source=cache") != std::string::npos);

  // DIOFORGE_CACHE points at the same directory: replay without --cache-dir.
  setenv("DIOFORGE_CACHE", dir.string().c_str(), 1);
  const CliResult via_env = run_cli(base);
  unsetenv("DIOFORGE_CACHE");
  REQUIRE(via_env.exit_code == 0);
  CHECK(via_env.out == fresh.out);
  CHECK(via_env.err.find("source=cache") != std::string::npos);

  // --no-cache bypasses the log entirely but computes the same answer.
  auto no_cache = base;
  no_cache.push_back("--no-cache");
  setenv("DIOFORGE_CACHE", dir.string().c_str(), 1);
  const CliResult direct = run_cli(no_cache);
  unsetenv("DIOFORGE_CACHE");
  REQUIRE(direct.exit_code == 0);
  CHECK(direct.out == fresh.out);
  CHECK(direct.err.find("source=fresh") != std::string::npos);

  fs::remove_all(dir);
}

TEST_CASE("search output is independent of --jobs", "[cli][determinism]") {
  const std::vector<std::string> one = {"search", "-a", "13", "-r", "1", "-x", "30", "-z", "100",
                                        "--no-sieve", "--jobs", "1", "--no-cache"};
  std::vector<std::string> three = one;
  three[11] = "3";
  const CliResult r1 = run_cli(one);
  const CliResult r3 = run_cli(three);
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r3.exit_code == 0);
  CHECK(r1.out == r3.out);
}
