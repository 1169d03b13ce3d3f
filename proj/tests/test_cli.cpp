#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

using json = nlohmann::json;

namespace {

std::string cli_path() {
  const char* p = std::getenv("FRACLAP_CLI");
  REQUIRE(p != nullptr);
  return p;
}

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  std::string cmd = cli_path() + " " + args + " 2>/dev/null";
  std::array<char, 4096> buf{};
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    r.out.append(buf.data(), got);
  int status = pclose(pipe);
  r.code = WEXITSTATUS(status);
  return r;
}

}  // namespace

TEST_CASE("eval: master value, exit codes") {
  RunResult r = run("eval --d 1 --alpha 1 --fn gaussian --x 0 --def I --out json");
  CHECK(r.code == 0);
  json doc = json::parse(r.out);
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["params"]["d"] == 1);
  double v = doc["results"][0]["value"].get<double>();
  CHECK(std::abs(v - (-1.1283791671)) < 1e-4);
  CHECK(doc["results"][0]["status"] == "converged");
}

TEST_CASE("eval: usage errors name the valid ranges") {
  RunResult r = run("eval --d 1 --alpha 2.5 --fn gaussian --x 0");
  CHECK(r.code == 1);
  RunResult r2 = run("eval --d 7 --alpha 1 --fn gaussian --x 0");
  CHECK(r2.code == 1);
  RunResult r3 = run("eval --d 1 --alpha 1 --fn not_a_function --x 0");
  CHECK(r3.code == 1);
  RunResult r4 = run("eval --d 1 --alpha 1 --fn gaussian --x 0 --def XX");
  CHECK(r4.code == 1);
}

TEST_CASE("eval: non-convergence exit code on the Dynkin counterexample") {
  RunResult r = run("eval --d 1 --alpha 1 --fn path_I_not_D --x 0 --def D --out json");
  CHECK(r.code == 2);
  json doc = json::parse(r.out);
  CHECK(doc["results"][0]["status"] == "not_converged");
}

TEST_CASE("eval csv: convergence table columns") {
  RunResult r = run("eval --d 1 --alpha 1 --fn gaussian --x 0 --def I --out csv");
  CHECK(r.code == 0);
  CHECK(r.out.find("method,h,value,extrapolated,order") != std::string::npos);
  CHECK(r.out.find("I,1,") != std::string::npos);
}

TEST_CASE("audit passes on two grid points") {
  CHECK(run("audit --d 1 --alpha 1 --out json").code == 0);
  CHECK(run("audit --d 2 --alpha 0.5 --out json").code == 0);
}

TEST_CASE("compare: full matrix pass") {
  RunResult r = run("compare --d 1 --alpha 1 --fn gaussian --x 0 --out json");
  CHECK(r.code == 0);
  json doc = json::parse(r.out);
  CHECK(doc["diagnostics"]["all_pass"] == true);
}

TEST_CASE("mc dynkin: reproducible and within tolerance; threads invariance") {
  std::string args =
      "mc dynkin --d 1 --alpha 1 --fn gaussian --x 0 --r 0.5 --n 20000 --seed 7 "
      "--out json";
  RunResult a = run(args + " --threads 1");
  RunResult b = run(args + " --threads 3");
  CHECK(a.code == 0);
  json da = json::parse(a.out), db = json::parse(b.out);
  // numerical output is bit-identical regardless of the thread count
  CHECK(da["results"].dump() == db["results"].dump());
  RunResult c = run(args + " --threads 1");
  CHECK(a.out == c.out);  // identical rerun
  CHECK(da["results"][0]["sigmas"].get<double>() < 3.0);
}

TEST_CASE("probe-conjecture on a log grid") {
  RunResult r = run("probe-conjecture --alpha 1.5 --orders 6 --out json");
  CHECK(r.code == 0);
  json doc = json::parse(r.out);
  CHECK(doc["results"][0]["verdict"] == "consistent");
  // alpha outside (1,2) is a usage error
  CHECK(run("probe-conjecture --alpha 0.7 --orders 4").code == 1);
}

TEST_CASE("mc exit sample dump") {
  std::string path = "/tmp/fraclap_exit_dump.csv";
  RunResult r = run("mc exit --d 2 --alpha 1.5 --r 1 --n 200 --seed 3 --dump " +
                    path + " --out json");
  CHECK(r.code == 0);
  std::ifstream f(path);
  REQUIRE(f.good());
  std::string header;
  std::getline(f, header);
  CHECK(header == "exit_r,exit_angle,exit_time,steps");
  int rows = 0;
  std::string line_s;
  while (std::getline(f, line_s)) ++rows;
  CHECK(rows == 200);
}

TEST_CASE("bank list and kernels dump") {
  RunResult r = run("bank list --d 1 --alpha 1.5 --out json");
  CHECK(r.code == 0);
  json doc = json::parse(r.out);
  bool has_gauss = false, has_path = false;
  for (auto& e : doc["results"]) {
    if (e["name"] == "gaussian") has_gauss = true;
    if (e["name"] == "path_I_not_D") has_path = true;
  }
  CHECK(has_gauss);
  CHECK(has_path);
  RunResult kd = run("kernels dump --d 1 --alpha 1 --kernel pt --t 1 --rmin 0.1 --rmax 10 --n 5");
  CHECK(kd.code == 0);
  CHECK(kd.out.find("rho,value") != std::string::npos);
}

TEST_CASE("config file merges under flags (flags win)") {
  std::string path = "/tmp/fraclap_test_config.ini";
  {
    std::ofstream f(path);
    f << "d=2\nalpha=0.5\n";
  }
  // config sets d=2 alpha=0.5; the flag overrides alpha
  RunResult r = run("eval --config " + path +
                    " --alpha 1.5 --fn gaussian --x 0.1,0.2 --def I --out json");
  CHECK(r.code == 0);
  json doc = json::parse(r.out);
  CHECK(doc["params"]["d"] == 2);
  CHECK(doc["params"]["alpha"] == 1.5);
}

TEST_CASE("canonical json round-trips") {
  RunResult a = run("eval --d 1 --alpha 1.0 --fn gaussian --x 0.30000 --def S --out json");
  RunResult b = run("eval --d 1 --alpha 1 --fn gaussian --x 0.3 --def S --out json");
  CHECK(a.code == 0);
  // equivalent flag spellings normalize to the identical document
  CHECK(a.out == b.out);
  json doc = json::parse(a.out);
  json reparsed = json::parse(doc.dump());
  CHECK(reparsed == doc);
}
