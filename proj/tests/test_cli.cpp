#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "renyi/disk_multipole.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::path(RENYI2_TEST_DIR) / "cli_work";

int run(const std::string& args) {
  fs::create_directories(kWork);
  const std::string cmd = std::string(RENYI2_CLI) + " " + args + " 2>" + (kWork / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string path(const std::string& name) { return (kWork / name).string(); }

std::string slurp(const std::string& name) {
  std::ifstream in(path(name));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& name) {
  std::vector<std::string> out;
  std::istringstream in(slurp(name));
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  return out;
}

json load(const std::string& name) { return json::parse(slurp(name)); }

}  // namespace

TEST_CASE("two-disks CSV schema and values") {
  REQUIRE(run("two-disks --r-over-R 3:5:1 --n-max 6 --out " + path("sweep.csv")) == 0);
  const auto l = lines("sweep.csv");
  REQUIRE(l.size() == 5);
  CHECK(l[0].rfind("# renyi2 ", 0) == 0);
  CHECK(l[1] == "r_over_R,I2_total,I2_dirichlet,I2_neumann,n_max,converged");
  const double rs[] = {3, 4, 5};
  for (int i = 0; i < 3; ++i) {
    const auto f = fields(l[2 + i]);
    REQUIRE(f.size() == 6);
    const auto want = renyi::renyi2_two_disks_parts(renyi::DiskPairGeometry(rs[i]), 6);
    CHECK(std::stod(f[0]) == rs[i]);
    CHECK(std::stod(f[1]) == want.total());
    CHECK(std::stod(f[2]) == want.dirichlet);
    CHECK(std::stod(f[3]) == want.neumann);
    CHECK(f[4] == "6");
    CHECK(f[5] == "true");
  }
}

TEST_CASE("grid endpoints are inclusive within half a step") {
  REQUIRE(run("two-disks --r-over-R 3:4:0.33333 --n-max 2 --out " + path("grid.csv")) == 0);
  CHECK(lines("grid.csv").size() == 2 + 4);
  REQUIRE(run("two-disks --r-over-R 3,3.5,9 --n-max 2 --format csv --out " + path("list.txt")) == 0);
  CHECK(lines("list.txt").size() == 2 + 3);
}

TEST_CASE("plot data has two columns") {
  REQUIRE(run("two-disks --r-over-R 3:4:0.5 --n-max 4 --plot-data --out " + path("plot.csv")) == 0);
  const auto l = lines("plot.csv");
  REQUIRE(l.size() == 5);
  CHECK(l[1] == "r_over_R,I2_total");
  CHECK(fields(l[2]).size() == 2);
  CHECK(run("specfun-table --plot-data --out " + path("nope.csv")) == 1);
}

TEST_CASE("half-spaces JSON") {
  REQUIRE(run("half-spaces --l 1 --order 2 --out " + path("hs.json")) == 0);
  const json doc = load("hs.json");
  CHECK(doc["command"] == "half-spaces");
  CHECK(doc.contains("version"));
  CHECK(doc["config"]["l"] == 1.0);
  const json& r = doc["results"];
  REQUIRE(r.contains("first_reflection"));
  REQUIRE(r.contains("second_reflection"));
  CHECK(std::abs(r["A2_coefficient"].get<double>() - 0.022) <= 0.001);
  CHECK(r["first_reflection"]["total"].get<double>() == doctest::Approx(1 / (16 * 3.14159265358979323846)));
}

TEST_CASE("a JSON output fed back as config reproduces it exactly") {
  REQUIRE(run("two-disks --r-over-R 2.5:3.5:0.25 --n-max 5 --format json --out " + path("a.json")) == 0);
  REQUIRE(run("--config " + path("a.json") + " --out " + path("b.json")) == 0);
  json a = load("a.json"), b = load("b.json");
  CHECK(a["results"] == b["results"]);
  a["config"].erase("out");
  b["config"].erase("out");
  CHECK(a["config"] == b["config"]);

  // Flags override the file.
  REQUIRE(run("two-disks --config " + path("a.json") + " --n-max 3 --out " + path("c.json")) == 0);
  const json c = load("c.json");
  CHECK(c["config"]["n-max"] == 3);
  CHECK(c["config"]["r-over-R"] == "2.5:3.5:0.25");
  CHECK(c["results"][0]["n_max"] == 3);
}

TEST_CASE("hand-written config file") {
  {
    std::ofstream f(path("cfg.json"));
    f << R"({"command": "disk-halfspace", "R": 0.5, "l": "5,10", "plot-data": false})";
  }
  REQUIRE(run("--config " + path("cfg.json") + " --out " + path("dh.json")) == 0);
  const json doc = load("dh.json");
  REQUIRE(doc["results"].size() == 2);
  CHECK(doc["results"][1]["I2"].get<double>() == doctest::Approx(0.05 / (3.14159265358979323846 * 3.14159265358979323846)));
}

TEST_CASE("Monte Carlo runs are reproducible from their output") {
  const std::string args = "worldline-mutual --n-loops 16 --n-points 128 --placements 16 --seed 5 --max-rel-stderr 0";
  REQUIRE(run(args + " --out " + path("mc1.json")) == 0);
  REQUIRE(run("--config " + path("mc1.json") + " --out " + path("mc2.json")) == 0);
  const json a = load("mc1.json"), b = load("mc2.json");
  CHECK(a["results"] == b["results"]);
  CHECK(a["results"]["dirichlet"]["seed"] == 5);
  CHECK(a["results"]["dirichlet"]["mean"].get<double>() > 0.0);
  REQUIRE(run(args + " --out " + path("mc.csv")) == 0);
  const auto l = lines("mc.csv");
  REQUIRE(l.size() == 5);
  CHECK(l[1] == "quantity,mean,stderr,n_samples,seed");
}

TEST_CASE("exit statuses") {
  CHECK(run("--help > /dev/null") == 0);
  CHECK(run("") == 1);
  CHECK(run("two-disks --no-such-flag") == 1);
  CHECK(run("two-disks --r-over-R 1.5 --out " + path("x.csv")) == 1);
  CHECK(run("two-disks --r-over-R 3:2:1 --out " + path("x.csv")) == 1);
  CHECK(run("worldline-mutual --region-a disk:0,0,1 --region-b disk:1,0,1 --out " + path("x.json")) == 1);
  CHECK(run("--config " + path("missing.json")) == 1);
  CHECK(run("half-spaces --order 1 --nodes 6 --out " + path("x.json")) == 2);
  CHECK(run("worldline-mutual --n-loops 4 --n-points 64 --placements 2 --max-rel-stderr 1e-9 --out " +
            path("x.json")) == 3);
  CHECK(slurp("stderr.txt").find("insufficient statistics") != std::string::npos);
}

TEST_CASE("inequalities and specfun tables") {
  REQUIRE(run("inequalities --n-loops 8 --n-points 128 --placements 4 --max-rel-stderr 0 --out " +
              path("ineq.json")) == 0);
  const json doc = load("ineq.json");
  CHECK(doc["results"]["all_pass"] == true);
  CHECK(doc["results"]["checks"].size() == 6);
  REQUIRE(run("specfun-table --n-max 2 --xi 0,1 --out " + path("sf.csv")) == 0);
  const auto l = lines("sf.csv");
  CHECK(l[1] == "n,m,xi,j,h,C_dirichlet,C_neumann");
  CHECK(l.size() == 2 + 9 * 2);
  const auto row = fields(l[2]);
  CHECK(std::stod(row[4]) == doctest::Approx(3.14159265358979323846 / 2));
}

TEST_CASE("acceptance subcommand reports per criterion") {
  REQUIRE(run("acceptance --only 1,2,14 --out " + path("acc.json")) == 0);
  const json doc = load("acc.json");
  REQUIRE(doc["results"].size() == 3);
  for (const auto& c : doc["results"]) CHECK(c["pass"] == true);
}
