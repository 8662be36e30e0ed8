#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "latboot/debias.hpp"
#include "latboot/io.hpp"
#include "oracles.hpp"

using namespace latboot;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(LATBOOT_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buffer[4096];
  std::size_t got = 0;
  while ((got = std::fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
    r.out.append(buffer, got);
  }
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path scratch() {
  auto dir = std::filesystem::temp_directory_path() / "latboot_test_cli";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string at(const std::string& name) { return (scratch() / name).string(); }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    out.push_back(line);
  }
  return out;
}

/// Lines of a CSV section, header included.
std::vector<std::string> section(const std::string& text, const std::string& name) {
  std::vector<std::string> out;
  bool inside = false;
  for (const auto& line : lines(text)) {
    if (line.rfind("# section: ", 0) == 0) {
      inside = line == "# section: " + name;
      continue;
    }
    if (inside && !line.empty() && line[0] != '#') {
      out.push_back(line);
    }
  }
  return out;
}

std::string without_timestamp(const std::string& text) {
  std::string out;
  for (const auto& line : lines(text)) {
    if (line.rfind("# timestamp:", 0) != 0) {
      out += line + "\n";
    }
  }
  return out;
}

}  // namespace

TEST_CASE("lattice m=3") {
  const auto r = run("lattice -m 3");
  REQUIRE(r.code == 0);
  CHECK(section(r.out, "partitions").size() == 6);
  CHECK(section(r.out, "zeta").size() + section(r.out, "mobius").size() == 12);
  const auto mobius = section(r.out, "mobius");
  CHECK(mobius.back() == "123,2,-1,-1,-1,1");
  CHECK(r.out.find("# latboot: ") != std::string::npos);
  CHECK(r.out.find("# argv: ") != std::string::npos);
}

TEST_CASE("lattice m=1") {
  const auto r = run("lattice -m 1");
  REQUIRE(r.code == 0);
  CHECK(section(r.out, "zeta") == std::vector<std::string>{"row,1", "1,1"});
  CHECK(section(r.out, "mobius") == std::vector<std::string>{"row,1", "1,1"});
  CHECK(section(r.out, "hasse").size() == 1);
}

TEST_CASE("lattice m=4 Hasse edges match cover enumeration") {
  const auto parts = oracle::set_partitions(4);
  std::size_t covers = 0;
  for (const auto& a : parts) {
    for (const auto& b : parts) {
      if (a.size() == b.size() + 1 && oracle::finer_or_equal(a, b)) {
        ++covers;
      }
    }
  }
  const auto r = run("lattice -m 4");
  REQUIRE(r.code == 0);
  CHECK(section(r.out, "partitions").size() == 16);
  CHECK(section(r.out, "hasse").size() == covers + 1);
}

TEST_CASE("lattice JSON mirrors CSV") {
  const auto r = run("lattice -m 3 --format json");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["provenance"]["command"] == "lattice");
  CHECK(j["tables"].size() == 4);
}

TEST_CASE("smatrix m=2 N=2") {
  const auto r = run("smatrix -m 2 -n 2");
  REQUIRE(r.code == 0);
  CHECK(section(r.out, "s") == std::vector<std::string>{"row,1|2,12", "1|2,1/2,0", "12,1/2,1"});
  CHECK(section(r.out, "diagonals") == std::vector<std::string>{"partition,R,C", "1|2,2,4", "12,2,2"});
  const auto f = section(r.out, "factorization");
  CHECK(f[1] == "S = R zeta C^-1,true");
  CHECK(f[2] == "S = C^-1 zeta R,false");
  const auto reduced = run("smatrix -m 2 -n 2 --reduced");
  REQUIRE(reduced.code == 0);
  CHECK(reduced.out.find("1/2") != std::string::npos);
}

TEST_CASE("bias trajectory for the variance") {
  write_file(at("pop.json"), R"({"kind": "normal", "mean": ["0"], "variance": ["1"]})");
  const auto r = run("bias --functional variance --population " + at("pop.json") + " -n 3 -k 2");
  REQUIRE(r.code == 0);
  const auto rows = section(r.out, "bias");
  REQUIRE(rows.size() == 4);
  CHECK(rows[1].rfind("0,-1/3,1/3,", 0) == 0);
  CHECK(rows[2].rfind("1,-1/9,1/9,", 0) == 0);
  CHECK(rows[3].rfind("2,-1/27,1/27,", 0) == 0);
}

TEST_CASE("default schedule reaches a zero row") {
  write_file(at("pop.json"), R"({"kind": "normal", "mean": ["0"], "variance": ["1"]})");
  const auto r = run("bias --functional variance --population " + at("pop.json") + " -n 4 -k 2 --schedule default");
  REQUIRE(r.code == 0);
  const auto rows = section(r.out, "bias");
  REQUIRE(rows.size() == 4);
  CHECK(rows[3].rfind("2,0,0,", 0) == 0);
}

TEST_CASE("infeasible schedule exits 3") {
  write_file(at("pop.json"), R"({"kind": "normal", "mean": ["0"], "variance": ["1"]})");
  CHECK(run("bias --functional variance --population " + at("pop.json") + " -n 2 -k 3 --schedule default").code == 3);
}

TEST_CASE("usage and input errors exit 2") {
  CHECK(run("lattice -m 3 --bogus").code == 2);
  CHECK(run("lattice").code == 2);
  CHECK(run("lattice -m 11").code == 2);
  CHECK(run("nosuch").code == 2);
  CHECK(run("bias --functional variance --population /nonexistent.json -n 3").code == 2);
  write_file(at("tbl.json"), R"({"kind": "table", "d": 1, "moments": [{"labels": [0], "value": "0"}]})");
  CHECK(run("bias --functional variance --population " + at("tbl.json") + " -n 3").code == 2);
}

TEST_CASE("debias writes a functional that parses back") {
  const auto r = run("debias --functional variance -n 5 -k 2");
  REQUIRE(r.code == 0);
  const auto f = functional_from_json<Rational>(nlohmann::json::parse(r.out));
  CHECK(f == richardson_debias(variance_functional<Rational>(), 5, 2));
  const auto s = run("debias --functional variance -n 5 -k 2 --schedule default");
  REQUIRE(s.code == 0);
  const auto g = functional_from_json<Rational>(nlohmann::json::parse(s.out));
  CHECK(apply_S(g, 5) == variance_functional<Rational>());
}

TEST_CASE("mc runs are reproducible apart from the timestamp") {
  write_file(at("d.csv"), "x\n1\n2\n4\n-1\n");
  const std::string args = "mc --functional variance --data " + at("d.csv") + " -k 1 --replicas 500 --seed 9";
  const auto a = run(args);
  const auto b = run(args);
  REQUIRE(a.code == 0);
  CHECK(without_timestamp(a.out) == without_timestamp(b.out));
  const auto c = run(args + " --threads 3");
  REQUIRE(c.code == 0);
  CHECK(section(a.out, "estimate") == section(c.out, "estimate"));
}

TEST_CASE("exhaustive mc is exact") {
  write_file(at("d3.csv"), "1\n2\n4\n");
  const auto r = run("mc --functional variance --data " + at("d3.csv") + " -k 1 --exhaustive");
  REQUIRE(r.code == 0);
  const auto rows = section(r.out, "estimate");
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].substr(rows[1].rfind(',') + 1) == "true");
}

TEST_CASE("bounds") {
  const auto trace = run("bounds --kind trace --sigma 0.5 -n 32");
  REQUIRE(trace.code == 0);
  const auto rows = section(trace.out, "trace");
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].rfind("0.5,32,1,", 0) == 0);

  const auto lin = run("bounds --kind linconv --alpha 8 --m-max 50");
  REQUIRE(lin.code == 0);
  const auto sweep = section(lin.out, "linconv");
  CHECK(sweep.size() == 51);
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    CHECK(sweep[i].substr(sweep[i].rfind(',') + 1) == "true");
    std::istringstream fields(sweep[i]);
    std::string m, n, ratio;
    std::getline(fields, m, ',');
    std::getline(fields, n, ',');
    std::getline(fields, ratio, ',');
    CHECK(std::stod(ratio) >= 0.75);
  }
  CHECK(run("bounds --kind trace --sigma 1.5 -n 32").code == 2);
}

TEST_CASE("output file and format") {
  const auto path = at("lat.json");
  std::filesystem::remove(path);
  REQUIRE(run("lattice -m 2 -o " + path).code == 0);
  std::ifstream in(path);
  const auto j = nlohmann::json::parse(in);
  CHECK(j["tables"][0]["name"] == "partitions");
}

TEST_CASE("selftest passes") {
  const auto r = run("selftest");
  CHECK(r.code == 0);
}
