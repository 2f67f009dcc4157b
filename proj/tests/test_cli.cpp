// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fracsob/cli.hpp"

using nlohmann::json;

namespace
{

struct Run
{
  int code = 0;
  std::string err;
};

// Runs the CLI in process with stderr captured.
Run cli(std::vector<std::string> args)
{
  args.insert(args.begin(), "fracsob_cli");
  std::vector<char*> argv;
  for (auto& a : args)
    argv.push_back(a.data());
  std::ostringstream err;
  auto* old = std::cerr.rdbuf(err.rdbuf());
  Run r;
  r.code = fracsob::cli::run(static_cast<int>(argv.size()), argv.data());
  std::cerr.rdbuf(old);
  r.err = err.str();
  return r;
}

std::string slurp(const std::string& path)
{
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("validation and exit codes")
{
  Run r = cli({"sobolev", "--dim", "3", "--s", "1.2", "--out", "cli_bad.json"});
  CHECK(r.code == 1);
  CHECK(r.err.find("(1/2,1)") != std::string::npos);
  CHECK(cli({"sobolev", "--dim", "3", "--s", "0.4"}).code == 1);
  CHECK(cli({"sobolev", "--dim", "3", "--s", "0.6", "--grid", "-4"}).code == 1);
  CHECK(cli({"sobolev", "--dim", "3", "--s", "0.6", "--format", "csv"}).code == 1);
  CHECK(cli({"oracle", "--k-grid", ""}).code == 1);
  CHECK(cli({"oracle", "--k-grid", "1,4"}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({"mass", "--dim", "2", "--s", "0.75", "--riesz-convention", "nonsense"}).code == 1);
  CHECK(cli({"sobolev", "--dim", "2", "--s", "0.75", "--grid", "32", "--max-iter", "1",
             "--out", "cli_stall.json"}).code == 2);
  std::remove("cli_stall.json");
}

TEST_CASE("sobolev output is deterministic")
{
  const std::vector<std::string> args{"sobolev", "--dim", "3", "--s", "0.6", "--grid", "64", "--deterministic"};
  auto a = args, b = args;
  a.insert(a.end(), {"--out", "cli_a.json"});
  b.insert(b.end(), {"--out", "cli_b.json"});
  REQUIRE(cli(a).code == 0);
  REQUIRE(cli(b).code == 0);
  const std::string ja = slurp("cli_a.json"), jb = slurp("cli_b.json");
  CHECK(ja == jb);
  const json j = json::parse(ja);
  for (const char* key : {"params", "value", "s_der", "gap", "iterations", "converged", "grid", "quad",
                          "constants_flag", "provenance"})
    CHECK(j.contains(key));
  CHECK(j["gap"].get<double>() > 0.0);
  CHECK(j["converged"].get<bool>());
  CHECK(j["grid"]["M"] == 64);
  CHECK(j["constants_flag"] == "standard");
  CHECK(j["provenance"]["config"]["deterministic"] == true);
  CHECK(j["provenance"].contains("version"));
  std::remove("cli_a.json");
  std::remove("cli_b.json");
}

TEST_CASE("sweep csv")
{
  REQUIRE(cli({"sweep", "--dim", "2", "--s-list", "0.9,0.6,0.75", "--grid", "32", "--format", "csv",
               "--out", "cli_sweep.csv"}).code == 0);
  std::istringstream in(slurp("cli_sweep.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "s,value,s_der,gap,converged");
  std::vector<double> s;
  while (std::getline(in, line))
    s.push_back(std::stod(line.substr(0, line.find(','))));
  CHECK(s == std::vector<double>{0.6, 0.75, 0.9});
  std::remove("cli_sweep.csv");

  REQUIRE(cli({"sweep", "--dim", "2", "--s-list", "0.6,0.9", "--grid", "32", "--plot", "--out",
               "cli_plot.txt"}).code == 0);
  std::istringstream pin(slurp("cli_plot.txt"));
  std::getline(pin, line);
  CHECK(line[0] == '#');
  std::getline(pin, line);
  CHECK(std::count(line.begin(), line.end(), ' ') == 1);
  std::remove("cli_plot.txt");
}

TEST_CASE("mass rows and crossing")
{
  REQUIRE(cli({"mass", "--dim", "2", "--s", "0.75", "--grid", "64", "--out", "cli_mass.json"}).code == 0);
  json j = json::parse(slurp("cli_mass.json"));
  CHECK(j["rows"].size() == 1);
  CHECK(j["rows"][0]["kappa0"].get<double>() < 0.0);
  CHECK_FALSE(j.contains("crossing"));

  REQUIRE(cli({"mass", "--dim", "2", "--s", "0.75", "--grid", "64", "--lambda-list", "0,1,2,3", "--out",
               "cli_mass.json"}).code == 0);
  j = json::parse(slurp("cli_mass.json"));
  CHECK(j["rows"].size() == 4);
  CHECK(j["rows"][0]["kappa0"].get<double>() < 0.0);
  REQUIRE(j.contains("crossing"));
  CHECK(j["crossing"]["lambda_star"].get<double>() > 1.0);
  CHECK(j["crossing"]["lambda_star"].get<double>() < 2.0);

  // lambda = 50 is far past the coercivity limit: that row carries an error, the rest succeed
  cli({"mass", "--dim", "2", "--s", "0.75", "--grid", "64", "--lambda-list", "0,0.5,50", "--out", "cli_mass.json"});
  j = json::parse(slurp("cli_mass.json"));
  CHECK(j["rows"].size() == 3);
  CHECK(j["rows"][2].contains("error"));
  CHECK_FALSE(j["rows"][1].contains("error"));
  CHECK_FALSE(j.contains("crossing"));
  std::remove("cli_mass.json");

  const std::string hpath = "cli_h.txt";
  {
    std::ofstream out(hpath);
    out << "0 -1\n1 -1\n";
  }
  REQUIRE(cli({"mass", "--dim", "2", "--s", "0.75", "--grid", "64", "--h-file", hpath, "--out",
               "cli_mass.json"}).code == 0);
  j = json::parse(slurp("cli_mass.json"));
  REQUIRE(cli({"mass", "--dim", "2", "--s", "0.75", "--grid", "64", "--lambda", "1", "--out",
               "cli_mass2.json"}).code == 0);
  const json j2 = json::parse(slurp("cli_mass2.json"));
  CHECK(j["rows"][0]["kappa0"].get<double>() == doctest::Approx(j2["rows"][0]["kappa0"].get<double>()).epsilon(1e-12));
  for (const char* f : {"cli_mass.json", "cli_mass2.json", "cli_h.txt"})
    std::remove(f);
}

TEST_CASE("oracle thresholds")
{
  REQUIRE(cli({"oracle", "--out", "cli_oracle.json"}).code == 0);
  json j = json::parse(slurp("cli_oracle.json"));
  CHECK(j["failures"].empty());
  CHECK(j.contains("seminorm_decay"));

  const Run r = cli({"oracle", "--threshold", "1e-12", "--out", "cli_oracle.json"});
  CHECK(r.code == 2);
  j = json::parse(slurp("cli_oracle.json"));
  CHECK_FALSE(j["failures"].empty());
  CHECK(r.err.find("FAIL") != std::string::npos);
  CHECK(r.err.find("half_line_crosscheck") != std::string::npos);
  std::remove("cli_oracle.json");
}

TEST_CASE("bubble check")
{
  REQUIRE(cli({"bubble-check", "--dim", "3", "--s", "0.6", "--out", "cli_bubble.json"}).code == 0);
  const json j = json::parse(slurp("cli_bubble.json"));
  CHECK(j["pass"].get<bool>());
  CHECK(j["max_rel"].get<double>() < 2e-2);
  CHECK(j["centers"].size() == 5);
  std::remove("cli_bubble.json");
}
