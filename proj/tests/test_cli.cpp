#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pbem/cli.hpp"

using pbem::run_cli;
using Json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
  Json json() const { return Json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("pbem_test_" + name)).string();
}

}  // namespace

TEST_CASE("derive") {
  const Run plain = run({"derive"});
  CHECK(plain.code == 0);
  const Json j = plain.json();
  REQUIRE(j["constraints"].size() == 2);
  CHECK(j["constraints"][0]["expr"] == "diff(B_k,q_k)");
  CHECK(j["constraints"][0]["verdict"].is_null());
  CHECK(j["reverified"] == true);
  CHECK(j["pass"] == true);

  CHECK(run({"derive", "--field-B", "0;0;1", "--field-E", "0;0;0"}).code == 0);

  const Run bad = run({"derive", "--field-B", "x1;0;0"});
  CHECK(bad.code == 1);
  CHECK(bad.json()["constraints"][0]["verdict"] == "fail");
}

TEST_CASE("check") {
  CHECK(run({"check", "--field-B", "0;0;1"}).code == 0);

  const Run drag = run({"check", "--force", "-v1;-v2;-v3"});
  CHECK(drag.code == 1);
  const Json j = drag.json();
  const Json& c1 = j["conditions"][1];
  CHECK(c1["name"] == "condition 1");
  CHECK(c1["pass"] == false);
  CHECK(c1["residuals"][0]["value"] == "-2");

  const Run quad = run({"check", "--force", "v1^2;0;0"});
  CHECK(quad.code == 1);
  CHECK(quad.json()["conditions"][0]["pass"] == false);

  CHECK(run({"check", "--force", "0;0;0", "--potential-U", "x1^2"}).code == 0);
  CHECK(run({"check"}).code == 2);
  CHECK(run({"check", "--force", "x1;0;0"}).code == 2);  // field-space symbol in a phase-space force
}

TEST_CASE("reconstruct") {
  const Run r = run({"reconstruct", "--field-B", "0;0;1"});
  CHECK(r.code == 0);
  const Json j = r.json();
  CHECK(j["lagrangian"]["L"] == "1/2*e*c^-1*q1*v2 - 1/2*e*c^-1*q2*v1 + 1/2*m*v1^2 + 1/2*m*v2^2 + 1/2*m*v3^2");
  CHECK(j["euler_lagrange"]["pass"] == true);

  CHECK(run({"reconstruct", "--force", "0;0;0"}).json()["lagrangian"]["L"] == "1/2*m*v1^2 + 1/2*m*v2^2 + 1/2*m*v3^2");

  const Run drag = run({"reconstruct", "--force", "-v1;-v2;-v3"});
  CHECK(drag.code == 1);
  CHECK(drag.json().contains("error"));
}

TEST_CASE("reconstruct reports the divergence of a non-solenoidal field") {
  // embedded B = (x1,0,0) also fails the cyclic condition, so the force is rejected before potentials
  const Run r = run({"reconstruct", "--field-B", "x1;0;0"});
  CHECK(r.code == 1);
  CHECK(r.json()["div B"] == "1");
}

TEST_CASE("simulate") {
  const std::string csv = temp_path("traj.csv");
  const Run r = run({"simulate", "--field-B", "0;0;1", "--steps", "10000", "--dt", "0.01", "--csv", csv});
  CHECK(r.code == 0);
  const Json j = r.json();
  CHECK(j["energy"][0]["max"].get<double>() < 1e-10);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,x1,x2,x3,v1,v2,v3");
  std::remove(csv.c_str());

  const Run free = run({"simulate", "--v0", "1,2,0", "--steps", "10", "--dt", "0.1", "--method", "rk4"});
  CHECK(free.code == 0);
  const Json f = free.json()["final"];
  CHECK(f["x"][0].get<double>() == doctest::Approx(1.0));
  CHECK(f["x"][1].get<double>() == doctest::Approx(2.0));

  CHECK(run({"simulate", "--method", "euler"}).code == 2);
  CHECK(run({"simulate", "--dt", "-1"}).code == 2);
  CHECK(run({"simulate", "--x0", "1,2"}).code == 2);
}

TEST_CASE("simulate with convergence orders") {
  const Run r = run({"simulate", "--field-B", "0;0;1", "--steps", "200", "--dt", "0.02", "--method", "rk4", "--converge"});
  CHECK(r.code == 0);
  const double p = r.json()["euler_lagrange"][0]["order"].get<double>();
  CHECK(p == doctest::Approx(2.0).epsilon(0.3));
}

TEST_CASE("grid") {
  const Run simple = run({"grid", "--field-B", "x1;0;0", "--field-E", "x1;x2;x3", "--single"});
  CHECK(simple.code == 1);
  const Json j = simple.json();
  CHECK(j["residuals"][0]["name"] == "div B");
  CHECK(j["residuals"][0]["max"] == 1.0);
  CHECK(j["residuals"][2]["name"] == "implied rho");
  CHECK(j["residuals"][2]["max"] == 3.0);

  CHECK(run({"grid", "--field-B", "0;0;1"}).code == 0);
  CHECK(run({"grid", "--n", "4"}).code == 2);
}

TEST_CASE("duality") {
  const Run r = run({"duality", "--field-E", "x1;0;0", "--field-B", "0;0;1"});
  CHECK(r.code == 0);
  const Json j = r.json();
  CHECK(j["transformed"]["E"] == Json::array({"0", "0", "1"}));
  CHECK(j["transformed"]["B"] == Json::array({"-x1", "0", "0"}));
  CHECK(j["parity"]["pass"] == true);

  CHECK(run({"duality", "--gamma", "1"}).code == 1);
  CHECK(run({"duality", "--gamma", "x"}).code == 2);
}

TEST_CASE("shared flags and usage errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"derive", "--m", "0"}).code == 2);

  const Run parse = run({"derive", "--field-B", "x1;0;*"});
  CHECK(parse.code == 2);
  CHECK(parse.err.find("parse error") != std::string::npos);

  const std::string path = temp_path("report.json");
  const Run quiet = run({"--out", path, "derive"});
  CHECK(quiet.code == 0);
  CHECK(quiet.out == "pass\n");
  std::ifstream in(path);
  const Json j = Json::parse(in);
  CHECK(j["pass"] == true);
  const Run loud = run({"--out", path, "--json", "derive"});
  CHECK(Json::parse(loud.out) == j);
  std::remove(path.c_str());
}

TEST_CASE("output is deterministic") {
  const std::vector<std::string> args{"simulate", "--field-B", "x2;0;1", "--field-E", "0;0;x3", "--steps", "300"};
  CHECK(run(args).out == run(args).out);
  CHECK(run({"derive"}).out == run({"derive"}).out);
}
