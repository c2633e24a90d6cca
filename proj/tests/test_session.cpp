#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "session.hpp"

using namespace hgp;
using ojson = nlohmann::ordered_json;

namespace {

const char* kZForward =
    "group = intlattice(1)\n"
    "chain = pow2(levels=6)\n"
    "cocycle = lattice\n"
    "max_r = 8\n"
    "r_list = 2,4,8\n"
    "seed = 5\n";

ojson run_json(const std::string& cfg, const std::string& cmd) {
  Session s(RunConfig::parse(cfg));
  s.run(cmd);
  return ojson::parse(s.report_json());
}

bool check_verdict(const ojson& report, const std::string& name) {
  for (const auto& c : report["checks"]) {
    if (c["name"] == name) return c["verdict"].get<bool>();
  }
  FAIL("check not found: " << name);
  return false;
}

}  // namespace

TEST_CASE("config parsing: defaults, overrides, and rejection") {
  RunConfig c = RunConfig::parse("group = free(2)\nmax_r = 3\nmax_r = 2\n# comment\n\n");
  CHECK(c.group == "free(2)");
  CHECK(c.max_r == 2);  // later keys win
  CHECK(c.mean.foelner == false);
  RunConfig f = RunConfig::parse("mean = foelner:6\nrho2_override = 3:5/2\n");
  CHECK(f.mean.foelner);
  CHECK(f.mean.box_size == 6);
  CHECK(f.rho2_override->first == 3);
  CHECK(f.rho2_override->second == Rational(5, 2));
  CHECK_THROWS_AS(RunConfig::parse("colour = blue\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("max_r three\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("mean = sometimes\n"), ConfigError);
}

TEST_CASE("boxfam run: passing report with the expected artifacts") {
  std::string cfg = "group = intlattice(1)\nchain = pow2(levels=4)\nsamples = 2000\n";
  Session s(RunConfig::parse(cfg));
  s.run("boxfam");
  CHECK(s.summary_pass());
  ojson rep = ojson::parse(s.report_json());
  CHECK(check_verdict(rep, "chain-structure"));
  CHECK(check_verdict(rep, "glued-metric-axioms"));
  CHECK(check_verdict(rep, "component-separation"));
  std::string components;
  for (const auto& [name, data] : s.artifacts()) {
    if (name == "components.csv") components = data;
  }
  CHECK(components.find("1,mod-2,2,0") != std::string::npos);
  CHECK(components.find("4,mod-16,16,0") != std::string::npos);
}

TEST_CASE("boxfam on the free-group chain tags unbounded components") {
  std::string cfg = "group = free(2)\nchain = lcs(levels=2)\nsamples = 500\n";
  Session s(RunConfig::parse(cfg));
  s.run("boxfam");
  CHECK(s.summary_pass());
  std::string components;
  for (const auto& [name, data] : s.artifacts()) {
    if (name == "components.csv") components = data;
  }
  CHECK(components.find("gamma2,unbounded,0") != std::string::npos);
  CHECK(components.find("gamma3,unbounded,1") != std::string::npos);
}

TEST_CASE("forward run passes and reports are byte-stable") {
  Session a{RunConfig::parse(kZForward)};
  a.run("forward");
  CHECK(a.summary_pass());
  Session b{RunConfig::parse(kZForward)};
  b.run("forward");
  CHECK(a.report_json() == b.report_json());
  REQUIRE(a.artifacts().size() == b.artifacts().size());
  for (std::size_t i = 0; i < a.artifacts().size(); ++i) {
    CHECK(a.artifacts()[i] == b.artifacts()[i]);
  }
  ojson rep = ojson::parse(a.report_json());
  CHECK(check_verdict(rep, "embedding-sandwich"));
}

TEST_CASE("a corrupted upper control fails loudly with a witness") {
  std::string cfg = std::string(kZForward) + "rho2_override = 7:48\n";
  Session s(RunConfig::parse(cfg));
  s.run("forward");
  CHECK_FALSE(s.summary_pass());
  ojson rep = ojson::parse(s.report_json());
  bool witnessed = false;
  for (const auto& c : rep["checks"]) {
    if (c["name"] == "embedding-sandwich") {
      CHECK_FALSE(c["verdict"].get<bool>());
      witnessed = c.contains("witness");
    }
  }
  CHECK(witnessed);
}

TEST_CASE("certificate manifests round-trip through verify-cert") {
  Session s(RunConfig::parse(kZForward));
  s.run("forward");
  REQUIRE(s.summary_pass());
  std::string manifest;
  for (const auto& [name, data] : s.artifacts()) {
    if (name == "certificate.txt") manifest = data;
  }
  REQUIRE_FALSE(manifest.empty());
  std::string path = "test_session_cert.txt";
  {
    std::ofstream out(path);
    out << manifest;
  }
  Session v(RunConfig::parse("certificate = " + path + "\nr_list = 2,4\nseed = 5\n"));
  v.run("verify-cert");
  CHECK(v.summary_pass());
  std::remove(path.c_str());
}

TEST_CASE("backward run emits psi tables and negative-type verdicts") {
  std::string cfg = std::string(kZForward) + "r_list = 4,6\n";
  Session s(RunConfig::parse(cfg));
  s.run("backward");
  CHECK(s.summary_pass());
  ojson rep = ojson::parse(s.report_json());
  CHECK(check_verdict(rep, "local-negative-type"));
  CHECK(check_verdict(rep, "properness-envelope"));
  CHECK(check_verdict(rep, "limit-stabilization"));
  std::string psi4, limit;
  for (const auto& [name, data] : s.artifacts()) {
    if (name == "psi_r4.csv") psi4 = data;
    if (name == "psi_limit.csv") limit = data;
  }
  CHECK(psi4.find("(3),9,9,") != std::string::npos);
  CHECK(limit.find("(2),4,4,stable") != std::string::npos);
  CHECK(limit.find("undercovered") != std::string::npos);
}

TEST_CASE("backward run in foelner mode populates defect bounds") {
  std::string cfg =
      "group = free(2)\nchain = lcs(levels=2)\ncocycle = free-wall\n"
      "max_r = 2\nr_list = 2\nmean = foelner:4\nseed = 3\n";
  Session s(RunConfig::parse(cfg));
  s.run("backward");
  CHECK(s.summary_pass());
  ojson rep = ojson::parse(s.report_json());
  CHECK(check_verdict(rep, "symmetry-within-defect"));
  std::string psi;
  for (const auto& [name, data] : s.artifacts()) {
    if (name == "psi_r2.csv") psi = data;
  }
  // the generator row carries a positive defect bound
  CHECK(psi.find("a,1,1,") != std::string::npos);
}

TEST_CASE("pullback runs for both shipped maps") {
  std::string base =
      "group = intlattice(1)\nchain = pow2(levels=6)\ncocycle = lattice\n"
      "max_r = 17\nrho_domain = 34\nmap_domain = 36\nr_list = 4,8\nseed = 2\n";
  Session dbl(RunConfig::parse(base + "map = doubling\n"));
  dbl.run("pullback");
  CHECK(dbl.summary_pass());
  ojson rep = ojson::parse(dbl.report_json());
  CHECK(check_verdict(rep, "coarse-control-sandwich"));
  CHECK(check_verdict(rep, "embedding-sandwich"));

  Session idm(RunConfig::parse(base + "map = identity\n"));
  idm.run("pullback");
  CHECK(idm.summary_pass());
}

TEST_CASE("unknown commands and oversized scopes raise typed errors") {
  Session s(RunConfig::parse("group = intlattice(1)\nchain = pow2(levels=2)\nmax_r = 8\n"));
  CHECK_THROWS_AS(s.run("explore"), ConfigError);
  CHECK_THROWS_AS(s.run("forward"), ScopeError);
}
