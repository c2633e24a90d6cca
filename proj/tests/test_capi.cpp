#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstring>
#include <string>

#include "hgp/hgp.h"

namespace {

const char* kBoxfam =
    "group = intlattice(1)\n"
    "chain = pow2(levels=3)\n"
    "samples = 500\n";

}  // namespace

TEST_CASE("session lifecycle and a passing run") {
  hgp_session* s = nullptr;
  REQUIRE(hgp_session_create(kBoxfam, &s) == HGP_OK);
  REQUIRE(s != nullptr);
  CHECK(hgp_report_json(s) == nullptr);
  CHECK(hgp_summary_pass(s) == -1);

  CHECK(hgp_run(s, "boxfam") == HGP_OK);
  CHECK(hgp_summary_pass(s) == 1);
  const char* rep = hgp_report_json(s);
  REQUIRE(rep != nullptr);
  CHECK(std::string(rep).find("\"command\": \"boxfam\"") != std::string::npos);

  int n = hgp_artifact_count(s);
  CHECK(n >= 3);
  bool saw_components = false;
  for (int i = 0; i < n; ++i) {
    REQUIRE(hgp_artifact_name(s, i) != nullptr);
    REQUIRE(hgp_artifact_data(s, i) != nullptr);
    if (std::strcmp(hgp_artifact_name(s, i), "components.csv") == 0) saw_components = true;
  }
  CHECK(saw_components);
  CHECK(hgp_artifact_name(s, n) == nullptr);
  hgp_session_destroy(s);
}

TEST_CASE("argument and config errors carry statuses") {
  CHECK(hgp_session_create(nullptr, nullptr) == HGP_INVALID_ARGUMENT);
  hgp_session* s = nullptr;
  CHECK(hgp_session_create("nonsense = 1\n", &s) == HGP_CONFIG_ERROR);
  CHECK(s == nullptr);

  REQUIRE(hgp_session_create(kBoxfam, &s) == HGP_OK);
  CHECK(hgp_run(s, nullptr) == HGP_INVALID_ARGUMENT);
  CHECK(hgp_run(s, "explore") == HGP_CONFIG_ERROR);
  CHECK(std::string(hgp_last_error(s)).find("unknown command") != std::string::npos);
  hgp_session_destroy(s);
}

TEST_CASE("scope errors surface through the run status") {
  const char* cfg =
      "group = intlattice(1)\n"
      "chain = pow2(levels=2)\n"
      "cocycle = lattice\n"
      "max_r = 8\n";
  hgp_session* s = nullptr;
  REQUIRE(hgp_session_create(cfg, &s) == HGP_OK);
  CHECK(hgp_run(s, "forward") == HGP_SCOPE_ERROR);
  CHECK(hgp_last_error(s)[0] != '\0');
  CHECK(hgp_summary_pass(s) == -1);  // no completed run
  hgp_session_destroy(s);
}

TEST_CASE("forward to backward through the C surface") {
  const char* cfg =
      "group = intlattice(1)\n"
      "chain = pow2(levels=5)\n"
      "cocycle = lattice\n"
      "max_r = 4\n"
      "r_list = 2,4\n";
  hgp_session* s = nullptr;
  REQUIRE(hgp_session_create(cfg, &s) == HGP_OK);
  CHECK(hgp_run(s, "forward") == HGP_OK);
  CHECK(hgp_summary_pass(s) == 1);
  CHECK(hgp_run(s, "backward") == HGP_OK);
  CHECK(hgp_summary_pass(s) == 1);
  bool saw_psi = false;
  for (int i = 0; i < hgp_artifact_count(s); ++i) {
    if (std::strcmp(hgp_artifact_name(s, i), "psi_r4.csv") == 0) saw_psi = true;
  }
  CHECK(saw_psi);
  CHECK(std::strcmp(hgp_version(), "1.0.0") == 0);
  hgp_session_destroy(s);
}
