#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coarse.hpp"
#include "pipeline.hpp"

namespace hgp {

// Plain key = value run configuration; later keys override earlier ones,
// '#' starts a comment.
struct RunConfig {
  std::string group = "intlattice(1)";
  std::string chain = "pow2(levels=4)";
  std::string cocycle = "lattice";
  long long max_r = 4;
  int max_level = 0;       // 0: full chain depth
  long long rho_domain = 0;  // 0: max_r
  std::vector<long long> r_list;  // defaults to {max_r}
  MeanSpec mean;                  // uniform unless "foelner:N"
  std::uint64_t seed = 1;
  double tol = 1e-9;
  long long samples = 10000;
  long long ball_cap = 0;       // 0: library default
  long long sample_radius = 3;  // verification reach on infinite quotients
  std::string map_name = "identity";
  long long map_domain = 0;  // 0: 2*max_r + 2
  std::string certificate_path;
  std::optional<std::pair<long long, Rational>> rho2_override;  // adversarial knob

  static RunConfig parse(const std::string& text);
};

// One batch run: builds the requested objects, verifies, and renders a
// deterministic JSON report plus named CSV artifacts.
class Session {
 public:
  explicit Session(RunConfig cfg) : cfg_(std::move(cfg)) {}

  // command: boxfam | forward | backward | verify-cert | pullback
  void run(const std::string& command);

  const std::string& report_json() const { return report_; }
  const std::vector<std::pair<std::string, std::string>>& artifacts() const { return artifacts_; }
  bool summary_pass() const { return pass_; }
  bool has_run() const { return has_run_; }

 private:
  RunConfig cfg_;
  std::string report_;
  std::vector<std::pair<std::string, std::string>> artifacts_;
  bool pass_ = false;
  bool has_run_ = false;
};

std::string rational_str(const Rational& r);

}  // namespace hgp
