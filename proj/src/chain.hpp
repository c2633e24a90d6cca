#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "group.hpp"

namespace hgp {

// One level G_n of a nested normal chain: membership predicate, quotient
// group with the images of the parent generators, projection and a canonical
// coordinate-based lift (a set-theoretic section of the projection).
struct ChainLevel {
  explicit ChainLevel(Group q) : quotient(std::move(q)) {}

  std::string name;
  Group quotient;
  std::vector<Elem> gen_images;  // aligned with parent generators()
  std::function<Elem(const Elem&)> project;
  std::function<bool(const Elem&)> member;
  std::function<Elem(const Elem&)> lift;
  bool finite_quotient = false;
  bool foelner_capable = false;  // infinite amenable quotient with shipped box sets
};

class Chain {
 public:
  // G = Z^d or a finite abelian 2-power group, G_n = (2^n Z)^d.
  static Chain pow2(const Group& parent, int levels);
  // G = F_2, lower central series: gamma_2 (quotient Z^2), gamma_3 (quotient Heisenberg).
  static Chain lcs(const Group& parent, int levels);

  const Group& parent() const { return parent_; }
  int depth() const { return static_cast<int>(levels_.size()); }
  const ChainLevel& level(int n) const;  // 1-based
  const std::string& spec() const { return spec_; }

  // Word length of pi_n(g) in the quotient Cayley graph on image generators.
  long long quotient_length(int n, const Elem& g) const;
  long long coset_length(int n, const Elem& coset) const;
  long long coset_dist(int n, const Elem& x, const Elem& y) const;
  const WordLengthBfs& quotient_table(int n) const;

  // Smallest level n0 with ball(R) intersect G_n0 = {1}; nullopt if no
  // shipped level separates radius R.
  std::optional<int> separation_certificate(long long R) const;
  // Largest R <= cap with ball(R) intersect G_n = {1}.
  long long separation_radius(int n, long long cap) const;

 private:
  Chain(Group parent, std::string spec) : parent_(std::move(parent)), spec_(std::move(spec)) {}

  Group parent_;
  std::string spec_;
  std::vector<ChainLevel> levels_;
  std::vector<std::shared_ptr<WordLengthBfs>> tables_;
};

struct BoxPoint {
  int level;
  Elem coset;
  bool operator==(const BoxPoint& o) const { return level == o.level && coset == o.coset; }
  bool operator<(const BoxPoint& o) const {
    if (level != o.level) return level < o.level;
    return coset < o.coset;
  }
};

class BoxFamily {
 public:
  BoxFamily(std::shared_ptr<const Chain> chain, std::vector<int> levels);

  const Chain& chain() const { return *chain_; }
  std::shared_ptr<const Chain> chain_ptr() const { return chain_; }
  const std::vector<int>& levels() const { return levels_; }
  long long coset_length(int n, const Elem& coset) const { return chain_->coset_length(n, coset); }
  long long dist(int n, const Elem& x, const Elem& y) const { return chain_->coset_dist(n, x, y); }

 private:
  std::shared_ptr<const Chain> chain_;
  std::vector<int> levels_;
};

class BoxSpace {
 public:
  explicit BoxSpace(BoxFamily fam) : fam_(std::move(fam)) {}

  const BoxFamily& family() const { return fam_; }

  // d': d_n within a component, l_n(x)+l_m(y)+n+m across components.
  long long distance(const BoxPoint& x, const BoxPoint& y) const;

  // inf d'(G/G_n, G/G_m) = n + m, attained at the identity cosets.
  long long component_separation(int n, int m) const;

 private:
  BoxFamily fam_;
};

struct MetricViolation {
  std::string axiom;
  BoxPoint a, b, c;
};

struct BoxMetricReport {
  long long triples_checked = 0;
  std::vector<MetricViolation> violations;
};

// Metric axioms on random triples of a point set, with an arbitrary distance
// (used both for d' and for adversarial fakes in tests).
BoxMetricReport check_metric_axioms(const std::vector<BoxPoint>& pts,
                                    const std::function<long long(const BoxPoint&, const BoxPoint&)>& dist,
                                    long long samples, std::uint64_t seed);

BoxMetricReport verify_box_metric(const BoxSpace& space, long long samples, std::uint64_t seed,
                                  long long ball_radius = 5);

struct ChainProbeReport {
  bool nesting = true;
  bool normality = true;
  bool homomorphism = true;
  bool lipschitz = true;  // l_n([g]) <= l(g)
  std::string detail;
};

ChainProbeReport probe_chain_invariants(const Chain& chain, long long radius);

Chain parse_chain_spec(const Group& parent, const std::string& spec);

}  // namespace hgp
