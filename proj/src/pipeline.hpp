#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "fibred.hpp"

namespace hgp {

// Certificate built from a proper cocycle: fibres are orbit spaces of
// G_n acting on (coset x H), the section is [a] -> [(a, b(a))], and the
// trivializations come from unique short lifts against a basepoint.
class ForwardCert : public FibredCert {
 public:
  ForwardCert(std::shared_ptr<const Chain> chain, Cocycle cocycle, CertScope scope);

  const Chain& chain() const override { return *chain_; }
  std::shared_ptr<const Chain> chain_ptr() const { return chain_; }
  std::vector<int> levels() const override { return levels_; }
  CertScope scope() const override { return scope_; }
  std::vector<int> excluded(long long r) const override;
  Rational rho1_sq(long long t) const override;
  Rational rho2_sq(long long t) const override;
  FibrePoint section(int level, const Elem& coset) const override;
  HilbertVec triv_apply(long long r, int level, const std::vector<Elem>& C, const Elem& x,
                        const FibrePoint& p) const override;
  FibrePoint triv_invert(long long r, int level, const std::vector<Elem>& C, const Elem& x,
                         const HilbertVec& v) const override;
  Rational fibre_dist_sq(const FibrePoint& p, const FibrePoint& q) const override;

  // Equal to the generic triv_apply route by the cocycle identity, but works
  // on short lifts only; tests assert the equality.
  Rational section_image_dist_sq(long long r, int level, const std::vector<Elem>& C, const Elem& x,
                                 const Elem& y) const override;

  const Cocycle& cocycle() const { return coc_; }
  const ControlTables& controls() const { return controls_; }
  int n_r(long long r) const;                      // minimal level with 3r-separation
  Elem lift_elem(long long r, int level, const std::vector<Elem>& C, const Elem& x) const;
  Elem basepoint(int level, const std::vector<Elem>& C) const;

 private:
  struct LiftTable {
    // quotient element -> unique parent preimage in ball(r-1)
    std::unordered_map<Elem, Elem, ElemHash> to_parent;
  };
  const LiftTable& lift_table(int level, long long r) const;
  std::pair<Elem, Elem> basepoint_and_lift(long long r, int level, const std::vector<Elem>& C,
                                           const Elem& x) const;
  Elem short_lift(long long r, int level, const std::vector<Elem>& C, const Elem& x) const;

  std::shared_ptr<const Chain> chain_;
  Cocycle coc_;
  CertScope scope_;
  std::vector<int> levels_;
  std::map<long long, int> nr_;
  ControlTables controls_;

  mutable std::mutex lift_mu_;
  mutable std::map<std::pair<int, long long>, std::shared_ptr<LiftTable>> lifts_;
};

// Minimal quotient level usable for the backward construction at radius r:
// not excluded by the certificate and separating the 2r-ball.
std::optional<int> choose_backward_level(const FibredCert& cert, long long r);

// k_r on one quotient. Values only claimed for pairs at distance < r; zero
// by convention otherwise. When double_check is set the value is recomputed
// with a second covering subset and exact equality is asserted.
Rational kr_eval(const FibredCert& cert, int level, long long r, const Elem& u, const Elem& v,
                 bool double_check = false);

struct MeanSpec {
  bool foelner = false;
  long long box_size = 0;  // Foelner box parameter N
};

// Heisenberg Foelner box {|x|,|y| <= N, |z| <= N^2}.
std::vector<Elem> foelner_box(long long N);
// Right-translation defect |F symdiff Fg| / |F|.
Rational foelner_delta(const Group& heis, long long N, const Elem& g);

struct PhiValue {
  Rational value;
  Rational defect_bound;  // |phi(x) - phi(x^-1)| is bounded by this
  Rational delta;         // Foelner defect used for the bound (0 in uniform mode)
};

PhiValue build_phi(const FibredCert& cert, int level, long long r, const MeanSpec& mean,
                   const Elem& coset);

struct PsiTable {
  long long r = 0;
  int level = 0;
  MeanSpec mean;
  std::map<Elem, Rational> values;         // on {g : l(g) < r}; zero outside by convention
  std::map<Elem, Rational> defect_bounds;  // per element, Foelner mode
};

PsiTable build_psi(const FibredCert& cert, long long r, const MeanSpec& mean);

struct LimitTable {
  std::map<Elem, Rational> values;  // stabilized entries only
  std::set<Elem> unstable;          // covered twice but last two values differ
  std::set<Elem> undercovered;      // fewer than two covering tables
};

// Pointwise stabilization over tables with increasing radii; flags rather
// than extrapolates.
LimitTable limit_psi(const std::vector<PsiTable>& tables);

struct EnvelopeReport {
  bool pass = true;
  long long checked = 0;
  std::string witness;
};

// (rho1(l(g)))^2 <= psi(g) <= (rho2(l(g)))^2 for every table entry.
EnvelopeReport envelope_check(const FibredCert& cert, const std::map<Elem, Rational>& psi);

}  // namespace hgp
