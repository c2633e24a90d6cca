#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "chain.hpp"
#include "hilbert.hpp"

namespace hgp {

// Point of the fibre over a coset, stored in canonical form: rep is the fixed
// coset representative, vec the Hilbert vector adjusted by the orbit action.
struct FibrePoint {
  int level = 0;
  Elem coset;
  Elem rep;
  HilbertVec vec;
};

struct CertScope {
  long long max_r = 0;
  int max_level = 0;
  long long rho_domain = 0;  // controls table domain; >= max distance ever queried
};

// A fibred cofinitely-coarse embedding certificate over the box family of a
// chain: fibre field + section + trivialization oracle + controls + per-r
// exclusion list, all within an explicit certified scope.
class FibredCert {
 public:
  virtual ~FibredCert() = default;

  virtual const Chain& chain() const = 0;
  virtual std::vector<int> levels() const = 0;
  virtual CertScope scope() const = 0;

  // Levels of the finite excluded subfamily K_r (no claims are made there).
  virtual std::vector<int> excluded(long long r) const = 0;

  virtual Rational rho1_sq(long long t) const = 0;
  virtual Rational rho2_sq(long long t) const = 0;

  virtual FibrePoint section(int level, const Elem& coset) const = 0;
  virtual HilbertVec triv_apply(long long r, int level, const std::vector<Elem>& C, const Elem& x,
                                const FibrePoint& p) const = 0;
  virtual FibrePoint triv_invert(long long r, int level, const std::vector<Elem>& C, const Elem& x,
                                 const HilbertVec& v) const = 0;
  virtual Rational fibre_dist_sq(const FibrePoint& p, const FibrePoint& q) const = 0;

  // Distance of the trivialized section images of x and y under one covering
  // subset C. Implementations may shortcut this through their own structure;
  // the default goes through the trivialization oracle.
  virtual Rational section_image_dist_sq(long long r, int level, const std::vector<Elem>& C,
                                         const Elem& x, const Elem& y) const;
};

// Section-image distance through the trivialization oracle, bypassing any
// shortcut a certificate installs; used to cross-validate shortcuts.
Rational generic_section_image_dist_sq(const FibredCert& cert, long long r, int level,
                                       const std::vector<Elem>& C, const Elem& x, const Elem& y);

bool level_excluded(const FibredCert& cert, long long r, int level);
long long subset_diameter(const FibredCert& cert, int level, const std::vector<Elem>& C);

struct Cond1Pair {
  Elem x, y;
  long long d = 0;
  Rational attained_sq;
  bool ok = true;
};

struct Cond1Report {
  bool pass = true;
  std::vector<Cond1Pair> pairs;
  std::optional<Cond1Pair> witness;  // first failing pair
};

// Condition 1: rho1(d(x,y)) <= ||t_C(x)s(x) - t_C(y)s(y)|| <= rho2(d(x,y))
// for all pairs of C (compared on squares, exactly).
Cond1Report verify_condition1(const FibredCert& cert, int level, long long r,
                              const std::vector<Elem>& C);

struct OverlapWitness {
  bool ok = false;
  std::string error;
  Elem offending;
  Rational residual_sq;  // worst probe disagreement, exact
  std::vector<std::pair<HilbertVec, HilbertVec>> probe_map;  // probe -> image, from first x
};

// Condition 2: t_C1(x) o t_C2(x)^-1 is one affine isometry of H, independent
// of x in C1 and C2's overlap; compared extensionally on a deterministic
// probe set.
OverlapWitness verify_condition2(const FibredCert& cert, int level, long long r,
                                 const std::vector<Elem>& C1, const std::vector<Elem>& C2);

// Certificate over the glued box space: same fibre data, but the per-r
// exclusion is a bounded point set K_r instead of a subfamily.
class BoxSpaceCert {
 public:
  BoxSpaceCert(std::shared_ptr<const FibredCert> fam, BoxSpace space,
               std::vector<std::vector<BoxPoint>> k_r_by_radius);

  const FibredCert& family_cert() const { return *fam_; }
  std::shared_ptr<const FibredCert> family_cert_ptr() const { return fam_; }
  const BoxSpace& space() const { return space_; }
  const std::vector<BoxPoint>& K_r(long long r) const;

 private:
  std::shared_ptr<const FibredCert> fam_;
  BoxSpace space_;
  std::vector<std::vector<BoxPoint>> k_r_;  // index r, 0..max_r
};

struct TransferFailure {
  std::string reason;
};

// Transfer box family -> box space: K_r is the union of the components
// excluded at radius r, which must all be finite quotients.
std::variant<BoxSpaceCert, TransferFailure> family_to_boxspace(
    std::shared_ptr<const FibredCert> cert, const BoxSpace& space);

// Transfer box space -> box family: exclude exactly the components K_r
// meets.
std::shared_ptr<const FibredCert> boxspace_to_family(const BoxSpaceCert& cert);

}  // namespace hgp
