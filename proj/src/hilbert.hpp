#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "group.hpp"
#include "rational.hpp"

namespace hgp {

// Basis key of the sparse inner-product space. Lattice coordinates use
// {axis}; Cayley-tree edges use {generator, word...} where the word is the
// endpoint closer to the identity and the generator points away from it.
struct BasisKey {
  std::vector<Coord> v;
  bool operator<(const BasisKey& o) const { return v < o.v; }
  bool operator==(const BasisKey& o) const { return v == o.v; }
};

// Finitely supported exact-rational vector; no explicit zero entries.
class HilbertVec {
 public:
  void add(const BasisKey& k, const Rational& coeff);
  Rational get(const BasisKey& k) const;
  const std::map<BasisKey, Rational>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  HilbertVec& operator+=(const HilbertVec& o);
  HilbertVec& operator-=(const HilbertVec& o);
  friend HilbertVec operator+(HilbertVec a, const HilbertVec& b) { return a += b; }
  friend HilbertVec operator-(HilbertVec a, const HilbertVec& b) { return a -= b; }
  bool operator==(const HilbertVec& o) const { return entries_ == o.entries_; }

  Rational inner(const HilbertVec& o) const;
  Rational norm_sq() const { return inner(*this); }

 private:
  std::map<BasisKey, Rational> entries_;
};

Rational dist_sq(const HilbertVec& a, const HilbertVec& b);

// Linear part of an affine isometry. Catalog-closed: either the identity or
// the signed edge-key permutation induced by left translation on the Cayley
// tree of a free group.
struct LinearPart {
  enum class Kind { Identity, FreeTranslate };
  Kind kind = Kind::Identity;
  std::optional<Group> grp;  // free group, for FreeTranslate
  Elem g;

  static LinearPart identity() { return {}; }
  static LinearPart free_translate(const Group& grp, Elem g);

  HilbertVec apply(const HilbertVec& v) const;
  LinearPart compose(const LinearPart& o) const;  // this after o
  bool operator==(const LinearPart& o) const;
};

struct AffineIsometry {
  HilbertVec b;
  LinearPart L;

  HilbertVec apply(const HilbertVec& v) const { return b + L.apply(v); }
  // (b,L) after (b',L') = (b + L(b'), L L')
  AffineIsometry compose(const AffineIsometry& o) const {
    return AffineIsometry{b + L.apply(o.b), L.compose(o.L)};
  }
  bool operator==(const AffineIsometry& o) const { return b == o.b && L == o.L; }
};

// Affine isometric action alpha(g) = b(g) + L(g)(.) of a catalog group.
class Cocycle {
 public:
  enum class Tag { LatticeTranslation, FreeWall };

  static Cocycle lattice(int d);
  static Cocycle free_wall(int k);

  Tag tag() const { return tag_; }
  const Group& group() const { return grp_; }
  std::string spec_string() const;

  HilbertVec b(const Elem& g) const;
  LinearPart linear(const Elem& g) const;
  AffineIsometry alpha(const Elem& g) const;
  Rational b_norm_sq(const Elem& g) const;

 private:
  Cocycle(Tag t, Group g) : tag_(t), grp_(std::move(g)) {}
  Tag tag_;
  Group grp_;
};

// Monotone control tables on integer arguments 0..domain, stored as squared
// norms so everything stays rational.
struct ControlTables {
  std::vector<Rational> rho1_sq;
  std::vector<Rational> rho2_sq;
  long long search_radius = 0;
  bool rho1_capped = false;  // finite-group cap applied

  long long domain() const { return static_cast<long long>(rho1_sq.size()) - 1; }
};

// rho1(x) = min{||b(g)||: l(g) >= x} truncated to a search ball, rho2(x) =
// max{||b(g)||: l(g) <= x}; finite groups cap rho1 at the max attained norm.
ControlTables properness_profile(const Cocycle& c, long long R, long long search_radius);

struct CndResult {
  bool verdict = false;
  double extremal_eigenvalue = 0.0;
  bool tie_broken_by_sampling = false;
  bool sampling_found_positive = false;
  long long samples = 0;
  bool sampling_agrees_with_eigen = true;
};

// Conditionally-negative-definite check of a symmetric zero-diagonal kernel:
// eigenvalue route on the mean-centered kernel, cross-validated by exact
// mean-zero quadratic forms. Exact sampling evidence wins ties.
CndResult cnd_check(const std::vector<std::vector<Rational>>& kernel, double tol,
                    std::uint64_t seed, long long samples = 10000);

struct CndFunctionResult {
  bool verdict = false;
  bool symmetric = true;
  double worst_extremal = 0.0;
  long long subsets_checked = 0;
  std::string method;
};

// CND check of k(g,h) = psi(g^-1 h) over finite subsets of G. For
// local_radius, only subsets of diameter < local_radius are used; the subset
// list covers all maximal windows where the group geometry allows it and is
// padded with seeded random subsets otherwise.
CndFunctionResult cnd_function_check(const Group& G, const std::map<Elem, Rational>& psi,
                                     std::optional<long long> local_radius, long long table_radius,
                                     double tol, std::uint64_t seed);

}  // namespace hgp
