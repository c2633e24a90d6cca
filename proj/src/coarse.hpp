#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fibred.hpp"

namespace hgp {

// Integer control tables of a coarse map of families, indexed by source
// distance: m(d) <= d(f x, f y) <= M(d). Both monotone nondecreasing.
struct CoarseControls {
  std::vector<long long> m;
  std::vector<long long> M;

  long long domain() const { return static_cast<long long>(m.size()) - 1; }
};

// Level-wise map between the box families of two chains with shared controls.
class CoarseMapFamily {
 public:
  struct LevelMap {
    int src = 0;
    int dst = 0;
    std::function<Elem(const Elem&)> apply;
  };

  CoarseMapFamily(std::shared_ptr<const Chain> src, std::shared_ptr<const Chain> dst,
                  std::vector<LevelMap> maps, CoarseControls controls, std::string name);

  // Level n -> level n, identity on cosets, m = M = id.
  static CoarseMapFamily identity_maps(std::shared_ptr<const Chain> chain, long long domain);
  // Cyclic 2-power quotients: level n -> n+1, [x] -> [2x]; m = id, M = 2t.
  static CoarseMapFamily doubling_maps(std::shared_ptr<const Chain> chain, long long domain);

  const Chain& src() const { return *src_; }
  const Chain& dst() const { return *dst_; }
  std::shared_ptr<const Chain> src_ptr() const { return src_; }
  std::shared_ptr<const Chain> dst_ptr() const { return dst_; }
  const std::vector<LevelMap>& maps() const { return maps_; }
  const LevelMap* find(int src_level) const;
  const std::string& name() const { return name_; }

  long long m(long long t) const;  // uncovered distances are configuration errors
  long long M(long long t) const;
  long long control_domain() const { return controls_.domain(); }

 private:
  std::shared_ptr<const Chain> src_;
  std::shared_ptr<const Chain> dst_;
  std::vector<LevelMap> maps_;
  CoarseControls controls_;
  std::string name_;
};

struct CoarseReport {
  bool pass = true;
  bool sandwich_ok = true;
  bool m_unbounded = true;
  long long pairs_checked = 0;
  std::string witness;
};

// Sandwich check m(d(x,y)) <= d(f x, f y) <= M(d(x,y)) over all coset pairs
// within reach (full quotients when small, metric balls otherwise), plus a
// growth proxy for the properness of m.
CoarseReport verify_coarse(const CoarseMapFamily& fam, long long ball_radius,
                           long long m_growth_threshold = -1);

// Certificate pulled back along a coarse map of families: fibres over f(x),
// trivializations delegated at radius M(r)+1, controls rho1 o m / rho2 o M,
// exclusion inherited from the target at radius M(r)+1.
class PullbackCert : public FibredCert {
 public:
  PullbackCert(std::shared_ptr<const FibredCert> target, CoarseMapFamily map);

  const Chain& chain() const override { return map_.src(); }
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
  Rational section_image_dist_sq(long long r, int level, const std::vector<Elem>& C, const Elem& x,
                                 const Elem& y) const override;

  const FibredCert& target() const { return *target_; }
  const CoarseMapFamily& map() const { return map_; }
  long long delegated_radius(long long r) const;  // M(r) + 1

 private:
  const CoarseMapFamily::LevelMap& level_map(int src_level) const;
  std::vector<Elem> map_subset(const CoarseMapFamily::LevelMap& lm,
                               const std::vector<Elem>& C) const;

  std::shared_ptr<const FibredCert> target_;
  CoarseMapFamily map_;
  CertScope scope_;
  std::vector<int> levels_;
};

}  // namespace hgp
