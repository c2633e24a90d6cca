#include "fibred.hpp"

#include <algorithm>
#include <variant>

namespace hgp {

Rational FibredCert::section_image_dist_sq(long long r, int level, const std::vector<Elem>& C,
                                           const Elem& x, const Elem& y) const {
  HilbertVec u = triv_apply(r, level, C, x, section(level, x));
  HilbertVec v = triv_apply(r, level, C, y, section(level, y));
  return dist_sq(u, v);
}

Rational generic_section_image_dist_sq(const FibredCert& cert, long long r, int level,
                                       const std::vector<Elem>& C, const Elem& x, const Elem& y) {
  HilbertVec u = cert.triv_apply(r, level, C, x, cert.section(level, x));
  HilbertVec v = cert.triv_apply(r, level, C, y, cert.section(level, y));
  return dist_sq(u, v);
}

bool level_excluded(const FibredCert& cert, long long r, int level) {
  auto ex = cert.excluded(r);
  return std::find(ex.begin(), ex.end(), level) != ex.end();
}

long long subset_diameter(const FibredCert& cert, int level, const std::vector<Elem>& C) {
  long long diam = 0;
  for (std::size_t i = 0; i < C.size(); ++i) {
    for (std::size_t j = i + 1; j < C.size(); ++j) {
      diam = std::max(diam, cert.chain().coset_dist(level, C[i], C[j]));
    }
  }
  return diam;
}

namespace {

void check_scope(const FibredCert& cert, int level, long long r, const std::vector<Elem>& C) {
  if (r < 1 || r > cert.scope().max_r) {
    throw ScopeError("radius " + std::to_string(r) + " outside certified scope");
  }
  auto lv = cert.levels();
  if (std::find(lv.begin(), lv.end(), level) == lv.end()) {
    throw ScopeError("level " + std::to_string(level) + " outside certified scope");
  }
  if (level_excluded(cert, r, level)) {
    throw ScopeError("component at level " + std::to_string(level) +
                     " is excluded at radius " + std::to_string(r));
  }
  if (C.empty()) throw PreconditionError("empty subset");
  if (subset_diameter(cert, level, C) >= r) {
    throw PreconditionError("subset diameter not less than r");
  }
}

}  // namespace

Cond1Report verify_condition1(const FibredCert& cert, int level, long long r,
                              const std::vector<Elem>& C) {
  check_scope(cert, level, r, C);
  Cond1Report rep;
  std::vector<HilbertVec> images;
  images.reserve(C.size());
  for (const Elem& x : C) {
    images.push_back(cert.triv_apply(r, level, C, x, cert.section(level, x)));
  }
  for (std::size_t i = 0; i < C.size(); ++i) {
    for (std::size_t j = i + 1; j < C.size(); ++j) {
      Cond1Pair p;
      p.x = C[i];
      p.y = C[j];
      p.d = cert.chain().coset_dist(level, C[i], C[j]);
      p.attained_sq = dist_sq(images[i], images[j]);
      p.ok = cert.rho1_sq(p.d) <= p.attained_sq && p.attained_sq <= cert.rho2_sq(p.d);
      if (!p.ok && !rep.witness) rep.witness = p;
      rep.pass = rep.pass && p.ok;
      rep.pairs.push_back(std::move(p));
    }
  }
  return rep;
}

OverlapWitness verify_condition2(const FibredCert& cert, int level, long long r,
                                 const std::vector<Elem>& C1, const std::vector<Elem>& C2) {
  check_scope(cert, level, r, C1);
  check_scope(cert, level, r, C2);
  std::vector<Elem> overlap;
  for (const Elem& x : C1) {
    if (std::find(C2.begin(), C2.end(), x) != C2.end()) overlap.push_back(x);
  }
  if (overlap.empty()) throw PreconditionError("subsets do not overlap");
  std::sort(overlap.begin(), overlap.end());

  // Deterministic probe set: origin, the C2-side section images, and unit
  // vectors on the basis keys those images touch.
  std::vector<HilbertVec> probes;
  probes.push_back(HilbertVec{});
  std::vector<BasisKey> keys;
  for (const Elem& x : overlap) {
    HilbertVec img = cert.triv_apply(r, level, C2, x, cert.section(level, x));
    for (const auto& [k, v] : img.entries()) keys.push_back(k);
    probes.push_back(std::move(img));
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  if (keys.size() > 12) keys.resize(12);
  for (const auto& k : keys) {
    HilbertVec e;
    e.add(k, 1);
    probes.push_back(std::move(e));
  }

  OverlapWitness w;
  w.residual_sq = 0;
  std::vector<std::vector<HilbertVec>> images(overlap.size());
  for (std::size_t xi = 0; xi < overlap.size(); ++xi) {
    const Elem& x = overlap[xi];
    for (const HilbertVec& v : probes) {
      FibrePoint p = cert.triv_invert(r, level, C2, x, v);
      images[xi].push_back(cert.triv_apply(r, level, C1, x, p));
    }
  }
  for (std::size_t xi = 1; xi < overlap.size(); ++xi) {
    for (std::size_t pi = 0; pi < probes.size(); ++pi) {
      Rational resid = dist_sq(images[xi][pi], images[0][pi]);
      if (resid > w.residual_sq) w.residual_sq = resid;
      if (resid != 0) {
        w.error = "trivialization overlap maps disagree";
        w.offending = overlap[xi];
      }
    }
  }
  // the common map must be an isometry: probe distances are preserved
  for (std::size_t i = 0; i < probes.size() && w.error.empty(); ++i) {
    for (std::size_t j = i + 1; j < probes.size(); ++j) {
      if (dist_sq(images[0][i], images[0][j]) != dist_sq(probes[i], probes[j])) {
        w.error = "overlap map is not isometric on probes";
        w.offending = overlap[0];
        break;
      }
    }
  }
  w.ok = w.error.empty();
  if (w.ok) {
    for (std::size_t pi = 0; pi < probes.size(); ++pi) {
      w.probe_map.emplace_back(probes[pi], images[0][pi]);
    }
  }
  return w;
}

BoxSpaceCert::BoxSpaceCert(std::shared_ptr<const FibredCert> fam, BoxSpace space,
                           std::vector<std::vector<BoxPoint>> k_r_by_radius)
    : fam_(std::move(fam)), space_(std::move(space)), k_r_(std::move(k_r_by_radius)) {}

const std::vector<BoxPoint>& BoxSpaceCert::K_r(long long r) const {
  if (r < 0 || r >= static_cast<long long>(k_r_.size())) {
    throw ScopeError("radius outside box-space certificate scope");
  }
  return k_r_[r];
}

std::variant<BoxSpaceCert, TransferFailure> family_to_boxspace(
    std::shared_ptr<const FibredCert> cert, const BoxSpace& space) {
  std::vector<std::vector<BoxPoint>> k_r;
  k_r.emplace_back();  // nothing is certified at radius 0
  for (long long r = 1; r <= cert->scope().max_r; ++r) {
    std::vector<BoxPoint> pts;
    for (int n : cert->excluded(r)) {
      const ChainLevel& lv = cert->chain().level(n);
      if (!lv.finite_quotient) {
        return TransferFailure{"component at level " + std::to_string(n) +
                               " is unbounded; box-space transfer needs bounded components"};
      }
      for (const Elem& e : lv.quotient.enumerate_all()) pts.push_back(BoxPoint{n, e});
    }
    k_r.push_back(std::move(pts));
  }
  return BoxSpaceCert(std::move(cert), space, std::move(k_r));
}

namespace {

// Same certificate with the exclusion subfamily recomputed from a box-space
// exclusion set.
class ReexcludedCert : public FibredCert {
 public:
  ReexcludedCert(std::shared_ptr<const FibredCert> inner,
                 std::vector<std::vector<int>> excluded_levels)
      : inner_(std::move(inner)), excluded_(std::move(excluded_levels)) {}

  const Chain& chain() const override { return inner_->chain(); }
  std::vector<int> levels() const override { return inner_->levels(); }
  CertScope scope() const override { return inner_->scope(); }
  std::vector<int> excluded(long long r) const override {
    if (r < 0 || r >= static_cast<long long>(excluded_.size())) {
      throw ScopeError("radius outside certificate scope");
    }
    return excluded_[r];
  }
  Rational rho1_sq(long long t) const override { return inner_->rho1_sq(t); }
  Rational rho2_sq(long long t) const override { return inner_->rho2_sq(t); }
  FibrePoint section(int level, const Elem& coset) const override {
    return inner_->section(level, coset);
  }
  HilbertVec triv_apply(long long r, int level, const std::vector<Elem>& C, const Elem& x,
                        const FibrePoint& p) const override {
    return inner_->triv_apply(r, level, C, x, p);
  }
  FibrePoint triv_invert(long long r, int level, const std::vector<Elem>& C, const Elem& x,
                         const HilbertVec& v) const override {
    return inner_->triv_invert(r, level, C, x, v);
  }
  Rational fibre_dist_sq(const FibrePoint& p, const FibrePoint& q) const override {
    return inner_->fibre_dist_sq(p, q);
  }

 private:
  std::shared_ptr<const FibredCert> inner_;
  std::vector<std::vector<int>> excluded_;
};

}  // namespace

std::shared_ptr<const FibredCert> boxspace_to_family(const BoxSpaceCert& cert) {
  std::vector<std::vector<int>> excl;
  excl.emplace_back();
  for (long long r = 1; r <= cert.family_cert().scope().max_r; ++r) {
    std::vector<int> levels;
    for (const BoxPoint& p : cert.K_r(r)) {
      if (std::find(levels.begin(), levels.end(), p.level) == levels.end()) {
        levels.push_back(p.level);
      }
    }
    std::sort(levels.begin(), levels.end());
    excl.push_back(std::move(levels));
  }
  return std::make_shared<ReexcludedCert>(cert.family_cert_ptr(), std::move(excl));
}

}  // namespace hgp
