#include "coarse.hpp"

#include <algorithm>

namespace hgp {

CoarseMapFamily::CoarseMapFamily(std::shared_ptr<const Chain> src,
                                 std::shared_ptr<const Chain> dst, std::vector<LevelMap> maps,
                                 CoarseControls controls, std::string name)
    : src_(std::move(src)),
      dst_(std::move(dst)),
      maps_(std::move(maps)),
      controls_(std::move(controls)),
      name_(std::move(name)) {
  if (controls_.m.size() != controls_.M.size() || controls_.m.empty()) {
    throw ConfigError("coarse control tables must be nonempty and aligned");
  }
  for (std::size_t t = 0; t < controls_.m.size(); ++t) {
    if (controls_.m[t] > controls_.M[t]) throw ConfigError("m exceeds M at distance " + std::to_string(t));
    if (t > 0 && (controls_.m[t] < controls_.m[t - 1] || controls_.M[t] < controls_.M[t - 1])) {
      throw ConfigError("coarse control tables must be monotone");
    }
  }
  for (const LevelMap& lm : maps_) {
    if (lm.src < 1 || lm.src > src_->depth() || lm.dst < 1 || lm.dst > dst_->depth()) {
      throw ConfigError("level map outside chain depth");
    }
    if (!lm.apply) throw ConfigError("level map without a coset function");
  }
}

const CoarseMapFamily::LevelMap* CoarseMapFamily::find(int src_level) const {
  for (const LevelMap& lm : maps_) {
    if (lm.src == src_level) return &lm;
  }
  return nullptr;
}

long long CoarseMapFamily::m(long long t) const {
  if (t < 0 || t > controls_.domain()) {
    throw ConfigError("distance " + std::to_string(t) + " not covered by coarse control tables");
  }
  return controls_.m[static_cast<std::size_t>(t)];
}

long long CoarseMapFamily::M(long long t) const {
  if (t < 0 || t > controls_.domain()) {
    throw ConfigError("distance " + std::to_string(t) + " not covered by coarse control tables");
  }
  return controls_.M[static_cast<std::size_t>(t)];
}

CoarseMapFamily CoarseMapFamily::identity_maps(std::shared_ptr<const Chain> chain,
                                               long long domain) {
  std::vector<LevelMap> maps;
  for (int n = 1; n <= chain->depth(); ++n) {
    maps.push_back(LevelMap{n, n, [](const Elem& x) { return x; }});
  }
  CoarseControls c;
  for (long long t = 0; t <= domain; ++t) {
    c.m.push_back(t);
    c.M.push_back(t);
  }
  return CoarseMapFamily(chain, chain, std::move(maps), std::move(c), "identity");
}

CoarseMapFamily CoarseMapFamily::doubling_maps(std::shared_ptr<const Chain> chain,
                                               long long domain) {
  if (chain->parent().kind() != GroupKind::IntLattice || chain->parent().rank() != 1) {
    throw ConfigError("doubling maps need the rank-1 integer lattice chain");
  }
  std::vector<LevelMap> maps;
  for (int n = 1; n + 1 <= chain->depth(); ++n) {
    const Group& q = chain->level(n + 1).quotient;
    Coord mod = q.moduli().at(0);
    maps.push_back(LevelMap{n, n + 1, [mod](const Elem& x) {
                              Coord v = (2 * x.c.at(0)) % mod;
                              return Elem{{v}};
                            }});
  }
  CoarseControls c;
  for (long long t = 0; t <= domain; ++t) {
    c.m.push_back(t);
    c.M.push_back(2 * t);
  }
  return CoarseMapFamily(chain, chain, std::move(maps), std::move(c), "doubling");
}

CoarseReport verify_coarse(const CoarseMapFamily& fam, long long ball_radius,
                           long long m_growth_threshold) {
  CoarseReport rep;
  long long dom = fam.control_domain();
  if (m_growth_threshold < 0) m_growth_threshold = (dom + 1) / 2;
  rep.m_unbounded = fam.m(dom) >= m_growth_threshold;
  if (!rep.m_unbounded) {
    rep.pass = false;
    rep.witness = "m(" + std::to_string(dom) + ") below growth threshold";
  }
  for (const auto& lm : fam.maps()) {
    const ChainLevel& sl = fam.src().level(lm.src);
    std::vector<Elem> pts;
    if (sl.finite_quotient && sl.quotient.order() <= 4096) {
      pts = sl.quotient.enumerate_all();
    } else {
      pts = fam.src().quotient_table(lm.src).ball(ball_radius);
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        long long d = fam.src().coset_dist(lm.src, pts[i], pts[j]);
        if (d > dom) continue;
        long long dy = fam.dst().coset_dist(lm.dst, lm.apply(pts[i]), lm.apply(pts[j]));
        ++rep.pairs_checked;
        if (dy < fam.m(d) || dy > fam.M(d)) {
          rep.sandwich_ok = false;
          rep.pass = false;
          if (rep.witness.empty()) {
            rep.witness = "level " + std::to_string(lm.src) + ": d=" + std::to_string(d) +
                          " maps to d=" + std::to_string(dy);
          }
        }
      }
    }
  }
  return rep;
}

PullbackCert::PullbackCert(std::shared_ptr<const FibredCert> target, CoarseMapFamily map)
    : target_(std::move(target)), map_(std::move(map)) {
  if (map_.dst().spec() != target_->chain().spec() ||
      !map_.dst().parent().same_group(target_->chain().parent())) {
    throw ConfigError("coarse map target chain does not match the certificate chain");
  }
  auto tgt_levels = target_->levels();
  for (const auto& lm : map_.maps()) {
    if (std::find(tgt_levels.begin(), tgt_levels.end(), lm.dst) != tgt_levels.end()) {
      levels_.push_back(lm.src);
    }
  }
  std::sort(levels_.begin(), levels_.end());
  if (levels_.empty()) throw ConfigError("no source level maps into the certificate scope");

  long long max_r = 0;
  while (max_r + 1 <= map_.control_domain() &&
         map_.M(max_r + 1) + 1 <= target_->scope().max_r) {
    ++max_r;
  }
  if (max_r < 1) throw ScopeError("target certificate scope too small to pull back");
  long long rho_dom = 0;
  // controls query rho1(m(t)) and rho2(M(t)); both must stay in range
  while (rho_dom + 1 <= map_.control_domain() &&
         map_.M(rho_dom + 1) <= target_->scope().rho_domain) {
    ++rho_dom;
  }
  scope_.max_r = max_r;
  scope_.max_level = levels_.back();
  scope_.rho_domain = rho_dom;
}

long long PullbackCert::delegated_radius(long long r) const {
  if (r < 1 || r > scope_.max_r) throw ScopeError("radius outside pullback scope");
  return map_.M(r) + 1;
}

const CoarseMapFamily::LevelMap& PullbackCert::level_map(int src_level) const {
  const auto* lm = map_.find(src_level);
  if (!lm || std::find(levels_.begin(), levels_.end(), src_level) == levels_.end()) {
    throw ScopeError("level " + std::to_string(src_level) + " outside pullback scope");
  }
  return *lm;
}

std::vector<Elem> PullbackCert::map_subset(const CoarseMapFamily::LevelMap& lm,
                                           const std::vector<Elem>& C) const {
  std::vector<Elem> out;
  out.reserve(C.size());
  for (const Elem& x : C) out.push_back(lm.apply(x));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<int> PullbackCert::excluded(long long r) const {
  long long rr = delegated_radius(r);
  std::vector<int> out;
  for (int n : levels_) {
    if (level_excluded(*target_, rr, level_map(n).dst)) out.push_back(n);
  }
  return out;
}

Rational PullbackCert::rho1_sq(long long t) const {
  if (t < 0 || t > scope_.rho_domain) throw ScopeError("distance outside pullback control domain");
  return target_->rho1_sq(map_.m(t));
}

Rational PullbackCert::rho2_sq(long long t) const {
  if (t < 0 || t > scope_.rho_domain) throw ScopeError("distance outside pullback control domain");
  return target_->rho2_sq(map_.M(t));
}

FibrePoint PullbackCert::section(int level, const Elem& coset) const {
  const auto& lm = level_map(level);
  return target_->section(lm.dst, lm.apply(coset));
}

HilbertVec PullbackCert::triv_apply(long long r, int level, const std::vector<Elem>& C,
                                    const Elem& x, const FibrePoint& p) const {
  const auto& lm = level_map(level);
  return target_->triv_apply(delegated_radius(r), lm.dst, map_subset(lm, C), lm.apply(x), p);
}

FibrePoint PullbackCert::triv_invert(long long r, int level, const std::vector<Elem>& C,
                                     const Elem& x, const HilbertVec& v) const {
  const auto& lm = level_map(level);
  return target_->triv_invert(delegated_radius(r), lm.dst, map_subset(lm, C), lm.apply(x), v);
}

Rational PullbackCert::fibre_dist_sq(const FibrePoint& p, const FibrePoint& q) const {
  return target_->fibre_dist_sq(p, q);
}

Rational PullbackCert::section_image_dist_sq(long long r, int level, const std::vector<Elem>& C,
                                             const Elem& x, const Elem& y) const {
  const auto& lm = level_map(level);
  return target_->section_image_dist_sq(delegated_radius(r), lm.dst, map_subset(lm, C),
                                        lm.apply(x), lm.apply(y));
}

}  // namespace hgp
