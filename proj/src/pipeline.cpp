#include "pipeline.hpp"

#include <algorithm>
#include <unordered_set>

namespace hgp {

ForwardCert::ForwardCert(std::shared_ptr<const Chain> chain, Cocycle cocycle, CertScope scope)
    : chain_(std::move(chain)), coc_(std::move(cocycle)), scope_(scope) {
  if (!coc_.group().same_group(chain_->parent())) {
    throw ConfigError("cocycle group does not match chain parent group");
  }
  if (scope_.max_r < 1) throw ConfigError("certificate scope needs max_r >= 1");
  if (scope_.max_level <= 0) scope_.max_level = chain_->depth();
  if (scope_.max_level > chain_->depth()) {
    throw ConfigError("certificate scope exceeds chain depth");
  }
  if (scope_.rho_domain < scope_.max_r) scope_.rho_domain = scope_.max_r;
  for (int n = 1; n <= scope_.max_level; ++n) levels_.push_back(n);
  for (long long r = 1; r <= scope_.max_r; ++r) {
    std::optional<int> found;
    for (int n : levels_) {
      if (chain_->separation_radius(n, 3 * r) >= 3 * r) {
        found = n;
        break;
      }
    }
    if (!found) {
      throw ScopeError("no shipped level separates the 3r-ball at r = " + std::to_string(r));
    }
    nr_[r] = *found;
  }
  controls_ = properness_profile(coc_, scope_.rho_domain, 2 * scope_.rho_domain);
}

int ForwardCert::n_r(long long r) const {
  auto it = nr_.find(r);
  if (it == nr_.end()) throw ScopeError("radius outside certified scope");
  return it->second;
}

std::vector<int> ForwardCert::excluded(long long r) const {
  int cut = n_r(r);
  std::vector<int> out;
  for (int n : levels_) {
    if (n < cut) out.push_back(n);
  }
  return out;
}

Rational ForwardCert::rho1_sq(long long t) const {
  if (t < 0 || t > controls_.domain()) throw ScopeError("distance outside control table domain");
  return controls_.rho1_sq[static_cast<std::size_t>(t)];
}

Rational ForwardCert::rho2_sq(long long t) const {
  if (t < 0 || t > controls_.domain()) throw ScopeError("distance outside control table domain");
  return controls_.rho2_sq[static_cast<std::size_t>(t)];
}

FibrePoint ForwardCert::section(int level, const Elem& coset) const {
  const ChainLevel& lv = chain_->level(level);
  Elem rep = lv.lift(coset);
  if (lv.project(rep) != coset) throw StructureError("lift is not a section of the projection");
  return FibrePoint{level, coset, rep, coc_.b(rep)};
}

const ForwardCert::LiftTable& ForwardCert::lift_table(int level, long long r) const {
  std::lock_guard<std::mutex> lock(lift_mu_);
  auto key = std::make_pair(level, r);
  auto it = lifts_.find(key);
  if (it != lifts_.end()) return *it->second;
  auto tab = std::make_shared<LiftTable>();
  const ChainLevel& lv = chain_->level(level);
  for (const Elem& h : chain_->parent().ball(r - 1)) {
    auto [pit, inserted] = tab->to_parent.emplace(lv.project(h), h);
    if (!inserted) {
      throw StructureError("projection not injective on the short-lift ball at level " +
                           std::to_string(level));
    }
  }
  it = lifts_.emplace(key, std::move(tab)).first;
  return *it->second;
}

std::pair<Elem, Elem> ForwardCert::basepoint_and_lift(long long r, int level,
                                                      const std::vector<Elem>& C,
                                                      const Elem& x) const {
  if (C.empty()) throw PreconditionError("empty covering subset");
  const Elem& c0 = *std::min_element(C.begin(), C.end());
  Elem a0 = chain_->level(level).lift(c0);
  const ChainLevel& lv = chain_->level(level);
  const Group& Q = lv.quotient;
  Elem rel = Q.multiply(Q.inverse(c0), x);
  const LiftTable& tab = lift_table(level, r);
  auto it = tab.to_parent.find(rel);
  if (it == tab.to_parent.end()) {
    throw PreconditionError("point not within radius of the covering subset basepoint");
  }
  return {std::move(a0), it->second};
}

Elem ForwardCert::short_lift(long long r, int level, const std::vector<Elem>& C,
                             const Elem& x) const {
  return basepoint_and_lift(r, level, C, x).second;
}

Elem ForwardCert::lift_elem(long long r, int level, const std::vector<Elem>& C,
                            const Elem& x) const {
  auto [a0, h] = basepoint_and_lift(r, level, C, x);
  return chain_->parent().multiply(a0, h);
}

Elem ForwardCert::basepoint(int level, const std::vector<Elem>& C) const {
  if (C.empty()) throw PreconditionError("empty covering subset");
  const Elem& c0 = *std::min_element(C.begin(), C.end());
  return chain_->level(level).lift(c0);
}

HilbertVec ForwardCert::triv_apply(long long r, int level, const std::vector<Elem>& C,
                                   const Elem& x, const FibrePoint& p) const {
  if (p.level != level || p.coset != x) {
    throw PreconditionError("fibre point does not sit over the trivialized coset");
  }
  const Group& G = chain_->parent();
  Elem z = lift_elem(r, level, C, x);
  Elem w = G.multiply(z, G.inverse(p.rep));
  if (!chain_->level(level).member(w)) {
    throw StructureError("lift discrepancy escapes the chain subgroup");
  }
  return coc_.alpha(w).apply(p.vec);
}

FibrePoint ForwardCert::triv_invert(long long r, int level, const std::vector<Elem>& C,
                                    const Elem& x, const HilbertVec& v) const {
  const Group& G = chain_->parent();
  const ChainLevel& lv = chain_->level(level);
  Elem rep = lv.lift(x);
  Elem z = lift_elem(r, level, C, x);
  Elem g = G.multiply(rep, G.inverse(z));
  if (!lv.member(g)) throw StructureError("lift discrepancy escapes the chain subgroup");
  return FibrePoint{level, x, std::move(rep), coc_.alpha(g).apply(v)};
}

Rational ForwardCert::fibre_dist_sq(const FibrePoint& p, const FibrePoint& q) const {
  if (p.level != q.level || p.coset != q.coset) {
    throw PreconditionError("fibre distance needs points of the same fibre");
  }
  const Group& G = chain_->parent();
  Elem g = G.multiply(q.rep, G.inverse(p.rep));
  return dist_sq(q.vec, coc_.alpha(g).apply(p.vec));
}

Rational ForwardCert::section_image_dist_sq(long long r, int level, const std::vector<Elem>& C,
                                            const Elem& x, const Elem& y) const {
  // Trivialized section images are b(a0 h); the common b(a0) + L(a0) prefix
  // cancels isometrically, leaving ||b(h_x) - b(h_y)||.
  Elem hx = short_lift(r, level, C, x);
  Elem hy = short_lift(r, level, C, y);
  return dist_sq(coc_.b(hx), coc_.b(hy));
}

std::optional<int> choose_backward_level(const FibredCert& cert, long long r) {
  for (int n : cert.levels()) {
    if (level_excluded(cert, r, n)) continue;
    if (cert.chain().separation_radius(n, 2 * r) >= 2 * r) return n;
  }
  return std::nullopt;
}

namespace {

// Third coset forming a diameter-< r covering subset with {u, v}; lex-least
// candidate, preferring one below min(u, v) so the basepoint changes.
std::optional<Elem> third_point(const Chain& chain, int level, long long r, const Elem& u,
                                const Elem& v) {
  const Group& Q = chain.level(level).quotient;
  std::vector<Elem> cands;
  for (const Elem& g : chain.quotient_table(level).ball(r - 1)) {
    Elem w = Q.multiply(u, g);
    if (w == u || w == v) continue;
    if (chain.coset_dist(level, w, u) < r && chain.coset_dist(level, w, v) < r) {
      cands.push_back(std::move(w));
    }
  }
  if (cands.empty()) return std::nullopt;
  std::sort(cands.begin(), cands.end());
  const Elem& lo = std::min(u, v);
  for (const Elem& w : cands) {
    if (w < lo) return w;
  }
  return cands.front();
}

}  // namespace

Rational kr_eval(const FibredCert& cert, int level, long long r, const Elem& u, const Elem& v,
                 bool double_check) {
  if (u == v) return 0;
  long long d = cert.chain().coset_dist(level, u, v);
  if (d >= r) return 0;  // zero outside the claimed range by convention
  std::vector<Elem> C1 = {u, v};
  std::sort(C1.begin(), C1.end());
  Rational val = cert.section_image_dist_sq(r, level, C1, u, v);
  if (double_check) {
    if (auto w = third_point(cert.chain(), level, r, u, v)) {
      std::vector<Elem> C2 = {u, v, *w};
      std::sort(C2.begin(), C2.end());
      Rational val2 = cert.section_image_dist_sq(r, level, C2, u, v);
      if (val2 != val) {
        throw StructureError("k_r value depends on the covering subset");
      }
    }
  }
  return val;
}

std::vector<Elem> foelner_box(long long N) {
  if (N < 1) throw ConfigError("Foelner box parameter must be positive");
  std::vector<Elem> box;
  box.reserve(static_cast<std::size_t>((2 * N + 1) * (2 * N + 1) * (2 * N * N + 1)));
  for (Coord x = -N; x <= N; ++x) {
    for (Coord y = -N; y <= N; ++y) {
      for (Coord z = -N * N; z <= N * N; ++z) box.push_back(Elem{{x, y, z}});
    }
  }
  return box;
}

Rational foelner_delta(const Group& heis, long long N, const Elem& g) {
  if (heis.kind() != GroupKind::Heisenberg) {
    throw PreconditionError("Foelner boxes are shipped for the Heisenberg quotient only");
  }
  std::vector<Elem> box = foelner_box(N);
  std::unordered_set<Elem, ElemHash> in_box(box.begin(), box.end());
  long long inter = 0;
  for (const Elem& f : box) {
    if (in_box.count(heis.multiply(f, g))) ++inter;
  }
  long long total = static_cast<long long>(box.size());
  return Rational(2 * (total - inter)) / total;
}

PhiValue build_phi(const FibredCert& cert, int level, long long r, const MeanSpec& mean,
                   const Elem& coset) {
  const Chain& chain = cert.chain();
  const ChainLevel& lv = chain.level(level);
  if (chain.coset_length(level, coset) >= r) {
    throw ScopeError("phi is only claimed on cosets of length below r");
  }
  PhiValue out;
  out.delta = 0;
  out.defect_bound = 0;
  if (mean.foelner) {
    if (!lv.foelner_capable) {
      throw ConfigError("level " + std::to_string(level) + " has no shipped Foelner boxes");
    }
    std::vector<Elem> box = foelner_box(mean.box_size);
    Rational sum = 0;
    for (const Elem& t : box) {
      sum += kr_eval(cert, level, r, t, lv.quotient.multiply(t, coset));
    }
    out.value = sum / static_cast<long long>(box.size());
    out.delta = foelner_delta(lv.quotient, mean.box_size, coset);
    out.defect_bound = out.delta * cert.rho2_sq(chain.coset_length(level, coset));
  } else {
    if (!lv.finite_quotient) {
      throw ConfigError("uniform averaging needs a finite quotient; use a Foelner mean");
    }
    std::vector<Elem> all = lv.quotient.enumerate_all();
    Rational sum = 0;
    for (const Elem& t : all) {
      sum += kr_eval(cert, level, r, t, lv.quotient.multiply(t, coset));
    }
    out.value = sum / static_cast<long long>(all.size());
  }
  return out;
}

PsiTable build_psi(const FibredCert& cert, long long r, const MeanSpec& mean) {
  auto level = choose_backward_level(cert, r);
  if (!level) {
    throw ScopeError("no shipped level separates the 2r-ball at r = " + std::to_string(r));
  }
  const Chain& chain = cert.chain();
  const Group& G = chain.parent();
  PsiTable table;
  table.r = r;
  table.level = *level;
  table.mean = mean;
  const ChainLevel& lv = chain.level(*level);
  for (const Elem& g : G.ball(r - 1)) {
    // 2r-separation makes the projection isometric on this ball
    if (chain.quotient_length(*level, g) != G.word_length(g)) {
      throw StructureError("projection fails to be isometric on the r-ball");
    }
    PhiValue phi = build_phi(cert, *level, r, mean, lv.project(g));
    table.values[g] = phi.value;
    if (mean.foelner) table.defect_bounds[g] = phi.defect_bound;
  }
  return table;
}

LimitTable limit_psi(const std::vector<PsiTable>& tables) {
  std::vector<const PsiTable*> ordered;
  for (const auto& t : tables) ordered.push_back(&t);
  std::sort(ordered.begin(), ordered.end(),
            [](const PsiTable* a, const PsiTable* b) { return a->r < b->r; });
  std::set<Elem> keys;
  for (const PsiTable* t : ordered) {
    for (const auto& [g, v] : t->values) keys.insert(g);
  }
  LimitTable out;
  for (const Elem& g : keys) {
    std::vector<Rational> seen;
    for (const PsiTable* t : ordered) {
      auto it = t->values.find(g);
      if (it != t->values.end()) seen.push_back(it->second);
    }
    if (seen.size() < 2) {
      out.undercovered.insert(g);
    } else if (seen[seen.size() - 1] == seen[seen.size() - 2]) {
      out.values[g] = seen.back();
    } else {
      out.unstable.insert(g);
    }
  }
  return out;
}

EnvelopeReport envelope_check(const FibredCert& cert, const std::map<Elem, Rational>& psi) {
  EnvelopeReport rep;
  const Group& G = cert.chain().parent();
  for (const auto& [g, val] : psi) {
    long long l = G.word_length(g);
    ++rep.checked;
    if (!(cert.rho1_sq(l) <= val && val <= cert.rho2_sq(l))) {
      rep.pass = false;
      if (rep.witness.empty()) rep.witness = G.to_string(g);
    }
  }
  return rep;
}

}  // namespace hgp
