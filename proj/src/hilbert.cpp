#include "hilbert.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <random>

#include "errors.hpp"

namespace hgp {

void HilbertVec::add(const BasisKey& k, const Rational& coeff) {
  if (coeff == 0) return;
  auto [it, inserted] = entries_.emplace(k, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) entries_.erase(it);
  }
}

Rational HilbertVec::get(const BasisKey& k) const {
  auto it = entries_.find(k);
  return it == entries_.end() ? Rational(0) : it->second;
}

HilbertVec& HilbertVec::operator+=(const HilbertVec& o) {
  for (const auto& [k, v] : o.entries_) add(k, v);
  return *this;
}

HilbertVec& HilbertVec::operator-=(const HilbertVec& o) {
  for (const auto& [k, v] : o.entries_) add(k, -v);
  return *this;
}

Rational HilbertVec::inner(const HilbertVec& o) const {
  const auto& small = entries_.size() <= o.entries_.size() ? entries_ : o.entries_;
  const auto& big = entries_.size() <= o.entries_.size() ? o.entries_ : entries_;
  Rational s = 0;
  for (const auto& [k, v] : small) {
    auto it = big.find(k);
    if (it != big.end()) s += v * it->second;
  }
  return s;
}

Rational dist_sq(const HilbertVec& a, const HilbertVec& b) { return (a - b).norm_sq(); }

LinearPart LinearPart::free_translate(const Group& grp, Elem g) {
  if (grp.kind() != GroupKind::FreeGroup) {
    throw PreconditionError("free_translate needs a free group");
  }
  LinearPart L;
  L.kind = Kind::FreeTranslate;
  L.grp = grp;
  L.g = std::move(g);
  return L;
}

namespace {

// Canonical signed key of the tree edge between adjacent reduced words p and
// q = p * t. Positive orientation points away from the identity.
std::pair<BasisKey, int> edge_key(const Group& grp, const Elem& p, const Elem& q) {
  const Elem* base = &p;
  const Elem* far = &q;
  int sign = 1;
  if (q.c.size() < p.c.size()) {
    base = &q;
    far = &p;
    sign = -1;
  }
  Elem t = grp.multiply(grp.inverse(*base), *far);
  BasisKey k;
  k.v.reserve(base->c.size() + 1);
  k.v.push_back(t.c.at(0));
  k.v.insert(k.v.end(), base->c.begin(), base->c.end());
  return {std::move(k), sign};
}

}  // namespace

HilbertVec LinearPart::apply(const HilbertVec& v) const {
  if (kind == Kind::Identity) return v;
  HilbertVec out;
  for (const auto& [k, coeff] : v.entries()) {
    Elem u{std::vector<Coord>(k.v.begin() + 1, k.v.end())};
    Elem us = grp->multiply(u, Elem{{k.v[0]}});
    Elem p = grp->multiply(g, u);
    Elem q = grp->multiply(g, us);
    auto [nk, sign] = edge_key(*grp, p, q);
    out.add(nk, sign > 0 ? coeff : -coeff);
  }
  return out;
}

LinearPart LinearPart::compose(const LinearPart& o) const {
  if (kind == Kind::Identity) return o;
  if (o.kind == Kind::Identity) return *this;
  if (!grp->same_group(*o.grp)) throw StructureError("composing linear parts of different groups");
  return free_translate(*grp, grp->multiply(g, o.g));
}

bool LinearPart::operator==(const LinearPart& o) const {
  if (kind != o.kind) return false;
  if (kind == Kind::Identity) return true;
  return grp->same_group(*o.grp) && g == o.g;
}

Cocycle Cocycle::lattice(int d) { return Cocycle(Tag::LatticeTranslation, Group::int_lattice(d)); }

Cocycle Cocycle::free_wall(int k) { return Cocycle(Tag::FreeWall, Group::free_group(k)); }

std::string Cocycle::spec_string() const {
  return tag_ == Tag::LatticeTranslation ? "lattice" : "free-wall";
}

HilbertVec Cocycle::b(const Elem& g) const {
  HilbertVec v;
  if (tag_ == Tag::LatticeTranslation) {
    for (std::size_t i = 0; i < g.c.size(); ++i) v.add(BasisKey{{Coord(i)}}, Rational(g.c[i]));
    return v;
  }
  // Signed indicators of the geodesic edges from 1 to g; prefixes of a
  // reduced word strictly grow, so every edge is crossed away from the root.
  Elem u = grp_.identity();
  for (Coord letter : g.c) {
    BasisKey k;
    k.v.reserve(u.c.size() + 1);
    k.v.push_back(letter);
    k.v.insert(k.v.end(), u.c.begin(), u.c.end());
    v.add(k, 1);
    u.c.push_back(letter);
  }
  return v;
}

LinearPart Cocycle::linear(const Elem& g) const {
  if (tag_ == Tag::LatticeTranslation) return LinearPart::identity();
  return LinearPart::free_translate(grp_, g);
}

AffineIsometry Cocycle::alpha(const Elem& g) const { return AffineIsometry{b(g), linear(g)}; }

Rational Cocycle::b_norm_sq(const Elem& g) const { return b(g).norm_sq(); }

ControlTables properness_profile(const Cocycle& c, long long R, long long search_radius) {
  if (search_radius < R) throw PreconditionError("properness search radius below table domain");
  const Group& G = c.group();
  std::vector<std::optional<Rational>> sphere_min(search_radius + 1), sphere_max(search_radius + 1);
  for (long long n = 0; n <= search_radius; ++n) {
    for (const Elem& g : G.sphere(n)) {
      Rational nsq = c.b_norm_sq(g);
      if (!sphere_min[n] || nsq < *sphere_min[n]) sphere_min[n] = nsq;
      if (!sphere_max[n] || nsq > *sphere_max[n]) sphere_max[n] = nsq;
    }
  }
  ControlTables t;
  t.search_radius = search_radius;
  Rational running_max = 0;
  for (long long n = 0; n <= R; ++n) {
    if (sphere_max[n]) running_max = std::max(running_max, *sphere_max[n]);
    t.rho2_sq.push_back(running_max);
  }
  Rational overall_max = running_max;
  for (long long n = R + 1; n <= search_radius; ++n) {
    if (sphere_max[n]) overall_max = std::max(overall_max, *sphere_max[n]);
  }
  std::vector<std::optional<Rational>> tail(search_radius + 2);
  for (long long n = search_radius; n >= 0; --n) {
    tail[n] = tail[n + 1];
    if (sphere_min[n] && (!tail[n] || *sphere_min[n] < *tail[n])) tail[n] = sphere_min[n];
  }
  for (long long n = 0; n <= R; ++n) {
    if (tail[n]) {
      t.rho1_sq.push_back(*tail[n]);
    } else {
      // finite group: {l(g) >= x} is empty, cap at the max attained norm
      t.rho1_sq.push_back(overall_max);
      t.rho1_capped = true;
    }
  }
  return t;
}

CndResult cnd_check(const std::vector<std::vector<Rational>>& kernel, double tol,
                    std::uint64_t seed, long long samples) {
  const std::size_t m = kernel.size();
  if (m == 0) throw PreconditionError("empty kernel");
  for (std::size_t i = 0; i < m; ++i) {
    if (kernel[i].size() != m) throw ConfigError("kernel not square");
    if (kernel[i][i] != 0) throw ConfigError("kernel diagonal not zero");
    for (std::size_t j = 0; j < m; ++j) {
      if (kernel[i][j] != kernel[j][i]) throw ConfigError("kernel not symmetric");
    }
  }
  CndResult res;
  res.samples = samples;

  Eigen::MatrixXd K(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) K(i, j) = to_double(kernel[i][j]);
  }
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(m, m) -
                      Eigen::MatrixXd::Constant(m, m, 1.0 / static_cast<double>(m));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P * K * P);
  res.extremal_eigenvalue = es.eigenvalues().maxCoeff();
  bool eigen_verdict = res.extremal_eigenvalue <= tol;

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long long> coeff(-9, 9);
  for (long long s = 0; s < samples; ++s) {
    std::vector<Int> lam(m);
    Int sum = 0;
    for (std::size_t i = 0; i < m; ++i) {
      lam[i] = coeff(rng);
      sum += lam[i];
    }
    bool nonzero = false;
    for (std::size_t i = 0; i < m; ++i) {
      lam[i] = lam[i] * Int(static_cast<long long>(m)) - sum;  // exact mean-zero
      if (lam[i] != 0) nonzero = true;
    }
    if (!nonzero) continue;
    Rational form = 0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        if (lam[i] != 0 && lam[j] != 0) form += 2 * Rational(lam[i] * lam[j]) * kernel[i][j];
      }
    }
    if (form > 0) {
      res.sampling_found_positive = true;
      break;
    }
  }
  bool sampling_verdict = !res.sampling_found_positive;
  res.sampling_agrees_with_eigen = (eigen_verdict == sampling_verdict);
  if (std::abs(res.extremal_eigenvalue) < tol) {
    res.verdict = sampling_verdict;
    res.tie_broken_by_sampling = !res.sampling_agrees_with_eigen;
  } else {
    // exact positive evidence beats a marginal eigen verdict
    res.verdict = eigen_verdict && sampling_verdict;
  }
  return res;
}

namespace {

Rational psi_lookup(const std::map<Elem, Rational>& psi, const Elem& g) {
  auto it = psi.find(g);
  if (it == psi.end()) throw ScopeError("psi table has no entry for required element");
  return it->second;
}

}  // namespace

CndFunctionResult cnd_function_check(const Group& G, const std::map<Elem, Rational>& psi,
                                     std::optional<long long> local_radius, long long table_radius,
                                     double tol, std::uint64_t seed) {
  CndFunctionResult res;
  for (const auto& [g, val] : psi) {
    auto it = psi.find(G.inverse(g));
    if (it == psi.end() || it->second != val) {
      res.symmetric = false;
      res.verdict = false;
      res.method = "symmetry-failed";
      return res;
    }
  }

  long long r = local_radius.value_or(2 * table_radius + 1);
  long long point_radius = local_radius ? table_radius : table_radius / 2;
  std::vector<std::vector<Elem>> subsets;
  auto pts = G.ball(point_radius);

  if (G.kind() == GroupKind::IntLattice && G.rank() == 1) {
    // maximal width-(r-1) windows: every diameter-< r subset of the ball
    // sits inside one of them
    Coord lo = -point_radius, hi = point_radius;
    for (Coord k = lo; k <= std::max(lo, hi - (r - 1)); ++k) {
      std::vector<Elem> w;
      for (Coord x = k; x <= std::min(hi, k + r - 1); ++x) w.push_back(Elem{{x}});
      if (w.size() >= 2) subsets.push_back(w);
    }
    res.method = "maximal-windows";
  } else {
    // all close pairs, plus translated balls of radius floor((r-1)/2)
    for (const Elem& x : pts) {
      for (const Elem& y : pts) {
        if (x < y && G.dist(x, y) < r) subsets.push_back({x, y});
      }
    }
    long long t = (r - 1) / 2;
    if (t > 0) {
      for (const Elem& c : pts) {
        std::vector<Elem> s;
        for (const Elem& h : G.ball(t)) s.push_back(G.multiply(c, h));
        subsets.push_back(s);
      }
    }
    res.method = "pairs+translated-balls";
  }

  std::mt19937_64 rng(seed);
  res.verdict = true;
  for (const auto& sub : subsets) {
    std::vector<std::vector<Rational>> K(sub.size(), std::vector<Rational>(sub.size(), 0));
    for (std::size_t i = 0; i < sub.size(); ++i) {
      for (std::size_t j = 0; j < sub.size(); ++j) {
        if (i != j) K[i][j] = psi_lookup(psi, G.multiply(G.inverse(sub[i]), sub[j]));
      }
    }
    auto c = cnd_check(K, tol, rng(), 2000);
    ++res.subsets_checked;
    res.worst_extremal = std::max(res.worst_extremal, c.extremal_eigenvalue);
    if (!c.verdict) res.verdict = false;
  }
  return res;
}

}  // namespace hgp
