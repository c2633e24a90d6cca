#include "chain.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace hgp {

namespace {

Coord pow2ll(int n) { return Coord{1} << n; }

// Representative of residue r mod m in (-m/2, m/2], as a parent lattice coordinate.
Coord centered_rep(Coord r, Coord m) { return (2 * r > m) ? r - m : r; }

Elem heis_image_of_word(const Group& heis, const Elem& w) {
  static const Elem a{{1, 0, 0}}, b{{0, 1, 0}};
  Elem img = heis.identity();
  for (Coord v : w.c) {
    Elem gen = (std::llabs(v) == 1) ? a : b;
    if (v < 0) gen = heis.inverse(gen);
    img = heis.multiply(img, gen);
  }
  return img;
}

void repeat_letter(Coord letter, Coord count, std::vector<Coord>& out) {
  Coord lt = count >= 0 ? letter : -letter;
  for (Coord i = 0; i < std::llabs(count); ++i) out.push_back(lt);
}

}  // namespace

Chain Chain::pow2(const Group& parent, int levels) {
  if (levels < 1) throw ConfigError("pow2 chain needs levels >= 1");
  bool lattice = parent.kind() == GroupKind::IntLattice;
  bool fab = parent.kind() == GroupKind::FiniteAbelian;
  if (!lattice && !fab) throw ConfigError("pow2 chain requires intlattice or finiteabelian parent");
  int d = lattice ? parent.rank() : static_cast<int>(parent.moduli().size());
  if (fab) {
    for (Coord m : parent.moduli()) {
      Coord t = m;
      while (t % 2 == 0) t /= 2;
      if (t != 1) throw ConfigError("pow2 chain on finiteabelian needs 2-power moduli");
      if (m < pow2ll(levels)) throw ConfigError("pow2 chain deeper than moduli allow");
    }
  }
  Chain c(parent, "pow2(levels=" + std::to_string(levels) + ")");
  for (int n = 1; n <= levels; ++n) {
    Coord q = pow2ll(n);
    ChainLevel lv(Group::finite_abelian(std::vector<Coord>(d, q)));
    lv.name = "mod-" + std::to_string(q);
    lv.finite_quotient = true;
    lv.project = [q](const Elem& g) {
      Elem r = g;
      for (auto& v : r.c) {
        v %= q;
        if (v < 0) v += q;
      }
      return r;
    };
    lv.member = [q](const Elem& g) {
      for (Coord v : g.c) {
        if (v % q != 0) return false;
      }
      return true;
    };
    if (lattice) {
      lv.lift = [q](const Elem& coset) {
        Elem r = coset;
        for (auto& v : r.c) v = centered_rep(v, q);
        return r;
      };
    } else {
      auto mods = parent.moduli();
      lv.lift = [q, mods](const Elem& coset) {
        // shortest parent residue congruent to the coset mod q
        Elem r = coset;
        for (std::size_t i = 0; i < r.c.size(); ++i) {
          Coord m = mods[i];
          Coord best = r.c[i], best_len = std::min(best, m - best);
          for (Coord cand = r.c[i]; cand < m; cand += q) {
            Coord len = std::min(cand, m - cand);
            if (len < best_len || (len == best_len && cand < best)) {
              best = cand;
              best_len = len;
            }
          }
          r.c[i] = best;
        }
        return r;
      };
    }
    for (const Elem& g : parent.generators()) lv.gen_images.push_back(lv.project(g));
    c.levels_.push_back(std::move(lv));
  }
  for (auto& lv : c.levels_) {
    c.tables_.push_back(std::make_shared<WordLengthBfs>(lv.quotient, lv.gen_images));
  }
  return c;
}

Chain Chain::lcs(const Group& parent, int levels) {
  if (parent.kind() != GroupKind::FreeGroup || parent.rank() != 2)
    throw ConfigError("lcs chain requires free(2) parent");
  if (levels < 1 || levels > 2) throw ConfigError("lcs chain ships levels 1..2");
  Chain c(parent, "lcs(levels=" + std::to_string(levels) + ")");

  {  // gamma_2: abelianization kernel, quotient Z^2
    ChainLevel lv(Group::int_lattice(2));
    lv.name = "gamma2";
    lv.finite_quotient = false;
    lv.project = [](const Elem& w) {
      Elem r{{0, 0}};
      for (Coord v : w.c) r.c[std::llabs(v) - 1] += (v > 0 ? 1 : -1);
      return r;
    };
    lv.member = [project = lv.project](const Elem& w) {
      Elem img = project(w);
      return img.c[0] == 0 && img.c[1] == 0;
    };
    lv.lift = [](const Elem& v) {
      Elem w;
      repeat_letter(1, v.c[0], w.c);
      repeat_letter(2, v.c[1], w.c);
      return w;  // a^p b^q is already reduced
    };
    for (const Elem& g : parent.generators()) lv.gen_images.push_back(lv.project(g));
    c.levels_.push_back(std::move(lv));
  }
  if (levels >= 2) {  // gamma_3: quotient is the Heisenberg group
    ChainLevel lv(Group::heisenberg());
    lv.name = "gamma3";
    lv.finite_quotient = false;
    lv.foelner_capable = true;
    Group heis = lv.quotient;
    lv.project = [heis](const Elem& w) { return heis_image_of_word(heis, w); };
    lv.member = [heis](const Elem& w) {
      return heis.is_identity(heis_image_of_word(heis, w));
    };
    lv.lift = [grp = parent](const Elem& h) {
      // a^x b^y c^(z-xy) with c = [a,b]; image of a^x b^y is (x,y,xy).
      Coord x = h.c[0], y = h.c[1], z = h.c[2];
      std::vector<Coord> w;
      repeat_letter(1, x, w);
      repeat_letter(2, y, w);
      Elem word{std::move(w)};
      static const Elem comm{{1, 2, -1, -2}};  // a b a^-1 b^-1
      Elem cpow = grp.identity();
      Coord e = z - x * y;
      Elem step = e >= 0 ? comm : grp.inverse(comm);
      for (Coord i = 0; i < std::llabs(e); ++i) cpow = grp.multiply(cpow, step);
      return grp.multiply(word, cpow);
    };
    for (const Elem& g : parent.generators()) lv.gen_images.push_back(lv.project(g));
    c.levels_.push_back(std::move(lv));
  }
  for (auto& lv : c.levels_) {
    c.tables_.push_back(std::make_shared<WordLengthBfs>(lv.quotient, lv.gen_images));
  }
  return c;
}

const ChainLevel& Chain::level(int n) const {
  if (n < 1 || n > depth()) throw ScopeError("chain level " + std::to_string(n) + " out of range");
  return levels_[n - 1];
}

long long Chain::quotient_length(int n, const Elem& g) const {
  return coset_length(n, level(n).project(g));
}

long long Chain::coset_length(int n, const Elem& coset) const {
  level(n);
  return tables_[n - 1]->length(coset);
}

long long Chain::coset_dist(int n, const Elem& x, const Elem& y) const {
  const Group& q = level(n).quotient;
  return coset_length(n, q.multiply(q.inverse(x), y));
}

const WordLengthBfs& Chain::quotient_table(int n) const {
  level(n);
  return *tables_[n - 1];
}

std::optional<int> Chain::separation_certificate(long long R) const {
  auto ball = parent_.ball(R);
  for (int n = 1; n <= depth(); ++n) {
    bool ok = true;
    for (const Elem& g : ball) {
      if (!parent_.is_identity(g) && level(n).member(g)) {
        ok = false;
        break;
      }
    }
    if (ok) return n;
  }
  return std::nullopt;
}

long long Chain::separation_radius(int n, long long cap) const {
  const auto& lv = level(n);
  for (long long R = 1; R <= cap; ++R) {
    for (const Elem& g : parent_.sphere(R)) {
      if (lv.member(g)) return R - 1;
    }
  }
  return cap;
}

BoxFamily::BoxFamily(std::shared_ptr<const Chain> chain, std::vector<int> levels)
    : chain_(std::move(chain)), levels_(std::move(levels)) {
  for (int n : levels_) chain_->level(n);
  if (levels_.empty()) throw ConfigError("box family needs at least one level");
}

long long BoxSpace::distance(const BoxPoint& x, const BoxPoint& y) const {
  if (x.level == y.level) return fam_.dist(x.level, x.coset, y.coset);
  return fam_.coset_length(x.level, x.coset) + fam_.coset_length(y.level, y.coset) + x.level +
         y.level;
}

long long BoxSpace::component_separation(int n, int m) const {
  if (n == m) throw PreconditionError("component_separation needs n != m");
  fam_.chain().level(n);
  fam_.chain().level(m);
  return n + m;
}

BoxMetricReport check_metric_axioms(
    const std::vector<BoxPoint>& pts,
    const std::function<long long(const BoxPoint&, const BoxPoint&)>& dist, long long samples,
    std::uint64_t seed) {
  BoxMetricReport rep;
  if (pts.empty()) return rep;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
  auto check_triple = [&](const BoxPoint& a, const BoxPoint& b, const BoxPoint& c) {
    ++rep.triples_checked;
    long long ab = dist(a, b), ba = dist(b, a), ac = dist(a, c), bc = dist(b, c);
    if (ab != ba) rep.violations.push_back({"symmetry", a, b, c});
    if (ab < 0 || (ab == 0) != (a == b)) rep.violations.push_back({"identity", a, b, c});
    if (ac > ab + bc) rep.violations.push_back({"triangle", a, b, c});
  };
  for (long long i = 0; i < samples && rep.violations.size() < 32; ++i) {
    check_triple(pts[pick(rng)], pts[pick(rng)], pts[pick(rng)]);
  }
  return rep;
}

static std::vector<BoxPoint> identity_ball_points(const BoxSpace& space, long long radius) {
  std::vector<BoxPoint> pts;
  const BoxFamily& fam = space.family();
  for (int n : fam.levels()) {
    for (const Elem& e : fam.chain().quotient_table(n).ball(radius)) {
      pts.push_back(BoxPoint{n, e});
    }
  }
  return pts;
}

BoxMetricReport verify_box_metric(const BoxSpace& space, long long samples, std::uint64_t seed,
                                  long long ball_radius) {
  auto pts = identity_ball_points(space, ball_radius);
  auto dist = [&space](const BoxPoint& a, const BoxPoint& b) { return space.distance(a, b); };
  return check_metric_axioms(pts, dist, samples, seed);
}

ChainProbeReport probe_chain_invariants(const Chain& chain, long long radius) {
  ChainProbeReport rep;
  const Group& G = chain.parent();
  auto ball = G.ball(radius);
  auto conj_ball = G.ball(std::min<long long>(radius, 4));
  std::ostringstream detail;
  for (int n = 1; n <= chain.depth(); ++n) {
    const auto& lv = chain.level(n);
    for (const Elem& g : ball) {
      if (n < chain.depth() && chain.level(n + 1).member(g) && !lv.member(g)) {
        rep.nesting = false;
        detail << "nesting fails at level " << n << " elem " << G.to_string(g) << "; ";
      }
      if (lv.member(g)) {
        for (const Elem& x : conj_ball) {
          Elem conj = G.multiply(G.multiply(x, g), G.inverse(x));
          if (!lv.member(conj)) {
            rep.normality = false;
            detail << "normality fails at level " << n << "; ";
            break;
          }
        }
      }
      if (chain.quotient_length(n, g) > G.word_length(g)) {
        rep.lipschitz = false;
        detail << "l_n > l at level " << n << " elem " << G.to_string(g) << "; ";
      }
    }
    const Group& Q = lv.quotient;
    for (const Elem& g : conj_ball) {
      for (const Elem& h : conj_ball) {
        Elem lhs = lv.project(G.multiply(g, h));
        Elem rhs = Q.multiply(lv.project(g), lv.project(h));
        if (lhs != rhs) {
          rep.homomorphism = false;
          detail << "projection not a homomorphism at level " << n << "; ";
          break;
        }
      }
      if (!rep.homomorphism) break;
    }
  }
  rep.detail = detail.str();
  return rep;
}

Chain parse_chain_spec(const Group& parent, const std::string& spec) {
  auto paren = spec.find('(');
  std::string name = spec.substr(0, paren);
  int levels = 1;
  if (paren != std::string::npos) {
    if (spec.back() != ')') throw ConfigError("bad chain spec: " + spec);
    std::string body = spec.substr(paren + 1, spec.size() - paren - 2);
    auto eq = body.find('=');
    std::string key = body.substr(0, eq);
    if (key != "levels") throw ConfigError("bad chain spec argument: " + body);
    levels = std::stoi(body.substr(eq + 1));
  }
  if (name == "pow2") return Chain::pow2(parent, levels);
  if (name == "lcs") return Chain::lcs(parent, levels);
  throw ConfigError("unknown chain: " + name);
}

}  // namespace hgp
