#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "coarse.hpp"
#include "pipeline.hpp"

using namespace hgp;

namespace {

std::shared_ptr<ForwardCert> z_cert(int depth, long long max_r, long long rho_domain = 0) {
  auto chain = std::make_shared<Chain>(Chain::pow2(Group::int_lattice(1), depth));
  return std::make_shared<ForwardCert>(chain, Cocycle::lattice(1),
                                       CertScope{max_r, 0, rho_domain});
}

}  // namespace

TEST_CASE("control tables are validated and bounds-checked") {
  auto chain = std::make_shared<Chain>(Chain::pow2(Group::int_lattice(1), 3));
  auto id = CoarseMapFamily::identity_maps(chain, 6);
  CHECK(id.m(4) == 4);
  CHECK(id.M(4) == 4);
  CHECK_THROWS_AS(id.m(7), ConfigError);
  CHECK_THROWS_AS(id.M(-1), ConfigError);

  CoarseControls bad;
  bad.m = {0, 2, 1};
  bad.M = {0, 2, 2};
  CHECK_THROWS_AS(CoarseMapFamily(chain, chain, {}, bad, "x"), ConfigError);
  CoarseControls crossed;
  crossed.m = {0, 3};
  crossed.M = {0, 2};
  CHECK_THROWS_AS(CoarseMapFamily(chain, chain, {}, crossed, "x"), ConfigError);
}

TEST_CASE("doubling halves nothing: image distances are exactly twice the source") {
  auto chain = std::make_shared<Chain>(Chain::pow2(Group::int_lattice(1), 5));
  auto dbl = CoarseMapFamily::doubling_maps(chain, 10);
  for (const auto& lm : dbl.maps()) {
    const Group& q = chain->level(lm.src).quotient;
    for (const Elem& x : q.enumerate_all()) {
      for (const Elem& y : q.enumerate_all()) {
        long long d = chain->coset_dist(lm.src, x, y);
        CHECK(chain->coset_dist(lm.dst, lm.apply(x), lm.apply(y)) == 2 * d);
      }
    }
  }
  CHECK(verify_coarse(dbl, 5).pass);
  CHECK(verify_coarse(CoarseMapFamily::identity_maps(chain, 10), 5).pass);
}

TEST_CASE("verifier rejects a constant map and a lying upper control") {
  auto chain = std::make_shared<Chain>(Chain::pow2(Group::int_lattice(1), 4));
  CoarseControls c;
  for (long long t = 0; t <= 8; ++t) {
    c.m.push_back(t);
    c.M.push_back(t);
  }
  std::vector<CoarseMapFamily::LevelMap> constant;
  constant.push_back({3, 3, [](const Elem&) { return Elem{{0}}; }});
  CoarseMapFamily fam(chain, chain, std::move(constant), c, "constant");
  CoarseReport rep = verify_coarse(fam, 5);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.sandwich_ok);
  CHECK_FALSE(rep.witness.empty());

  // doubling with M = t undershoots: image distances reach 2t
  std::vector<CoarseMapFamily::LevelMap> dbl;
  dbl.push_back({3, 4, [](const Elem& x) { return Elem{{(2 * x.c[0]) % 16}}; }});
  CoarseMapFamily lying(chain, chain, std::move(dbl), c, "lying");
  CHECK_FALSE(verify_coarse(lying, 5).sandwich_ok);
}

TEST_CASE("pullback along the identity changes nothing observable") {
  auto target = z_cert(5, 8, 16);
  auto map = CoarseMapFamily::identity_maps(target->chain_ptr(), 18);
  PullbackCert pb(target, map);
  CHECK(pb.scope().max_r >= 4);
  for (long long r : {2LL, 4LL}) {
    CHECK(pb.excluded(r + 0) == target->excluded(pb.delegated_radius(r)));
  }
  for (long long t = 0; t <= pb.scope().rho_domain; ++t) {
    CHECK(pb.rho1_sq(t) == target->rho1_sq(t));
    CHECK(pb.rho2_sq(t) == target->rho2_sq(t));
  }
  int level = pb.levels().back();
  const Group& q = pb.chain().level(level).quotient;
  std::vector<Elem> C = {Elem{{0}}, Elem{{1}}, Elem{{2}}};
  Cond1Report rep = verify_condition1(pb, level, 4, C);
  CHECK(rep.pass);
  OverlapWitness w = verify_condition2(pb, level, 4, C, {Elem{{1}}, Elem{{2}}, Elem{{3}}});
  CHECK(w.ok);
  (void)q;
}

TEST_CASE("pullback along doubling composes the controls") {
  auto target = z_cert(6, 17, 34);
  auto map = CoarseMapFamily::doubling_maps(target->chain_ptr(), 36);
  PullbackCert pb(target, map);
  CHECK(pb.scope().max_r == 8);
  CHECK(pb.delegated_radius(8) == 17);
  for (long long t = 0; t <= std::min<long long>(pb.scope().rho_domain, 10); ++t) {
    CHECK(pb.rho1_sq(t) == target->rho1_sq(t));       // m = id
    CHECK(pb.rho2_sq(t) == target->rho2_sq(2 * t));   // M = 2t
  }
  // only the deepest source level survives the radius-17 delegation at r=8
  int level = pb.levels().back();
  CHECK(level == 5);
  CHECK(pb.excluded(8) == std::vector<int>{1, 2, 3, 4});
  // fibres live over the doubled coset
  FibrePoint p = pb.section(level, Elem{{3}});
  CHECK(p.level == 6);
  CHECK(p.coset == Elem{{6}});

  std::vector<Elem> C = {Elem{{0}}, Elem{{1}}, Elem{{2}}, Elem{{3}}};
  Cond1Report rep = verify_condition1(pb, level, 8, C);
  CHECK(rep.pass);
  for (const auto& pr : rep.pairs) {
    // doubled distances, squared, through the lattice cocycle
    CHECK(pr.attained_sq == Rational(4 * pr.d * pr.d));
  }
  OverlapWitness w =
      verify_condition2(pb, level, 8, C, {Elem{{2}}, Elem{{3}}, Elem{{4}}, Elem{{5}}});
  CHECK(w.ok);
  CHECK(pb.section_image_dist_sq(8, level, C, Elem{{0}}, Elem{{3}}) ==
        generic_section_image_dist_sq(pb, 8, level, C, Elem{{0}}, Elem{{3}}));
}

TEST_CASE("pullback construction guards") {
  auto target = z_cert(4, 4);
  auto other_chain = std::make_shared<Chain>(Chain::pow2(Group::int_lattice(2), 3));
  CHECK_THROWS_AS(PullbackCert(target, CoarseMapFamily::identity_maps(other_chain, 8)),
                  ConfigError);
  // doubling needs headroom: M(r)+1 must stay certified
  auto tight = z_cert(4, 2);
  CHECK_THROWS_AS(PullbackCert(tight, CoarseMapFamily::doubling_maps(tight->chain_ptr(), 8)),
                  ScopeError);
}
