#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <map>

#include "hilbert.hpp"

using namespace hgp;

TEST_CASE("sparse vectors prune zeros and compute inner products") {
  HilbertVec v;
  v.add(BasisKey{{0}}, Rational(2, 3));
  v.add(BasisKey{{1}}, 1);
  v.add(BasisKey{{0}}, Rational(-2, 3));
  CHECK(v.entries().size() == 1);
  CHECK(v.get(BasisKey{{0}}) == 0);
  HilbertVec w;
  w.add(BasisKey{{1}}, Rational(1, 2));
  w.add(BasisKey{{2}}, 5);
  CHECK(v.inner(w) == Rational(1, 2));
  CHECK((v + w).norm_sq() == Rational(9, 4) + 25);
  CHECK(dist_sq(v, v) == 0);
}

TEST_CASE("lattice cocycle is a homomorphism with trivial linear part") {
  Cocycle c = Cocycle::lattice(2);
  const Group& Z2 = c.group();
  for (const Elem& g : Z2.ball(3)) {
    CHECK(c.b_norm_sq(g) == Rational(g.c[0] * g.c[0] + g.c[1] * g.c[1]));
    for (const Elem& h : Z2.ball(3)) {
      CHECK(c.b(Z2.multiply(g, h)) == c.b(g) + c.b(h));
    }
  }
}

TEST_CASE("wall cocycle: squared norm is the word length") {
  Cocycle c = Cocycle::free_wall(2);
  const Group& F2 = c.group();
  for (const Elem& g : F2.ball(6)) {
    CHECK(c.b_norm_sq(g) == Rational(F2.word_length(g)));
  }
}

TEST_CASE("wall cocycle identity b(gh) = b(g) + L(g)b(h)") {
  Cocycle c = Cocycle::free_wall(2);
  const Group& F2 = c.group();
  auto ball = F2.ball(3);
  for (const Elem& g : ball) {
    for (const Elem& h : ball) {
      CHECK(c.b(F2.multiply(g, h)) == c.b(g) + c.linear(g).apply(c.b(h)));
      // affine action is a homomorphism
      CHECK(c.alpha(F2.multiply(g, h)) == c.alpha(g).compose(c.alpha(h)));
    }
  }
}

TEST_CASE("tree translations act isometrically and invert") {
  Cocycle c = Cocycle::free_wall(2);
  const Group& F2 = c.group();
  for (const Elem& g : F2.ball(3)) {
    LinearPart L = c.linear(g);
    LinearPart Linv = c.linear(F2.inverse(g));
    for (const Elem& h : F2.ball(3)) {
      HilbertVec v = c.b(h);
      CHECK(L.apply(v).norm_sq() == v.norm_sq());
      CHECK(Linv.apply(L.apply(v)) == v);
    }
  }
}

TEST_CASE("properness profiles are exact for the catalog cocycles") {
  ControlTables lat = properness_profile(Cocycle::lattice(1), 6, 12);
  for (long long t = 0; t <= 6; ++t) {
    CHECK(lat.rho1_sq[t] == Rational(t * t));
    CHECK(lat.rho2_sq[t] == Rational(t * t));
  }
  CHECK_FALSE(lat.rho1_capped);
  ControlTables wall = properness_profile(Cocycle::free_wall(2), 5, 10);
  for (long long t = 0; t <= 5; ++t) {
    CHECK(wall.rho1_sq[t] == Rational(t));
    CHECK(wall.rho2_sq[t] == Rational(t));
  }
  CHECK_THROWS_AS(properness_profile(Cocycle::lattice(1), 8, 4), PreconditionError);
}

namespace {

std::vector<std::vector<Rational>> abs_kernel(int m, int sign) {
  std::vector<std::vector<Rational>> K(m, std::vector<Rational>(m, 0));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) K[i][j] = Rational(sign * std::abs(i - j));
  }
  return K;
}

}  // namespace

TEST_CASE("negative-type kernel checker on known fixtures") {
  auto pos = cnd_check(abs_kernel(5, 1), 1e-9, 42);
  CHECK(pos.verdict);
  CHECK_FALSE(pos.sampling_found_positive);
  auto neg = cnd_check(abs_kernel(5, -1), 1e-9, 42);
  CHECK_FALSE(neg.verdict);
  CHECK(neg.sampling_found_positive);
  CHECK(neg.sampling_agrees_with_eigen);

  // squared-distance kernel on a line is also fine
  std::vector<std::vector<Rational>> sq(4, std::vector<Rational>(4, 0));
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) sq[i][j] = Rational((i - j) * (i - j));
  }
  CHECK(cnd_check(sq, 1e-9, 7).verdict);

  CHECK_THROWS_AS(cnd_check({{Rational(1)}}, 1e-9, 1), ConfigError);  // diagonal not zero
}

TEST_CASE("function-level checker: x^2 is locally negative type on Z, x^4 is not") {
  Group Z = Group::int_lattice(1);
  std::map<Elem, Rational> good, bad, asym;
  for (Coord x = -8; x <= 8; ++x) {
    good[Elem{{x}}] = Rational(x * x);
    bad[Elem{{x}}] = Rational(x * x * x * x);
    asym[Elem{{x}}] = Rational(x >= 0 ? x * x : x * x + 1);
  }
  auto g = cnd_function_check(Z, good, 6, 6, 1e-9, 3);
  CHECK(g.verdict);
  CHECK(g.method == "maximal-windows");
  CHECK(g.worst_extremal <= 1e-9);
  auto b = cnd_function_check(Z, bad, 6, 6, 1e-9, 3);
  CHECK_FALSE(b.verdict);
  auto a = cnd_function_check(Z, asym, 6, 6, 1e-9, 3);
  CHECK_FALSE(a.verdict);
  CHECK_FALSE(a.symmetric);
}
