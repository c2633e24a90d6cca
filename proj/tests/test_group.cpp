#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <set>

#include "group.hpp"

using namespace hgp;

namespace {

// Word lengths by direct product enumeration, independent of the library's
// sphere cache.
std::map<Elem, long long> brute_lengths(const Group& G, long long R) {
  std::map<Elem, long long> len;
  len[G.identity()] = 0;
  std::vector<Elem> frontier = {G.identity()};
  for (long long n = 1; n <= R; ++n) {
    std::vector<Elem> next;
    for (const Elem& w : frontier) {
      for (const Elem& s : G.generators()) {
        Elem e = G.multiply(w, s);
        if (!len.count(e)) {
          len[e] = n;
          next.push_back(e);
        }
      }
    }
    frontier = std::move(next);
  }
  return len;
}

void check_group_laws(const Group& G, long long R) {
  auto ball = G.ball(R);
  for (const Elem& g : ball) {
    CHECK(G.multiply(g, G.identity()) == g);
    CHECK(G.multiply(G.identity(), g) == g);
    CHECK(G.is_identity(G.multiply(g, G.inverse(g))));
    CHECK(G.is_identity(G.multiply(G.inverse(g), g)));
    CHECK(G.word_length(G.inverse(g)) == G.word_length(g));
  }
  auto small = G.ball(std::min<long long>(R, 2));
  for (const Elem& a : small) {
    for (const Elem& b : small) {
      for (const Elem& c : small) {
        CHECK(G.multiply(G.multiply(a, b), c) == G.multiply(a, G.multiply(b, c)));
      }
    }
  }
}

void check_lengths_against_brute(const Group& G, long long R) {
  auto brute = brute_lengths(G, R);
  for (const auto& [e, l] : brute) CHECK(G.word_length(e) == l);
  // and the ball has exactly the brute-force elements
  auto ball = G.ball(R);
  CHECK(ball.size() == brute.size());
}

}  // namespace

TEST_CASE("lattice basics") {
  Group Z2 = Group::int_lattice(2);
  check_group_laws(Z2, 3);
  check_lengths_against_brute(Z2, 4);
  CHECK(Z2.word_length(Elem{{3, -4}}) == 7);  // l1 norm
  CHECK(Z2.dist(Elem{{1, 1}}, Elem{{2, -1}}) == 3);
  CHECK_FALSE(Z2.finite());
}

TEST_CASE("free group reduction and lengths") {
  Group F2 = Group::free_group(2);
  check_group_laws(F2, 3);
  check_lengths_against_brute(F2, 4);
  // aB * b = a
  CHECK(F2.multiply(Elem{{1, -2}}, Elem{{2}}) == Elem{{1}});
  // full cancellation
  CHECK(F2.is_identity(F2.multiply(Elem{{1, 2}}, Elem{{-2, -1}})));
  CHECK(F2.word_length(Elem{{1, 2, -1, -2}}) == 4);
  // sphere sizes 4 * 3^(n-1)
  CHECK(F2.sphere(1).size() == 4);
  CHECK(F2.sphere(2).size() == 12);
  CHECK(F2.sphere(5).size() == 4 * 81);
}

TEST_CASE("heisenberg algebra and word lengths") {
  Group H = Group::heisenberg();
  check_group_laws(H, 3);
  check_lengths_against_brute(H, 4);
  Elem g{{2, 3, 1}}, h{{-1, 4, 2}};
  CHECK(H.multiply(g, h) == Elem{{1, 7, 11}});  // z: 1+2+2*4
  CHECK(H.is_identity(H.multiply(g, H.inverse(g))));
  // the commutator of the two generators is the central element
  Elem a{{1, 0, 0}}, b{{0, 1, 0}};
  Elem comm = H.multiply(H.multiply(a, b), H.multiply(H.inverse(a), H.inverse(b)));
  CHECK(comm == Elem{{0, 0, 1}});
  CHECK(H.word_length(comm) == 4);
}

TEST_CASE("finite abelian residues") {
  Group G = Group::finite_abelian({8, 4});
  check_group_laws(G, 3);
  check_lengths_against_brute(G, 4);
  CHECK(G.finite());
  CHECK(G.order() == 32);
  CHECK(G.enumerate_all().size() == 32);
  CHECK(G.word_length(Elem{{7, 0}}) == 1);  // wraps to -1
  CHECK(G.word_length(Elem{{4, 2}}) == 6);
  CHECK(G.inverse(Elem{{3, 1}}) == Elem{{5, 3}});
}

TEST_CASE("deterministic ball order") {
  Group F2 = Group::free_group(2);
  auto b1 = F2.ball(3);
  auto b2 = F2.ball(3);
  CHECK(b1 == b2);
  for (std::size_t i = 1; i < b1.size(); ++i) {
    long long li = F2.word_length(b1[i - 1]), lj = F2.word_length(b1[i]);
    CHECK((li < lj || (li == lj && b1[i - 1] < b1[i])));
  }
}

TEST_CASE("ball cap raises a loud resource error") {
  Group H = Group::heisenberg();
  H.set_ball_cap(50);
  CHECK_THROWS_AS(H.ball(10), ResourceError);
}

TEST_CASE("element strings round-trip") {
  Group F2 = Group::free_group(2);
  for (const Elem& g : F2.ball(4)) CHECK(F2.parse_elem(F2.to_string(g)) == g);
  Group H = Group::heisenberg();
  for (const Elem& g : H.ball(3)) CHECK(H.parse_elem(H.to_string(g)) == g);
  Group Z = Group::int_lattice(1);
  CHECK(Z.to_string(Elem{{-7}}) == "(-7)");
}

TEST_CASE("group spec parsing") {
  CHECK(parse_group_spec("intlattice(2)").kind() == GroupKind::IntLattice);
  CHECK(parse_group_spec("free(2)").rank() == 2);
  CHECK(parse_group_spec("heisenberg").kind() == GroupKind::Heisenberg);
  CHECK(parse_group_spec("finiteabelian(8,8)").order() == 64);
  CHECK_THROWS_AS(parse_group_spec("dihedral(3)"), ConfigError);
}

TEST_CASE("word length bfs on custom generators") {
  Group Z = Group::int_lattice(1);
  WordLengthBfs tbl(Z, {Elem{{2}}, Elem{{-2}}, Elem{{3}}, Elem{{-3}}});
  CHECK(tbl.length(Elem{{0}}) == 0);
  CHECK(tbl.length(Elem{{1}}) == 2);  // 3 - 2
  CHECK(tbl.length(Elem{{6}}) == 2);
  CHECK(tbl.length(Elem{{7}}) == 3);
}
