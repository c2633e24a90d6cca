#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "errors.hpp"

namespace hgp {

using Coord = long long;

// Exact group element in normal form. The coordinate vector is interpreted by
// the owning Group:
//   IntLattice(d)        integer d-vector
//   FreeGroup(k)         freely reduced word of signed generator indices (+-1..+-k)
//   Heisenberg           integer triple (x, y, z)
//   FiniteAbelian(m...)  residue vector, 0 <= c[i] < m[i]
struct Elem {
  std::vector<Coord> c;

  bool operator==(const Elem& o) const { return c == o.c; }
  bool operator!=(const Elem& o) const { return c != o.c; }
  bool operator<(const Elem& o) const { return c < o.c; }  // plain lex on normal form
};

struct ElemHash {
  std::size_t operator()(const Elem& e) const {
    std::size_t h = 1469598103934665603ull;
    for (Coord v : e.c) {
      h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

enum class GroupKind { IntLattice, FreeGroup, Heisenberg, FiniteAbelian };

class Group {
 public:
  static Group int_lattice(int d);
  static Group free_group(int k);
  static Group heisenberg();
  static Group finite_abelian(std::vector<Coord> moduli);

  GroupKind kind() const { return kind_; }
  int rank() const { return rank_; }
  const std::vector<Coord>& moduli() const { return moduli_; }
  std::string spec_string() const;

  bool same_group(const Group& o) const;

  Elem identity() const;
  bool is_identity(const Elem& g) const;
  Elem multiply(const Elem& g, const Elem& h) const;
  Elem inverse(const Elem& g) const;

  // Symmetric generating set, identity excluded, deterministic order.
  const std::vector<Elem>& generators() const { return gens_; }

  long long word_length(const Elem& g) const;

  // {g : l(g) <= R}, ordered by (length, lex normal form).
  std::vector<Elem> ball(long long R) const;
  // {g : l(g) == n}, lex-ordered.
  std::vector<Elem> sphere(long long n) const;

  long long dist(const Elem& x, const Elem& y) const;  // l(x^-1 y)

  // (length, lex) order used for all deterministic element choices.
  bool length_lex_less(const Elem& a, const Elem& b) const;

  bool finite() const;
  long long order() const;                 // finite groups only
  std::vector<Elem> enumerate_all() const; // finite groups only, sorted lex

  std::string to_string(const Elem& g) const;
  Elem parse_elem(const std::string& s) const;  // inverse of to_string

  void set_ball_cap(std::size_t cap) { ball_cap_ = cap; }
  std::size_t ball_cap() const { return ball_cap_; }

 private:
  Group(GroupKind k, int rank, std::vector<Coord> moduli);
  void check_elem(const Elem& g) const;
  void extend_spheres(long long R) const;  // caller holds cache_->mu

  GroupKind kind_;
  int rank_ = 0;
  std::vector<Coord> moduli_;
  std::vector<Elem> gens_;
  std::size_t ball_cap_ = 4000000;

  // BFS sphere cache; shared so Group stays cheap to copy. Guarded for
  // concurrent readers.
  struct BallCache {
    std::mutex mu;
    std::vector<std::vector<Elem>> spheres;  // spheres[n] lex-sorted
    std::unordered_map<Elem, long long, ElemHash> length;
  };
  std::shared_ptr<BallCache> cache_;
};

// Lazily grown BFS word-length table on an arbitrary generating set of an
// arbitrary group (used for quotient lengths on image generators).
class WordLengthBfs {
 public:
  WordLengthBfs(Group grp, std::vector<Elem> gens);

  long long length(const Elem& g) const;                 // extends until found or cap
  std::vector<Elem> ball(long long R) const;             // (length, lex)-ordered
  std::vector<Elem> sphere(long long n) const;
  long long radius_built() const;
  void set_cap(std::size_t cap) { cap_ = cap; }

 private:
  void extend(long long R) const;  // caller holds mu_

  Group grp_;
  std::vector<Elem> gens_;
  std::size_t cap_ = 4000000;
  mutable std::mutex mu_;
  mutable std::vector<std::vector<Elem>> spheres_;
  mutable std::unordered_map<Elem, long long, ElemHash> length_;
};

Group parse_group_spec(const std::string& spec);

}  // namespace hgp
