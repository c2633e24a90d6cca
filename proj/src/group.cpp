#include "group.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <sstream>

namespace hgp {

namespace {

Coord mod_pos(Coord v, Coord m) {
  Coord r = v % m;
  return r < 0 ? r + m : r;
}

}  // namespace

Group::Group(GroupKind k, int rank, std::vector<Coord> moduli)
    : kind_(k), rank_(rank), moduli_(std::move(moduli)), cache_(std::make_shared<BallCache>()) {}

Group Group::int_lattice(int d) {
  if (d < 1) throw ConfigError("intlattice rank must be >= 1");
  Group g(GroupKind::IntLattice, d, {});
  for (int i = 0; i < d; ++i) {
    for (Coord s : {Coord{1}, Coord{-1}}) {
      Elem e{std::vector<Coord>(d, 0)};
      e.c[i] = s;
      g.gens_.push_back(e);
    }
  }
  return g;
}

Group Group::free_group(int k) {
  if (k < 1) throw ConfigError("free group rank must be >= 1");
  Group g(GroupKind::FreeGroup, k, {});
  for (int i = 1; i <= k; ++i) {
    g.gens_.push_back(Elem{{Coord(i)}});
    g.gens_.push_back(Elem{{Coord(-i)}});
  }
  return g;
}

Group Group::heisenberg() {
  Group g(GroupKind::Heisenberg, 2, {});
  g.gens_ = {Elem{{1, 0, 0}}, Elem{{-1, 0, 0}}, Elem{{0, 1, 0}}, Elem{{0, -1, 0}}};
  return g;
}

Group Group::finite_abelian(std::vector<Coord> moduli) {
  if (moduli.empty()) throw ConfigError("finiteabelian needs at least one modulus");
  for (Coord m : moduli) {
    if (m < 2) throw ConfigError("finiteabelian moduli must be >= 2");
  }
  int d = static_cast<int>(moduli.size());
  Group g(GroupKind::FiniteAbelian, d, std::move(moduli));
  for (int i = 0; i < d; ++i) {
    Elem plus{std::vector<Coord>(d, 0)};
    plus.c[i] = 1;
    g.gens_.push_back(plus);
    Elem minus{std::vector<Coord>(d, 0)};
    minus.c[i] = g.moduli_[i] - 1;
    if (minus != plus) g.gens_.push_back(minus);  // m = 2: +1 and -1 coincide
  }
  return g;
}

std::string Group::spec_string() const {
  std::ostringstream os;
  switch (kind_) {
    case GroupKind::IntLattice:
      os << "intlattice(" << rank_ << ")";
      break;
    case GroupKind::FreeGroup:
      os << "free(" << rank_ << ")";
      break;
    case GroupKind::Heisenberg:
      os << "heisenberg";
      break;
    case GroupKind::FiniteAbelian: {
      os << "finiteabelian(";
      for (std::size_t i = 0; i < moduli_.size(); ++i) {
        if (i) os << ",";
        os << moduli_[i];
      }
      os << ")";
      break;
    }
  }
  return os.str();
}

bool Group::same_group(const Group& o) const {
  return kind_ == o.kind_ && rank_ == o.rank_ && moduli_ == o.moduli_;
}

Elem Group::identity() const {
  switch (kind_) {
    case GroupKind::IntLattice:
      return Elem{std::vector<Coord>(rank_, 0)};
    case GroupKind::FreeGroup:
      return Elem{{}};
    case GroupKind::Heisenberg:
      return Elem{{0, 0, 0}};
    case GroupKind::FiniteAbelian:
      return Elem{std::vector<Coord>(moduli_.size(), 0)};
  }
  throw StructureError("bad group kind");
}

bool Group::is_identity(const Elem& g) const { return g == identity(); }

void Group::check_elem(const Elem& g) const {
  switch (kind_) {
    case GroupKind::IntLattice:
      if (g.c.size() != static_cast<std::size_t>(rank_))
        throw StructureError("element does not belong to " + spec_string());
      return;
    case GroupKind::FreeGroup:
      for (std::size_t i = 0; i < g.c.size(); ++i) {
        Coord v = g.c[i];
        if (v == 0 || std::llabs(v) > rank_)
          throw StructureError("letter out of range for " + spec_string());
        if (i > 0 && g.c[i - 1] == -v) throw StructureError("word not freely reduced");
      }
      return;
    case GroupKind::Heisenberg:
      if (g.c.size() != 3) throw StructureError("element does not belong to heisenberg");
      return;
    case GroupKind::FiniteAbelian:
      if (g.c.size() != moduli_.size())
        throw StructureError("element does not belong to " + spec_string());
      for (std::size_t i = 0; i < g.c.size(); ++i) {
        if (g.c[i] < 0 || g.c[i] >= moduli_[i]) throw StructureError("residue out of range");
      }
      return;
  }
}

Elem Group::multiply(const Elem& g, const Elem& h) const {
  check_elem(g);
  check_elem(h);
  switch (kind_) {
    case GroupKind::IntLattice: {
      Elem r = g;
      for (int i = 0; i < rank_; ++i) r.c[i] += h.c[i];
      return r;
    }
    case GroupKind::FreeGroup: {
      Elem r = g;
      for (Coord v : h.c) {
        if (!r.c.empty() && r.c.back() == -v) {
          r.c.pop_back();
        } else {
          r.c.push_back(v);
        }
      }
      return r;
    }
    case GroupKind::Heisenberg: {
      // (x,y,z)(x',y',z') = (x+x', y+y', z+z'+x*y')
      return Elem{{g.c[0] + h.c[0], g.c[1] + h.c[1], g.c[2] + h.c[2] + g.c[0] * h.c[1]}};
    }
    case GroupKind::FiniteAbelian: {
      Elem r = g;
      for (std::size_t i = 0; i < moduli_.size(); ++i) r.c[i] = mod_pos(r.c[i] + h.c[i], moduli_[i]);
      return r;
    }
  }
  throw StructureError("bad group kind");
}

Elem Group::inverse(const Elem& g) const {
  check_elem(g);
  switch (kind_) {
    case GroupKind::IntLattice: {
      Elem r = g;
      for (auto& v : r.c) v = -v;
      return r;
    }
    case GroupKind::FreeGroup: {
      Elem r;
      r.c.reserve(g.c.size());
      for (auto it = g.c.rbegin(); it != g.c.rend(); ++it) r.c.push_back(-*it);
      return r;
    }
    case GroupKind::Heisenberg:
      return Elem{{-g.c[0], -g.c[1], g.c[0] * g.c[1] - g.c[2]}};
    case GroupKind::FiniteAbelian: {
      Elem r = g;
      for (std::size_t i = 0; i < moduli_.size(); ++i) r.c[i] = mod_pos(-r.c[i], moduli_[i]);
      return r;
    }
  }
  throw StructureError("bad group kind");
}

long long Group::word_length(const Elem& g) const {
  check_elem(g);
  switch (kind_) {
    case GroupKind::IntLattice: {
      long long s = 0;
      for (Coord v : g.c) s += std::llabs(v);
      return s;
    }
    case GroupKind::FreeGroup:
      return static_cast<long long>(g.c.size());
    case GroupKind::FiniteAbelian: {
      long long s = 0;
      for (std::size_t i = 0; i < moduli_.size(); ++i) s += std::min(g.c[i], moduli_[i] - g.c[i]);
      return s;
    }
    case GroupKind::Heisenberg: {
      std::lock_guard<std::mutex> lk(cache_->mu);
      for (;;) {
        auto it = cache_->length.find(g);
        if (it != cache_->length.end()) return it->second;
        long long next = static_cast<long long>(cache_->spheres.size());
        extend_spheres(next);  // grows by one sphere, throws ResourceError at cap
      }
    }
  }
  throw StructureError("bad group kind");
}

void Group::extend_spheres(long long R) const {
  if (cache_->spheres.empty()) {
    cache_->spheres.push_back({identity()});
    cache_->length[identity()] = 0;
  }
  while (static_cast<long long>(cache_->spheres.size()) <= R) {
    const auto& frontier = cache_->spheres.back();
    long long n = static_cast<long long>(cache_->spheres.size());
    std::vector<Elem> next;
    for (const Elem& f : frontier) {
      for (const Elem& s : gens_) {
        Elem g = multiply(f, s);
        if (cache_->length.find(g) == cache_->length.end()) {
          cache_->length[g] = n;
          next.push_back(g);
          if (cache_->length.size() > ball_cap_) {
            throw ResourceError("ball cap " + std::to_string(ball_cap_) + " exceeded at radius " +
                                std::to_string(n) + " in " + spec_string());
          }
        }
      }
    }
    std::sort(next.begin(), next.end());
    cache_->spheres.push_back(std::move(next));
  }
}

std::vector<Elem> Group::ball(long long R) const {
  if (R < 0) throw PreconditionError("ball radius must be >= 0");
  std::lock_guard<std::mutex> lk(cache_->mu);
  extend_spheres(R);
  std::vector<Elem> out;
  for (long long n = 0; n <= R; ++n) {
    out.insert(out.end(), cache_->spheres[n].begin(), cache_->spheres[n].end());
  }
  return out;
}

std::vector<Elem> Group::sphere(long long n) const {
  std::lock_guard<std::mutex> lk(cache_->mu);
  extend_spheres(n);
  return cache_->spheres[n];
}

long long Group::dist(const Elem& x, const Elem& y) const {
  return word_length(multiply(inverse(x), y));
}

bool Group::length_lex_less(const Elem& a, const Elem& b) const {
  long long la = word_length(a), lb = word_length(b);
  if (la != lb) return la < lb;
  return a.c < b.c;
}

bool Group::finite() const { return kind_ == GroupKind::FiniteAbelian; }

long long Group::order() const {
  if (!finite()) throw PreconditionError("order() on infinite group");
  long long o = 1;
  for (Coord m : moduli_) o *= m;
  return o;
}

std::vector<Elem> Group::enumerate_all() const {
  if (!finite()) throw PreconditionError("enumerate_all() on infinite group");
  std::vector<Elem> out{identity()};
  for (std::size_t i = 0; i < moduli_.size(); ++i) {
    std::vector<Elem> next;
    next.reserve(out.size() * moduli_[i]);
    for (const Elem& e : out) {
      for (Coord v = 0; v < moduli_[i]; ++v) {
        Elem f = e;
        f.c[i] = v;
        next.push_back(f);
      }
    }
    out = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string Group::to_string(const Elem& g) const {
  if (kind_ == GroupKind::FreeGroup) {
    if (g.c.empty()) return "e";
    std::string s;
    for (Coord v : g.c) {
      char base = static_cast<char>('a' + std::llabs(v) - 1);
      s += (v > 0) ? base : static_cast<char>(base - 'a' + 'A');
    }
    return s;
  }
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < g.c.size(); ++i) {
    if (i) os << ",";
    os << g.c[i];
  }
  os << ")";
  return os.str();
}

Elem Group::parse_elem(const std::string& s) const {
  if (kind_ == GroupKind::FreeGroup) {
    Elem e;
    if (s == "e") return e;
    for (char ch : s) {
      if (ch >= 'a' && ch <= 'z') {
        e.c.push_back(ch - 'a' + 1);
      } else if (ch >= 'A' && ch <= 'Z') {
        e.c.push_back(-(ch - 'A' + 1));
      } else {
        throw ConfigError("bad word character: " + std::string(1, ch));
      }
    }
    check_elem(e);
    return e;
  }
  if (s.size() < 2 || s.front() != '(' || s.back() != ')') throw ConfigError("bad element: " + s);
  Elem e;
  std::string body = s.substr(1, s.size() - 2);
  std::istringstream is(body);
  std::string tok;
  while (std::getline(is, tok, ',')) e.c.push_back(std::stoll(tok));
  check_elem(e);
  return e;
}

WordLengthBfs::WordLengthBfs(Group grp, std::vector<Elem> gens)
    : grp_(std::move(grp)), gens_(std::move(gens)) {
  for (const Elem& g : gens_) {
    if (grp_.is_identity(g)) throw StructureError("generating set contains identity");
  }
}

void WordLengthBfs::extend(long long R) const {
  if (spheres_.empty()) {
    spheres_.push_back({grp_.identity()});
    length_[grp_.identity()] = 0;
  }
  while (static_cast<long long>(spheres_.size()) <= R) {
    const auto& frontier = spheres_.back();
    long long n = static_cast<long long>(spheres_.size());
    std::vector<Elem> next;
    for (const Elem& f : frontier) {
      for (const Elem& s : gens_) {
        Elem g = grp_.multiply(f, s);
        if (length_.find(g) == length_.end()) {
          length_[g] = n;
          next.push_back(g);
          if (length_.size() > cap_) {
            throw ResourceError("quotient ball cap exceeded at radius " + std::to_string(n));
          }
        }
      }
    }
    std::sort(next.begin(), next.end());
    spheres_.push_back(std::move(next));
  }
}

long long WordLengthBfs::length(const Elem& g) const {
  std::lock_guard<std::mutex> lk(mu_);
  for (;;) {
    auto it = length_.find(g);
    if (it != length_.end()) return it->second;
    extend(static_cast<long long>(spheres_.size()));
  }
}

std::vector<Elem> WordLengthBfs::ball(long long R) const {
  std::lock_guard<std::mutex> lk(mu_);
  extend(R);
  std::vector<Elem> out;
  for (long long n = 0; n <= R; ++n) out.insert(out.end(), spheres_[n].begin(), spheres_[n].end());
  return out;
}

std::vector<Elem> WordLengthBfs::sphere(long long n) const {
  std::lock_guard<std::mutex> lk(mu_);
  extend(n);
  return spheres_[n];
}

long long WordLengthBfs::radius_built() const {
  std::lock_guard<std::mutex> lk(mu_);
  return static_cast<long long>(spheres_.size()) - 1;
}

Group parse_group_spec(const std::string& spec) {
  auto paren = spec.find('(');
  std::string name = spec.substr(0, paren);
  std::vector<Coord> args;
  if (paren != std::string::npos) {
    if (spec.back() != ')') throw ConfigError("bad group spec: " + spec);
    std::string body = spec.substr(paren + 1, spec.size() - paren - 2);
    std::istringstream is(body);
    std::string tok;
    while (std::getline(is, tok, ',')) args.push_back(std::stoll(tok));
  }
  if (name == "intlattice") {
    if (args.size() != 1) throw ConfigError("intlattice takes one rank argument");
    return Group::int_lattice(static_cast<int>(args[0]));
  }
  if (name == "free") {
    if (args.size() != 1) throw ConfigError("free takes one rank argument");
    return Group::free_group(static_cast<int>(args[0]));
  }
  if (name == "heisenberg") {
    if (!args.empty()) throw ConfigError("heisenberg takes no arguments");
    return Group::heisenberg();
  }
  if (name == "finiteabelian") {
    return Group::finite_abelian(args);
  }
  throw ConfigError("unknown group: " + name);
}

}  // namespace hgp
