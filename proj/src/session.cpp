#include "session.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace hgp {

using ojson = nlohmann::ordered_json;

std::string rational_str(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<long long> parse_ll_list(const std::string& s) {
  std::vector<long long> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(std::stoll(tok));
  }
  return out;
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + " is not key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "group") {
        cfg.group = val;
      } else if (key == "chain") {
        cfg.chain = val;
      } else if (key == "cocycle") {
        cfg.cocycle = val;
      } else if (key == "max_r") {
        cfg.max_r = std::stoll(val);
      } else if (key == "max_level") {
        cfg.max_level = std::stoi(val);
      } else if (key == "rho_domain") {
        cfg.rho_domain = std::stoll(val);
      } else if (key == "r_list") {
        cfg.r_list = parse_ll_list(val);
      } else if (key == "mean") {
        if (val == "uniform") {
          cfg.mean = MeanSpec{};
        } else if (val.rfind("foelner:", 0) == 0) {
          cfg.mean.foelner = true;
          cfg.mean.box_size = std::stoll(val.substr(8));
        } else {
          throw ConfigError("mean must be uniform or foelner:N");
        }
      } else if (key == "seed") {
        cfg.seed = std::stoull(val);
      } else if (key == "tol") {
        cfg.tol = std::stod(val);
      } else if (key == "samples") {
        cfg.samples = std::stoll(val);
      } else if (key == "ball_cap") {
        cfg.ball_cap = std::stoll(val);
      } else if (key == "sample_radius") {
        cfg.sample_radius = std::stoll(val);
      } else if (key == "map") {
        cfg.map_name = val;
      } else if (key == "map_domain") {
        cfg.map_domain = std::stoll(val);
      } else if (key == "certificate") {
        cfg.certificate_path = val;
      } else if (key == "rho2_override") {
        auto colon = val.find(':');
        if (colon == std::string::npos) throw ConfigError("rho2_override wants t:value");
        cfg.rho2_override = {std::stoll(val.substr(0, colon)), Rational(val.substr(colon + 1))};
      } else if (key == "kind") {
        // certificate manifests carry this tag; nothing to configure
      } else {
        throw ConfigError("unknown config key: " + key);
      }
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("bad value for " + key + ": " + val);
    }
  }
  return cfg;
}

namespace {

std::shared_ptr<const Chain> make_chain(const RunConfig& cfg) {
  Group parent = parse_group_spec(cfg.group);
  if (cfg.ball_cap > 0) parent.set_ball_cap(static_cast<std::size_t>(cfg.ball_cap));
  return std::make_shared<Chain>(parse_chain_spec(parent, cfg.chain));
}

Cocycle make_cocycle(const RunConfig& cfg, const Group& parent) {
  if (cfg.cocycle == "lattice") {
    if (parent.kind() != GroupKind::IntLattice) {
      throw ConfigError("lattice cocycle needs an integer lattice group");
    }
    return Cocycle::lattice(parent.rank());
  }
  if (cfg.cocycle == "free-wall") {
    if (parent.kind() != GroupKind::FreeGroup) {
      throw ConfigError("free-wall cocycle needs a free group");
    }
    return Cocycle::free_wall(parent.rank());
  }
  throw ConfigError("unknown cocycle: " + cfg.cocycle);
}

std::shared_ptr<ForwardCert> make_forward(const RunConfig& cfg) {
  auto chain = make_chain(cfg);
  Cocycle coc = make_cocycle(cfg, chain->parent());
  CertScope scope{cfg.max_r, cfg.max_level, cfg.rho_domain};
  return std::make_shared<ForwardCert>(chain, std::move(coc), scope);
}

// Certificate with one upper-control entry replaced; used to show that the
// verifiers actually reject bad controls.
class Rho2Override : public FibredCert {
 public:
  Rho2Override(std::shared_ptr<const FibredCert> inner, long long at, Rational value)
      : inner_(std::move(inner)), at_(at), value_(std::move(value)) {}

  const Chain& chain() const override { return inner_->chain(); }
  std::vector<int> levels() const override { return inner_->levels(); }
  CertScope scope() const override { return inner_->scope(); }
  std::vector<int> excluded(long long r) const override { return inner_->excluded(r); }
  Rational rho1_sq(long long t) const override { return inner_->rho1_sq(t); }
  Rational rho2_sq(long long t) const override {
    return t == at_ ? value_ : inner_->rho2_sq(t);
  }
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
  Rational section_image_dist_sq(long long r, int level, const std::vector<Elem>& C, const Elem& x,
                                 const Elem& y) const override {
    return inner_->section_image_dist_sq(r, level, C, x, y);
  }

 private:
  std::shared_ptr<const FibredCert> inner_;
  long long at_;
  Rational value_;
};

// Subsets of diameter < r covering all pairs (and, by zero-padding of
// coefficient vectors, all smaller subsets) of the reachable region.
std::vector<std::vector<Elem>> candidate_subsets(const FibredCert& cert, int level, long long r,
                                                 long long sample_radius) {
  const ChainLevel& lv = cert.chain().level(level);
  const Group& Q = lv.quotient;
  std::vector<std::vector<Elem>> subsets;
  if (lv.finite_quotient && Q.moduli().size() == 1) {
    Coord m = Q.moduli()[0];
    if (m / 2 < r) {
      subsets.push_back(Q.enumerate_all());
    } else {
      for (Coord c = 0; c < m; ++c) {
        std::vector<Elem> arc;
        for (Coord i = 0; i < r; ++i) arc.push_back(Elem{{(c + i) % m}});
        std::sort(arc.begin(), arc.end());
        subsets.push_back(std::move(arc));
      }
    }
    return subsets;
  }
  std::vector<Elem> pts = cert.chain().quotient_table(level).ball(sample_radius);
  if (r == 1) {
    for (const Elem& c : pts) subsets.push_back({c});
    return subsets;
  }
  for (const Elem& c : pts) {
    for (const Elem& h : cert.chain().quotient_table(level).ball(r - 1)) {
      Elem d = Q.multiply(c, h);
      if (d == c) continue;
      std::vector<Elem> pair = {c, d};
      std::sort(pair.begin(), pair.end());
      subsets.push_back(std::move(pair));
    }
  }
  long long t = (r - 1) / 2;
  if (t > 0) {
    for (const Elem& c : pts) {
      std::vector<Elem> s;
      for (const Elem& h : cert.chain().quotient_table(level).ball(t)) {
        s.push_back(Q.multiply(c, h));
      }
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
      subsets.push_back(std::move(s));
    }
  }
  std::sort(subsets.begin(), subsets.end());
  subsets.erase(std::unique(subsets.begin(), subsets.end()), subsets.end());
  return subsets;
}

bool subsets_overlap(const std::vector<Elem>& a, const std::vector<Elem>& b) {
  for (const Elem& x : a) {
    if (std::find(b.begin(), b.end(), x) != b.end()) return true;
  }
  return false;
}

struct FibredVerification {
  bool pass = true;
  long long subsets = 0;
  long long pairs = 0;
  long long overlaps = 0;
  long long shortcut_checks = 0;
  long long lift_diff_checks = 0;
  std::string witness;
  double worst_residual = 0.0;
};

FibredVerification verify_fibred(const FibredCert& cert, const ForwardCert* fwd,
                                 const std::vector<long long>& rs, long long sample_radius,
                                 long long overlap_cap) {
  FibredVerification out;
  const Group& G = cert.chain().parent();
  for (long long r : rs) {
    for (int level : cert.levels()) {
      if (level_excluded(cert, r, level)) continue;
      auto subsets = candidate_subsets(cert, level, r, sample_radius);
      out.subsets += static_cast<long long>(subsets.size());
      for (const auto& C : subsets) {
        Cond1Report rep = verify_condition1(cert, level, r, C);
        out.pairs += static_cast<long long>(rep.pairs.size());
        if (!rep.pass) {
          out.pass = false;
          if (out.witness.empty() && rep.witness) {
            const Group& Q = cert.chain().level(level).quotient;
            out.witness = "sandwich fails at level " + std::to_string(level) + ", r=" +
                          std::to_string(r) + ", pair (" + Q.to_string(rep.witness->x) + ", " +
                          Q.to_string(rep.witness->y) + ")";
          }
        }
        // cross-validate the installed shortcut and, for cocycle-built
        // certificates, the lift-difference form of the attained distance
        for (std::size_t i = 0; i < C.size(); ++i) {
          for (std::size_t j = i + 1; j < C.size(); ++j) {
            Rational fast = cert.section_image_dist_sq(r, level, C, C[i], C[j]);
            Rational generic = generic_section_image_dist_sq(cert, r, level, C, C[i], C[j]);
            ++out.shortcut_checks;
            if (fast != generic) {
              out.pass = false;
              if (out.witness.empty()) out.witness = "shortcut disagrees with trivialization route";
            }
            if (fwd) {
              Elem a0 = fwd->lift_elem(r, level, C, C[i]);
              Elem a1 = fwd->lift_elem(r, level, C, C[j]);
              Rational viab = fwd->cocycle().b_norm_sq(G.multiply(G.inverse(a0), a1));
              ++out.lift_diff_checks;
              if (viab != generic) {
                out.pass = false;
                if (out.witness.empty()) {
                  out.witness = "attained distance differs from the lift-difference value";
                }
              }
            }
          }
        }
      }
      long long budget = overlap_cap;
      for (std::size_t i = 0; i < subsets.size() && budget > 0; ++i) {
        for (std::size_t j = i + 1; j < subsets.size() && budget > 0; ++j) {
          if (!subsets_overlap(subsets[i], subsets[j])) continue;
          OverlapWitness w = verify_condition2(cert, level, r, subsets[i], subsets[j]);
          ++out.overlaps;
          --budget;
          out.worst_residual = std::max(out.worst_residual, to_double(w.residual_sq));
          if (!w.ok) {
            out.pass = false;
            if (out.witness.empty()) {
              out.witness = "overlap check fails at level " + std::to_string(level) + ", r=" +
                            std::to_string(r) + ": " + w.error;
            }
          }
        }
      }
    }
  }
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find(',') == std::string::npos && s.find('"') == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

ojson check_record(const std::string& name, bool verdict) {
  ojson j;
  j["name"] = name;
  j["verdict"] = verdict;
  return j;
}

void append_verification_checks(ojson& checks, const FibredVerification& v, bool with_lift_diff) {
  ojson c1 = check_record("embedding-sandwich", v.pass);
  c1["subsets"] = v.subsets;
  c1["pairs"] = v.pairs;
  c1["overlap_checks"] = v.overlaps;
  c1["shortcut_checks"] = v.shortcut_checks;
  if (with_lift_diff) c1["lift_difference_checks"] = v.lift_diff_checks;
  c1["worst_overlap_residual"] = v.worst_residual;
  if (!v.witness.empty()) c1["witness"] = v.witness;
  checks.push_back(std::move(c1));
}

ojson config_echo(const RunConfig& cfg) {
  ojson j;
  j["group"] = cfg.group;
  j["chain"] = cfg.chain;
  j["cocycle"] = cfg.cocycle;
  j["max_r"] = cfg.max_r;
  j["max_level"] = cfg.max_level;
  j["rho_domain"] = cfg.rho_domain;
  j["r_list"] = cfg.r_list;
  j["mean"] = cfg.mean.foelner ? ("foelner:" + std::to_string(cfg.mean.box_size)) : "uniform";
  j["seed"] = cfg.seed;
  j["tol"] = cfg.tol;
  j["samples"] = cfg.samples;
  j["sample_radius"] = cfg.sample_radius;
  j["map"] = cfg.map_name;
  return j;
}

std::string forward_manifest(const RunConfig& cfg, const ForwardCert& cert) {
  std::ostringstream os;
  os << "kind = forward\n";
  os << "group = " << cfg.group << "\n";
  os << "chain = " << cfg.chain << "\n";
  os << "cocycle = " << cfg.cocycle << "\n";
  os << "max_r = " << cert.scope().max_r << "\n";
  os << "max_level = " << cert.scope().max_level << "\n";
  os << "rho_domain = " << cert.scope().rho_domain << "\n";
  return os.str();
}

std::string controls_csv(const FibredCert& cert) {
  std::ostringstream os;
  os << "distance,rho1_sq,rho2_sq,rho1_sq_float,rho2_sq_float\n";
  for (long long t = 0; t <= cert.scope().rho_domain; ++t) {
    Rational r1 = cert.rho1_sq(t), r2 = cert.rho2_sq(t);
    os << t << "," << rational_str(r1) << "," << rational_str(r2) << "," << to_double(r1) << ","
       << to_double(r2) << "\n";
  }
  return os.str();
}

std::string exclusions_csv(const FibredCert& cert, const std::vector<long long>& rs) {
  std::ostringstream os;
  os << "r,excluded_levels\n";
  for (long long r : rs) {
    os << r << ",";
    auto ex = cert.excluded(r);
    for (std::size_t i = 0; i < ex.size(); ++i) {
      if (i) os << " ";
      os << ex[i];
    }
    os << "\n";
  }
  return os.str();
}

std::vector<long long> effective_r_list(const RunConfig& cfg, long long max_r) {
  std::vector<long long> rs = cfg.r_list.empty() ? std::vector<long long>{max_r} : cfg.r_list;
  for (long long r : rs) {
    if (r < 1 || r > max_r) {
      throw ScopeError("requested radius " + std::to_string(r) + " outside certificate scope");
    }
  }
  return rs;
}

void run_forward_like(const RunConfig& cfg, const std::string& command, ojson& checks, bool& pass,
                      std::vector<std::pair<std::string, std::string>>& artifacts) {
  auto fwd = make_forward(cfg);
  std::shared_ptr<const FibredCert> cert = fwd;
  const ForwardCert* fwd_ptr = fwd.get();
  if (cfg.rho2_override) {
    cert = std::make_shared<Rho2Override>(fwd, cfg.rho2_override->first, cfg.rho2_override->second);
    fwd_ptr = nullptr;  // overridden controls no longer match the cocycle
  }
  auto rs = effective_r_list(cfg, cert->scope().max_r);

  ojson scope = check_record("scope-summary", true);
  scope["max_r"] = cert->scope().max_r;
  scope["levels"] = cert->levels();
  ojson nr = ojson::object();
  for (long long r : rs) nr[std::to_string(r)] = fwd->n_r(r);
  scope["first_admitted_level"] = std::move(nr);
  checks.push_back(std::move(scope));

  FibredVerification v = verify_fibred(*cert, fwd_ptr, rs, cfg.sample_radius, 4000);
  append_verification_checks(checks, v, fwd_ptr != nullptr);
  pass = pass && v.pass;

  artifacts.emplace_back("certificate.txt", forward_manifest(cfg, *fwd));
  artifacts.emplace_back("controls.csv", controls_csv(*cert));
  artifacts.emplace_back("exclusions.csv", exclusions_csv(*cert, rs));
  (void)command;
}

}  // namespace

void Session::run(const std::string& command) {
  artifacts_.clear();
  pass_ = true;
  ojson checks = ojson::array();

  if (command == "boxfam") {
    auto chain = make_chain(cfg_);
    int depth = cfg_.max_level > 0 ? cfg_.max_level : chain->depth();
    if (depth > chain->depth()) throw ConfigError("max_level exceeds chain depth");
    std::vector<int> levels;
    for (int n = 1; n <= depth; ++n) levels.push_back(n);

    ChainProbeReport probe = probe_chain_invariants(*chain, 4);
    ojson cp = check_record("chain-structure",
                            probe.nesting && probe.normality && probe.homomorphism && probe.lipschitz);
    cp["nesting"] = probe.nesting;
    cp["normality"] = probe.normality;
    cp["homomorphism"] = probe.homomorphism;
    cp["length_contraction"] = probe.lipschitz;
    if (!probe.detail.empty()) cp["witness"] = probe.detail;
    pass_ = pass_ && cp["verdict"].get<bool>();
    checks.push_back(std::move(cp));

    BoxSpace space{BoxFamily(chain, levels)};
    BoxMetricReport mrep = verify_box_metric(space, cfg_.samples, cfg_.seed, 5);
    ojson mc = check_record("glued-metric-axioms", mrep.violations.empty());
    mc["triples"] = mrep.triples_checked;
    mc["violations"] = static_cast<long long>(mrep.violations.size());
    pass_ = pass_ && mrep.violations.empty();
    checks.push_back(std::move(mc));

    bool sep_ok = true;
    std::ostringstream sep_csv;
    sep_csv << "n,m,separation\n";
    for (int n : levels) {
      for (int m : levels) {
        if (n == m) continue;
        long long s = space.component_separation(n, m);
        sep_ok = sep_ok && (s == n + m);
        sep_csv << n << "," << m << "," << s << "\n";
      }
    }
    ojson sc = check_record("component-separation", sep_ok);
    pass_ = pass_ && sep_ok;
    checks.push_back(std::move(sc));

    std::ostringstream comp_csv;
    comp_csv << "level,name,size,foelner_boxes\n";
    for (int n : levels) {
      const ChainLevel& lv = chain->level(n);
      comp_csv << n << "," << csv_escape(lv.name) << ","
               << (lv.finite_quotient ? std::to_string(lv.quotient.order()) : "unbounded") << ","
               << (lv.foelner_capable ? 1 : 0) << "\n";
    }
    artifacts_.emplace_back("components.csv", comp_csv.str());

    std::ostringstream len_csv;
    len_csv << "level,coset,length\n";
    for (int n : levels) {
      const ChainLevel& lv = chain->level(n);
      std::vector<Elem> pts = (lv.finite_quotient && lv.quotient.order() <= 256)
                                  ? lv.quotient.enumerate_all()
                                  : chain->quotient_table(n).ball(5);
      for (const Elem& e : pts) {
        len_csv << n << "," << csv_escape(lv.quotient.to_string(e)) << ","
                << chain->coset_length(n, e) << "\n";
      }
    }
    artifacts_.emplace_back("quotient_lengths.csv", len_csv.str());

    std::mt19937_64 rng(cfg_.seed);
    std::vector<BoxPoint> pool;
    for (int n : levels) {
      for (const Elem& e : chain->quotient_table(n).ball(5)) pool.push_back(BoxPoint{n, e});
    }
    std::ostringstream dp_csv;
    dp_csv << "level_x,x,level_y,y,distance\n";
    std::uniform_int_distribution<std::size_t> pick(0, pool.empty() ? 0 : pool.size() - 1);
    long long n_samples = std::min<long long>(cfg_.samples, 200);
    for (long long i = 0; i < n_samples && !pool.empty(); ++i) {
      const BoxPoint& a = pool[pick(rng)];
      const BoxPoint& b = pool[pick(rng)];
      dp_csv << a.level << "," << csv_escape(chain->level(a.level).quotient.to_string(a.coset))
             << "," << b.level << ","
             << csv_escape(chain->level(b.level).quotient.to_string(b.coset)) << ","
             << space.distance(a, b) << "\n";
    }
    artifacts_.emplace_back("dprime_samples.csv", dp_csv.str());
  } else if (command == "forward") {
    run_forward_like(cfg_, command, checks, pass_, artifacts_);
  } else if (command == "verify-cert") {
    if (cfg_.certificate_path.empty()) throw ConfigError("verify-cert needs certificate = PATH");
    std::ifstream in(cfg_.certificate_path);
    if (!in) throw ConfigError("cannot read certificate: " + cfg_.certificate_path);
    std::stringstream buf;
    buf << in.rdbuf();
    RunConfig cert_cfg = RunConfig::parse(buf.str());
    cert_cfg.seed = cfg_.seed;
    cert_cfg.tol = cfg_.tol;
    cert_cfg.samples = cfg_.samples;
    cert_cfg.sample_radius = cfg_.sample_radius;
    if (!cfg_.r_list.empty()) cert_cfg.r_list = cfg_.r_list;
    run_forward_like(cert_cfg, command, checks, pass_, artifacts_);
  } else if (command == "backward") {
    auto cert = make_forward(cfg_);
    auto rs = effective_r_list(cfg_, cert->scope().max_r);
    std::sort(rs.begin(), rs.end());
    std::mt19937_64 rng(cfg_.seed);
    const Group& G = cert->chain().parent();
    std::vector<PsiTable> tables;

    for (long long r : rs) {
      PsiTable table = build_psi(*cert, r, cfg_.mean);
      ojson proj = check_record("quotient-isometry-on-ball", true);
      proj["r"] = r;
      proj["level"] = table.level;
      checks.push_back(std::move(proj));

      const ChainLevel& lv = cert->chain().level(table.level);
      long long wd_checks = 0;
      bool wd_ok = true;
      std::vector<Elem> ts;
      if (!cfg_.mean.foelner) {
        ts = lv.quotient.enumerate_all();
      } else {
        ts = foelner_box(std::min<long long>(cfg_.mean.box_size, 3));
      }
      if (ts.size() > 64) {
        std::shuffle(ts.begin(), ts.end(), rng);
        ts.resize(64);
      }
      std::string wd_witness;
      for (const auto& [g, val] : table.values) {
        Elem gx = lv.project(g);
        for (const Elem& t : ts) {
          try {
            kr_eval(*cert, table.level, r, t, lv.quotient.multiply(t, gx), /*double_check=*/true);
          } catch (const StructureError& e) {
            wd_ok = false;
            if (wd_witness.empty()) wd_witness = e.what();
          }
          ++wd_checks;
        }
        (void)val;
      }
      ojson wd = check_record("kernel-subset-independence", wd_ok);
      wd["r"] = r;
      wd["pairs"] = wd_checks;
      if (!wd_witness.empty()) wd["witness"] = wd_witness;
      pass_ = pass_ && wd_ok;
      checks.push_back(std::move(wd));

      bool sym_ok = true;
      std::string sym_witness;
      for (const auto& [g, val] : table.values) {
        Rational other = table.values.at(G.inverse(g));
        if (!cfg_.mean.foelner) {
          if (other != val) sym_ok = false;
        } else {
          Rational diff = val > other ? val - other : other - val;
          if (diff > table.defect_bounds.at(g)) sym_ok = false;
        }
        if (!sym_ok && sym_witness.empty()) sym_witness = G.to_string(g);
      }
      ojson sym = check_record("symmetry-within-defect", sym_ok);
      sym["r"] = r;
      sym["exact"] = !cfg_.mean.foelner;
      if (!sym_witness.empty()) sym["witness"] = sym_witness;
      pass_ = pass_ && sym_ok;
      checks.push_back(std::move(sym));

      CndFunctionResult cnd =
          cnd_function_check(G, table.values, r, r, cfg_.tol, rng());
      ojson cj = check_record("local-negative-type", cnd.verdict);
      cj["r"] = r;
      cj["subsets"] = cnd.subsets_checked;
      cj["worst_extremal_eigenvalue"] = cnd.worst_extremal;
      cj["method"] = cnd.method;
      pass_ = pass_ && cnd.verdict;
      checks.push_back(std::move(cj));

      EnvelopeReport env = envelope_check(*cert, table.values);
      ojson ej = check_record("properness-envelope", env.pass);
      ej["r"] = r;
      ej["entries"] = env.checked;
      if (!env.witness.empty()) ej["witness"] = env.witness;
      pass_ = pass_ && env.pass;
      checks.push_back(std::move(ej));

      std::ostringstream csv;
      csv << "element,value,value_float,defect_bound\n";
      for (const auto& [g, val] : table.values) {
        csv << csv_escape(G.to_string(g)) << "," << rational_str(val) << "," << to_double(val)
            << ",";
        auto it = table.defect_bounds.find(g);
        if (it != table.defect_bounds.end()) csv << rational_str(it->second);
        csv << "\n";
      }
      artifacts_.emplace_back("psi_r" + std::to_string(r) + ".csv", csv.str());
      tables.push_back(std::move(table));
    }

    LimitTable limit = limit_psi(tables);
    ojson lj = check_record("limit-stabilization", limit.unstable.empty());
    lj["stable_entries"] = static_cast<long long>(limit.values.size());
    lj["unstable_entries"] = static_cast<long long>(limit.unstable.size());
    lj["undercovered_entries"] = static_cast<long long>(limit.undercovered.size());
    pass_ = pass_ && limit.unstable.empty();
    checks.push_back(std::move(lj));

    if (!limit.values.empty()) {
      long long covered = 0;
      while (true) {
        bool all = true;
        for (const Elem& g : G.ball(covered + 1)) {
          if (!limit.values.count(g)) {
            all = false;
            break;
          }
        }
        if (!all) break;
        ++covered;
      }
      if (covered >= 1) {
        CndFunctionResult gcnd =
            cnd_function_check(G, limit.values, std::nullopt, covered, cfg_.tol, rng());
        ojson gj = check_record("limit-negative-type", gcnd.verdict);
        gj["table_radius"] = covered;
        gj["subsets"] = gcnd.subsets_checked;
        gj["worst_extremal_eigenvalue"] = gcnd.worst_extremal;
        pass_ = pass_ && gcnd.verdict;
        checks.push_back(std::move(gj));
      }
      EnvelopeReport lenv = envelope_check(*cert, limit.values);
      ojson le = check_record("limit-properness-envelope", lenv.pass);
      le["entries"] = lenv.checked;
      if (!lenv.witness.empty()) le["witness"] = lenv.witness;
      pass_ = pass_ && lenv.pass;
      checks.push_back(std::move(le));
    }

    std::ostringstream lim_csv;
    lim_csv << "element,value,value_float,status\n";
    std::set<Elem> all_keys;
    for (const auto& [g, v] : limit.values) all_keys.insert(g);
    for (const Elem& g : limit.unstable) all_keys.insert(g);
    for (const Elem& g : limit.undercovered) all_keys.insert(g);
    for (const Elem& g : all_keys) {
      lim_csv << csv_escape(G.to_string(g)) << ",";
      auto it = limit.values.find(g);
      if (it != limit.values.end()) {
        lim_csv << rational_str(it->second) << "," << to_double(it->second) << ",stable\n";
      } else if (limit.unstable.count(g)) {
        lim_csv << ",,unstable\n";
      } else {
        lim_csv << ",,undercovered\n";
      }
    }
    artifacts_.emplace_back("psi_limit.csv", lim_csv.str());
  } else if (command == "pullback") {
    auto target = make_forward(cfg_);
    long long dom = cfg_.map_domain > 0 ? cfg_.map_domain : 2 * cfg_.max_r + 2;
    CoarseMapFamily map = cfg_.map_name == "identity"
                              ? CoarseMapFamily::identity_maps(target->chain_ptr(), dom)
                              : cfg_.map_name == "doubling"
                                    ? CoarseMapFamily::doubling_maps(target->chain_ptr(), dom)
                                    : throw ConfigError("unknown map: " + cfg_.map_name);

    CoarseReport crep = verify_coarse(map, 5);
    ojson cc = check_record("coarse-control-sandwich", crep.pass);
    cc["pairs"] = crep.pairs_checked;
    cc["lower_control_growth"] = crep.m_unbounded;
    if (!crep.witness.empty()) cc["witness"] = crep.witness;
    pass_ = pass_ && crep.pass;
    checks.push_back(std::move(cc));

    auto pb = std::make_shared<PullbackCert>(target, std::move(map));
    auto rs = effective_r_list(cfg_, pb->scope().max_r);

    ojson scope = check_record("scope-summary", true);
    scope["max_r"] = pb->scope().max_r;
    scope["levels"] = pb->levels();
    ojson dr = ojson::object();
    for (long long r : rs) dr[std::to_string(r)] = pb->delegated_radius(r);
    scope["delegated_radius"] = std::move(dr);
    checks.push_back(std::move(scope));

    FibredVerification v = verify_fibred(*pb, nullptr, rs, cfg_.sample_radius, 4000);
    append_verification_checks(checks, v, false);
    pass_ = pass_ && v.pass;

    artifacts_.emplace_back("controls.csv", controls_csv(*pb));
    artifacts_.emplace_back("exclusions.csv", exclusions_csv(*pb, rs));
  } else {
    throw ConfigError("unknown command: " + command);
  }

  ojson report;
  report["schema_version"] = 1;
  report["command"] = command;
  report["config"] = config_echo(cfg_);
  report["checks"] = std::move(checks);
  report["summary"]["pass"] = pass_;
  report_ = report.dump(2) + "\n";
  has_run_ = true;
}

}  // namespace hgp
