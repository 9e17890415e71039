#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "tameforge/io.hpp"
#include "tameforge/stable_tame.hpp"

using nlohmann::json;
using namespace tameforge;

namespace {

/// Exit codes: 0 PASS or Complete, 2 FAIL or Reduced, 1 usage and parse errors.
constexpr int kPass = 0, kUsage = 1, kFail = 2;

struct Options {
  std::string output, trace_path, ring;
  unsigned seed = 1;
  bool quiet = false;
};

std::string fixture(const std::string& name) { return std::string(TAMEFORGE_FIXTURE_DIR) + "/" + name; }

/// Loads a map document; with a ring override the coordinate text is re-read over that ring.
PolyMap load_map(const std::string& path, const std::string& ring = "") {
  json doc = read_json_file(path);
  if (!ring.empty()) doc["ring"] = ring;
  return map_from_json(doc);
}

TameWord load_word(const std::string& path) { return word_from_json(read_json_file(path)); }

class Output {
 public:
  explicit Output(const Options& o) : opt_(o) {}

  void document(const json& doc) const {
    std::string text = dump_json(doc);
    if (opt_.output.empty())
      std::cout << text;
    else
      write_text_file(opt_.output, text);
  }

  void trace(const std::vector<TraceEntry>& entries) const {
    std::ostringstream s;
    for (const auto& e : entries) {
      s << e.lemma;
      if (!e.detail.empty()) s << ": " << e.detail;
      if (!e.n_values.empty()) {
        s << " [N";
        for (unsigned n : e.n_values) s << " " << n;
        s << "]";
      }
      s << "\n";
    }
    note(s.str());
  }

  void note(const std::string& text) const {
    if (!opt_.trace_path.empty()) {
      std::ofstream out(opt_.trace_path, std::ios::app);
      out << text;
    } else if (!opt_.quiet) {
      std::cerr << text;
    }
  }

 private:
  const Options& opt_;
};

json trace_json(const std::vector<TraceEntry>& entries) {
  json out = json::array();
  for (const auto& e : entries) out.push_back({{"lemma", e.lemma}, {"detail", e.detail}, {"N", e.n_values}});
  return out;
}

json matrix_json(const PolyMatrix& m) {
  json rows = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (const auto& x : row) r.push_back(x.str());
    rows.push_back(r);
  }
  return rows;
}

json report_json(const PipelineReport& rep) {
  json doc;
  doc["status"] = rep.status == PipelineStatus::Complete ? "Complete" : "Reduced";
  doc["addedDims"] = rep.added_dims;
  doc["layers"] = rep.layers;
  doc["trace"] = trace_json(rep.trace);
  if (rep.status == PipelineStatus::Complete) {
    doc["certificate"] = certificate_to_json(rep.certificate);
    return doc;
  }
  const SweepReduction& red = *rep.reduction;
  json r;
  r["target"] = map_to_json(rep.certificate.target);
  r["stabilizeBy"] = rep.certificate.stabilize_by;
  r["ring"] = red.frame->ring()->str();
  r["vars"] = red.frame->names();
  r["dim"] = red.residual.dim();
  json tau = json::array();
  for (const auto& q : red.tau) tau.push_back(q.str());
  r["tau"] = tau;
  r["gamma"] = matrix_json(red.gamma.matrix);
  r["gammaInverse"] = matrix_json(red.gamma.inverse);
  json coords = json::array();
  for (const auto& c : red.residual.coords()) coords.push_back(c.str());
  r["residual"] = coords;
  r["left"] = word_to_json(red.left);
  r["right"] = word_to_json(red.right);
  doc["reduction"] = r;
  return doc;
}

/// Verifies a reduction document: target stabilized equals left o residual o right.
Verdict verify_reduction(const json& r) {
  PolyMap target = map_from_json(r.at("target"));
  std::size_t stab = r.at("stabilizeBy").get<std::size_t>();
  json frame_doc{{"ring", r.at("ring")}, {"vars", r.at("vars")}, {"dim", r.at("dim")}, {"coords", r.at("residual")}};
  PolyMap residual = map_from_json(frame_doc);
  const FramePtr& f = residual.frame();
  std::size_t n = residual.dim();
  auto word = [&](const char* key) {
    TameWord w(f, n);
    for (const auto& g : r.at(key)) w.push(gen_from_json(g, f, n));
    return w;
  };
  if (f->size() != target.frame()->size() + stab) {
    Verdict v;
    v.message = "residual frame does not match target dimension plus stabilization";
    return v;
  }
  return compare_maps(stabilize_into(target, f, stab),
                      compose(compose(evaluate_word(word("left")), residual), evaluate_word(word("right"))));
}

int finish_certificate(const Output& out, const Certificate& c, const std::vector<TraceEntry>& trace = {}) {
  Verdict v = verify_certificate(c);
  out.document(certificate_to_json(c));
  out.trace(trace);
  out.note(std::string("verify: ") + (v.pass ? "PASS" : "FAIL " + v.message) + "\n");
  return v.pass ? kPass : kFail;
}

int finish_report(const Output& out, const PipelineReport& rep) {
  out.document(report_json(rep));
  out.trace(rep.trace);
  Verdict v = verify_report(rep);
  bool complete = rep.status == PipelineStatus::Complete;
  out.note(std::string(complete ? "Complete" : "Reduced") + ", added dimensions " + std::to_string(rep.added_dims) +
           ", layers " + std::to_string(rep.layers) + ", verify " + (v.pass ? "PASS" : "FAIL " + v.message) + "\n");
  return complete && v.pass ? kPass : kFail;
}

ModnilStrategy parse_strategy(const std::string& s) {
  return s == "linear" ? ModnilStrategy::Linear : ModnilStrategy::Halving;
}

// ---------------------------------------------------------------------------------------------
// Demos

/// Random plane word over Q with composed degree at most max_degree.
TameWord random_plane_word(std::mt19937& rng, const FramePtr& f, unsigned max_degree) {
  std::uniform_int_distribution<int> coef(-3, 3);
  TameWord w(f, 2);
  unsigned budget = max_degree, steps = 2 + rng() % 5;
  std::size_t last = rng() % 2;
  for (unsigned k = 0; k < steps && budget > 1; ++k) {
    if (rng() % 3 == 0) {
      PolyMatrix m = identity_matrix(f, 2), inv = identity_matrix(f, 2);
      int c = coef(rng);
      m[0][1] = MultiPoly::constant(f, c);
      inv[0][1] = MultiPoly::constant(f, -c);
      w.push(Linear{m, inv});
      continue;
    }
    unsigned d = 1 + rng() % budget;
    budget /= d;
    last = 1 - last;
    MultiPoly x = MultiPoly::var(f, 1 - last);
    MultiPoly p = pow(x, d);
    for (unsigned e = 0; e < d; ++e) p += MultiPoly::constant(f, coef(rng)) * pow(x, e);
    w.push_elementary(last, p);
  }
  return w;
}

int demo(const std::string& name, unsigned depth, const Options& opt, const Output& out) {
  if (name == "nagata-nilpotent") {
    PolyMap phi = load_map(fixture("nagata.map"), "Q[a]/(a^2)");
    PipelineReport rep = artinian_factor(phi);
    out.note("Nagata map over " + phi.ring()->str() + "\n");
    return finish_report(out, rep);
  }
  if (name == "nagata-dedekind") {
    PolyMap phi = load_map(fixture("nagata_T.map"));
    TameWord word_rt = load_word(fixture("nagata_rt.word"));
    TameWord stable = load_word(fixture("nagata_stable.word"));
    RingElem t = parse_elem("T", phi.ring());
    ModularFactor mod = [&](unsigned n) { return base_change_word(stable, Ring::quotient(phi.ring(), pow(t, n))); };
    out.note("Nagata map over " + phi.ring()->str() + ", localized at T\n");
    return finish_report(out, locmod_sweep(phi, t, word_rt, mod));
  }
  if (name == "jvdk-roundtrip") {
    std::mt19937 rng(opt.seed);
    FramePtr f = make_frame(parse_ring("Q"), {"X", "Y"});
    unsigned pass = 0;
    const unsigned total = 100;
    for (unsigned k = 0; k < total; ++k) {
      PolyMap phi = evaluate_word(random_plane_word(rng, f, 10));
      try {
        if (evaluate_word(jvdk_factor(phi)) == phi) ++pass;
      } catch (const TameError& e) {
        out.note("instance " + std::to_string(k) + ": " + e.what() + "\n");
      }
    }
    std::cout << pass << "/" << total << " PASS\n";
    return pass == total ? kPass : kFail;
  }
  if (name == "modnil-charp") {
    PolyMap phi = load_map(fixture("charp.map"), "Z/3[T]/(T^" + std::to_string(depth) + ")");
    RingElem t = parse_elem("T", phi.ring());
    PipelineReport lin = modnil_factor(phi, t, field_base_factor, ModnilStrategy::Linear);
    PipelineReport half = modnil_factor(phi, t, field_base_factor, ModnilStrategy::Halving);
    bool ok = verify_certificate(lin.certificate).pass && verify_certificate(half.certificate).pass;
    std::cout << "D " << depth << ": linear " << lin.layers << " layers, halving " << half.layers << " layers, "
              << (ok ? "PASS" : "FAIL") << "\n";
    out.trace(half.trace);
    return ok ? kPass : kFail;
  }
  throw CLI::ValidationError("demo", "unknown demo '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact factorization and certificates for polynomial automorphisms"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("-o,--output", opt.output, "Write the document here instead of standard output");
  app.add_option("--trace", opt.trace_path, "Append the execution trace to this file instead of standard error");
  app.add_flag("-q,--quiet", opt.quiet, "Suppress the trace on standard error");
  app.add_option("--seed", opt.seed, "Random seed (default 1)")->envname("TAMEFORGE_SEED");
  app.add_option("--ring", opt.ring, "Re-read input maps over this ring");

  std::string in1, in2, t_text = "T", strategy = "halving", word_path, modular = "artinian", a_text, f_text, z_name,
                        demo_name;
  unsigned m = 2, initial_n = 1, max_rounds = 8, depth_cap = 3, depth = 8;
  std::size_t eps_index = 1;

  auto* parse = app.add_subcommand("parse", "Normalize a map document");
  parse->add_option("map", in1, "Map document")->required();
  auto* comp = app.add_subcommand("compose", "Composite first o second of two maps");
  comp->add_option("first", in1, "Map document")->required();
  comp->add_option("second", in2, "Map document")->required();
  auto* jac = app.add_subcommand("jacobian", "Jacobian determinant of a map");
  jac->add_option("map", in1, "Map document")->required();
  auto* psi = app.add_subcommand("psi", "Psi_s(phi) over the localization at s");
  psi->add_option("map", in1, "Map document")->required();
  psi->add_option("--s", t_text, "Element s of the base ring (default T)");
  auto* mono = app.add_subcommand("factor-monomial", "Five-generator word for (X + aX^m, (1 - m a X^(m-1)) Z)");
  mono->add_option("--a", a_text, "Square-zero coefficient a")->required();
  mono->add_option("--m", m, "Exponent m (default 2)");
  auto* nil = app.add_subcommand("factor-nilslice", "Factor X + H with square-zero coefficients");
  nil->add_option("map", in1, "Map document")->required();
  auto* jv = app.add_subcommand("factor-jvdk", "Plane degree reduction over a field");
  jv->add_option("map", in1, "Map document")->required();
  auto* mn = app.add_subcommand("factor-modnil", "Lifting through a nilpotent ideal (t)");
  mn->add_option("map", in1, "Map document")->required();
  mn->add_option("--t", t_text, "Nilpotent generator (default T)");
  mn->add_option("--strategy", strategy, "linear or halving (default halving)")
      ->check(CLI::IsMember({"linear", "halving"}));
  auto* art = app.add_subcommand("factor-artinian", "Plane maps over Artinian rings");
  art->add_option("map", in1, "Map document")->required();
  art->add_option("--strategy", strategy, "linear or halving (default halving)")
      ->check(CLI::IsMember({"linear", "halving"}));
  auto* sweep = app.add_subcommand("sweep-locmod", "Localization sweep to an affine residual");
  sweep->add_option("map", in1, "Map document over R")->required();
  sweep->add_option("--word", word_path, "Word document over the localization R_t")->required();
  sweep->add_option("--t", t_text, "Localized element (default T)");
  sweep->add_option("--modular", modular,
                    "'artinian' (factor the reduction mod t^N) or a word document over R reduced mod t^N");
  sweep->add_option("--initial-n", initial_n, "First N tried (default 1)");
  sweep->add_option("--max-rounds", max_rounds, "Restarts with larger N (default 8)");
  auto* fl = app.add_subcommand("final-lift", "Integral lift of tau eps(t^N Z) tau^-1");
  fl->add_option("--tau", word_path, "Word document over R_t")->required();
  fl->add_option("--eps-index", eps_index, "Coordinate of the elementary factor (1-based)")->required();
  fl->add_option("--eps-f", f_text, "Polynomial of the elementary factor")->required();
  fl->add_option("--z", z_name, "Parameter Z")->required();
  fl->add_option("--depth-cap", depth_cap, "Maximum generators of tau (default 3)");
  auto* ver = app.add_subcommand("verify", "Verify a certificate or report document");
  ver->add_option("document", in1, "Certificate or report")->required();
  auto* dm = app.add_subcommand("demo", "Run a named demonstration");
  dm->add_option("name", demo_name, "nagata-nilpotent, nagata-dedekind, jvdk-roundtrip or modnil-charp")
      ->required()
      ->check(CLI::IsMember({"nagata-nilpotent", "nagata-dedekind", "jvdk-roundtrip", "modnil-charp"}));
  dm->add_option("--depth", depth, "Nilpotency index D for modnil-charp (default 8)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  Output out(opt);
  try {
    if (*parse) {
      out.document(map_to_json(load_map(in1, opt.ring)));
      return kPass;
    }
    if (*comp) {
      out.document(map_to_json(compose(load_map(in1, opt.ring), load_map(in2, opt.ring))));
      return kPass;
    }
    if (*jac) {
      out.document(json{{"jacobian", jacobian_det(load_map(in1, opt.ring)).str()}});
      return kPass;
    }
    if (*psi) {
      PolyMap phi = load_map(in1, opt.ring);
      RingElem s = parse_elem(t_text, phi.ring());
      out.document(map_to_json(psi_map(localize_map(phi, Ring::localization(phi.ring(), s)), s)));
      return kPass;
    }
    if (*mono) {
      if (opt.ring.empty()) throw CLI::ValidationError("--ring", "factor-monomial needs --ring");
      RingElem a = parse_elem(a_text, parse_ring(opt.ring));
      return finish_certificate(out, Certificate{monomial_target(a, m), 0, monomial_factor(a, m)});
    }
    if (*nil) {
      PolyMap phi = load_map(in1, opt.ring);
      std::vector<MultiPoly> h;
      for (std::size_t i = 0; i < phi.dim(); ++i) h.push_back(phi[i] - MultiPoly::var(phi.frame(), i));
      if (phi.ring()->q_algebra()) return finish_certificate(out, Certificate{phi, 0, nilslice_q_factor(h, phi.dim())});
      StabFactor st = nilslice_stab_factor(h, phi.dim());
      return finish_certificate(out, Certificate{st.target, 0, st.word});
    }
    if (*jv) {
      PolyMap phi = load_map(in1, opt.ring);
      return finish_certificate(out, Certificate{phi, 0, jvdk_factor(phi)});
    }
    if (*mn) {
      PolyMap phi = load_map(in1, opt.ring);
      RingElem t = parse_elem(t_text, phi.ring());
      return finish_report(out, modnil_factor(phi, t, field_base_factor, parse_strategy(strategy)));
    }
    if (*art) return finish_report(out, artinian_factor(load_map(in1, opt.ring), parse_strategy(strategy)));
    if (*sweep) {
      PolyMap phi = load_map(in1, opt.ring);
      RingElem t = parse_elem(t_text, phi.ring());
      TameWord w = load_word(word_path);
      ModularFactor mod;
      if (modular == "artinian") {
        mod = artinian_modular_factor(phi, t);
      } else {
        TameWord lifted = load_word(modular);
        RingPtr r = phi.ring();
        mod = [lifted, r, t](unsigned n) { return base_change_word(lifted, Ring::quotient(r, pow(t, n))); };
      }
      return finish_report(out, locmod_sweep(phi, t, w, mod, LocmodOptions{initial_n, max_rounds}));
    }
    if (*fl) {
      TameWord tau = load_word(word_path);
      const FramePtr& f = tau.frame();
      std::size_t z = f->size();
      for (std::size_t k = tau.dim(); k < f->size(); ++k)
        if (f->names()[k] == z_name) z = k;
      if (z == f->size()) throw CLI::ValidationError("--z", "'" + z_name + "' is not a parameter of the word");
      if (eps_index == 0 || eps_index > tau.dim()) throw CLI::ValidationError("--eps-index", "out of range");
      Elementary eps = make_elementary(tau.dim(), eps_index - 1, parse_poly(f_text, f));
      FinalLift lift = final_lift(tau, eps, z, depth_cap);
      out.document(json{{"nExp", lift.n_exp},
                        {"added", lift.added},
                        {"word", word_document(lift.word)},
                        {"trace", trace_json(lift.trace)}});
      out.trace(lift.trace);
      out.note("N " + std::to_string(lift.n_exp) + ", added dimensions " + std::to_string(lift.added) + "\n");
      return kPass;
    }
    if (*ver) {
      json doc = read_json_file(in1);
      Verdict v;
      if (doc.contains("status")) {
        v = doc.at("status") == "Complete" ? verify_certificate(certificate_from_json(doc.at("certificate")))
                                           : verify_reduction(doc.at("reduction"));
      } else {
        v = verify_certificate(certificate_from_json(doc));
      }
      std::cout << (v.pass ? "PASS" : "FAIL: " + v.message) << "\n";
      return v.pass ? kPass : kFail;
    }
    if (*dm) return demo(demo_name, depth, opt, out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const TameError& e) {
    std::cerr << e.what() << "\n";
    return e.code() == ErrorCode::ParseError ? kUsage : kFail;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "ParseError: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
