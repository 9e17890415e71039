#pragma once

#include <random>
#include <string>

#include "tameforge/automap.hpp"
#include "tameforge/io.hpp"

namespace tameforge::testing_support {

inline std::string fixture(const std::string& name) { return std::string(TAMEFORGE_FIXTURE_DIR) + "/" + name; }

inline PolyMap load_map(const std::string& name) { return map_from_json(read_json_file(fixture(name))); }

inline TameWord load_word(const std::string& name) { return word_from_json(read_json_file(fixture(name))); }

inline MultiPoly P(const std::string& s, const FramePtr& f) { return parse_poly(s, f); }

/// Random polynomial in the listed variables with small integer coefficients.
inline MultiPoly random_poly(std::mt19937& rng, const FramePtr& f, const std::vector<std::size_t>& vars, unsigned max_deg,
                             unsigned terms, int coef = 3) {
  std::uniform_int_distribution<int> c(-coef, coef);
  MultiPoly p(f);
  for (unsigned k = 0; k < terms; ++k) {
    Exponent e(f->size(), 0);
    unsigned budget = rng() % (max_deg + 1);
    for (unsigned d = 0; d < budget && !vars.empty(); ++d) ++e[vars[rng() % vars.size()]];
    p.add_term(e, f->ring()->from_int(c(rng)));
  }
  return p;
}

/// Random word of elementary and (unimodular integer) linear generators.
inline TameWord random_word(std::mt19937& rng, const FramePtr& f, std::size_t dim, unsigned length, unsigned max_deg,
                            bool allow_linear = true) {
  TameWord w(f, dim);
  while (w.size() < length) {
    if (allow_linear && rng() % 4 == 0) {
      // elementary matrix I + c E_rs as a linear generator
      std::size_t r = rng() % dim, s = rng() % dim;
      if (r == s) continue;
      int c = int(rng() % 5) - 2;
      if (c == 0) continue;
      PolyMatrix m = identity_matrix(f, dim), inv = identity_matrix(f, dim);
      m[r][s] = MultiPoly::constant(f, c);
      inv[r][s] = MultiPoly::constant(f, -c);
      w.push(Linear{m, inv});
      continue;
    }
    std::size_t i = rng() % dim;
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < f->size(); ++j)
      if (j != i) others.push_back(j);
    w.push_elementary(i, random_poly(rng, f, others, max_deg, 2));
  }
  return w;
}

}  // namespace tameforge::testing_support
