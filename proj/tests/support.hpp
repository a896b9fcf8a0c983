#ifndef PBEM_TESTS_SUPPORT_HPP
#define PBEM_TESTS_SUPPORT_HPP

#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "pbem/calculus.hpp"
#include "pbem/parser.hpp"

namespace testing {

inline pbem::Expr fx(const std::string& s) { return pbem::parse(s, pbem::Context::FieldSpace); }
inline pbem::Expr px(const std::string& s) { return pbem::parse(s, pbem::Context::PhaseSpace); }
inline pbem::VectorField fv(const std::string& s) { return pbem::parse_vector(s, pbem::Context::FieldSpace); }
inline pbem::VectorField pv(const std::string& s) { return pbem::parse_vector(s, pbem::Context::PhaseSpace); }

/// Random polynomial in x1..x3 and t with small integer coefficients.
inline pbem::Expr random_poly(std::mt19937& rng, int max_degree, int terms, bool with_time = true) {
  std::uniform_int_distribution<int> coeff(-3, 3);
  std::uniform_int_distribution<int> deg(0, max_degree);
  std::uniform_int_distribution<int> var(0, with_time ? 3 : 2);
  pbem::Expr out;
  for (int n = 0; n < terms; ++n) {
    pbem::Expr mono(coeff(rng));
    const int d = deg(rng);
    for (int k = 0; k < d; ++k) {
      const int which = var(rng);
      mono *= which == 3 ? pbem::Expr::time() : pbem::Expr::x(pbem::Index::concrete(which + 1));
    }
    out += mono;
  }
  return out;
}

inline pbem::VectorField random_vector(std::mt19937& rng, int max_degree, int terms, bool with_time = true) {
  return {random_poly(rng, max_degree, terms, with_time), random_poly(rng, max_degree, terms, with_time),
          random_poly(rng, max_degree, terms, with_time)};
}

/// Monomials of degree <= 2 in q1..q3, v1..v3 (excluding the constant).
inline std::vector<pbem::Expr> phase_monomials() {
  std::vector<pbem::Expr> vars;
  for (int i = 1; i <= 3; ++i) vars.push_back(pbem::Expr::q(pbem::Index::concrete(i)));
  for (int i = 1; i <= 3; ++i) vars.push_back(pbem::Expr::v(pbem::Index::concrete(i)));
  std::vector<pbem::Expr> out = vars;
  for (std::size_t a = 0; a < vars.size(); ++a)
    for (std::size_t b = a; b < vars.size(); ++b) out.push_back(vars[a] * vars[b]);
  return out;
}

}  // namespace testing

namespace doctest {
template <>
struct StringMaker<pbem::Expr> {
  static String convert(const pbem::Expr& x) { return x.str().c_str(); }
};
template <>
struct StringMaker<pbem::VectorField> {
  static String convert(const pbem::VectorField& x) { return pbem::str(x).c_str(); }
};
}  // namespace doctest

#endif  // PBEM_TESTS_SUPPORT_HPP
