#include "pbem/bracket.hpp"

namespace pbem {

namespace {

std::vector<Factor> open_term(const Term& t, const std::string& prefix) {
  std::vector<Factor> out = t.factors;
  auto open = [&](Index& i) {
    if (i.is_dummy()) i = Index::free(prefix + std::to_string(i.value));
  };
  for (auto& f : out) {
    for (auto& i : f.indices) open(i);
    for (auto& d : f.derivs)
      if (d.kind != VarKind::Time) open(d.index);
  }
  return out;
}

bool is_tensor_constant(const Factor& f) { return f.kind == AtomKind::Delta || f.kind == AtomKind::Epsilon; }

void check_operand(const Factor& f) {
  if (f.kind == AtomKind::Acceleration)
    throw UnsupportedOperandError("bracket of an acceleration symbol is not defined");
  if (f.kind == AtomKind::SpatialVar)
    throw UnsupportedOperandError("bracket of a field-space coordinate is not defined");
}

Expr velocity_bracket(const Index& i, const Index& j, const BracketRules& rules) {
  const Expr k = Expr::constant(1, {1, -2, -1});
  if (!rules.magnetic) {
    const Index n = Index::free("%vk");
    return k * Expr::epsilon(i, j, n) * Expr::field(FieldFamily::B, n);
  }
  Expr sum;
  for (int n = 1; n <= 3; ++n)
    sum += Expr::epsilon(i, j, Index::concrete(n)) * to_phase_space((*rules.magnetic)[static_cast<std::size_t>(n - 1)]);
  return k * sum;
}

Expr atom_bracket(const Factor& f, const Factor& g, const BracketRules& rules) {
  const bool fv = f.kind == AtomKind::Velocity;
  const bool gv = g.kind == AtomKind::Velocity;
  if (!fv && !gv) return {};
  const Expr inv_m = Expr::mass().inverse();
  if (fv && gv) return velocity_bracket(f.indices[0], g.indices[0], rules);
  if (fv) return -(inv_m * partial(Expr::from_factor(g), Variable::q(f.indices[0])));
  return inv_m * partial(Expr::from_factor(f), Variable::q(g.indices[0]));
}

Expr term_bracket(const Term& ta, const Term& tb, const BracketRules& rules) {
  for (const auto& f : ta.factors) check_operand(f);
  for (const auto& f : tb.factors) check_operand(f);
  const auto fa = open_term(ta, "%a");
  const auto fb = open_term(tb, "%b");
  const Expr coeff = Expr::constant(ta.coeff * tb.coeff, ta.consts + tb.consts);
  Expr sum;
  for (std::size_t i = 0; i < fa.size(); ++i) {
    if (is_tensor_constant(fa[i])) continue;
    for (std::size_t j = 0; j < fb.size(); ++j) {
      if (is_tensor_constant(fb[j])) continue;
      const Expr br = atom_bracket(fa[i], fb[j], rules);
      if (br.is_zero()) continue;
      Expr prod = coeff * br;
      for (std::size_t k = 0; k < fa.size(); ++k)
        if (k != i) prod = prod * Expr::from_factor(fa[k]);
      for (std::size_t l = 0; l < fb.size(); ++l)
        if (l != j) prod = prod * Expr::from_factor(fb[l]);
      sum += prod;
    }
  }
  return sum;
}

}  // namespace

Expr bracket(const Expr& a, const Expr& b, const BracketRules& rules) {
  Expr sum;
  for (const auto& ta : a.terms())
    for (const auto& tb : b.terms()) sum += term_bracket(ta, tb, rules);
  return sum;
}

Expr jacobi_residual(const Expr& a, const Expr& b, const Expr& c, const BracketRules& rules) {
  return bracket(a, bracket(b, c, rules), rules) + bracket(b, bracket(c, a, rules), rules) +
         bracket(c, bracket(a, b, rules), rules);
}

}  // namespace pbem
