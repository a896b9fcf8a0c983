#ifndef PBEM_BRACKET_HPP
#define PBEM_BRACKET_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pbem/calculus.hpp"
#include "pbem/expr.hpp"

namespace pbem {

class UnsupportedOperandError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base rules: {q_i,q_j} = 0, {q_i,v_j} = delta_ij/m,
/// {v_i,v_j} = e/(m^2 c) eps_ijk B_k, {q_i,f(q,t)} = 0, {v_i,f(q,t)} = -(1/m) df/dq_i,
/// extended by antisymmetry, bilinearity and the Leibniz rule in both slots.
struct BracketRules {
  /// Magnetic field entering {v_i,v_j}; abstract B_k atoms when unset.
  std::optional<VectorField> magnetic;
};

Expr bracket(const Expr& a, const Expr& b, const BracketRules& rules = {});

/// {a,{b,c}} + {b,{c,a}} + {c,{a,b}}
Expr jacobi_residual(const Expr& a, const Expr& b, const Expr& c, const BracketRules& rules = {});

// --- certified derivations ------------------------------------------------------

enum class Rule {
  Bracket,
  Jacobi,
  Sum,
  Difference,
  Product,
  SwapIndices,
  TimeDerivativeFree,
  TimeDerivativeOnShell,
  ImposeDivergenceFree,
  Proportionality,
};

std::string rule_name(Rule r);
std::optional<Rule> rule_from_name(std::string_view name);

/// Recomputes a rule on its inputs. `param` carries rule options
/// ("i,j" for SwapIndices; TimeDerivativeOnShell always uses the Lorentz force).
Expr apply_rule(Rule rule, const std::vector<Expr>& inputs, const std::string& param = {});

/// Drops every term holding the trace d B_l / d q_l (and derivatives of it).
Expr impose_divergence_free(const Expr& x, FieldFamily family = FieldFamily::B);

struct DerivationStep {
  std::string name;
  Rule rule = Rule::Sum;
  std::string citation;
  std::string param;
  std::vector<Expr> inputs;
  Expr output;
  std::optional<Expr> expected;
  bool holds = true;
  std::optional<Expr> witness;
};

struct Constraint {
  std::string name;
  Expr expr;
  /// Present once concrete fields were bound.
  std::optional<bool> verdict;
  std::vector<Expr> residual;
};

struct DerivationReport {
  std::vector<DerivationStep> steps;
  std::vector<Constraint> constraints;
  /// Engine-computed constants, e.g. the multiple of div B in contracted Jacobi identities.
  std::vector<std::pair<std::string, Expr>> multipliers;

  bool pass() const;
  const DerivationStep* find(std::string_view name) const;
  const Constraint* constraint(std::string_view name) const;
  std::optional<Expr> multiplier(std::string_view name) const;
  void append(const DerivationReport& other);
};

/// Every step's output equals its rule recomputed on its inputs, and every
/// expectation it claims holds.
bool reverify(const DerivationReport& report);

DerivationReport derive_qF_antisymmetry(const IndexedVector& force);
DerivationReport verify_E_bracket(const IndexedVector& force);
DerivationReport derive_divB();
DerivationReport derive_faraday(bool use_divB);
DerivationReport run_chain(const std::optional<VectorField>& e_field, const std::optional<VectorField>& b_field);

/// Substitutes field-space E/B into every constraint that only needs bound families.
void bind_constraints(DerivationReport& report, const std::optional<VectorField>& e_field,
                      const std::optional<VectorField>& b_field);

}  // namespace pbem

#endif  // PBEM_BRACKET_HPP
