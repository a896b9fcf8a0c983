#include <algorithm>
#include <array>
#include <stdexcept>

#include "pbem/bracket.hpp"
#include "pbem/parser.hpp"

namespace pbem {

namespace {

constexpr std::array<std::pair<Rule, const char*>, 10> kRuleNames{{
    {Rule::Bracket, "bracket"},
    {Rule::Jacobi, "jacobi"},
    {Rule::Sum, "sum"},
    {Rule::Difference, "difference"},
    {Rule::Product, "product"},
    {Rule::SwapIndices, "swap-indices"},
    {Rule::TimeDerivativeFree, "time-derivative"},
    {Rule::TimeDerivativeOnShell, "time-derivative-on-shell"},
    {Rule::ImposeDivergenceFree, "impose-div-free"},
    {Rule::Proportionality, "proportionality"},
}};

void require_arity(const std::vector<Expr>& inputs, std::size_t n, Rule r) {
  if (inputs.size() != n)
    throw std::invalid_argument("rule " + rule_name(r) + " takes " + std::to_string(n) + " inputs");
}

Expr swap_indices(const Expr& x, const std::string& param) {
  const auto comma = param.find(',');
  if (comma == std::string::npos) throw std::invalid_argument("swap-indices expects \"i,j\"");
  const std::string a = param.substr(0, comma);
  const std::string b = param.substr(comma + 1);
  Expr y = rename_index(x, a, Index::free("%swap"));
  y = rename_index(y, b, Index::free(a));
  return rename_index(y, "%swap", Index::free(b));
}

Expr p(const std::string& text) { return parse(text, ParseOptions{Context::PhaseSpace, true}); }

struct Builder {
  DerivationReport report;

  Expr step(std::string name, Rule rule, std::string citation, std::vector<Expr> inputs,
                   std::optional<Expr> expected = std::nullopt, std::string param = {}) {
    DerivationStep s;
    s.name = std::move(name);
    s.rule = rule;
    s.citation = std::move(citation);
    s.param = std::move(param);
    s.inputs = std::move(inputs);
    s.output = apply_rule(s.rule, s.inputs, s.param);
    if (expected) {
      s.holds = equivalent(s.output, *expected);
      if (!s.holds) s.witness = s.output - *expected;
      s.expected = std::move(expected);
    }
    report.steps.push_back(std::move(s));
    return report.steps.back().output;
  }
};

/// First index pair (i <= j) where the symmetric part of x_ij is nonzero.
std::optional<Expr> symmetric_witness(const Expr& x, const std::string& i, const std::string& j) {
  for (int a = 1; a <= 3; ++a)
    for (int b = a; b <= 3; ++b) {
      const Expr xab = instantiate(instantiate(x, i, a), j, b);
      const Expr xba = instantiate(instantiate(x, i, b), j, a);
      const Expr sym = Expr::rational(1, 2) * (xab + xba);
      if (!vanishes(sym)) return sym;
    }
  return std::nullopt;
}

bool is_trace_factor(const Factor& f, FieldFamily family) {
  if (f.kind != AtomKind::Field || f.family != family || !f.indices[0].is_dummy()) return false;
  return std::any_of(f.derivs.begin(), f.derivs.end(), [&](const Variable& d) {
    return (d.kind == VarKind::Coordinate || d.kind == VarKind::SpatialVar) && d.index == f.indices[0];
  });
}

}  // namespace

std::string rule_name(Rule r) {
  for (const auto& [rule, name] : kRuleNames)
    if (rule == r) return name;
  return "unknown";
}

std::optional<Rule> rule_from_name(std::string_view name) {
  for (const auto& [rule, n] : kRuleNames)
    if (name == n) return rule;
  return std::nullopt;
}

Expr impose_divergence_free(const Expr& x, FieldFamily family) {
  std::vector<Term> kept;
  for (const auto& t : x.terms())
    if (std::none_of(t.factors.begin(), t.factors.end(), [&](const Factor& f) { return is_trace_factor(f, family); }))
      kept.push_back(t);
  return Expr::from_terms(std::move(kept));
}

Expr apply_rule(Rule rule, const std::vector<Expr>& inputs, const std::string& param) {
  switch (rule) {
    case Rule::Bracket: require_arity(inputs, 2, rule); return bracket(inputs[0], inputs[1]);
    case Rule::Jacobi: require_arity(inputs, 3, rule); return jacobi_residual(inputs[0], inputs[1], inputs[2]);
    case Rule::Sum: {
      Expr s;
      for (const auto& x : inputs) s += x;
      return s;
    }
    case Rule::Difference: require_arity(inputs, 2, rule); return inputs[0] - inputs[1];
    case Rule::Product: {
      Expr s(1L);
      for (const auto& x : inputs) s = s * x;
      return s;
    }
    case Rule::SwapIndices: require_arity(inputs, 1, rule); return swap_indices(inputs[0], param);
    case Rule::TimeDerivativeFree:
      require_arity(inputs, 1, rule);
      return total_time_derivative(inputs[0], TimeDerivativeMode::Free);
    case Rule::TimeDerivativeOnShell: {
      require_arity(inputs, 1, rule);
      const IndexedVector force = lorentz_force("%F");
      return total_time_derivative(inputs[0], TimeDerivativeMode::OnShell, &force);
    }
    case Rule::ImposeDivergenceFree: require_arity(inputs, 1, rule); return impose_divergence_free(inputs[0]);
    case Rule::Proportionality: {
      require_arity(inputs, 2, rule);
      auto k = proportionality(inputs[0], inputs[1]);
      if (!k) throw std::invalid_argument("inputs are not proportional");
      return *k;
    }
  }
  throw std::invalid_argument("unknown rule");
}

// --- report ---------------------------------------------------------------------

bool DerivationReport::pass() const {
  for (const auto& s : steps)
    if (!s.holds) return false;
  for (const auto& c : constraints)
    if (c.verdict && !*c.verdict) return false;
  return true;
}

const DerivationStep* DerivationReport::find(std::string_view name) const {
  for (const auto& s : steps)
    if (s.name == name) return &s;
  return nullptr;
}

const Constraint* DerivationReport::constraint(std::string_view name) const {
  for (const auto& c : constraints)
    if (c.name == name) return &c;
  return nullptr;
}

std::optional<Expr> DerivationReport::multiplier(std::string_view name) const {
  for (const auto& [n, k] : multipliers)
    if (n == name) return k;
  return std::nullopt;
}

void DerivationReport::append(const DerivationReport& other) {
  steps.insert(steps.end(), other.steps.begin(), other.steps.end());
  constraints.insert(constraints.end(), other.constraints.begin(), other.constraints.end());
  multipliers.insert(multipliers.end(), other.multipliers.begin(), other.multipliers.end());
}

bool reverify(const DerivationReport& report) {
  for (const auto& s : report.steps) {
    try {
      if (!(apply_rule(s.rule, s.inputs, s.param) == s.output)) return false;
    } catch (const std::exception&) {
      return false;
    }
    if (s.expected && equivalent(s.output, *s.expected) != s.holds) return false;
  }
  return true;
}

// --- derivations ------------------------------------------------------------------

DerivationReport derive_qF_antisymmetry(const IndexedVector& force) {
  Builder b;
  const Expr qi = p("q_i");
  const Expr fj = force.component(Index::free("j"));
  const Expr inv_m = Expr::mass().inverse();

  b.step("fundamental bracket", Rule::Bracket, "postulate m{q_i,v_j} = delta_ij", {qi, p("v_j")}, p("m^-1*delta(i,j)"));
  b.step("time derivative of fundamental bracket", Rule::TimeDerivativeFree, "d/dt of a constant bracket",
         {p("m^-1*delta(i,j)")}, Expr());
  const Expr x = b.step("qF bracket", Rule::Bracket, "Leibniz expansion of {q_i, F_j}", {qi, fj});
  b.step("velocity bracket from qF", Rule::Product,
         "d/dt {q_i,v_j} = 0 with dq_i/dt = v_i and dv_j/dt = F_j/m gives {v_i,v_j} = -{q_i,F_j}/m", {-inv_m, x});
  b.step("qF is a function of position and time", Rule::Bracket, "{q_k, {q_i,F_j}} = 0", {p("q_k"), x}, Expr());
  const Expr xt = b.step("qF transposed", Rule::SwapIndices, "exchange i and j", {x}, std::nullopt, "i,j");
  auto& anti = b.report.steps;
  b.step("qF antisymmetry", Rule::Sum, "{q_i,F_j} = -{q_j,F_i} from antisymmetry of {v_i,v_j}", {x, xt}, Expr());
  if (!anti.back().holds) anti.back().witness = symmetric_witness(x, "i", "j");

  const Expr bk = b.step("B from qF", Rule::Product, "B_k = -(m c/(2 e)) eps_kij {q_i,F_j}",
                         {p("-1/2*m*c*e^-1*eps(k,i,j)"), x});
  if (equivalent(force.component(Index::free("j")), lorentz_force("j").expr)) {
    b.step("dual form", Rule::Difference, "{q_i,F_j} = -(e/(m c)) eps_ijk B_k",
           {x, p("-e*m^-1*c^-1*eps(i,j,k)*B_k")}, Expr());
    b.step("dual form inverts", Rule::Difference, "recovered B_k equals the field in the force", {bk, p("B_k")}, Expr());
  }
  return b.report;
}

DerivationReport verify_E_bracket(const IndexedVector& force) {
  const Expr fj = force.component(Index::free("j"));
  for (int a = 1; a <= 3; ++a)
    for (int c = a; c <= 3; ++c) {
      const Expr d2 = partial(partial(fj, Variable::v(Index::concrete(a))), Variable::v(Index::concrete(c)));
      if (!vanishes(d2)) throw NonAffineForceError("force is not affine in the velocity", d2);
    }

  Builder b;
  const Expr qi = p("q_i");
  const Expr coeff = partial(fj, Variable::v(Index::free("a")));  // a_ja
  const Expr rest = fj - coeff * p("v_a");                        // b_j

  const Expr x = b.step("qF bracket for the Lorentz form", Rule::Bracket, "{q_i,F_j} by the bracket rules", {qi, fj},
                        p("-e*m^-1*c^-1*eps(i,j,k)*B_k"));
  const Expr qv = b.step("bracket of q with velocity", Rule::Bracket, "m{q_i,v_a} = delta_ia", {qi, p("v_a")},
                         p("m^-1*delta(i,a)"));
  const Expr middle = b.step("Leibniz middle term", Rule::Product, "coefficient of v_a times {q_i,v_a}",
                             {coeff, qv}, p("-e*m^-1*c^-1*eps(i,j,k)*B_k"));
  const Expr qa = b.step("bracket of q with velocity coefficient", Rule::Bracket,
                         "{q_i, f(q,t)} = 0: fields depend on position and time only", {qi, coeff}, Expr());
  const Expr last = b.step("Leibniz last term", Rule::Product, "v_a times {q_i, coefficient of v_a}", {p("v_a"), qa},
                           Expr());
  const Expr split = b.step("Leibniz split", Rule::Sum, "bilinearity and derivation property", {middle, last});
  const Expr qb = b.step("E bracket from expansion", Rule::Difference,
                         "{q_i, e E_j} = {q_i,F_j} - velocity-dependent terms", {x, split}, Expr());
  b.step("E bracket", Rule::Product, "{q_i, E_j} = 0", {Expr::charge().inverse(), qb}, Expr());
  b.step("E bracket direct", Rule::Bracket, "direct reduction of {q_i, F_j - a_ja v_a}", {qi, rest}, Expr());
  return b.report;
}

DerivationReport derive_divB() {
  Builder b;
  const Expr vv = b.step("velocity bracket", Rule::Bracket, "{v_j,v_k} = (e/(m^2 c)) eps_jkn B_n", {p("v_j"), p("v_k")},
                         p("e*m^-2*c^-1*eps(j,k,n)*B_n"));
  b.step("B from velocity bracket", Rule::Product, "B_l = (m^2 c/(2 e)) eps_ljk {v_j,v_k}",
         {p("1/2*m^2*c*e^-1*eps(l,j,k)"), vv}, p("B_l"));
  const Expr w = b.step("bracket of velocity with velocity bracket", Rule::Bracket, "{v_l, {v_j,v_k}}", {p("v_l"), vv});
  const Expr single = b.step("contracted Jacobi term", Rule::Product, "eps_ljk {v_l,{v_j,v_k}}", {p("eps(l,j,k)"), w});
  const Expr jac = b.step("velocity Jacobi residual", Rule::Jacobi, "Jacobi identity on v_l, v_j, v_k",
                          {p("v_l"), p("v_j"), p("v_k")});
  const Expr full = b.step("contracted velocity Jacobi", Rule::Product, "eps_ljk times the Jacobi residual",
                           {p("eps(l,j,k)"), jac});
  const Expr div = p("diff(B_l,q_l)");
  const Expr k_single =
      b.step("single term multiplier", Rule::Proportionality, "eps_ljk {v_l,{v_j,v_k}} as a multiple of div B",
             {single, div});
  const Expr k = b.step("divergence multiplier", Rule::Proportionality, "contracted Jacobi residual as a multiple of div B",
                        {full, div});
  b.step("Jacobi on velocity components", Rule::Jacobi, "Jacobi identity on v_1, v_2, v_3", {p("v1"), p("v2"), p("v3")},
         Expr::rational(1, 6) * k * div);
  const Expr constraint = b.step("divergence constraint", Rule::Product, "Jacobi identity forces div B = 0",
                                 {k.inverse(), full}, div);
  b.report.multipliers.emplace_back("single contracted Jacobi term", k_single);
  b.report.multipliers.emplace_back("contracted velocity Jacobi", k);
  b.report.constraints.push_back({"div B", constraint, std::nullopt, {}});
  return b.report;
}

DerivationReport derive_faraday(bool use_divB) {
  Builder b;
  const Expr fi_m = Expr::mass().inverse() * lorentz_force("i").expr;
  const Expr fj_m = Expr::mass().inverse() * lorentz_force("j").expr;
  const Expr eps = p("eps(s,i,j)");

  const Expr vv = b.step("velocity bracket for B_s", Rule::Bracket, "{v_i,v_j} = (e/(m^2 c)) eps_ijk B_k", {p("v_i"), p("v_j")},
                         p("e*m^-2*c^-1*eps(i,j,k)*B_k"));
  b.step("B_s from velocity bracket", Rule::Product, "B_s = (m^2 c/(2 e)) eps_sij {v_i,v_j}",
         {p("1/2*m^2*c*e^-1*eps(s,i,j)"), vv}, p("B_s"));
  const Expr lhs = b.step("time derivative of B along the motion", Rule::TimeDerivativeOnShell, "dB_s/dt",
                          {p("B_s")}, p("diff(B_s,t) + v_k*diff(B_s,q_k)"));
  const Expr left = b.step("bracket of acceleration with velocity", Rule::Bracket, "{dv_i/dt, v_j}", {fi_m, p("v_j")});
  const Expr right = b.step("bracket of velocity with acceleration", Rule::Bracket, "{v_i, dv_j/dt}", {p("v_i"), fj_m});
  const Expr cl = b.step("contracted left term", Rule::Product, "eps_sij {dv_i/dt, v_j}", {eps, left});
  const Expr cr = b.step("contracted right term", Rule::Product, "eps_sij {v_i, dv_j/dt}", {eps, right});
  b.step("both terms agree", Rule::Difference, "antisymmetry of eps_sij and of the bracket", {cl, cr}, Expr());
  const Expr rhs = b.step("differentiated velocity bracket", Rule::Product,
                          "d/dt of B_s = (m^2 c/(2 e)) eps_sij {v_i,v_j}", {p("m^2*c*e^-1"), cl});

  b.step("electric term", Rule::Bracket, "{E_i, v_j} = (1/m) dE_i/dq_j", {p("E_i"), p("v_j")}, p("m^-1*diff(E_i,q_j)"));
  b.step("magnetic gradient term", Rule::Bracket, "{B_b, v_j} = (1/m) dB_b/dq_j", {p("B_b"), p("v_j")},
         p("m^-1*diff(B_b,q_j)"));
  b.step("zero by symmetry", Rule::Product, "symmetric B_n B_b contracted with eps_sij eps_iab eps_ajn",
         {eps, p("eps(i,a,b)*B_b"), p("eps(a,j,n)*B_n")}, Expr());
  b.step("divergence bracket", Rule::Bracket, "{v_l, B_l} = -(1/m) div B", {p("v_l"), p("B_l")},
         p("-m^-1*diff(B_l,q_l)"));

  const Expr raw = b.step("raw constraint", Rule::Difference, "left minus right side of the differentiated relation",
                          {lhs, rhs});
  const Expr core = p("diff(B_s,t) + c*eps(s,j,k)*diff(E_k,q_j)");
  const Expr extra = b.step("velocity remainder", Rule::Difference, "raw constraint minus dB_s/dt + c (curl E)_s",
                            {raw, core});
  const Expr kappa = b.step("remainder multiplier", Rule::Proportionality, "remainder as a multiple of v_s div B",
                            {extra, p("v_s*diff(B_l,q_l)")});
  b.report.multipliers.emplace_back("faraday div B", kappa);

  if (!use_divB) {
    b.report.constraints.push_back({"faraday", raw, std::nullopt, {}});
    return b.report;
  }
  const Expr reduced = b.step("impose div B = 0", Rule::ImposeDivergenceFree, "drop terms proportional to div B", {raw},
                              core);
  const Expr out = b.step("faraday constraint", Rule::Product, "divide by c", {Expr::light_speed().inverse(), reduced},
                          p("c^-1*diff(B_s,t) + eps(s,j,k)*diff(E_k,q_j)"));
  b.report.constraints.push_back({"faraday", out, std::nullopt, {}});
  return b.report;
}

void bind_constraints(DerivationReport& report, const std::optional<VectorField>& e_field,
                      const std::optional<VectorField>& b_field) {
  FieldBindings bindings;
  if (e_field) bindings[FieldFamily::E] = *e_field;
  if (b_field) bindings[FieldFamily::B] = *b_field;
  for (auto& c : report.constraints) {
    const bool needs_bound = contains(c.expr, [&](const Factor& f) {
      return (f.kind == AtomKind::Field || f.kind == AtomKind::ScalarField) && !bindings.count(f.family);
    });
    c.verdict.reset();
    c.residual.clear();
    if (needs_bound) continue;
    const auto names = free_index_names(c.expr);
    std::vector<Expr> components{c.expr};
    for (const auto& name : names) {
      std::vector<Expr> next;
      for (const auto& x : components)
        for (int v = 1; v <= 3; ++v) next.push_back(instantiate(x, name, v));
      components = std::move(next);
    }
    bool ok = true;
    for (const auto& x : components) {
      c.residual.push_back(substitute_fields(x, bindings));
      ok = ok && c.residual.back().is_zero();
    }
    c.verdict = ok;
  }
}

DerivationReport run_chain(const std::optional<VectorField>& e_field, const std::optional<VectorField>& b_field) {
  DerivationReport report = derive_qF_antisymmetry(lorentz_force("j"));
  report.append(verify_E_bracket(lorentz_force("j")));
  report.append(derive_divB());
  report.append(derive_faraday(true));
  bind_constraints(report, e_field, b_field);
  return report;
}

}  // namespace pbem
