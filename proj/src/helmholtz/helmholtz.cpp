#include "pbem/helmholtz.hpp"

#include <map>

#include "pbem/bracket.hpp"
#include "pbem/parser.hpp"

namespace pbem {

namespace {

Expr dq(const Expr& x, int i) { return partial(x, Variable::q(Index::concrete(i))); }
Expr dv(const Expr& x, int i) { return partial(x, Variable::v(Index::concrete(i))); }
Expr dt(const Expr& x) { return partial(x, Variable::time()); }
Expr ddt(const Expr& x) { return total_time_derivative(x, TimeDerivativeMode::Free); }
std::size_t u(int i) { return static_cast<std::size_t>(i - 1); }

void record(ConditionResult& c, std::vector<int> label, const Expr& value) {
  if (!vanishes(value)) c.residuals.push_back({std::move(label), value});
}

/// Splits a field-space polynomial into parts homogeneous in x, keyed by degree.
std::map<int, Expr> by_x_degree(const Expr& x) {
  std::map<int, std::vector<Term>> parts;
  for (const auto& t : x.terms()) {
    int degree = 0;
    for (const auto& f : t.factors) {
      if (f.kind == AtomKind::SpatialVar) ++degree;
      if (f.kind == AtomKind::Field || f.kind == AtomKind::ScalarField || f.kind == AtomKind::Coordinate ||
          f.kind == AtomKind::Velocity || f.kind == AtomKind::Acceleration)
        throw std::invalid_argument("potential construction needs explicit polynomials in x and t");
    }
    parts[degree].push_back(t);
  }
  std::map<int, Expr> out;
  for (auto& [d, terms] : parts) out[d] = Expr::from_terms(std::move(terms));
  return out;
}

Expr xv(int i) { return Expr::x(Index::concrete(i)); }

Expr p(const std::string& text) { return parse(text, Context::PhaseSpace); }

}  // namespace

// --- force laws ---------------------------------------------------------------------

VectorField ForceLaw::total() const {
  if (!potential) return components;
  VectorField out = components;
  for (int i = 1; i <= 3; ++i) out[u(i)] -= dq(*potential, i);
  return out;
}

ForceLaw ForceLaw::lorentz(const VectorField& e_field, const VectorField& b_field) {
  return {lorentz_force(e_field, b_field), std::nullopt};
}

const Residual* ConditionResult::at(const std::vector<int>& label) const {
  for (const auto& r : residuals)
    if (r.label == label) return &r;
  return nullptr;
}

VectorField AffineDecomposition::reconstruct() const {
  VectorField out = b;
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) out[u(i)] += a[u(i)][u(j)] * Expr::v(Index::concrete(j));
  return out;
}

ConditionResult check_linearity(const ForceLaw& f) {
  ConditionResult c{"linearity", {}};
  const VectorField force = f.total();
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j)
      for (int k = j; k <= 3; ++k) record(c, {i, j, k}, dv(dv(force[u(i)], j), k));
  return c;
}

AffineDecomposition decompose(const ForceLaw& f) {
  const ConditionResult lin = check_linearity(f);
  if (!lin.pass()) throw NonAffineForceError("force is not affine in the velocity", lin.residuals.front().value);
  const VectorField force = f.total();
  AffineDecomposition d;
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) d.a[u(i)][u(j)] = dv(force[u(i)], j);
  for (int i = 1; i <= 3; ++i) {
    Expr bi = force[u(i)];
    for (int j = 1; j <= 3; ++j) bi -= d.a[u(i)][u(j)] * Expr::v(Index::concrete(j));
    d.b[u(i)] = bi;
  }
  return d;
}

bool HelmholtzReport::pass() const {
  for (const auto* c : conditions())
    if (!c->pass()) return false;
  return true;
}

std::vector<const ConditionResult*> HelmholtzReport::conditions() const {
  std::vector<const ConditionResult*> out{&linearity, &condition1, &condition2};
  for (const auto* c : {&antisymmetry, &cyclic, &curl_b})
    if (*c) out.push_back(&**c);
  return out;
}

HelmholtzReport helmholtz_check(const ForceLaw& f) {
  HelmholtzReport r;
  r.hessian = Expr::mass() * Expr::delta(Index::free("i"), Index::free("j"));
  r.linearity = check_linearity(f);
  const VectorField force = f.total();

  r.condition1.name = "condition 1";
  r.condition2.name = "condition 2";
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      if (i <= j) record(r.condition1, {i, j}, dv(force[u(i)], j) + dv(force[u(j)], i));
      record(r.condition2, {i, j}, dq(force[u(i)], j) - dq(force[u(j)], i) + ddt(dv(force[u(j)], i)));
    }

  if (!r.linearity.pass()) return r;
  const AffineDecomposition d = decompose(f);
  const auto& a = d.a;
  ConditionResult anti{"antisymmetry of a", {}};
  ConditionResult cyc{"cyclic", {}};
  ConditionResult curl{"curl b", {}};
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      if (i <= j) record(anti, {i, j}, a[u(i)][u(j)] + a[u(j)][u(i)]);
      record(curl, {i, j}, dq(d.b[u(i)], j) - dq(d.b[u(j)], i) - dt(a[u(i)][u(j)]));
      for (int s = 1; s <= 3; ++s)
        record(cyc, {i, j, s}, dq(a[u(i)][u(s)], j) + dq(a[u(s)][u(j)], i) + dq(a[u(j)][u(i)], s));
    }
  r.decomposition = d;
  r.antisymmetry = std::move(anti);
  r.cyclic = std::move(cyc);
  r.curl_b = std::move(curl);
  return r;
}

IdentifiedFields identify_fields(const AffineDecomposition& d, Orientation orientation) {
  for (int i = 1; i <= 3; ++i)
    for (int j = i; j <= 3; ++j) {
      const Expr sym = Expr::rational(1, 2) * (d.a[u(i)][u(j)] + d.a[u(j)][u(i)]);
      if (!vanishes(sym)) throw SymmetricPartError("symmetric part of a is nonzero", {{i, j}, sym});
    }
  const Expr sign(orientation == Orientation::Literal ? 1L : -1L);
  const Expr k = sign * Expr::constant(Rational(1, 2), {-1, 0, 1});
  const Expr inv_e = Expr::charge().inverse();
  IdentifiedFields out;
  out.orientation = orientation;
  for (int n = 1; n <= 3; ++n) {
    Expr bn;
    for (int i = 1; i <= 3; ++i)
      for (int j = 1; j <= 3; ++j)
        bn += Expr::epsilon(Index::concrete(n), Index::concrete(i), Index::concrete(j)) * d.a[u(i)][u(j)];
    out.B[u(n)] = to_field_space(k * bn);
    out.E[u(n)] = to_field_space(inv_e * d.b[u(n)]);
  }
  return out;
}

// --- potentials -------------------------------------------------------------------

VectorField poincare_vector_potential(const VectorField& b_field) {
  const VectorField b = map(b_field, to_field_space);
  const Expr div = divergence(b);
  if (!div.is_zero()) throw NoPotentialError("div B is not zero", {div});
  VectorField a;
  for (int j = 1; j <= 3; ++j)
    for (const auto& [degree, part] : by_x_degree(b[u(j)])) {
      const Expr scale = Expr::rational(1, degree + 2);
      for (int i = 1; i <= 3; ++i)
        for (int k = 1; k <= 3; ++k) {
          const Expr eps = Expr::epsilon(Index::concrete(i), Index::concrete(j), Index::concrete(k));
          if (!eps.is_zero()) a[u(i)] += scale * eps * part * xv(k);
        }
    }
  return a;
}

Expr scalar_potential(const VectorField& e_field, const VectorField& a_field) {
  const VectorField a = map(a_field, to_field_space);
  const VectorField g = map(e_field, to_field_space) + Expr::light_speed().inverse() * time_derivative(a);
  const VectorField rot = curl(g);
  if (!is_zero(rot)) throw NoPotentialError("curl of E + (1/c) dA/dt is not zero", {rot[0], rot[1], rot[2]});
  Expr a0;
  for (int i = 1; i <= 3; ++i)
    for (const auto& [degree, part] : by_x_degree(g[u(i)])) a0 -= Expr::rational(1, degree + 1) * part * xv(i);
  return a0;
}

// --- Lagrangian -------------------------------------------------------------------

Expr lagrangian_from_potentials(const Potentials& pot, const std::optional<Expr>& U) {
  Expr l;
  const Expr e_over_c = Expr::constant(1, {1, 0, -1});
  for (int i = 1; i <= 3; ++i) {
    const Expr vi = Expr::v(Index::concrete(i));
    l += Expr::rational(1, 2) * Expr::mass() * vi * vi;
    l += e_over_c * vi * to_phase_space(pot.A[u(i)]);
  }
  l -= Expr::charge() * to_phase_space(pot.A0);
  if (U) l -= to_phase_space(*U);
  return l;
}

bool hessian_is_m_delta(const Expr& L) {
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      const Expr expected = i == j ? Expr::mass() : Expr();
      if (!(dv(dv(L, i), j) == expected)) return false;
    }
  return true;
}

LagrangianExpr reconstruct_lagrangian(const ForceLaw& f) {
  const HelmholtzReport report = helmholtz_check(f);
  if (!report.pass()) {
    std::string failing;
    for (const auto* c : report.conditions())
      if (!c->pass()) failing += (failing.empty() ? "" : ", ") + c->name;
    throw NotVariationalError("Helmholtz conditions fail: " + failing);
  }
  LagrangianExpr out;
  out.fields = identify_fields(decompose(ForceLaw{f.components, std::nullopt}));
  out.potentials.A = poincare_vector_potential(out.fields.B);
  out.potentials.A0 = scalar_potential(out.fields.E, out.potentials.A);
  out.U = f.potential;
  out.L = lagrangian_from_potentials(out.potentials, f.potential);
  out.hessian_ok = hessian_is_m_delta(out.L);
  out.provenance = "A by the homotopy formula about the origin; A0 from E + (1/c) dA/dt";
  if (f.potential) out.provenance += "; U subtracted";
  return out;
}

VectorField euler_lagrange_roundtrip(const Expr& L, const ForceLaw& f) {
  const VectorField force = f.total();
  VectorField out;
  for (int i = 1; i <= 3; ++i) {
    const Expr el = ddt(dv(L, i)) - dq(L, i);
    out[u(i)] = Expr::mass() * Expr::accel(Index::concrete(i)) - force[u(i)] - el;
  }
  return out;
}

// --- duality -------------------------------------------------------------------------

std::pair<VectorField, VectorField> duality_transform(const VectorField& e_field, const VectorField& b_field) {
  return {b_field, -e_field};
}

Expr duality_transform(const Expr& x) {
  return map_factors(x, [](const Factor& f) -> Expr {
    if (f.kind != AtomKind::Field || (f.family != FieldFamily::E && f.family != FieldFamily::B))
      return Expr::from_factor(f);
    Factor g = f;
    g.family = f.family == FieldFamily::E ? FieldFamily::B : FieldFamily::E;
    return f.family == FieldFamily::E ? Expr::from_factor(g) : -Expr::from_factor(g);
  });
}

Expr normalize_constraint(const Expr& x) {
  if (x.is_zero()) return x;
  const Term& lead = x.terms().front();
  return Expr::constant(Rational(1) / lead.coeff, -lead.consts) * x;
}

namespace {

DualityCheck make_check(std::string name, Expr source, Expr transformed, Expr target) {
  DualityCheck c{std::move(name), std::move(source), std::move(transformed), std::move(target), std::nullopt};
  if (!c.transformed.is_zero()) c.factor = proportionality(c.transformed, c.target);
  return c;
}

}  // namespace

std::vector<DualityCheck> duality_constraint_checks() {
  const Expr gauss = p("diff(E_l,q_l)");
  const Expr ampere = p("eps(s,j,k)*diff(B_k,q_j) - c^-1*diff(E_s,t)");
  const Expr div_b = derive_divB().constraints.front().expr;
  const Expr faraday = derive_faraday(true).constraints.front().expr;
  return {make_check("div B to Gauss", div_b, duality_transform(div_b), gauss),
          make_check("Faraday to Ampere-Maxwell", faraday, duality_transform(faraday), ampere)};
}

std::vector<DualityCheck> opposite_selection_checks() {
  // a_ij = -(e/c) eps_ijk E_k, b_i = e B_i
  auto a = [](const std::string& i, const std::string& j) {
    return Expr::constant(-1, {1, 0, -1}) * Expr::epsilon(Index::free(i), Index::free(j), Index::free("%k")) *
           Expr::field(FieldFamily::E, Index::free("%k"));
  };
  auto b = [](const std::string& i) { return Expr::charge() * Expr::field(FieldFamily::B, Index::free(i)); };
  auto d = [](const Expr& x, const std::string& i) { return partial(x, Variable::q(Index::free(i))); };

  const Expr cyclic = d(a("i", "s"), "j") + d(a("s", "j"), "i") + d(a("j", "i"), "s");
  const Expr curl_b = d(b("i"), "j") - d(b("j"), "i") - partial(a("i", "j"), Variable::time());
  const Expr cyc_contracted = Expr::epsilon(Index::free("i"), Index::free("j"), Index::free("s")) * cyclic;
  const Expr curl_contracted = Expr::epsilon(Index::free("s"), Index::free("i"), Index::free("j")) * curl_b;
  return {make_check("dual cyclic condition", cyclic, cyc_contracted, p("diff(E_l,q_l)")),
          make_check("dual curl b condition", curl_b, curl_contracted,
                     p("eps(s,j,k)*diff(B_k,q_j) - c^-1*diff(E_s,t)"))};
}

// --- parity -------------------------------------------------------------------------

ParityVerdict parity_audit(const FieldLagrangianSpec& spec) {
  ParityVerdict v;
  const Expr e = p("E_k");
  const Expr b = p("B_k");
  const Expr e2 = p("E_n");
  const Expr b2 = p("B_n");
  v.integrand = Expr(spec.alpha) * e * e2 * Expr::delta(Index::free("k"), Index::free("n")) +
                Expr(spec.beta) * b * b2 * Expr::delta(Index::free("k"), Index::free("n")) +
                Expr(spec.gamma) * e * b;
  v.transformed = parity_transform(v.integrand);
  v.odd_part = Expr::rational(1, 2) * (v.integrand - v.transformed);
  v.pass = vanishes(v.odd_part);
  v.canonical = FieldLagrangianSpec{};
  v.note = "beta is used as given; the Maxwell density (E.E - B.B)/2 corresponds to beta = -1/2";
  return v;
}

}  // namespace pbem
