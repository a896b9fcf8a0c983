#include "pbem/calculus.hpp"

namespace pbem {

namespace {

Factor with_derivative(Factor f, Variable var) {
  f.derivs.push_back(std::move(var));
  return f;
}

Expr factor_partial(const Factor& f, const Variable& var) {
  const bool is_field = f.kind == AtomKind::Field || f.kind == AtomKind::ScalarField;
  switch (var.kind) {
    case VarKind::Time:
      if (f.kind == AtomKind::Time) return Expr(1L);
      if (is_field) return Expr::from_factor(with_derivative(f, var));
      return {};
    case VarKind::Coordinate:
      if (f.kind == AtomKind::Coordinate) return Expr::delta(var.index, f.indices[0]);
      if (is_field) return Expr::from_factor(with_derivative(f, var));
      return {};
    case VarKind::SpatialVar:
      if (f.kind == AtomKind::SpatialVar) return Expr::delta(var.index, f.indices[0]);
      if (is_field) return Expr::from_factor(with_derivative(f, var));
      return {};
    case VarKind::Velocity:
      if (f.kind == AtomKind::Velocity) return Expr::delta(var.index, f.indices[0]);
      return {};
    case VarKind::Acceleration:
      if (f.kind == AtomKind::Acceleration) return Expr::delta(var.index, f.indices[0]);
      return {};
  }
  return {};
}

Factor open_factor(Factor f) {
  auto open = [](Index& i) {
    if (i.is_dummy()) i = Index::free("%d" + std::to_string(i.value));
  };
  for (auto& i : f.indices) open(i);
  for (auto& d : f.derivs)
    if (d.kind != VarKind::Time) open(d.index);
  return f;
}

}  // namespace

Expr partial(const Expr& x, const Variable& var) {
  if (var.index.is_dummy()) throw IndexError("differentiation variable cannot carry a dummy index");
  Expr sum;
  for (const auto& t : x.terms()) {
    std::vector<Factor> fs;
    fs.reserve(t.factors.size());
    for (const auto& f : t.factors) fs.push_back(open_factor(f));
    for (std::size_t k = 0; k < fs.size(); ++k) {
      Expr d = factor_partial(fs[k], var);
      if (d.is_zero()) continue;
      Expr prod = Expr::constant(t.coeff, t.consts) * d;
      for (std::size_t l = 0; l < fs.size(); ++l)
        if (l != k) prod = prod * Expr::from_factor(fs[l]);
      sum += prod;
    }
  }
  return sum;
}

Expr total_time_derivative(const Expr& x, TimeDerivativeMode mode, const IndexedVector* force) {
  if (mode == TimeDerivativeMode::OnShell && force == nullptr)
    throw MissingForceError("on-shell time derivative needs a force law");
  const Index k = Index::free("%tk");
  const Index n = Index::free("%tn");
  Expr out = partial(x, Variable::time());
  out += Expr::v(k) * partial(x, Variable::q(k));
  const Expr dv = partial(x, Variable::v(n));
  if (dv.is_zero()) return out;
  if (mode == TimeDerivativeMode::Free)
    out += Expr::accel(n) * dv;
  else
    out += force->component(n) * Expr::mass().inverse() * dv;
  return out;
}

Expr substitute_fields(const Expr& x, const FieldBindings& bindings) {
  const Expr comp = to_components(x);
  auto apply_derivs = [](Expr base, const std::vector<Variable>& derivs) {
    for (const auto& d : derivs) {
      if (d.kind == VarKind::Time)
        base = partial(base, Variable::time());
      else
        base = partial(base, Variable::x(d.index));
    }
    return base;
  };
  return map_factors(comp, [&](const Factor& f) -> Expr {
    switch (f.kind) {
      case AtomKind::Coordinate: return Expr::x(f.indices[0]);
      case AtomKind::Field: {
        auto it = bindings.find(f.family);
        if (it == bindings.end()) throw UnboundFieldError("field family " + family_name(f.family) + " is not bound");
        const auto* vf = std::get_if<VectorField>(&it->second);
        if (vf == nullptr) throw UnboundFieldError("field family " + family_name(f.family) + " needs a vector binding");
        const Expr base = to_field_space((*vf)[static_cast<std::size_t>(f.indices[0].value - 1)]);
        return apply_derivs(base, f.derivs);
      }
      case AtomKind::ScalarField: {
        auto it = bindings.find(f.family);
        if (it == bindings.end()) throw UnboundFieldError("field family " + family_name(f.family) + " is not bound");
        const auto* s = std::get_if<Expr>(&it->second);
        if (s == nullptr) throw UnboundFieldError("field family " + family_name(f.family) + " needs a scalar binding");
        return apply_derivs(to_field_space(*s), f.derivs);
      }
      default: return Expr::from_factor(f);
    }
  });
}

Expr parity_transform(const Expr& x) {
  return map_factors(x, [](const Factor& f) -> Expr {
    int sign = 1;
    switch (f.kind) {
      case AtomKind::Coordinate:
      case AtomKind::SpatialVar:
      case AtomKind::Velocity:
      case AtomKind::Acceleration: sign = -1; break;
      case AtomKind::Field:
        if (f.family != FieldFamily::B) sign = -1;
        break;
      default: break;
    }
    for (const auto& d : f.derivs)
      if (d.kind == VarKind::Coordinate || d.kind == VarKind::SpatialVar) sign = -sign;
    return Expr(static_cast<long>(sign)) * Expr::from_factor(f);
  });
}

bool is_parity_even(const Expr& x) { return vanishes(parity_transform(x) - x); }

// --- indexed vectors -----------------------------------------------------------

IndexedVector IndexedVector::from_components(const VectorField& f, const std::string& index) {
  Expr sum;
  for (int n = 1; n <= 3; ++n)
    sum += Expr::delta(Index::free(index), Index::concrete(n)) * f[static_cast<std::size_t>(n - 1)];
  return {sum, index};
}

VectorField IndexedVector::components() const { return {component(1), component(2), component(3)}; }

IndexedVector lorentz_force(const std::string& index) {
  const Index j = Index::free(index);
  const Index a = Index::free("%la");
  const Index b = Index::free("%lb");
  const Expr e = Expr::charge();
  const Expr c_inv = Expr::light_speed().inverse();
  Expr f = e * Expr::field(FieldFamily::E, j) +
           e * c_inv * Expr::epsilon(j, a, b) * Expr::v(a) * Expr::field(FieldFamily::B, b);
  return {f, index};
}

VectorField lorentz_force(const VectorField& e_field, const VectorField& b_field) {
  const Expr e = Expr::charge();
  const Expr c_inv = Expr::light_speed().inverse();
  const VectorField vel{Expr::v(Index::concrete(1)), Expr::v(Index::concrete(2)), Expr::v(Index::concrete(3))};
  const VectorField vxb = cross(vel, map(b_field, to_phase_space));
  VectorField out;
  for (std::size_t i = 0; i < 3; ++i) out[i] = e * to_phase_space(e_field[i]) + e * c_inv * vxb[i];
  return out;
}

// --- vector calculus -------------------------------------------------------------

namespace {
Expr dx(const Expr& f, int i) { return partial(f, Variable::x(Index::concrete(i))); }
}  // namespace

VectorField gradient(const Expr& f) { return {dx(f, 1), dx(f, 2), dx(f, 3)}; }

Expr divergence(const VectorField& f) { return dx(f[0], 1) + dx(f[1], 2) + dx(f[2], 3); }

VectorField curl(const VectorField& f) {
  return {dx(f[2], 2) - dx(f[1], 3), dx(f[0], 3) - dx(f[2], 1), dx(f[1], 1) - dx(f[0], 2)};
}

VectorField time_derivative(const VectorField& f) {
  return map(f, [](const Expr& x) { return partial(x, Variable::time()); });
}

VectorField map(const VectorField& a, const std::function<Expr(const Expr&)>& fn) {
  return {fn(a[0]), fn(a[1]), fn(a[2])};
}

VectorField operator+(const VectorField& a, const VectorField& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
VectorField operator-(const VectorField& a, const VectorField& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
VectorField operator-(const VectorField& a) { return {-a[0], -a[1], -a[2]}; }
VectorField operator*(const Expr& k, const VectorField& a) { return {k * a[0], k * a[1], k * a[2]}; }

VectorField cross(const VectorField& a, const VectorField& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Expr dot(const VectorField& a, const VectorField& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

bool is_zero(const VectorField& a) { return a[0].is_zero() && a[1].is_zero() && a[2].is_zero(); }

}  // namespace pbem
