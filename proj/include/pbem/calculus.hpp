#ifndef PBEM_CALCULUS_HPP
#define PBEM_CALCULUS_HPP

#include <map>
#include <optional>
#include <variant>

#include "pbem/expr.hpp"

namespace pbem {

/// A vector quantity written with one free index, e.g. F_j = e*E_j + ...
struct IndexedVector {
  Expr expr;
  std::string index;

  /// Component for the given index (concrete, free name or dummy-linking name).
  Expr component(const Index& i) const { return rename_index(expr, index, i); }
  Expr component(int i) const { return component(Index::concrete(i)); }

  /// delta(index,1)*F1 + delta(index,2)*F2 + delta(index,3)*F3
  static IndexedVector from_components(const VectorField& f, const std::string& index);
  VectorField components() const;
};

/// The Lorentz force e*E_j + (e/c)*eps(j,a,b)*v_a*B_b with abstract fields.
IndexedVector lorentz_force(const std::string& index = "j");
/// Same force with concrete phase-space field components substituted (E, B in q, t).
VectorField lorentz_force(const VectorField& e_field, const VectorField& b_field);

Expr partial(const Expr& x, const Variable& var);

/// Raised when a force is not affine in the velocity; carries a nonzero second v-derivative.
class NonAffineForceError : public std::invalid_argument {
 public:
  NonAffineForceError(const std::string& what, Expr witness)
      : std::invalid_argument(what), witness_(std::move(witness)) {}
  const Expr& witness() const { return witness_; }

 private:
  Expr witness_;
};

enum class TimeDerivativeMode { Free, OnShell };

class MissingForceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// d/dt = d_t + v_k d_{q_k} + a_k d_{v_k}; on shell a_k is replaced by F_k/m.
Expr total_time_derivative(const Expr& x, TimeDerivativeMode mode,
                           const IndexedVector* force = nullptr);

using FieldBinding = std::variant<VectorField, Expr>;
using FieldBindings = std::map<FieldFamily, FieldBinding>;

class UnboundFieldError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Replaces field atoms (and their partials) by explicit field-space
/// polynomials. Coordinates q_i become x_i; the result lives in field space.
Expr substitute_fields(const Expr& x, const FieldBindings& bindings);

/// q, x, v, a, E, A flip sign; B, A0, U, f, t do not. Spatial derivatives flip sign.
Expr parity_transform(const Expr& x);
bool is_parity_even(const Expr& x);

/// Field-space differential operators on polynomial vector fields.
VectorField gradient(const Expr& f);
Expr divergence(const VectorField& f);
VectorField curl(const VectorField& f);
VectorField time_derivative(const VectorField& f);

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a);
VectorField operator*(const Expr& k, const VectorField& a);
VectorField cross(const VectorField& a, const VectorField& b);
Expr dot(const VectorField& a, const VectorField& b);
bool is_zero(const VectorField& a);
VectorField map(const VectorField& a, const std::function<Expr(const Expr&)>& fn);

}  // namespace pbem

#endif  // PBEM_CALCULUS_HPP
