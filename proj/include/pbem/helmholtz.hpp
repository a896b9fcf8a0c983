#ifndef PBEM_HELMHOLTZ_HPP
#define PBEM_HELMHOLTZ_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pbem/calculus.hpp"
#include "pbem/expr.hpp"

namespace pbem {

/// Force F_i(t, q, v) = components_i - dU/dq_i.
struct ForceLaw {
  VectorField components;
  std::optional<Expr> potential;  // U(q, t)

  VectorField total() const;
  static ForceLaw lorentz(const VectorField& e_field, const VectorField& b_field);
};

/// A residual tagged with the index tuple it belongs to (1-based).
struct Residual {
  std::vector<int> label;
  Expr value;
};

struct ConditionResult {
  std::string name;
  /// Nonzero residuals only; the condition holds iff this is empty.
  std::vector<Residual> residuals;

  bool pass() const { return residuals.empty(); }
  const Residual* at(const std::vector<int>& label) const;
};

/// F_i = a_ij v_j + b_i with a, b functions of (q, t).
struct AffineDecomposition {
  std::array<std::array<Expr, 3>, 3> a;
  VectorField b;

  VectorField reconstruct() const;
};

struct HelmholtzReport {
  ConditionResult linearity;   // d2F_i / dv_j dv_k
  ConditionResult condition1;  // dF_i/dv_j + dF_j/dv_i
  ConditionResult condition2;  // dF_i/dq_j - dF_j/dq_i + d/dt dF_j/dv_i
  /// Present when the force is affine in v.
  std::optional<AffineDecomposition> decomposition;
  std::optional<ConditionResult> antisymmetry;  // a_ij + a_ji
  std::optional<ConditionResult> cyclic;        // d_j a_is + d_i a_sj + d_s a_ji
  std::optional<ConditionResult> curl_b;        // d_j b_i - d_i b_j - d_t a_ij
  /// Hessian the reconstructed Lagrangian must have.
  Expr hessian;

  bool pass() const;
  std::vector<const ConditionResult*> conditions() const;
};

ConditionResult check_linearity(const ForceLaw& f);
HelmholtzReport helmholtz_check(const ForceLaw& f);

/// Throws NonAffineForceError with the offending second derivative.
AffineDecomposition decompose(const ForceLaw& f);

class SymmetricPartError : public std::invalid_argument {
 public:
  SymmetricPartError(const std::string& what, Residual witness)
      : std::invalid_argument(what), witness_(std::move(witness)) {}
  const Residual& witness() const { return witness_; }

 private:
  Residual witness_;
};

/// Literal: a_ij = (e/c) eps_ijk B_k as read off F = eE + (e/c) v x B.
/// ReversedVelocity: a_ij = -(e/c) eps_ijk B_k, the convention obtained after v -> -v.
enum class Orientation { Literal, ReversedVelocity };

struct IdentifiedFields {
  VectorField E;  // field space
  VectorField B;  // field space
  Orientation orientation = Orientation::Literal;
};

IdentifiedFields identify_fields(const AffineDecomposition& d, Orientation orientation = Orientation::Literal);

class NoPotentialError : public std::invalid_argument {
 public:
  NoPotentialError(const std::string& what, std::vector<Expr> residual)
      : std::invalid_argument(what), residual_(std::move(residual)) {}
  const std::vector<Expr>& residual() const { return residual_; }

 private:
  std::vector<Expr> residual_;
};

class NotVariationalError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A(x,t) = int_0^1 s B(sx,t) x x ds. Requires div B = 0.
VectorField poincare_vector_potential(const VectorField& b_field);
/// A0(x,t) = -int_0^1 G(sx,t) . x ds with G = E + (1/c) dA/dt. Requires curl G = 0.
Expr scalar_potential(const VectorField& e_field, const VectorField& a_field);

struct Potentials {
  VectorField A;
  Expr A0;
};

struct LagrangianExpr {
  Expr L;
  IdentifiedFields fields;
  Potentials potentials;
  std::optional<Expr> U;
  std::string provenance;
  bool hessian_ok = false;
};

Expr lagrangian_from_potentials(const Potentials& p, const std::optional<Expr>& U = std::nullopt);
/// Throws NotVariationalError when the Helmholtz conditions fail.
LagrangianExpr reconstruct_lagrangian(const ForceLaw& f);
bool hessian_is_m_delta(const Expr& L);

/// (m a_i - F_i) - (d/dt dL/dv_i - dL/dq_i), free-mode total derivative.
VectorField euler_lagrange_roundtrip(const Expr& L, const ForceLaw& f);

// --- duality and parity -------------------------------------------------------------

std::pair<VectorField, VectorField> duality_transform(const VectorField& e_field, const VectorField& b_field);
/// Applies E -> B, B -> -E to the field atoms of a symbolic expression.
Expr duality_transform(const Expr& x);
/// Scales a constraint so its leading term has coefficient 1 (constraints are defined up to a factor).
Expr normalize_constraint(const Expr& x);

struct DualityCheck {
  std::string name;
  Expr source;       // kinematic constraint
  Expr transformed;  // after E -> B, B -> -E
  Expr target;       // sourceless Gauss or Ampere-Maxwell form
  std::optional<Expr> factor;  // transformed = factor * target
  bool pass() const { return factor.has_value(); }
};

/// Kinematic pair (div B, Faraday) under duality versus sourceless Gauss and Ampere-Maxwell.
std::vector<DualityCheck> duality_constraint_checks();
/// a_ij = -(e/c) eps_ijk E_k, b_i = e B_i: the dual of the Lorentz decomposition fed to the
/// cyclic and curl-b conditions.
std::vector<DualityCheck> opposite_selection_checks();

struct FieldLagrangianSpec {
  Rational alpha{1, 2};
  Rational beta{1, 2};
  Rational gamma{0};
};

struct ParityVerdict {
  Expr integrand;
  Expr transformed;
  Expr odd_part;
  bool pass = false;
  FieldLagrangianSpec canonical;
  std::string note;
};

ParityVerdict parity_audit(const FieldLagrangianSpec& spec);

}  // namespace pbem

#endif  // PBEM_HELMHOLTZ_HPP
