#include "doctest.h"

#include <random>

#include "pbem/helmholtz.hpp"
#include "pbem/parser.hpp"
#include "support.hpp"

using namespace pbem;
using testing::fv;
using testing::fx;
using testing::pv;
using testing::px;

namespace {

struct PotentialPair {
  VectorField A;
  Expr A0;
  VectorField E, B;
};

PotentialPair random_pair(std::mt19937& rng) {
  PotentialPair p;
  p.A = testing::random_vector(rng, 3, 3);
  p.A0 = testing::random_poly(rng, 3, 3);
  p.B = curl(p.A);
  p.E = -gradient(p.A0) - Expr::light_speed().inverse() * time_derivative(p.A);
  return p;
}

}  // namespace

TEST_CASE("uniform B passes every condition") {
  const HelmholtzReport r = helmholtz_check(ForceLaw::lorentz(fv("0;0;0"), fv("0;0;1")));
  CHECK(r.pass());
  for (const auto* c : r.conditions()) CHECK_MESSAGE(c->pass(), c->name);
  CHECK(r.conditions().size() == 6);
  CHECK(r.hessian == px("m*delta(i,j)"));
  REQUIRE(r.decomposition);
  CHECK(r.decomposition->a[0][1] == px("e/c"));
  CHECK(r.decomposition->a[1][0] == px("-e/c"));
  CHECK(r.decomposition->a[2][2].is_zero());
}

TEST_CASE("decomposition and field identification") {
  const VectorField E = fv("x1*t;x2^2;3");
  const VectorField B = fv("x2;x3;x1");
  const ForceLaw f = ForceLaw::lorentz(E, B);
  const AffineDecomposition d = decompose(f);
  CHECK(d.reconstruct() == f.total());
  // a_ij = dF_i/dv_j = (e/c) eps_ijk B_k as read off the force
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      Expr expected;
      for (int k = 1; k <= 3; ++k)
        expected += px("e/c") * Expr::epsilon(Index::concrete(i), Index::concrete(j), Index::concrete(k)) *
                    to_phase_space(B[static_cast<std::size_t>(k - 1)]);
      CHECK(d.a[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] == expected);
    }
  const IdentifiedFields id = identify_fields(d);
  CHECK(id.orientation == Orientation::Literal);
  CHECK(id.E == E);
  CHECK(id.B == B);
}

TEST_CASE("reversed orientation reads a = -(e/c) eps B") {
  AffineDecomposition d;
  const Expr k = px("-7*e/c");  // a_12 = -(e/c) eps_123 B_3 with B_3 = 7
  d.a[0][1] = k;
  d.a[1][0] = -k;
  const IdentifiedFields id = identify_fields(d, Orientation::ReversedVelocity);
  CHECK(id.B == fv("0;0;7"));
  CHECK(identify_fields(d).B == fv("0;0;-7"));
}

TEST_CASE("symmetric part is rejected with a witness") {
  const AffineDecomposition d = decompose(ForceLaw{pv("-v1;-v2;-v3"), std::nullopt});
  try {
    identify_fields(d);
    FAIL("expected SymmetricPartError");
  } catch (const SymmetricPartError& e) {
    CHECK(e.witness().label == std::vector<int>{1, 1});
    CHECK(e.witness().value == Expr(-1));
  }
}

TEST_CASE("perturbed B breaks only the cyclic condition among the affine ones") {
  const HelmholtzReport r = helmholtz_check(ForceLaw::lorentz(fv("0;0;0"), fv("x1;0;1")));
  CHECK_FALSE(r.pass());
  CHECK(r.linearity.pass());
  CHECK(r.condition1.pass());
  REQUIRE(r.antisymmetry);
  CHECK(r.antisymmetry->pass());
  REQUIRE(r.curl_b);
  CHECK(r.curl_b->pass());
  REQUIRE(r.cyclic);
  CHECK_FALSE(r.cyclic->pass());
  const Residual* res = r.cyclic->at({1, 2, 3});
  REQUIRE(res);
  CHECK(res->value == px("-e/c"));
  // the velocity-dependent form of the same obstruction
  CHECK_FALSE(r.condition2.pass());
  // F = (e/c)(v2, x1 v3 - v1, -x1 v2): d_2 F_1 - d_1 F_2 = -(e/c) v3
  REQUIRE(r.condition2.at({1, 2}));
  CHECK(r.condition2.at({1, 2})->value == px("-e/c*v3"));
  CHECK(r.condition2.residuals.size() == 6);
}

TEST_CASE("isotropic drag fails condition 1") {
  const HelmholtzReport r = helmholtz_check(ForceLaw{pv("-v1;-v2;-v3"), std::nullopt});
  CHECK_FALSE(r.pass());
  CHECK(r.linearity.pass());
  CHECK_FALSE(r.condition1.pass());
  for (int i = 1; i <= 3; ++i) {
    REQUIRE(r.condition1.at({i, i}));
    CHECK(r.condition1.at({i, i})->value == Expr(-2));
  }
  CHECK_FALSE(r.condition1.at({1, 2}));
  CHECK_THROWS_AS(reconstruct_lagrangian(ForceLaw{pv("-v1;-v2;-v3"), std::nullopt}), NotVariationalError);
}

TEST_CASE("quadratic velocity fails linearity") {
  const ForceLaw f{pv("v1^2;0;0"), std::nullopt};
  const HelmholtzReport r = helmholtz_check(f);
  CHECK_FALSE(r.linearity.pass());
  REQUIRE(r.linearity.at({1, 1, 1}));
  CHECK(r.linearity.at({1, 1, 1})->value == Expr(2));
  CHECK_FALSE(r.decomposition);
  CHECK_THROWS_AS(decompose(f), NonAffineForceError);
}

TEST_CASE("potential force passes and subtracts U") {
  const ForceLaw f{pv("0;0;0"), px("q1^2 + q2*q3")};
  CHECK(f.total() == pv("-2*q1;-q3;-q2"));
  const HelmholtzReport r = helmholtz_check(f);
  CHECK(r.pass());
  const LagrangianExpr lag = reconstruct_lagrangian(f);
  CHECK(lag.L == px("1/2*m*(v1^2+v2^2+v3^2) - q1^2 - q2*q3"));
  CHECK(is_zero(euler_lagrange_roundtrip(lag.L, f)));
}

TEST_CASE("reconstructed uniform-B Lagrangian") {
  const ForceLaw f = ForceLaw::lorentz(fv("0;0;0"), fv("0;0;1"));
  const LagrangianExpr lag = reconstruct_lagrangian(f);
  CHECK(lag.L == px("1/2*m*(v1^2+v2^2+v3^2) + e/(2*c)*(q1*v2 - q2*v1)"));
  CHECK(lag.hessian_ok);
  CHECK(lag.potentials.A == fv("-x2/2;x1/2;0"));
  CHECK(lag.potentials.A0.is_zero());
  CHECK(is_zero(euler_lagrange_roundtrip(lag.L, f)));
}

TEST_CASE("zero force gives the free Lagrangian") {
  const LagrangianExpr lag = reconstruct_lagrangian(ForceLaw{pv("0;0;0"), std::nullopt});
  CHECK(lag.L == px("1/2*m*(v1^2+v2^2+v3^2)"));
}

TEST_CASE("Euler-Lagrange round trip detects a wrong Lagrangian") {
  const ForceLaw f = ForceLaw::lorentz(fv("0;0;0"), fv("0;0;1"));
  const Expr wrong = px("1/2*m*(v1^2+v2^2+v3^2) + e/c*(q1*v2 - q2*v1)");
  CHECK_FALSE(is_zero(euler_lagrange_roundtrip(wrong, f)));
  CHECK(hessian_is_m_delta(wrong));
  CHECK_FALSE(hessian_is_m_delta(px("m*v1^2")));
}

TEST_CASE("homotopy potentials on random potential pairs") {
  std::mt19937 rng(2024);
  for (int n = 0; n < 20; ++n) {
    const PotentialPair p = random_pair(rng);
    const VectorField A = poincare_vector_potential(p.B);
    CHECK(curl(A) == p.B);
    const Expr A0 = scalar_potential(p.E, A);
    CHECK(is_zero(-gradient(A0) - (p.E + Expr::light_speed().inverse() * time_derivative(A))));

    const ForceLaw f = ForceLaw::lorentz(p.E, p.B);
    CHECK(helmholtz_check(f).pass());
    const LagrangianExpr lag = reconstruct_lagrangian(f);
    CHECK(lag.hessian_ok);
    CHECK(is_zero(euler_lagrange_roundtrip(lag.L, f)));
    // the original potentials give the same equations of motion
    CHECK(is_zero(euler_lagrange_roundtrip(lagrangian_from_potentials({p.A, p.A0}), f)));
  }
}

TEST_CASE("homotopy formula on homogeneous fields") {
  CHECK(poincare_vector_potential(fv("0;0;1")) == fv("-x2/2;x1/2;0"));
  CHECK(scalar_potential(fv("1;0;0"), fv("0;0;0")) == fx("-x1"));
  CHECK(scalar_potential(fv("x1;x2;x3"), fv("0;0;0")) == fx("-(x1^2+x2^2+x3^2)/2"));
}

TEST_CASE("potential construction errors") {
  try {
    poincare_vector_potential(fv("x1;0;0"));
    FAIL("expected NoPotentialError");
  } catch (const NoPotentialError& e) {
    REQUIRE(e.residual().size() == 1);
    CHECK(e.residual()[0] == Expr(1));
  }
  CHECK_THROWS_AS(scalar_potential(fv("x2;0;0"), fv("0;0;0")), NoPotentialError);
}

TEST_CASE("duality transform") {
  const VectorField E = fv("x1;x2*t;0");
  const VectorField B = fv("0;1;x3");
  auto [e1, b1] = duality_transform(E, B);
  CHECK(e1 == B);
  CHECK(b1 == -E);
  auto [e2, b2] = duality_transform(e1, b1);
  CHECK(e2 == -E);
  CHECK(b2 == -B);
  CHECK(duality_transform(duality_transform(px("E_k*B_k + diff(E1,t)"))) == px("E_k*B_k - diff(E1,t)"));
}

TEST_CASE("kinematic constraints map to Gauss and Ampere-Maxwell") {
  const auto checks = duality_constraint_checks();
  REQUIRE(checks.size() == 2);
  CHECK(checks[0].pass());
  CHECK(*checks[0].factor == Expr(-1));
  CHECK(checks[0].transformed == px("-diff(E_k,q_k)"));
  CHECK(checks[1].pass());
  CHECK(*checks[1].factor == Expr(1));
  CHECK(normalize_constraint(checks[1].transformed) == normalize_constraint(checks[1].target));
}

TEST_CASE("opposite selection") {
  const auto checks = opposite_selection_checks();
  REQUIRE(checks.size() == 2);
  for (const auto& c : checks) CHECK_MESSAGE(c.pass(), c.name);
  CHECK(*checks[0].factor == px("6*e/c"));
  CHECK(*checks[1].factor == px("-2*e"));
}

TEST_CASE("parity audit") {
  const ParityVerdict even = parity_audit(FieldLagrangianSpec{});
  CHECK(even.pass);
  CHECK(even.odd_part.is_zero());
  CHECK(even.canonical.alpha == Rational(1, 2));
  CHECK(even.canonical.beta == Rational(1, 2));

  const ParityVerdict odd = parity_audit(FieldLagrangianSpec{Rational(1, 2), Rational(1, 2), Rational(3)});
  CHECK_FALSE(odd.pass);
  CHECK(odd.odd_part == px("3*E_k*B_k"));
  CHECK(odd.transformed == px("1/2*E_k*E_k + 1/2*B_k*B_k - 3*E_k*B_k"));

  CHECK(parity_audit(FieldLagrangianSpec{Rational(2), Rational(-5), Rational(0)}).pass);
}

TEST_CASE("uniform electric field") {
  const VectorField A = poincare_vector_potential(fv("0;0;0"));
  CHECK(scalar_potential(fv("5;0;0"), A) == fx("-5*x1"));
  const ForceLaw f = ForceLaw::lorentz(fv("5;0;0"), fv("0;0;0"));
  const LagrangianExpr lag = reconstruct_lagrangian(f);
  CHECK(lag.L == px("1/2*m*(v1^2+v2^2+v3^2) + 5*e*q1"));
  CHECK(is_zero(euler_lagrange_roundtrip(lag.L, f)));
}

TEST_CASE("scaled uniform magnetic field") {
  const LagrangianExpr lag = reconstruct_lagrangian(ForceLaw::lorentz(fv("0;0;0"), fv("0;0;3")));
  CHECK(lag.L == px("1/2*m*(v1^2+v2^2+v3^2) + 3*e/(2*c)*(q1*v2 - q2*v1)"));
  CHECK(curl(poincare_vector_potential(fv("0;0;3"))) == fv("0;0;3"));
}
