#include "doctest.h"

#include <random>

#include "pbem/calculus.hpp"
#include "pbem/parser.hpp"
#include "support.hpp"

using namespace pbem;
using testing::fx;
using testing::px;

TEST_CASE("canonical form collects and orders terms") {
  CHECK(px("q1*v2 - v2*q1").is_zero());
  CHECK(px("q2 + q1") == px("q1 + q2"));
  CHECK(px("2*q1 + 3*q1") == px("5*q1"));
  CHECK(px("(q1+q2)^2") == px("q1^2 + 2*q1*q2 + q2^2"));
  CHECK(px("e*m/m") == Expr::charge());
  CHECK(px("3/6") == Expr::rational(1, 2));
  CHECK(px("(q1+q2)^3").str() == "q1^3 + 3*q1^2*q2 + 3*q1*q2^2 + q2^3");
  CHECK(px("e*m^-2*c").str() == "e*m^-2*c");
}

TEST_CASE("rebuilding from terms is idempotent") {
  std::mt19937 rng(11);
  for (int n = 0; n < 50; ++n) {
    const Expr x = testing::random_poly(rng, 4, 6);
    CHECK(Expr::from_terms(x.terms()) == x);
    CHECK(x * Expr(1) == x);
    CHECK((x + Expr()) == x);
    CHECK((x - x).is_zero());
  }
}

TEST_CASE("printing then parsing is a fixed point") {
  std::mt19937 rng(5);
  for (int n = 0; n < 50; ++n) {
    const Expr x = testing::random_poly(rng, 4, 5) * fx("e/(2*c) - m^2");
    CHECK(fx(x.str()) == x);
  }
  for (const char* s : {"eps(i,j,k)*v_j*B_k", "diff(E_k,q_l)*eps(s,k,l)", "delta(i,j)*v_i*A0", "diff(B_k,q_k,t)",
                        "e*c^-1*eps(j,a,b)*v_a*B_b + e*E_j"}) {
    const Expr x = px(s);
    CHECK_MESSAGE(px(x.str()) == x, s);
  }
}

TEST_CASE("delta and epsilon contract") {
  CHECK(px("delta(i,j)*v_j") == px("v_i"));
  CHECK(px("delta(i,i)") == Expr(3));
  CHECK(px("delta(1,2)").is_zero());
  CHECK(px("eps(1,2,3)") == Expr(1));
  CHECK(px("eps(2,1,3)") == Expr(-1));
  CHECK(px("eps(1,1,3)").is_zero());
  CHECK(px("eps(i,j,k)*B_j*B_k").is_zero());
  CHECK(px("eps(i,j,k) + eps(j,i,k)").is_zero());
  CHECK(px("eps(i,j,k)*eps(i,j,k)") == Expr(6));
  CHECK(px("eps(i,j,k)*eps(i,j,n)") == px("2*delta(k,n)"));
}

TEST_CASE("eps-eps contraction matches brute-force sums") {
  const Expr contracted = px("eps(i,j,k)*eps(i,l,n)");
  for (int j = 1; j <= 3; ++j)
    for (int k = 1; k <= 3; ++k)
      for (int l = 1; l <= 3; ++l)
        for (int n = 1; n <= 3; ++n) {
          long brute = 0;
          for (int i = 1; i <= 3; ++i) {
            auto sign = [](int a, int b, int c) { return (a - b) * (b - c) * (c - a) / 2; };
            brute += sign(i, j, k) * sign(i, l, n);
          }
          Expr x = instantiate(contracted, "j", j);
          x = instantiate(x, "k", k);
          x = instantiate(x, "l", l);
          x = instantiate(x, "n", n);
          CHECK(to_components(x) == Expr(brute));
        }
}

TEST_CASE("components and vanishing") {
  CHECK(to_components(px("v_k*v_k")) == px("v1^2 + v2^2 + v3^2"));
  CHECK(free_index_names(px("eps(i,j,k)*v_j*B_k")) == std::set<std::string>{"i"});
  CHECK(rename_index(px("v_i"), "i", Index::concrete(2)) == px("v2"));
  CHECK(vanishes(px("eps(i,j,k)*eps(l,n,s) - 0")) == false);
  CHECK(equivalent(px("v_k*v_k"), px("v1^2 + v2^2 + v3^2")));
  CHECK_THROWS_AS(to_components(px("v_i")), IndexError);
}

TEST_CASE("proportionality") {
  auto k = proportionality(px("-2*e*c^-1*diff(B_k,q_k)"), px("diff(B_k,q_k)"));
  REQUIRE(k);
  CHECK(*k == px("-2*e/c"));
  CHECK_FALSE(proportionality(px("q1"), px("q2")));
  CHECK_FALSE(proportionality(px("q1 + q2"), px("q1 + 2*q2")));
}

TEST_CASE("parse errors carry position and token") {
  auto fails_at = [](const char* s, Context c, std::size_t pos) {
    try {
      parse(s, c);
    } catch (const ParseError& e) {
      CHECK_MESSAGE(e.position() == pos, std::string(s));
      return true;
    }
    return false;
  };
  CHECK(fails_at("x1", Context::PhaseSpace, 0));
  CHECK(fails_at("q1", Context::FieldSpace, 0));
  CHECK(fails_at("1/q1", Context::PhaseSpace, 1));
  CHECK(fails_at("1/0", Context::PhaseSpace, 1));
  CHECK(fails_at("q1^-1", Context::PhaseSpace, 2));
  CHECK(fails_at("3 +* 4", Context::PhaseSpace, 3));
  CHECK(fails_at("a1", Context::PhaseSpace, 0));
  CHECK(fails_at("q4", Context::PhaseSpace, 0));
  CHECK(fails_at("q1^(1/2)", Context::PhaseSpace, 3));
  CHECK(fails_at("(q1", Context::PhaseSpace, 3));
  CHECK(fails_at("foo", Context::PhaseSpace, 0));
  CHECK_THROWS_AS(parse_vector("x1;0", Context::FieldSpace), ParseError);
  CHECK_THROWS_AS(parse_vector("x1;0;", Context::FieldSpace), ParseError);
}

TEST_CASE("partial derivatives") {
  const Variable q1 = Variable::q(Index::concrete(1));
  CHECK(partial(px("q1^2*v2"), q1) == px("2*q1*v2"));
  CHECK(partial(px("q1^3*q2 + t*q1"), q1) == px("3*q1^2*q2 + t"));
  CHECK(partial(px("v_k*v_k"), Variable::v(Index::concrete(2))) == px("2*v2"));
  CHECK(partial(px("v_k*q_k"), Variable::q(Index::free("i"))) == px("v_i"));
  CHECK(partial(px("B_k"), Variable::q(Index::free("l"))) == px("diff(B_k,q_l)"));
  CHECK(partial(px("E1"), Variable::v(Index::concrete(1))).is_zero());
  CHECK(partial(px("diff(B_k,q_l)"), Variable::time()) == px("diff(B_k,q_l,t)"));
  // mixed partials commute
  CHECK(px("diff(B_k,q_l,t)") == px("diff(B_k,t,q_l)"));
}

TEST_CASE("product rule holds on random polynomials") {
  std::mt19937 rng(3);
  for (int n = 0; n < 30; ++n) {
    const Expr f = to_phase_space(testing::random_poly(rng, 3, 4));
    const Expr g = to_phase_space(testing::random_poly(rng, 3, 4));
    for (int i = 1; i <= 3; ++i) {
      const Variable q = Variable::q(Index::concrete(i));
      CHECK(partial(f * g, q) == partial(f, q) * g + f * partial(g, q));
    }
  }
}

TEST_CASE("total time derivative") {
  CHECK(total_time_derivative(px("q1"), TimeDerivativeMode::Free) == px("v1"));
  CHECK(total_time_derivative(px("t*q1^2"), TimeDerivativeMode::Free) == px("q1^2 + 2*t*q1*v1"));
  CHECK(total_time_derivative(px("v2"), TimeDerivativeMode::Free) == parse("a2", ParseOptions{Context::PhaseSpace, true}));
  const IndexedVector f = lorentz_force("j");
  CHECK(total_time_derivative(px("v_i"), TimeDerivativeMode::OnShell, &f) ==
        px("e/m*E_i + e/(m*c)*eps(i,a,b)*v_a*B_b"));
  CHECK_THROWS_AS(total_time_derivative(px("v1"), TimeDerivativeMode::OnShell), MissingForceError);
}

TEST_CASE("field substitution") {
  FieldBindings bind;
  bind[FieldFamily::B] = testing::fv("x2;x1*t;0");
  CHECK(substitute_fields(px("diff(B_k,q_k)"), bind).is_zero());
  CHECK(substitute_fields(px("diff(B_2,q_1)*q3"), bind) == fx("t*x3"));
  CHECK(substitute_fields(px("diff(B_2,t)"), bind) == fx("x1"));
  CHECK_THROWS_AS(substitute_fields(px("E1"), bind), UnboundFieldError);
}

TEST_CASE("parity") {
  CHECK(parity_transform(px("q1*v2")) == px("q1*v2"));
  CHECK(parity_transform(px("E_k*B_k")) == px("-E_k*B_k"));
  CHECK(parity_transform(px("diff(B_k,q_k)")) == px("-diff(B_k,q_k)"));
  CHECK(is_parity_even(px("E_k*E_k + B_k*B_k")));
  CHECK_FALSE(is_parity_even(px("E_k*B_k")));
}

TEST_CASE("vector calculus identities on random fields") {
  std::mt19937 rng(17);
  for (int n = 0; n < 30; ++n) {
    const VectorField a = testing::random_vector(rng, 4, 5);
    const Expr phi = testing::random_poly(rng, 4, 5);
    CHECK(divergence(curl(a)).is_zero());
    CHECK(is_zero(curl(gradient(phi))));
    // curl curl a = grad div a - laplacian a
    VectorField lap;
    for (int i = 0; i < 3; ++i) lap[static_cast<std::size_t>(i)] = divergence(gradient(a[static_cast<std::size_t>(i)]));
    CHECK(is_zero(curl(curl(a)) - (gradient(divergence(a)) - lap)));
  }
  CHECK(divergence(testing::fv("x1;x2;x3")) == Expr(3));
  CHECK(curl(testing::fv("-x2;x1;0")) == testing::fv("0;0;2"));
  CHECK(cross(testing::fv("1;0;0"), testing::fv("0;1;0")) == testing::fv("0;0;1"));
}

TEST_CASE("space conversion round-trips") {
  std::mt19937 rng(2);
  for (int n = 0; n < 20; ++n) {
    const Expr x = testing::random_poly(rng, 3, 4);
    CHECK(to_field_space(to_phase_space(x)) == x);
  }
  CHECK(to_phase_space(fx("x1*t")) == px("q1*t"));
}
