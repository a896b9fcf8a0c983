#ifndef PBEM_EXPR_HPP
#define PBEM_EXPR_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace pbem {

using Rational = mpq_class;

/// A tensor index slot. Concrete indices take values 1..3, free indices carry a
/// user-visible name, dummy indices are numbered and summed over (Einstein
/// convention). Inside a canonical term every dummy occurs exactly twice.
struct Index {
  enum class Kind : std::uint8_t { Concrete, Free, Dummy };

  Kind kind = Kind::Concrete;
  int value = 1;
  std::string name;

  static Index concrete(int v);
  static Index free(std::string n);
  static Index dummy(int id);

  bool is_concrete() const { return kind == Kind::Concrete; }
  bool is_free() const { return kind == Kind::Free; }
  bool is_dummy() const { return kind == Kind::Dummy; }

  auto operator<=>(const Index&) const = default;
  bool operator==(const Index&) const = default;
};

enum class FieldFamily : std::uint8_t { E, B, A, A0, U, F };

enum class VarKind : std::uint8_t { Time, Coordinate, SpatialVar, Velocity, Acceleration };

/// Differentiation variable: t, q_i, x_i, v_i or a_i.
struct Variable {
  VarKind kind = VarKind::Time;
  Index index;

  static Variable time() { return {VarKind::Time, Index::concrete(1)}; }
  static Variable q(Index i) { return {VarKind::Coordinate, std::move(i)}; }
  static Variable x(Index i) { return {VarKind::SpatialVar, std::move(i)}; }
  static Variable v(Index i) { return {VarKind::Velocity, std::move(i)}; }
  static Variable a(Index i) { return {VarKind::Acceleration, std::move(i)}; }

  auto operator<=>(const Variable&) const = default;
  bool operator==(const Variable&) const = default;
};

/// Factor kinds in canonical sort order.
enum class AtomKind : std::uint8_t {
  Delta,
  Epsilon,
  Time,
  Coordinate,
  SpatialVar,
  Velocity,
  Acceleration,
  Field,
  ScalarField,
};

/// One multiplicative factor of a monomial. Fields carry the (sorted) list of
/// partial derivatives applied to them; all other atoms have `derivs` empty.
struct Factor {
  AtomKind kind = AtomKind::Time;
  FieldFamily family = FieldFamily::E;
  std::vector<Index> indices;
  std::vector<Variable> derivs;

  auto operator<=>(const Factor&) const = default;
  bool operator==(const Factor&) const = default;
};

/// Exponents of the opaque symbolic constants e, m, c.
struct ConstPowers {
  int e = 0;
  int m = 0;
  int c = 0;

  ConstPowers operator+(const ConstPowers& o) const { return {e + o.e, m + o.m, c + o.c}; }
  ConstPowers operator-() const { return {-e, -m, -c}; }
  bool is_one() const { return e == 0 && m == 0 && c == 0; }

  auto operator<=>(const ConstPowers&) const = default;
  bool operator==(const ConstPowers&) const = default;
};

struct Term {
  Rational coeff{1};
  ConstPowers consts;
  std::vector<Factor> factors;
};

/// Raised for index misuse, e.g. an index name occurring three times in a monomial.
class IndexError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Immutable symbolic expression held in canonical form: a sorted sum of
/// monomials with exact rational coefficients. Every constructor and arithmetic
/// operation returns a canonical value, so structural equality is semantic
/// equality modulo the canonicalization rules.
class Expr {
 public:
  Expr() = default;
  Expr(long n);  // NOLINT(google-explicit-constructor)
  Expr(const Rational& r);  // NOLINT(google-explicit-constructor)

  static Expr rational(long num, long den = 1);
  static Expr charge();
  static Expr mass();
  static Expr light_speed();
  static Expr time();
  static Expr q(Index i);
  static Expr v(Index i);
  static Expr x(Index i);
  static Expr accel(Index i);
  static Expr field(FieldFamily family, Index i);
  static Expr scalar_field(FieldFamily family);
  static Expr delta(Index i, Index j);
  static Expr epsilon(Index i, Index j, Index k);
  static Expr constant(const Rational& r, ConstPowers consts);

  /// Builds the canonical form of an arbitrary (possibly non-canonical) list of terms.
  static Expr from_terms(std::vector<Term> raw);
  static Expr from_factor(Factor f);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// True when the expression is a single factor-free monomial (rational times e^a m^b c^d).
  bool is_constant() const;

  Expr pow(int n) const;
  /// Multiplicative inverse of a constant monomial; throws std::domain_error otherwise.
  Expr inverse() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  Expr operator-() const;
  Expr& operator+=(const Expr& o) { return *this = *this + o; }
  Expr& operator-=(const Expr& o) { return *this = *this - o; }
  Expr& operator*=(const Expr& o) { return *this = *this * o; }

  friend bool operator==(const Expr& a, const Expr& b);

  /// Canonical DSL string, re-parseable by `parse`.
  std::string str() const;

 private:
  std::vector<Term> terms_;
};

using VectorField = std::array<Expr, 3>;

// --- index utilities -------------------------------------------------------

std::set<std::string> free_index_names(const Expr& x);
bool has_symbolic_indices(const Expr& x);
/// Replaces every occurrence of the free index `name` by `to`.
Expr rename_index(const Expr& x, const std::string& name, const Index& to);
Expr instantiate(const Expr& x, const std::string& name, int value);
/// Writes every dummy index as an explicit sum over 1..3.
Expr expand_dummies(const Expr& x);
/// Expands dummies and requires that no free symbolic index remains.
Expr to_components(const Expr& x);
/// Semantic zero test: canonical zero, or zero for every component of every
/// free-index instantiation (catches dimension-specific identities).
bool vanishes(const Expr& x);
bool equivalent(const Expr& a, const Expr& b);

/// If `x == k * y` for a constant monomial k, returns k.
std::optional<Expr> proportionality(const Expr& x, const Expr& y);

/// Applies `fn` to every factor and multiplies the results back together. Dummy
/// indices are temporarily exposed as linked names, so replacements that keep an
/// index keep its contraction partner.
Expr map_factors(const Expr& x, const std::function<Expr(const Factor&)>& fn);

bool contains(const Expr& x, const std::function<bool(const Factor&)>& pred);
bool depends_on(const Expr& x, VarKind kind);
bool contains_fields(const Expr& x);

/// Rewrites q_i -> x_i (to field space) or x_i -> q_i (to phase space), including
/// derivative variables on field atoms.
Expr to_field_space(const Expr& x);
Expr to_phase_space(const Expr& x);

// --- printing helpers ------------------------------------------------------

std::string family_name(FieldFamily f);
std::string str(const VectorField& v);

}  // namespace pbem

#endif  // PBEM_EXPR_HPP
