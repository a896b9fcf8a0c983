#ifndef PBEM_NUMERIC_HPP
#define PBEM_NUMERIC_HPP

#include <array>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbem/calculus.hpp"
#include "pbem/expr.hpp"

namespace pbem {

using Vec3 = std::array<double, 3>;

struct NumericBindings {
  double e = 1.0;
  double m = 1.0;
  double c = 1.0;

  /// Throws std::invalid_argument unless m > 0, c > 0 and all values are finite.
  void validate() const;
};

struct ParticleState {
  Vec3 r{};
  Vec3 v{};
  double t = 0.0;
};

class UnboundSymbolError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Expression compiled to a flat list of monomials over t, r (q or x), v and a.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(const Expr& x, const NumericBindings& bindings, const FieldBindings& fields = {});

  double operator()(const ParticleState& s, const Vec3* accel = nullptr) const;
  double at(const Vec3& x, double t) const;

 private:
  struct Monomial {
    double coeff = 0.0;
    std::vector<int> slots;  // 0: t, 1-3: r, 4-6: v, 7-9: a
  };
  std::vector<Monomial> terms_;
  bool needs_accel_ = false;
};

double evaluate(const Expr& x, const ParticleState& s, const NumericBindings& bindings = {},
                const FieldBindings& fields = {});
double evaluate(const Expr& x, const Vec3& point, double t, const NumericBindings& bindings = {},
                const FieldBindings& fields = {});

/// Compiled E and B.
class FieldSet {
 public:
  FieldSet(const VectorField& e_field, const VectorField& b_field, const NumericBindings& bindings);
  Vec3 E(const Vec3& r, double t) const;
  Vec3 B(const Vec3& r, double t) const;

 private:
  std::array<Polynomial, 3> e_;
  std::array<Polynomial, 3> b_;
};

enum class Integrator { Boris, RK4 };
std::string integrator_name(Integrator i);

/// Drift half a step, Boris kick (half electric push, magnetic rotation, half electric push)
/// with fields at the midpoint, drift half a step.
ParticleState step_boris(const ParticleState& s, const FieldSet& fields, double h, const NumericBindings& b);
ParticleState step_rk4(const ParticleState& s, const FieldSet& fields, double h, const NumericBindings& b);

struct Trajectory {
  std::vector<ParticleState> states;
  double h = 0.0;
  Integrator integrator = Integrator::Boris;
};

Trajectory integrate(const ParticleState& initial, const FieldSet& fields, double h, int steps, Integrator integrator,
                     const NumericBindings& b);
/// Header t,x1,x2,x3,v1,v2,v3.
void write_csv(std::ostream& out, const Trajectory& traj);
/// Mean rotation rate of the velocity in the (v1, v2) plane, unwrapped.
double angular_frequency(const Trajectory& traj);

struct ResidualNorm {
  std::string name;
  double max = 0.0;
  double rms = 0.0;
  std::optional<double> order;
};

struct ResidualReport {
  std::vector<ResidualNorm> norms;
  std::vector<double> h;

  const ResidualNorm& operator[](const std::string& name) const;
};

/// Fine-run norms tagged with the observed order log(coarse/fine)/log(h_coarse/h_fine).
ResidualReport with_orders(const ResidualReport& coarse, const ResidualReport& fine);

/// d/dt dL/dv_i - dL/dq_i at interior points, central differences of the momentum series.
ResidualReport el_residual(const Trajectory& traj, const Expr& L, const NumericBindings& b,
                           const FieldBindings& fields = {});

/// Finite-difference canonical brackets with v = (p - (e/c) A)/m at one phase point.
struct BracketSample {
  std::array<Vec3, 3> qv{};
  std::array<Vec3, 3> vv{};
  std::array<Vec3, 3> vv_expected{};
  ResidualReport report;  // "{q,v}" and "{v,v}" absolute, plus relative variants
};

BracketSample canonical_bracket_check(const VectorField& b_field, const VectorField& a_field, const ParticleState& point,
                                      const NumericBindings& b, double fd_step = 1e-4);

struct GridSpec {
  double L = 1.0;
  int n = 9;
  double t0 = 0.0;

  double h() const { return 2.0 * L / (n - 1); }
  void validate() const;
};

/// div B, Faraday, Gauss and Ampere-Maxwell residuals at interior points. Without rho or J the
/// implied sources div E and c curl B - dE/dt are reported instead.
ResidualReport maxwell_grid_residuals(const VectorField& e_field, const VectorField& b_field,
                                      const std::optional<Expr>& rho, const std::optional<VectorField>& J,
                                      const GridSpec& grid, const NumericBindings& b);
/// Runs n and 2n-1 points per axis and reports the fine grid with observed orders.
ResidualReport maxwell_grid_convergence(const VectorField& e_field, const VectorField& b_field,
                                        const std::optional<Expr>& rho, const std::optional<VectorField>& J,
                                        const GridSpec& grid, const NumericBindings& b);

/// H = m|v|^2/2 + e A0(r) + U(r) along the trajectory; relative drift unless H(0) = 0.
ResidualReport energy_check(const Trajectory& traj, const Expr& A0, const Expr& U, const NumericBindings& b);

}  // namespace pbem

#endif  // PBEM_NUMERIC_HPP
