#include "pbem/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pbem {

namespace {

/// Neumaier-compensated running sum.
class Accumulator {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Collects pointwise residual vectors into max-abs and RMS (of the Euclidean norm).
class NormBuilder {
 public:
  explicit NormBuilder(std::string name) : name_(std::move(name)) {}
  void add(const double* r, std::size_t n) {
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      max_ = std::max(max_, std::abs(r[i]));
      sq += r[i] * r[i];
    }
    squares_.add(sq);
    ++count_;
  }
  void add(double r) { add(&r, 1); }
  void add(const Vec3& r) { add(r.data(), 3); }
  ResidualNorm done() const {
    return {name_, max_, count_ ? std::sqrt(squares_.value() / static_cast<double>(count_)) : 0.0, std::nullopt};
  }

 private:
  std::string name_;
  double max_ = 0.0;
  Accumulator squares_;
  std::size_t count_ = 0;
};

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
Vec3 add(const Vec3& a, const Vec3& b, double k = 1.0) { return {a[0] + k * b[0], a[1] + k * b[1], a[2] + k * b[2]}; }
Vec3 scale(const Vec3& a, double k) { return {k * a[0], k * a[1], k * a[2]}; }
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 acceleration(const Vec3& r, const Vec3& v, double t, const FieldSet& f, const NumericBindings& b) {
  const Vec3 force = add(f.E(r, t), cross(v, f.B(r, t)), 1.0 / b.c);
  return scale(force, b.e / b.m);
}

VectorField x_field(const VectorField& f) { return map(f, to_field_space); }

}  // namespace

void NumericBindings::validate() const {
  if (!std::isfinite(e) || !std::isfinite(m) || !std::isfinite(c)) throw std::invalid_argument("constants must be finite");
  if (m <= 0.0) throw std::invalid_argument("m must be positive");
  if (c <= 0.0) throw std::invalid_argument("c must be positive");
}

// --- evaluation ----------------------------------------------------------------------

Polynomial::Polynomial(const Expr& x, const NumericBindings& bindings, const FieldBindings& fields) {
  Expr flat = x;
  try {
    if (contains_fields(x)) flat = substitute_fields(x, fields);
    flat = to_components(flat);
  } catch (const UnboundFieldError& err) {
    throw UnboundSymbolError(err.what());
  } catch (const IndexError& err) {
    throw UnboundSymbolError(std::string("cannot evaluate symbolic index: ") + err.what());
  }
  for (const auto& t : flat.terms()) {
    Monomial mono;
    mono.coeff = t.coeff.get_d() * std::pow(bindings.e, t.consts.e) * std::pow(bindings.m, t.consts.m) *
                 std::pow(bindings.c, t.consts.c);
    for (const auto& f : t.factors) {
      const int i = f.indices.empty() ? 0 : f.indices[0].value - 1;
      switch (f.kind) {
        case AtomKind::Time: mono.slots.push_back(0); break;
        case AtomKind::Coordinate:
        case AtomKind::SpatialVar: mono.slots.push_back(1 + i); break;
        case AtomKind::Velocity: mono.slots.push_back(4 + i); break;
        case AtomKind::Acceleration:
          mono.slots.push_back(7 + i);
          needs_accel_ = true;
          break;
        default: throw UnboundSymbolError("cannot evaluate " + Expr::from_factor(f).str());
      }
    }
    terms_.push_back(std::move(mono));
  }
}

double Polynomial::operator()(const ParticleState& s, const Vec3* accel) const {
  if (needs_accel_ && accel == nullptr) throw UnboundSymbolError("acceleration is not bound");
  const std::array<double, 10> slot{s.t,      s.r[0],   s.r[1], s.r[2], s.v[0], s.v[1], s.v[2],
                                    accel ? (*accel)[0] : 0.0, accel ? (*accel)[1] : 0.0,
                                    accel ? (*accel)[2] : 0.0};
  Accumulator sum;
  for (const auto& m : terms_) {
    double p = m.coeff;
    for (int k : m.slots) p *= slot[static_cast<std::size_t>(k)];
    sum.add(p);
  }
  return sum.value();
}

double Polynomial::at(const Vec3& x, double t) const { return (*this)(ParticleState{x, {}, t}); }

double evaluate(const Expr& x, const ParticleState& s, const NumericBindings& bindings, const FieldBindings& fields) {
  return Polynomial(x, bindings, fields)(s);
}

double evaluate(const Expr& x, const Vec3& point, double t, const NumericBindings& bindings,
                const FieldBindings& fields) {
  return Polynomial(x, bindings, fields).at(point, t);
}

FieldSet::FieldSet(const VectorField& e_field, const VectorField& b_field, const NumericBindings& bindings) {
  for (std::size_t i = 0; i < 3; ++i) {
    e_[i] = Polynomial(e_field[i], bindings);
    b_[i] = Polynomial(b_field[i], bindings);
  }
}

Vec3 FieldSet::E(const Vec3& r, double t) const { return {e_[0].at(r, t), e_[1].at(r, t), e_[2].at(r, t)}; }
Vec3 FieldSet::B(const Vec3& r, double t) const { return {b_[0].at(r, t), b_[1].at(r, t), b_[2].at(r, t)}; }

// --- integrators --------------------------------------------------------------------

std::string integrator_name(Integrator i) { return i == Integrator::Boris ? "boris" : "rk4"; }

ParticleState step_boris(const ParticleState& s, const FieldSet& fields, double h, const NumericBindings& b) {
  const Vec3 r_half = add(s.r, s.v, 0.5 * h);
  const double t_half = s.t + 0.5 * h;
  const Vec3 E = fields.E(r_half, t_half);
  const Vec3 B = fields.B(r_half, t_half);
  const double k = 0.5 * h * b.e / b.m;
  const Vec3 v_minus = add(s.v, E, k);
  const Vec3 tv = scale(B, k / b.c);
  const Vec3 sv = scale(tv, 2.0 / (1.0 + dot(tv, tv)));
  const Vec3 v_prime = add(v_minus, cross(v_minus, tv));
  const Vec3 v_plus = add(v_minus, cross(v_prime, sv));
  ParticleState out;
  out.v = add(v_plus, E, k);
  out.r = add(r_half, out.v, 0.5 * h);
  out.t = s.t + h;
  return out;
}

ParticleState step_rk4(const ParticleState& s, const FieldSet& fields, double h, const NumericBindings& b) {
  auto deriv = [&](const Vec3& r, const Vec3& v, double t) {
    return std::pair{v, acceleration(r, v, t, fields, b)};
  };
  const auto [k1r, k1v] = deriv(s.r, s.v, s.t);
  const auto [k2r, k2v] = deriv(add(s.r, k1r, 0.5 * h), add(s.v, k1v, 0.5 * h), s.t + 0.5 * h);
  const auto [k3r, k3v] = deriv(add(s.r, k2r, 0.5 * h), add(s.v, k2v, 0.5 * h), s.t + 0.5 * h);
  const auto [k4r, k4v] = deriv(add(s.r, k3r, h), add(s.v, k3v, h), s.t + h);
  ParticleState out;
  for (std::size_t i = 0; i < 3; ++i) {
    out.r[i] = s.r[i] + h / 6.0 * (k1r[i] + 2.0 * k2r[i] + 2.0 * k3r[i] + k4r[i]);
    out.v[i] = s.v[i] + h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
  }
  out.t = s.t + h;
  return out;
}

Trajectory integrate(const ParticleState& initial, const FieldSet& fields, double h, int steps, Integrator integrator,
                     const NumericBindings& b) {
  if (!(h > 0.0)) throw std::invalid_argument("step size must be positive");
  if (steps < 0) throw std::invalid_argument("step count must be nonnegative");
  Trajectory traj;
  traj.h = h;
  traj.integrator = integrator;
  traj.states.reserve(static_cast<std::size_t>(steps) + 1);
  traj.states.push_back(initial);
  for (int n = 0; n < steps; ++n) {
    ParticleState next = integrator == Integrator::Boris ? step_boris(traj.states.back(), fields, h, b)
                                                         : step_rk4(traj.states.back(), fields, h, b);
    next.t = initial.t + h * (n + 1);  // no accumulated rounding in the time grid
    traj.states.push_back(next);
  }
  return traj;
}

void write_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,x1,x2,x3,v1,v2,v3\n";
  out.precision(17);
  for (const auto& s : traj.states)
    out << s.t << ',' << s.r[0] << ',' << s.r[1] << ',' << s.r[2] << ',' << s.v[0] << ',' << s.v[1] << ',' << s.v[2]
        << '\n';
}

double angular_frequency(const Trajectory& traj) {
  if (traj.states.size() < 2) throw std::invalid_argument("trajectory too short");
  double total = 0.0;
  double prev = std::atan2(traj.states.front().v[1], traj.states.front().v[0]);
  for (std::size_t n = 1; n < traj.states.size(); ++n) {
    const double cur = std::atan2(traj.states[n].v[1], traj.states[n].v[0]);
    double d = cur - prev;
    while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
    while (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
    total += d;
    prev = cur;
  }
  return std::abs(total) / (traj.states.back().t - traj.states.front().t);
}

// --- residual reports ----------------------------------------------------------------

const ResidualNorm& ResidualReport::operator[](const std::string& name) const {
  for (const auto& n : norms)
    if (n.name == name) return n;
  throw std::out_of_range("no residual named " + name);
}

ResidualReport with_orders(const ResidualReport& coarse, const ResidualReport& fine) {
  ResidualReport out = fine;
  out.h = coarse.h;
  out.h.insert(out.h.end(), fine.h.begin(), fine.h.end());
  if (coarse.h.empty() || fine.h.empty()) return out;
  const double ratio = coarse.h.front() / fine.h.front();
  for (auto& n : out.norms) {
    if (n.name.starts_with("implied")) continue;  // source values, not residuals
    const double c = coarse[n.name].max;
    // both at round-off: no meaningful order
    if (std::max(c, n.max) < 1e-12) continue;
    if (c > 0.0 && n.max > 0.0) n.order = std::log(c / n.max) / std::log(ratio);
  }
  return out;
}

ResidualReport el_residual(const Trajectory& traj, const Expr& L, const NumericBindings& b,
                           const FieldBindings& fields) {
  if (traj.states.size() < 5) throw std::invalid_argument("trajectory needs at least 5 points");
  std::array<Polynomial, 3> dldv;
  std::array<Polynomial, 3> dldq;
  for (int i = 1; i <= 3; ++i) {
    dldv[static_cast<std::size_t>(i - 1)] = Polynomial(partial(L, Variable::v(Index::concrete(i))), b, fields);
    dldq[static_cast<std::size_t>(i - 1)] = Polynomial(partial(L, Variable::q(Index::concrete(i))), b, fields);
  }
  NormBuilder norm("euler-lagrange");
  const auto& s = traj.states;
  for (std::size_t n = 1; n + 1 < s.size(); ++n) {
    Vec3 r{};
    for (std::size_t i = 0; i < 3; ++i)
      r[i] = (dldv[i](s[n + 1]) - dldv[i](s[n - 1])) / (2.0 * traj.h) - dldq[i](s[n]);
    norm.add(r);
  }
  return {{norm.done()}, {traj.h}};
}

BracketSample canonical_bracket_check(const VectorField& b_field, const VectorField& a_field, const ParticleState& point,
                                      const NumericBindings& b, double fd_step) {
  b.validate();
  std::array<Polynomial, 3> A;
  std::array<Polynomial, 3> B;
  for (std::size_t i = 0; i < 3; ++i) {
    A[i] = Polynomial(to_field_space(a_field[i]), b);
    B[i] = Polynomial(to_field_space(b_field[i]), b);
  }
  const double e_c = b.e / b.c;
  Vec3 p{};
  for (std::size_t i = 0; i < 3; ++i) p[i] = b.m * point.v[i] + e_c * A[i].at(point.r, point.t);

  // Phase-space functions: index 0-2 are q_i, 3-5 are v_i.
  auto fn = [&](std::size_t which, const Vec3& r, const Vec3& pp) {
    if (which < 3) return r[which];
    const std::size_t j = which - 3;
    return (pp[j] - e_c * A[j].at(r, point.t)) / b.m;
  };
  std::array<Vec3, 6> grad_r{};
  std::array<Vec3, 6> grad_p{};
  for (std::size_t f = 0; f < 6; ++f)
    for (std::size_t k = 0; k < 3; ++k) {
      Vec3 rp = point.r, rm = point.r, pp = p, pm = p;
      rp[k] += fd_step;
      rm[k] -= fd_step;
      pp[k] += fd_step;
      pm[k] -= fd_step;
      grad_r[f][k] = (fn(f, rp, p) - fn(f, rm, p)) / (2.0 * fd_step);
      grad_p[f][k] = (fn(f, point.r, pp) - fn(f, point.r, pm)) / (2.0 * fd_step);
    }
  auto poisson = [&](std::size_t f, std::size_t g) {
    double s = 0.0;
    for (std::size_t k = 0; k < 3; ++k) s += grad_r[f][k] * grad_p[g][k] - grad_p[f][k] * grad_r[g][k];
    return s;
  };

  BracketSample out;
  const Vec3 bv{B[0].at(point.r, point.t), B[1].at(point.r, point.t), B[2].at(point.r, point.t)};
  const double k = b.e / (b.m * b.m * b.c);
  double qv_err = 0.0, vv_err = 0.0, vv_scale = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      out.qv[i][j] = poisson(i, 3 + j);
      out.vv[i][j] = poisson(3 + i, 3 + j);
      double expected = 0.0;
      for (std::size_t n = 0; n < 3; ++n) {
        const int eps = (i == j || j == n || i == n) ? 0 : (((j + 3 - i) % 3 == 1) ? 1 : -1);
        expected += eps * bv[n];
      }
      out.vv_expected[i][j] = k * expected;
      qv_err = std::max(qv_err, std::abs(out.qv[i][j] - (i == j ? 1.0 / b.m : 0.0)));
      vv_err = std::max(vv_err, std::abs(out.vv[i][j] - out.vv_expected[i][j]));
      vv_scale = std::max(vv_scale, std::abs(out.vv_expected[i][j]));
    }
  out.report.h = {fd_step};
  out.report.norms = {{"{q,v}", qv_err, qv_err, std::nullopt},
                      {"{q,v} relative", qv_err * b.m, qv_err * b.m, std::nullopt},
                      {"{v,v}", vv_err, vv_err, std::nullopt}};
  const double rel = vv_scale > 0.0 ? vv_err / vv_scale : vv_err;
  out.report.norms.push_back({"{v,v} relative", rel, rel, std::nullopt});
  return out;
}

// --- grid residuals ----------------------------------------------------------------

void GridSpec::validate() const {
  if (n < 5) throw std::invalid_argument("grid needs at least 5 points per axis");
  if (!(L > 0.0)) throw std::invalid_argument("grid extent must be positive");
}

ResidualReport maxwell_grid_residuals(const VectorField& e_field, const VectorField& b_field,
                                      const std::optional<Expr>& rho, const std::optional<VectorField>& J,
                                      const GridSpec& grid, const NumericBindings& b) {
  grid.validate();
  b.validate();
  const VectorField ex = x_field(e_field);
  const VectorField bx = x_field(b_field);
  const FieldSet fields(ex, bx, b);
  const FieldSet rates(time_derivative(ex), time_derivative(bx), b);
  std::optional<Polynomial> rho_p;
  std::optional<std::array<Polynomial, 3>> j_p;
  if (rho) rho_p = Polynomial(to_field_space(*rho), b);
  if (J) j_p = std::array<Polynomial, 3>{Polynomial(to_field_space((*J)[0]), b), Polynomial(to_field_space((*J)[1]), b),
                                         Polynomial(to_field_space((*J)[2]), b)};

  const auto n = static_cast<std::size_t>(grid.n);
  const double h = grid.h();
  auto coord = [&](std::size_t k) { return -grid.L + h * static_cast<double>(k); };
  auto id = [&](std::size_t i, std::size_t j, std::size_t k) { return (i * n + j) * n + k; };
  std::vector<Vec3> E(n * n * n), B(n * n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const Vec3 x{coord(i), coord(j), coord(k)};
        E[id(i, j, k)] = fields.E(x, grid.t0);
        B[id(i, j, k)] = fields.B(x, grid.t0);
      }

  NormBuilder div_b("div B"), faraday("faraday"), gauss("gauss"), ampere("ampere-maxwell");
  NormBuilder implied_rho("implied rho"), implied_j("implied J");
  for (std::size_t i = 1; i + 1 < n; ++i)
    for (std::size_t j = 1; j + 1 < n; ++j)
      for (std::size_t k = 1; k + 1 < n; ++k) {
        const std::array<std::size_t, 3> at{i, j, k};
        // d[a][comp]: central difference of field component `comp` along axis a
        auto diff = [&](const std::vector<Vec3>& f) {
          std::array<Vec3, 3> d{};
          for (std::size_t a = 0; a < 3; ++a) {
            auto up = at, dn = at;
            ++up[a];
            --dn[a];
            const Vec3& fu = f[id(up[0], up[1], up[2])];
            const Vec3& fd = f[id(dn[0], dn[1], dn[2])];
            for (std::size_t c = 0; c < 3; ++c) d[a][c] = (fu[c] - fd[c]) / (2.0 * h);
          }
          return d;
        };
        const auto dE = diff(E);
        const auto dB = diff(B);
        const Vec3 curl_e{dE[1][2] - dE[2][1], dE[2][0] - dE[0][2], dE[0][1] - dE[1][0]};
        const Vec3 curl_b{dB[1][2] - dB[2][1], dB[2][0] - dB[0][2], dB[0][1] - dB[1][0]};
        const double div_e = dE[0][0] + dE[1][1] + dE[2][2];
        const Vec3 x{coord(i), coord(j), coord(k)};
        const Vec3 e_t = rates.E(x, grid.t0);
        const Vec3 b_t = rates.B(x, grid.t0);

        div_b.add(dB[0][0] + dB[1][1] + dB[2][2]);
        faraday.add(add(curl_e, b_t, 1.0 / b.c));
        if (rho_p)
          gauss.add(div_e - rho_p->at(x, grid.t0));
        else
          implied_rho.add(div_e);
        Vec3 jc = add(scale(curl_b, b.c), e_t, -1.0);  // c curl B - dE/dt
        if (j_p) {
          const Vec3 jv{(*j_p)[0].at(x, grid.t0), (*j_p)[1].at(x, grid.t0), (*j_p)[2].at(x, grid.t0)};
          ampere.add(scale(add(jc, jv, -1.0), 1.0 / b.c));
        } else {
          implied_j.add(jc);
        }
      }
  ResidualReport out;
  out.h = {h};
  out.norms = {div_b.done(), faraday.done()};
  out.norms.push_back(rho_p ? gauss.done() : implied_rho.done());
  out.norms.push_back(j_p ? ampere.done() : implied_j.done());
  return out;
}

ResidualReport maxwell_grid_convergence(const VectorField& e_field, const VectorField& b_field,
                                        const std::optional<Expr>& rho, const std::optional<VectorField>& J,
                                        const GridSpec& grid, const NumericBindings& b) {
  GridSpec fine = grid;
  fine.n = 2 * grid.n - 1;
  return with_orders(maxwell_grid_residuals(e_field, b_field, rho, J, grid, b),
                     maxwell_grid_residuals(e_field, b_field, rho, J, fine, b));
}

ResidualReport energy_check(const Trajectory& traj, const Expr& A0, const Expr& U, const NumericBindings& b) {
  if (depends_on(A0, VarKind::Time) || depends_on(U, VarKind::Time))
    throw std::invalid_argument("energy check needs static potentials");
  if (traj.states.empty()) throw std::invalid_argument("empty trajectory");
  const Polynomial a0(to_field_space(A0), b);
  const Polynomial u(to_field_space(U), b);
  auto energy = [&](const ParticleState& s) {
    return 0.5 * b.m * dot(s.v, s.v) + b.e * a0.at(s.r, s.t) + u.at(s.r, s.t);
  };
  const double h0 = energy(traj.states.front());
  const double denom = h0 != 0.0 ? std::abs(h0) : 1.0;
  NormBuilder drift("energy drift");
  for (const auto& s : traj.states) drift.add((energy(s) - h0) / denom);
  return {{drift.done()}, {traj.h}};
}

}  // namespace pbem
