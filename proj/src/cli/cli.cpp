#include "pbem/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "pbem/bracket.hpp"
#include "pbem/helmholtz.hpp"
#include "pbem/numeric.hpp"
#include "pbem/parser.hpp"
#include "pbem/report_json.hpp"

namespace pbem {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string field_e, field_b, force, potential_u, rho, current;
  double e = 1.0, m = 1.0, c = 1.0;
  std::string out_path;
  bool json = false;

  std::vector<double> x0{0.0, 0.0, 0.0};
  std::vector<double> v0{1.0, 0.0, 0.0};
  double dt = 0.01;
  int steps = 1000;
  double t0 = 0.0;
  std::string method = "boris";
  std::string csv_path;
  bool converge = false;

  int n = 9;
  double extent = 1.0;
  double tol = 1e-9;
  bool single = false;

  std::string alpha = "1/2", beta = "1/2", gamma = "0";

  NumericBindings bindings() const { return {e, m, c}; }
};

std::optional<VectorField> field_flag(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return parse_vector(text, Context::FieldSpace);
}

VectorField zero_field() { return {Expr(), Expr(), Expr()}; }

std::optional<Expr> potential_flag(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return to_phase_space(parse(text, Context::FieldSpace));
}

/// Force from --force, or the Lorentz force of --field-E/--field-B.
ForceLaw force_from(const RunConfig& cfg) {
  ForceLaw f;
  if (!cfg.force.empty()) {
    if (!cfg.field_e.empty() || !cfg.field_b.empty())
      throw UsageError("give either --force or --field-E/--field-B, not both");
    f.components = parse_vector(cfg.force, Context::PhaseSpace);
  } else if (!cfg.field_e.empty() || !cfg.field_b.empty()) {
    f = ForceLaw::lorentz(field_flag(cfg.field_e).value_or(zero_field()), field_flag(cfg.field_b).value_or(zero_field()));
  } else {
    throw UsageError("a force is required: --force \"F1;F2;F3\" or --field-E/--field-B");
  }
  f.potential = potential_flag(cfg.potential_u);
  return f;
}

Rational rational_flag(const std::string& text, const char* name) {
  try {
    Rational r(text);
    r.canonicalize();
    return r;
  } catch (const std::invalid_argument&) {
    throw UsageError(std::string("--") + name + " expects a rational such as 1/2");
  }
}

int emit(const RunConfig& cfg, const Json& report, bool pass, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (!cfg.out_path.empty()) {
    std::ofstream file(cfg.out_path);
    if (!file) throw UsageError("cannot write " + cfg.out_path);
    file << text;
  }
  if (cfg.out_path.empty() || cfg.json)
    out << text;
  else
    out << (pass ? "pass" : "fail") << "\n";
  return pass ? kPass : kFail;
}

// --- subcommands -------------------------------------------------------------------

int cmd_derive(const RunConfig& cfg, std::ostream& out) {
  const auto e_field = field_flag(cfg.field_e);
  const auto b_field = field_flag(cfg.field_b);
  const DerivationReport report = run_chain(e_field, b_field);
  Json j = to_json(report);
  const bool reverified = reverify(report);
  j["reverified"] = reverified;
  return emit(cfg, j, report.pass() && reverified, out);
}

int cmd_check(const RunConfig& cfg, std::ostream& out) {
  const ForceLaw f = force_from(cfg);
  const HelmholtzReport report = helmholtz_check(f);
  Json j;
  j["force"] = to_json(f.total());
  j.update(to_json(report));
  if (report.decomposition && report.antisymmetry && report.antisymmetry->pass())
    j["fields"] = to_json(identify_fields(*report.decomposition));
  return emit(cfg, j, report.pass(), out);
}

int cmd_reconstruct(const RunConfig& cfg, std::ostream& out) {
  const ForceLaw f = force_from(cfg);
  Json j;
  j["force"] = to_json(f.total());
  try {
    const LagrangianExpr lag = reconstruct_lagrangian(f);
    const VectorField residual = euler_lagrange_roundtrip(lag.L, f);
    j["lagrangian"] = to_json(lag);
    j["euler_lagrange"] = {{"residual", to_json(residual)}, {"pass", is_zero(residual)}};
    return emit(cfg, j, lag.hessian_ok && is_zero(residual), out);
  } catch (const NotVariationalError& err) {
    j["error"] = err.what();
    const HelmholtzReport report = helmholtz_check(f);
    j["helmholtz"] = to_json(report);
    if (report.decomposition && report.antisymmetry && report.antisymmetry->pass()) {
      const Expr div = divergence(identify_fields(*report.decomposition).B);
      if (!div.is_zero()) j["div B"] = div.str();
    }
  } catch (const NoPotentialError& err) {
    j["error"] = err.what();
    j["residual"] = Json::array();
    for (const auto& r : err.residual()) j["residual"].push_back(r.str());
  } catch (const std::invalid_argument& err) {  // non-polynomial fields
    j["error"] = err.what();
  }
  return emit(cfg, j, false, out);
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const NumericBindings nb = cfg.bindings();
  const VectorField e_field = field_flag(cfg.field_e).value_or(zero_field());
  const VectorField b_field = field_flag(cfg.field_b).value_or(zero_field());
  const Integrator method = cfg.method == "rk4" ? Integrator::RK4 : Integrator::Boris;
  if (!(cfg.dt > 0.0)) throw UsageError("--dt must be positive");
  if (cfg.steps < 1) throw UsageError("--steps must be positive");

  const FieldSet fields(e_field, b_field, nb);
  const ParticleState initial{{cfg.x0[0], cfg.x0[1], cfg.x0[2]}, {cfg.v0[0], cfg.v0[1], cfg.v0[2]}, cfg.t0};
  const Trajectory traj = integrate(initial, fields, cfg.dt, cfg.steps, method, nb);
  std::optional<Trajectory> fine;
  if (cfg.converge) fine = integrate(initial, fields, cfg.dt / 2, cfg.steps * 2, method, nb);

  if (!cfg.csv_path.empty()) {
    std::ofstream csv(cfg.csv_path);
    if (!csv) throw UsageError("cannot write " + cfg.csv_path);
    write_csv(csv, traj);
  }

  Json j;
  j["method"] = integrator_name(method);
  j["h"] = number(cfg.dt);
  j["steps"] = cfg.steps;
  j["initial"] = to_json(initial);
  j["final"] = to_json(traj.states.back());
  try {
    const LagrangianExpr lag = reconstruct_lagrangian(ForceLaw::lorentz(e_field, b_field));
    j["lagrangian"] = lag.L.str();
    auto el = el_residual(traj, lag.L, nb);
    if (fine) el = with_orders(el, el_residual(*fine, lag.L, nb));
    j["euler_lagrange"] = to_json(el);
    const bool static_fields = !depends_on(lag.potentials.A0, VarKind::Time) &&
                               std::none_of(b_field.begin(), b_field.end(),
                                            [](const Expr& x) { return depends_on(x, VarKind::Time); });
    if (static_fields) {
      auto energy = energy_check(traj, lag.potentials.A0, Expr(), nb);
      if (fine) energy = with_orders(energy, energy_check(*fine, lag.potentials.A0, Expr(), nb));
      j["energy"] = to_json(energy);
    }
  } catch (const std::invalid_argument& err) {
    j["note"] = std::string("no Lagrangian checks: ") + err.what();
  }
  if (!cfg.csv_path.empty()) j["csv"] = cfg.csv_path;
  return emit(cfg, j, true, out);
}

int cmd_grid(const RunConfig& cfg, std::ostream& out) {
  const NumericBindings nb = cfg.bindings();
  const VectorField e_field = field_flag(cfg.field_e).value_or(zero_field());
  const VectorField b_field = field_flag(cfg.field_b).value_or(zero_field());
  std::optional<Expr> rho;
  std::optional<VectorField> current;
  if (!cfg.rho.empty()) rho = parse(cfg.rho, Context::FieldSpace);
  if (!cfg.current.empty()) current = parse_vector(cfg.current, Context::FieldSpace);
  const GridSpec grid{cfg.extent, cfg.n, cfg.t0};
  if (grid.n < 5) throw UsageError("--n must be at least 5");
  if (!(grid.L > 0.0)) throw UsageError("--extent must be positive");

  const ResidualReport report = cfg.single ? maxwell_grid_residuals(e_field, b_field, rho, current, grid, nb)
                                           : maxwell_grid_convergence(e_field, b_field, rho, current, grid, nb);
  bool pass = true;
  for (const auto& norm : report.norms) {
    if (norm.name.starts_with("implied")) continue;
    const bool converging = norm.order && *norm.order >= 1.5;
    pass = pass && (norm.max <= cfg.tol || converging);
  }
  Json j;
  j["grid"] = {{"n", grid.n}, {"extent", number(grid.L)}, {"h", number(grid.h())}, {"t0", number(grid.t0)}};
  if (!cfg.single) j["grid"]["n_fine"] = 2 * grid.n - 1;
  j["residuals"] = to_json(report);
  j["tolerance"] = number(cfg.tol);
  j["pass"] = pass;
  return emit(cfg, j, pass, out);
}

int cmd_duality(const RunConfig& cfg, std::ostream& out) {
  const VectorField e_field = field_flag(cfg.field_e).value_or(zero_field());
  const VectorField b_field = field_flag(cfg.field_b).value_or(zero_field());
  const FieldLagrangianSpec spec{rational_flag(cfg.alpha, "alpha"), rational_flag(cfg.beta, "beta"),
                                 rational_flag(cfg.gamma, "gamma")};

  auto [e1, b1] = duality_transform(e_field, b_field);
  auto [e2, b2] = duality_transform(e1, b1);
  auto [e3, b3] = duality_transform(e2, b2);
  auto [e4, b4] = duality_transform(e3, b3);
  const bool twice_flips = is_zero(e2 + e_field) && is_zero(b2 + b_field);
  const bool four_identity = is_zero(e4 - e_field) && is_zero(b4 - b_field);

  Json j;
  j["transformed"] = {{"E", to_json(e1)}, {"B", to_json(b1)}};
  j["twice_flips_sign"] = twice_flips;
  j["four_times_identity"] = four_identity;
  bool pass = twice_flips && four_identity;
  j["constraints"] = Json::array();
  for (const auto& d : duality_constraint_checks()) {
    j["constraints"].push_back(to_json(d));
    pass = pass && d.pass();
  }
  j["opposite_selection"] = Json::array();
  for (const auto& d : opposite_selection_checks()) {
    j["opposite_selection"].push_back(to_json(d));
    pass = pass && d.pass();
  }
  const ParityVerdict parity = parity_audit(spec);
  j["parity"] = to_json(parity);
  pass = pass && parity.pass;
  j["pass"] = pass;
  return emit(cfg, j, pass, out);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Poisson-bracket electrodynamics verification toolkit", "pbem"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.add_option("--e", cfg.e, "charge (default 1)");
  app.add_option("--m", cfg.m, "mass (default 1)");
  app.add_option("--c", cfg.c, "speed of light (default 1)");
  app.add_option("--out", cfg.out_path, "write the JSON report to this path");
  app.add_flag("--json", cfg.json, "print JSON on stdout even with --out");

  auto fields = [&](CLI::App* sub) {
    sub->add_option("--field-E", cfg.field_e, "E as \"ex;ey;ez\" in x1..x3, t");
    sub->add_option("--field-B", cfg.field_b, "B as \"bx;by;bz\" in x1..x3, t");
  };
  auto* derive = app.add_subcommand("derive", "replay the bracket derivation of div B = 0 and Faraday's law");
  fields(derive);
  auto* check = app.add_subcommand("check", "Helmholtz conditions for a force");
  auto* reconstruct = app.add_subcommand("reconstruct", "potentials and Lagrangian for a variational force");
  for (auto* sub : {check, reconstruct}) {
    fields(sub);
    sub->add_option("--force", cfg.force, "force as \"F1;F2;F3\" in q, v, t");
    sub->add_option("--potential-U", cfg.potential_u, "static potential energy U in x1..x3, t");
  }
  auto* simulate = app.add_subcommand("simulate", "integrate a charged particle");
  fields(simulate);
  simulate->add_option("--x0", cfg.x0, "initial position x,y,z")->delimiter(',')->expected(3);
  simulate->add_option("--v0", cfg.v0, "initial velocity x,y,z")->delimiter(',')->expected(3);
  simulate->add_option("--dt", cfg.dt, "step size");
  simulate->add_option("--steps", cfg.steps, "number of steps");
  simulate->add_option("--t0", cfg.t0, "initial time");
  simulate->add_option("--method", cfg.method, "boris or rk4")->check(CLI::IsMember({"boris", "rk4"}));
  simulate->add_option("--csv", cfg.csv_path, "write the trajectory as CSV");
  simulate->add_flag("--converge", cfg.converge, "rerun with half the step and report orders");
  auto* grid = app.add_subcommand("grid", "finite-difference Maxwell residuals on a cube");
  fields(grid);
  grid->add_option("--n", cfg.n, "points per axis (>= 5)");
  grid->add_option("--extent", cfg.extent, "half-width L of the cube [-L, L]^3");
  grid->add_option("--t0", cfg.t0, "sample time");
  grid->add_option("--rho", cfg.rho, "charge density in x1..x3, t");
  grid->add_option("--J", cfg.current, "current density \"jx;jy;jz\"");
  grid->add_option("--tol", cfg.tol, "absolute residual tolerance");
  grid->add_flag("--single", cfg.single, "one grid only, no convergence order");
  auto* duality = app.add_subcommand("duality", "E -> B, B -> -E and the parity audit");
  fields(duality);
  duality->add_option("--alpha", cfg.alpha, "coefficient of E^2");
  duality->add_option("--beta", cfg.beta, "coefficient of B^2");
  duality->add_option("--gamma", cfg.gamma, "coefficient of E.B");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsage;
  }

  try {
    cfg.bindings().validate();
    // Parse every expression before doing any work.
    field_flag(cfg.field_e);
    field_flag(cfg.field_b);
    potential_flag(cfg.potential_u);
    if (!cfg.force.empty()) parse_vector(cfg.force, Context::PhaseSpace);

    if (derive->parsed()) return cmd_derive(cfg, out);
    if (check->parsed()) return cmd_check(cfg, out);
    if (reconstruct->parsed()) return cmd_reconstruct(cfg, out);
    if (simulate->parsed()) return cmd_simulate(cfg, out);
    if (grid->parsed()) return cmd_grid(cfg, out);
    if (duality->parsed()) return cmd_duality(cfg, out);
  } catch (const ParseError& e) {
    err << "parse error at " << e.position() << ": " << e.message();
    if (!e.token().empty()) err << " (near '" << e.token() << "')";
    err << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace pbem
