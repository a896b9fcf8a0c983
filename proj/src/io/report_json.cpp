#include "pbem/report_json.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "pbem/parser.hpp"

namespace pbem {

namespace {

Json strings(const std::vector<Expr>& xs) {
  Json out = Json::array();
  for (const auto& x : xs) out.push_back(x.str());
  return out;
}

Expr read(const Json& j) { return parse(j.get<std::string>(), ParseOptions{Context::PhaseSpace, true}); }

std::string rational_str(const Rational& r) { return r.get_str(); }

}  // namespace

Json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  const double rounded = std::strtod(buf, nullptr);
  return rounded == 0.0 ? 0.0 : rounded;  // no "-0.0"
}

Json to_json(const VectorField& v) { return Json::array({v[0].str(), v[1].str(), v[2].str()}); }

// --- derivations --------------------------------------------------------------------

Json to_json(const DerivationReport& report) {
  Json out;
  out["steps"] = Json::array();
  for (const auto& s : report.steps) {
    Json j;
    j["name"] = s.name;
    j["rule"] = rule_name(s.rule);
    j["citation"] = s.citation;
    if (!s.param.empty()) j["param"] = s.param;
    j["input"] = strings(s.inputs);
    j["output"] = s.output.str();
    if (s.expected) j["expected"] = s.expected->str();
    j["holds"] = s.holds;
    if (s.witness) j["witness"] = s.witness->str();
    out["steps"].push_back(std::move(j));
  }
  out["constraints"] = Json::array();
  for (const auto& c : report.constraints) {
    Json j;
    j["name"] = c.name;
    j["expr"] = c.expr.str();
    j["verdict"] = c.verdict ? Json(*c.verdict ? "pass" : "fail") : Json(nullptr);
    if (!c.residual.empty()) j["residual"] = strings(c.residual);
    out["constraints"].push_back(std::move(j));
  }
  out["multipliers"] = Json::object();
  for (const auto& [name, k] : report.multipliers) out["multipliers"][name] = k.str();
  out["pass"] = report.pass();
  return out;
}

bool reverify_json(const Json& report) {
  try {
    for (const auto& s : report.at("steps")) {
      const auto rule = rule_from_name(s.at("rule").get<std::string>());
      if (!rule) return false;
      std::vector<Expr> inputs;
      for (const auto& x : s.at("input")) inputs.push_back(read(x));
      const Expr out = apply_rule(*rule, inputs, s.value("param", std::string{}));
      if (!(out == read(s.at("output")))) return false;
      if (s.contains("expected") && equivalent(out, read(s.at("expected"))) != s.at("holds").get<bool>()) return false;
    }
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

// --- Helmholtz ----------------------------------------------------------------------

Json to_json(const ConditionResult& c) {
  Json out;
  out["name"] = c.name;
  out["pass"] = c.pass();
  out["residuals"] = Json::array();
  for (const auto& r : c.residuals) out["residuals"].push_back({{"index", r.label}, {"value", r.value.str()}});
  return out;
}

Json to_json(const HelmholtzReport& r) {
  Json out;
  out["pass"] = r.pass();
  out["conditions"] = Json::array();
  for (const auto* c : r.conditions()) out["conditions"].push_back(to_json(*c));
  out["hessian"] = r.hessian.str();
  if (r.decomposition) {
    Json a = Json::array();
    for (const auto& row : r.decomposition->a) a.push_back(to_json(row));
    out["decomposition"] = {{"a", a}, {"b", to_json(r.decomposition->b)}};
  }
  return out;
}

Json to_json(const IdentifiedFields& f) {
  return {{"E", to_json(f.E)},
          {"B", to_json(f.B)},
          {"orientation", f.orientation == Orientation::Literal ? "literal" : "reversed-velocity"}};
}

Json to_json(const LagrangianExpr& l) {
  Json out;
  out["L"] = l.L.str();
  out["A"] = to_json(l.potentials.A);
  out["A0"] = l.potentials.A0.str();
  if (l.U) out["U"] = l.U->str();
  out["fields"] = to_json(l.fields);
  out["hessian_ok"] = l.hessian_ok;
  out["provenance"] = l.provenance;
  return out;
}

Json to_json(const DualityCheck& d) {
  Json out;
  out["name"] = d.name;
  out["source"] = d.source.str();
  out["transformed"] = d.transformed.str();
  out["target"] = d.target.str();
  out["factor"] = d.factor ? Json(d.factor->str()) : Json(nullptr);
  out["pass"] = d.pass();
  return out;
}

Json to_json(const ParityVerdict& p) {
  Json out;
  out["integrand"] = p.integrand.str();
  out["transformed"] = p.transformed.str();
  out["odd_part"] = p.odd_part.str();
  out["pass"] = p.pass;
  out["canonical"] = {{"alpha", rational_str(p.canonical.alpha)},
                      {"beta", rational_str(p.canonical.beta)},
                      {"gamma", rational_str(p.canonical.gamma)}};
  out["note"] = p.note;
  return out;
}

// --- numerics ---------------------------------------------------------------------

Json to_json(const ResidualReport& r) {
  Json out = Json::array();
  Json h;
  if (r.h.size() == 1) {
    h = number(r.h.front());
  } else {
    h = Json::array();
    for (double x : r.h) h.push_back(number(x));
  }
  for (const auto& n : r.norms) {
    Json j;
    j["name"] = n.name;
    j["max"] = number(n.max);
    j["rms"] = number(n.rms);
    j["h"] = h;
    if (n.order) j["order"] = number(*n.order);
    out.push_back(std::move(j));
  }
  return out;
}

Json to_json(const ParticleState& s) {
  return {{"t", number(s.t)},
          {"x", Json::array({number(s.r[0]), number(s.r[1]), number(s.r[2])})},
          {"v", Json::array({number(s.v[0]), number(s.v[1]), number(s.v[2])})}};
}

}  // namespace pbem
