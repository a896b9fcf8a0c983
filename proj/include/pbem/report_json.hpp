#ifndef PBEM_REPORT_JSON_HPP
#define PBEM_REPORT_JSON_HPP

#include "json.hpp"
#include "pbem/bracket.hpp"
#include "pbem/helmholtz.hpp"
#include "pbem/numeric.hpp"

namespace pbem {

using Json = nlohmann::ordered_json;

/// Doubles are rounded to 12 significant digits so reports are byte-stable.
Json number(double x);
Json to_json(const VectorField& v);

/// {steps:[{name, rule, citation, input, output, ...}], constraints:[{name, expr, verdict, residual}],
///  multipliers:{...}, pass}. Expressions are canonical DSL strings.
Json to_json(const DerivationReport& report);
/// Parses every step back and recomputes its rule; false on any mismatch or parse failure.
bool reverify_json(const Json& report);

Json to_json(const ConditionResult& c);
Json to_json(const HelmholtzReport& r);
Json to_json(const IdentifiedFields& f);
Json to_json(const LagrangianExpr& l);
Json to_json(const DualityCheck& d);
Json to_json(const ParityVerdict& p);

/// [{name, max, rms, h, order?}]
Json to_json(const ResidualReport& r);
Json to_json(const ParticleState& s);

}  // namespace pbem

#endif  // PBEM_REPORT_JSON_HPP
