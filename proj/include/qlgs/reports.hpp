#pragma once

#include <qlgs/config.hpp>
#include <qlgs/verify.hpp>

#include <json.hpp>

#include <string>

namespace qlgs {

using Json = nlohmann::ordered_json;

// Effective configuration echo embedded in every report.
Json config_json(const RunConfig& cfg);

Json admissibility_json(const AdmissibilityReport& rep);
Json solve_json(const SolveReport& rep);
Json rate_fit_json(const RateFit& fit);
Json residual_json(const ResidualReport& rep);

// Wraps a payload with the report kind, a generated_at timestamp, and the
// config echo.  generated_at is the only field excluded from byte-level
// determinism comparisons.
Json report_envelope(const std::string& kind, const RunConfig& cfg,
                     Json payload);

}  // namespace qlgs
