#ifndef RUINLAB_JSON_IO_HPP
#define RUINLAB_JSON_IO_HPP

#include <json.hpp>
#include <string>

#include "ruinlab/andersen.hpp"
#include "ruinlab/classical.hpp"
#include "ruinlab/discrete.hpp"
#include "ruinlab/integer_pmf.hpp"
#include "ruinlab/mc.hpp"

namespace ruinlab {

using Json = nlohmann::json;

// shortest round-trip decimal form, locale-independent
std::string format_double(double v);

// parse helpers raise ConfigError with a JSON-pointer path on any violation
IntegerPmf pmf_from_json(const Json& j, const std::string& where);
Json pmf_to_json(const IntegerPmf& pmf);

ContinuousClaim continuous_claim_from_json(const Json& j, const std::string& where);
Claim claim_from_json(const Json& j, const std::string& where);  // honours "perturb"
Json claim_to_json(const Claim& claim);
Json claim_to_json(const ContinuousClaim& claim);

SeasonalModel discrete_model_from_json(const Json& j, const std::string& where);
ClassicalModel classical_model_from_json(const Json& j, const std::string& where);
AndersenModel andersen_model_from_json(const Json& j, const std::string& where);
Json model_to_json(const SeasonalModel& model);
Json model_to_json(const ClassicalModel& model);
Json model_to_json(const AndersenModel& model);

Json estimate_to_json(const MCEstimate& est, const MCConfig& cfg);

}  // namespace ruinlab

#endif
