#pragma once

// JSON views of the library's result types. Numbers are rounded to 10
// significant digits; NaN becomes null.

#include <json.hpp>

#include "qkdlab/cloner.hpp"
#include "qkdlab/information.hpp"
#include "qkdlab/protocol_sim.hpp"
#include "qkdlab/security.hpp"

namespace qkdlab::io {

using nlohmann::json;

json number(double x);
json complex_number(cplx z);

json to_json(const StateVector& psi);
json to_json(const AmplitudeMatrix& a);
json to_json(const ClonerParams& p);
json to_json(const FidelityFigures& f);
json to_json(const InfoReport& r);
json to_json(const CrossingResult& r);
json to_json(const SymmetricResult& r);
json to_json(const Thresholds& t);
json to_json(const std::vector<ErrorRateRow>& rows);
json to_json(const SweepRow& row);
json to_json(const SimConfig& c);
json to_json(const SimResult& r);
json to_json(const SurveyResult& s);
json to_json(const Comparison& c);
json bases_json();

/// Inverse of to_json(SimConfig); missing keys keep their defaults.
/// Throws std::invalid_argument on malformed input.
SimConfig sim_config_from_json(const json& j);

/// Row-major [[re, im], ...] entries; throws on bad shape or norm.
AmplitudeMatrix amplitude_matrix_from_json(const json& j);

}  // namespace qkdlab::io
