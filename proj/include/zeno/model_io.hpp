#pragma once

// JSON surfaces shared by the command-line driver and its tests.
//
// Model descriptor:
//   {"type": "two_level", "omega": f, "delta": f}
//   {"type": "continuum", "omegas": [f, ...], "couplings": [[re, im], ...]}
//   {"type": "generic", "matrix": [[[re, im], ...], ...], "initial_index": n}

#include <filesystem>

#include <json.hpp>

#include "zeno/estimator.hpp"
#include "zeno/models.hpp"
#include "zeno/protocol.hpp"

namespace zeno {

/// Throws Error(ParseError) with the offending field in the message.
ModelDescriptor parse_model(const nlohmann::json& j);
ModelDescriptor load_model_file(const std::filesystem::path& path);
nlohmann::json model_to_json(const ModelDescriptor& model);

nlohmann::json to_json(const ModelSummary& s);
ModelSummary summary_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ValidityMargin& m);

nlohmann::json to_json(const EstimationResult& r);
EstimationResult estimation_from_json(const nlohmann::json& j);

}  // namespace zeno
