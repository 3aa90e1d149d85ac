#pragma once

#include <filesystem>

#include <json.hpp>

#include "thz/pipeline.hpp"

namespace thz::detail {

nlohmann::json grid_to_json(const FrequencyGrid& g);
FrequencyGrid grid_from_json(const nlohmann::json& j);
nlohmann::json steering_to_json(const SteeringGrid& s);
SteeringGrid steering_from_json(const nlohmann::json& arr);
nlohmann::json pattern_to_json(const AntennaPattern& p);
AntennaPattern pattern_from_json(const nlohmann::json& j);
nlohmann::json estimator_to_json(const EstimatorConfig& c);
void estimator_from_json(const nlohmann::json& j, EstimatorConfig& c);
nlohmann::json clustering_to_json(const ClusteringConfig& c);
void clustering_from_json(const nlohmann::json& j, ClusteringConfig& c);
nlohmann::json characterization_to_json(const CharacterizationConfig& c);
void characterization_from_json(const nlohmann::json& j, CharacterizationConfig& c);
nlohmann::json parse_json_file(const std::filesystem::path& path);

}  // namespace thz::detail
