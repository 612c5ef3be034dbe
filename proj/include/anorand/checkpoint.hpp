#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "anorand/model.hpp"

namespace anorand {

inline constexpr int kCheckpointSchemaVersion = 1;

// Trained model plus the standardization statistics of its training data.
struct Checkpoint {
  AnoRandModel model;
  std::vector<double> feature_means;
  std::vector<double> feature_stds;
};

nlohmann::json config_to_json(const ModelConfig& config);
ModelConfig config_from_json(const nlohmann::json& j);

nlohmann::json checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const nlohmann::json& j);

// JSON container; doubles are written in shortest round-trip form, so a
// reloaded model scores bit-identically.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace anorand
