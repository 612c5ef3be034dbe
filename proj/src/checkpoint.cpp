#include "anorand/checkpoint.hpp"

#include <fstream>

#include "anorand/errors.hpp"

namespace anorand {

using nlohmann::json;

json config_to_json(const ModelConfig& c) {
  return json{{"input_dim", c.input_dim},
              {"ffp_hidden", c.ffp_hidden},
              {"encoder_hidden", c.encoder_hidden},
              {"latent_dim", c.latent_dim},
              {"loss_weight", c.loss_weight},
              {"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"learning_rate", c.learning_rate},
              {"mode", std::string(to_string(c.mode))},
              {"seed", c.seed}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.input_dim = j.at("input_dim").get<std::size_t>();
  c.ffp_hidden = j.at("ffp_hidden").get<std::vector<std::size_t>>();
  c.encoder_hidden = j.at("encoder_hidden").get<std::vector<std::size_t>>();
  c.latent_dim = j.at("latent_dim").get<std::size_t>();
  c.loss_weight = j.at("loss_weight").get<double>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.mode = training_mode_from_string(j.at("mode").get<std::string>());
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

json checkpoint_to_json(const Checkpoint& cp) {
  json layers = json::array();
  const auto blocks = cp.model.parameter_blocks();
  const auto all_layers = cp.model.layers();
  std::size_t offset = 0;
  std::size_t block = 0;
  for (const DenseLayer* layer : all_layers) {
    while (offset >= blocks[block].offset + blocks[block].size) ++block;
    layers.push_back({{"block", blocks[block].name},
                      {"fan_in", layer->fan_in()},
                      {"fan_out", layer->fan_out()},
                      {"activation", std::string(to_string(layer->activation()))},
                      {"weight", layer->weight().data()},
                      {"bias", layer->bias()}});
    offset += layer->parameter_count();
  }
  return json{{"format", "anorand-checkpoint"},
              {"schema_version", kCheckpointSchemaVersion},
              {"config", config_to_json(cp.model.config())},
              {"alpha", cp.model.alpha()},
              {"standardization", {{"means", cp.feature_means}, {"stds", cp.feature_stds}}},
              {"layers", std::move(layers)}};
}

Checkpoint checkpoint_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "anorand-checkpoint") {
      throw ValidationError("not an anorand checkpoint");
    }
    const int version = j.at("schema_version").get<int>();
    if (version != kCheckpointSchemaVersion) {
      throw ValidationError("unsupported checkpoint schema_version " + std::to_string(version));
    }
    Checkpoint cp{AnoRandModel(config_from_json(j.at("config"))),
                  j.at("standardization").at("means").get<std::vector<double>>(),
                  j.at("standardization").at("stds").get<std::vector<double>>()};
    const auto& stored = j.at("layers");
    auto layers = cp.model.mutable_layers();
    if (stored.size() != layers.size()) {
      throw ValidationError("checkpoint has " + std::to_string(stored.size()) +
                            " layers, config implies " + std::to_string(layers.size()));
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const auto weight = stored[i].at("weight").get<std::vector<double>>();
      const auto bias = stored[i].at("bias").get<std::vector<double>>();
      if (stored[i].at("fan_in").get<std::size_t>() != layers[i]->fan_in() ||
          stored[i].at("fan_out").get<std::size_t>() != layers[i]->fan_out() ||
          weight.size() != layers[i]->weight().size() || bias.size() != layers[i]->bias().size()) {
        throw ValidationError("checkpoint layer " + std::to_string(i) +
                              " does not match the configured architecture");
      }
      std::copy(weight.begin(), weight.end(), layers[i]->weight_values().begin());
      std::copy(bias.begin(), bias.end(), layers[i]->bias_values().begin());
    }
    const std::size_t d = cp.model.config().input_dim;
    if (!cp.feature_means.empty() &&
        (cp.feature_means.size() != d || cp.feature_stds.size() != d)) {
      throw ValidationError("checkpoint standardization statistics do not match input_dim");
    }
    cp.model.set_alpha(j.at("alpha").get<double>());
    return cp;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint '" + path.string() + "'");
  out << checkpoint_to_json(checkpoint).dump(1) << '\n';
  if (!out) throw IoError("failed writing checkpoint '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("checkpoint '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace anorand
