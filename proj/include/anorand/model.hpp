#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "anorand/adam.hpp"
#include "anorand/data.hpp"
#include "anorand/dense.hpp"
#include "anorand/labelgen.hpp"
#include "anorand/matrix.hpp"

namespace anorand {

enum class TrainingMode { kSemiSupervised, kSupervised };

std::string_view to_string(TrainingMode mode);
TrainingMode training_mode_from_string(std::string_view name);

struct ModelConfig {
  std::size_t input_dim = 0;
  std::vector<std::size_t> ffp_hidden{32, 16};
  std::vector<std::size_t> encoder_hidden{32, 16};
  std::size_t latent_dim = 16;
  // Weight of the noise-detection cross-entropy in the joint loss.
  double loss_weight = 0.2;
  std::size_t epochs = 200;
  std::size_t batch_size = 128;
  double learning_rate = 1e-4;
  TrainingMode mode = TrainingMode::kSemiSupervised;
  std::uint64_t seed = 0;

  void validate() const;
};

std::size_t parameter_count(const ModelConfig& config);

struct ForwardResult {
  std::vector<double> y_nd;  // noise-detection (or supervised head) probability
  Matrix x_hat;              // reconstruction
  std::vector<double> y_ae;  // sigmoid of per-row reconstruction MSE
};

struct JointLoss {
  double total = 0.0;
  double ce_nd = 0.0;
  double ce_ae = 0.0;
};

// total = w · BCE(y_nd, t) + (1 − w) · BCE(y_ae, t)
JointLoss joint_loss(std::span<const double> y_nd, std::span<const double> y_ae,
                     std::span<const double> targets, double w);

// Per-epoch training record. For supervised training `prediction` is the
// head BCE and `reconstruction` the MAE term; otherwise they are the ND and
// AE cross-entropies.
struct EpochLoss {
  double total = 0.0;
  double prediction = 0.0;
  double reconstruction = 0.0;
};

struct ScoreReport {
  std::vector<double> y_nd;
  std::vector<double> y_ae;
  std::vector<double> y_fused;
  double alpha = 0.5;
};

// Quantile with linear interpolation between order statistics.
double quantile(std::span<const double> values, double q);

// alpha = Q3(y_nd) / (Q3(y_ae) + Q3(y_nd)); 0.5 when both quantiles are zero.
double compute_alpha(std::span<const double> y_nd, std::span<const double> y_ae);

// y_fused = (1 − alpha) · y_nd + alpha · y_ae
ScoreReport fuse_scores(std::vector<double> y_nd, std::vector<double> y_ae, double alpha);

// Contiguous range of the flat parameter vector owned by one block.
struct ParameterBlock {
  std::string name;  // ffp, head, encoder, fusion, decoder
  std::size_t offset;
  std::size_t size;
};

struct LossGradient {
  JointLoss loss;
  std::vector<double> gradient;  // same layout as flat_parameters()
};

// Noise-detection block (FFP) plus autoencoder whose latent layer consumes
// the concatenation of the encoder output z0 and the FFP output z1.
//
//   ffp:     x → ... → z1 ─┬→ head → y_nd
//   encoder: x → ... → z0  │
//   fusion:  concat(z0, z1) → latent → decoder → x̂,  y_ae = σ(mse(x, x̂))
//
// In supervised mode the head reads the fused latent instead of z1.
class AnoRandModel {
 public:
  explicit AnoRandModel(ModelConfig config);

  const ModelConfig& config() const noexcept { return config_; }
  std::size_t parameter_count() const;

  // Inference pass; does not touch training caches.
  ForwardResult forward(const Matrix& batch) const;

  // Mini-batch Adam on the joint loss. Freezes alpha from the training-set
  // scores afterwards. Returns one entry per epoch.
  std::vector<EpochLoss> fit(const LabeledTrainingSet& training_set);
  // Supervised variant: loss = (1 − w) · BCE(head, labels) + w · MAE(x, x̂).
  std::vector<EpochLoss> fit_supervised(const Dataset& dataset);

  double alpha() const noexcept { return alpha_; }
  void set_alpha(double alpha);

  // Fused scores with the frozen alpha (supervised: the head output).
  ScoreReport score(const Matrix& data) const;
  ScoreReport score(const Matrix& data, double alpha) const;

  // Loss and gradient of the mode's training objective on one batch.
  LossGradient loss_and_gradient(const Matrix& batch, std::span<const double> targets);

  std::vector<double> flat_parameters() const;
  void set_flat_parameters(std::span<const double> values);
  std::vector<ParameterBlock> parameter_blocks() const;

  // Layer access for serialisation, in flat-parameter order.
  std::vector<const DenseLayer*> layers() const;
  std::vector<DenseLayer*> mutable_layers();

 private:
  struct Pass {
    Matrix input;
    Matrix z1;
    Matrix head_out;
    Matrix x_hat;
    std::vector<double> y_ae;
  };

  Pass forward_cached(const Matrix& batch);
  LossGradient backward(const Pass& pass, std::span<const double> targets, bool want_gradient);
  std::vector<EpochLoss> train(const Matrix& features, const std::vector<double>& targets);
  void check_input(const Matrix& batch) const;

  ModelConfig config_;
  std::vector<DenseLayer> ffp_;
  std::vector<DenseLayer> head_;  // single layer
  std::vector<DenseLayer> encoder_;
  std::vector<DenseLayer> fusion_;  // single layer
  std::vector<DenseLayer> decoder_;
  std::vector<AdamState> optimizer_;
  double alpha_ = 0.5;
};

}  // namespace anorand
