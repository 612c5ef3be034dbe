#include "anorand/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "anorand/errors.hpp"
#include "anorand/loss.hpp"
#include "anorand/rng.hpp"

namespace anorand {

std::string_view to_string(TrainingMode mode) {
  return mode == TrainingMode::kSupervised ? "supervised" : "semi_supervised";
}

TrainingMode training_mode_from_string(std::string_view name) {
  if (name == "semi_supervised" || name == "semi-supervised") return TrainingMode::kSemiSupervised;
  if (name == "supervised") return TrainingMode::kSupervised;
  throw ArgumentError("unknown training mode '" + std::string(name) + "'");
}

void ModelConfig::validate() const {
  auto positive = [](std::size_t v) { return v >= 1; };
  if (input_dim < 1) throw ArgumentError("model input_dim must be >= 1");
  if (ffp_hidden.empty() || !std::all_of(ffp_hidden.begin(), ffp_hidden.end(), positive)) {
    throw ArgumentError("ffp_hidden must be a non-empty list of sizes >= 1");
  }
  if (encoder_hidden.empty() ||
      !std::all_of(encoder_hidden.begin(), encoder_hidden.end(), positive)) {
    throw ArgumentError("encoder_hidden must be a non-empty list of sizes >= 1");
  }
  if (latent_dim < 1) throw ArgumentError("latent_dim must be >= 1");
  if (!(loss_weight >= 0.0 && loss_weight <= 1.0)) {
    throw ArgumentError("loss weight w must lie in [0, 1] (got " + std::to_string(loss_weight) + ")");
  }
  if (epochs < 1) throw ArgumentError("epochs must be >= 1");
  if (batch_size < 1) throw ArgumentError("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ArgumentError("learning_rate must be positive");
}

namespace {

struct LayerShape {
  std::size_t fan_in;
  std::size_t fan_out;
  Activation activation;
};

struct Architecture {
  std::vector<LayerShape> ffp, head, encoder, fusion, decoder;
};

Architecture architecture(const ModelConfig& c) {
  Architecture a;
  std::size_t prev = c.input_dim;
  for (std::size_t h : c.ffp_hidden) {
    a.ffp.push_back({prev, h, Activation::kRelu});
    prev = h;
  }
  const std::size_t z1 = prev;
  prev = c.input_dim;
  for (std::size_t h : c.encoder_hidden) {
    a.encoder.push_back({prev, h, Activation::kRelu});
    prev = h;
  }
  const std::size_t z0 = prev;
  a.fusion.push_back({z0 + z1, c.latent_dim, Activation::kRelu});
  const std::size_t head_in = c.mode == TrainingMode::kSupervised ? c.latent_dim : z1;
  a.head.push_back({head_in, 1, Activation::kSigmoid});
  // Decoder mirrors the encoder's hidden layers, minus the z0 layer.
  prev = c.latent_dim;
  for (auto it = c.encoder_hidden.rbegin() + 1; it != c.encoder_hidden.rend(); ++it) {
    a.decoder.push_back({prev, *it, Activation::kRelu});
    prev = *it;
  }
  a.decoder.push_back({prev, c.input_dim, Activation::kIdentity});
  return a;
}

std::vector<DenseLayer> build_stack(Rng& rng, const std::vector<LayerShape>& shapes) {
  std::vector<DenseLayer> out;
  out.reserve(shapes.size());
  for (const auto& s : shapes) out.push_back(init_layer(rng, s.fan_in, s.fan_out, s.activation));
  return out;
}

Matrix run_stack(const std::vector<DenseLayer>& stack, Matrix x) {
  for (const auto& layer : stack) x = layer.apply(x);
  return x;
}

Matrix run_stack_cached(std::vector<DenseLayer>& stack, Matrix x) {
  for (auto& layer : stack) x = layer.forward(x);
  return x;
}

// Backpropagates through a stack, storing parameter gradients per layer.
// Returns dL/d(stack input) unless the caller does not need it.
Matrix backprop_stack(const std::vector<DenseLayer>& stack, Matrix upstream,
                      std::vector<DenseGrads>& grads, bool need_input_grad) {
  grads.resize(stack.size());
  for (std::size_t i = stack.size(); i-- > 0;) {
    const bool want_input = i > 0 || need_input_grad;
    grads[i] = stack[i].backward(upstream, want_input);
    upstream = std::move(grads[i].input);
  }
  return upstream;
}

void append_grads(const std::vector<DenseGrads>& grads, std::vector<double>& flat) {
  for (const auto& g : grads) {
    flat.insert(flat.end(), g.weight.values().begin(), g.weight.values().end());
    flat.insert(flat.end(), g.bias.begin(), g.bias.end());
  }
}

}  // namespace

std::size_t parameter_count(const ModelConfig& config) {
  config.validate();
  const Architecture a = architecture(config);
  std::size_t total = 0;
  for (const auto* stack : {&a.ffp, &a.head, &a.encoder, &a.fusion, &a.decoder})
    for (const auto& s : *stack) total += s.fan_in * s.fan_out + s.fan_out;
  return total;
}

JointLoss joint_loss(std::span<const double> y_nd, std::span<const double> y_ae,
                     std::span<const double> targets, double w) {
  if (y_nd.size() != targets.size() || y_ae.size() != targets.size()) {
    throw DimensionError("joint_loss: y_nd " + std::to_string(y_nd.size()) + ", y_ae " +
                         std::to_string(y_ae.size()) + ", targets " +
                         std::to_string(targets.size()));
  }
  if (!(w >= 0.0 && w <= 1.0)) throw ArgumentError("joint_loss: w must lie in [0, 1]");
  JointLoss loss;
  loss.ce_nd = bce_loss(y_nd, targets);
  loss.ce_ae = bce_loss(y_ae, targets);
  loss.total = w * loss.ce_nd + (1.0 - w) * loss.ce_ae;
  return loss;
}

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw ArgumentError("quantile of an empty vector");
  if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError("quantile level must lie in [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double compute_alpha(std::span<const double> y_nd, std::span<const double> y_ae) {
  if (y_nd.empty() || y_ae.empty()) throw ArgumentError("compute_alpha: empty score vector");
  const double q_nd = quantile(y_nd, 0.75);
  const double q_ae = quantile(y_ae, 0.75);
  const double denom = q_ae + q_nd;
  if (denom == 0.0) return 0.5;
  return q_nd / denom;
}

ScoreReport fuse_scores(std::vector<double> y_nd, std::vector<double> y_ae, double alpha) {
  if (y_nd.size() != y_ae.size()) throw DimensionError("fuse_scores: score vectors differ in length");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must lie in [0, 1]");
  ScoreReport report;
  report.y_fused.resize(y_nd.size());
  for (std::size_t i = 0; i < y_nd.size(); ++i)
    report.y_fused[i] = (1.0 - alpha) * y_nd[i] + alpha * y_ae[i];
  report.y_nd = std::move(y_nd);
  report.y_ae = std::move(y_ae);
  report.alpha = alpha;
  return report;
}

AnoRandModel::AnoRandModel(ModelConfig config) : config_(std::move(config)) {
  config_.validate();
  const Architecture a = architecture(config_);
  Rng rng = Rng(config_.seed).split(Stream::kInit);
  ffp_ = build_stack(rng, a.ffp);
  head_ = build_stack(rng, a.head);
  encoder_ = build_stack(rng, a.encoder);
  fusion_ = build_stack(rng, a.fusion);
  decoder_ = build_stack(rng, a.decoder);
}

std::size_t AnoRandModel::parameter_count() const {
  std::size_t total = 0;
  for (const auto* layer : layers()) total += layer->parameter_count();
  return total;
}

std::vector<const DenseLayer*> AnoRandModel::layers() const {
  std::vector<const DenseLayer*> out;
  for (const auto* stack : {&ffp_, &head_, &encoder_, &fusion_, &decoder_})
    for (const auto& layer : *stack) out.push_back(&layer);
  return out;
}

std::vector<DenseLayer*> AnoRandModel::mutable_layers() {
  std::vector<DenseLayer*> out;
  for (auto* stack : {&ffp_, &head_, &encoder_, &fusion_, &decoder_})
    for (auto& layer : *stack) out.push_back(&layer);
  return out;
}

std::vector<ParameterBlock> AnoRandModel::parameter_blocks() const {
  std::vector<ParameterBlock> blocks;
  std::size_t offset = 0;
  const std::pair<const char*, const std::vector<DenseLayer>*> stacks[] = {
      {"ffp", &ffp_}, {"head", &head_}, {"encoder", &encoder_},
      {"fusion", &fusion_}, {"decoder", &decoder_}};
  for (const auto& [name, stack] : stacks) {
    std::size_t size = 0;
    for (const auto& layer : *stack) size += layer.parameter_count();
    blocks.push_back({name, offset, size});
    offset += size;
  }
  return blocks;
}

std::vector<double> AnoRandModel::flat_parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto* layer : layers()) {
    flat.insert(flat.end(), layer->weight().values().begin(), layer->weight().values().end());
    flat.insert(flat.end(), layer->bias().begin(), layer->bias().end());
  }
  return flat;
}

void AnoRandModel::set_flat_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) {
    throw DimensionError("set_flat_parameters: got " + std::to_string(values.size()) +
                         " values, model has " + std::to_string(parameter_count()));
  }
  std::size_t pos = 0;
  for (auto* layer : mutable_layers()) {
    for (auto dst : {layer->weight_values(), layer->bias_values()}) {
      std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(pos), dst.size(), dst.begin());
      pos += dst.size();
    }
  }
}

void AnoRandModel::set_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must lie in [0, 1]");
  alpha_ = alpha;
}

void AnoRandModel::check_input(const Matrix& batch) const {
  if (batch.cols() != config_.input_dim) {
    throw DimensionError("model expects " + std::to_string(config_.input_dim) +
                         " features, batch is " + batch.shape_string());
  }
}

ForwardResult AnoRandModel::forward(const Matrix& batch) const {
  check_input(batch);
  const Matrix z1 = run_stack(ffp_, batch);
  const Matrix z0 = run_stack(encoder_, batch);
  const Matrix latent = run_stack(fusion_, hconcat(z0, z1));
  const Matrix head_out =
      run_stack(head_, config_.mode == TrainingMode::kSupervised ? latent : z1);
  ForwardResult result;
  result.x_hat = run_stack(decoder_, latent);
  result.y_nd.assign(head_out.values().begin(), head_out.values().end());
  result.y_ae = row_mse(batch, result.x_hat);
  for (double& v : result.y_ae) v = sigmoid(v);
  return result;
}

AnoRandModel::Pass AnoRandModel::forward_cached(const Matrix& batch) {
  check_input(batch);
  Pass pass;
  pass.input = batch;
  pass.z1 = run_stack_cached(ffp_, batch);
  const Matrix z0 = run_stack_cached(encoder_, batch);
  const Matrix latent = run_stack_cached(fusion_, hconcat(z0, pass.z1));
  pass.head_out =
      run_stack_cached(head_, config_.mode == TrainingMode::kSupervised ? latent : pass.z1);
  pass.x_hat = run_stack_cached(decoder_, latent);
  pass.y_ae = row_mse(batch, pass.x_hat);
  for (double& v : pass.y_ae) v = sigmoid(v);
  return pass;
}

LossGradient AnoRandModel::backward(const Pass& pass, std::span<const double> targets,
                                    bool want_gradient) {
  const std::size_t n = pass.input.rows();
  const std::size_t d = pass.input.cols();
  if (targets.size() != n) {
    throw DimensionError("targets length " + std::to_string(targets.size()) + " vs batch rows " +
                         std::to_string(n));
  }
  const double w = config_.loss_weight;
  const bool supervised = config_.mode == TrainingMode::kSupervised;
  const auto p = pass.head_out.values();
  const double inv_n = 1.0 / static_cast<double>(n);

  LossGradient out;
  if (supervised) {
    out.loss.ce_nd = bce_loss(p, targets);
    out.loss.ce_ae = mae_loss(pass.input, pass.x_hat);
    out.loss.total = (1.0 - w) * out.loss.ce_nd + w * out.loss.ce_ae;
  } else {
    out.loss = joint_loss(p, pass.y_ae, targets, w);
  }
  if (!want_gradient) return out;

  // Head: sigmoid + BCE gives dL/dlogit = (p − t) / n, scaled by the term weight.
  const double head_weight = supervised ? 1.0 - w : w;
  Matrix g_logit(n, 1);
  for (std::size_t i = 0; i < n; ++i) g_logit(i, 0) = head_weight * (p[i] - targets[i]) * inv_n;
  std::vector<DenseGrads> head_grads(1);
  head_grads[0] = head_.front().backward_preactivation(g_logit);

  // Reconstruction term gradient w.r.t. x̂.
  Matrix g_xhat(n, d);
  if (supervised) {
    const double scale = w / static_cast<double>(n * d);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = pass.x_hat(i, j) - pass.input(i, j);
        g_xhat(i, j) = diff > 0.0 ? scale : (diff < 0.0 ? -scale : 0.0);
      }
  } else {
    // y_ae = σ(m), m = mean_j (x − x̂)²; dBCE/dm = (y_ae − t) / n.
    for (std::size_t i = 0; i < n; ++i) {
      const double g_m = (1.0 - w) * (pass.y_ae[i] - targets[i]) * inv_n;
      const double coeff = -2.0 * g_m / static_cast<double>(d);
      for (std::size_t j = 0; j < d; ++j)
        g_xhat(i, j) = coeff * (pass.input(i, j) - pass.x_hat(i, j));
    }
  }

  std::vector<DenseGrads> decoder_grads, fusion_grads, encoder_grads, ffp_grads;
  Matrix g_latent = backprop_stack(decoder_, std::move(g_xhat), decoder_grads, true);
  Matrix g_z1;
  if (supervised) {
    const auto head_in = head_grads[0].input.values();
    auto dst = g_latent.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += head_in[i];
  } else {
    g_z1 = std::move(head_grads[0].input);
  }
  const Matrix g_concat = backprop_stack(fusion_, std::move(g_latent), fusion_grads, true);
  const std::size_t z0_dim = encoder_.back().fan_out();
  const std::size_t z1_dim = ffp_.back().fan_out();
  backprop_stack(encoder_, g_concat.slice_cols(0, z0_dim), encoder_grads, false);
  Matrix g_z1_concat = g_concat.slice_cols(z0_dim, z1_dim);
  if (!supervised) {
    auto dst = g_z1_concat.values();
    const auto src = g_z1.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
  backprop_stack(ffp_, std::move(g_z1_concat), ffp_grads, false);

  out.gradient.reserve(parameter_count());
  append_grads(ffp_grads, out.gradient);
  append_grads(head_grads, out.gradient);
  append_grads(encoder_grads, out.gradient);
  append_grads(fusion_grads, out.gradient);
  append_grads(decoder_grads, out.gradient);
  return out;
}

LossGradient AnoRandModel::loss_and_gradient(const Matrix& batch, std::span<const double> targets) {
  const Pass pass = forward_cached(batch);
  return backward(pass, targets, true);
}

std::vector<EpochLoss> AnoRandModel::train(const Matrix& features,
                                           const std::vector<double>& targets) {
  check_input(features);
  if (features.rows() == 0) throw ArgumentError("cannot fit on an empty training set");
  if (targets.size() != features.rows()) throw DimensionError("training targets/rows mismatch");

  optimizer_.clear();
  const AdamHyperparams hyper{config_.learning_rate};
  for (const auto* layer : layers()) {
    optimizer_.emplace_back(layer->weight().size(), hyper);
    optimizer_.emplace_back(layer->bias().size(), hyper);
  }

  Rng shuffle_rng = Rng(config_.seed).split(Stream::kShuffle);
  const std::size_t n = features.rows();
  std::vector<EpochLoss> history;
  history.reserve(config_.epochs);
  std::vector<double> batch_targets;
  for (std::size_t epoch = 0; epoch < config_.epochs; ++epoch) {
    const std::vector<std::size_t> order = shuffle_rng.permutation(n);
    EpochLoss sum;
    for (std::size_t start = 0; start < n; start += config_.batch_size) {
      const std::size_t stop = std::min(n, start + config_.batch_size);
      const std::span<const std::size_t> idx(order.data() + start, stop - start);
      const Matrix batch = features.select_rows(idx);
      batch_targets.clear();
      for (std::size_t i : idx) batch_targets.push_back(targets[i]);

      const LossGradient lg = loss_and_gradient(batch, batch_targets);
      const double weight = static_cast<double>(idx.size());
      sum.total += weight * lg.loss.total;
      sum.prediction += weight * lg.loss.ce_nd;
      sum.reconstruction += weight * lg.loss.ce_ae;

      std::size_t pos = 0;
      std::size_t slot = 0;
      for (auto* layer : mutable_layers()) {
        for (auto params : {layer->weight_values(), layer->bias_values()}) {
          adam_step(optimizer_[slot++], params,
                    std::span<const double>(lg.gradient).subspan(pos, params.size()));
          pos += params.size();
        }
      }
    }
    const double inv = 1.0 / static_cast<double>(n);
    history.push_back({sum.total * inv, sum.prediction * inv, sum.reconstruction * inv});
  }
  return history;
}

std::vector<EpochLoss> AnoRandModel::fit(const LabeledTrainingSet& training_set) {
  if (config_.mode != TrainingMode::kSemiSupervised) {
    throw StateError("fit() needs a semi_supervised model; use fit_supervised()");
  }
  if (training_set.rows() == 0) throw ArgumentError("cannot fit on an empty training set");
  auto history = train(training_set.features, training_set.targets());
  const ForwardResult scores = forward(training_set.features);
  alpha_ = compute_alpha(scores.y_nd, scores.y_ae);
  return history;
}

std::vector<EpochLoss> AnoRandModel::fit_supervised(const Dataset& dataset) {
  if (config_.mode != TrainingMode::kSupervised) {
    throw StateError("fit_supervised() needs a supervised model");
  }
  if (!dataset.labels) throw ValidationError("supervised training requires labels");
  if (dataset.rows() == 0) throw ArgumentError("cannot fit on an empty training set");
  const std::vector<double> targets(dataset.labels->begin(), dataset.labels->end());
  auto history = train(dataset.features, targets);
  alpha_ = 0.0;
  return history;
}

ScoreReport AnoRandModel::score(const Matrix& data) const { return score(data, alpha_); }

ScoreReport AnoRandModel::score(const Matrix& data, double alpha) const {
  ForwardResult f = forward(data);
  if (config_.mode == TrainingMode::kSupervised) alpha = 0.0;
  return fuse_scores(std::move(f.y_nd), std::move(f.y_ae), alpha);
}

}  // namespace anorand
