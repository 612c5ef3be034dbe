#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "anorand/matrix.hpp"
#include "anorand/model.hpp"
#include "anorand/rng.hpp"

namespace anorand::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("anorand_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void spit(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double lo = -1.0,
                            double hi = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.uniform(lo, hi);
  return m;
}

// |a − b| / max(|a|, |b|, floor). The floor keeps near-zero gradients from
// turning roundoff into large relative errors.
inline double relative_error(double a, double b, double floor = 1e-5) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// Largest relative error between the analytic gradient of `model` and
// central differences of its training loss over every parameter.
// Moves parameters off ReLU kinks before finite differencing.
inline void jitter_parameters(AnoRandModel& model, Rng& rng, double scale = 0.1) {
  std::vector<double> p = model.flat_parameters();
  for (double& v : p) v += rng.uniform(-scale, scale);
  model.set_flat_parameters(p);
}

inline double model_gradient_error(AnoRandModel& model, const Matrix& batch,
                                   const std::vector<double>& targets, double h = 1e-6) {
  const std::vector<double> params = model.flat_parameters();
  const std::vector<double> analytic = model.loss_and_gradient(batch, targets).gradient;
  double worst = 0.0;
  std::vector<double> probe = params;
  for (std::size_t i = 0; i < params.size(); ++i) {
    probe[i] = params[i] + h;
    model.set_flat_parameters(probe);
    const double up = model.loss_and_gradient(batch, targets).loss.total;
    probe[i] = params[i] - h;
    model.set_flat_parameters(probe);
    const double down = model.loss_and_gradient(batch, targets).loss.total;
    probe[i] = params[i];
    worst = std::max(worst, relative_error(analytic[i], (up - down) / (2.0 * h)));
  }
  model.set_flat_parameters(params);
  return worst;
}

// Tiny configuration used by the end-to-end gradient checks.
inline ModelConfig tiny_config(TrainingMode mode, double w, std::uint64_t seed) {
  ModelConfig c;
  c.input_dim = 3;
  c.ffp_hidden = {4, 2};
  c.encoder_hidden = {4, 2};
  c.latent_dim = 2;
  c.loss_weight = w;
  c.mode = mode;
  c.seed = seed;
  return c;
}

}  // namespace anorand::testing
