#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "socnav/features.hpp"
#include "socnav/rng.hpp"

namespace socnav {

// Trainable tensors of a dense network. weights[l] is row-major with shape
// (layers[l+1], layers[l]). Also used for gradients and momentum buffers.
struct Parameters {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  static Parameters zeros_like(const std::vector<int>& layers);
  bool all_finite() const;
  void add_scaled(const Parameters& other, double scale);
  std::size_t size() const;

  friend bool operator==(const Parameters&, const Parameters&) = default;
};

// Fully connected network, sigmoid on every layer including the output.
struct Mlp {
  std::vector<int> layers;
  Parameters params;

  static Mlp zeros(std::vector<int> layers);
  // Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  static Mlp random(std::vector<int> layers, Rng& rng);

  int input_size() const { return layers.front(); }
  int output_size() const { return layers.back(); }
  std::size_t parameter_count() const { return params.size(); }

  friend bool operator==(const Mlp&, const Mlp&) = default;
};

double sigmoid(double z);
// log(1 + exp(z)) without overflow.
double softplus(double z);

struct ForwardCache {
  std::vector<std::vector<double>> activations;  // activations[0] is the input
  std::vector<std::vector<double>> logits;       // pre-activation per layer
  const std::vector<double>& output() const { return activations.back(); }
};

ForwardCache forward_cached(const Mlp& mlp, std::span<const double> input);
std::vector<double> forward(const Mlp& mlp, std::span<const double> input);
// Scalar-output shortcut for the generator/discriminator hot path.
double forward_scalar(const Mlp& mlp, std::span<const double> input);

struct BackwardResult {
  Parameters params;
  std::vector<double> input;
};

// Gradient w.r.t. the output activations.
BackwardResult backward(const Mlp& mlp, const ForwardCache& cache, std::span<const double> grad_output);
// Gradient w.r.t. the output logits; avoids the a(1-a) factor for stable losses.
BackwardResult backward_from_logits(const Mlp& mlp, const ForwardCache& cache, std::span<const double> grad_logits);

// Classical momentum: v <- momentum * v + g ; w <- w - lr * v.
void sgd_step(Mlp& mlp, Parameters& velocity, const Parameters& gradients, double lr, double momentum);

struct GanPair {
  Mlp generator;      // [5, 10, 1]: features -> node cost
  Mlp discriminator;  // [6, 10, 1]: (features, cost) -> P(demonstration)
  Parameters g_velocity;
  Parameters d_velocity;
  std::uint64_t seed = 0;

  static GanPair create(std::uint64_t seed);
  // Zero-weight pair: G == D == 0.5 everywhere.
  static GanPair zeros();

  double cost(const FeatureVector& f) const;
  double score(const FeatureVector& f, double cost) const;
  void reset_momentum();
};

using FeatureBatch = std::vector<FeatureVector>;

struct LossAndGrad {
  double loss = 0.0;
  Parameters grad;
};

// Discriminator binary cross-entropy: 0.5 * (mean over real of -log D +
// mean over fake of -log(1 - D)). G is held constant.
double d_loss(const GanPair& pair, const FeatureBatch& real, const FeatureBatch& fake);
LossAndGrad d_loss_grad(const GanPair& pair, const FeatureBatch& real, const FeatureBatch& fake);

enum class GeneratorLoss { non_saturating, literal };

// non_saturating: mean -log D(f, G(f)); literal: mean log(1 - D(f, G(f))).
// Gradient reaches G only through the discriminator's cost input.
double g_loss(const GanPair& pair, const FeatureBatch& fake, GeneratorLoss form = GeneratorLoss::non_saturating);
LossAndGrad g_loss_grad(const GanPair& pair, const FeatureBatch& fake,
                        GeneratorLoss form = GeneratorLoss::non_saturating);

}  // namespace socnav
