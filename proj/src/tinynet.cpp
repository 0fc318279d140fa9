#include "socnav/tinynet.hpp"

#include <cmath>

#include "socnav/error.hpp"

namespace socnav {

Parameters Parameters::zeros_like(const std::vector<int>& layers) {
  Parameters p;
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    p.weights.emplace_back(static_cast<std::size_t>(layers[l]) * layers[l + 1], 0.0);
    p.biases.emplace_back(static_cast<std::size_t>(layers[l + 1]), 0.0);
  }
  return p;
}

bool Parameters::all_finite() const {
  for (const auto& w : weights)
    for (double v : w)
      if (!std::isfinite(v)) return false;
  for (const auto& b : biases)
    for (double v : b)
      if (!std::isfinite(v)) return false;
  return true;
}

void Parameters::add_scaled(const Parameters& other, double scale) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (std::size_t i = 0; i < weights[l].size(); ++i) weights[l][i] += scale * other.weights[l][i];
    for (std::size_t i = 0; i < biases[l].size(); ++i) biases[l][i] += scale * other.biases[l][i];
  }
}

std::size_t Parameters::size() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += w.size();
  for (const auto& b : biases) n += b.size();
  return n;
}

Mlp Mlp::zeros(std::vector<int> layers) {
  if (layers.size() < 2) throw Error(errc::dimension_mismatch, "layers", "need at least input and output layers");
  for (int n : layers)
    if (n <= 0) throw Error(errc::dimension_mismatch, "layers", "layer sizes must be positive");
  Mlp m;
  m.params = Parameters::zeros_like(layers);
  m.layers = std::move(layers);
  return m;
}

Mlp Mlp::random(std::vector<int> layers, Rng& rng) {
  Mlp m = zeros(std::move(layers));
  for (std::size_t l = 0; l + 1 < m.layers.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(m.layers[l]));
    for (double& w : m.params.weights[l]) w = rng.uniform(-bound, bound);
    for (double& b : m.params.biases[l]) b = rng.uniform(-bound, bound);
  }
  return m;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

namespace {

void check_input(const Mlp& mlp, std::span<const double> input) {
  if (input.size() != static_cast<std::size_t>(mlp.input_size())) {
    throw Error(errc::dimension_mismatch, "input",
                "expected " + std::to_string(mlp.input_size()) + " values, got " + std::to_string(input.size()));
  }
}

}  // namespace

ForwardCache forward_cached(const Mlp& mlp, std::span<const double> input) {
  check_input(mlp, input);
  ForwardCache cache;
  cache.activations.emplace_back(input.begin(), input.end());
  for (std::size_t l = 0; l + 1 < mlp.layers.size(); ++l) {
    const int in = mlp.layers[l];
    const int out = mlp.layers[l + 1];
    const auto& w = mlp.params.weights[l];
    const auto& b = mlp.params.biases[l];
    const auto& a = cache.activations.back();
    std::vector<double> z(static_cast<std::size_t>(out));
    std::vector<double> act(static_cast<std::size_t>(out));
    for (int o = 0; o < out; ++o) {
      double s = b[o];
      for (int i = 0; i < in; ++i) s += w[static_cast<std::size_t>(o) * in + i] * a[i];
      z[o] = s;
      act[o] = sigmoid(s);
    }
    cache.logits.push_back(std::move(z));
    cache.activations.push_back(std::move(act));
  }
  return cache;
}

std::vector<double> forward(const Mlp& mlp, std::span<const double> input) {
  return forward_cached(mlp, input).activations.back();
}

double forward_scalar(const Mlp& mlp, std::span<const double> input) {
  check_input(mlp, input);
  double buf_a[64];
  double buf_b[64];
  double* cur = buf_a;
  double* nxt = buf_b;
  const std::size_t n0 = input.size();
  if (n0 > 64) return forward(mlp, input).front();
  for (std::size_t i = 0; i < n0; ++i) cur[i] = input[i];
  for (std::size_t l = 0; l + 1 < mlp.layers.size(); ++l) {
    const int in = mlp.layers[l];
    const int out = mlp.layers[l + 1];
    if (out > 64) return forward(mlp, input).front();
    const auto& w = mlp.params.weights[l];
    const auto& b = mlp.params.biases[l];
    for (int o = 0; o < out; ++o) {
      double s = b[o];
      for (int i = 0; i < in; ++i) s += w[static_cast<std::size_t>(o) * in + i] * cur[i];
      nxt[o] = sigmoid(s);
    }
    std::swap(cur, nxt);
  }
  return cur[0];
}

BackwardResult backward_from_logits(const Mlp& mlp, const ForwardCache& cache, std::span<const double> grad_logits) {
  const std::size_t n_layers = mlp.layers.size() - 1;
  if (cache.logits.size() != n_layers || grad_logits.size() != static_cast<std::size_t>(mlp.output_size())) {
    throw Error(errc::dimension_mismatch, "backward", "cache or upstream gradient does not match the network");
  }
  BackwardResult res;
  res.params = Parameters::zeros_like(mlp.layers);
  std::vector<double> delta(grad_logits.begin(), grad_logits.end());
  for (std::size_t l = n_layers; l-- > 0;) {
    const int in = mlp.layers[l];
    const int out = mlp.layers[l + 1];
    const auto& a = cache.activations[l];
    const auto& w = mlp.params.weights[l];
    auto& gw = res.params.weights[l];
    auto& gb = res.params.biases[l];
    std::vector<double> grad_in(static_cast<std::size_t>(in), 0.0);
    for (int o = 0; o < out; ++o) {
      gb[o] = delta[o];
      for (int i = 0; i < in; ++i) {
        gw[static_cast<std::size_t>(o) * in + i] = delta[o] * a[i];
        grad_in[i] += w[static_cast<std::size_t>(o) * in + i] * delta[o];
      }
    }
    if (l == 0) {
      res.input = std::move(grad_in);
    } else {
      const auto& act = cache.activations[l];
      delta.assign(static_cast<std::size_t>(in), 0.0);
      for (int i = 0; i < in; ++i) delta[i] = grad_in[i] * act[i] * (1.0 - act[i]);
    }
  }
  return res;
}

BackwardResult backward(const Mlp& mlp, const ForwardCache& cache, std::span<const double> grad_output) {
  const auto& out = cache.activations.back();
  if (grad_output.size() != out.size()) throw Error(errc::dimension_mismatch, "grad_output", "size mismatch");
  std::vector<double> g(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) g[i] = grad_output[i] * out[i] * (1.0 - out[i]);
  return backward_from_logits(mlp, cache, g);
}

void sgd_step(Mlp& mlp, Parameters& velocity, const Parameters& gradients, double lr, double momentum) {
  if (!(lr >= 0.0) || !(momentum >= 0.0 && momentum < 1.0))
    throw Error(errc::invalid_config, "sgd", "lr must be >= 0 and momentum in [0, 1)");
  if (!gradients.all_finite()) throw Error(errc::invariant_violation, "gradients", "non-finite gradient");
  for (std::size_t l = 0; l < mlp.params.weights.size(); ++l) {
    auto& w = mlp.params.weights[l];
    auto& vw = velocity.weights[l];
    const auto& gw = gradients.weights[l];
    for (std::size_t i = 0; i < w.size(); ++i) {
      vw[i] = momentum * vw[i] + gw[i];
      w[i] -= lr * vw[i];
    }
    auto& b = mlp.params.biases[l];
    auto& vb = velocity.biases[l];
    const auto& gb = gradients.biases[l];
    for (std::size_t i = 0; i < b.size(); ++i) {
      vb[i] = momentum * vb[i] + gb[i];
      b[i] -= lr * vb[i];
    }
  }
  if (!mlp.params.all_finite()) throw Error(errc::invariant_violation, "parameters", "non-finite parameter after update");
}

GanPair GanPair::create(std::uint64_t seed) {
  Rng rng(seed);
  GanPair p;
  p.generator = Mlp::random({5, 10, 1}, rng);
  p.discriminator = Mlp::random({6, 10, 1}, rng);
  p.seed = seed;
  p.reset_momentum();
  return p;
}

GanPair GanPair::zeros() {
  GanPair p;
  p.generator = Mlp::zeros({5, 10, 1});
  p.discriminator = Mlp::zeros({6, 10, 1});
  p.reset_momentum();
  return p;
}

void GanPair::reset_momentum() {
  g_velocity = Parameters::zeros_like(generator.layers);
  d_velocity = Parameters::zeros_like(discriminator.layers);
}

double GanPair::cost(const FeatureVector& f) const { return forward_scalar(generator, f); }

double GanPair::score(const FeatureVector& f, double c) const {
  const std::array<double, 6> in{f[0], f[1], f[2], f[3], f[4], c};
  return forward_scalar(discriminator, in);
}

namespace {

std::array<double, 6> disc_input(const FeatureVector& f, double c) { return {f[0], f[1], f[2], f[3], f[4], c}; }

void check_pair(const GanPair& pair) {
  if (pair.generator.input_size() != static_cast<int>(kFeatureCount) || pair.generator.output_size() != 1)
    throw Error(errc::dimension_mismatch, "generator", "expected 5 inputs and 1 output");
  if (pair.discriminator.input_size() != static_cast<int>(kFeatureCount) + 1 || pair.discriminator.output_size() != 1)
    throw Error(errc::dimension_mismatch, "discriminator", "expected 6 inputs and 1 output");
}

}  // namespace

LossAndGrad d_loss_grad(const GanPair& pair, const FeatureBatch& real, const FeatureBatch& fake) {
  check_pair(pair);
  if (real.empty()) throw Error(errc::empty_batch, "real", "empty batch");
  if (fake.empty()) throw Error(errc::empty_batch, "fake", "empty batch");
  LossAndGrad out;
  out.grad = Parameters::zeros_like(pair.discriminator.layers);
  const double wr = 0.5 / static_cast<double>(real.size());
  const double wf = 0.5 / static_cast<double>(fake.size());
  for (const auto& f : real) {
    const auto cache = forward_cached(pair.discriminator, disc_input(f, pair.cost(f)));
    const double z = cache.logits.back()[0];
    out.loss += wr * softplus(-z);
    const double g = wr * (sigmoid(z) - 1.0);
    out.grad.add_scaled(backward_from_logits(pair.discriminator, cache, std::span<const double>(&g, 1)).params, 1.0);
  }
  for (const auto& f : fake) {
    const auto cache = forward_cached(pair.discriminator, disc_input(f, pair.cost(f)));
    const double z = cache.logits.back()[0];
    out.loss += wf * softplus(z);
    const double g = wf * sigmoid(z);
    out.grad.add_scaled(backward_from_logits(pair.discriminator, cache, std::span<const double>(&g, 1)).params, 1.0);
  }
  return out;
}

double d_loss(const GanPair& pair, const FeatureBatch& real, const FeatureBatch& fake) {
  check_pair(pair);
  if (real.empty()) throw Error(errc::empty_batch, "real", "empty batch");
  if (fake.empty()) throw Error(errc::empty_batch, "fake", "empty batch");
  double loss = 0.0;
  const double wr = 0.5 / static_cast<double>(real.size());
  const double wf = 0.5 / static_cast<double>(fake.size());
  for (const auto& f : real) loss += wr * softplus(-forward_cached(pair.discriminator, disc_input(f, pair.cost(f))).logits.back()[0]);
  for (const auto& f : fake) loss += wf * softplus(forward_cached(pair.discriminator, disc_input(f, pair.cost(f))).logits.back()[0]);
  return loss;
}

LossAndGrad g_loss_grad(const GanPair& pair, const FeatureBatch& fake, GeneratorLoss form) {
  check_pair(pair);
  if (fake.empty()) throw Error(errc::empty_batch, "fake", "empty batch");
  LossAndGrad out;
  out.grad = Parameters::zeros_like(pair.generator.layers);
  const double w = 1.0 / static_cast<double>(fake.size());
  for (const auto& f : fake) {
    const auto g_cache = forward_cached(pair.generator, f);
    const double c = g_cache.output()[0];
    const auto d_cache = forward_cached(pair.discriminator, disc_input(f, c));
    const double z = d_cache.logits.back()[0];
    double dz;
    if (form == GeneratorLoss::non_saturating) {
      out.loss += w * softplus(-z);
      dz = w * (sigmoid(z) - 1.0);
    } else {
      out.loss -= w * softplus(z);
      dz = -w * sigmoid(z);
    }
    const auto d_back = backward_from_logits(pair.discriminator, d_cache, std::span<const double>(&dz, 1));
    const double dc = d_back.input[kFeatureCount];
    out.grad.add_scaled(backward(pair.generator, g_cache, std::span<const double>(&dc, 1)).params, 1.0);
  }
  return out;
}

double g_loss(const GanPair& pair, const FeatureBatch& fake, GeneratorLoss form) {
  check_pair(pair);
  if (fake.empty()) throw Error(errc::empty_batch, "fake", "empty batch");
  double loss = 0.0;
  const double w = 1.0 / static_cast<double>(fake.size());
  for (const auto& f : fake) {
    const double z = forward_cached(pair.discriminator, disc_input(f, pair.cost(f))).logits.back()[0];
    loss += form == GeneratorLoss::non_saturating ? w * softplus(-z) : -w * softplus(z);
  }
  return loss;
}

}  // namespace socnav
