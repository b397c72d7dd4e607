#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hcasim/rng.hpp"
#include "hcasim/rrhlearn.hpp"

namespace hcasim {

Mlp mlp_init(const std::vector<int>& layer_sizes, std::uint64_t seed) {
  if (layer_sizes.size() < 2)
    throw std::invalid_argument("need at least input and output layer");
  for (int s : layer_sizes)
    if (s < 1) throw std::invalid_argument("layer sizes must be >= 1");

  Mlp net;
  net.layer_sizes = layer_sizes;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int fan_in = layer_sizes[l];
    const int fan_out = layer_sizes[l + 1];
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    std::vector<double> w(static_cast<std::size_t>(fan_in) * fan_out);
    for (double& v : w) v = rng.uniform(-bound, bound);
    net.weights.push_back(std::move(w));
    net.biases.emplace_back(static_cast<std::size_t>(fan_out), 0.0);
  }
  return net;
}

namespace {

// Workspace for one batch pass; activations/deltas are [batch][units].
struct BatchWork {
  std::vector<std::vector<double>> acts;    // acts[0] is the input copy
  std::vector<std::vector<double>> deltas;  // per non-input layer

  void resize(const Mlp& net, std::size_t batch) {
    const std::size_t layers = net.layer_sizes.size();
    acts.assign(layers, {});
    deltas.assign(layers - 1, {});
    for (std::size_t l = 0; l < layers; ++l)
      acts[l].assign(batch * static_cast<std::size_t>(net.layer_sizes[l]), 0.0);
    for (std::size_t l = 0; l + 1 < layers; ++l)
      deltas[l].assign(batch * static_cast<std::size_t>(net.layer_sizes[l + 1]),
                       0.0);
  }
};

void softmax_inplace(double* z, std::size_t n) {
  double max_z = z[0];
  for (std::size_t i = 1; i < n; ++i) max_z = std::max(max_z, z[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = std::exp(z[i] - max_z);
    sum += z[i];
  }
  for (std::size_t i = 0; i < n; ++i) z[i] /= sum;
}

// Forward over one batch stored in work.acts[0]; rectifier on hidden layers,
// softmax on the output layer. Weight layout is input-major
// (w[i * n_out + o]) so the inner loops are contiguous accumulations rather
// than reductions, and zero activations skip whole rows.
void forward_batch(const Mlp& net, std::size_t batch, BatchWork& work) {
  const std::size_t layers = net.layer_sizes.size();
  for (std::size_t l = 0; l + 1 < layers; ++l) {
    const std::size_t n_in = static_cast<std::size_t>(net.layer_sizes[l]);
    const std::size_t n_out = static_cast<std::size_t>(net.layer_sizes[l + 1]);
    const double* w = net.weights[l].data();
    const double* bias = net.biases[l].data();
    const bool is_output = (l + 2 == layers);
    for (std::size_t b = 0; b < batch; ++b) {
      const double* in = work.acts[l].data() + b * n_in;
      double* out = work.acts[l + 1].data() + b * n_out;
      std::copy(bias, bias + n_out, out);
      for (std::size_t i = 0; i < n_in; ++i) {
        const double v = in[i];
        if (v == 0.0) continue;
        const double* wrow = w + i * n_out;
        for (std::size_t o = 0; o < n_out; ++o) out[o] += v * wrow[o];
      }
      if (is_output) {
        softmax_inplace(out, n_out);
      } else {
        for (std::size_t o = 0; o < n_out; ++o)
          if (out[o] < 0.0) out[o] = 0.0;
      }
    }
  }
}

// Backward pass; expects forward_batch to have run. Gradients are mean over
// the batch (same layout as the weights). Returns mean cross-entropy loss.
double backward_batch(const Mlp& net, std::size_t batch,
                      std::span<const int> y, BatchWork& work,
                      std::vector<std::vector<double>>& grad_w,
                      std::vector<std::vector<double>>& grad_b) {
  const std::size_t layers = net.layer_sizes.size();
  const std::size_t n_classes = static_cast<std::size_t>(net.layer_sizes.back());
  const double inv_batch = 1.0 / static_cast<double>(batch);

  double loss = 0.0;
  {
    std::vector<double>& delta = work.deltas[layers - 2];
    const std::vector<double>& probs = work.acts[layers - 1];
    for (std::size_t b = 0; b < batch; ++b) {
      const double* p = probs.data() + b * n_classes;
      double* d = delta.data() + b * n_classes;
      loss -= std::log(p[static_cast<std::size_t>(y[b])]);
      for (std::size_t c = 0; c < n_classes; ++c) d[c] = p[c] * inv_batch;
      d[static_cast<std::size_t>(y[b])] -= inv_batch;
    }
    loss *= inv_batch;
  }

  for (std::size_t l = layers - 1; l-- > 0;) {
    const std::size_t n_in = static_cast<std::size_t>(net.layer_sizes[l]);
    const std::size_t n_out = static_cast<std::size_t>(net.layer_sizes[l + 1]);
    const std::vector<double>& delta = work.deltas[l];

    std::fill(grad_w[l].begin(), grad_w[l].end(), 0.0);
    std::fill(grad_b[l].begin(), grad_b[l].end(), 0.0);
    for (std::size_t b = 0; b < batch; ++b) {
      const double* in = work.acts[l].data() + b * n_in;
      const double* d = delta.data() + b * n_out;
      double* gb = grad_b[l].data();
      for (std::size_t o = 0; o < n_out; ++o) gb[o] += d[o];
      for (std::size_t i = 0; i < n_in; ++i) {
        const double v = in[i];
        if (v == 0.0) continue;
        double* gw = grad_w[l].data() + i * n_out;
        for (std::size_t o = 0; o < n_out; ++o) gw[o] += v * d[o];
      }
    }

    if (l == 0) break;
    // delta_prev[b][i] = relu'(act[b][i]) * sum_o delta[b][o] * w[i][o];
    // clipped units skip the dot product entirely.
    std::vector<double>& delta_prev = work.deltas[l - 1];
    const double* w = net.weights[l].data();
    for (std::size_t b = 0; b < batch; ++b) {
      const double* d = delta.data() + b * n_out;
      const double* act = work.acts[l].data() + b * n_in;
      double* dp = delta_prev.data() + b * n_in;
      for (std::size_t i = 0; i < n_in; ++i) {
        if (act[i] <= 0.0) {
          dp[i] = 0.0;
          continue;
        }
        const double* wrow = w + i * n_out;
        double acc = 0.0;
        for (std::size_t o = 0; o < n_out; ++o) acc += wrow[o] * d[o];
        dp[i] = acc;
      }
    }
  }
  return loss;
}

}  // namespace

std::vector<double> mlp_forward(const Mlp& net, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(net.input_size()))
    throw std::invalid_argument("input dimension mismatch");
  BatchWork work;
  work.resize(net, 1);
  std::copy(x.begin(), x.end(), work.acts[0].begin());
  forward_batch(net, 1, work);
  return work.acts.back();
}

double mlp_loss_and_grad(const Mlp& net, const FeatureMatrix& x,
                         std::span<const int> y,
                         std::vector<std::vector<double>>* grad_w,
                         std::vector<std::vector<double>>* grad_b) {
  if (x.rows != y.size()) throw std::invalid_argument("x/y size mismatch");
  if (x.cols != static_cast<std::size_t>(net.input_size()))
    throw std::invalid_argument("input dimension mismatch");

  BatchWork work;
  work.resize(net, x.rows);
  std::copy(x.data.begin(), x.data.end(), work.acts[0].begin());
  forward_batch(net, x.rows, work);

  std::vector<std::vector<double>> local_w, local_b;
  auto& gw = grad_w ? *grad_w : local_w;
  auto& gb = grad_b ? *grad_b : local_b;
  gw.assign(net.weights.size(), {});
  gb.assign(net.biases.size(), {});
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    gw[l].assign(net.weights[l].size(), 0.0);
    gb[l].assign(net.biases[l].size(), 0.0);
  }
  return backward_batch(net, x.rows, y, work, gw, gb);
}

MlpTrainResult mlp_train(Mlp& net, const FeatureMatrix& x,
                         std::span<const int> y, const MlpTrainOptions& opt) {
  if (x.rows == 0) throw std::invalid_argument("empty training set");
  if (x.rows != y.size()) throw std::invalid_argument("x/y size mismatch");
  if (x.cols != static_cast<std::size_t>(net.input_size()))
    throw std::invalid_argument("input dimension mismatch");
  if (opt.batch_size < 1 || opt.epochs < 0)
    throw std::invalid_argument("bad training options");
  const int n_classes = net.output_size();
  for (int label : y)
    if (label < 0 || label >= n_classes)
      throw std::invalid_argument("label out of range");

  const std::size_t n = x.rows;
  const std::size_t batch_size = static_cast<std::size_t>(opt.batch_size);
  Rng rng(opt.seed);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  std::vector<std::vector<double>> grad_w(net.weights.size()),
      grad_b(net.biases.size());
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    grad_w[l].assign(net.weights[l].size(), 0.0);
    grad_b[l].assign(net.biases[l].size(), 0.0);
  }
  BatchWork work;
  work.resize(net, batch_size);
  std::vector<int> batch_y(batch_size);

  MlpTrainResult result;
  result.epoch_loss.reserve(static_cast<std::size_t>(opt.epochs));

  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    // Fisher-Yates with the run's own stream keeps the shuffle reproducible.
    for (std::size_t i = n - 1; i > 0; --i) {
      const std::size_t j =
          static_cast<std::size_t>(rng.uniform_int(static_cast<int>(i + 1)));
      std::swap(order[i], order[j]);
    }

    double loss_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t b = std::min(batch_size, n - start);
      for (std::size_t k = 0; k < b; ++k) {
        const std::size_t src = order[start + k];
        std::copy_n(x.data.data() + src * x.cols, x.cols,
                    work.acts[0].data() + k * x.cols);
        batch_y[k] = y[src];
      }
      forward_batch(net, b, work);
      const double loss =
          backward_batch(net, b, std::span<const int>(batch_y.data(), b), work,
                         grad_w, grad_b);
      loss_sum += loss * static_cast<double>(b);
      seen += b;

      for (std::size_t l = 0; l < net.weights.size(); ++l) {
        double* w = net.weights[l].data();
        const double* gw = grad_w[l].data();
        for (std::size_t i = 0; i < net.weights[l].size(); ++i)
          w[i] -= opt.learning_rate * gw[i];
        double* bias = net.biases[l].data();
        const double* gb = grad_b[l].data();
        for (std::size_t i = 0; i < net.biases[l].size(); ++i)
          bias[i] -= opt.learning_rate * gb[i];
      }
    }
    const double epoch_loss = loss_sum / static_cast<double>(seen);
    if (!std::isfinite(epoch_loss))
      throw std::runtime_error(
          "training diverged: loss is not finite at epoch " +
          std::to_string(epoch));
    result.epoch_loss.push_back(epoch_loss);
  }
  return result;
}

}  // namespace hcasim
