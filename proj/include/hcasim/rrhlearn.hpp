#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hcasim/radio.hpp"
#include "hcasim/rng.hpp"

namespace hcasim {

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

struct Dataset {
  std::vector<ChannelSample> samples;
  double train_fraction = 0.8;
  std::uint64_t split_seed = 0;

  // Shuffled index split; train and test are disjoint and cover all samples.
  std::vector<std::size_t> train_indices() const;
  std::vector<std::size_t> test_indices() const;
};

// n_samples users dropped uniformly in the scene disc (respecting the 1 m
// separation rule), one ChannelSample each.
Dataset gen_dataset(const ScattererScene& scene, double carrier_wavelength_m,
                    int n_samples, std::uint64_t seed,
                    double train_fraction = 0.8);

// ---------------------------------------------------------------------------
// Feature pipeline
// ---------------------------------------------------------------------------

// Magnitude of the unitary DFT (1/sqrt(M) normalization).
std::vector<double> dft_magnitude(std::span<const std::complex<double>> h);

// Elementwise ln(max(v, floor)); floor > 0.
std::vector<double> log_compress(std::span<const double> v, double floor);

struct LloydCodebook {
  std::vector<double> centroids;   // strictly increasing
  std::vector<double> boundaries;  // midpoints, size = centroids.size() - 1
};

// Scalar Lloyd-Max quantizer training: alternate conditional-mean centroid
// updates and midpoint boundary updates until the mean squared distortion
// improves by less than tol or max_iters is reached. An empty cell is
// re-seeded at the sample farthest from its assigned centroid.
// distortion_trace, when given, receives the distortion after each iteration.
LloydCodebook lloyd_train(std::span<const double> samples, int levels,
                          int max_iters = 100, double tol = 1e-9,
                          std::vector<double>* distortion_trace = nullptr);

// Nearest centroid; exact midpoint ties resolve to the lower centroid.
double quantize_value(const LloydCodebook& cb, double v);
std::vector<double> quantize(const LloydCodebook& cb, std::span<const double> v);

// ---------------------------------------------------------------------------
// Multilayer perceptron (rectifier hidden units, softmax output)
// ---------------------------------------------------------------------------

struct Mlp {
  std::vector<int> layer_sizes;  // e.g. {80, 128, 64, 5}
  // weights[l] is input-major: weights[l][i * n_out + o] connects input i of
  // layer l to unit o of layer l+1.
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;  // [layer][out]

  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
};

// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
Mlp mlp_init(const std::vector<int>& layer_sizes, std::uint64_t seed);

// Class probabilities; sums to 1.
std::vector<double> mlp_forward(const Mlp& net, std::span<const double> x);

struct MlpTrainOptions {
  double learning_rate = 0.01;
  int batch_size = 32;
  int epochs = 100;
  std::uint64_t seed = 0;
};

struct MlpTrainResult {
  std::vector<double> epoch_loss;  // mean cross-entropy per epoch
};

// Row-major sample matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }
  double* row_ptr(std::size_t r) { return data.data() + r * cols; }
};

// Minibatch SGD on cross-entropy, deterministic shuffle per seed. Throws on
// loss divergence (NaN).
MlpTrainResult mlp_train(Mlp& net, const FeatureMatrix& x,
                         std::span<const int> y, const MlpTrainOptions& opt);

// Mean cross-entropy loss and gradients for a batch; exposed so tests can
// check the analytic gradient against finite differences.
double mlp_loss_and_grad(const Mlp& net, const FeatureMatrix& x,
                         std::span<const int> y,
                         std::vector<std::vector<double>>* grad_w,
                         std::vector<std::vector<double>>* grad_b);

// ---------------------------------------------------------------------------
// Baseline predictors and evaluation
// ---------------------------------------------------------------------------

// Majority label among the K nearest training rows (Euclidean). A vote tie
// resolves to the label of the nearest neighbor among the tied labels.
int knn_predict(const FeatureMatrix& train_x, std::span<const int> train_y,
                std::span<const double> query, int k);

// Uniform label in 0..n-1.
int random_select(int n, Rng& rng);

struct EvalResult {
  double accuracy = 0.0;
  double relative_error = 0.0;
  std::size_t total = 0;
};

// accuracy = fraction of samples where predicted == best_rrh;
// relative_error = mean of (g_best - g_predicted) / g_best in linear gain.
EvalResult evaluate(std::span<const int> predicted,
                    std::span<const ChannelSample* const> test);

// ---------------------------------------------------------------------------
// Table-style experiment: RS / KNN / NN-CR / NN-LO over scatterer counts
// ---------------------------------------------------------------------------

struct LearnParams {
  std::vector<int> scatterer_counts = {10, 15, 20, 25, 30, 35};
  int cbs_antennas = 80;
  int n_rrhs = 5;
  double region_radius_m = 500.0;
  double wavelength_m = 50.0;
  double pathloss_exponent = 3.7;
  double amp_ref_distance_m = 200.0;
  double scene_min_separation_m = 50.0;
  int n_samples = 50000;
  double train_fraction = 0.8;
  double log_floor = 1e-30;
  int lloyd_levels = 16;
  int lloyd_max_iters = 100;
  double lloyd_tol = 1e-9;
  int hidden1 = 128;
  int hidden2 = 64;
  double learning_rate = 0.01;
  int batch_size = 32;
  int epochs = 100;
  int knn_k = 5;
};

struct MethodResult {
  std::string method;  // RS | KNN | NN-CR | NN-LO
  int scatterers = 0;
  EvalResult eval;
};

// One scatterer-count cell of the experiment: fresh scene and dataset, the
// four predictors evaluated on the shared test split.
std::vector<MethodResult> run_methods_for_scene(const LearnParams& params,
                                                int n_scatterers,
                                                std::uint64_t seed);

// Full experiment over all scatterer counts; `jobs` worker threads over
// (scatterer count) cells, results merged in deterministic order.
std::vector<MethodResult> run_table3(const LearnParams& params,
                                     std::uint64_t seed, int jobs = 1);

}  // namespace hcasim
