#include "hcasim/rrhlearn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "hcasim/parallel.hpp"

namespace hcasim {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

namespace {

std::vector<std::size_t> split_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j =
        static_cast<std::size_t>(rng.uniform_int(static_cast<int>(i + 1)));
    std::swap(order[i], order[j]);
  }
  return order;
}

}  // namespace

std::vector<std::size_t> Dataset::train_indices() const {
  const auto order = split_order(samples.size(), split_seed);
  const std::size_t n_train = static_cast<std::size_t>(
      std::floor(train_fraction * static_cast<double>(samples.size())));
  return {order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train)};
}

std::vector<std::size_t> Dataset::test_indices() const {
  const auto order = split_order(samples.size(), split_seed);
  const std::size_t n_train = static_cast<std::size_t>(
      std::floor(train_fraction * static_cast<double>(samples.size())));
  return {order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end()};
}

Dataset gen_dataset(const ScattererScene& scene, double carrier_wavelength_m,
                    int n_samples, std::uint64_t seed, double train_fraction) {
  if (n_samples < 10) throw std::invalid_argument("need at least 10 samples");

  Dataset ds;
  ds.train_fraction = train_fraction;
  ds.split_seed = derive_seed(seed, 0x5b17u);
  ds.samples.reserve(static_cast<std::size_t>(n_samples));

  Rng rng(seed);
  auto too_close = [&](Position p) {
    if (std::hypot(p.x, p.y) < 1.0) return true;
    for (const Position& q : scene.scatterers)
      if (std::hypot(p.x - q.x, p.y - q.y) < 1.0) return true;
    for (const Position& q : scene.rrhs)
      if (std::hypot(p.x - q.x, p.y - q.y) < 1.0) return true;
    return false;
  };
  for (int i = 0; i < n_samples; ++i) {
    Position p;
    do {
      const double r = scene.region_radius_m * std::sqrt(rng.uniform01());
      const double phi = kTwoPi * rng.uniform01();
      p = {r * std::cos(phi), r * std::sin(phi)};
    } while (too_close(p));
    ds.samples.push_back(sample_channel(scene, p, carrier_wavelength_m));
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Feature pipeline
// ---------------------------------------------------------------------------

std::vector<double> dft_magnitude(std::span<const std::complex<double>> h) {
  const std::size_t m = h.size();
  if (m == 0) throw std::invalid_argument("empty channel vector");
  // Twiddle table indexed by (k*n) mod m.
  std::vector<std::complex<double>> twiddle(m);
  for (std::size_t i = 0; i < m; ++i)
    twiddle[i] = std::polar(1.0, -kTwoPi * static_cast<double>(i) /
                                     static_cast<double>(m));
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  std::vector<double> mag(m);
  for (std::size_t k = 0; k < m; ++k) {
    std::complex<double> acc{0.0, 0.0};
    std::size_t idx = 0;
    for (std::size_t n = 0; n < m; ++n) {
      acc += h[n] * twiddle[idx];
      idx += k;
      if (idx >= m) idx -= m;
    }
    mag[k] = std::abs(acc) * scale;
  }
  return mag;
}

std::vector<double> log_compress(std::span<const double> v, double floor) {
  if (!(floor > 0.0)) throw std::invalid_argument("floor must be > 0");
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out[i] = std::log(std::max(v[i], floor));
  return out;
}

LloydCodebook lloyd_train(std::span<const double> samples, int levels,
                          int max_iters, double tol,
                          std::vector<double>* distortion_trace) {
  if (levels < 2) throw std::invalid_argument("need at least 2 levels");
  if (samples.size() < static_cast<std::size_t>(levels))
    throw std::invalid_argument("need at least `levels` samples");
  const auto [min_it, max_it] =
      std::minmax_element(samples.begin(), samples.end());
  const double lo = *min_it, hi = *max_it;
  if (!(hi > lo))
    throw std::invalid_argument("samples must not all be equal");

  const std::size_t n_levels = static_cast<std::size_t>(levels);
  std::vector<double> centroids(n_levels);
  for (std::size_t i = 0; i < n_levels; ++i)
    centroids[i] =
        lo + (hi - lo) * (static_cast<double>(i) + 0.5) / levels;

  std::vector<double> boundaries(n_levels - 1);
  std::vector<double> sums(n_levels);
  std::vector<std::size_t> counts(n_levels);
  const double n_inv = 1.0 / static_cast<double>(samples.size());
  double prev_distortion = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < max_iters; ++iter) {
    for (std::size_t i = 0; i + 1 < n_levels; ++i)
      boundaries[i] = 0.5 * (centroids[i] + centroids[i + 1]);

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), std::size_t{0});
    double distortion = 0.0;
    double worst_dist = -1.0;
    double worst_value = centroids[0];
    for (const double v : samples) {
      const std::size_t cell = static_cast<std::size_t>(
          std::lower_bound(boundaries.begin(), boundaries.end(), v) -
          boundaries.begin());
      sums[cell] += v;
      ++counts[cell];
      const double d = v - centroids[cell];
      distortion += d * d;
      if (std::abs(d) > worst_dist) {
        worst_dist = std::abs(d);
        worst_value = v;
      }
    }
    distortion *= n_inv;
    if (distortion_trace) distortion_trace->push_back(distortion);
    if (prev_distortion - distortion < tol) break;
    prev_distortion = distortion;

    for (std::size_t i = 0; i < n_levels; ++i) {
      if (counts[i] > 0)
        centroids[i] = sums[i] / static_cast<double>(counts[i]);
      else
        centroids[i] = worst_value;  // re-seed an empty cell
    }
    std::sort(centroids.begin(), centroids.end());
    // Continuous data makes exact collisions vanishingly rare; nudge keeps
    // the strictly-increasing invariant anyway.
    for (std::size_t i = 1; i < n_levels; ++i)
      if (centroids[i] <= centroids[i - 1])
        centroids[i] = std::nextafter(centroids[i - 1],
                                      std::numeric_limits<double>::infinity());
  }

  LloydCodebook cb;
  cb.centroids = std::move(centroids);
  cb.boundaries.resize(n_levels - 1);
  for (std::size_t i = 0; i + 1 < n_levels; ++i)
    cb.boundaries[i] = 0.5 * (cb.centroids[i] + cb.centroids[i + 1]);
  return cb;
}

double quantize_value(const LloydCodebook& cb, double v) {
  const std::size_t cell = static_cast<std::size_t>(
      std::lower_bound(cb.boundaries.begin(), cb.boundaries.end(), v) -
      cb.boundaries.begin());
  return cb.centroids[cell];
}

std::vector<double> quantize(const LloydCodebook& cb,
                             std::span<const double> v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = quantize_value(cb, v[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Baseline predictors and evaluation
// ---------------------------------------------------------------------------

int knn_predict(const FeatureMatrix& train_x, std::span<const int> train_y,
                std::span<const double> query, int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (train_x.rows == 0) throw std::invalid_argument("empty training set");
  if (query.size() != train_x.cols)
    throw std::invalid_argument("query dimension mismatch");
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k),
                                               train_x.rows);

  std::vector<std::pair<double, std::size_t>> dist(train_x.rows);
  const std::size_t cols = train_x.cols;
  for (std::size_t r = 0; r < train_x.rows; ++r) {
    const double* row = train_x.data.data() + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      const double d = row[c] - query[c];
      acc += d * d;
    }
    dist[r] = {acc, r};
  }
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk - 1),
                   dist.end());
  std::sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk));

  int max_label = 0;
  for (std::size_t i = 0; i < kk; ++i)
    max_label = std::max(max_label, train_y[dist[i].second]);
  std::vector<int> votes(static_cast<std::size_t>(max_label) + 1, 0);
  for (std::size_t i = 0; i < kk; ++i)
    ++votes[static_cast<std::size_t>(train_y[dist[i].second])];
  const int top = *std::max_element(votes.begin(), votes.end());
  // Vote tie: the tied label seen first in distance order wins.
  for (std::size_t i = 0; i < kk; ++i) {
    const int label = train_y[dist[i].second];
    if (votes[static_cast<std::size_t>(label)] == top) return label;
  }
  return train_y[dist[0].second];
}

int random_select(int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  return rng.uniform_int(n);
}

EvalResult evaluate(std::span<const int> predicted,
                    std::span<const ChannelSample* const> test) {
  if (test.empty()) throw std::invalid_argument("empty test set");
  if (predicted.size() != test.size())
    throw std::invalid_argument("prediction/test size mismatch");
  EvalResult result;
  result.total = test.size();
  std::size_t correct = 0;
  double err_sum = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const ChannelSample& s = *test[i];
    const int pred = predicted[i];
    if (pred < 0 || pred >= static_cast<int>(s.rrh_gains.size()))
      throw std::invalid_argument("predicted label out of range");
    if (pred == s.best_rrh) ++correct;
    const double g_best = s.rrh_gains[static_cast<std::size_t>(s.best_rrh)];
    const double g_pred = s.rrh_gains[static_cast<std::size_t>(pred)];
    err_sum += (g_best - g_pred) / g_best;
  }
  result.accuracy =
      static_cast<double>(correct) / static_cast<double>(test.size());
  result.relative_error = err_sum / static_cast<double>(test.size());
  return result;
}

// ---------------------------------------------------------------------------
// Table-style experiment
// ---------------------------------------------------------------------------

namespace {

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> inv_std;

  void fit(const FeatureMatrix& x, std::span<const std::size_t> rows) {
    mean.assign(x.cols, 0.0);
    inv_std.assign(x.cols, 0.0);
    for (const std::size_t r : rows) {
      const double* row = x.data.data() + r * x.cols;
      for (std::size_t c = 0; c < x.cols; ++c) mean[c] += row[c];
    }
    const double inv_n = 1.0 / static_cast<double>(rows.size());
    for (double& m : mean) m *= inv_n;
    std::vector<double> var(x.cols, 0.0);
    for (const std::size_t r : rows) {
      const double* row = x.data.data() + r * x.cols;
      for (std::size_t c = 0; c < x.cols; ++c) {
        const double d = row[c] - mean[c];
        var[c] += d * d;
      }
    }
    for (std::size_t c = 0; c < x.cols; ++c) {
      const double sd = std::sqrt(var[c] * inv_n);
      inv_std[c] = sd > 1e-12 ? 1.0 / sd : 1.0;
    }
  }

  void apply_inplace(FeatureMatrix& x) const {
    for (std::size_t r = 0; r < x.rows; ++r) {
      double* row = x.data.data() + r * x.cols;
      for (std::size_t c = 0; c < x.cols; ++c)
        row[c] = (row[c] - mean[c]) * inv_std[c];
    }
  }
};

FeatureMatrix gather_rows(const FeatureMatrix& x,
                          std::span<const std::size_t> rows) {
  FeatureMatrix out;
  out.rows = rows.size();
  out.cols = x.cols;
  out.data.resize(out.rows * out.cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy_n(x.data.data() + rows[i] * x.cols, x.cols,
                out.data.data() + i * x.cols);
  return out;
}

int argmax_label(std::span<const double> probs) {
  return static_cast<int>(std::distance(
      probs.begin(), std::max_element(probs.begin(), probs.end())));
}

}  // namespace

std::vector<MethodResult> run_methods_for_scene(const LearnParams& params,
                                                int n_scatterers,
                                                std::uint64_t seed) {
  const std::uint64_t tag = static_cast<std::uint64_t>(n_scatterers);
  const ScattererScene scene = gen_scatterer_scene(
      n_scatterers, params.n_rrhs, params.cbs_antennas, params.region_radius_m,
      derive_seed(seed, tag, 1), params.pathloss_exponent,
      params.amp_ref_distance_m, params.scene_min_separation_m);
  Dataset ds = gen_dataset(scene, params.wavelength_m, params.n_samples,
                           derive_seed(seed, tag, 2), params.train_fraction);
  ds.split_seed = derive_seed(seed, tag, 3);

  const auto train_idx = ds.train_indices();
  const auto test_idx = ds.test_indices();
  const std::size_t n = ds.samples.size();
  const std::size_t m = static_cast<std::size_t>(params.cbs_antennas);

  // Channel-response features: unitary DFT magnitude, log compression,
  // shared Lloyd codebook trained on the pooled train-split values, then
  // per-dimension standardization fitted on the train split.
  FeatureMatrix features;
  features.rows = n;
  features.cols = m;
  features.data.resize(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto logmag =
        log_compress(dft_magnitude(ds.samples[i].cbs_channel), params.log_floor);
    std::copy(logmag.begin(), logmag.end(), features.data.data() + i * m);
  }

  std::vector<double> pooled;
  pooled.reserve(train_idx.size() * m);
  for (const std::size_t r : train_idx) {
    const double* row = features.data.data() + r * m;
    pooled.insert(pooled.end(), row, row + m);
  }
  const LloydCodebook codebook =
      lloyd_train(pooled, params.lloyd_levels, params.lloyd_max_iters,
                  params.lloyd_tol);
  for (double& v : features.data) v = quantize_value(codebook, v);

  Standardizer std_cr;
  std_cr.fit(features, train_idx);
  std_cr.apply_inplace(features);

  // Location features scaled to [-1, 1]^2.
  FeatureMatrix location;
  location.rows = n;
  location.cols = 2;
  location.data.resize(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    location.data[i * 2] = ds.samples[i].user_pos.x / params.region_radius_m;
    location.data[i * 2 + 1] =
        ds.samples[i].user_pos.y / params.region_radius_m;
  }

  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = ds.samples[i].best_rrh;

  const FeatureMatrix train_cr = gather_rows(features, train_idx);
  const FeatureMatrix train_lo = gather_rows(location, train_idx);
  std::vector<int> train_y(train_idx.size());
  for (std::size_t i = 0; i < train_idx.size(); ++i)
    train_y[i] = labels[train_idx[i]];

  std::vector<const ChannelSample*> test_samples(test_idx.size());
  for (std::size_t i = 0; i < test_idx.size(); ++i)
    test_samples[i] = &ds.samples[test_idx[i]];

  MlpTrainOptions opt;
  opt.learning_rate = params.learning_rate;
  opt.batch_size = params.batch_size;
  opt.epochs = params.epochs;

  // NN-CR: quantized channel-response features.
  Mlp net_cr = mlp_init({static_cast<int>(m), params.hidden1, params.hidden2,
                         params.n_rrhs},
                        derive_seed(seed, tag, 4));
  opt.seed = derive_seed(seed, tag, 5);
  mlp_train(net_cr, train_cr, train_y, opt);

  // NN-LO: genuine user location.
  Mlp net_lo = mlp_init({2, params.hidden1, params.hidden2, params.n_rrhs},
                        derive_seed(seed, tag, 6));
  opt.seed = derive_seed(seed, tag, 7);
  mlp_train(net_lo, train_lo, train_y, opt);

  std::vector<int> pred_rs(test_idx.size()), pred_knn(test_idx.size()),
      pred_cr(test_idx.size()), pred_lo(test_idx.size());
  Rng rs_rng(derive_seed(seed, tag, 8));
  for (std::size_t i = 0; i < test_idx.size(); ++i) {
    const std::size_t r = test_idx[i];
    pred_rs[i] = random_select(params.n_rrhs, rs_rng);
    pred_knn[i] = knn_predict(train_cr, train_y, features.row(r), params.knn_k);
    pred_cr[i] = argmax_label(mlp_forward(net_cr, features.row(r)));
    pred_lo[i] = argmax_label(mlp_forward(net_lo, location.row(r)));
  }

  std::vector<MethodResult> results;
  results.push_back({"RS", n_scatterers, evaluate(pred_rs, test_samples)});
  results.push_back({"KNN", n_scatterers, evaluate(pred_knn, test_samples)});
  results.push_back({"NN-CR", n_scatterers, evaluate(pred_cr, test_samples)});
  results.push_back({"NN-LO", n_scatterers, evaluate(pred_lo, test_samples)});
  return results;
}

std::vector<MethodResult> run_table3(const LearnParams& params,
                                     std::uint64_t seed, int jobs) {
  std::vector<std::vector<MethodResult>> cells(params.scatterer_counts.size());
  parallel_for_index(params.scatterer_counts.size(), jobs, [&](std::size_t i) {
    cells[i] =
        run_methods_for_scene(params, params.scatterer_counts[i], seed);
  });
  std::vector<MethodResult> merged;
  for (const auto& cell : cells)
    merged.insert(merged.end(), cell.begin(), cell.end());
  return merged;
}

}  // namespace hcasim
