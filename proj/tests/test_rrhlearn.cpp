#include "hcasim/rrhlearn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "doctest.h"

using namespace hcasim;

TEST_CASE("unitary DFT magnitude") {
  SUBCASE("constant vector concentrates in bin 0") {
    std::vector<std::complex<double>> ones(4, {1.0, 0.0});
    const auto mag = dft_magnitude(ones);
    CHECK(mag[0] == doctest::Approx(2.0));
    CHECK(mag[1] == doctest::Approx(0.0).scale(1.0));
    CHECK(mag[2] == doctest::Approx(0.0).scale(1.0));
    CHECK(mag[3] == doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("unit impulse has a flat spectrum") {
    std::vector<std::complex<double>> impulse(4, {0.0, 0.0});
    impulse[0] = {1.0, 0.0};
    for (const double m : dft_magnitude(impulse))
      CHECK(m == doctest::Approx(0.5));
  }
  SUBCASE("Parseval") {
    Rng rng(5);
    std::vector<std::complex<double>> h(80);
    double power = 0.0;
    for (auto& v : h) {
      v = {rng.normal(), rng.normal()};
      power += std::norm(v);
    }
    const auto mag = dft_magnitude(h);
    double spec = 0.0;
    for (const double m : mag) spec += m * m;
    CHECK(spec == doctest::Approx(power).epsilon(1e-9));
  }
}

TEST_CASE("log compression") {
  const double e = std::exp(1.0);
  const std::vector<double> v{1.0, e, e * e};
  const auto out = log_compress(v, 1e-12);
  CHECK(out[0] == doctest::Approx(0.0).scale(1.0));
  CHECK(out[1] == doctest::Approx(1.0));
  CHECK(out[2] == doctest::Approx(2.0));

  const std::vector<double> tiny{1e-20};
  CHECK(log_compress(tiny, 1e-12)[0] == doctest::Approx(std::log(1e-12)));

  // Monotone map keeps sorted inputs sorted.
  Rng rng(9);
  std::vector<double> sorted(100);
  for (double& x : sorted) x = rng.uniform(1e-14, 10.0);
  std::sort(sorted.begin(), sorted.end());
  const auto mapped = log_compress(sorted, 1e-12);
  CHECK(std::is_sorted(mapped.begin(), mapped.end()));

  CHECK_THROWS_AS(log_compress(v, 0.0), std::invalid_argument);
}

TEST_CASE("Lloyd-Max quantizer training") {
  SUBCASE("uniform density, two levels") {
    Rng rng(17);
    std::vector<double> samples(1000000);
    for (double& v : samples) v = rng.uniform01();
    const LloydCodebook cb = lloyd_train(samples, 2, 200, 1e-12);
    REQUIRE(cb.centroids.size() == 2);
    CHECK(std::abs(cb.centroids[0] - 0.25) < 0.01);
    CHECK(std::abs(cb.centroids[1] - 0.75) < 0.01);
    CHECK(cb.boundaries[0] ==
          doctest::Approx(0.5 * (cb.centroids[0] + cb.centroids[1])));
  }
  SUBCASE("levels equal to distinct values reach zero distortion") {
    const std::vector<double> samples{0.0, 1.0, 2.0, 3.0, 0.0, 1.0, 2.0, 3.0};
    const LloydCodebook cb = lloyd_train(samples, 4, 100, 0.0);
    double distortion = 0.0;
    for (const double v : samples) {
      const double q = quantize_value(cb, v);
      distortion += (v - q) * (v - q);
    }
    CHECK(distortion == doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("distortion trace is non-increasing") {
    Rng rng(23);
    std::vector<double> samples(50000);
    for (double& v : samples) v = rng.normal();
    std::vector<double> trace;
    lloyd_train(samples, 16, 100, 0.0, &trace);
    REQUIRE(trace.size() >= 2);
    for (std::size_t i = 1; i < trace.size(); ++i)
      CHECK(trace[i] <= trace[i - 1] + 1e-12);
  }
  SUBCASE("preconditions") {
    const std::vector<double> few{1.0, 2.0};
    CHECK_THROWS_AS(lloyd_train(few, 4, 10, 1e-9), std::invalid_argument);
    const std::vector<double> flat(10, 3.0);
    CHECK_THROWS_AS(lloyd_train(flat, 2, 10, 1e-9), std::invalid_argument);
  }
}

TEST_CASE("quantization") {
  LloydCodebook cb;
  cb.centroids = {0.0, 1.0};
  cb.boundaries = {0.5};
  const std::vector<double> v{0.2, 0.8};
  const auto q = quantize(cb, v);
  CHECK(q[0] == 0.0);
  CHECK(q[1] == 1.0);

  // Exact midpoint resolves to the lower centroid.
  CHECK(quantize_value(cb, 0.5) == 0.0);

  // Centroids map to themselves; quantization is idempotent.
  const auto self = quantize(cb, cb.centroids);
  CHECK(self == cb.centroids);
  Rng rng(31);
  std::vector<double> probe(1000);
  for (double& x : probe) x = rng.uniform(-2.0, 3.0);
  const auto q1 = quantize(cb, probe);
  const auto q2 = quantize(cb, q1);
  CHECK(q1 == q2);
}

TEST_CASE("mlp forward") {
  SUBCASE("all-zero weights give the uniform distribution") {
    Mlp net = mlp_init({4, 6, 5}, 3);
    for (auto& w : net.weights) std::fill(w.begin(), w.end(), 0.0);
    const auto p = mlp_forward(net, std::vector<double>{1.0, -2.0, 0.5, 3.0});
    for (const double v : p) CHECK(v == doctest::Approx(0.2).epsilon(1e-12));
  }
  SUBCASE("probabilities sum to 1 for random nets") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
      Mlp net = mlp_init({8, 16, 8, 3}, 100 + trial);
      std::vector<double> x(8);
      for (double& v : x) v = 4.0 * rng.normal();
      const auto p = mlp_forward(net, x);
      double sum = 0.0;
      for (const double v : p) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        sum += v;
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  }
  SUBCASE("softmax shift invariance in the output biases") {
    Mlp net = mlp_init({3, 4, 3}, 9);
    const std::vector<double> x{0.3, -1.2, 0.7};
    const auto p1 = mlp_forward(net, x);
    for (double& b : net.biases.back()) b += 11.5;
    const auto p2 = mlp_forward(net, x);
    for (std::size_t i = 0; i < p1.size(); ++i)
      CHECK(p1[i] == doctest::Approx(p2[i]).epsilon(1e-9));
  }
  SUBCASE("dimension mismatch rejected") {
    const Mlp net = mlp_init({3, 4, 2}, 1);
    CHECK_THROWS_AS(mlp_forward(net, std::vector<double>{1.0, 2.0}),
                    std::invalid_argument);
  }
}

TEST_CASE("mlp analytic gradient matches central finite differences") {
  Mlp net = mlp_init({3, 4, 2}, 11);
  FeatureMatrix x;
  x.rows = 16;
  x.cols = 3;
  x.data.resize(x.rows * x.cols);
  Rng rng(13);
  for (double& v : x.data) v = rng.normal();
  std::vector<int> y(x.rows);
  for (int& label : y) label = rng.uniform_int(2);

  std::vector<std::vector<double>> gw, gb;
  mlp_loss_and_grad(net, x, y, &gw, &gb);

  const double eps = 1e-5;
  double max_rel = 0.0;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    for (std::size_t i = 0; i < net.weights[l].size(); ++i) {
      const double orig = net.weights[l][i];
      net.weights[l][i] = orig + eps;
      const double up = mlp_loss_and_grad(net, x, y, nullptr, nullptr);
      net.weights[l][i] = orig - eps;
      const double down = mlp_loss_and_grad(net, x, y, nullptr, nullptr);
      net.weights[l][i] = orig;
      const double fd = (up - down) / (2.0 * eps);
      const double scale = std::max({std::abs(fd), std::abs(gw[l][i]), 1e-8});
      max_rel = std::max(max_rel, std::abs(fd - gw[l][i]) / scale);
    }
    for (std::size_t i = 0; i < net.biases[l].size(); ++i) {
      const double orig = net.biases[l][i];
      net.biases[l][i] = orig + eps;
      const double up = mlp_loss_and_grad(net, x, y, nullptr, nullptr);
      net.biases[l][i] = orig - eps;
      const double down = mlp_loss_and_grad(net, x, y, nullptr, nullptr);
      net.biases[l][i] = orig;
      const double fd = (up - down) / (2.0 * eps);
      const double scale = std::max({std::abs(fd), std::abs(gb[l][i]), 1e-8});
      max_rel = std::max(max_rel, std::abs(fd - gb[l][i]) / scale);
    }
  }
  CHECK(max_rel < 1e-4);
}

TEST_CASE("mlp training") {
  SUBCASE("separable two-class toy set") {
    Rng rng(41);
    FeatureMatrix x;
    x.rows = 200;
    x.cols = 2;
    x.data.resize(400);
    std::vector<int> y(200);
    for (std::size_t i = 0; i < 200; ++i) {
      const int label = static_cast<int>(i % 2);
      y[i] = label;
      x.data[i * 2] = (label ? 2.0 : -2.0) + 0.3 * rng.normal();
      x.data[i * 2 + 1] = 0.3 * rng.normal();
    }
    Mlp net = mlp_init({2, 8, 2}, 4);
    MlpTrainOptions opt;
    opt.learning_rate = 0.05;
    opt.batch_size = 16;
    opt.epochs = 200;
    opt.seed = 5;
    const MlpTrainResult result = mlp_train(net, x, y, opt);
    REQUIRE(result.epoch_loss.size() == 200);
    CHECK(result.epoch_loss.back() < result.epoch_loss.front());

    std::size_t correct = 0;
    for (std::size_t i = 0; i < x.rows; ++i) {
      const auto p = mlp_forward(net, x.row(i));
      const int pred = p[1] > p[0] ? 1 : 0;
      if (pred == y[i]) ++correct;
    }
    CHECK(static_cast<double>(correct) / static_cast<double>(x.rows) >= 0.99);
  }
  SUBCASE("zero learning rate leaves weights unchanged") {
    FeatureMatrix x;
    x.rows = 8;
    x.cols = 3;
    x.data.assign(24, 0.5);
    std::vector<int> y(8, 1);
    Mlp net = mlp_init({3, 4, 2}, 7);
    const Mlp before = net;
    MlpTrainOptions opt;
    opt.learning_rate = 0.0;
    opt.epochs = 3;
    opt.seed = 1;
    mlp_train(net, x, y, opt);
    CHECK(net.weights == before.weights);
    CHECK(net.biases == before.biases);
  }
  SUBCASE("training is deterministic per seed") {
    Rng rng(43);
    FeatureMatrix x;
    x.rows = 64;
    x.cols = 4;
    x.data.resize(256);
    for (double& v : x.data) v = rng.normal();
    std::vector<int> y(64);
    for (int& label : y) label = rng.uniform_int(3);

    MlpTrainOptions opt;
    opt.epochs = 5;
    opt.seed = 77;
    Mlp a = mlp_init({4, 8, 3}, 2);
    Mlp b = mlp_init({4, 8, 3}, 2);
    mlp_train(a, x, y, opt);
    mlp_train(b, x, y, opt);
    CHECK(a.weights == b.weights);
    CHECK(a.biases == b.biases);
  }
}

TEST_CASE("knn prediction") {
  FeatureMatrix train;
  train.rows = 5;
  train.cols = 1;
  train.data = {0.5, 1.0, 1.1, 0.6, 10.0};
  const std::vector<int> labels{0, 1, 1, 0, 1};

  SUBCASE("exact training point with K=1") {
    CHECK(knn_predict(train, labels, std::vector<double>{1.0}, 1) == 1);
    CHECK(knn_predict(train, labels, std::vector<double>{0.5}, 1) == 0);
  }
  SUBCASE("unanimous neighborhood") {
    FeatureMatrix t;
    t.rows = 5;
    t.cols = 1;
    t.data = {1.0, 1.1, 0.9, 1.05, 0.95};
    const std::vector<int> same(5, 3);
    CHECK(knn_predict(t, same, std::vector<double>{1.0}, 5) == 3);
  }
  SUBCASE("majority vote {a,a,b,b,b} -> b") {
    FeatureMatrix t;
    t.rows = 5;
    t.cols = 1;
    t.data = {0.1, 0.2, 0.3, 0.4, 0.5};
    const std::vector<int> y{0, 0, 1, 1, 1};
    CHECK(knn_predict(t, y, std::vector<double>{0.3}, 5) == 1);
  }
  SUBCASE("vote tie resolves to the nearest tied label") {
    // K=4 around 0.5: neighbors 0.5(0), 0.6(0), 1.0(1), 1.1(1); nearest has
    // label 0.
    CHECK(knn_predict(train, labels, std::vector<double>{0.5}, 4) == 0);
  }
}

TEST_CASE("random selection uniformity") {
  Rng rng(3);
  CHECK(random_select(1, rng) == 0);
  std::array<int, 5> counts{};
  const int draws = 100000;
  for (int i = 0; i < draws; ++i)
    ++counts[static_cast<std::size_t>(random_select(5, rng))];
  for (const int c : counts) {
    const double freq = static_cast<double>(c) / draws;
    CHECK(std::abs(freq - 0.2) < 0.01);
  }
}

namespace {

ChannelSample make_sample(std::vector<double> gains) {
  ChannelSample s;
  s.rrh_gains = std::move(gains);
  s.best_rrh = static_cast<int>(std::distance(
      s.rrh_gains.begin(),
      std::max_element(s.rrh_gains.begin(), s.rrh_gains.end())));
  return s;
}

}  // namespace

TEST_CASE("evaluation metrics") {
  const std::vector<ChannelSample> samples{
      make_sample({1.0, 2.0}),
      make_sample({3.0, 1.5}),
      make_sample({0.5, 4.0}),
  };
  std::vector<const ChannelSample*> refs;
  for (const auto& s : samples) refs.push_back(&s);

  SUBCASE("oracle predictor") {
    std::vector<int> pred;
    for (const auto& s : samples) pred.push_back(s.best_rrh);
    const EvalResult r = evaluate(pred, refs);
    CHECK(r.accuracy == 1.0);
    CHECK(r.relative_error == 0.0);
  }
  SUBCASE("wrong label contributes (g_best - g_pred) / g_best") {
    const std::vector<int> pred{0, 0, 1};  // first wrong: (2-1)/2 = 0.5
    const EvalResult r = evaluate(pred, refs);
    CHECK(r.accuracy == doctest::Approx(2.0 / 3.0));
    CHECK(r.relative_error == doctest::Approx(0.5 / 3.0));
  }
  SUBCASE("common positive gain scaling changes nothing") {
    std::vector<ChannelSample> scaled = samples;
    for (auto& s : scaled)
      for (double& g : s.rrh_gains) g *= 123.0;
    std::vector<const ChannelSample*> scaled_refs;
    for (const auto& s : scaled) scaled_refs.push_back(&s);
    const std::vector<int> pred{1, 0, 0};
    const EvalResult a = evaluate(pred, refs);
    const EvalResult b = evaluate(pred, scaled_refs);
    CHECK(a.accuracy == b.accuracy);
    CHECK(a.relative_error == doctest::Approx(b.relative_error).epsilon(1e-12));
  }
}

TEST_CASE("dataset generation") {
  const ScattererScene scene = gen_scatterer_scene(10, 5, 80, 500.0, 55);
  const Dataset ds = gen_dataset(scene, 50.0, 1000, 99);
  REQUIRE(ds.samples.size() == 1000);
  for (const ChannelSample& s : ds.samples) {
    CHECK(s.cbs_channel.size() == 80);
    CHECK(s.rrh_gains.size() == 5);
    CHECK(std::hypot(s.user_pos.x, s.user_pos.y) <= 500.0);
  }

  const Dataset again = gen_dataset(scene, 50.0, 1000, 99);
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    CHECK(ds.samples[i].user_pos.x == again.samples[i].user_pos.x);
    CHECK(ds.samples[i].best_rrh == again.samples[i].best_rrh);
  }

  // Train/test split is a disjoint cover.
  const auto train = ds.train_indices();
  const auto test = ds.test_indices();
  CHECK(train.size() == 800);
  CHECK(test.size() == 200);
  std::set<std::size_t> seen(train.begin(), train.end());
  for (const std::size_t t : test) CHECK(seen.insert(t).second);
  CHECK(seen.size() == 1000);
}

TEST_CASE("label distribution does not degenerate at scale") {
  // Empirical check over a large regenerated dataset: every RRH is the best
  // choice for a non-trivial share of users.
  const ScattererScene scene = gen_scatterer_scene(10, 5, 80, 500.0, 777);
  const Dataset ds = gen_dataset(scene, 50.0, 100000, 778);
  std::array<long, 5> counts{};
  for (const ChannelSample& s : ds.samples)
    ++counts[static_cast<std::size_t>(s.best_rrh)];
  for (const long c : counts)
    CHECK(static_cast<double>(c) / 100000.0 > 0.05);
}
