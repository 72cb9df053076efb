#include <cmath>

#include "doctest.h"
#include "mixview/network.hpp"
#include "util.hpp"

using namespace mixview;
using namespace mixview::testutil;

TEST_CASE("smoothed relu branch values") {
  CHECK(smoothed_relu(-1.0, 1.0, 2) == 0.0);
  CHECK(smoothed_relu(1.0, 1.0, 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(smoothed_relu(2.0, 1.0, 2) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK_THROWS_AS(smoothed_relu(1.0, 0.0, 2), std::domain_error);
}

TEST_CASE("smoothed relu is C1 at the breakpoints") {
  for (double rho : {0.1, 0.3, 1.0, 2.5}) {
    for (int alpha : {2, 4, 8, 12}) {
      // value and derivative agree between branches at x = rho
      const double poly = std::pow(rho, alpha) / (alpha * std::pow(rho, alpha - 1));
      const double lin = rho - (1.0 - 1.0 / alpha) * rho;
      CHECK(poly == doctest::Approx(lin).epsilon(1e-14));
      CHECK(smoothed_relu_deriv(rho, rho, alpha) == 1.0);
      CHECK(smoothed_relu_deriv(rho * (1 - 1e-13), rho, alpha) ==
            doctest::Approx(1.0).epsilon(1e-10));
      // and at x = 0
      CHECK(smoothed_relu(0.0, rho, alpha) == 0.0);
      CHECK(smoothed_relu_deriv(0.0, rho, alpha) == 0.0);
      CHECK(smoothed_relu(1e-300, rho, alpha) >= 0.0);
    }
  }
}

TEST_CASE("smoothed relu derivative examples and finite differences") {
  CHECK(smoothed_relu_deriv(0.5, 1.0, 2) == doctest::Approx(0.5).epsilon(1e-15));
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const double rho = rng.uniform(0.05, 2.0);
    const int alpha = 2 + static_cast<int>(rng.uniform_index(9));
    const double x = rng.uniform(-1.0, 3.0) * rho;
    if (std::abs(x) < 1e-4 || std::abs(x - rho) < 1e-4) continue;  // kinks
    const double h = 1e-6 * std::max(1.0, std::abs(x));
    const double fd =
        (smoothed_relu(x + h, rho, alpha) - smoothed_relu(x - h, rho, alpha)) / (2 * h);
    CHECK(smoothed_relu_deriv(x, rho, alpha) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("activation is monotone with derivative in [0,1]") {
  Rng rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    const double rho = rng.uniform(0.05, 2.0);
    const int alpha = 2 + static_cast<int>(rng.uniform_index(9));
    const double a = rng.uniform(-2.0, 4.0);
    const double b = a + rng.uniform(0.0, 1.0);
    CHECK(smoothed_relu(b, rho, alpha) >= smoothed_relu(a, rho, alpha));
    const double dv = smoothed_relu_deriv(a, rho, alpha);
    CHECK(dv >= 0.0);
    CHECK(dv <= 1.0);
  }
}

TEST_CASE("init_weights matches Xavier moments") {
  NetworkConfig cfg = small_net(10, 64, 16);  // k*m*d = 10240... use bigger
  cfg.k = 10;
  cfg.m = 40;
  cfg.d = 256;  // 1.024e6 entries
  Rng rng(9);
  auto w = init_weights(cfg, rng);
  double sum = 0.0, sq = 0.0;
  for (double x : w.w) {
    sum += x;
    sq += x * x;
  }
  const double n = static_cast<double>(w.w.size());
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) <= 3.0 / (std::sqrt(cfg.d * n)));  // sigma/sqrt(n)
  CHECK(var == doctest::Approx(1.0 / cfg.d).epsilon(0.05));

  Rng rng2(9);
  auto w2 = init_weights(cfg, rng2);
  CHECK(w.w == w2.w);
}

TEST_CASE("forward") {
  auto net = small_net(2, 8, 3, 0.5, 4);
  SUBCASE("zero weights give zero logits") {
    Weights w;
    w.k = net.k;
    w.m = net.m;
    w.d = net.d;
    w.w.assign(static_cast<std::size_t>(net.k) * net.m * net.d, 0.0);
    std::vector<double> patches(3 * net.d, 1.0);
    auto logits = forward(w, net, patches, 3);
    for (double v : logits) CHECK(v == 0.0);
  }
  SUBCASE("linear branch on a single aligned patch") {
    Rng rng(10);
    auto dict = build_feature_dictionary(1, net.d, rng);
    Weights w;
    w.k = net.k;
    w.m = net.m;
    w.d = net.d;
    w.w.assign(static_cast<std::size_t>(net.k) * net.m * net.d, 0.0);
    // one neuron of class 0 set to 2*rho*v, patch = v: inner = 2*rho >= rho
    auto v = dict.feature(0, 1);
    for (int j = 0; j < net.d; ++j) w.row(0, 0)[j] = 2.0 * net.rho * v[j];
    std::vector<double> patch(v.begin(), v.end());
    auto logits = forward(w, net, patch, 1);
    const double inner = dot(w.row(0, 0), patch);
    CHECK(logits[0] == doctest::Approx(inner - (1.0 - 1.0 / net.alpha) * net.rho)
                           .epsilon(1e-12));
    CHECK(logits[1] == 0.0);
  }
  SUBCASE("patch order does not matter") {
    Rng rng(11);
    auto net2 = small_net(3, 16, 2, 0.3, 4);
    NetworkConfig cfg = net2;
    auto w = init_weights(cfg, rng);
    std::vector<double> patches(4 * cfg.d);
    for (auto& x : patches) x = rng.uniform(-1.0, 1.0);
    auto l1 = forward(w, cfg, patches, 4);
    // rotate patches
    std::vector<double> rotated(patches.begin() + cfg.d, patches.end());
    rotated.insert(rotated.end(), patches.begin(), patches.begin() + cfg.d);
    auto l2 = forward(w, cfg, rotated, 4);
    for (int y = 0; y < cfg.k; ++y)
      CHECK(l1[y] == doctest::Approx(l2[y]).epsilon(1e-12));
  }
  SUBCASE("linear mode with m=1 is the inner product with the patch sum") {
    NetworkConfig lin = small_net(2, 8, 1);
    lin.activation = Activation::Linear;
    Rng rng(12);
    auto w = init_weights(lin, rng);
    std::vector<double> patches(3 * lin.d);
    for (auto& x : patches) x = rng.uniform(-1.0, 1.0);
    std::vector<double> sum(lin.d, 0.0);
    for (int p = 0; p < 3; ++p)
      for (int j = 0; j < lin.d; ++j) sum[j] += patches[p * lin.d + j];
    auto logits = forward(w, lin, patches, 3);
    for (int y = 0; y < lin.k; ++y)
      CHECK(logits[y] == doctest::Approx(dot(w.row(y, 0), sum)).epsilon(1e-12));
  }
  SUBCASE("shape mismatch throws") {
    Rng rng(13);
    auto w = init_weights(net, rng);
    std::vector<double> patches(net.d, 0.0);
    CHECK_THROWS_AS(forward(w, net, patches, 2), DimensionError);
  }
}

TEST_CASE("output_gradient") {
  SUBCASE("linear mode rows are the patch sum") {
    NetworkConfig lin = small_net(2, 8, 3);
    lin.activation = Activation::Linear;
    Rng rng(14);
    auto w = init_weights(lin, rng);
    std::vector<double> patches(2 * lin.d);
    for (auto& x : patches) x = rng.uniform(-1.0, 1.0);
    std::vector<double> sum(lin.d, 0.0);
    for (int p = 0; p < 2; ++p)
      for (int j = 0; j < lin.d; ++j) sum[j] += patches[p * lin.d + j];
    std::vector<double> grad(static_cast<std::size_t>(lin.m) * lin.d);
    output_gradient(w, lin, patches, 2, 1, grad);
    for (int r = 0; r < lin.m; ++r)
      for (int j = 0; j < lin.d; ++j)
        CHECK(grad[r * lin.d + j] == doctest::Approx(sum[j]).epsilon(1e-12));
  }
  SUBCASE("matches finite differences of forward") {
    auto net = small_net(3, 12, 2, 0.3, 4);
    Rng rng(15);
    auto w = init_weights(net, rng);
    const int P = 3;
    std::vector<double> patches(P * net.d);
    for (auto& x : patches) x = rng.uniform(-0.5, 0.5);
    for (int y = 0; y < net.k; ++y) {
      std::vector<double> grad(static_cast<std::size_t>(net.m) * net.d);
      output_gradient(w, net, patches, P, y, grad);
      Weights probe = w;
      const double h = 1e-6;
      for (int r = 0; r < net.m; ++r) {
        for (int j = 0; j < net.d; j += 3) {  // subsample coordinates
          auto row = probe.row(y, r);
          const double keep = row[j];
          row[j] = keep + h;
          const double up = forward(probe, net, patches, P)[y];
          row[j] = keep - h;
          const double dn = forward(probe, net, patches, P)[y];
          row[j] = keep;
          const double fd = (up - dn) / (2 * h);
          const double an = grad[r * net.d + j];
          if (std::abs(an) > 1e-8)
            CHECK(std::abs(fd - an) / std::abs(an) <= 1e-6);
          else
            CHECK(std::abs(fd - an) <= 1e-8);
        }
      }
    }
  }
}

TEST_CASE("correlation") {
  Rng rng(16);
  auto dict = build_feature_dictionary(2, 16, rng);
  NetworkConfig net = small_net(2, 16, 2);
  Weights w;
  w.k = 2;
  w.m = 2;
  w.d = 16;
  w.w.assign(static_cast<std::size_t>(2) * 2 * 16, 0.0);
  auto v = dict.feature(1, 2);
  for (int j = 0; j < 16; ++j) w.row(0, 0)[j] = v[j];
  CHECK(correlation(w, dict, 0, 0, 1, 2) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(correlation(w, dict, 0, 0, 0, 1)) <= 1e-10);
  for (int j = 0; j < 16; ++j) w.row(0, 1)[j] = 2.0 * v[j];
  CHECK(correlation(w, dict, 0, 1, 1, 2) ==
        doctest::Approx(2.0 * correlation(w, dict, 0, 0, 1, 2)).epsilon(1e-12));
  CHECK_THROWS_AS(correlation(w, dict, 0, 5, 0, 1), std::out_of_range);
}
