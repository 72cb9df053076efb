#include "mixview/network.hpp"

#include <cmath>
#include <stdexcept>

namespace mixview {

namespace {

// x^n for small integer n; avoids libm pow for portability of results.
inline double ipow(double x, int n) {
  double out = 1.0;
  while (n > 0) {
    if (n & 1) out *= x;
    x *= x;
    n >>= 1;
  }
  return out;
}

inline double dot(const double* a, const double* b, int d) {
  double s = 0.0;
  for (int j = 0; j < d; ++j) s += a[j] * b[j];
  return s;
}

}  // namespace

double smoothed_relu(double x, double rho, int alpha) {
  if (!(rho > 0.0)) throw std::domain_error("smoothed_relu: rho must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= rho) return x - (1.0 - 1.0 / alpha) * rho;
  return ipow(x, alpha) / (alpha * ipow(rho, alpha - 1));
}

double smoothed_relu_deriv(double x, double rho, int alpha) {
  if (!(rho > 0.0)) throw std::domain_error("smoothed_relu: rho must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= rho) return 1.0;
  return ipow(x / rho, alpha - 1);
}

Weights init_weights(const NetworkConfig& cfg, Rng& rng) {
  Weights w;
  w.k = cfg.k;
  w.m = cfg.m;
  w.d = cfg.d;
  w.w.resize(static_cast<std::size_t>(cfg.k) * cfg.m * cfg.d);
  const double sigma = 1.0 / std::sqrt(static_cast<double>(cfg.d));
  for (auto& x : w.w) x = sigma * rng.gaussian();
  return w;
}

std::vector<double> forward(const Weights& w, const NetworkConfig& cfg,
                            std::span<const double> patches, int P) {
  if (static_cast<int>(patches.size()) != P * cfg.d)
    throw DimensionError("forward: patch buffer does not match P*d");
  if (w.k != cfg.k || w.m != cfg.m || w.d != cfg.d)
    throw DimensionError("forward: weight shape does not match config");
  std::vector<double> logits(cfg.k, 0.0);
  for (int y = 0; y < cfg.k; ++y) {
    double acc = 0.0;
    for (int r = 0; r < cfg.m; ++r) {
      const double* wv = w.row(y, r).data();
      for (int p = 0; p < P; ++p) {
        const double h = dot(wv, patches.data() + static_cast<std::size_t>(p) * cfg.d, cfg.d);
        acc += activate(h, cfg);
      }
    }
    logits[y] = acc;
  }
  return logits;
}

std::vector<double> forward(const Weights& w, const NetworkConfig& cfg,
                            const DataPoint& point) {
  return forward(w, cfg, point.patches, point.P);
}

std::vector<double> forward(const Weights& w, const NetworkConfig& cfg,
                            const PatchDataset& ds, int i) {
  return forward(w, cfg, ds.point(i), ds.P);
}

void output_gradient(const Weights& w, const NetworkConfig& cfg,
                     std::span<const double> patches, int P, int y,
                     std::span<double> out) {
  if (static_cast<int>(patches.size()) != P * cfg.d)
    throw DimensionError("output_gradient: patch buffer does not match P*d");
  if (static_cast<int>(out.size()) != cfg.m * cfg.d)
    throw DimensionError("output_gradient: output buffer must be m*d");
  std::fill(out.begin(), out.end(), 0.0);
  for (int r = 0; r < cfg.m; ++r) {
    const double* wv = w.row(y, r).data();
    double* dst = out.data() + static_cast<std::size_t>(r) * cfg.d;
    for (int p = 0; p < P; ++p) {
      const double* xp = patches.data() + static_cast<std::size_t>(p) * cfg.d;
      const double s = activate_deriv(dot(wv, xp, cfg.d), cfg);
      if (s != 0.0) {
        for (int j = 0; j < cfg.d; ++j) dst[j] += s * xp[j];
      }
    }
  }
}

double correlation(const Weights& w, const FeatureDictionary& dict, int y,
                   int r, int s, int l) {
  if (y < 0 || y >= w.k || r < 0 || r >= w.m || s < 0 || s >= dict.k || l < 1 || l > 2)
    throw std::out_of_range("correlation: index out of range");
  return dot(w.row(y, r).data(), dict.feature(s, l).data(), w.d);
}

}  // namespace mixview
