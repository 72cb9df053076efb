#pragma once

#include <span>
#include <vector>

#include "mixview/config.hpp"
#include "mixview/data.hpp"
#include "mixview/rng.hpp"

namespace mixview {

// Polynomially-smoothed ReLU: 0 for x <= 0, x^a / (a rho^{a-1}) on
// [0, rho], x - (1 - 1/a) rho above. C^1 at both breakpoints.
double smoothed_relu(double x, double rho, int alpha);
// Its derivative: 0, (x/rho)^{a-1}, 1 on the same pieces.
double smoothed_relu_deriv(double x, double rho, int alpha);

inline double activate(double x, const NetworkConfig& cfg) {
  return cfg.activation == Activation::Linear
             ? x
             : smoothed_relu(x, cfg.rho, cfg.alpha);
}
inline double activate_deriv(double x, const NetworkConfig& cfg) {
  return cfg.activation == Activation::Linear
             ? 1.0
             : smoothed_relu_deriv(x, cfg.rho, cfg.alpha);
}

// The k*m weight vectors w_{y,r}, stored as a contiguous (k, m, d) tensor.
struct Weights {
  int k = 0;
  int m = 0;
  int d = 0;
  std::vector<double> w;

  std::span<double> row(int y, int r) {
    return {w.data() + (static_cast<std::size_t>(y) * m + r) * d,
            static_cast<std::size_t>(d)};
  }
  std::span<const double> row(int y, int r) const {
    return {w.data() + (static_cast<std::size_t>(y) * m + r) * d,
            static_cast<std::size_t>(d)};
  }
};

// Xavier initialization: i.i.d. N(0, 1/d) entries.
Weights init_weights(const NetworkConfig& cfg, Rng& rng);

// Logits of one point given as P contiguous patches.
std::vector<double> forward(const Weights& w, const NetworkConfig& cfg,
                            std::span<const double> patches, int P);
std::vector<double> forward(const Weights& w, const NetworkConfig& cfg,
                            const DataPoint& point);
std::vector<double> forward(const Weights& w, const NetworkConfig& cfg,
                            const PatchDataset& ds, int i);

// d g^y / d w_{y,r} for r in [m], written to out (m, d) row-major. The
// gradient block of any other class is identically zero and not emitted.
void output_gradient(const Weights& w, const NetworkConfig& cfg,
                     std::span<const double> patches, int P, int y,
                     std::span<double> out);

// <w_{y,r}, v_{s,l}>.
double correlation(const Weights& w, const FeatureDictionary& dict, int y,
                   int r, int s, int l);

}  // namespace mixview
