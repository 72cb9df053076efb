#pragma once

#include <cmath>
#include <vector>

#include "mixview/config.hpp"
#include "mixview/data.hpp"
#include "mixview/network.hpp"

namespace mixview::testutil {

inline DataConfig small_data(int k = 3, int d = 16, int P = 4, int C_P = 1,
                             int Q = 2) {
  DataConfig cfg;
  cfg.k = k;
  cfg.d = d;
  cfg.P = P;
  cfg.C_P = C_P;
  cfg.Q = Q;
  cfg.delta1 = 0.25;
  cfg.delta2 = 1.0;
  cfg.delta3 = 0.05;
  cfg.delta4 = 0.06;
  return cfg;
}

inline NetworkConfig small_net(int k = 3, int d = 16, int m = 2, double rho = 0.3,
                               int alpha = 4) {
  NetworkConfig cfg;
  cfg.k = k;
  cfg.d = d;
  cfg.m = m;
  cfg.rho = rho;
  cfg.alpha = alpha;
  return cfg;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace mixview::testutil
