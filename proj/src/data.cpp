#include "mixview/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <string>

namespace mixview {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Draws `count` distinct values from {0..n-1} in random order (partial
// Fisher-Yates over an index table).
std::vector<int> draw_distinct(int n, int count, Rng& rng) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < count; ++i) {
    const int j = i + static_cast<int>(rng.uniform_index(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  return idx;
}

// Orthonormalizes `rows` seeded Gaussian vectors of dimension d in place.
// Modified Gram-Schmidt, two sweeps per row; rows that collapse (never at
// the dimensions we run) are redrawn.
std::vector<double> orthonormal_gaussian(int rows, int d, Rng& rng) {
  std::vector<double> out(static_cast<std::size_t>(rows) * d);
  for (int r = 0; r < rows; ++r) {
    double* v = out.data() + static_cast<std::size_t>(r) * d;
    for (int attempt = 0;; ++attempt) {
      for (int j = 0; j < d; ++j) v[j] = rng.gaussian();
      for (int pass = 0; pass < 2; ++pass) {
        for (int q = 0; q < r; ++q) {
          const double* u = out.data() + static_cast<std::size_t>(q) * d;
          double p = 0.0;
          for (int j = 0; j < d; ++j) p += v[j] * u[j];
          for (int j = 0; j < d; ++j) v[j] -= p * u[j];
        }
      }
      double norm = 0.0;
      for (int j = 0; j < d; ++j) norm += v[j] * v[j];
      norm = std::sqrt(norm);
      if (norm > 1e-8) {
        for (int j = 0; j < d; ++j) v[j] /= norm;
        break;
      }
      if (attempt > 16) throw DimensionError("orthonormal basis collapsed");
    }
  }
  return out;
}

}  // namespace

double FeatureDictionary::max_gram_deviation() const {
  const int rows = 2 * k;
  double worst = 0.0;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < rows; ++j) {
      const double g =
          dot({vectors.data() + static_cast<std::size_t>(i) * d, (std::size_t)d},
              {vectors.data() + static_cast<std::size_t>(j) * d, (std::size_t)d});
      worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

FeatureDictionary build_feature_dictionary(int k, int d, Rng& rng) {
  if (d < 2 * k)
    throw DimensionError("feature dictionary needs d >= 2k, got d=" +
                         std::to_string(d) + " k=" + std::to_string(k));
  FeatureDictionary dict;
  dict.k = k;
  dict.d = d;
  dict.vectors = orthonormal_gaussian(2 * k, d, rng);
  return dict;
}

FeatureDictionary build_feature_dictionary(const DataConfig& cfg, Rng& rng) {
  return build_feature_dictionary(cfg.k, cfg.d, rng);
}

namespace {

// Shared generation body; the label has already been chosen.
DataPoint generate_point(const DataConfig& cfg, const FeatureDictionary& dict,
                         int label, Rng& rng) {
  DataPoint pt;
  pt.P = cfg.P;
  pt.d = cfg.d;
  pt.label = label;
  pt.patches.assign(static_cast<std::size_t>(cfg.P) * cfg.d, 0.0);

  // Signal sets: 2*C_P distinct patch slots, first half -> P_{y,1}, second
  // half -> P_{y,2}, each sorted; phi pairs them in sorted order.
  auto slots = draw_distinct(cfg.P, 2 * cfg.C_P, rng);
  pt.signal1.assign(slots.begin(), slots.begin() + cfg.C_P);
  pt.signal2.assign(slots.begin() + cfg.C_P, slots.end());
  std::sort(pt.signal1.begin(), pt.signal1.end());
  std::sort(pt.signal2.begin(), pt.signal2.end());

  const auto v1 = dict.feature(label, 1);
  const auto v2 = dict.feature(label, 2);
  const double lo = cfg.delta1;
  const double hi = cfg.delta2 - cfg.delta1;
  pt.signal_coeffs.resize(cfg.C_P);
  for (int i = 0; i < cfg.C_P; ++i) {
    const double beta = cfg.beta_law.sample(lo, hi, rng);
    pt.signal_coeffs[i] = beta;
    const double paired = cfg.delta2 - beta;
    auto p1 = pt.patch(pt.signal1[i]);
    auto p2 = pt.patch(pt.signal2[i]);
    for (int j = 0; j < cfg.d; ++j) p1[j] = beta * v1[j];
    for (int j = 0; j < cfg.d; ++j) p2[j] = paired * v2[j];
  }

  // Noise classes: Q distinct classes != label.
  auto pick = draw_distinct(cfg.k - 1, cfg.Q, rng);
  pt.noise_classes.resize(cfg.Q);
  for (int j = 0; j < cfg.Q; ++j)
    pt.noise_classes[j] = pick[j] >= label ? pick[j] + 1 : pick[j];

  pt.noise_coeffs.resize(static_cast<std::size_t>(cfg.Q) * 2);
  for (int j = 0; j < cfg.Q; ++j)
    for (int l = 0; l < 2; ++l)
      pt.noise_coeffs[2 * j + l] = rng.uniform(cfg.delta3, cfg.delta4);

  std::vector<char> is_signal(cfg.P, 0);
  for (int p : pt.signal1) is_signal[p] = 1;
  for (int p : pt.signal2) is_signal[p] = 1;
  for (int p = 0; p < cfg.P; ++p) {
    if (is_signal[p]) continue;
    auto dst = pt.patch(p);
    for (int j = 0; j < cfg.Q; ++j) {
      for (int l = 0; l < 2; ++l) {
        const double g = pt.noise_coeffs[2 * j + l];
        const auto v = dict.feature(pt.noise_classes[j], l + 1);
        for (int c = 0; c < cfg.d; ++c) dst[c] += g * v[c];
      }
    }
  }
  return pt;
}

}  // namespace

DataPoint sample_point(const DataConfig& cfg, const FeatureDictionary& dict,
                       Rng& rng) {
  const int label = static_cast<int>(rng.uniform_index(cfg.k));
  return generate_point(cfg, dict, label, rng);
}

DataPoint sample_point_with_label(const DataConfig& cfg,
                                  const FeatureDictionary& dict, int label,
                                  Rng& rng) {
  return generate_point(cfg, dict, label, rng);
}

std::vector<DataPoint> sample_dataset(const DataConfig& cfg,
                                      const FeatureDictionary& dict, int N,
                                      Rng& rng) {
  std::vector<DataPoint> out;
  out.reserve(N);
  for (int i = 0; i < N; ++i) out.push_back(sample_point(cfg, dict, rng));
  return out;
}

std::vector<SimplePoint> sample_simple_dataset(int k, int d, int N,
                                               const FeatureDictionary& dict,
                                               Rng& rng) {
  std::vector<SimplePoint> out;
  out.reserve(N);
  for (int i = 0; i < N; ++i) {
    SimplePoint sp;
    sp.label = static_cast<int>(rng.uniform_index(k));
    sp.beta = rng.uniform(0.1, 0.9);
    sp.x.assign(d, 0.0);
    const auto v1 = dict.feature(sp.label, 1);
    const auto v2 = dict.feature(sp.label, 2);
    for (int j = 0; j < d; ++j) sp.x[j] = sp.beta * v1[j] + (1.0 - sp.beta) * v2[j];
    out.push_back(std::move(sp));
  }
  return out;
}

DataPoint ablate_feature(const DataPoint& point, const FeatureDictionary& dict,
                         int y, int l) {
  if (point.label != y)
    throw LabelMismatchError("ablate_feature: point has label " +
                             std::to_string(point.label) + ", asked for " +
                             std::to_string(y));
  DataPoint out = point;
  const auto v = dict.feature(y, l);
  for (int p = 0; p < out.P; ++p) {
    auto patch = out.patch(p);
    const double proj = dot(patch, v);
    for (int j = 0; j < out.d; ++j) patch[j] -= proj * v[j];
  }
  return out;
}

std::vector<DataPoint> construct_degenerate_instance(const DataConfig& cfg,
                                                     const FeatureDictionary& dict,
                                                     int N, Rng& rng) {
  if (!(cfg.P * cfg.delta3 > cfg.delta2))
    throw ConfigError("degenerate instance needs P * delta3 > delta2");
  DataConfig degen = cfg;
  degen.Q = 1;
  degen.delta4 = degen.delta3;  // uniform(d3, d3) pins every coefficient
  std::vector<DataPoint> out;
  out.reserve(N);
  for (int i = 0; i < N; ++i) out.push_back(sample_point(degen, dict, rng));
  return out;
}

void sample_dirichlet(int L, Rng& rng, std::span<double> out) {
  double total = 0.0;
  for (int l = 0; l < L; ++l) {
    out[l] = rng.exponential();
    total += out[l];
  }
  for (int l = 0; l < L; ++l) out[l] /= total;
}

VectorDataset inject_spurious_features(const VectorDataset& ds, int L, Rng& rng) {
  if (L < 1) throw ConfigError("inject: L must be >= 1");
  int k = 0;
  for (int y : ds.labels) k = std::max(k, y + 1);
  const int extra = L - 1;
  if (ds.dim < k * extra)
    throw DimensionError("inject: cannot fit " + std::to_string(k * extra) +
                         " orthonormal spurious vectors in dimension " +
                         std::to_string(ds.dim));

  std::vector<double> basis;  // (k*extra, dim): class y owns rows y*extra..
  if (extra > 0) {
    Rng basis_rng = rng.derive("spurious-basis");
    basis = orthonormal_gaussian(k * extra, ds.dim, basis_rng);
  }

  VectorDataset out;
  out.dim = ds.dim;
  out.labels = ds.labels;
  out.items.reserve(ds.items.size());
  std::vector<double> betas(L);
  for (std::size_t i = 0; i < ds.items.size(); ++i) {
    const auto& x = ds.items[i];
    sample_dirichlet(L, rng, betas);
    const double norm = std::sqrt(dot(x, x));
    std::vector<double> xp(ds.dim);
    for (int j = 0; j < ds.dim; ++j) xp[j] = betas[0] * x[j];
    for (int l = 1; l < L; ++l) {
      const double* u = basis.data() +
                        (static_cast<std::size_t>(ds.labels[i]) * extra + (l - 1)) * ds.dim;
      const double c = norm * betas[l];
      for (int j = 0; j < ds.dim; ++j) xp[j] += c * u[j];
    }
    out.items.push_back(std::move(xp));
  }
  return out;
}

std::vector<DataPoint> strip_noise_patches(std::vector<DataPoint> points) {
  for (auto& pt : points) {
    std::vector<char> is_signal(pt.P, 0);
    for (int p : pt.signal1) is_signal[p] = 1;
    for (int p : pt.signal2) is_signal[p] = 1;
    for (int p = 0; p < pt.P; ++p) {
      if (!is_signal[p]) {
        auto patch = pt.patch(p);
        std::fill(patch.begin(), patch.end(), 0.0);
      }
    }
    pt.noise_classes.clear();
    pt.noise_coeffs.clear();
  }
  return points;
}

PatchDataset pack(std::span<const DataPoint> points) {
  PatchDataset ds;
  if (points.empty()) return ds;
  ds.N = static_cast<int>(points.size());
  ds.P = points[0].P;
  ds.d = points[0].d;
  ds.patches.reserve(static_cast<std::size_t>(ds.N) * ds.P * ds.d);
  for (const auto& pt : points) {
    if (pt.P != ds.P || pt.d != ds.d)
      throw DimensionError("pack: inconsistent patch shape across points");
    ds.patches.insert(ds.patches.end(), pt.patches.begin(), pt.patches.end());
    ds.labels.push_back(pt.label);
  }
  return ds;
}

PatchDataset pack(std::span<const SimplePoint> points) {
  PatchDataset ds;
  if (points.empty()) return ds;
  ds.N = static_cast<int>(points.size());
  ds.P = 1;
  ds.d = static_cast<int>(points[0].x.size());
  for (const auto& pt : points) {
    if (static_cast<int>(pt.x.size()) != ds.d)
      throw DimensionError("pack: inconsistent dimension across points");
    ds.patches.insert(ds.patches.end(), pt.x.begin(), pt.x.end());
    ds.labels.push_back(pt.label);
  }
  return ds;
}

}  // namespace mixview
