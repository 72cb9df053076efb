#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "mixview/config.hpp"
#include "mixview/rng.hpp"

namespace mixview {

// The 2k orthonormal feature vectors v_{y,l}, y in [k], l in {1, 2},
// stored row-major as rows 2*y + (l-1) of a (2k, d) matrix.
struct FeatureDictionary {
  int k = 0;
  int d = 0;
  std::vector<double> vectors;

  std::span<const double> feature(int y, int l) const {
    return {vectors.data() + (2 * y + (l - 1)) * static_cast<std::size_t>(d),
            static_cast<std::size_t>(d)};
  }
  // max |<v_i, v_j> - [i == j]| over all row pairs.
  double max_gram_deviation() const;
};

// One sampled multi-view point: P patches of dimension d plus the full
// generation record (signal sets, pairing, coefficients, noise classes).
// signal1[idx] pairs with signal2[idx] under the bijection phi, and
// signal_coeffs[idx] is the v_{y,1} coefficient of patch signal1[idx];
// the paired patch carries delta2 - signal_coeffs[idx] on v_{y,2}.
struct DataPoint {
  int P = 0;
  int d = 0;
  std::vector<double> patches;
  int label = 0;
  std::vector<int> signal1;
  std::vector<int> signal2;
  std::vector<double> signal_coeffs;
  std::vector<int> noise_classes;
  std::vector<double> noise_coeffs;  // (Q, 2) row-major

  std::span<const double> patch(int p) const {
    return {patches.data() + p * static_cast<std::size_t>(d),
            static_cast<std::size_t>(d)};
  }
  std::span<double> patch(int p) {
    return {patches.data() + p * static_cast<std::size_t>(d),
            static_cast<std::size_t>(d)};
  }
};

// Point of the simple (single-vector) setting: x = beta v_{y,1} + (1-beta) v_{y,2}.
struct SimplePoint {
  std::vector<double> x;
  int label = 0;
  double beta = 0.0;
};

// Plain labeled vectors; carrier for the spurious-feature injection.
struct VectorDataset {
  int dim = 0;
  std::vector<std::vector<double>> items;
  std::vector<int> labels;
};

// Contiguous numeric view of a dataset: row (i*P + p) of `patches` is
// patch p of point i. The network, loss, and trainer kernels all consume
// this form.
struct PatchDataset {
  int N = 0;
  int P = 0;
  int d = 0;
  std::vector<double> patches;
  std::vector<int> labels;

  std::span<const double> patch(int i, int p) const {
    return {patches.data() + (static_cast<std::size_t>(i) * P + p) * d,
            static_cast<std::size_t>(d)};
  }
  std::span<const double> point(int i) const {
    return {patches.data() + static_cast<std::size_t>(i) * P * d,
            static_cast<std::size_t>(P) * d};
  }
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LabelMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Orthonormalizes a seeded Gaussian d x 2k draw (modified Gram-Schmidt,
// two passes). Throws DimensionError when d < 2k.
FeatureDictionary build_feature_dictionary(int k, int d, Rng& rng);
FeatureDictionary build_feature_dictionary(const DataConfig& cfg, Rng& rng);

DataPoint sample_point(const DataConfig& cfg, const FeatureDictionary& dict,
                       Rng& rng);
// As sample_point but with the label fixed; used by the feature-learning
// diagnostics, which need fresh class-conditional draws.
DataPoint sample_point_with_label(const DataConfig& cfg,
                                  const FeatureDictionary& dict, int label,
                                  Rng& rng);

std::vector<DataPoint> sample_dataset(const DataConfig& cfg,
                                      const FeatureDictionary& dict, int N,
                                      Rng& rng);

std::vector<SimplePoint> sample_simple_dataset(int k, int d, int N,
                                               const FeatureDictionary& dict,
                                               Rng& rng);

// Removes the v_{y,l} component of every patch by projection. Throws
// LabelMismatchError when point.label != y.
DataPoint ablate_feature(const DataPoint& point, const FeatureDictionary& dict,
                         int y, int l);

// Appendix-C style instance: one noise class per point, all noise
// coefficients pinned to delta3 (= delta4). Requires P * delta3 > delta2.
std::vector<DataPoint> construct_degenerate_instance(const DataConfig& cfg,
                                                     const FeatureDictionary& dict,
                                                     int N, Rng& rng);

// x' = beta_1 x + ||x|| sum_{l=2..L} beta_l u_{y,l} with (beta_1..beta_L)
// Dirichlet(1,...,1) drawn per item and the u_{y,l} a fresh orthonormal
// set of k*(L-1) seeded Gaussian vectors. Throws DimensionError when the
// basis does not fit.
VectorDataset inject_spurious_features(const VectorDataset& ds, int L, Rng& rng);

// Zeroes the feature-noise patches; keeps only signal. Used to build the
// linearly separable control instance for the separability probe.
std::vector<DataPoint> strip_noise_patches(std::vector<DataPoint> points);

PatchDataset pack(std::span<const DataPoint> points);
// Simple points become single-patch points.
PatchDataset pack(std::span<const SimplePoint> points);

// Dirichlet(1^L) by normalizing unit-rate exponentials.
void sample_dirichlet(int L, Rng& rng, std::span<double> out);

}  // namespace mixview
