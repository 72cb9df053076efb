#pragma once

#include <string>
#include <vector>

#include "mixview/config.hpp"
#include "mixview/data.hpp"
#include "mixview/network.hpp"

namespace mixview {

// --- feature learning ------------------------------------------------------

struct FeatureLearningReport {
  int k = 0;
  std::vector<int> learned;       // (k, 2) flags
  std::vector<double> estimates;  // (k, 2) ablated-accuracy estimates
  int counts[3] = {0, 0, 0};      // classes with 0 / 1 / 2 features learned
  int M = 0;
  double theta = 0.0;
};

// Draws M fresh class-y points, zeroes feature v_{y,3-l} out of them (so
// only v_{y,l} signal remains), classifies, and calls the feature learned
// when the correct fraction reaches theta.
std::pair<bool, double> feature_learned(const Weights& w, const NetworkConfig& net,
                                        const FeatureDictionary& dict,
                                        const DataConfig& data, int y, int l,
                                        int M, double theta, Rng& rng);

FeatureLearningReport feature_learning_report(const Weights& w,
                                              const NetworkConfig& net,
                                              const FeatureDictionary& dict,
                                              const DataConfig& data, int M,
                                              double theta, Rng& rng);

// --- alignment (Lemma 2.1) -------------------------------------------------

struct AlignmentGap {
  double max = 0.0;
  double mean = 0.0;
  long pairs = 0;
};

// Statistics of |g^{y_i}(z_ij) - g^{y_j}(z_ij)| over cross-class pairs.
// Throws when the dataset has a single class.
AlignmentGap alignment_gap(const Weights& w, const NetworkConfig& net,
                           const PatchDataset& ds);

// --- gradient certification --------------------------------------------------

struct FdCheckResult {
  double max_err = 0.0;  // relative where |analytic| > 1e-8, absolute below
  // As max_err, but a coordinate whose absolute deviation is within the
  // f64 central-difference noise floor (1e-9) counts as exact. At h=1e-5
  // the FD measurement itself carries ~1e-10 of absolute noise, which
  // dominates the relative error of any coordinate below ~1e-5.
  double max_err_floored = 0.0;
  long coords_checked = 0;
  double h = 0.0;
};

// Central finite differences of the objective against the analytic
// gradient, over every coordinate or a seeded subsample of 10^4 when the
// weight tensor is larger than that.
FdCheckResult finite_difference_check(const Weights& w, const NetworkConfig& net,
                                      const PatchDataset& ds, Objective objective,
                                      double h, Rng& rng);

// --- Assumption (f_y monotone) verifier --------------------------------------

struct MonotonicityReport {
  std::string dist;
  int C_P = 0;
  int alpha = 0;
  int samples = 0;
  std::vector<double> bin_edges;  // bins + 1 values of x
  std::vector<double> bin_means;  // estimated f_y per bin
  double rank_correlation = 0.0;
};

// Samples `samples` sets of C_P coefficients from the law on [lo, hi],
// forms (x, sum beta^alpha / x), bins by x into equal-count bins, and
// reports the Spearman correlation of bin means against bin order.
MonotonicityReport verify_assumption_monotone(const CoeffLaw& law, double lo,
                                              double hi, int C_P, int alpha,
                                              int samples, int bins, Rng& rng);

// --- warm-up (linear model) gradient probes ----------------------------------

// Correlations of the negative objective gradient for the designated
// class with its two features, computed exactly in feature-coefficient
// space (the probe weights live in the dictionary span and are
// cross-class orthogonal by construction). mm_floor_v2 is the same-class
// -pair component of the midpoint-mixup correlation: the part the Mixup
// Gradient Lower Bound actually guarantees, and the series the scaling
// fit runs on.
struct ProbeResult {
  int k = 0;
  double delta = 0.0;  // a - b = C log k
  double erm_v1 = 0.0, erm_v2 = 0.0;
  double mm_v1 = 0.0, mm_v2 = 0.0;
  double mm_floor_v1 = 0.0, mm_floor_v2 = 0.0;
};

ProbeResult linear_gradient_probe(int k, int N, double gap_mult, Rng& rng);
// Same computation on caller-provided coefficients; used for the
// exchange-symmetry checks and the dual-route test.
ProbeResult linear_gradient_probe_from(int k, double gap_mult,
                                       const std::vector<double>& betas,
                                       const std::vector<int>& labels);

struct ProbeSeries {
  std::vector<int> ks;
  std::vector<ProbeResult> points;
  double mm_floor_slope = 0.0;  // least-squares log-log fit over ks
};

ProbeSeries linear_probe_series(const std::vector<int>& ks, int N, double gap_mult,
                                Rng& rng);

// --- linear separability probe ----------------------------------------------

struct SeparabilityResult {
  bool separable = false;
  std::vector<double> witness;  // (k, d) over patch sums, when separable
  double final_hinge = 0.0;     // mean hinge residual otherwise
  long updates_used = 0;
};

// Multiclass perceptron / hinge subgradient on patch sums with step
// 1/sqrt(t). Returns a re-verified strict witness, or the residual after
// the update budget. Best-effort refutation only.
SeparabilityResult separability_probe(const PatchDataset& ds, long budget,
                                      double margin);

}  // namespace mixview
