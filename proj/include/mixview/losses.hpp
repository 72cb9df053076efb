#pragma once

#include <Eigen/Core>
#include <span>
#include <utility>
#include <vector>

#include "mixview/config.hpp"
#include "mixview/data.hpp"
#include "mixview/network.hpp"

namespace mixview {

// Shift-invariant softmax (max subtraction).
void softmax(std::span<const double> logits, std::span<double> out);
// logit - logsumexp; preferred over log(softmax(x)) at saturation.
void log_softmax(std::span<const double> logits, std::span<double> out);

// Patchwise average of two points, with both parent labels kept.
struct MixedPoint {
  int P = 0;
  int d = 0;
  std::vector<double> patches;
  int label_i = 0;
  int label_j = 0;
};
MixedPoint midpoint(const DataPoint& a, const DataPoint& b);

// Per ordered pair (i, j): -(log phi^{y_i}(g(z_ij)) + log phi^{y_j}(g(z_ij))).
// objective_mean() applies the 1/(2N^2) normalization of the midpoint
// objective, so it reproduces the loss value.
struct PairTermTable {
  int N = 0;
  std::vector<double> terms;  // (N, N) row-major
  std::vector<int> labels;

  double term(int i, int j) const { return terms[static_cast<std::size_t>(i) * N + j]; }
  double objective_mean() const;
};

struct GradResult {
  double loss = 0.0;
  std::vector<double> grad;  // (k, m, d), same layout as Weights::w
};

double erm_loss(const Weights& w, const NetworkConfig& cfg, const PatchDataset& ds);
GradResult erm_loss_gradient(const Weights& w, const NetworkConfig& cfg,
                             const PatchDataset& ds);

std::pair<double, PairTermTable> midpoint_mixup_loss(const Weights& w,
                                                     const NetworkConfig& cfg,
                                                     const PatchDataset& ds);
GradResult midpoint_mixup_gradient(const Weights& w, const NetworkConfig& cfg,
                                   const PatchDataset& ds);

// Eq.-2 style mixup loss for an arbitrary mixing law: exact for Midpoint
// and Discrete specs, seeded Monte Carlo over mc_samples draws for Beta.
double mixup_loss(const Weights& w, const NetworkConfig& cfg,
                  const PatchDataset& ds, const MixingSpec& mix, Rng& rng);

// Unbiased pair-subsampled estimate of the midpoint-mixup gradient from S
// seeded ordered-pair draws.
GradResult midpoint_mixup_gradient_sampled(const Weights& w,
                                           const NetworkConfig& cfg,
                                           const PatchDataset& ds, int S,
                                           Rng& rng);

// Expands a MixingSpec into the (lambda, weight) atoms used by the
// kernel; Beta draws mc_samples from rng.
std::vector<std::pair<double, double>> resolve_mixing_atoms(const MixingSpec& mix,
                                                            Rng& rng);

// Shared kernel behind the loss/gradient entry points. Holds the patch
// matrix view and scratch buffers so the trainer can reuse them across
// iterations; the free functions above construct one per call, which
// keeps every caller on the identical arithmetic path.
class LossKernel {
 public:
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  LossKernel(const NetworkConfig& cfg, const PatchDataset& ds);

  // Loss of the requested objective; fills *grad (k*m*d) when non-null.
  double erm(const Weights& w, std::vector<double>* grad);
  double midpoint_mixup(const Weights& w, std::vector<double>* grad,
                        PairTermTable* table = nullptr);
  double midpoint_mixup_sampled(const Weights& w, int S, Rng& rng,
                                std::vector<double>* grad);
  // Eq.-2 mixup over an explicit (lambda, weight) atom list; full ordered
  // pair enumeration since z_ij(lambda) is asymmetric.
  double mixup_general(const Weights& w,
                       std::span<const std::pair<double, double>> atoms,
                       std::vector<double>* grad);

 private:
  void compute_preacts(const Weights& w);  // U = X W^T
  // Pair loss term for (i, j); row_weight >= 0 also accumulates the
  // gradient assembly rows (see the definition for the convention).
  double accumulate_pair(int i, int j, double row_weight);

  const NetworkConfig& cfg_;
  const PatchDataset& ds_;
  int km_ = 0;
  RowMat U_;             // (N*P, k*m) patch pre-activations
  RowMat A_;             // (N*P, k*m) gradient assembly coefficients
  std::vector<double> h_;       // (P, k*m) mixed pre-activations
  std::vector<double> logits_;  // k
  std::vector<double> lsm_;     // k
  std::vector<double> coeff_;   // k
};

}  // namespace mixview
