#pragma once

#include <string>
#include <vector>

#include "mixview/config.hpp"
#include "mixview/data.hpp"
#include "mixview/losses.hpp"
#include "mixview/network.hpp"

namespace mixview {

// Proof-level trajectory statistics. Pairs (y, l) are flattened row-major
// as index 2*y + (l-1). delta is |C_{y,1} - C_{y,2}|; lead records which
// feature is ahead. s_stat is the data moment S_{y,l}, constant along the
// trajectory.
struct MetricsSnapshot {
  int k = 0;
  std::vector<double> lambda;    // (k, 2) max_r <w_{y,r}, v_{y,l}>
  std::vector<double> csum;      // (k, 2) sum over the B-set
  std::vector<int> bsize;        // (k, 2)
  std::vector<double> delta;     // k
  std::vector<int> lead;         // k, 1 or 2
  double max_offdiag = 0.0;      // max_{y,r,s!=y,l} <w_{y,r}, v_{s,l}>
  std::vector<double> d_matrix;  // (k, k) D_{y,s}
  std::vector<double> s_stat;    // (k, 2)
  double train_acc = 0.0;
};

struct TrajectoryRecord {
  int t = 0;
  double loss = 0.0;
  MetricsSnapshot metrics;
};

struct TrainResult {
  Weights weights;
  std::vector<TrajectoryRecord> records;
  bool aborted = false;
  int abort_t = -1;
  std::string abort_reason;
};

// T full-batch gradient steps w <- w - eta * grad(J) with records at t=0,
// every log_every steps, and t=T. Aborts with a diagnostic record when
// the loss or gradient turns non-finite.
TrainResult train(const Weights& init, const NetworkConfig& net,
                  const PatchDataset& ds, const FeatureDictionary& dict,
                  const TrainConfig& cfg);

// B-set membership threshold is b_threshold_mult * rho / delta1.
MetricsSnapshot compute_metrics(const Weights& w, const NetworkConfig& net,
                                const PatchDataset& ds,
                                const FeatureDictionary& dict,
                                double b_threshold_mult, double delta1 = 0.25);

// Fraction of points with argmax_s g^s(x_i) = y_i; ties go to the lowest
// class index.
double train_accuracy(const Weights& w, const NetworkConfig& net,
                      const PatchDataset& ds);

}  // namespace mixview
