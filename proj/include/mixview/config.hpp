#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace mixview {

// Law of the signal coefficients on [lo, hi]. ShiftedBeta(a) is a
// symmetric Beta(a, a) rescaled onto [lo, hi].
struct CoeffLaw {
  enum class Kind { Uniform, ShiftedBeta };
  Kind kind = Kind::Uniform;
  double beta_a = 2.0;

  double sample(double lo, double hi, class Rng& rng) const;
  std::string name() const;
};

struct DataConfig {
  int k = 10;         // classes
  int d = 256;        // ambient patch dimension
  int P = 30;         // patches per point
  int C_P = 2;        // signal patches per feature
  int Q = 2;          // feature-noise classes per point
  double delta1 = 0.25;
  double delta2 = 1.0;
  double delta3 = 0.05;
  double delta4 = 0.06;
  CoeffLaw beta_law;
  std::uint64_t seed = 0;

  // Every violated invariant, not just the first.
  std::vector<std::string> validate() const;
};

enum class Activation { SmoothedRelu, Linear };

struct NetworkConfig {
  int k = 10;
  int m = 20;       // hidden neurons per class
  int d = 256;
  double rho = 0.2;
  int alpha = 4;
  Activation activation = Activation::SmoothedRelu;

  std::vector<std::string> validate() const;
};

enum class Objective { Erm, MidpointMixup, Mixup };

// Mixing distribution D_lambda. Midpoint puts all mass on 1/2; Discrete
// is a finite list of (lambda, weight) atoms; Beta(a) is Beta(a, a)
// estimated by mc_samples seeded draws.
struct MixingSpec {
  enum class Kind { Midpoint, Beta, Discrete };
  Kind kind = Kind::Midpoint;
  double beta_a = 1.0;
  std::vector<std::pair<double, double>> atoms;  // (lambda, weight)
  int mc_samples = 32;

  std::vector<std::string> validate() const;
};

// Pair enumeration for the N^2 mixup sums: exact, or a seeded uniform
// subsample of S ordered pairs per evaluation (unbiased, approximate).
struct PairMode {
  bool exact = true;
  int samples = 0;
};

struct TrainConfig {
  double eta = 0.4;
  int iters = 300;
  Objective objective = Objective::MidpointMixup;
  MixingSpec mix;
  int log_every = 10;
  // B-set membership threshold is tau * rho / delta1; the ERM analysis
  // uses tau = 1, the Mixup analysis tau = 2. delta1 is mirrored from the
  // data config by the experiment layer.
  double b_threshold_mult = 2.0;
  double delta1 = 0.25;
  PairMode pairs;
  std::uint64_t seed = 0;

  std::vector<std::string> validate() const;
};

struct DiagConfig {
  int fresh_samples = 100;      // M
  double pass_threshold = 0.95; // theta
  double fd_step = 1e-5;

  std::vector<std::string> validate() const;
};

// Which generator feeds training: the patch-based multi-view
// distribution, or the single-vector simple setting.
enum class DataKind { Patch, Simple };

struct ExperimentConfig {
  DataConfig data;
  NetworkConfig network;
  TrainConfig train;
  DiagConfig diag;
  DataKind data_kind = DataKind::Patch;
  int n_train = 128;
  std::string out_dir = "out";
  std::uint64_t seed = 1;

  // Cross-section consistency plus all per-section violations.
  std::vector<std::string> validate() const;

  // Propagates the root seed into the per-purpose streams and mirrors the
  // shared k/d fields into the sub-configs.
  void resolve();
};

const char* to_string(Objective o);
const char* to_string(Activation a);

}  // namespace mixview
