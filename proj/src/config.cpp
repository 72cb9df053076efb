#include "mixview/config.hpp"

#include <cmath>
#include <string>

#include "mixview/rng.hpp"

namespace mixview {

double CoeffLaw::sample(double lo, double hi, Rng& rng) const {
  switch (kind) {
    case Kind::Uniform:
      return rng.uniform(lo, hi);
    case Kind::ShiftedBeta:
      return lo + (hi - lo) * rng.beta(beta_a, beta_a);
  }
  return lo;
}

std::string CoeffLaw::name() const {
  if (kind == Kind::Uniform) return "uniform";
  return "shifted_beta(" + std::to_string(beta_a) + ")";
}

std::vector<std::string> DataConfig::validate() const {
  std::vector<std::string> errs;
  if (k < 2) errs.push_back("data.k must be >= 2");
  if (C_P < 1) errs.push_back("data.C_P must be >= 1");
  if (Q < 1) errs.push_back("data.Q must be >= 1");
  if (k >= 2 && Q > k - 1) errs.push_back("data.Q must be <= k-1");
  if (2 * C_P > P) errs.push_back("data: signal sets do not fit, need 2*C_P <= P");
  if (d < 2 * k) errs.push_back("data: d < 2k leaves no room for the feature dictionary");
  if (!(delta1 > 0.0)) errs.push_back("data.delta1 must be > 0");
  if (!(delta1 < delta2 / 2.0)) errs.push_back("data: need delta1 < delta2/2");
  if (!(delta1 < delta2 - delta1)) errs.push_back("data: empty signal support, need delta1 < delta2 - delta1");
  if (!(delta3 > 0.0)) errs.push_back("data.delta3 must be > 0");
  if (!(delta3 <= delta4)) errs.push_back("data: need delta3 <= delta4");
  if (!(delta4 < delta1)) errs.push_back("data: need delta4 < delta1 (noise below signal)");
  if (beta_law.kind == CoeffLaw::Kind::ShiftedBeta && !(beta_law.beta_a >= 1.0))
    errs.push_back("data.beta_a must be >= 1 for shifted_beta");
  return errs;
}

std::vector<std::string> NetworkConfig::validate() const {
  std::vector<std::string> errs;
  if (k < 1) errs.push_back("network.k must be >= 1");
  if (m < 1) errs.push_back("network.m must be >= 1");
  if (d < 1) errs.push_back("network.d must be >= 1");
  if (activation == Activation::SmoothedRelu) {
    if (!(rho > 0.0)) errs.push_back("network.rho must be > 0");
    if (alpha < 2) errs.push_back("network.alpha must be >= 2");
  }
  return errs;
}

std::vector<std::string> MixingSpec::validate() const {
  std::vector<std::string> errs;
  if (kind == Kind::Beta) {
    if (!(beta_a >= 1.0)) errs.push_back("mix: beta parameter must be >= 1");
    if (mc_samples < 1) errs.push_back("mix: mc_samples must be >= 1");
  }
  if (kind == Kind::Discrete) {
    if (atoms.empty()) errs.push_back("mix: discrete spec needs at least one atom");
    double total = 0.0;
    for (const auto& [lambda, weight] : atoms) {
      if (lambda < 0.0 || lambda > 1.0)
        errs.push_back("mix: lambda support must lie in [0, 1]");
      if (weight < 0.0) errs.push_back("mix: atom weights must be >= 0");
      total += weight;
    }
    if (!atoms.empty() && std::abs(total - 1.0) > 1e-12)
      errs.push_back("mix: discrete weights must sum to 1 within 1e-12");
  }
  return errs;
}

std::vector<std::string> TrainConfig::validate() const {
  std::vector<std::string> errs;
  if (!(eta >= 0.0)) errs.push_back("train.eta must be >= 0");
  if (iters < 0) errs.push_back("train.iters must be >= 0");
  if (log_every < 1) errs.push_back("train.log_every must be >= 1");
  if (!(b_threshold_mult > 0.0)) errs.push_back("train.b_threshold_mult must be > 0");
  if (!pairs.exact && pairs.samples < 1)
    errs.push_back("train.pairs: sample count must be >= 1");
  auto mix_errs = mix.validate();
  errs.insert(errs.end(), mix_errs.begin(), mix_errs.end());
  return errs;
}

std::vector<std::string> DiagConfig::validate() const {
  std::vector<std::string> errs;
  if (fresh_samples < 1) errs.push_back("diag.fresh_samples must be >= 1");
  if (!(pass_threshold > 0.0 && pass_threshold <= 1.0))
    errs.push_back("diag.pass_threshold must be in (0, 1]");
  if (!(fd_step > 0.0)) errs.push_back("diag.fd_step must be > 0");
  return errs;
}

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> errs;
  for (auto& e : data.validate()) errs.push_back(e);
  for (auto& e : network.validate()) errs.push_back(e);
  for (auto& e : train.validate()) errs.push_back(e);
  for (auto& e : diag.validate()) errs.push_back(e);
  if (data.d != network.d) errs.push_back("config: data.d != network.d");
  if (data.k != network.k) errs.push_back("config: data.k != network.k");
  if (n_train < 1) errs.push_back("run.n_train must be >= 1");
  return errs;
}

void ExperimentConfig::resolve() {
  data.seed = derive_seed(seed, "data");
  train.seed = derive_seed(seed, "train");
}

const char* to_string(Objective o) {
  switch (o) {
    case Objective::Erm: return "erm";
    case Objective::MidpointMixup: return "midpoint_mixup";
    case Objective::Mixup: return "mixup";
  }
  return "?";
}

const char* to_string(Activation a) {
  return a == Activation::SmoothedRelu ? "smoothed_relu" : "linear";
}

}  // namespace mixview
