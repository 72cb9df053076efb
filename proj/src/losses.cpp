#include "mixview/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mixview {

namespace {

void check_nonempty(const PatchDataset& ds, const char* who) {
  if (ds.N < 1) throw std::invalid_argument(std::string(who) + ": empty dataset");
}

void check_finite(std::span<const double> x, const char* who) {
  for (double v : x)
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(who) + ": non-finite input");
}

// Unvalidated logit - logsumexp for the kernel paths: an overflow mid-
// training must surface as a non-finite loss (the trainer's abort path),
// not an exception from inside the kernel.
void lsm_raw(std::span<const double> logits, std::span<double> out) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) total += std::exp(logits[i] - mx);
  const double lse = mx + std::log(total);
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
}

}  // namespace

void softmax(std::span<const double> logits, std::span<double> out) {
  check_finite(logits, "softmax");
  const double mx = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    total += out[i];
  }
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] /= total;
}

void log_softmax(std::span<const double> logits, std::span<double> out) {
  check_finite(logits, "log_softmax");
  const double mx = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) total += std::exp(logits[i] - mx);
  const double lse = mx + std::log(total);
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
}

MixedPoint midpoint(const DataPoint& a, const DataPoint& b) {
  if (a.P != b.P || a.d != b.d)
    throw DimensionError("midpoint: mismatched patch structure");
  MixedPoint z;
  z.P = a.P;
  z.d = a.d;
  z.label_i = a.label;
  z.label_j = b.label;
  z.patches.resize(a.patches.size());
  for (std::size_t i = 0; i < a.patches.size(); ++i)
    z.patches[i] = 0.5 * (a.patches[i] + b.patches[i]);
  return z;
}

double PairTermTable::objective_mean() const {
  double total = 0.0;
  for (double t : terms) total += t;
  return total / (2.0 * static_cast<double>(N) * static_cast<double>(N));
}

LossKernel::LossKernel(const NetworkConfig& cfg, const PatchDataset& ds)
    : cfg_(cfg), ds_(ds), km_(cfg.k * cfg.m) {
  if (ds.d != cfg.d) throw DimensionError("LossKernel: dataset d != network d");
  U_.resize(static_cast<Eigen::Index>(ds.N) * ds.P, km_);
  A_.resize(static_cast<Eigen::Index>(ds.N) * ds.P, km_);
  h_.resize(static_cast<std::size_t>(ds.P) * km_);
  logits_.resize(cfg.k);
  lsm_.resize(cfg.k);
  coeff_.resize(cfg.k);
}

void LossKernel::compute_preacts(const Weights& w) {
  if (w.k != cfg_.k || w.m != cfg_.m || w.d != cfg_.d)
    throw DimensionError("LossKernel: weight shape does not match config");
  Eigen::Map<const RowMat> X(ds_.patches.data(),
                             static_cast<Eigen::Index>(ds_.N) * ds_.P, ds_.d);
  Eigen::Map<const RowMat> W(w.w.data(), km_, cfg_.d);
  U_.noalias() = X * W.transpose();
}

// One mixed pair (i, j): mixed pre-activations, logits, and the pair loss
// term. With row_weight >= 0, also adds row_weight * c * act' into the A
// rows of BOTH parents; each ordered copy of a pair owes c*act'/2 per
// parent, so the exact sweep passes 1.0 off the diagonal (two ordered
// copies) and 0.5 on it, while ordered sampling always passes 0.5.
double LossKernel::accumulate_pair(int i, int j, double row_weight) {
  const int P = ds_.P;
  const int k = cfg_.k;
  const int m = cfg_.m;
  const double* Ui = U_.data() + static_cast<std::size_t>(i) * P * km_;
  const double* Uj = U_.data() + static_cast<std::size_t>(j) * P * km_;

  for (std::size_t t = 0; t < h_.size(); ++t) h_[t] = 0.5 * (Ui[t] + Uj[t]);

  const bool linear = cfg_.activation == Activation::Linear;
  const double rho = cfg_.rho;
  const int alpha = cfg_.alpha;

  std::fill(logits_.begin(), logits_.end(), 0.0);
  for (int p = 0; p < P; ++p) {
    const double* hp = h_.data() + static_cast<std::size_t>(p) * km_;
    for (int y = 0; y < k; ++y) {
      double acc = 0.0;
      if (linear) {
        for (int r = 0; r < m; ++r) acc += hp[y * m + r];
      } else {
        for (int r = 0; r < m; ++r) acc += smoothed_relu(hp[y * m + r], rho, alpha);
      }
      logits_[y] += acc;
    }
  }

  lsm_raw(logits_, lsm_);
  const int yi = ds_.labels[i];
  const int yj = ds_.labels[j];
  const double term = -(lsm_[yi] + lsm_[yj]);

  if (row_weight >= 0.0) {
    for (int y = 0; y < k; ++y) {
      double c = -2.0 * std::exp(lsm_[y]);
      if (y == yi) c += 1.0;
      if (y == yj) c += 1.0;
      coeff_[y] = c * row_weight;
    }
    double* Ai = A_.data() + static_cast<std::size_t>(i) * P * km_;
    double* Aj = A_.data() + static_cast<std::size_t>(j) * P * km_;
    for (int p = 0; p < P; ++p) {
      const double* hp = h_.data() + static_cast<std::size_t>(p) * km_;
      double* ai = Ai + static_cast<std::size_t>(p) * km_;
      double* aj = Aj + static_cast<std::size_t>(p) * km_;
      for (int y = 0; y < k; ++y) {
        const double c = coeff_[y];
        if (linear) {
          for (int r = 0; r < m; ++r) {
            ai[y * m + r] += c;
            aj[y * m + r] += c;
          }
        } else {
          for (int r = 0; r < m; ++r) {
            const double cs = c * smoothed_relu_deriv(hp[y * m + r], rho, alpha);
            ai[y * m + r] += cs;
            aj[y * m + r] += cs;
          }
        }
      }
    }
  }
  return term;
}

double LossKernel::midpoint_mixup(const Weights& w, std::vector<double>* grad,
                                  PairTermTable* table) {
  check_nonempty(ds_, "midpoint_mixup");
  compute_preacts(w);
  const int N = ds_.N;
  if (grad) A_.setZero();
  if (table) {
    table->N = N;
    table->labels = ds_.labels;
    table->terms.assign(static_cast<std::size_t>(N) * N, 0.0);
  }

  double loss = 0.0;
  for (int i = 0; i < N; ++i) {
    for (int j = i; j < N; ++j) {
      const double rw = grad ? (i == j ? 0.5 : 1.0) : -1.0;
      const double term = accumulate_pair(i, j, rw);
      loss += (i == j ? 1.0 : 2.0) * term;
      if (table) {
        table->terms[static_cast<std::size_t>(i) * N + j] = term;
        table->terms[static_cast<std::size_t>(j) * N + i] = term;
      }
    }
  }
  const double scale = 1.0 / (2.0 * static_cast<double>(N) * static_cast<double>(N));
  loss *= scale;

  if (grad) {
    grad->resize(w.w.size());
    Eigen::Map<const RowMat> X(ds_.patches.data(),
                               static_cast<Eigen::Index>(N) * ds_.P, ds_.d);
    Eigen::Map<RowMat> G(grad->data(), km_, cfg_.d);
    G.noalias() = A_.transpose() * X;
    G *= -scale;
  }
  return loss;
}

double LossKernel::erm(const Weights& w, std::vector<double>* grad) {
  check_nonempty(ds_, "erm");
  compute_preacts(w);
  const int N = ds_.N;
  const int P = ds_.P;
  const int k = cfg_.k;
  const int m = cfg_.m;
  if (grad) A_.setZero();

  double loss = 0.0;
  for (int i = 0; i < N; ++i) {
    const double* Ui = U_.data() + static_cast<std::size_t>(i) * P * km_;
    std::fill(logits_.begin(), logits_.end(), 0.0);
    for (int p = 0; p < P; ++p) {
      const double* up = Ui + static_cast<std::size_t>(p) * km_;
      for (int y = 0; y < k; ++y) {
        double acc = 0.0;
        for (int r = 0; r < m; ++r) acc += activate(up[y * m + r], cfg_);
        logits_[y] += acc;
      }
    }
    lsm_raw(logits_, lsm_);
    loss -= lsm_[ds_.labels[i]];

    if (grad) {
      for (int y = 0; y < k; ++y)
        coeff_[y] = (y == ds_.labels[i] ? 1.0 : 0.0) - std::exp(lsm_[y]);
      double* Ai = A_.data() + static_cast<std::size_t>(i) * P * km_;
      for (int p = 0; p < P; ++p) {
        const double* up = Ui + static_cast<std::size_t>(p) * km_;
        double* ap = Ai + static_cast<std::size_t>(p) * km_;
        for (int y = 0; y < k; ++y) {
          const double c = coeff_[y];
          for (int r = 0; r < m; ++r)
            ap[y * m + r] += c * activate_deriv(up[y * m + r], cfg_);
        }
      }
    }
  }
  loss /= N;

  if (grad) {
    grad->resize(w.w.size());
    Eigen::Map<const RowMat> X(ds_.patches.data(),
                               static_cast<Eigen::Index>(N) * P, ds_.d);
    Eigen::Map<RowMat> G(grad->data(), km_, cfg_.d);
    G.noalias() = A_.transpose() * X;
    G *= -1.0 / N;
  }
  return loss;
}

double LossKernel::midpoint_mixup_sampled(const Weights& w, int S, Rng& rng,
                                          std::vector<double>* grad) {
  check_nonempty(ds_, "midpoint_mixup_sampled");
  if (S < 1) throw std::invalid_argument("midpoint_mixup_sampled: S must be >= 1");
  compute_preacts(w);
  const int N = ds_.N;
  if (grad) A_.setZero();

  double loss = 0.0;
  for (int s = 0; s < S; ++s) {
    const int i = static_cast<int>(rng.uniform_index(N));
    const int j = static_cast<int>(rng.uniform_index(N));
    loss += accumulate_pair(i, j, grad ? 0.5 : -1.0);
  }
  const double scale = 1.0 / (2.0 * static_cast<double>(S));
  loss *= scale;

  if (grad) {
    grad->resize(w.w.size());
    Eigen::Map<const RowMat> X(ds_.patches.data(),
                               static_cast<Eigen::Index>(N) * ds_.P, ds_.d);
    Eigen::Map<RowMat> G(grad->data(), km_, cfg_.d);
    G.noalias() = A_.transpose() * X;
    G *= -scale;
  }
  return loss;
}

double erm_loss(const Weights& w, const NetworkConfig& cfg, const PatchDataset& ds) {
  LossKernel kernel(cfg, ds);
  return kernel.erm(w, nullptr);
}

GradResult erm_loss_gradient(const Weights& w, const NetworkConfig& cfg,
                             const PatchDataset& ds) {
  LossKernel kernel(cfg, ds);
  GradResult out;
  out.loss = kernel.erm(w, &out.grad);
  return out;
}

std::pair<double, PairTermTable> midpoint_mixup_loss(const Weights& w,
                                                     const NetworkConfig& cfg,
                                                     const PatchDataset& ds) {
  LossKernel kernel(cfg, ds);
  PairTermTable table;
  const double loss = kernel.midpoint_mixup(w, nullptr, &table);
  return {loss, std::move(table)};
}

GradResult midpoint_mixup_gradient(const Weights& w, const NetworkConfig& cfg,
                                   const PatchDataset& ds) {
  LossKernel kernel(cfg, ds);
  GradResult out;
  out.loss = kernel.midpoint_mixup(w, &out.grad);
  return out;
}

GradResult midpoint_mixup_gradient_sampled(const Weights& w,
                                           const NetworkConfig& cfg,
                                           const PatchDataset& ds, int S,
                                           Rng& rng) {
  LossKernel kernel(cfg, ds);
  GradResult out;
  out.loss = kernel.midpoint_mixup_sampled(w, S, rng, &out.grad);
  return out;
}

double LossKernel::mixup_general(const Weights& w,
                                 std::span<const std::pair<double, double>> atoms,
                                 std::vector<double>* grad) {
  check_nonempty(ds_, "mixup_general");
  if (atoms.empty()) throw std::invalid_argument("mixup_general: no atoms");
  compute_preacts(w);
  const int N = ds_.N;
  const int P = ds_.P;
  const int k = cfg_.k;
  const int m = cfg_.m;
  if (grad) A_.setZero();

  double loss = 0.0;
  for (int i = 0; i < N; ++i) {
    const double* Ui = U_.data() + static_cast<std::size_t>(i) * P * km_;
    double* Ai = A_.data() + static_cast<std::size_t>(i) * P * km_;
    for (int j = 0; j < N; ++j) {
      const double* Uj = U_.data() + static_cast<std::size_t>(j) * P * km_;
      double* Aj = A_.data() + static_cast<std::size_t>(j) * P * km_;
      const int yi = ds_.labels[i];
      const int yj = ds_.labels[j];
      for (const auto& [lambda, weight] : atoms) {
        for (std::size_t t = 0; t < h_.size(); ++t)
          h_[t] = lambda * Ui[t] + (1.0 - lambda) * Uj[t];
        std::fill(logits_.begin(), logits_.end(), 0.0);
        for (int p = 0; p < P; ++p) {
          const double* hp = h_.data() + static_cast<std::size_t>(p) * km_;
          for (int y = 0; y < k; ++y) {
            double acc = 0.0;
            for (int r = 0; r < m; ++r) acc += activate(hp[y * m + r], cfg_);
            logits_[y] += acc;
          }
        }
        lsm_raw(logits_, lsm_);
        loss -= weight * (lambda * lsm_[yi] + (1.0 - lambda) * lsm_[yj]);

        if (grad) {
          for (int y = 0; y < k; ++y) {
            double c = -std::exp(lsm_[y]);
            if (y == yi) c += lambda;
            if (y == yj) c += 1.0 - lambda;
            coeff_[y] = c * weight;
          }
          for (int p = 0; p < P; ++p) {
            const double* hp = h_.data() + static_cast<std::size_t>(p) * km_;
            double* ai = Ai + static_cast<std::size_t>(p) * km_;
            double* aj = Aj + static_cast<std::size_t>(p) * km_;
            for (int y = 0; y < k; ++y) {
              const double c = coeff_[y];
              for (int r = 0; r < m; ++r) {
                const double cs = c * activate_deriv(hp[y * m + r], cfg_);
                ai[y * m + r] += cs * lambda;
                aj[y * m + r] += cs * (1.0 - lambda);
              }
            }
          }
        }
      }
    }
  }
  const double scale = 1.0 / (static_cast<double>(N) * static_cast<double>(N));
  loss *= scale;

  if (grad) {
    grad->resize(w.w.size());
    Eigen::Map<const RowMat> X(ds_.patches.data(),
                               static_cast<Eigen::Index>(N) * P, ds_.d);
    Eigen::Map<RowMat> G(grad->data(), km_, cfg_.d);
    G.noalias() = A_.transpose() * X;
    G *= -scale;
  }
  return loss;
}

std::vector<std::pair<double, double>> resolve_mixing_atoms(const MixingSpec& mix,
                                                            Rng& rng) {
  switch (mix.kind) {
    case MixingSpec::Kind::Midpoint:
      return {{0.5, 1.0}};
    case MixingSpec::Kind::Discrete:
      return mix.atoms;
    case MixingSpec::Kind::Beta: {
      std::vector<std::pair<double, double>> atoms;
      const double wgt = 1.0 / mix.mc_samples;
      for (int s = 0; s < mix.mc_samples; ++s)
        atoms.emplace_back(rng.beta(mix.beta_a, mix.beta_a), wgt);
      return atoms;
    }
  }
  return {};
}

double mixup_loss(const Weights& w, const NetworkConfig& cfg,
                  const PatchDataset& ds, const MixingSpec& mix, Rng& rng) {
  check_nonempty(ds, "mixup_loss");
  auto errs = mix.validate();
  if (!errs.empty()) throw ConfigError("mixup_loss: " + errs.front());
  const auto atoms = resolve_mixing_atoms(mix, rng);
  LossKernel kernel(cfg, ds);
  return kernel.mixup_general(w, atoms, nullptr);
}

}  // namespace mixview
