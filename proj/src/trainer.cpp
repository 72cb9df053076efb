#include "mixview/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mixview/network.hpp"

namespace mixview {

namespace {

// x^n, n >= 0.
double ipow(double x, int n) {
  double out = 1.0;
  while (n > 0) {
    if (n & 1) out *= x;
    x *= x;
    n >>= 1;
  }
  return out;
}

bool all_finite(std::span<const double> xs) {
  for (double x : xs)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

double train_accuracy(const Weights& w, const NetworkConfig& net,
                      const PatchDataset& ds) {
  if (ds.N < 1) throw std::invalid_argument("train_accuracy: empty dataset");
  int correct = 0;
  for (int i = 0; i < ds.N; ++i) {
    const auto logits = forward(w, net, ds, i);
    int best = 0;
    for (int y = 1; y < net.k; ++y)
      if (logits[y] > logits[best]) best = y;  // ties keep the lower index
    if (best == ds.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / ds.N;
}

MetricsSnapshot compute_metrics(const Weights& w, const NetworkConfig& net,
                                const PatchDataset& ds,
                                const FeatureDictionary& dict,
                                double b_threshold_mult, double delta1) {
  MetricsSnapshot out;
  const int k = net.k;
  const int m = net.m;
  out.k = k;
  out.lambda.assign(2 * k, 0.0);
  out.csum.assign(2 * k, 0.0);
  out.bsize.assign(2 * k, 0);
  out.delta.assign(k, 0.0);
  out.lead.assign(k, 1);
  out.d_matrix.assign(static_cast<std::size_t>(k) * k, 0.0);
  out.s_stat.assign(2 * k, 0.0);

  // All weight/feature correlations in one pass.
  const double threshold = b_threshold_mult * net.rho / delta1;
  std::vector<double> corr(static_cast<std::size_t>(k) * m * 2 * k);
  for (int y = 0; y < k; ++y) {
    for (int r = 0; r < m; ++r) {
      const auto wrow = w.row(y, r);
      for (int s = 0; s < k; ++s) {
        for (int l = 0; l < 2; ++l) {
          const auto v = dict.feature(s, l + 1);
          double acc = 0.0;
          for (int j = 0; j < w.d; ++j) acc += wrow[j] * v[j];
          corr[((static_cast<std::size_t>(y) * m + r) * 2 * k) + 2 * s + l] = acc;
        }
      }
    }
  }

  double offdiag = -std::numeric_limits<double>::infinity();
  for (int y = 0; y < k; ++y) {
    for (int l = 0; l < 2; ++l) {
      double best = -std::numeric_limits<double>::infinity();
      double csum = 0.0;
      int bsz = 0;
      for (int r = 0; r < m; ++r) {
        const double c = corr[((static_cast<std::size_t>(y) * m + r) * 2 * k) + 2 * y + l];
        best = std::max(best, c);
        if (c >= threshold) {
          csum += c;
          ++bsz;
        }
      }
      out.lambda[2 * y + l] = best;
      out.csum[2 * y + l] = csum;
      out.bsize[2 * y + l] = bsz;
    }
    for (int r = 0; r < m; ++r)
      for (int s = 0; s < k; ++s)
        if (s != y)
          for (int l = 0; l < 2; ++l)
            offdiag = std::max(
                offdiag,
                corr[((static_cast<std::size_t>(y) * m + r) * 2 * k) + 2 * s + l]);
  }
  out.max_offdiag = offdiag;

  for (int y = 0; y < k; ++y) {
    const double c1 = out.csum[2 * y];
    const double c2 = out.csum[2 * y + 1];
    out.delta[y] = std::abs(c1 - c2);
    out.lead[y] = c1 >= c2 ? 1 : 2;
  }
  for (int y = 0; y < k; ++y)
    for (int s = 0; s < k; ++s)
      out.d_matrix[static_cast<std::size_t>(y) * k + s] =
          (out.csum[2 * y] + out.csum[2 * y + 1]) -
          (out.csum[2 * s] + out.csum[2 * s + 1]);

  // S_{y,l}: mean over the dataset of the alpha-moments of the positive
  // feature projections of own-class patches.
  for (int i = 0; i < ds.N; ++i) {
    const int y = ds.labels[i];
    for (int l = 0; l < 2; ++l) {
      const auto v = dict.feature(y, l + 1);
      for (int p = 0; p < ds.P; ++p) {
        const auto xp = ds.patch(i, p);
        double beta = 0.0;
        for (int j = 0; j < ds.d; ++j) beta += xp[j] * v[j];
        if (beta > 0.0) out.s_stat[2 * y + l] += ipow(beta, net.alpha);
      }
    }
  }
  for (auto& s : out.s_stat) s /= ds.N;

  out.train_acc = train_accuracy(w, net, ds);
  return out;
}

TrainResult train(const Weights& init, const NetworkConfig& net,
                  const PatchDataset& ds, const FeatureDictionary& dict,
                  const TrainConfig& cfg) {
  TrainResult result;
  result.weights = init;
  Weights& w = result.weights;

  LossKernel kernel(net, ds);
  Rng rng(cfg.seed);
  std::vector<double> grad;

  const int T = cfg.iters;
  for (int t = 0; t <= T; ++t) {
    const bool last = (t == T);
    double loss = 0.0;
    switch (cfg.objective) {
      case Objective::Erm:
        loss = kernel.erm(w, last ? nullptr : &grad);
        break;
      case Objective::MidpointMixup:
        if (cfg.pairs.exact)
          loss = kernel.midpoint_mixup(w, last ? nullptr : &grad);
        else
          loss = kernel.midpoint_mixup_sampled(w, cfg.pairs.samples, rng,
                                               last ? nullptr : &grad);
        break;
      case Objective::Mixup: {
        const auto atoms = resolve_mixing_atoms(cfg.mix, rng);
        loss = kernel.mixup_general(w, atoms, last ? nullptr : &grad);
        break;
      }
    }

    const bool bad = !std::isfinite(loss) || (!last && !all_finite(grad));
    if (bad || last || t % cfg.log_every == 0) {
      TrajectoryRecord rec;
      rec.t = t;
      rec.loss = loss;
      rec.metrics = compute_metrics(w, net, ds, dict, cfg.b_threshold_mult, cfg.delta1);
      result.records.push_back(std::move(rec));
    }
    if (bad) {
      result.aborted = true;
      result.abort_t = t;
      result.abort_reason = std::isfinite(loss)
                                ? "non-finite gradient at iteration " + std::to_string(t)
                                : "non-finite loss at iteration " + std::to_string(t);
      return result;
    }
    if (last) break;

    for (std::size_t idx = 0; idx < w.w.size(); ++idx)
      w.w[idx] -= cfg.eta * grad[idx];
  }
  return result;
}

}  // namespace mixview
