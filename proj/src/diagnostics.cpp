#include "mixview/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mixview/losses.hpp"
#include "mixview/trainer.hpp"

namespace mixview {

namespace {

double ipow(double x, int n) {
  double out = 1.0;
  while (n > 0) {
    if (n & 1) out *= x;
    x *= x;
    n >>= 1;
  }
  return out;
}

int argmax_lowest(std::span<const double> xs) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(xs.size()); ++i)
    if (xs[i] > xs[best]) best = i;
  return best;
}

// Spearman rank correlation with average ranks on ties.
double spearman_against_order(const std::vector<double>& values) {
  const int n = static_cast<int>(values.size());
  if (n < 2) return 1.0;
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return values[a] < values[b]; });
  std::vector<double> rank(n);
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && values[idx[j + 1]] == values[idx[i]]) ++j;
    const double r = 0.5 * (i + j);  // average rank of the tie run
    for (int t = i; t <= j; ++t) rank[idx[t]] = r;
    i = j + 1;
  }
  // Pearson of (rank, position).
  const double mean = 0.5 * (n - 1);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (int p = 0; p < n; ++p) {
    const double dx = p - mean;
    const double dy = rank[p] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

std::pair<bool, double> feature_learned(const Weights& w, const NetworkConfig& net,
                                        const FeatureDictionary& dict,
                                        const DataConfig& data, int y, int l,
                                        int M, double theta, Rng& rng) {
  if (M < 1) throw std::invalid_argument("feature_learned: M must be >= 1");
  if (!(theta > 0.0 && theta <= 1.0))
    throw std::invalid_argument("feature_learned: theta must be in (0, 1]");
  int correct = 0;
  for (int s = 0; s < M; ++s) {
    DataPoint pt = sample_point_with_label(data, dict, y, rng);
    DataPoint ablated = ablate_feature(pt, dict, y, 3 - l);
    const auto logits = forward(w, net, ablated);
    if (argmax_lowest(logits) == y) ++correct;
  }
  const double estimate = static_cast<double>(correct) / M;
  return {estimate >= theta, estimate};
}

FeatureLearningReport feature_learning_report(const Weights& w,
                                              const NetworkConfig& net,
                                              const FeatureDictionary& dict,
                                              const DataConfig& data, int M,
                                              double theta, Rng& rng) {
  FeatureLearningReport rep;
  rep.k = net.k;
  rep.M = M;
  rep.theta = theta;
  rep.learned.assign(2 * net.k, 0);
  rep.estimates.assign(2 * net.k, 0.0);
  for (int y = 0; y < net.k; ++y) {
    int got = 0;
    for (int l = 1; l <= 2; ++l) {
      auto [flag, est] = feature_learned(w, net, dict, data, y, l, M, theta, rng);
      rep.learned[2 * y + (l - 1)] = flag ? 1 : 0;
      rep.estimates[2 * y + (l - 1)] = est;
      if (flag) ++got;
    }
    ++rep.counts[got];
  }
  return rep;
}

AlignmentGap alignment_gap(const Weights& w, const NetworkConfig& net,
                           const PatchDataset& ds) {
  using RowMat = LossKernel::RowMat;
  const int km = net.k * net.m;
  Eigen::Map<const RowMat> X(ds.patches.data(),
                             static_cast<Eigen::Index>(ds.N) * ds.P, ds.d);
  Eigen::Map<const RowMat> W(w.w.data(), km, net.d);
  RowMat U = X * W.transpose();

  AlignmentGap out;
  double total = 0.0;
  for (int i = 0; i < ds.N; ++i) {
    for (int j = i + 1; j < ds.N; ++j) {
      const int yi = ds.labels[i];
      const int yj = ds.labels[j];
      if (yi == yj) continue;
      double gi = 0.0, gj = 0.0;
      const double* Ui = U.data() + static_cast<std::size_t>(i) * ds.P * km;
      const double* Uj = U.data() + static_cast<std::size_t>(j) * ds.P * km;
      for (int p = 0; p < ds.P; ++p) {
        const double* upi = Ui + static_cast<std::size_t>(p) * km;
        const double* upj = Uj + static_cast<std::size_t>(p) * km;
        for (int r = 0; r < net.m; ++r) {
          gi += activate(0.5 * (upi[yi * net.m + r] + upj[yi * net.m + r]), net);
          gj += activate(0.5 * (upi[yj * net.m + r] + upj[yj * net.m + r]), net);
        }
      }
      const double gap = std::abs(gi - gj);
      out.max = std::max(out.max, gap);
      total += gap;
      ++out.pairs;
    }
  }
  if (out.pairs == 0)
    throw std::invalid_argument("alignment_gap: no cross-class pair in dataset");
  out.mean = total / out.pairs;
  return out;
}

FdCheckResult finite_difference_check(const Weights& w, const NetworkConfig& net,
                                      const PatchDataset& ds, Objective objective,
                                      double h, Rng& rng) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_difference_check: h must be > 0");

  LossKernel kernel(net, ds);
  auto loss_of = [&](const Weights& ww) -> double {
    switch (objective) {
      case Objective::Erm:
        return kernel.erm(ww, nullptr);
      case Objective::MidpointMixup:
        return kernel.midpoint_mixup(ww, nullptr);
      default:
        throw std::invalid_argument("finite_difference_check: unsupported objective");
    }
  };

  std::vector<double> grad;
  const double base = objective == Objective::Erm ? kernel.erm(w, &grad)
                                                  : kernel.midpoint_mixup(w, &grad);
  if (!std::isfinite(base))
    throw std::invalid_argument("finite_difference_check: non-finite loss");

  const long total = static_cast<long>(w.w.size());
  std::vector<long> coords;
  const long cap = 10000;
  if (total <= cap) {
    coords.resize(total);
    std::iota(coords.begin(), coords.end(), 0L);
  } else {
    // Seeded subsample without replacement.
    std::vector<long> all(total);
    std::iota(all.begin(), all.end(), 0L);
    for (long i = 0; i < cap; ++i) {
      const long j = i + static_cast<long>(rng.uniform_index(total - i));
      std::swap(all[i], all[j]);
    }
    coords.assign(all.begin(), all.begin() + cap);
  }

  Weights probe = w;
  FdCheckResult out;
  out.h = h;
  for (long c : coords) {
    const double keep = probe.w[c];
    probe.w[c] = keep + h;
    const double up = loss_of(probe);
    probe.w[c] = keep - h;
    const double down = loss_of(probe);
    probe.w[c] = keep;
    const double fd = (up - down) / (2.0 * h);
    const double an = grad[c];
    const double err = std::abs(an) > 1e-8 ? std::abs(fd - an) / std::abs(an)
                                           : std::abs(fd - an);
    out.max_err = std::max(out.max_err, err);
    if (std::abs(fd - an) > 1e-9) out.max_err_floored = std::max(out.max_err_floored, err);
    ++out.coords_checked;
  }
  return out;
}

MonotonicityReport verify_assumption_monotone(const CoeffLaw& law, double lo,
                                              double hi, int C_P, int alpha,
                                              int samples, int bins, Rng& rng) {
  if (!(hi > lo))
    throw std::invalid_argument("verify_assumption_monotone: degenerate distribution");
  if (bins < 2) throw std::invalid_argument("verify_assumption_monotone: bins must be >= 2");
  if (samples < bins * 20)
    throw std::invalid_argument("verify_assumption_monotone: need samples >= 20*bins");

  std::vector<std::pair<double, double>> xs(samples);  // (x, f-hat)
  for (int s = 0; s < samples; ++s) {
    double x = 0.0, moment = 0.0;
    for (int p = 0; p < C_P; ++p) {
      const double b = law.sample(lo, hi, rng);
      x += b;
      moment += ipow(b, alpha);
    }
    xs[s] = {x, moment / x};
  }
  std::sort(xs.begin(), xs.end());

  MonotonicityReport rep;
  rep.dist = law.name() + "[" + std::to_string(lo) + "," + std::to_string(hi) + "]";
  rep.C_P = C_P;
  rep.alpha = alpha;
  rep.samples = samples;

  const int base = samples / bins;
  const int extra = samples % bins;
  int at = 0;
  for (int b = 0; b < bins; ++b) {
    const int count = base + (b < extra ? 1 : 0);
    rep.bin_edges.push_back(xs[at].first);
    double mean = 0.0;
    for (int t = at; t < at + count; ++t) mean += xs[t].second;
    rep.bin_means.push_back(mean / count);
    at += count;
  }
  rep.bin_edges.push_back(xs.back().first);
  rep.rank_correlation = spearman_against_order(rep.bin_means);
  return rep;
}

ProbeResult linear_gradient_probe_from(int k, double gap_mult,
                                       const std::vector<double>& betas,
                                       const std::vector<int>& labels) {
  const int N = static_cast<int>(betas.size());
  if (N < 1 || labels.size() != betas.size())
    throw std::invalid_argument("linear_gradient_probe: bad arrays");

  ProbeResult out;
  out.k = k;
  const double b = 1.0;
  const double a = b + gap_mult * std::log(static_cast<double>(k));
  out.delta = a - b;

  // Own-logit of each point: <w_{y_i}, x_i>; non-designated classes carry
  // symmetric weights a = b = 1, so their own-logit is exactly 1.
  std::vector<double> own(N);
  for (int i = 0; i < N; ++i)
    own[i] = labels[i] == 0 ? betas[i] * a + (1.0 - betas[i]) * b : 1.0;

  // ERM: only class-0 points contribute to the v_{0,l} correlations.
  for (int i = 0; i < N; ++i) {
    if (labels[i] != 0) continue;
    const double phi = std::exp(own[i]) / (std::exp(own[i]) + (k - 1));
    out.erm_v1 += (1.0 - phi) * betas[i];
    out.erm_v2 += (1.0 - phi) * (1.0 - betas[i]);
  }
  out.erm_v1 /= N;
  out.erm_v2 /= N;

  // Midpoint mixup: pairs with at least one class-0 parent contribute.
  std::vector<int> zero_idx;
  for (int i = 0; i < N; ++i)
    if (labels[i] == 0) zero_idx.push_back(i);

  double v1 = 0.0, v2 = 0.0, f1 = 0.0, f2 = 0.0;
  for (int i : zero_idx) {
    for (int j = 0; j < N; ++j) {
      if (labels[j] == 0 && j < i) continue;  // class-0 pairs once, via i <= j
      const double weight = (i == j) ? 1.0 : 2.0;
      const double li = own[i] / 2.0;
      const double lj = own[j] / 2.0;
      double logit0, sum_exp;
      if (labels[j] == 0) {
        if (i == j) {
          logit0 = own[i];
        } else {
          logit0 = li + lj;
        }
        sum_exp = std::exp(logit0) + (k - 1);
      } else {
        logit0 = li;
        sum_exp = std::exp(li) + std::exp(lj) + (k - 2);
      }
      const double phi0 = std::exp(logit0) / sum_exp;
      const double c = (1.0 + (labels[j] == 0 ? 1.0 : 0.0)) - 2.0 * phi0;
      const double zv1 = 0.5 * (betas[i] + (labels[j] == 0 ? betas[j] : 0.0));
      const double zv2 =
          0.5 * ((1.0 - betas[i]) + (labels[j] == 0 ? 1.0 - betas[j] : 0.0));
      v1 += weight * c * zv1;
      v2 += weight * c * zv2;
      if (labels[j] == 0) {
        f1 += weight * c * zv1;
        f2 += weight * c * zv2;
      }
    }
  }
  const double scale = 1.0 / (2.0 * static_cast<double>(N) * static_cast<double>(N));
  out.mm_v1 = v1 * scale;
  out.mm_v2 = v2 * scale;
  out.mm_floor_v1 = f1 * scale;
  out.mm_floor_v2 = f2 * scale;
  return out;
}

ProbeResult linear_gradient_probe(int k, int N, double gap_mult, Rng& rng) {
  if (k < 2) throw std::invalid_argument("linear_gradient_probe: k must be >= 2");
  std::vector<double> betas(N);
  std::vector<int> labels(N);
  for (int i = 0; i < N; ++i) {
    labels[i] = static_cast<int>(rng.uniform_index(k));
    betas[i] = rng.uniform(0.1, 0.9);
  }
  return linear_gradient_probe_from(k, gap_mult, betas, labels);
}

ProbeSeries linear_probe_series(const std::vector<int>& ks, int N, double gap_mult,
                                Rng& rng) {
  if (ks.size() < 3)
    throw std::invalid_argument("linear_probe_series: need >= 3 points for the fit");
  ProbeSeries series;
  series.ks = ks;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (std::size_t t = 0; t < ks.size(); ++t) {
    Rng sub = rng.derive("probe-k", ks[t]);
    // A few replicates tame the binomial noise of the class-0 count,
    // which dominates the variance of the same-class-pair floor term.
    const int reps = 6;
    ProbeResult avg;
    for (int rep = 0; rep < reps; ++rep) {
      Rng r = sub.derive("rep", rep);
      const ProbeResult pr = linear_gradient_probe(ks[t], N, gap_mult, r);
      avg.k = pr.k;
      avg.delta = pr.delta;
      avg.erm_v1 += pr.erm_v1 / reps;
      avg.erm_v2 += pr.erm_v2 / reps;
      avg.mm_v1 += pr.mm_v1 / reps;
      avg.mm_v2 += pr.mm_v2 / reps;
      avg.mm_floor_v1 += pr.mm_floor_v1 / reps;
      avg.mm_floor_v2 += pr.mm_floor_v2 / reps;
    }
    series.points.push_back(avg);
    if (avg.mm_floor_v2 > 0.0) {
      const double lx = std::log(static_cast<double>(ks[t]));
      const double ly = std::log(avg.mm_floor_v2);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++n;
    }
  }
  if (n >= 2) {
    series.mm_floor_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  } else {
    series.mm_floor_slope = std::numeric_limits<double>::quiet_NaN();
  }
  return series;
}

SeparabilityResult separability_probe(const PatchDataset& ds, long budget,
                                      double margin) {
  if (ds.N < 1) throw std::invalid_argument("separability_probe: empty dataset");
  int k = 0;
  for (int y : ds.labels) k = std::max(k, y + 1);

  // The linear classifier h^y(x) = sum_p <w_y, x^(p)> only sees patch sums.
  std::vector<double> sums(static_cast<std::size_t>(ds.N) * ds.d, 0.0);
  for (int i = 0; i < ds.N; ++i) {
    double* dst = sums.data() + static_cast<std::size_t>(i) * ds.d;
    for (int p = 0; p < ds.P; ++p) {
      const auto xp = ds.patch(i, p);
      for (int j = 0; j < ds.d; ++j) dst[j] += xp[j];
    }
  }

  std::vector<double> w(static_cast<std::size_t>(k) * ds.d, 0.0);
  std::vector<double> scores(k);
  auto score = [&](int i) {
    const double* x = sums.data() + static_cast<std::size_t>(i) * ds.d;
    for (int y = 0; y < k; ++y) {
      const double* wy = w.data() + static_cast<std::size_t>(y) * ds.d;
      double acc = 0.0;
      for (int j = 0; j < ds.d; ++j) acc += wy[j] * x[j];
      scores[y] = acc;
    }
  };

  SeparabilityResult out;
  long updates = 0;
  bool clean_pass = false;
  while (updates < budget && !clean_pass) {
    clean_pass = true;
    for (int i = 0; i < ds.N && updates < budget; ++i) {
      score(i);
      const int y = ds.labels[i];
      int rival = (y == 0) ? 1 : 0;
      for (int s = 0; s < k; ++s)
        if (s != y && scores[s] > scores[rival]) rival = s;
      if (scores[rival] >= scores[y] - margin) {
        clean_pass = false;
        ++updates;
        const double lr = 1.0 / std::sqrt(static_cast<double>(updates));
        const double* x = sums.data() + static_cast<std::size_t>(i) * ds.d;
        double* wy = w.data() + static_cast<std::size_t>(y) * ds.d;
        double* wr = w.data() + static_cast<std::size_t>(rival) * ds.d;
        for (int j = 0; j < ds.d; ++j) {
          wy[j] += lr * x[j];
          wr[j] -= lr * x[j];
        }
      }
    }
  }
  out.updates_used = updates;

  // Strict re-verification of the candidate, and the hinge residual.
  bool strict = true;
  double hinge = 0.0;
  for (int i = 0; i < ds.N; ++i) {
    score(i);
    const int y = ds.labels[i];
    double best_other = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < k; ++s)
      if (s != y) best_other = std::max(best_other, scores[s]);
    if (best_other >= scores[y]) strict = false;
    hinge += std::max(0.0, margin + best_other - scores[y]);
  }
  out.final_hinge = hinge / ds.N;
  if (clean_pass && strict) {
    out.separable = true;
    out.witness = std::move(w);
  }
  return out;
}

}  // namespace mixview
