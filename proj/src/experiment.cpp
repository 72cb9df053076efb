#include "mixview/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "mixview/presets.hpp"

namespace mixview {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool parse_int(const std::string& v, int& out) {
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  return res.ec == std::errc() && res.ptr == v.data() + v.size();
}

bool parse_u64(const std::string& v, std::uint64_t& out) {
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  return res.ec == std::errc() && res.ptr == v.data() + v.size();
}

bool parse_real(const std::string& v, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(v, &used);
    return used == v.size();
  } catch (...) {
    return false;
  }
}

struct KeyState {
  bool network_k = false;
  bool network_d = false;
  bool train_delta1 = false;
};

// Applies one key; returns an error message or empty.
std::string apply_key(ExperimentConfig& cfg, KeyState& ks, const std::string& key,
                      const std::string& value) {
  auto want_int = [&](int& slot) -> std::string {
    int v;
    if (!parse_int(value, v)) return "expected integer for " + key;
    slot = v;
    return "";
  };
  auto want_real = [&](double& slot) -> std::string {
    double v;
    if (!parse_real(value, v)) return "expected real for " + key;
    slot = v;
    return "";
  };

  if (key == "data.k") return want_int(cfg.data.k);
  if (key == "data.d") return want_int(cfg.data.d);
  if (key == "data.P") return want_int(cfg.data.P);
  if (key == "data.C_P") return want_int(cfg.data.C_P);
  if (key == "data.Q") return want_int(cfg.data.Q);
  if (key == "data.delta1") return want_real(cfg.data.delta1);
  if (key == "data.delta2") return want_real(cfg.data.delta2);
  if (key == "data.delta3") return want_real(cfg.data.delta3);
  if (key == "data.delta4") return want_real(cfg.data.delta4);
  if (key == "data.beta_law") {
    if (value == "uniform") {
      cfg.data.beta_law.kind = CoeffLaw::Kind::Uniform;
      return "";
    }
    if (value.rfind("shifted_beta(", 0) == 0 && value.back() == ')') {
      double a;
      if (!parse_real(value.substr(13, value.size() - 14), a))
        return "bad shifted_beta parameter";
      cfg.data.beta_law.kind = CoeffLaw::Kind::ShiftedBeta;
      cfg.data.beta_law.beta_a = a;
      return "";
    }
    return "beta_law must be uniform or shifted_beta(a)";
  }
  if (key == "network.k") {
    ks.network_k = true;
    return want_int(cfg.network.k);
  }
  if (key == "network.d") {
    ks.network_d = true;
    return want_int(cfg.network.d);
  }
  if (key == "network.m") return want_int(cfg.network.m);
  if (key == "network.rho") return want_real(cfg.network.rho);
  if (key == "network.alpha") return want_int(cfg.network.alpha);
  if (key == "network.activation") {
    if (value == "smoothed_relu") {
      cfg.network.activation = Activation::SmoothedRelu;
      return "";
    }
    if (value == "linear") {
      cfg.network.activation = Activation::Linear;
      return "";
    }
    return "activation must be smoothed_relu or linear";
  }
  if (key == "train.eta") return want_real(cfg.train.eta);
  if (key == "train.iters") return want_int(cfg.train.iters);
  if (key == "train.log_every") return want_int(cfg.train.log_every);
  if (key == "train.b_threshold_mult") return want_real(cfg.train.b_threshold_mult);
  if (key == "train.objective") {
    if (value == "erm") {
      cfg.train.objective = Objective::Erm;
      return "";
    }
    if (value == "midpoint_mixup") {
      cfg.train.objective = Objective::MidpointMixup;
      return "";
    }
    if (value == "mixup") {
      cfg.train.objective = Objective::Mixup;
      return "";
    }
    return "objective must be erm, midpoint_mixup, or mixup";
  }
  if (key == "train.pairs") {
    if (value == "exact") {
      cfg.train.pairs.exact = true;
      cfg.train.pairs.samples = 0;
      return "";
    }
    if (value.rfind("sample:", 0) == 0) {
      int s;
      if (!parse_int(value.substr(7), s)) return "bad pair sample count";
      cfg.train.pairs.exact = false;
      cfg.train.pairs.samples = s;
      return "";
    }
    return "pairs must be exact or sample:<S>";
  }
  if (key == "train.mix") {
    if (value == "midpoint") {
      cfg.train.mix.kind = MixingSpec::Kind::Midpoint;
      return "";
    }
    if (value.rfind("beta(", 0) == 0 && value.back() == ')') {
      double a;
      if (!parse_real(value.substr(5, value.size() - 6), a))
        return "bad beta parameter";
      cfg.train.mix.kind = MixingSpec::Kind::Beta;
      cfg.train.mix.beta_a = a;
      return "";
    }
    return "mix must be midpoint or beta(a)";
  }
  if (key == "train.mix_mc_samples") return want_int(cfg.train.mix.mc_samples);
  if (key == "diag.fresh_samples") return want_int(cfg.diag.fresh_samples);
  if (key == "diag.pass_threshold") return want_real(cfg.diag.pass_threshold);
  if (key == "diag.fd_step") return want_real(cfg.diag.fd_step);
  if (key == "run.n_train") return want_int(cfg.n_train);
  if (key == "run.seed") {
    std::uint64_t s;
    if (!parse_u64(value, s)) return "expected unsigned integer for run.seed";
    cfg.seed = s;
    return "";
  }
  if (key == "run.out_dir") {
    cfg.out_dir = value;
    return "";
  }
  if (key == "run.data_kind") {
    if (value == "patch") {
      cfg.data_kind = DataKind::Patch;
      return "";
    }
    if (value == "simple") {
      cfg.data_kind = DataKind::Simple;
      return "";
    }
    return "data_kind must be patch or simple";
  }
  return "unknown key " + key;
}

}  // namespace

ParseResult parse_config(const std::string& text, const ExperimentConfig& base) {
  ParseResult result;
  result.config = base;
  KeyState ks;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      result.errors.push_back("line " + std::to_string(lineno) +
                              ": expected `section.key = value`");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string err = apply_key(result.config, ks, key, value);
    if (!err.empty())
      result.errors.push_back("line " + std::to_string(lineno) + ": " + err);
  }

  // data.k / data.d flow into the network section unless set explicitly.
  if (!ks.network_k) result.config.network.k = result.config.data.k;
  if (!ks.network_d) result.config.network.d = result.config.data.d;
  result.config.train.delta1 = result.config.data.delta1;

  for (auto& e : result.config.validate()) result.errors.push_back(e);
  return result;
}

ParseResult parse_config(const std::string& text) {
  return parse_config(text, preset("desk"));
}

double resolve_tau(const TrainConfig& cfg) {
  if (cfg.b_threshold_mult > 0.0) return cfg.b_threshold_mult;
  return cfg.objective == Objective::Erm ? 1.0 : 2.0;
}

RunContext prepare_run(const ExperimentConfig& cfg) {
  RunContext ctx;
  ctx.cfg = cfg;
  Rng dict_rng(derive_seed(cfg.seed, "data/dict"));
  ctx.dict = build_feature_dictionary(cfg.data, dict_rng);
  Rng data_rng(derive_seed(cfg.seed, "data/sample"));
  if (cfg.data_kind == DataKind::Patch) {
    ctx.points = sample_dataset(cfg.data, ctx.dict, cfg.n_train, data_rng);
    ctx.train_set = pack(std::span<const DataPoint>(ctx.points));
  } else {
    ctx.simple_points =
        sample_simple_dataset(cfg.data.k, cfg.data.d, cfg.n_train, ctx.dict, data_rng);
    ctx.train_set = pack(std::span<const SimplePoint>(ctx.simple_points));
  }
  Rng init_rng(derive_seed(cfg.seed, "init"));
  ctx.init = init_weights(cfg.network, init_rng);
  return ctx;
}

TrainResult train_arm(const RunContext& ctx, Objective objective) {
  TrainConfig tc = ctx.cfg.train;
  tc.objective = objective;
  tc.b_threshold_mult = resolve_tau(tc);
  tc.delta1 = ctx.cfg.data.delta1;
  tc.seed = derive_seed(ctx.cfg.seed, std::string("train/") + to_string(objective));
  return train(ctx.init, ctx.cfg.network, ctx.train_set, ctx.dict, tc);
}

CompareResult run_compare(const RunContext& ctx) {
  if (ctx.cfg.data_kind != DataKind::Patch)
    throw ConfigError("compare requires the patch data setting");
  CompareResult out;
  out.erm = train_arm(ctx, Objective::Erm);
  out.mm = train_arm(ctx, Objective::MidpointMixup);
  // Both arms are scored on the same fresh samples (paired comparison).
  Rng erm_diag(derive_seed(ctx.cfg.seed, "diag/features"));
  Rng mm_diag(derive_seed(ctx.cfg.seed, "diag/features"));
  out.erm_features = feature_learning_report(
      out.erm.weights, ctx.cfg.network, ctx.dict, ctx.cfg.data,
      ctx.cfg.diag.fresh_samples, ctx.cfg.diag.pass_threshold, erm_diag);
  out.mm_features = feature_learning_report(
      out.mm.weights, ctx.cfg.network, ctx.dict, ctx.cfg.data,
      ctx.cfg.diag.fresh_samples, ctx.cfg.diag.pass_threshold, mm_diag);
  return out;
}

}  // namespace mixview
