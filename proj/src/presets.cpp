#include "mixview/presets.hpp"

#include <stdexcept>
#include <string>

namespace mixview {

namespace {

ExperimentConfig desk_preset() {
  ExperimentConfig cfg;
  cfg.data.k = 10;
  cfg.data.d = 256;
  cfg.data.P = 30;
  cfg.data.C_P = 2;
  cfg.data.Q = 2;
  cfg.data.delta1 = 0.25;
  cfg.data.delta2 = 1.0;
  cfg.data.delta3 = 0.05;
  cfg.data.delta4 = 0.06;
  cfg.network.k = 10;
  cfg.network.m = 20;
  cfg.network.d = 256;
  cfg.network.rho = 0.15;
  cfg.network.alpha = 4;
  cfg.network.activation = Activation::SmoothedRelu;
  cfg.train.eta = 0.4;
  cfg.train.iters = 300;
  cfg.train.objective = Objective::MidpointMixup;
  cfg.train.log_every = 10;
  cfg.train.b_threshold_mult = 0.0;  // auto: 1 for ERM, 2 for Mixup
  cfg.train.delta1 = cfg.data.delta1;
  cfg.n_train = 128;
  cfg.diag.fresh_samples = 100;
  cfg.diag.pass_threshold = 0.95;
  return cfg;
}

ExperimentConfig tiny_preset() {
  ExperimentConfig cfg;
  cfg.data.k = 3;
  cfg.data.d = 16;
  cfg.data.P = 4;
  cfg.data.C_P = 1;
  cfg.data.Q = 2;
  cfg.data.delta1 = 0.25;
  cfg.data.delta2 = 1.0;
  cfg.data.delta3 = 0.05;
  cfg.data.delta4 = 0.06;
  cfg.network.k = 3;
  cfg.network.m = 2;
  cfg.network.d = 16;
  cfg.network.rho = 0.3;
  cfg.network.alpha = 4;
  cfg.network.activation = Activation::SmoothedRelu;
  cfg.train.eta = 0.1;
  cfg.train.iters = 50;
  cfg.train.log_every = 5;
  cfg.train.b_threshold_mult = 0.0;
  cfg.train.delta1 = cfg.data.delta1;
  cfg.n_train = 6;
  return cfg;
}

ExperimentConfig linear_preset() {
  ExperimentConfig cfg;
  cfg.data.k = 3;
  cfg.data.d = 16;
  cfg.data.P = 4;
  cfg.data.C_P = 1;
  cfg.data.Q = 2;
  cfg.network.k = 3;
  cfg.network.m = 1;
  cfg.network.d = 16;
  cfg.network.activation = Activation::Linear;
  cfg.network.rho = 0.15;
  cfg.network.alpha = 4;
  cfg.data_kind = DataKind::Simple;
  cfg.train.eta = 2.0;
  cfg.train.iters = 400;
  cfg.train.log_every = 20;
  cfg.train.b_threshold_mult = 0.0;
  cfg.train.delta1 = cfg.data.delta1;
  cfg.n_train = 60;
  return cfg;
}

}  // namespace

ExperimentConfig preset(std::string_view name) {
  if (name == "desk") return desk_preset();
  if (name == "tiny") return tiny_preset();
  if (name == "linear") return linear_preset();
  throw std::invalid_argument("unknown preset: " + std::string(name));
}

std::vector<std::string_view> preset_names() { return {"desk", "tiny", "linear"}; }

}  // namespace mixview
