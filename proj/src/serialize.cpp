#include "mixview/serialize.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace mixview {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

json doubles_json(std::span<const double> xs) {
  json arr = json::array();
  for (double x : xs) arr.push_back(x);
  return arr;
}

const char* law_name(const CoeffLaw& law) {
  return law.kind == CoeffLaw::Kind::Uniform ? "uniform" : "shifted_beta";
}

}  // namespace

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["data"] = {{"k", cfg.data.k},
               {"d", cfg.data.d},
               {"P", cfg.data.P},
               {"C_P", cfg.data.C_P},
               {"Q", cfg.data.Q},
               {"delta1", cfg.data.delta1},
               {"delta2", cfg.data.delta2},
               {"delta3", cfg.data.delta3},
               {"delta4", cfg.data.delta4},
               {"beta_law", law_name(cfg.data.beta_law)},
               {"beta_a", cfg.data.beta_law.beta_a}};
  j["network"] = {{"k", cfg.network.k},
                  {"m", cfg.network.m},
                  {"d", cfg.network.d},
                  {"rho", cfg.network.rho},
                  {"alpha", cfg.network.alpha},
                  {"activation", to_string(cfg.network.activation)}};
  json mix = {{"kind", cfg.train.mix.kind == MixingSpec::Kind::Midpoint
                           ? "midpoint"
                           : (cfg.train.mix.kind == MixingSpec::Kind::Beta
                                  ? "beta"
                                  : "discrete")},
              {"beta_a", cfg.train.mix.beta_a},
              {"mc_samples", cfg.train.mix.mc_samples}};
  j["train"] = {{"eta", cfg.train.eta},
                {"iters", cfg.train.iters},
                {"objective", to_string(cfg.train.objective)},
                {"log_every", cfg.train.log_every},
                {"b_threshold_mult", cfg.train.b_threshold_mult},
                {"pairs", cfg.train.pairs.exact
                              ? std::string("exact")
                              : "sample:" + std::to_string(cfg.train.pairs.samples)},
                {"mix", mix}};
  j["diag"] = {{"fresh_samples", cfg.diag.fresh_samples},
               {"pass_threshold", cfg.diag.pass_threshold},
               {"fd_step", cfg.diag.fd_step}};
  j["run"] = {{"data_kind", cfg.data_kind == DataKind::Patch ? "patch" : "simple"},
              {"n_train", cfg.n_train},
              {"seed", cfg.seed},
              {"out_dir", cfg.out_dir}};
  return j;
}

json to_json(const DataPoint& pt) {
  json j;
  j["label"] = pt.label;
  j["P"] = pt.P;
  j["d"] = pt.d;
  j["signal1"] = pt.signal1;
  j["signal2"] = pt.signal2;
  j["signal_coeffs"] = doubles_json(pt.signal_coeffs);
  j["noise_classes"] = pt.noise_classes;
  j["noise_coeffs"] = doubles_json(pt.noise_coeffs);
  j["patches"] = doubles_json(pt.patches);
  return j;
}

json to_json(const FeatureDictionary& dict) {
  return json{{"k", dict.k}, {"d", dict.d}, {"vectors", doubles_json(dict.vectors)}};
}

json to_json(const Weights& w) {
  return json{{"k", w.k}, {"m", w.m}, {"d", w.d}, {"w", doubles_json(w.w)}};
}

Weights weights_from_json(const json& j) {
  Weights w;
  w.k = j.at("k").get<int>();
  w.m = j.at("m").get<int>();
  w.d = j.at("d").get<int>();
  w.w = j.at("w").get<std::vector<double>>();
  if (w.w.size() != static_cast<std::size_t>(w.k) * w.m * w.d)
    throw std::runtime_error("weights json: shape mismatch");
  return w;
}

json to_json(const FeatureLearningReport& rep) {
  json learned = json::array();
  json estimates = json::array();
  for (int y = 0; y < rep.k; ++y) {
    learned.push_back({rep.learned[2 * y] != 0, rep.learned[2 * y + 1] != 0});
    estimates.push_back({rep.estimates[2 * y], rep.estimates[2 * y + 1]});
  }
  return json{{"k", rep.k},
              {"learned", learned},
              {"estimates", estimates},
              {"counts", {rep.counts[0], rep.counts[1], rep.counts[2]}},
              {"M", rep.M},
              {"theta", rep.theta}};
}

json to_json(const MonotonicityReport& rep) {
  return json{{"dist", rep.dist},
              {"C_P", rep.C_P},
              {"alpha", rep.alpha},
              {"samples", rep.samples},
              {"bin_edges", doubles_json(rep.bin_edges)},
              {"bin_means", doubles_json(rep.bin_means)},
              {"rank_correlation", rep.rank_correlation}};
}

json to_json(const ProbeResult& pr) {
  return json{{"k", pr.k},
              {"delta", pr.delta},
              {"erm_v1", pr.erm_v1},
              {"erm_v2", pr.erm_v2},
              {"mm_v1", pr.mm_v1},
              {"mm_v2", pr.mm_v2},
              {"mm_floor_v1", pr.mm_floor_v1},
              {"mm_floor_v2", pr.mm_floor_v2}};
}

json to_json(const ProbeSeries& series) {
  json pts = json::array();
  for (const auto& p : series.points) pts.push_back(to_json(p));
  return json{{"ks", series.ks}, {"points", pts}, {"mm_floor_slope", series.mm_floor_slope}};
}

json to_json(const SeparabilityResult& sep) {
  json j;
  j["status"] = sep.separable ? "SEPARABLE" : "NOT_SEPARATED_WITHIN_BUDGET";
  j["updates_used"] = sep.updates_used;
  j["final_hinge"] = sep.final_hinge;
  if (sep.separable) j["witness"] = doubles_json(sep.witness);
  return j;
}

json to_json(const AlignmentGap& gap) {
  return json{{"max", gap.max}, {"mean", gap.mean}, {"pairs", gap.pairs}};
}

json to_json(const FdCheckResult& fd) {
  return json{{"max_err", fd.max_err},
              {"coords_checked", fd.coords_checked},
              {"h", fd.h}};
}

json dataset_json(const ExperimentConfig& cfg, std::span<const DataPoint> points) {
  json pts = json::array();
  for (const auto& pt : points) pts.push_back(to_json(pt));
  return json{{"config", to_json(cfg)}, {"points", pts}};
}

json vector_dataset_json(const VectorDataset& ds) {
  json items = json::array();
  for (const auto& x : ds.items) items.push_back(doubles_json(x));
  return json{{"dim", ds.dim}, {"labels", ds.labels}, {"items", items}};
}

VectorDataset vector_dataset_from_json(const json& j) {
  VectorDataset ds;
  ds.dim = j.at("dim").get<int>();
  ds.labels = j.at("labels").get<std::vector<int>>();
  for (const auto& item : j.at("items"))
    ds.items.push_back(item.get<std::vector<double>>());
  if (ds.items.size() != ds.labels.size())
    throw std::runtime_error("vector dataset json: items/labels mismatch");
  for (const auto& x : ds.items)
    if (static_cast<int>(x.size()) != ds.dim)
      throw std::runtime_error("vector dataset json: dimension mismatch");
  return ds;
}

std::string trajectory_csv(const std::vector<TrajectoryRecord>& records, int k) {
  std::string out = "t,loss,train_acc";
  for (int y = 0; y < k; ++y)
    for (int l = 1; l <= 2; ++l) {
      const std::string tag = std::to_string(y) + "_" + std::to_string(l);
      out += ",lambda_" + tag + ",c_" + tag + ",bsize_" + tag;
    }
  for (int y = 0; y < k; ++y)
    out += ",delta_" + std::to_string(y) + ",lead_" + std::to_string(y);
  out += ",max_offdiag\n";

  for (const auto& rec : records) {
    out += std::to_string(rec.t);
    out += "," + format_double(rec.loss);
    out += "," + format_double(rec.metrics.train_acc);
    for (int y = 0; y < k; ++y)
      for (int l = 0; l < 2; ++l) {
        out += "," + format_double(rec.metrics.lambda[2 * y + l]);
        out += "," + format_double(rec.metrics.csum[2 * y + l]);
        out += "," + std::to_string(rec.metrics.bsize[2 * y + l]);
      }
    for (int y = 0; y < k; ++y) {
      out += "," + format_double(rec.metrics.delta[y]);
      out += "," + std::to_string(rec.metrics.lead[y]);
    }
    out += "," + format_double(rec.metrics.max_offdiag);
    out += "\n";
  }
  return out;
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot hash missing file: " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 0; i < 16; ++i) hex[15 - i] = digits[(h >> (4 * i)) & 0xf];
  hex[16] = '\0';
  return std::string(hex);
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

Manifest::Manifest(std::string command, const ExperimentConfig& cfg) {
  doc_["command"] = std::move(command);
  doc_["seed"] = cfg.seed;
  doc_["config"] = to_json(cfg);
}

void Manifest::emit(const std::filesystem::path& dir, const std::string& name,
                    const std::string& content) {
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  write_text(path, content);
  artifacts_.push_back(json{{"path", name},
                            {"bytes", content.size()},
                            {"fnv1a64", file_hash(path)}});
}

void Manifest::finalize(const std::filesystem::path& dir) {
  doc_["artifacts"] = artifacts_;
  write_text(dir / "manifest.json", doc_.dump(2) + "\n");
}

}  // namespace mixview
