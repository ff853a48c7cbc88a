#include "mocap/snapshot.hpp"

#include "mocap/errors.hpp"

namespace mocap {

namespace {

const char* to_string(Activation a) { return a == Activation::kGelu ? "gelu" : "relu"; }

Activation activation_from_string(const std::string& s) {
  if (s == "gelu") return Activation::kGelu;
  if (s == "relu") return Activation::kRelu;
  throw InvalidConfig("unknown activation '" + s + "'");
}

void push_vec(Checkpoint& ck, const std::string& name, const Vec& v) {
  if (v.size() == 0) return;
  ck.arrays.emplace_back(name, v.transpose());
}

Vec pull_vec(const Checkpoint& ck, const std::string& name, Eigen::Index size) {
  const Mat* m = ck.find_array(name);
  if (!m) throw FormatError("checkpoint: missing array " + name);
  if (m->rows() != 1 || m->cols() != size)
    throw ShapeMismatch("checkpoint: array " + name + " has the wrong shape");
  return m->row(0).transpose();
}

}  // namespace

void write_stage(Checkpoint& ck, const std::string& stage, const Denoiser& model) {
  const DenoiserConfig& c = model.config();
  const std::string p = "model." + stage + ".";
  ck.config.set_int(p + "target_dim", c.target_dim);
  ck.config.set_int(p + "imu_dim", c.imu_dim);
  ck.config.set_int(p + "keypoint_dim", c.keypoint_dim);
  ck.config.set_int(p + "aux_dim", c.aux_dim);
  ck.config.set(p + "mode", to_string(c.mode));
  ck.config.set_int(p + "layers", c.layers);
  ck.config.set_int(p + "heads", c.heads);
  ck.config.set_int(p + "model_dim", c.model_dim);
  ck.config.set_int(p + "ff_dim", c.ff_dim);
  ck.config.set_double(p + "dropout", c.dropout);
  ck.config.set_int(p + "window", c.window);
  ck.config.set(p + "activation", to_string(c.activation));

  for (const Param* param : model.params().all())
    ck.arrays.emplace_back(stage + ".param." + param->name, param->w);

  const NormStats& n = model.norm_stats();
  push_vec(ck, stage + ".norm.imu_mean", n.imu_mean);
  push_vec(ck, stage + ".norm.imu_std", n.imu_std);
  push_vec(ck, stage + ".norm.keypoint_mean", n.keypoint_mean);
  push_vec(ck, stage + ".norm.keypoint_std", n.keypoint_std);
  push_vec(ck, stage + ".norm.aux_mean", n.aux_mean);
  push_vec(ck, stage + ".norm.aux_std", n.aux_std);
}

void write_optimizer(Checkpoint& ck, const std::string& stage, const AdamW& opt) {
  ck.config.set_int(stage + ".adam.steps", opt.steps_taken());
  // Moment buffers follow the parameter registry order.
  for (std::size_t i = 0; i < opt.size(); ++i) {
    ck.arrays.emplace_back(stage + ".adam.m." + std::to_string(i), opt.moment1(i));
    ck.arrays.emplace_back(stage + ".adam.v." + std::to_string(i), opt.moment2(i));
  }
}

DenoiserConfig read_stage_config(const KeyValueConfig& cfg, const std::string& stage) {
  const std::string p = "model." + stage + ".";
  if (!cfg.has(p + "target_dim"))
    throw MissingModel("checkpoint has no stage '" + stage + "'");
  DenoiserConfig c;
  c.target_dim = static_cast<int>(cfg.get_int(p + "target_dim"));
  c.imu_dim = static_cast<int>(cfg.get_int(p + "imu_dim"));
  c.keypoint_dim = static_cast<int>(cfg.get_int(p + "keypoint_dim"));
  c.aux_dim = static_cast<int>(cfg.get_int(p + "aux_dim"));
  c.mode = conditioning_mode_from_string(cfg.get_string(p + "mode"));
  c.layers = static_cast<int>(cfg.get_int(p + "layers"));
  c.heads = static_cast<int>(cfg.get_int(p + "heads"));
  c.model_dim = static_cast<int>(cfg.get_int(p + "model_dim"));
  c.ff_dim = static_cast<int>(cfg.get_int(p + "ff_dim"));
  c.dropout = cfg.get_double(p + "dropout");
  c.window = static_cast<int>(cfg.get_int(p + "window"));
  c.activation = activation_from_string(cfg.get_string(p + "activation"));
  return c;
}

bool has_stage(const Checkpoint& ck, const std::string& stage) {
  return ck.config.has("model." + stage + ".target_dim");
}

std::unique_ptr<Denoiser> read_stage(const Checkpoint& ck, const std::string& stage) {
  const DenoiserConfig cfg = read_stage_config(ck.config, stage);
  auto model = std::make_unique<Denoiser>(cfg, /*init_seed=*/0);

  for (Param* param : model->params().all()) {
    const Mat* stored = ck.find_array(stage + ".param." + param->name);
    if (!stored) throw FormatError("checkpoint: missing weights for " + param->name);
    if (stored->rows() != param->w.rows() || stored->cols() != param->w.cols())
      throw ShapeMismatch("checkpoint: weight shape mismatch for " + param->name);
    param->w = *stored;
  }

  NormStats& n = model->norm_stats();
  if (cfg.imu_dim > 0) {
    n.imu_mean = pull_vec(ck, stage + ".norm.imu_mean", cfg.imu_dim);
    n.imu_std = pull_vec(ck, stage + ".norm.imu_std", cfg.imu_dim);
  }
  if (cfg.keypoint_dim > 0) {
    n.keypoint_mean = pull_vec(ck, stage + ".norm.keypoint_mean", cfg.keypoint_dim);
    n.keypoint_std = pull_vec(ck, stage + ".norm.keypoint_std", cfg.keypoint_dim);
  }
  if (cfg.aux_dim > 0) {
    n.aux_mean = pull_vec(ck, stage + ".norm.aux_mean", cfg.aux_dim);
    n.aux_std = pull_vec(ck, stage + ".norm.aux_std", cfg.aux_dim);
  }
  return model;
}

void read_optimizer(const Checkpoint& ck, const std::string& stage, AdamW& opt) {
  opt.set_steps_taken(ck.config.get_int(stage + ".adam.steps"));
  for (std::size_t i = 0; i < opt.size(); ++i) {
    const Mat* m = ck.find_array(stage + ".adam.m." + std::to_string(i));
    const Mat* v = ck.find_array(stage + ".adam.v." + std::to_string(i));
    if (!m || !v) throw FormatError("checkpoint: missing optimizer state for " + stage);
    opt.moment1(i) = *m;
    opt.moment2(i) = *v;
  }
}

}  // namespace mocap
