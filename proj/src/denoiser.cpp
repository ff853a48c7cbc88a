#include "mocap/denoiser.hpp"

#include <cmath>

#include "mocap/errors.hpp"

namespace mocap {

namespace {

constexpr double kLayerNormEps = 1e-5;

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * M_SQRT1_2)); }

double gelu_grad(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x * M_SQRT1_2));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
  return cdf + x * pdf;
}

double relu(double x) { return x > 0.0 ? x : 0.0; }
double relu_grad(double x) { return x > 0.0 ? 1.0 : 0.0; }

void init_xavier(Param& p, RandomStream& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(p.w.rows() + p.w.cols()));
  for (Eigen::Index r = 0; r < p.w.rows(); ++r)
    for (Eigen::Index c = 0; c < p.w.cols(); ++c) p.w(r, c) = rng.uniform(-limit, limit);
}

}  // namespace

const char* to_string(ConditioningMode mode) {
  switch (mode) {
    case ConditioningMode::kKeypointCondition: return "diffcap";
    case ConditioningMode::kBothAsCondition: return "both-cond";
    case ConditioningMode::kBothAsSequential: return "both-seq";
  }
  return "?";
}

ConditioningMode conditioning_mode_from_string(const std::string& s) {
  if (s == "diffcap") return ConditioningMode::kKeypointCondition;
  if (s == "both-cond") return ConditioningMode::kBothAsCondition;
  if (s == "both-seq") return ConditioningMode::kBothAsSequential;
  throw InvalidConfig("unknown conditioning mode '" + s + "'");
}

void DenoiserConfig::validate() const {
  if (target_dim < 1) throw InvalidConfig("denoiser: target_dim must be positive");
  if (imu_dim < 0 || keypoint_dim < 0 || aux_dim < 0)
    throw InvalidConfig("denoiser: input dims must be non-negative");
  if (layers < 0) throw InvalidConfig("denoiser: layers must be >= 0");
  if (heads < 1) throw InvalidConfig("denoiser: heads must be >= 1");
  if (model_dim < 2 || model_dim % 2 != 0)
    throw InvalidConfig("denoiser: model_dim must be even and >= 2");
  if (model_dim % heads != 0)
    throw InvalidConfig("denoiser: model_dim must be divisible by heads");
  if (ff_dim < 1) throw InvalidConfig("denoiser: ff_dim must be positive");
  if (window < 1) throw InvalidConfig("denoiser: window must be >= 1");
  if (dropout < 0.0 || dropout >= 1.0) throw InvalidConfig("denoiser: dropout outside [0,1)");
}

NormStats NormStats::identity(const DenoiserConfig& cfg) {
  NormStats s;
  s.imu_mean = Vec::Zero(cfg.imu_dim);
  s.imu_std = Vec::Ones(cfg.imu_dim);
  s.keypoint_mean = Vec::Zero(cfg.keypoint_dim);
  s.keypoint_std = Vec::Ones(cfg.keypoint_dim);
  s.aux_mean = Vec::Zero(cfg.aux_dim);
  s.aux_std = Vec::Ones(cfg.aux_dim);
  return s;
}

Denoiser::Denoiser(const DenoiserConfig& cfg, std::uint64_t init_seed) : cfg_(cfg) {
  cfg_.validate();
  norm_ = NormStats::identity(cfg_);

  const int D = cfg_.model_dim;
  const int F = cfg_.frame_input_dim();
  const int C = cfg_.condition_input_dim();

  frame_w_ = &params_.add("frame_proj.weight", D, F);
  frame_b_ = &params_.add("frame_proj.bias", 1, D);
  if (C > 0) {
    cond_w_ = &params_.add("cond_proj.weight", D, C);
    cond_b_ = &params_.add("cond_proj.bias", 1, D);
  }
  t_w1_ = &params_.add("time_mlp.w1", D, D);
  t_b1_ = &params_.add("time_mlp.b1", 1, D);
  t_w2_ = &params_.add("time_mlp.w2", D, D);
  t_b2_ = &params_.add("time_mlp.b2", 1, D);

  layers_.resize(static_cast<std::size_t>(cfg_.layers));
  for (int l = 0; l < cfg_.layers; ++l) {
    const std::string p = "layers." + std::to_string(l) + ".";
    LayerParams& lp = layers_[static_cast<std::size_t>(l)];
    lp.ln1_g = &params_.add(p + "ln1.gain", 1, D);
    lp.ln1_b = &params_.add(p + "ln1.bias", 1, D);
    lp.wq = &params_.add(p + "attn.wq", D, D);
    lp.bq = &params_.add(p + "attn.bq", 1, D);
    lp.wk = &params_.add(p + "attn.wk", D, D);
    lp.bk = &params_.add(p + "attn.bk", 1, D);
    lp.wv = &params_.add(p + "attn.wv", D, D);
    lp.bv = &params_.add(p + "attn.bv", 1, D);
    lp.wo = &params_.add(p + "attn.wo", D, D);
    lp.bo = &params_.add(p + "attn.bo", 1, D);
    lp.ln2_g = &params_.add(p + "ln2.gain", 1, D);
    lp.ln2_b = &params_.add(p + "ln2.bias", 1, D);
    lp.w1 = &params_.add(p + "ffn.w1", cfg_.ff_dim, D);
    lp.b1 = &params_.add(p + "ffn.b1", 1, cfg_.ff_dim);
    lp.w2 = &params_.add(p + "ffn.w2", D, cfg_.ff_dim);
    lp.b2 = &params_.add(p + "ffn.b2", 1, D);
  }
  final_g_ = &params_.add("final_norm.gain", 1, D);
  final_b_ = &params_.add("final_norm.bias", 1, D);
  out_w_ = &params_.add("out_proj.weight", cfg_.target_dim, D);
  out_b_ = &params_.add("out_proj.bias", 1, cfg_.target_dim);

  RandomStream rng(init_seed);
  init_xavier(*frame_w_, rng);
  if (cond_w_) init_xavier(*cond_w_, rng);
  init_xavier(*t_w1_, rng);
  init_xavier(*t_w2_, rng);
  for (LayerParams& lp : layers_) {
    lp.ln1_g->w.setOnes();
    lp.ln2_g->w.setOnes();
    init_xavier(*lp.wq, rng);
    init_xavier(*lp.wk, rng);
    init_xavier(*lp.wv, rng);
    init_xavier(*lp.wo, rng);
    init_xavier(*lp.w1, rng);
    init_xavier(*lp.w2, rng);
  }
  final_g_->w.setOnes();
  init_xavier(*out_w_, rng);

  pos_table_.resize(cfg_.window + 1, D);
  for (int n = 0; n <= cfg_.window; ++n)
    pos_table_.row(n) = sinusoidal_embedding(static_cast<double>(n), D).transpose();
}

Vec Denoiser::sinusoidal_embedding(double position, int dim) {
  Vec e(dim);
  const int half = dim / 2;
  for (int i = 0; i < half; ++i) {
    const double freq = std::pow(10000.0, -2.0 * static_cast<double>(i) / dim);
    e(2 * i) = std::sin(position * freq);
    e(2 * i + 1) = std::cos(position * freq);
  }
  if (dim % 2 != 0) e(dim - 1) = std::sin(position);
  return e;
}

Mat Denoiser::normalize_rows(const Mat& raw, const Vec& mean, const Vec& stddev) const {
  Mat out = raw;
  out.rowwise() -= mean.transpose();
  out.array().rowwise() /= stddev.transpose().array();
  return out;
}

void Denoiser::check_inputs(const Mat& x_t, const DenoiserInputs& in) const {
  const int N = cfg_.window;
  if (x_t.rows() != N || x_t.cols() != cfg_.target_dim)
    throw ShapeMismatch("denoiser: x_t must be " + std::to_string(N) + "x" +
                        std::to_string(cfg_.target_dim));
  if (cfg_.imu_dim > 0) {
    if (!in.imu) throw ModeMismatch("denoiser: this model requires IMU input");
    if (in.imu->rows() != N || in.imu->cols() != cfg_.imu_dim)
      throw ShapeMismatch("denoiser: imu must be N x imu_dim");
  } else if (in.imu) {
    throw ModeMismatch("denoiser: IMU input provided to a model without IMU channels");
  }
  if (cfg_.keypoint_dim > 0) {
    if (!in.keypoints) throw ModeMismatch("denoiser: this model requires keypoint input");
    if (in.keypoints->rows() != N)
      throw WrongWindow("denoiser: keypoints cover " + std::to_string(in.keypoints->rows()) +
                        " frames, expected " + std::to_string(N));
    if (in.keypoints->cols() != cfg_.keypoint_dim)
      throw ShapeMismatch("denoiser: keypoints must be N x keypoint_dim");
  } else if (in.keypoints) {
    throw ModeMismatch("denoiser: keypoints provided to a model that excludes them");
  }
  if (cfg_.aux_dim > 0) {
    if (!in.aux) throw ModeMismatch("denoiser: this model requires auxiliary input");
    if (in.aux->rows() != N || in.aux->cols() != cfg_.aux_dim)
      throw ShapeMismatch("denoiser: aux must be N x aux_dim");
  } else if (in.aux) {
    throw ModeMismatch("denoiser: auxiliary input provided to a model without aux channels");
  }
}

Mat Denoiser::frame_input_matrix(const Mat& x_t, const DenoiserInputs& in) const {
  const int N = cfg_.window;
  Mat U(N, cfg_.frame_input_dim());
  int col = 0;
  if (cfg_.imu_sequential()) {
    U.middleCols(col, cfg_.imu_dim) = normalize_rows(*in.imu, norm_.imu_mean, norm_.imu_std);
    col += cfg_.imu_dim;
  }
  if (cfg_.keypoints_sequential()) {
    U.middleCols(col, cfg_.keypoint_dim) =
        normalize_rows(*in.keypoints, norm_.keypoint_mean, norm_.keypoint_std);
    col += cfg_.keypoint_dim;
  }
  U.middleCols(col, cfg_.target_dim) = x_t;
  col += cfg_.target_dim;
  if (cfg_.aux_dim > 0) {
    U.middleCols(col, cfg_.aux_dim) = normalize_rows(*in.aux, norm_.aux_mean, norm_.aux_std);
    col += cfg_.aux_dim;
  }
  return U;
}

Vec Denoiser::condition_input_vector(const DenoiserInputs& in) const {
  const int N = cfg_.window;
  const int C = cfg_.condition_input_dim();
  Vec v(C);
  int at = 0;
  if (cfg_.keypoints_in_condition()) {
    const Mat k = normalize_rows(*in.keypoints, norm_.keypoint_mean, norm_.keypoint_std);
    for (int n = 0; n < N; ++n) {
      v.segment(at, cfg_.keypoint_dim) = k.row(n).transpose();
      at += cfg_.keypoint_dim;
    }
  }
  if (cfg_.imu_in_condition()) {
    const Mat m = normalize_rows(*in.imu, norm_.imu_mean, norm_.imu_std);
    for (int n = 0; n < N; ++n) {
      v.segment(at, cfg_.imu_dim) = m.row(n).transpose();
      at += cfg_.imu_dim;
    }
  }
  return v;
}

Mat Denoiser::layer_norm(const Mat& x, const Vec& gain, const Vec& bias, Mat* norm_out,
                         Vec* rstd_out) const {
  const Eigen::Index rows = x.rows(), cols = x.cols();
  Mat norm(rows, cols);
  Vec rstd(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double mean = x.row(r).mean();
    const double var = (x.row(r).array() - mean).square().mean();
    const double rs = 1.0 / std::sqrt(var + kLayerNormEps);
    norm.row(r) = (x.row(r).array() - mean) * rs;
    rstd(r) = rs;
  }
  Mat out = norm;
  out.array().rowwise() *= gain.transpose().array();
  out.rowwise() += bias.transpose();
  if (norm_out) *norm_out = std::move(norm);
  if (rstd_out) *rstd_out = std::move(rstd);
  return out;
}

void Denoiser::layer_norm_backward(const Mat& d_out, const Mat& norm, const Vec& rstd,
                                   const Vec& gain, Mat& d_gain_acc, Mat& d_bias_acc,
                                   Mat& d_in) const {
  d_gain_acc.row(0) += d_out.cwiseProduct(norm).colwise().sum();
  d_bias_acc.row(0) += d_out.colwise().sum();
  Mat d_norm = d_out;
  d_norm.array().rowwise() *= gain.transpose().array();
  d_in.resize(d_out.rows(), d_out.cols());
  const double dim = static_cast<double>(d_out.cols());
  for (Eigen::Index r = 0; r < d_out.rows(); ++r) {
    const double m1 = d_norm.row(r).sum() / dim;
    const double m2 = d_norm.row(r).cwiseProduct(norm.row(r)).sum() / dim;
    d_in.row(r) = rstd(r) * (d_norm.row(r).array() - m1 - norm.row(r).array() * m2);
  }
}

Mat Denoiser::activate(const Mat& pre) const {
  return cfg_.activation == Activation::kGelu ? pre.unaryExpr(&gelu) : pre.unaryExpr(&relu);
}

Mat Denoiser::activate_grad(const Mat& pre) const {
  return cfg_.activation == Activation::kGelu ? pre.unaryExpr(&gelu_grad)
                                              : pre.unaryExpr(&relu_grad);
}

Vec Denoiser::activate_vec(const Vec& pre) const {
  return cfg_.activation == Activation::kGelu ? pre.unaryExpr(&gelu) : pre.unaryExpr(&relu);
}

Vec Denoiser::activate_grad_vec(const Vec& pre) const {
  return cfg_.activation == Activation::kGelu ? pre.unaryExpr(&gelu_grad)
                                              : pre.unaryExpr(&relu_grad);
}

Mat Denoiser::dropout_forward(const Mat& x, bool train_mode, RandomStream* rng,
                              Mat* mask) const {
  if (!train_mode || cfg_.dropout <= 0.0) {
    if (mask) mask->resize(0, 0);
    return x;
  }
  if (!rng) throw InvalidConfig("denoiser: train-mode dropout needs an rng");
  const double keep_scale = 1.0 / (1.0 - cfg_.dropout);
  Mat m(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index c = 0; c < x.cols(); ++c)
      m(r, c) = rng->uniform() >= cfg_.dropout ? keep_scale : 0.0;
  if (mask) *mask = m;
  return x.cwiseProduct(m);
}

Vec Denoiser::timestep_embedding(int t) const {
  if (t < 0) throw InvalidSteps("timestep_embedding: negative t");
  const Vec s = sinusoidal_embedding(static_cast<double>(t), cfg_.model_dim);
  const Vec pre = t_w1_->w * s + t_b1_->w.row(0).transpose();
  const Vec act = activate_vec(pre);
  return t_w2_->w * act + t_b2_->w.row(0).transpose();
}

Vec Denoiser::encode_condition(int t, const DenoiserInputs& in) const {
  Vec c = timestep_embedding(t);
  if (cfg_.condition_input_dim() == 0) return c;
  if (cfg_.keypoints_in_condition()) {
    if (!in.keypoints) throw ModeMismatch("encode_condition: keypoints required");
    if (in.keypoints->rows() != cfg_.window)
      throw WrongWindow("encode_condition: keypoints cover " +
                        std::to_string(in.keypoints->rows()) + " frames, expected " +
                        std::to_string(cfg_.window));
  }
  if (cfg_.imu_in_condition() && !in.imu)
    throw ModeMismatch("encode_condition: IMU required in both-as-condition mode");
  c += cond_w_->w * condition_input_vector(in) + cond_b_->w.row(0).transpose();
  return c;
}

Mat Denoiser::encode_frames(const Mat& x_t, const DenoiserInputs& in) const {
  check_inputs(x_t, in);
  Mat e = frame_input_matrix(x_t, in) * frame_w_->w.transpose();
  e.rowwise() += frame_b_->w.row(0);
  return e;
}

Mat Denoiser::forward(const Mat& x_t, int t, const DenoiserInputs& in, bool train_mode,
                      RandomStream* dropout_rng) {
  check_inputs(x_t, in);
  if (t < 0) throw InvalidSteps("denoiser: negative timestep");

  const int N = cfg_.window;
  const int M = N + 1;
  const int D = cfg_.model_dim;
  const int H = cfg_.heads;
  const int Dh = D / H;
  const double scale = 1.0 / std::sqrt(static_cast<double>(Dh));

  cache_ = Cache{};
  cache_.train_mode = train_mode;
  cache_.layers.resize(static_cast<std::size_t>(cfg_.layers));

  // Per-frame tokens.
  cache_.frame_inputs = frame_input_matrix(x_t, in);
  Mat X(M, D);
  X.topRows(N) = cache_.frame_inputs * frame_w_->w.transpose();
  X.topRows(N).rowwise() += frame_b_->w.row(0);

  // Condition token: timestep FFN plus the projected observation window.
  cache_.t_sinusoid = sinusoidal_embedding(static_cast<double>(t), D);
  cache_.t_pre = t_w1_->w * cache_.t_sinusoid + t_b1_->w.row(0).transpose();
  cache_.t_act = activate_vec(cache_.t_pre);
  Vec c = t_w2_->w * cache_.t_act + t_b2_->w.row(0).transpose();
  if (cfg_.condition_input_dim() > 0) {
    cache_.cond_input = condition_input_vector(in);
    c += cond_w_->w * cache_.cond_input + cond_b_->w.row(0).transpose();
  }
  X.row(N) = c.transpose();

  X += pos_table_;

  for (int l = 0; l < cfg_.layers; ++l) {
    LayerParams& lp = layers_[static_cast<std::size_t>(l)];
    LayerCache& lc = cache_.layers[static_cast<std::size_t>(l)];

    lc.attn_in = layer_norm(X, lp.ln1_g->w.row(0).transpose(), lp.ln1_b->w.row(0).transpose(),
                            &lc.ln1_norm, &lc.ln1_rstd);
    lc.q = lc.attn_in * lp.wq->w.transpose();
    lc.q.rowwise() += lp.bq->w.row(0);
    lc.k = lc.attn_in * lp.wk->w.transpose();
    lc.k.rowwise() += lp.bk->w.row(0);
    lc.v = lc.attn_in * lp.wv->w.transpose();
    lc.v.rowwise() += lp.bv->w.row(0);

    lc.softmax.resize(static_cast<std::size_t>(H));
    lc.attn_concat.resize(M, D);
    for (int h = 0; h < H; ++h) {
      const auto Qh = lc.q.middleCols(h * Dh, Dh);
      const auto Kh = lc.k.middleCols(h * Dh, Dh);
      const auto Vh = lc.v.middleCols(h * Dh, Dh);
      Mat S = (Qh * Kh.transpose()) * scale;
      for (Eigen::Index r = 0; r < S.rows(); ++r) {
        const double mx = S.row(r).maxCoeff();
        S.row(r) = (S.row(r).array() - mx).exp();
        S.row(r) /= S.row(r).sum();
      }
      lc.softmax[static_cast<std::size_t>(h)] = S;
      lc.attn_concat.middleCols(h * Dh, Dh) = S * Vh;
    }
    Mat attn_out = lc.attn_concat * lp.wo->w.transpose();
    attn_out.rowwise() += lp.bo->w.row(0);
    attn_out = dropout_forward(attn_out, train_mode, dropout_rng, &lc.drop1_mask);
    X += attn_out;

    lc.ffn_in = layer_norm(X, lp.ln2_g->w.row(0).transpose(), lp.ln2_b->w.row(0).transpose(),
                           &lc.ln2_norm, &lc.ln2_rstd);
    lc.ffn_pre = lc.ffn_in * lp.w1->w.transpose();
    lc.ffn_pre.rowwise() += lp.b1->w.row(0);
    lc.ffn_act = activate(lc.ffn_pre);
    Mat f = lc.ffn_act * lp.w2->w.transpose();
    f.rowwise() += lp.b2->w.row(0);
    f = dropout_forward(f, train_mode, dropout_rng, &lc.drop2_mask);
    X += f;
  }

  cache_.final_in = layer_norm(X, final_g_->w.row(0).transpose(),
                               final_b_->w.row(0).transpose(), &cache_.final_norm,
                               &cache_.final_rstd);

  // Drop the condition token, project the frame tokens back to the target.
  Mat out = cache_.final_in.topRows(N) * out_w_->w.transpose();
  out.rowwise() += out_b_->w.row(0);
  cache_.valid = true;
  return out;
}

void Denoiser::backward(const Mat& grad_out) {
  if (!cache_.valid) throw Error("denoiser: backward called without a cached forward pass");
  const int N = cfg_.window;
  const int M = N + 1;
  const int D = cfg_.model_dim;
  const int H = cfg_.heads;
  const int Dh = D / H;
  const double scale = 1.0 / std::sqrt(static_cast<double>(Dh));
  if (grad_out.rows() != N || grad_out.cols() != cfg_.target_dim)
    throw ShapeMismatch("denoiser backward: gradient must be N x target_dim");

  out_w_->g += grad_out.transpose() * cache_.final_in.topRows(N);
  out_b_->g.row(0) += grad_out.colwise().sum();

  Mat dY = Mat::Zero(M, D);
  dY.topRows(N) = grad_out * out_w_->w;

  Mat dX;
  layer_norm_backward(dY, cache_.final_norm, cache_.final_rstd,
                      final_g_->w.row(0).transpose(), final_g_->g, final_b_->g, dX);

  for (int l = cfg_.layers - 1; l >= 0; --l) {
    LayerParams& lp = layers_[static_cast<std::size_t>(l)];
    LayerCache& lc = cache_.layers[static_cast<std::size_t>(l)];

    // Feed-forward block.
    Mat dF = dX;
    if (lc.drop2_mask.size() > 0) dF = dF.cwiseProduct(lc.drop2_mask);
    lp.w2->g += dF.transpose() * lc.ffn_act;
    lp.b2->g.row(0) += dF.colwise().sum();
    Mat dPre = (dF * lp.w2->w).cwiseProduct(activate_grad(lc.ffn_pre));
    lp.w1->g += dPre.transpose() * lc.ffn_in;
    lp.b1->g.row(0) += dPre.colwise().sum();
    Mat dFfnIn = dPre * lp.w1->w;
    Mat dXmid;
    layer_norm_backward(dFfnIn, lc.ln2_norm, lc.ln2_rstd, lp.ln2_g->w.row(0).transpose(),
                        lp.ln2_g->g, lp.ln2_b->g, dXmid);
    dXmid += dX;

    // Attention block.
    Mat dAttnOut = dXmid;
    if (lc.drop1_mask.size() > 0) dAttnOut = dAttnOut.cwiseProduct(lc.drop1_mask);
    lp.wo->g += dAttnOut.transpose() * lc.attn_concat;
    lp.bo->g.row(0) += dAttnOut.colwise().sum();
    Mat dO = dAttnOut * lp.wo->w;

    Mat dQ(M, D), dK(M, D), dV(M, D);
    for (int h = 0; h < H; ++h) {
      const auto dOh = dO.middleCols(h * Dh, Dh);
      const Mat& P = lc.softmax[static_cast<std::size_t>(h)];
      const auto Qh = lc.q.middleCols(h * Dh, Dh);
      const auto Kh = lc.k.middleCols(h * Dh, Dh);
      const auto Vh = lc.v.middleCols(h * Dh, Dh);

      Mat dP = dOh * Vh.transpose();
      dV.middleCols(h * Dh, Dh) = P.transpose() * dOh;
      const Vec row_dot = dP.cwiseProduct(P).rowwise().sum();
      Mat dS = dP;
      dS.colwise() -= row_dot;
      dS = dS.cwiseProduct(P);
      dQ.middleCols(h * Dh, Dh) = (dS * Kh) * scale;
      dK.middleCols(h * Dh, Dh) = (dS.transpose() * Qh) * scale;
    }

    lp.wq->g += dQ.transpose() * lc.attn_in;
    lp.bq->g.row(0) += dQ.colwise().sum();
    lp.wk->g += dK.transpose() * lc.attn_in;
    lp.bk->g.row(0) += dK.colwise().sum();
    lp.wv->g += dV.transpose() * lc.attn_in;
    lp.bv->g.row(0) += dV.colwise().sum();

    Mat dAttnIn = dQ * lp.wq->w + dK * lp.wk->w + dV * lp.wv->w;
    Mat dXin;
    layer_norm_backward(dAttnIn, lc.ln1_norm, lc.ln1_rstd, lp.ln1_g->w.row(0).transpose(),
                        lp.ln1_g->g, lp.ln1_b->g, dXin);
    dXin += dXmid;
    dX = std::move(dXin);
  }

  // Positional table is fixed; gradients pass straight through.
  const Mat dE = dX.topRows(N);
  frame_w_->g += dE.transpose() * cache_.frame_inputs;
  frame_b_->g.row(0) += dE.colwise().sum();

  const Vec dc = dX.row(N).transpose();
  if (cfg_.condition_input_dim() > 0) {
    cond_w_->g += dc * cache_.cond_input.transpose();
    cond_b_->g.row(0) += dc.transpose();
  }
  t_w2_->g += dc * cache_.t_act.transpose();
  t_b2_->g.row(0) += dc.transpose();
  const Vec dAct = t_w2_->w.transpose() * dc;
  const Vec dPre = dAct.cwiseProduct(activate_grad_vec(cache_.t_pre));
  t_w1_->g += dPre * cache_.t_sinusoid.transpose();
  t_b1_->g.row(0) += dPre.transpose();

  cache_.valid = false;
}

}  // namespace mocap
