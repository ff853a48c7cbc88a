#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mocap/diffusion.hpp"
#include "mocap/params.hpp"
#include "mocap/random.hpp"
#include "mocap/sensors.hpp"

namespace mocap {

/// How observations enter the network.
///
/// kKeypointCondition is the asymmetric default: the keypoint window is
/// compressed into the single condition token while IMU readings stay
/// per-frame. The other two are ablation variants that route both
/// modalities the same way.
enum class ConditioningMode { kKeypointCondition, kBothAsCondition, kBothAsSequential };

enum class Activation { kGelu, kRelu };

const char* to_string(ConditioningMode mode);
ConditioningMode conditioning_mode_from_string(const std::string& s);

struct DenoiserConfig {
  int target_dim = 72;           // per-frame channels of the diffusion target (3J or 6J)
  int imu_dim = kImuChannels;    // 72; per-frame inertial channels
  int keypoint_dim = 99;         // 3K; 0 for models that never see keypoints
  int aux_dim = 0;               // per-frame conditioning channels (stage-1 joint positions)
  ConditioningMode mode = ConditioningMode::kKeypointCondition;
  int layers = 8;
  int heads = 4;
  int model_dim = 512;
  int ff_dim = 1024;  // 2 * model_dim
  double dropout = 0.1;
  int window = 60;
  Activation activation = Activation::kGelu;

  bool imu_sequential() const {
    return imu_dim > 0 && mode != ConditioningMode::kBothAsCondition;
  }
  bool keypoints_sequential() const {
    return keypoint_dim > 0 && mode == ConditioningMode::kBothAsSequential;
  }
  bool imu_in_condition() const {
    return imu_dim > 0 && mode == ConditioningMode::kBothAsCondition;
  }
  bool keypoints_in_condition() const {
    return keypoint_dim > 0 && mode != ConditioningMode::kBothAsSequential;
  }

  /// Channels of the shared per-frame projection, concatenation order
  /// [imu, keypoints, x_t, aux].
  int frame_input_dim() const {
    return (imu_sequential() ? imu_dim : 0) + (keypoints_sequential() ? keypoint_dim : 0) +
           target_dim + aux_dim;
  }
  /// Channels of the flattened window feeding the condition projection,
  /// order [keypoints, imu]; 0 means the condition carries the timestep only.
  int condition_input_dim() const {
    return ((keypoints_in_condition() ? keypoint_dim : 0) +
            (imu_in_condition() ? imu_dim : 0)) *
           window;
  }

  void validate() const;
};

/// Per-channel standardization applied to the observation inputs at entry
/// (never to the diffusion target). Stats are measured on the training set
/// and stored with the weights.
struct NormStats {
  Vec imu_mean, imu_std;
  Vec keypoint_mean, keypoint_std;
  Vec aux_mean, aux_std;

  static NormStats identity(const DenoiserConfig& cfg);
};

struct DenoiserInputs {
  const Mat* imu = nullptr;        // N x imu_dim
  const Mat* keypoints = nullptr;  // N x keypoint_dim
  const Mat* aux = nullptr;        // N x aux_dim
};

/// Transformer-encoder denoiser predicting the clean window x0 from
/// (x_t, t, observations). Tokens are the N projected frames plus one
/// condition token; full bidirectional attention runs over all N+1 tokens,
/// the condition token's output is dropped, and the rest is projected back
/// to the target dimension.
///
/// forward() caches activations; backward() consumes them, accumulating
/// parameter gradients. Single-threaded by design.
class Denoiser {
 public:
  Denoiser(const DenoiserConfig& cfg, std::uint64_t init_seed);

  const DenoiserConfig& config() const { return cfg_; }
  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }
  NormStats& norm_stats() { return norm_; }
  const NormStats& norm_stats() const { return norm_; }

  long parameter_count() const { return params_.total_size(); }
  int token_count() const { return cfg_.window + 1; }

  Mat forward(const Mat& x_t, int t, const DenoiserInputs& in, bool train_mode = false,
              RandomStream* dropout_rng = nullptr);
  void backward(const Mat& grad_out);

  /// Classic sin/cos table row for an arbitrary position.
  static Vec sinusoidal_embedding(double position, int dim);

  /// Timestep branch of the condition token: two-layer FFN over the
  /// sinusoidal encoding of t.
  Vec timestep_embedding(int t) const;

  /// Full condition token c: timestep embedding plus the projected
  /// flattened observation window (when the mode routes one there).
  Vec encode_condition(int t, const DenoiserInputs& in) const;

  /// Per-frame token embeddings before positional addition; row n depends
  /// only on frame n of the inputs.
  Mat encode_frames(const Mat& x_t, const DenoiserInputs& in) const;

 private:
  struct LayerParams {
    Param *ln1_g, *ln1_b;
    Param *wq, *bq, *wk, *bk, *wv, *bv, *wo, *bo;
    Param *ln2_g, *ln2_b;
    Param *w1, *b1, *w2, *b2;
  };

  struct LayerCache {
    Mat ln1_norm, attn_in;  // normalized input and LN1 output
    Vec ln1_rstd;
    Mat q, k, v;
    std::vector<Mat> softmax;  // per head, M x M
    Mat attn_concat;           // heads concatenated, pre-output-projection
    Mat drop1_mask;
    Mat ln2_norm, ffn_in;
    Vec ln2_rstd;
    Mat ffn_pre, ffn_act;
    Mat drop2_mask;
  };

  struct Cache {
    bool valid = false;
    bool train_mode = false;
    Mat frame_inputs;  // N x frame_input_dim
    Vec cond_input;    // condition_input_dim
    Vec t_sinusoid, t_pre, t_act;
    std::vector<LayerCache> layers;
    Mat final_norm, final_in;  // normalized tokens and final LN output
    Vec final_rstd;
  };

  Mat normalize_rows(const Mat& raw, const Vec& mean, const Vec& stddev) const;
  Mat frame_input_matrix(const Mat& x_t, const DenoiserInputs& in) const;
  Vec condition_input_vector(const DenoiserInputs& in) const;
  void check_inputs(const Mat& x_t, const DenoiserInputs& in) const;
  Mat layer_norm(const Mat& x, const Vec& gain, const Vec& bias, Mat* norm_out,
                 Vec* rstd_out) const;
  void layer_norm_backward(const Mat& d_out, const Mat& norm, const Vec& rstd,
                           const Vec& gain, Mat& d_gain_acc, Mat& d_bias_acc,
                           Mat& d_in) const;
  Mat activate(const Mat& pre) const;
  Mat activate_grad(const Mat& pre) const;
  Vec activate_vec(const Vec& pre) const;
  Vec activate_grad_vec(const Vec& pre) const;
  Mat dropout_forward(const Mat& x, bool train_mode, RandomStream* rng, Mat* mask) const;

  DenoiserConfig cfg_;
  ParamSet params_;
  NormStats norm_;

  Param *frame_w_, *frame_b_;
  Param *cond_w_ = nullptr, *cond_b_ = nullptr;
  Param *t_w1_, *t_b1_, *t_w2_, *t_b2_;
  std::vector<LayerParams> layers_;
  Param *final_g_, *final_b_;
  Param *out_w_, *out_b_;

  Mat pos_table_;  // (N+1) x D, fixed sinusoidal; condition token takes the last slot
  Cache cache_;
};

/// Binds a model to fixed conditions so the diffusion objective can drive it.
class BoundDenoiser : public TrainableDenoiser {
 public:
  BoundDenoiser(Denoiser& model, DenoiserInputs in, bool train_mode = false,
                RandomStream* dropout_rng = nullptr)
      : model_(model), in_(in), train_mode_(train_mode), rng_(dropout_rng) {}

  Mat denoise(const Mat& x_t, int t) override {
    return model_.forward(x_t, t, in_, train_mode_, rng_);
  }
  void backward(const Mat& grad_out) override { model_.backward(grad_out); }

 private:
  Denoiser& model_;
  DenoiserInputs in_;
  bool train_mode_;
  RandomStream* rng_;
};

}  // namespace mocap
