#pragma once

#include <memory>
#include <string>

#include "mocap/checkpoint.hpp"
#include "mocap/denoiser.hpp"
#include "mocap/optimizer.hpp"

namespace mocap {

/// Model <-> checkpoint translation. A "stage" is a named model inside a
/// checkpoint ("joint", "pose", "direct", ...): its config lands under
/// `model.<stage>.*`, weights under `<stage>.param.<name>`, normalization
/// stats under `<stage>.norm.*`, optimizer moments under `<stage>.adam.*`.

void write_stage(Checkpoint& ck, const std::string& stage, const Denoiser& model);
void write_optimizer(Checkpoint& ck, const std::string& stage, const AdamW& opt);

DenoiserConfig read_stage_config(const KeyValueConfig& cfg, const std::string& stage);
std::unique_ptr<Denoiser> read_stage(const Checkpoint& ck, const std::string& stage);
void read_optimizer(const Checkpoint& ck, const std::string& stage, AdamW& opt);

bool has_stage(const Checkpoint& ck, const std::string& stage);

}  // namespace mocap
