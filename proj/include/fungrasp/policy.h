// Copyright 2026 The FunGrasp Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FUNGRASP_POLICY_H_
#define FUNGRASP_POLICY_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fungrasp/demo.h"
#include "fungrasp/geometry.h"
#include "fungrasp/grasp_sim.h"
#include "fungrasp/object.h"
#include "fungrasp/rng.h"

namespace fungrasp {

inline constexpr int kPointInput = 6;
inline constexpr int kPointHidden = 32;
inline constexpr int kCloudFeature = 64;
inline constexpr int kTrunkHidden = 128;
inline constexpr int kValueHidden = 64;
inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 1.0;

struct PolicyDims {
  int num_styles = 1;
  int num_joints = 1;
  int num_points = 128;

  // s_r (7), s_o (7), p_afford_rel (3), style one-hot (S), obj_bb (1).
  int state_dim() const { return 18 + num_styles; }
  int trunk_input() const { return state_dim() + kCloudFeature; }
  // dt (3), dr (3), dq (J), k (1).
  int action_dim() const { return 7 + num_joints; }
};

// Per-point input rows: position minus centroid over obj_bb (3), normal (3).
using CloudInput = Eigen::MatrixXd;  // 6 x M

struct Observation {
  VecX state;
  std::shared_ptr<const CloudInput> cloud;
};

// Farthest-point subset of the canonical cloud, centred and scale-normalized.
CloudInput MakeCloudInput(const ObjectModel& obj, int num_points,
                          std::uint64_t seed);

// s_r is the demonstration's unedited first end-effector pose in the world.
Observation EncodeObservation(const EnvState& env, const ObjectModel& obj,
                              const Demonstration& demo, int num_styles,
                              std::shared_ptr<const CloudInput> cloud);

struct LinearLayer {
  std::string name;
  int in = 0;
  int out = 0;
  std::size_t offset = 0;  // weights (out x in, column-major), then bias

  std::size_t size() const { return static_cast<std::size_t>(in + 1) * out; }
};

// Actor: point branch -> trunk -> mean head, plus a state-independent
// log-std vector. Critic: its own point branch -> value trunk -> scalar.
class PolicyNet {
 public:
  enum Layer {
    kActorPoint1,
    kActorPoint2,
    kActorTrunk1,
    kActorTrunk2,
    kActorMean,
    kCriticPoint1,
    kCriticPoint2,
    kCriticTrunk1,
    kCriticTrunk2,
    kCriticValue,
    kNumLayers
  };

  explicit PolicyNet(const PolicyDims& dims);

  const PolicyDims& dims() const { return dims_; }
  const std::vector<LinearLayer>& layers() const { return layers_; }
  std::size_t log_std_offset() const { return log_std_offset_; }
  std::size_t num_params() const { return static_cast<std::size_t>(params_.size()); }

  VecX& params() { return params_; }
  const VecX& params() const { return params_; }

  // Orthogonal weights (gain sqrt(2) on hidden layers, 0.01 on the mean
  // head, 1 on the value head), zero biases.
  void Initialize(std::uint64_t seed, double init_log_std, bool zero_heads = false);

  Eigen::Map<const Eigen::MatrixXd> Weights(Layer l) const;
  Eigen::Map<const VecX> Bias(Layer l) const;
  VecX LogStd() const;  // clamped to [kLogStdMin, kLogStdMax]
  void ClampLogStd();

 private:
  PolicyDims dims_;
  std::vector<LinearLayer> layers_;
  std::size_t log_std_offset_ = 0;
  VecX params_;
};

// Activations kept for the backward pass.
struct PointBranchCache {
  Eigen::MatrixXd h1, h2;               // 32 x M, 64 x M after ReLU
  VecX pooled;                          // 64
  std::vector<int> argmax;              // 64, lowest index on ties
};

struct ForwardCache {
  std::vector<const CloudInput*> clouds;      // unique clouds in first-seen order
  std::vector<int> cloud_of;                  // per sample
  std::vector<PointBranchCache> actor_points, critic_points;
  Eigen::MatrixXd actor_in, actor_h1, actor_h2;
  Eigen::MatrixXd critic_in, critic_h1, critic_h2;
};

struct PolicyOutput {
  Eigen::MatrixXd mean;  // A x B
  VecX log_std;          // A
  VecX value;            // B
};

// Throws std::runtime_error naming the layer if an activation is not finite.
PolicyOutput PolicyForward(const PolicyNet& net, std::span<const Observation> obs,
                           ForwardCache* cache = nullptr);

// True when both passes share every ReLU gate and max-pool route. The
// network is differentiable along a segment with a constant pattern.
bool SameActivationPattern(const ForwardCache& a, const ForwardCache& b);

// Reverse-mode pass for upstream gradients on the outputs. Writes the full
// parameter gradient into grad (resized and overwritten).
void PolicyBackward(const PolicyNet& net, const ForwardCache& cache,
                    const Eigen::MatrixXd& d_mean, const VecX& d_log_std,
                    const VecX& d_value, VecX& grad);

// Box-bounded action space; raw Gaussian samples are squashed by tanh and
// mapped affinely onto [lo, hi].
struct ActionSpace {
  VecX lo;
  VecX hi;

  int dim() const { return static_cast<int>(lo.size()); }
};

// dr is bounded per component by b_r / sqrt(3) so that |dr| <= b_r.
ActionSpace MakeEditActionSpace(const ActionBounds& bounds, int num_joints);
ActionSpace UniformActionSpace(int dim, double lo, double hi);

VecX Squash(const ActionSpace& space, const VecX& raw);
// Inverse of Squash after pulling the action 1e-6 inside the box (in tanh
// units). Sets *clamped when the pull changed anything.
VecX Unsquash(const ActionSpace& space, const VecX& action, bool* clamped = nullptr);

EditAction ToEditAction(const VecX& squashed, int num_joints);
VecX FromEditAction(const EditAction& action);

double GaussianLogProb(const VecX& mean, const VecX& log_std, const VecX& raw);
// sum_i log(d action_i / d raw_i).
double SquashLogJacobian(const ActionSpace& space, const VecX& raw);
double SquashedLogProb(const VecX& mean, const VecX& log_std,
                       const ActionSpace& space, const VecX& raw);
double GaussianEntropy(const VecX& log_std);

struct ActionSample {
  VecX raw;
  VecX action;  // squashed
  double log_prob = 0.0;
};

ActionSample SampleAction(const VecX& mean, const VecX& log_std,
                          const ActionSpace& space, Rng& rng);

double ActionLogProb(const PolicyNet& net, const Observation& obs,
                     const VecX& action, const ActionSpace& space,
                     bool* clamped = nullptr);

}  // namespace fungrasp

#endif  // FUNGRASP_POLICY_H_
