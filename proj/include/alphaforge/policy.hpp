#pragma once

// Threshold-selection policy: a contextual epsilon-greedy value learner that
// picks the circumradius threshold for each input cloud. The value model is
// linear in a 16-dimensional point-cloud descriptor and is trained on the F1
// reward of the resulting triangulation, one RMSProp step per transition.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "alphaforge/geometry.hpp"
#include "alphaforge/random.hpp"

namespace alphaforge {

inline constexpr std::size_t kStateDim = 16;

/// [0..2]  bounding-box extents
/// [3]     log(point count)
/// [4..7]  mean, std, min, max of the nearest-neighbour distance
/// [8..11] mean, std, min, max of the 8th-nearest-neighbour distance
/// [12..14] covariance eigenvalues (descending) over their sum
/// [15]    bias, always 1
using StateDescriptor = std::array<double, kStateDim>;

/// Throws TooFewPoints below 9 points.
StateDescriptor state_descriptor(const PointCloud& cloud);

struct QPolicy {
  std::vector<double> actions;                         // thresholds tau_i
  std::vector<std::array<double, kStateDim>> theta;    // one row per action
  std::vector<std::array<double, kStateDim>> sq_grad;  // RMSProp running averages
  double epsilon = 0.9;
  double epsilon_decay = 0.99;
  double epsilon_floor = 0.01;
  int period = 2;
  double learning_rate = 1e-2;
  double rms_decay = 0.99;
  double rms_epsilon = 1e-8;

  /// Zero-initialized parameters for the given actions.
  static QPolicy create(std::vector<double> actions, double epsilon = 0.9, double epsilon_decay = 0.99,
                        int period = 2);

  std::size_t size() const noexcept { return actions.size(); }
  /// Throws ConfigError on an empty action set, non-positive tau, epsilon
  /// outside [0, 1], mismatched parameter shapes or a period < 1.
  void validate() const;
};

std::vector<double> q_values(const QPolicy& policy, const StateDescriptor& s);

/// argmax of q_values, lowest index on ties.
std::size_t greedy_action(const QPolicy& policy, const StateDescriptor& s);

struct Selection {
  std::size_t action = 0;
  bool greedy = true;
};

/// With probability 1 - epsilon the greedy action, otherwise uniform.
Selection select_action(const QPolicy& policy, const StateDescriptor& s, CounterRng& rng);

/// One RMSProp step on (q(s)[a] - r)^2 for the chosen row, then epsilon decay
/// (floored). Throws RewardOutOfRange unless r is in [0, 1].
void update(QPolicy& policy, const StateDescriptor& s, std::size_t action, double reward);

/// F1 on a 0..1 scale between same-seed surface samples of both meshes at radius nu.
/// Throws EmptyMesh if either mesh has no faces.
double reward(const Mesh& pred, const Mesh& gt, double nu, std::size_t n_samples, std::uint64_t seed);

struct TrainingInstance {
  PointCloud cloud;
  Mesh reference;
};

struct TrainStep {
  std::uint64_t state_hash = 0;
  std::size_t action = 0;
  double reward = 0.0;
  double epsilon = 0.0;
  bool greedy = true;
};

struct TrainLog {
  std::vector<TrainStep> steps;
};

struct TrainOptions {
  double nu = 1e-4;
  std::size_t reward_samples = 3000;
};

/// Runs `episodes` interactions. Each episode draws the next instance from a
/// reshuffled pass over the dataset, selects a threshold, triangulates (an
/// empty result scores 0) and buffers the transition; every `period`
/// transitions the buffer is replayed through update() once and cleared.
TrainLog train_policy(const std::vector<TrainingInstance>& dataset, QPolicy& policy, std::size_t episodes,
                      std::uint64_t seed, const TrainOptions& opts = {});

/// FNV-1a over the descriptor's bytes.
std::uint64_t hash_state(const StateDescriptor& s);

/// Versioned JSON document; reals use shortest round-trip formatting.
std::string policy_to_json(const QPolicy& policy);
QPolicy policy_from_json(const std::string& text);

}  // namespace alphaforge
