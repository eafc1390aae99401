#include "alphaforge/policy.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <optional>

#include "alphaforge/alphashape.hpp"
#include "alphaforge/delaunay.hpp"
#include "alphaforge/error.hpp"
#include "alphaforge/knn.hpp"
#include "alphaforge/mesh.hpp"
#include "alphaforge/metrics.hpp"
#include "alphaforge/sampling.hpp"

namespace alphaforge {

namespace {

struct Stats {
  double mean = 0, stddev = 0, min = 0, max = 0;
};

Stats stats_of(const std::vector<double>& xs) {
  Stats s;
  s.min = *std::min_element(xs.begin(), xs.end());
  s.max = *std::max_element(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double var = 0.0;
  for (double x : xs) var += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(var / n);
  return s;
}

}  // namespace

StateDescriptor state_descriptor(const PointCloud& cloud) {
  const std::size_t n = cloud.size();
  if (n < 9) throw Error(Errc::TooFewPoints, "descriptor needs at least 9 points");

  Vec3 mean;
  for (const auto& p : cloud.points) mean += p;
  mean = mean / static_cast<double>(n);
  std::vector<Point3> centered(n);
  for (std::size_t i = 0; i < n; ++i) centered[i] = cloud.points[i] - mean;

  StateDescriptor s{};
  const Vec3 ext = bounding_box(centered).extent();
  s[0] = ext.x;
  s[1] = ext.y;
  s[2] = ext.z;
  s[3] = std::log(static_cast<double>(n));

  const KdTree tree(centered);
  std::vector<double> d1(n), d8(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto nb = tree.k_nearest(centered[i], 9);
    // Drop the query point itself; duplicates at distance 0 stay.
    std::vector<double> others;
    others.reserve(8);
    for (const auto& x : nb) {
      if (x.index != i && others.size() < 8) others.push_back(std::sqrt(x.squared_distance));
    }
    d1[i] = others.front();
    d8[i] = others.back();
  }
  const Stats s1 = stats_of(d1), s8 = stats_of(d8);
  s[4] = s1.mean;
  s[5] = s1.stddev;
  s[6] = s1.min;
  s[7] = s1.max;
  s[8] = s8.mean;
  s[9] = s8.stddev;
  s[10] = s8.min;
  s[11] = s8.max;

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : centered) {
    const Eigen::Vector3d v(p.x, p.y, p.z);
    cov += v * v.transpose();
  }
  cov /= static_cast<double>(n);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov, Eigen::EigenvaluesOnly);
  const Eigen::Vector3d ev = eig.eigenvalues().cwiseMax(0.0);  // ascending
  const double total = ev.sum();
  for (int k = 0; k < 3; ++k) s[12 + k] = total > 0.0 ? ev(2 - k) / total : 0.0;
  s[15] = 1.0;
  return s;
}

QPolicy QPolicy::create(std::vector<double> actions, double epsilon, double epsilon_decay, int period) {
  QPolicy p;
  p.actions = std::move(actions);
  p.theta.assign(p.actions.size(), {});
  p.sq_grad.assign(p.actions.size(), {});
  p.epsilon = epsilon;
  p.epsilon_decay = epsilon_decay;
  p.period = period;
  p.validate();
  return p;
}

void QPolicy::validate() const {
  if (actions.empty()) throw Error(Errc::ConfigError, "policy needs at least one action");
  for (double t : actions) {
    if (!(t > 0.0) || !std::isfinite(t)) throw Error(Errc::ConfigError, "thresholds must be positive");
  }
  if (theta.size() != actions.size() || sq_grad.size() != actions.size()) {
    throw Error(Errc::ConfigError, "parameter rows do not match the action count");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw Error(Errc::ConfigError, "epsilon must lie in [0, 1]");
  if (!(epsilon_floor >= 0.0 && epsilon_floor <= 1.0)) {
    throw Error(Errc::ConfigError, "epsilon floor must lie in [0, 1]");
  }
  if (!(epsilon_decay > 0.0 && epsilon_decay <= 1.0)) {
    throw Error(Errc::ConfigError, "epsilon decay must lie in (0, 1]");
  }
  if (period < 1) throw Error(Errc::ConfigError, "period must be >= 1");
  if (!(learning_rate > 0.0) || !(rms_decay >= 0.0 && rms_decay < 1.0) || !(rms_epsilon > 0.0)) {
    throw Error(Errc::ConfigError, "invalid optimizer settings");
  }
}

std::vector<double> q_values(const QPolicy& policy, const StateDescriptor& s) {
  std::vector<double> q(policy.size());
  for (std::size_t a = 0; a < policy.size(); ++a) {
    double acc = 0.0;
    for (std::size_t k = 0; k < kStateDim; ++k) acc += policy.theta[a][k] * s[k];
    q[a] = acc;
  }
  return q;
}

std::size_t greedy_action(const QPolicy& policy, const StateDescriptor& s) {
  const auto q = q_values(policy, s);
  return static_cast<std::size_t>(std::max_element(q.begin(), q.end()) - q.begin());
}

Selection select_action(const QPolicy& policy, const StateDescriptor& s, CounterRng& rng) {
  if (rng.uniform() < policy.epsilon) {
    return {static_cast<std::size_t>(rng.below(policy.size())), false};
  }
  return {greedy_action(policy, s), true};
}

void update(QPolicy& policy, const StateDescriptor& s, std::size_t action, double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw Error(Errc::RewardOutOfRange, "reward must lie in [0, 1]");
  if (action >= policy.size()) throw Error(Errc::ConfigError, "action index out of range");
  auto& row = policy.theta[action];
  auto& acc = policy.sq_grad[action];
  double q = 0.0;
  for (std::size_t k = 0; k < kStateDim; ++k) q += row[k] * s[k];
  const double err = q - r;
  for (std::size_t k = 0; k < kStateDim; ++k) {
    const double g = 2.0 * err * s[k];
    acc[k] = policy.rms_decay * acc[k] + (1.0 - policy.rms_decay) * g * g;
    row[k] -= policy.learning_rate * g / (std::sqrt(acc[k]) + policy.rms_epsilon);
  }
  policy.epsilon = std::max(policy.epsilon_floor, policy.epsilon * policy.epsilon_decay);
}

double reward(const Mesh& pred, const Mesh& gt, double nu, std::size_t n_samples, std::uint64_t seed) {
  if (pred.faces.empty() || gt.faces.empty()) throw Error(Errc::EmptyMesh, "reward needs two surfaces");
  const PointCloud p = sample_surface(pred, n_samples, seed);
  const PointCloud q = sample_surface(gt, n_samples, seed);
  return std::clamp(f1_score(p, q, nu).f1 / 100.0, 0.0, 1.0);
}

std::uint64_t hash_state(const StateDescriptor& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (double x : s) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &x, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

TrainLog train_policy(const std::vector<TrainingInstance>& dataset, QPolicy& policy, std::size_t episodes,
                      std::uint64_t seed, const TrainOptions& opts) {
  if (dataset.empty()) throw Error(Errc::ConfigError, "training dataset is empty");
  policy.validate();

  // Descriptors and Delaunay complexes do not depend on the threshold, and the
  // reward of (instance, action) is a pure function of both, so all three are
  // computed once.
  std::vector<StateDescriptor> states(dataset.size());
  std::vector<std::optional<DelaunayComplex>> complexes(dataset.size());
  std::map<std::pair<std::size_t, std::size_t>, double> rewards;
  for (std::size_t i = 0; i < dataset.size(); ++i) states[i] = state_descriptor(dataset[i].cloud);

  auto reward_of = [&](std::size_t inst, std::size_t action) {
    const auto key = std::make_pair(inst, action);
    if (auto it = rewards.find(key); it != rewards.end()) return it->second;
    if (!complexes[inst]) complexes[inst] = delaunay_complex(dataset[inst].cloud);
    double r = 0.0;
    try {
      const Mesh m = triangulate_surface(*complexes[inst], policy.actions[action]).mesh;
      r = reward(m, dataset[inst].reference, opts.nu, opts.reward_samples, seed + 1 + inst);
    } catch (const Error& e) {
      if (e.code() != Errc::EmptyMesh && e.code() != Errc::NoSurface) throw;
    }
    rewards.emplace(key, r);
    return r;
  };

  CounterRng order_rng(seed);
  CounterRng action_rng(seed ^ 0x5DEECE66DULL);
  std::vector<std::size_t> order(dataset.size());
  std::size_t cursor = order.size();

  struct Transition {
    std::size_t instance;
    std::size_t action;
    double reward;
  };
  std::vector<Transition> buffer;
  TrainLog log;
  log.steps.reserve(episodes);
  for (std::size_t ep = 0; ep < episodes; ++ep) {
    if (cursor == order.size()) {
      std::iota(order.begin(), order.end(), 0);
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[order_rng.below(i)]);
      cursor = 0;
    }
    const std::size_t inst = order[cursor++];
    const Selection sel = select_action(policy, states[inst], action_rng);
    const double r = reward_of(inst, sel.action);
    log.steps.push_back({hash_state(states[inst]), sel.action, r, policy.epsilon, sel.greedy});
    buffer.push_back({inst, sel.action, r});
    if (buffer.size() >= static_cast<std::size_t>(policy.period)) {
      for (const auto& t : buffer) update(policy, states[t.instance], t.action, t.reward);
      buffer.clear();
    }
  }
  return log;
}

namespace {

using nlohmann::json;

json rows_to_json(const std::vector<std::array<double, kStateDim>>& rows) {
  json flat = json::array();
  for (const auto& r : rows) {
    for (double x : r) flat.push_back(x);
  }
  return flat;
}

std::vector<std::array<double, kStateDim>> rows_from_json(const json& flat, std::size_t n) {
  if (!flat.is_array() || flat.size() != n * kStateDim) {
    throw Error(Errc::ParseError, "parameter matrix has the wrong size");
  }
  std::vector<std::array<double, kStateDim>> rows(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t k = 0; k < kStateDim; ++k) rows[a][k] = flat.at(a * kStateDim + k).get<double>();
  }
  return rows;
}

}  // namespace

std::string policy_to_json(const QPolicy& policy) {
  json j;
  j["version"] = 1;
  j["actions"] = policy.actions;
  j["theta"] = rows_to_json(policy.theta);
  j["epsilon"] = policy.epsilon;
  j["epsilon_decay"] = policy.epsilon_decay;
  j["epsilon_floor"] = policy.epsilon_floor;
  j["period"] = policy.period;
  j["optimizer_state"] = {{"learning_rate", policy.learning_rate},
                          {"rms_decay", policy.rms_decay},
                          {"rms_epsilon", policy.rms_epsilon},
                          {"sq_grad", rows_to_json(policy.sq_grad)}};
  return j.dump(2) + "\n";
}

QPolicy policy_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("version").get<int>() != 1) throw Error(Errc::ParseError, "unsupported policy version");
    QPolicy p;
    p.actions = j.at("actions").get<std::vector<double>>();
    p.theta = rows_from_json(j.at("theta"), p.actions.size());
    p.epsilon = j.at("epsilon").get<double>();
    p.epsilon_decay = j.at("epsilon_decay").get<double>();
    p.epsilon_floor = j.value("epsilon_floor", 0.01);
    p.period = j.at("period").get<int>();
    const json& opt = j.at("optimizer_state");
    p.learning_rate = opt.at("learning_rate").get<double>();
    p.rms_decay = opt.at("rms_decay").get<double>();
    p.rms_epsilon = opt.at("rms_epsilon").get<double>();
    p.sq_grad = rows_from_json(opt.at("sq_grad"), p.actions.size());
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("policy JSON: ") + e.what());
  }
}

}  // namespace alphaforge
