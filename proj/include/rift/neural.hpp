#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace rift {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Dense actor-critic parameters: shared 8-64-32 tanh trunk, softmax policy
/// head (2 actions) and a linear scalar value head.
struct NetParams {
  MatrixXd w1{64, 8};
  VectorXd b1{64};
  MatrixXd w2{32, 64};
  VectorXd b2{32};
  MatrixXd wp{2, 32};
  VectorXd bp{2};
  MatrixXd wv{1, 32};
  VectorXd bv{1};

  NetParams();  // zero-initialized

  NetParams& operator+=(const NetParams& other);
  NetParams& operator*=(double s);
  double max_abs() const;
  bool all_finite() const;

  // flat views for generic parameter-space loops (Adam, finite differences)
  std::size_t size() const;
  double& coeff(std::size_t i);
  double coeff(std::size_t i) const;
};

/// Scaled-uniform fan-in init, zero biases, policy head scaled down to 0.01 so
/// the initial policy is near uniform.  Seed-deterministic.
NetParams init_params(std::uint64_t seed);

struct ForwardOutput {
  Eigen::Vector2d probs;      // softmax action probabilities
  Eigen::Vector2d log_probs;
  double value = 0.0;
  // cached activations for backprop
  Eigen::Matrix<double, 8, 1> input;
  VectorXd h1{64};  // tanh outputs, layer 1
  VectorXd h2{32};  // tanh outputs, layer 2
};

ForwardOutput forward(const NetParams& params, const Eigen::Matrix<double, 8, 1>& obs);

/// One sample of the PPO composite loss.
struct LossSample {
  Eigen::Matrix<double, 8, 1> obs;
  int action = 0;
  double old_log_prob = 0.0;
  double advantage = 0.0;
  double return_target = 0.0;
};

struct LossSpec {
  double clip_epsilon = 0.2;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
};

/// Mean composite loss over the minibatch:
///   -min(rho*A, clip(rho)*A) + c_v*(V - R)^2 - c_e*entropy.
double ppo_loss(const NetParams& params, const std::vector<LossSample>& batch,
                const LossSpec& spec);

/// Analytic gradients of ppo_loss wrt every parameter.
NetParams backward(const NetParams& params, const std::vector<LossSample>& batch,
                   const LossSpec& spec);

struct AdamState {
  NetParams m;  // first moments
  NetParams v;  // second moments
  std::int64_t step = 0;
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

void adam_step(NetParams& params, const NetParams& grads, AdamState& state);

/// JSON checkpoint holding every array plus seed and config hash; round-trips
/// bit-exactly.
void save_checkpoint(const NetParams& params, std::uint64_t seed,
                     std::uint64_t config_hash, const std::string& path);
NetParams load_checkpoint(const std::string& path, std::uint64_t* seed = nullptr,
                          std::uint64_t* config_hash = nullptr);

}  // namespace rift
