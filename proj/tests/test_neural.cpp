#include <doctest.h>

#include <cstdio>
#include <random>

#include "rift/neural.hpp"

using namespace rift;

namespace {

template <typename A, typename B>
bool bit_equal(const A& a, const B& b) {
  return (a - b).cwiseAbs().maxCoeff() == 0.0;
}

bool params_equal(const NetParams& a, const NetParams& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.coeff(i) != b.coeff(i)) return false;
  }
  return true;
}

Eigen::Matrix<double, 8, 1> random_obs(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::Matrix<double, 8, 1> obs;
  for (int i = 0; i < 8; ++i) obs[i] = dist(rng);
  return obs;
}

std::vector<LossSample> random_batch(const NetParams& params, std::mt19937_64& rng,
                                     int n) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::uniform_int_distribution<int> coin(0, 1);
  std::vector<LossSample> batch(n);
  for (auto& s : batch) {
    s.obs = random_obs(rng);
    s.action = coin(rng);
    auto fwd = forward(params, s.obs);
    // behavior policy log-prob perturbed so the ratio is not exactly 1
    s.old_log_prob = fwd.log_probs[s.action] + 0.3 * dist(rng);
    s.advantage = 2.0 * dist(rng);
    s.return_target = dist(rng);
  }
  return batch;
}

}  // namespace

TEST_CASE("zero parameters give a uniform policy and zero value") {
  NetParams zero;
  auto fwd = forward(zero, Eigen::Matrix<double, 8, 1>::Constant(0.3));
  CHECK(fwd.probs[0] == 0.5);
  CHECK(fwd.probs[1] == 0.5);
  CHECK(fwd.value == 0.0);
}

TEST_CASE("forward is deterministic and normalized") {
  std::mt19937_64 rng(4);
  auto params = init_params(21);
  auto obs = random_obs(rng);
  auto a = forward(params, obs);
  auto b = forward(params, obs);
  CHECK(bit_equal(a.probs, b.probs));
  CHECK(a.value == b.value);
  CHECK(std::abs(a.probs.sum() - 1.0) <= 1e-12);
  CHECK(a.probs[0] > 0.0);
  CHECK(a.probs[1] > 0.0);
}

TEST_CASE("init_params is seeded and leaves biases at zero") {
  auto a = init_params(5);
  auto b = init_params(5);
  auto c = init_params(6);
  CHECK(bit_equal(a.w1, b.w1));
  CHECK_FALSE(bit_equal(a.w1, c.w1));
  CHECK(a.b1.isZero(0.0));
  CHECK(a.bp.isZero(0.0));
  // small policy head for a near-uniform initial policy
  CHECK(a.wp.cwiseAbs().maxCoeff() < a.w1.cwiseAbs().maxCoeff());
}

TEST_CASE("value head does not depend on policy head parameters") {
  std::mt19937_64 rng(8);
  auto params = init_params(3);
  auto obs = random_obs(rng);
  double v = forward(params, obs).value;
  params.wp.setRandom();
  params.bp.setRandom();
  CHECK(forward(params, obs).value == v);
}

TEST_CASE("analytic gradients match central finite differences") {
  std::mt19937_64 rng(17);
  auto params = init_params(9);
  auto batch = random_batch(params, rng, 8);
  LossSpec spec;

  auto grads = backward(params, batch, spec);
  const double h = 1e-6;
  std::uniform_int_distribution<std::size_t> pick(0, params.size() - 1);
  double max_rel = 0.0;
  for (int probe = 0; probe < 100; ++probe) {
    std::size_t i = pick(rng);
    NetParams plus = params, minus = params;
    plus.coeff(i) += h;
    minus.coeff(i) -= h;
    double fd = (ppo_loss(plus, batch, spec) - ppo_loss(minus, batch, spec)) / (2 * h);
    double denom = std::max({std::abs(fd), std::abs(grads.coeff(i)), 1e-8});
    max_rel = std::max(max_rel, std::abs(fd - grads.coeff(i)) / denom);
  }
  CHECK(max_rel <= 1e-4);
}

TEST_CASE("zero advantage and exact value targets leave only the entropy gradient") {
  std::mt19937_64 rng(23);
  auto params = init_params(2);
  std::vector<LossSample> batch(4);
  for (auto& s : batch) {
    s.obs = random_obs(rng);
    auto fwd = forward(params, s.obs);
    s.action = 0;
    s.old_log_prob = fwd.log_probs[0];
    s.advantage = 0.0;
    s.return_target = fwd.value;  // zero value error
  }
  LossSpec with_entropy;
  LossSpec no_entropy;
  no_entropy.entropy_coef = 0.0;
  auto g = backward(params, batch, no_entropy);
  CHECK(g.max_abs() <= 1e-14);
  auto ge = backward(params, batch, with_entropy);
  CHECK(ge.max_abs() > 0.0);
}

TEST_CASE("the clipped-and-selected branch contributes no policy gradient") {
  auto params = init_params(12);
  LossSample s;
  s.obs.setConstant(0.2);
  s.action = 1;
  auto fwd = forward(params, s.obs);
  // rho = exp(logp - old) = 2, outside [0.8, 1.2]; advantage > 0 makes the
  // min select the clipped (constant) term
  s.old_log_prob = fwd.log_probs[1] - std::log(2.0);
  s.advantage = 1.0;
  s.return_target = fwd.value;
  LossSpec spec;
  spec.entropy_coef = 0.0;
  spec.value_coef = 0.0;
  auto g = backward(params, {s}, spec);
  CHECK(g.max_abs() == 0.0);
}

TEST_CASE("adam leaves parameters unchanged on zero gradient") {
  auto params = init_params(1);
  auto before = params;
  NetParams zero_grads;
  AdamState adam;
  adam_step(params, zero_grads, adam);
  CHECK(params_equal(params, before));
}

TEST_CASE("adam approaches the lr-sized step under a constant gradient") {
  NetParams params;
  NetParams grads;
  grads.coeff(0) = 0.5;  // constant gradient on one coordinate
  AdamState adam;
  adam.lr = 1e-3;
  double prev = params.coeff(0);
  double step = 0.0;
  for (int i = 0; i < 200; ++i) {
    adam_step(params, grads, adam);
    step = prev - params.coeff(0);
    prev = params.coeff(0);
  }
  // with m/sqrt(v) -> 1, the asymptotic step is lr (up to eps)
  CHECK(step == doctest::Approx(adam.lr).epsilon(1e-3));
}

TEST_CASE("adam is deterministic") {
  auto p1 = init_params(7);
  auto p2 = init_params(7);
  NetParams g = init_params(8);
  AdamState a1, a2;
  adam_step(p1, g, a1);
  adam_step(p2, g, a2);
  CHECK(params_equal(p1, p2));
}

TEST_CASE("checkpoints round-trip bit-exactly") {
  auto params = init_params(33);
  std::string path = "checkpoint_roundtrip_test.json";
  save_checkpoint(params, 33, 0xdeadbeefull, path);
  std::uint64_t seed = 0, hash = 0;
  auto loaded = load_checkpoint(path, &seed, &hash);
  CHECK(seed == 33);
  CHECK(hash == 0xdeadbeefull);
  CHECK(params_equal(loaded, params));
  std::remove(path.c_str());
}
