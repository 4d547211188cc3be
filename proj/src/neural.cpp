#include "rift/neural.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <type_traits>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace rift {

namespace {

struct FlatView {
  double* data;
  std::size_t size;
};

template <typename P>
auto views(P& p) {
  using Ptr = std::conditional_t<std::is_const_v<P>, const double*, double*>;
  struct View {
    Ptr data;
    std::size_t size;
  };
  return std::array<View, 8>{{{p.w1.data(), static_cast<std::size_t>(p.w1.size())},
                              {p.b1.data(), static_cast<std::size_t>(p.b1.size())},
                              {p.w2.data(), static_cast<std::size_t>(p.w2.size())},
                              {p.b2.data(), static_cast<std::size_t>(p.b2.size())},
                              {p.wp.data(), static_cast<std::size_t>(p.wp.size())},
                              {p.bp.data(), static_cast<std::size_t>(p.bp.size())},
                              {p.wv.data(), static_cast<std::size_t>(p.wv.size())},
                              {p.bv.data(), static_cast<std::size_t>(p.bv.size())}}};
}

}  // namespace

NetParams::NetParams() {
  w1.setZero();
  b1.setZero();
  w2.setZero();
  b2.setZero();
  wp.setZero();
  bp.setZero();
  wv.setZero();
  bv.setZero();
}

NetParams& NetParams::operator+=(const NetParams& other) {
  auto a = views(*this);
  auto b = views(other);
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (std::size_t i = 0; i < a[k].size; ++i) a[k].data[i] += b[k].data[i];
  }
  return *this;
}

NetParams& NetParams::operator*=(double s) {
  auto a = views(*this);
  for (auto& v : a) {
    for (std::size_t i = 0; i < v.size; ++i) v.data[i] *= s;
  }
  return *this;
}

double NetParams::max_abs() const {
  double m = 0.0;
  for (auto& v : views(*this)) {
    for (std::size_t i = 0; i < v.size; ++i) m = std::max(m, std::abs(v.data[i]));
  }
  return m;
}

bool NetParams::all_finite() const {
  for (auto& v : views(*this)) {
    for (std::size_t i = 0; i < v.size; ++i) {
      if (!std::isfinite(v.data[i])) return false;
    }
  }
  return true;
}

std::size_t NetParams::size() const {
  std::size_t n = 0;
  for (auto& v : views(*this)) n += v.size;
  return n;
}

double& NetParams::coeff(std::size_t i) {
  for (auto& v : views(*this)) {
    if (i < v.size) return v.data[i];
    i -= v.size;
  }
  throw std::out_of_range("NetParams::coeff");
}

double NetParams::coeff(std::size_t i) const {
  for (auto& v : views(*this)) {
    if (i < v.size) return v.data[i];
    i -= v.size;
  }
  throw std::out_of_range("NetParams::coeff");
}

NetParams init_params(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto fill = [&](MatrixXd& w, double scale) {
    double bound = scale / std::sqrt(static_cast<double>(w.cols()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
  };
  NetParams p;
  fill(p.w1, 1.0);
  fill(p.w2, 1.0);
  fill(p.wp, 0.01);
  fill(p.wv, 1.0);
  return p;  // biases stay zero
}

ForwardOutput forward(const NetParams& params, const Eigen::Matrix<double, 8, 1>& obs) {
  if (!obs.allFinite()) throw std::invalid_argument("forward: non-finite observation");
  ForwardOutput out;
  out.input = obs;
  out.h1 = (params.w1 * obs + params.b1).array().tanh();
  out.h2 = (params.w2 * out.h1 + params.b2).array().tanh();
  Eigen::Vector2d logits = params.wp * out.h2 + params.bp;
  double zmax = logits.maxCoeff();
  Eigen::Vector2d shifted = logits.array() - zmax;
  double lse = std::log(shifted.array().exp().sum());
  out.log_probs = shifted.array() - lse;
  out.probs = out.log_probs.array().exp();
  out.value = (params.wv * out.h2 + params.bv)(0);
  return out;
}

double ppo_loss(const NetParams& params, const std::vector<LossSample>& batch,
                const LossSpec& spec) {
  if (batch.empty()) throw std::invalid_argument("empty minibatch");
  double total = 0.0;
  for (const auto& s : batch) {
    auto fwd = forward(params, s.obs);
    double rho = std::exp(fwd.log_probs[s.action] - s.old_log_prob);
    double surr1 = rho * s.advantage;
    double surr2 = std::clamp(rho, 1.0 - spec.clip_epsilon, 1.0 + spec.clip_epsilon) *
                   s.advantage;
    double entropy = -(fwd.probs.array() * fwd.log_probs.array()).sum();
    double verr = fwd.value - s.return_target;
    total += -std::min(surr1, surr2) + spec.value_coef * verr * verr -
             spec.entropy_coef * entropy;
  }
  return total / static_cast<double>(batch.size());
}

NetParams backward(const NetParams& params, const std::vector<LossSample>& batch,
                   const LossSpec& spec) {
  if (batch.empty()) throw std::invalid_argument("empty minibatch");
  NetParams grads;
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  for (const auto& s : batch) {
    auto fwd = forward(params, s.obs);
    double rho = std::exp(fwd.log_probs[s.action] - s.old_log_prob);
    double surr1 = rho * s.advantage;
    double surr2 = std::clamp(rho, 1.0 - spec.clip_epsilon, 1.0 + spec.clip_epsilon) *
                   s.advantage;

    // d(policy loss)/d log pi(a|s): zero when the clipped, binding branch is
    // selected by the min (that branch is constant in theta)
    double dlogp = surr1 <= surr2 ? -surr1 : 0.0;

    Eigen::Vector2d one_hot = Eigen::Vector2d::Zero();
    one_hot[s.action] = 1.0;
    Eigen::Vector2d dlogits = dlogp * (one_hot - fwd.probs);

    double entropy = -(fwd.probs.array() * fwd.log_probs.array()).sum();
    // loss term -c_e*H; dH/dz_k = -p_k*(log p_k + H)
    dlogits.array() +=
        spec.entropy_coef * fwd.probs.array() * (fwd.log_probs.array() + entropy);

    double dvalue = 2.0 * spec.value_coef * (fwd.value - s.return_target);

    grads.wp += inv_n * dlogits * fwd.h2.transpose();
    grads.bp += inv_n * dlogits;
    grads.wv += inv_n * dvalue * fwd.h2.transpose();
    grads.bv(0) += inv_n * dvalue;

    VectorXd dh2 = params.wp.transpose() * dlogits + params.wv.transpose() * dvalue;
    VectorXd dz2 = dh2.array() * (1.0 - fwd.h2.array().square());
    grads.w2 += inv_n * dz2 * fwd.h1.transpose();
    grads.b2 += inv_n * dz2;

    VectorXd dh1 = params.w2.transpose() * dz2;
    VectorXd dz1 = dh1.array() * (1.0 - fwd.h1.array().square());
    grads.w1 += inv_n * dz1 * fwd.input.transpose();
    grads.b1 += inv_n * dz1;
  }
  if (!grads.all_finite()) throw std::runtime_error("backward: non-finite gradient");
  return grads;
}

void adam_step(NetParams& params, const NetParams& grads, AdamState& state) {
  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  const std::size_t n = params.size();
  for (std::size_t i = 0; i < n; ++i) {
    double g = grads.coeff(i);
    double& m = state.m.coeff(i);
    double& v = state.v.coeff(i);
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g * g;
    params.coeff(i) -= state.lr * (m / bc1) / (std::sqrt(v / bc2) + state.eps);
  }
}

namespace {

nlohmann::json matrix_to_json(const MatrixXd& m) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.size(); ++i) arr.push_back(m.data()[i]);
  return arr;
}

void matrix_from_json(const nlohmann::json& arr, MatrixXd& m) {
  if (static_cast<Eigen::Index>(arr.size()) != m.size()) {
    throw std::runtime_error("checkpoint: array size mismatch");
  }
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = arr[i].get<double>();
}

nlohmann::json vector_to_json(const VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

void vector_from_json(const nlohmann::json& arr, VectorXd& v) {
  if (static_cast<Eigen::Index>(arr.size()) != v.size()) {
    throw std::runtime_error("checkpoint: array size mismatch");
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = arr[i].get<double>();
}

}  // namespace

void save_checkpoint(const NetParams& params, std::uint64_t seed,
                     std::uint64_t config_hash, const std::string& path) {
  nlohmann::json j;
  j["format"] = "rift-checkpoint-v1";
  j["seed"] = seed;
  j["config_hash"] = config_hash;
  j["w1"] = matrix_to_json(params.w1);
  j["b1"] = vector_to_json(params.b1);
  j["w2"] = matrix_to_json(params.w2);
  j["b2"] = vector_to_json(params.b2);
  j["wp"] = matrix_to_json(params.wp);
  j["bp"] = vector_to_json(params.bp);
  j["wv"] = matrix_to_json(params.wv);
  j["bv"] = vector_to_json(params.bv);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

NetParams load_checkpoint(const std::string& path, std::uint64_t* seed,
                          std::uint64_t* config_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != "rift-checkpoint-v1") {
    throw std::runtime_error("unrecognized checkpoint format in " + path);
  }
  NetParams p;
  matrix_from_json(j.at("w1"), p.w1);
  vector_from_json(j.at("b1"), p.b1);
  matrix_from_json(j.at("w2"), p.w2);
  vector_from_json(j.at("b2"), p.b2);
  matrix_from_json(j.at("wp"), p.wp);
  vector_from_json(j.at("bp"), p.bp);
  matrix_from_json(j.at("wv"), p.wv);
  vector_from_json(j.at("bv"), p.bv);
  if (seed) *seed = j.value("seed", 0ull);
  if (config_hash) *config_hash = j.value("config_hash", 0ull);
  return p;
}

}  // namespace rift
