// Named, ordered learnable parameter arrays with paired gradients, plus the
// Adam optimizer state that updates them.
#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctkit/errors.hpp"

namespace ctkit {

template <typename T>
struct Param {
  std::string name;
  std::vector<int> shape;
  std::vector<T> value;
  std::vector<T> grad;

  size_t size() const { return value.size(); }
};

template <typename T>
class ParamStore {
 public:
  int add(std::string name, std::vector<int> shape) {
    if (index_.count(name)) throw ConfigError("duplicate parameter: " + name);
    size_t n = 1;
    for (int d : shape) {
      if (d <= 0) throw ShapeError("parameter shape entries must be positive");
      n *= static_cast<size_t>(d);
    }
    Param<T> p;
    p.name = std::move(name);
    p.shape = std::move(shape);
    p.value.assign(n, T(0));
    p.grad.assign(n, T(0));
    index_[p.name] = static_cast<int>(params_.size());
    params_.push_back(std::move(p));
    return static_cast<int>(params_.size()) - 1;
  }

  int count() const { return static_cast<int>(params_.size()); }

  Param<T>& param(int idx) { return params_.at(idx); }
  const Param<T>& param(int idx) const { return params_.at(idx); }

  int find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
  }

  size_t total_size() const {
    size_t n = 0;
    for (const auto& p : params_) n += p.size();
    return n;
  }

  void zero_grads() {
    for (auto& p : params_)
      std::fill(p.grad.begin(), p.grad.end(), T(0));
  }

  // Flat packing in registration order.
  std::vector<T> flatten_values() const {
    std::vector<T> out;
    out.reserve(total_size());
    for (const auto& p : params_)
      out.insert(out.end(), p.value.begin(), p.value.end());
    return out;
  }

  void unflatten_values(std::span<const T> flat) {
    if (flat.size() != total_size())
      throw ShapeError("unflatten_values: length mismatch");
    size_t off = 0;
    for (auto& p : params_) {
      std::copy(flat.begin() + off, flat.begin() + off + p.size(),
                p.value.begin());
      off += p.size();
    }
  }

  std::vector<T> flatten_grads() const {
    std::vector<T> out;
    out.reserve(total_size());
    for (const auto& p : params_)
      out.insert(out.end(), p.grad.begin(), p.grad.end());
    return out;
  }

 private:
  std::vector<Param<T>> params_;
  std::unordered_map<std::string, int> index_;
};

template <typename T>
struct AdamConfig {
  T learning_rate = static_cast<T>(1e-4);
  T beta1 = static_cast<T>(0.9);
  T beta2 = static_cast<T>(0.999);
  T epsilon = static_cast<T>(1e-8);
};

// One-array Adam update with bias correction; t is the step count after
// increment (t >= 1).
template <typename T>
void adam_update_array(std::span<T> value, std::span<const T> grad,
                       std::span<T> m, std::span<T> v, long long t,
                       const AdamConfig<T>& cfg) {
  if (value.size() != grad.size() || value.size() != m.size() ||
      value.size() != v.size())
    throw ShapeError("adam_update_array: array sizes differ");
  const T bc1 = T(1) - static_cast<T>(std::pow(double(cfg.beta1), double(t)));
  const T bc2 = T(1) - static_cast<T>(std::pow(double(cfg.beta2), double(t)));
  for (size_t i = 0; i < value.size(); ++i) {
    m[i] = cfg.beta1 * m[i] + (T(1) - cfg.beta1) * grad[i];
    v[i] = cfg.beta2 * v[i] + (T(1) - cfg.beta2) * grad[i] * grad[i];
    const T mhat = m[i] / bc1;
    const T vhat = v[i] / bc2;
    value[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
  }
}

template <typename T>
class AdamState {
 public:
  AdamState() = default;

  AdamState(const ParamStore<T>& store, AdamConfig<T> cfg) : cfg_(cfg) {
    m_.resize(store.count());
    v_.resize(store.count());
    for (int i = 0; i < store.count(); ++i) {
      m_[i].assign(store.param(i).size(), T(0));
      v_[i].assign(store.param(i).size(), T(0));
    }
  }

  const AdamConfig<T>& config() const { return cfg_; }
  AdamConfig<T>& config() { return cfg_; }
  long long step_count() const { return step_; }

  std::vector<std::vector<T>>& first_moments() { return m_; }
  std::vector<std::vector<T>>& second_moments() { return v_; }
  void set_step_count(long long t) { step_ = t; }

  // Applies one Adam step using the gradients held in the store.
  void step(ParamStore<T>& store) {
    if (static_cast<int>(m_.size()) != store.count())
      throw ShapeError("adam_step: state does not match parameter store");
    ++step_;
    for (int i = 0; i < store.count(); ++i) {
      auto& p = store.param(i);
      if (m_[i].size() != p.size())
        throw ShapeError("adam_step: moment shape mismatch for " + p.name);
      adam_update_array<T>({p.value.data(), p.value.size()},
                           {p.grad.data(), p.grad.size()},
                           {m_[i].data(), m_[i].size()},
                           {v_[i].data(), v_[i].size()}, step_, cfg_);
    }
  }

 private:
  AdamConfig<T> cfg_;
  std::vector<std::vector<T>> m_, v_;
  long long step_ = 0;
};

template <typename T>
void adam_step(ParamStore<T>& store, AdamState<T>& state) {
  state.step(store);
}

}  // namespace ctkit
