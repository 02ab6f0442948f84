// Closed-form proximal operators used by the PDHG baseline.
#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "ctkit/errors.hpp"
#include "ctkit/image.hpp"

namespace ctkit {

// The three shipped proxes:
//   l2_data_dual    prox of sigma * conjugate of (1/2)||. - y||^2:
//                   v -> (v - sigma*y) / (1 + sigma)
//   tikhonov        prox of tau * (lambda/2)||.||^2: v -> v / (1 + tau*lambda)
//   nonneg          elementwise max(v, 0)
template <typename T>
struct ProxKind {
  enum class Tag { l2_data_dual, tikhonov, nonneg_indicator };

  Tag tag = Tag::nonneg_indicator;
  const Sinogram<T>* data = nullptr;  // measured y for l2_data_dual
  T lambda = T(0);                    // Tikhonov weight

  static ProxKind l2_data_dual(const Sinogram<T>& y) {
    ProxKind k;
    k.tag = Tag::l2_data_dual;
    k.data = &y;
    return k;
  }
  static ProxKind tikhonov(T lambda) {
    ProxKind k;
    k.tag = Tag::tikhonov;
    k.lambda = lambda;
    return k;
  }
  static ProxKind nonneg() { return ProxKind{}; }
};

template <typename T>
void prox_eval_inplace(const ProxKind<T>& kind, T step, std::span<T> v) {
  using Tag = typename ProxKind<T>::Tag;
  switch (kind.tag) {
    case Tag::l2_data_dual: {
      if (kind.data == nullptr)
        throw ConfigError("prox_eval: l2_data_dual needs a data sinogram");
      if (kind.data->values.size() != v.size())
        throw ShapeError("prox_eval: data term size mismatch");
      const T inv = T(1) / (T(1) + step);
      const T* y = kind.data->values.data();
      for (size_t i = 0; i < v.size(); ++i) v[i] = (v[i] - step * y[i]) * inv;
      return;
    }
    case Tag::tikhonov: {
      const T inv = T(1) / (T(1) + step * kind.lambda);
      for (auto& e : v) e *= inv;
      return;
    }
    case Tag::nonneg_indicator: {
      for (auto& e : v) e = std::max(e, T(0));
      return;
    }
  }
  throw ConfigError("prox_eval: unknown prox tag");
}

template <typename T>
std::vector<T> prox_eval(const ProxKind<T>& kind, T step,
                         std::vector<T> v) {
  prox_eval_inplace<T>(kind, step, {v.data(), v.size()});
  return v;
}

}  // namespace ctkit
