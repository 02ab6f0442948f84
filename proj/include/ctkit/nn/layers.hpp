// Differentiable layer primitives: same-size 2D convolution, PReLU and group
// normalization, each with an exact hand-derived backward pass.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ctkit/errors.hpp"
#include "ctkit/nn/params.hpp"
#include "ctkit/tensor.hpp"

namespace ctkit {

// Stride is fixed to 1 and padding to (k-1)/2, so spatial dims are preserved.
struct ConvShape {
  int c_out = 0;
  int c_in = 0;
  int k = 0;

  int pad() const { return (k - 1) / 2; }
  size_t weight_size() const {
    return static_cast<size_t>(c_out) * c_in * k * k;
  }
  void validate() const {
    if (c_out <= 0 || c_in <= 0 || k <= 0)
      throw ConfigError("ConvShape: dimensions must be positive");
    if (k % 2 == 0) throw ConfigError("ConvShape: kernel size must be odd");
  }
};

// Cross-correlation with zero padding plus bias. Output allocated on shape
// mismatch so callers can reuse buffers.
template <typename T>
void conv2d_forward(const ConvShape& cs, std::span<const T> w,
                    std::span<const T> bias, const TensorBatch<T>& x,
                    TensorBatch<T>& y) {
  cs.validate();
  if (x.channels() != cs.c_in)
    throw ShapeError("conv2d_forward: input channel mismatch");
  if (w.size() != cs.weight_size() || bias.size() != static_cast<size_t>(cs.c_out))
    throw ShapeError("conv2d_forward: weight/bias size mismatch");
  const int b = x.batch(), h = x.height(), wd = x.width();
  if (y.batch() != b || y.channels() != cs.c_out || y.height() != h ||
      y.width() != wd)
    y = TensorBatch<T>(b, cs.c_out, h, wd);

  const int p = cs.pad(), k = cs.k;
  for (int bi = 0; bi < b; ++bi) {
    for (int co = 0; co < cs.c_out; ++co) {
      auto out = y.plane(bi, co);
      std::fill(out.begin(), out.end(), bias[co]);
      for (int ci = 0; ci < cs.c_in; ++ci) {
        auto in = x.plane(bi, ci);
        const T* wbase = w.data() + ((static_cast<size_t>(co) * cs.c_in + ci) * k) * k;
        for (int kh = 0; kh < k; ++kh) {
          const int ilo = std::max(0, p - kh);
          const int ihi = std::min(h, h + p - kh);
          for (int kw = 0; kw < k; ++kw) {
            const T wgt = wbase[kh * k + kw];
            const int ox = kw - p;
            const int jlo = std::max(0, -ox);
            const int jhi = std::min(wd, wd - ox);
            for (int i = ilo; i < ihi; ++i) {
              T* orow = out.data() + static_cast<size_t>(i) * wd;
              const T* irow = in.data() + static_cast<size_t>(i + kh - p) * wd + ox;
              for (int j = jlo; j < jhi; ++j) orow[j] += wgt * irow[j];
            }
          }
        }
      }
    }
  }
}

// Exact gradients of conv2d_forward. Any of the outputs may be skipped
// (null grad_input, empty spans). grad_w/grad_b are accumulated (+=) after
// multiplying by `scale`; grad_input is overwritten.
template <typename T>
void conv2d_backward(const ConvShape& cs, std::span<const T> w,
                     const TensorBatch<T>& x, const TensorBatch<T>& upstream,
                     TensorBatch<T>* grad_input, std::span<T> grad_w,
                     std::span<T> grad_b, T scale = T(1)) {
  cs.validate();
  if (x.channels() != cs.c_in)
    throw ShapeError("conv2d_backward: input channel mismatch");
  if (upstream.channels() != cs.c_out || upstream.batch() != x.batch() ||
      upstream.height() != x.height() || upstream.width() != x.width())
    throw ShapeError("conv2d_backward: upstream shape mismatch");
  if (!grad_w.empty() && grad_w.size() != cs.weight_size())
    throw ShapeError("conv2d_backward: grad_w size mismatch");
  if (!grad_b.empty() && grad_b.size() != static_cast<size_t>(cs.c_out))
    throw ShapeError("conv2d_backward: grad_b size mismatch");

  const int b = x.batch(), h = x.height(), wd = x.width();
  const int p = cs.pad(), k = cs.k;

  if (!grad_b.empty()) {
    for (int co = 0; co < cs.c_out; ++co) {
      double acc = 0.0;
      for (int bi = 0; bi < b; ++bi)
        for (const T v : upstream.plane(bi, co)) acc += double(v);
      grad_b[co] += static_cast<T>(scale * acc);
    }
  }

  if (!grad_w.empty()) {
    for (int co = 0; co < cs.c_out; ++co) {
      for (int ci = 0; ci < cs.c_in; ++ci) {
        T* gw = grad_w.data() + ((static_cast<size_t>(co) * cs.c_in + ci) * k) * k;
        for (int kh = 0; kh < k; ++kh) {
          const int ilo = std::max(0, p - kh);
          const int ihi = std::min(h, h + p - kh);
          for (int kw = 0; kw < k; ++kw) {
            const int ox = kw - p;
            const int jlo = std::max(0, -ox);
            const int jhi = std::min(wd, wd - ox);
            double acc = 0.0;
            for (int bi = 0; bi < b; ++bi) {
              auto up = upstream.plane(bi, co);
              auto in = x.plane(bi, ci);
              for (int i = ilo; i < ihi; ++i) {
                const T* urow = up.data() + static_cast<size_t>(i) * wd;
                const T* irow = in.data() + static_cast<size_t>(i + kh - p) * wd + ox;
                double dot = 0.0;
                for (int j = jlo; j < jhi; ++j) dot += double(urow[j]) * double(irow[j]);
                acc += dot;
              }
            }
            gw[kh * k + kw] += static_cast<T>(scale * acc);
          }
        }
      }
    }
  }

  if (grad_input != nullptr) {
    if (!grad_input->same_shape(x)) *grad_input = TensorBatch<T>(b, cs.c_in, h, wd);
    grad_input->fill(T(0));
    for (int bi = 0; bi < b; ++bi) {
      for (int ci = 0; ci < cs.c_in; ++ci) {
        auto gx = grad_input->plane(bi, ci);
        for (int co = 0; co < cs.c_out; ++co) {
          auto up = upstream.plane(bi, co);
          const T* wbase = w.data() + ((static_cast<size_t>(co) * cs.c_in + ci) * k) * k;
          for (int kh = 0; kh < k; ++kh) {
            const int ilo = std::max(0, p - kh);
            const int ihi = std::min(h, h + p - kh);
            for (int kw = 0; kw < k; ++kw) {
              const T wgt = wbase[kh * k + kw];
              const int ox = kw - p;
              const int jlo = std::max(0, -ox);
              const int jhi = std::min(wd, wd - ox);
              for (int i = ilo; i < ihi; ++i) {
                T* grow = gx.data() + static_cast<size_t>(i + kh - p) * wd + ox;
                const T* urow = up.data() + static_cast<size_t>(i) * wd;
                for (int j = jlo; j < jhi; ++j) grow[j] += wgt * urow[j];
              }
            }
          }
        }
      }
    }
  }
}

// PReLU: y = x for x > 0, slope[c] * x otherwise.
template <typename T>
void prelu_forward(std::span<const T> slope, const TensorBatch<T>& x,
                   TensorBatch<T>& y) {
  if (slope.size() != static_cast<size_t>(x.channels()))
    throw ShapeError("prelu_forward: slope count must equal channels");
  if (!y.same_shape(x))
    y = TensorBatch<T>(x.batch(), x.channels(), x.height(), x.width());
  for (int bi = 0; bi < x.batch(); ++bi) {
    for (int c = 0; c < x.channels(); ++c) {
      const T a = slope[c];
      auto in = x.plane(bi, c);
      auto out = y.plane(bi, c);
      for (size_t i = 0; i < in.size(); ++i)
        out[i] = in[i] > T(0) ? in[i] : a * in[i];
    }
  }
}

template <typename T>
void prelu_backward(std::span<const T> slope, const TensorBatch<T>& x,
                    const TensorBatch<T>& upstream, TensorBatch<T>* grad_input,
                    std::span<T> grad_slope, T scale = T(1)) {
  if (slope.size() != static_cast<size_t>(x.channels()))
    throw ShapeError("prelu_backward: slope count must equal channels");
  if (!upstream.same_shape(x))
    throw ShapeError("prelu_backward: upstream shape mismatch");
  if (!grad_slope.empty() && grad_slope.size() != slope.size())
    throw ShapeError("prelu_backward: grad_slope size mismatch");
  if (grad_input != nullptr && !grad_input->same_shape(x))
    *grad_input = TensorBatch<T>(x.batch(), x.channels(), x.height(), x.width());

  for (int c = 0; c < x.channels(); ++c) {
    const T a = slope[c];
    double ga = 0.0;
    for (int bi = 0; bi < x.batch(); ++bi) {
      auto in = x.plane(bi, c);
      auto up = upstream.plane(bi, c);
      if (grad_input != nullptr) {
        auto gx = grad_input->plane(bi, c);
        for (size_t i = 0; i < in.size(); ++i) {
          if (in[i] > T(0)) {
            gx[i] = up[i];
          } else {
            gx[i] = a * up[i];
            ga += double(up[i]) * double(in[i]);
          }
        }
      } else {
        for (size_t i = 0; i < in.size(); ++i)
          if (!(in[i] > T(0))) ga += double(up[i]) * double(in[i]);
      }
    }
    if (!grad_slope.empty()) grad_slope[c] += static_cast<T>(scale * ga);
  }
}

// Group normalization over (channels_in_group, h, w) per batch item, then
// per-channel gain/shift. Uses the biased variance, as is usual for
// normalization layers.
template <typename T>
void groupnorm_forward(int num_groups, T eps, std::span<const T> gain,
                       std::span<const T> shift, const TensorBatch<T>& x,
                       TensorBatch<T>& y) {
  const int c = x.channels();
  if (num_groups <= 0 || c % num_groups != 0)
    throw ConfigError("groupnorm: num_groups must divide the channel count");
  if (!(eps > T(0))) throw ConfigError("groupnorm: epsilon must be positive");
  if (gain.size() != static_cast<size_t>(c) || shift.size() != static_cast<size_t>(c))
    throw ShapeError("groupnorm_forward: gain/shift size mismatch");
  if (!y.same_shape(x))
    y = TensorBatch<T>(x.batch(), c, x.height(), x.width());

  const int cpg = c / num_groups;
  const size_t plane = static_cast<size_t>(x.height()) * x.width();
  const double n = static_cast<double>(cpg) * plane;
  for (int bi = 0; bi < x.batch(); ++bi) {
    for (int g = 0; g < num_groups; ++g) {
      double sum = 0.0, sumsq = 0.0;
      for (int cc = g * cpg; cc < (g + 1) * cpg; ++cc)
        for (const T v : x.plane(bi, cc)) {
          sum += double(v);
          sumsq += double(v) * double(v);
        }
      const double mean = sum / n;
      const double var = std::max(sumsq / n - mean * mean, 0.0);
      const double inv = 1.0 / std::sqrt(var + double(eps));
      for (int cc = g * cpg; cc < (g + 1) * cpg; ++cc) {
        const double gm = double(gain[cc]);
        const double sh = double(shift[cc]);
        auto in = x.plane(bi, cc);
        auto out = y.plane(bi, cc);
        for (size_t i = 0; i < plane; ++i)
          out[i] = static_cast<T>(gm * ((double(in[i]) - mean) * inv) + sh);
      }
    }
  }
}

template <typename T>
void groupnorm_backward(int num_groups, T eps, std::span<const T> gain,
                        const TensorBatch<T>& x, const TensorBatch<T>& upstream,
                        TensorBatch<T>* grad_input, std::span<T> grad_gain,
                        std::span<T> grad_shift, T scale = T(1)) {
  const int c = x.channels();
  if (num_groups <= 0 || c % num_groups != 0)
    throw ConfigError("groupnorm: num_groups must divide the channel count");
  if (!upstream.same_shape(x))
    throw ShapeError("groupnorm_backward: upstream shape mismatch");
  if (grad_input != nullptr && !grad_input->same_shape(x))
    *grad_input = TensorBatch<T>(x.batch(), c, x.height(), x.width());

  const int cpg = c / num_groups;
  const size_t plane = static_cast<size_t>(x.height()) * x.width();
  const double n = static_cast<double>(cpg) * plane;
  std::vector<double> xhat(static_cast<size_t>(cpg) * plane);

  for (int bi = 0; bi < x.batch(); ++bi) {
    for (int g = 0; g < num_groups; ++g) {
      double sum = 0.0, sumsq = 0.0;
      for (int cc = g * cpg; cc < (g + 1) * cpg; ++cc)
        for (const T v : x.plane(bi, cc)) {
          sum += double(v);
          sumsq += double(v) * double(v);
        }
      const double mean = sum / n;
      const double var = std::max(sumsq / n - mean * mean, 0.0);
      const double inv = 1.0 / std::sqrt(var + double(eps));

      // normalized activations and the two reduction terms
      double mean_gu = 0.0, mean_gu_xhat = 0.0;
      for (int lc = 0; lc < cpg; ++lc) {
        const int cc = g * cpg + lc;
        auto in = x.plane(bi, cc);
        auto up = upstream.plane(bi, cc);
        const double gm = double(gain[cc]);
        double su = 0.0, sux = 0.0, sshift = 0.0;
        for (size_t i = 0; i < plane; ++i) {
          const double xh = (double(in[i]) - mean) * inv;
          xhat[lc * plane + i] = xh;
          const double gu = double(up[i]) * gm;
          su += gu;
          sux += gu * xh;
          sshift += double(up[i]);
        }
        mean_gu += su;
        mean_gu_xhat += sux;
        if (!grad_gain.empty()) {
          double sg = 0.0;
          auto upc = upstream.plane(bi, cc);
          for (size_t i = 0; i < plane; ++i)
            sg += double(upc[i]) * xhat[lc * plane + i];
          grad_gain[cc] += static_cast<T>(scale * sg);
        }
        if (!grad_shift.empty()) grad_shift[cc] += static_cast<T>(scale * sshift);
      }
      mean_gu /= n;
      mean_gu_xhat /= n;

      if (grad_input != nullptr) {
        for (int lc = 0; lc < cpg; ++lc) {
          const int cc = g * cpg + lc;
          auto up = upstream.plane(bi, cc);
          auto gx = grad_input->plane(bi, cc);
          const double gm = double(gain[cc]);
          for (size_t i = 0; i < plane; ++i) {
            const double gu = double(up[i]) * gm;
            const double xh = xhat[lc * plane + i];
            gx[i] = static_cast<T>(inv * (gu - mean_gu - xh * mean_gu_xhat));
          }
        }
      }
    }
  }
}

inline int resolve_norm_groups(int channels, int requested) {
  int g = std::min(channels, std::max(1, requested));
  while (channels % g != 0) --g;
  return g;
}

// ---- Thin layer wrappers tying parameters in a ParamStore to the free
// functions above. Blocks compose these.

template <typename T>
struct ConvLayer {
  ConvShape shape;
  int w_idx = -1;
  int b_idx = -1;

  ConvLayer() = default;
  ConvLayer(ParamStore<T>& store, const std::string& name, int c_out, int c_in,
            int k)
      : shape{c_out, c_in, k} {
    shape.validate();
    w_idx = store.add(name + ".weight", {c_out, c_in, k, k});
    b_idx = store.add(name + ".bias", {c_out});
  }

  // Uniform Kaiming fan-in initialization; bias stays zero.
  void init_kaiming(ParamStore<T>& store, std::mt19937_64& rng,
                    double negative_slope = 0.25) const {
    const double fan_in = double(shape.c_in) * shape.k * shape.k;
    const double bound =
        std::sqrt(6.0 / ((1.0 + negative_slope * negative_slope) * fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& w : store.param(w_idx).value) w = static_cast<T>(dist(rng));
  }

  void forward(const ParamStore<T>& store, const TensorBatch<T>& x,
               TensorBatch<T>& y) const {
    const auto& w = store.param(w_idx).value;
    const auto& b = store.param(b_idx).value;
    conv2d_forward<T>(shape, {w.data(), w.size()}, {b.data(), b.size()}, x, y);
  }

  void backward(ParamStore<T>& store, const TensorBatch<T>& x,
                const TensorBatch<T>& up, TensorBatch<T>* grad_input) const {
    const auto& w = store.param(w_idx).value;
    auto& gw = store.param(w_idx).grad;
    auto& gb = store.param(b_idx).grad;
    conv2d_backward<T>(shape, {w.data(), w.size()}, x, up, grad_input,
                       {gw.data(), gw.size()}, {gb.data(), gb.size()});
  }

  void backward_into(const ParamStore<T>& store, const TensorBatch<T>& x,
                     const TensorBatch<T>& up, TensorBatch<T>* grad_input,
                     std::span<T> gw, std::span<T> gb, T scale) const {
    const auto& w = store.param(w_idx).value;
    conv2d_backward<T>(shape, {w.data(), w.size()}, x, up, grad_input, gw, gb,
                       scale);
  }
};

template <typename T>
struct PReLULayer {
  int channels = 0;
  int slope_idx = -1;

  PReLULayer() = default;
  PReLULayer(ParamStore<T>& store, const std::string& name, int c,
             T init_slope = static_cast<T>(0.25))
      : channels(c) {
    slope_idx = store.add(name + ".slope", {c});
    for (auto& s : store.param(slope_idx).value) s = init_slope;
  }

  void forward(const ParamStore<T>& store, const TensorBatch<T>& x,
               TensorBatch<T>& y) const {
    const auto& s = store.param(slope_idx).value;
    prelu_forward<T>({s.data(), s.size()}, x, y);
  }

  void backward(ParamStore<T>& store, const TensorBatch<T>& x,
                const TensorBatch<T>& up, TensorBatch<T>* grad_input) const {
    const auto& s = store.param(slope_idx).value;
    auto& gs = store.param(slope_idx).grad;
    prelu_backward<T>({s.data(), s.size()}, x, up, grad_input,
                      {gs.data(), gs.size()}, T(1));
  }

  void backward_into(const ParamStore<T>& store, const TensorBatch<T>& x,
                     const TensorBatch<T>& up, TensorBatch<T>* grad_input,
                     std::span<T> gs, T scale) const {
    const auto& s = store.param(slope_idx).value;
    prelu_backward<T>({s.data(), s.size()}, x, up, grad_input, gs, scale);
  }
};

template <typename T>
struct GroupNormLayer {
  int channels = 0;
  int num_groups = 1;
  T eps = static_cast<T>(1e-5);
  int gain_idx = -1;
  int shift_idx = -1;

  GroupNormLayer() = default;
  GroupNormLayer(ParamStore<T>& store, const std::string& name, int c,
                 int groups)
      : channels(c), num_groups(resolve_norm_groups(c, groups)) {
    gain_idx = store.add(name + ".gain", {c});
    shift_idx = store.add(name + ".shift", {c});
    for (auto& g : store.param(gain_idx).value) g = T(1);
  }

  void forward(const ParamStore<T>& store, const TensorBatch<T>& x,
               TensorBatch<T>& y) const {
    const auto& g = store.param(gain_idx).value;
    const auto& s = store.param(shift_idx).value;
    groupnorm_forward<T>(num_groups, eps, {g.data(), g.size()},
                         {s.data(), s.size()}, x, y);
  }

  void backward(ParamStore<T>& store, const TensorBatch<T>& x,
                const TensorBatch<T>& up, TensorBatch<T>* grad_input) const {
    const auto& g = store.param(gain_idx).value;
    auto& gg = store.param(gain_idx).grad;
    auto& gs = store.param(shift_idx).grad;
    groupnorm_backward<T>(num_groups, eps, {g.data(), g.size()}, x, up,
                          grad_input, {gg.data(), gg.size()},
                          {gs.data(), gs.size()}, T(1));
  }

  void backward_into(const ParamStore<T>& store, const TensorBatch<T>& x,
                     const TensorBatch<T>& up, TensorBatch<T>* grad_input,
                     std::span<T> gg, std::span<T> gs, T scale) const {
    const auto& g = store.param(gain_idx).value;
    groupnorm_backward<T>(num_groups, eps, {g.data(), g.size()}, x, up,
                          grad_input, gg, gs, scale);
  }
};

}  // namespace ctkit
