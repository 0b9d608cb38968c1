#pragma once

// Scalar-generic forward/backward kernels shared by training (float) and the
// gradient checker (double). Internal to the backbone module.

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

#include "backbone/backbone.hpp"

namespace artpipe::backbone::detail {

struct BlockShape {
  std::size_t cin, cout, h, w, ho, wo;
};

std::vector<BlockShape> block_shapes(const BackboneConfig& config);

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMatrix = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMapMatrix = Eigen::Map<const RowMatrix<T>>;
template <typename T>
using ConstMapVector = Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>>;
template <typename T>
using MapVector = Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>>;

template <typename T>
struct Workspace {
  std::vector<std::vector<T>> inputs;  // block inputs; inputs[B] is the last pooled map
  std::vector<std::vector<T>> cols;    // im2col of each block input
  std::vector<std::vector<T>> activ;   // post-ReLU conv output
  std::vector<std::vector<std::uint32_t>> argmax;
  std::vector<T> gap, head_in, hidden_pre, hidden, logits;
  std::vector<T> dropout_scale;  // empty when dropout is off
  std::vector<T> d_head_in, d_hidden, d_pooled, d_conv, d_col;
};

template <typename T>
class Network {
 public:
  explicit Network(const BackboneConfig& config) : config_(config), shapes_(block_shapes(config)) {}

  const std::vector<BlockShape>& shapes() const { return shapes_; }

  /// Forward one image (3×H×W, channel-major). `ws.dropout_scale` must be
  /// empty or hold feature_dim() inverted-dropout factors.
  void forward(const std::vector<std::vector<T>>& params, std::span<const T> image, Workspace<T>& ws) const {
    const std::size_t blocks = shapes_.size();
    ws.inputs.resize(blocks + 1);
    ws.cols.resize(blocks);
    ws.activ.resize(blocks);
    ws.argmax.resize(blocks);
    ws.inputs[0].assign(image.begin(), image.end());

    for (std::size_t b = 0; b < blocks; ++b) {
      const auto& s = shapes_[b];
      const std::size_t hw = s.h * s.w, k9 = s.cin * 9;
      im2col(ws.inputs[b], s, ws.cols[b]);
      ws.activ[b].resize(s.cout * hw);
      ConstMapMatrix<T> weight(params[b].data(), s.cout, k9);
      ConstMapMatrix<T> col(ws.cols[b].data(), k9, hw);
      MapMatrix<T> out(ws.activ[b].data(), s.cout, hw);
      out.noalias() = weight * col;
      const T* bias = params[b].data() + s.cout * k9;
      for (std::size_t c = 0; c < s.cout; ++c) {
        T* row = ws.activ[b].data() + c * hw;
        for (std::size_t k = 0; k < hw; ++k) {
          const T v = row[k] + bias[c];
          row[k] = v > T(0) ? v : T(0);
        }
      }
      max_pool(ws.activ[b], s, ws.inputs[b + 1], ws.argmax[b]);
    }

    const auto& last = shapes_.back();
    const std::size_t d = last.cout, area = last.ho * last.wo;
    ws.gap.assign(d, T(0));
    for (std::size_t c = 0; c < d; ++c) {
      T sum = 0;
      const T* p = ws.inputs[blocks].data() + c * area;
      for (std::size_t k = 0; k < area; ++k) sum += p[k];
      ws.gap[c] = sum / static_cast<T>(area);
    }
    ws.head_in = ws.gap;
    if (!ws.dropout_scale.empty())
      for (std::size_t c = 0; c < d; ++c) ws.head_in[c] *= ws.dropout_scale[c];

    const auto& head = params[blocks];
    const std::size_t classes = config_.num_classes;
    ws.logits.resize(classes);
    if (config_.head_hidden == 0) {
      ConstMapMatrix<T> weight(head.data(), classes, d);
      ConstMapVector<T> bias(head.data() + classes * d, classes);
      MapVector<T>(ws.logits.data(), classes).noalias() = weight * ConstMapVector<T>(ws.head_in.data(), d) + bias;
    } else {
      const std::size_t h = config_.head_hidden;
      ConstMapMatrix<T> w1(head.data(), h, d);
      ConstMapVector<T> b1(head.data() + h * d, h);
      ConstMapMatrix<T> w2(head.data() + h * d + h, classes, h);
      ConstMapVector<T> b2(head.data() + h * d + h + classes * h, classes);
      ws.hidden_pre.resize(h);
      ws.hidden.resize(h);
      MapVector<T>(ws.hidden_pre.data(), h).noalias() = w1 * ConstMapVector<T>(ws.head_in.data(), d) + b1;
      for (std::size_t j = 0; j < h; ++j) ws.hidden[j] = ws.hidden_pre[j] > T(0) ? ws.hidden_pre[j] : T(0);
      MapVector<T>(ws.logits.data(), classes).noalias() = w2 * ConstMapVector<T>(ws.hidden.data(), h) + b2;
    }
  }

  /// Writes d(loss)/d(params) for groups >= `lowest_group` into `grads`
  /// (overwriting), given d(loss)/d(logits). Requires a preceding forward().
  void backward(const std::vector<std::vector<T>>& params, Workspace<T>& ws, std::span<const T> d_logits,
                std::vector<std::vector<T>>& grads, std::size_t lowest_group) const {
    const std::size_t blocks = shapes_.size();
    if (lowest_group > blocks) return;
    const std::size_t d = shapes_.back().cout, classes = config_.num_classes;
    const auto& head = params[blocks];
    auto& g_head = grads[blocks];
    ConstMapVector<T> dl(d_logits.data(), classes);
    ws.d_head_in.resize(d);
    MapVector<T> d_in(ws.d_head_in.data(), d);
    ConstMapVector<T> head_in(ws.head_in.data(), d);

    if (config_.head_hidden == 0) {
      MapMatrix<T>(g_head.data(), classes, d).noalias() = dl * head_in.transpose();
      MapVector<T>(g_head.data() + classes * d, classes) = dl;
      d_in.noalias() = ConstMapMatrix<T>(head.data(), classes, d).transpose() * dl;
    } else {
      const std::size_t h = config_.head_hidden;
      ConstMapVector<T> hidden(ws.hidden.data(), h);
      MapMatrix<T>(g_head.data() + h * d + h, classes, h).noalias() = dl * hidden.transpose();
      MapVector<T>(g_head.data() + h * d + h + classes * h, classes) = dl;
      ws.d_hidden.resize(h);
      MapVector<T> dh(ws.d_hidden.data(), h);
      dh.noalias() = ConstMapMatrix<T>(head.data() + h * d + h, classes, h).transpose() * dl;
      for (std::size_t j = 0; j < h; ++j)
        if (!(ws.hidden_pre[j] > T(0))) dh[j] = T(0);
      MapMatrix<T>(g_head.data(), h, d).noalias() = dh * head_in.transpose();
      MapVector<T>(g_head.data() + h * d, h) = dh;
      d_in.noalias() = ConstMapMatrix<T>(head.data(), h, d).transpose() * dh;
    }
    if (lowest_group == blocks) return;

    if (!ws.dropout_scale.empty())
      for (std::size_t c = 0; c < d; ++c) ws.d_head_in[c] *= ws.dropout_scale[c];

    const auto& last = shapes_.back();
    const std::size_t area = last.ho * last.wo;
    ws.d_pooled.resize(d * area);
    for (std::size_t c = 0; c < d; ++c) {
      const T g = ws.d_head_in[c] / static_cast<T>(area);
      std::fill_n(ws.d_pooled.data() + c * area, area, g);
    }

    for (std::size_t b = blocks; b-- > lowest_group;) {
      const auto& s = shapes_[b];
      const std::size_t hw = s.h * s.w, k9 = s.cin * 9, pooled = s.ho * s.wo;
      ws.d_conv.assign(s.cout * hw, T(0));
      for (std::size_t c = 0; c < s.cout; ++c)
        for (std::size_t k = 0; k < pooled; ++k) {
          const std::size_t src = c * hw + ws.argmax[b][c * pooled + k];
          if (ws.activ[b][src] > T(0)) ws.d_conv[src] = ws.d_pooled[c * pooled + k];
        }
      ConstMapMatrix<T> dconv(ws.d_conv.data(), s.cout, hw);
      ConstMapMatrix<T> col(ws.cols[b].data(), k9, hw);
      MapMatrix<T>(grads[b].data(), s.cout, k9).noalias() = dconv * col.transpose();
      MapVector<T>(grads[b].data() + s.cout * k9, s.cout) = dconv.rowwise().sum();
      if (b > lowest_group) {
        ws.d_col.resize(k9 * hw);
        MapMatrix<T>(ws.d_col.data(), k9, hw).noalias() =
            ConstMapMatrix<T>(params[b].data(), s.cout, k9).transpose() * dconv;
        col2im(ws.d_col, s, ws.d_pooled);
      }
    }
  }

 private:
  static void im2col(const std::vector<T>& in, const BlockShape& s, std::vector<T>& col) {
    const std::size_t hw = s.h * s.w;
    col.resize(s.cin * 9 * hw);
    const auto h = static_cast<std::ptrdiff_t>(s.h), w = static_cast<std::ptrdiff_t>(s.w);
    for (std::size_t ci = 0; ci < s.cin; ++ci)
      for (std::ptrdiff_t ky = 0; ky < 3; ++ky)
        for (std::ptrdiff_t kx = 0; kx < 3; ++kx) {
          T* dst = col.data() + ((ci * 9) + static_cast<std::size_t>(ky * 3 + kx)) * hw;
          const T* plane = in.data() + ci * hw;
          for (std::ptrdiff_t y = 0; y < h; ++y) {
            const std::ptrdiff_t sy = y + ky - 1;
            T* out = dst + y * w;
            if (sy < 0 || sy >= h) {
              std::fill_n(out, w, T(0));
              continue;
            }
            const T* src = plane + sy * w;
            for (std::ptrdiff_t x = 0; x < w; ++x) {
              const std::ptrdiff_t sx = x + kx - 1;
              out[x] = (sx < 0 || sx >= w) ? T(0) : src[sx];
            }
          }
        }
  }

  // Accumulates column gradients back onto the block input layout.
  static void col2im(const std::vector<T>& col, const BlockShape& s, std::vector<T>& d_in) {
    const std::size_t hw = s.h * s.w;
    d_in.assign(s.cin * hw, T(0));
    const auto h = static_cast<std::ptrdiff_t>(s.h), w = static_cast<std::ptrdiff_t>(s.w);
    for (std::size_t ci = 0; ci < s.cin; ++ci)
      for (std::ptrdiff_t ky = 0; ky < 3; ++ky)
        for (std::ptrdiff_t kx = 0; kx < 3; ++kx) {
          const T* src = col.data() + ((ci * 9) + static_cast<std::size_t>(ky * 3 + kx)) * hw;
          T* plane = d_in.data() + ci * hw;
          for (std::ptrdiff_t y = 0; y < h; ++y) {
            const std::ptrdiff_t sy = y + ky - 1;
            if (sy < 0 || sy >= h) continue;
            const T* row = src + y * w;
            T* dst = plane + sy * w;
            for (std::ptrdiff_t x = 0; x < w; ++x) {
              const std::ptrdiff_t sx = x + kx - 1;
              if (sx >= 0 && sx < w) dst[sx] += row[x];
            }
          }
        }
  }

  // 2×2 stride-2 max pool; on ties the first element in row-major window order wins.
  static void max_pool(const std::vector<T>& in, const BlockShape& s, std::vector<T>& out,
                       std::vector<std::uint32_t>& argmax) {
    out.resize(s.cout * s.ho * s.wo);
    argmax.resize(out.size());
    for (std::size_t c = 0; c < s.cout; ++c) {
      const T* plane = in.data() + c * s.h * s.w;
      for (std::size_t y = 0; y < s.ho; ++y)
        for (std::size_t x = 0; x < s.wo; ++x) {
          std::size_t best = (2 * y) * s.w + 2 * x;
          const std::size_t candidates[3] = {best + 1, best + s.w, best + s.w + 1};
          for (auto idx : candidates)
            if (plane[idx] > plane[best]) best = idx;
          const std::size_t o = c * s.ho * s.wo + y * s.wo + x;
          out[o] = plane[best];
          argmax[o] = static_cast<std::uint32_t>(best);
        }
    }
  }

  BackboneConfig config_;
  std::vector<BlockShape> shapes_;
};

template <typename T>
std::vector<std::vector<T>> convert_groups(const std::vector<std::vector<float>>& groups) {
  std::vector<std::vector<T>> out(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) out[g].assign(groups[g].begin(), groups[g].end());
  return out;
}

template <typename T>
std::vector<T> image_as(const dataset::Image& image) {
  return std::vector<T>(image.data.begin(), image.data.end());
}

/// Inverted-dropout factors: 0 or 1/(1-rate) per feature.
template <typename T>
std::vector<T> draw_dropout(std::size_t d, double rate, Rng& rng) {
  std::vector<T> scale(d);
  const T keep = static_cast<T>(1.0 / (1.0 - rate));
  for (auto& s : scale) s = uniform01(rng) < rate ? T(0) : keep;
  return scale;
}

}  // namespace artpipe::backbone::detail
