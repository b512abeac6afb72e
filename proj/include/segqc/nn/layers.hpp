#ifndef SEGQC_NN_LAYERS_HPP
#define SEGQC_NN_LAYERS_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "segqc/nn/tensor.hpp"
#include "segqc/util/errors.hpp"
#include "segqc/util/rng.hpp"

namespace segqc::nn {

enum class LayerKind { conv, conv_transpose, batchnorm, leaky_relu, dropout, softmax_channel };

enum class RunMode { train, eval };

inline const char* layer_kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::conv: return "conv";
        case LayerKind::conv_transpose: return "conv_transpose";
        case LayerKind::batchnorm: return "batchnorm";
        case LayerKind::leaky_relu: return "leaky_relu";
        case LayerKind::dropout: return "dropout";
        case LayerKind::softmax_channel: return "softmax_channel";
    }
    return "?";
}

struct LayerSpec {
    LayerKind kind = LayerKind::conv;
    int kernel_h = 0, kernel_w = 0;
    int stride = 1;
    int padding = 0;
    int in_channels = 0;
    int out_channels = 0;
    double negative_slope = 0.2;
    double drop_prob = 0.1;
    double bn_momentum = 0.1;
    double bn_epsilon = 1e-5;

    static LayerSpec conv(int in_c, int out_c, int k, int s, int p) {
        LayerSpec spec;
        spec.kind = LayerKind::conv;
        spec.in_channels = in_c;
        spec.out_channels = out_c;
        spec.kernel_h = spec.kernel_w = k;
        spec.stride = s;
        spec.padding = p;
        return spec;
    }
    static LayerSpec conv_transpose(int in_c, int out_c, int k, int s, int p) {
        LayerSpec spec = conv(in_c, out_c, k, s, p);
        spec.kind = LayerKind::conv_transpose;
        return spec;
    }
    static LayerSpec batchnorm(int channels, double momentum = 0.1, double epsilon = 1e-5) {
        LayerSpec spec;
        spec.kind = LayerKind::batchnorm;
        spec.in_channels = spec.out_channels = channels;
        spec.bn_momentum = momentum;
        spec.bn_epsilon = epsilon;
        return spec;
    }
    static LayerSpec leaky_relu(double slope = 0.2) {
        LayerSpec spec;
        spec.kind = LayerKind::leaky_relu;
        spec.negative_slope = slope;
        return spec;
    }
    static LayerSpec dropout(double p = 0.1) {
        if (p < 0.0 || p >= 1.0)
            throw config_error("dropout probability must be in [0,1)");
        LayerSpec spec;
        spec.kind = LayerKind::dropout;
        spec.drop_prob = p;
        return spec;
    }
    static LayerSpec softmax_channel() {
        LayerSpec spec;
        spec.kind = LayerKind::softmax_channel;
        return spec;
    }

    bool has_parameters() const {
        return kind == LayerKind::conv || kind == LayerKind::conv_transpose ||
               kind == LayerKind::batchnorm;
    }
};

// Spatial output size; throws when the spec does not divide the input evenly.
inline int conv_output_size(int in, int kernel, int stride, int padding) {
    const int numer = in + 2 * padding - kernel;
    if (numer < 0 || numer % stride != 0)
        throw config_error("conv: size " + std::to_string(in) + " incompatible with k=" +
                           std::to_string(kernel) + " s=" + std::to_string(stride) +
                           " p=" + std::to_string(padding));
    const int out = numer / stride + 1;
    if (out < 1)
        throw config_error("conv: non-positive output size");
    return out;
}

inline int conv_transpose_output_size(int in, int kernel, int stride, int padding) {
    const int out = (in - 1) * stride - 2 * padding + kernel;
    if (out < 1)
        throw config_error("conv_transpose: non-positive output size");
    return out;
}

// Per-layer trainable state. conv/conv_transpose use weight+bias; batchnorm
// stores scale in `weight`, shift in `bias`, plus running statistics that are
// updated in train mode but never touched by the optimizer.
template <typename T>
struct LayerParams {
    std::vector<T> weight;
    std::vector<T> bias;
    std::vector<T> running_mean;
    std::vector<T> running_var;

    std::size_t trainable_count() const { return weight.size() + bias.size(); }

    template <typename U>
    LayerParams<U> cast() const {
        LayerParams<U> out;
        auto convert = [](const std::vector<T>& src) {
            std::vector<U> dst(src.size());
            for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<U>(src[i]);
            return dst;
        };
        out.weight = convert(weight);
        out.bias = convert(bias);
        out.running_mean = convert(running_mean);
        out.running_var = convert(running_var);
        return out;
    }
};

// Structurally correct zero/identity parameters for a spec. he_normal_init
// overwrites the conv weights; batchnorm starts at the identity transform.
template <typename T>
inline LayerParams<T> make_params(const LayerSpec& spec) {
    LayerParams<T> p;
    switch (spec.kind) {
        case LayerKind::conv:
        case LayerKind::conv_transpose: {
            const std::size_t count = static_cast<std::size_t>(spec.in_channels) *
                                      spec.out_channels * spec.kernel_h * spec.kernel_w;
            p.weight.assign(count, T(0));
            p.bias.assign(static_cast<std::size_t>(spec.out_channels), T(0));
            break;
        }
        case LayerKind::batchnorm: {
            const std::size_t c = static_cast<std::size_t>(spec.in_channels);
            p.weight.assign(c, T(1));
            p.bias.assign(c, T(0));
            p.running_mean.assign(c, T(0));
            p.running_var.assign(c, T(1));
            break;
        }
        default:
            break;
    }
    return p;
}

// ---------------------------------------------------------------------------
// Convolution. Weight layout [out_c][in_c][kh][kw]; cross-correlation with
// zero padding, bias added per output channel.
// ---------------------------------------------------------------------------

template <typename T>
Tensor4<T> conv2d_forward(const Tensor4<T>& x, const LayerSpec& spec, const LayerParams<T>& params) {
    if (x.c != spec.in_channels)
        throw config_error("conv: input has " + std::to_string(x.c) + " channels, spec expects " +
                           std::to_string(spec.in_channels));
    const int out_h = conv_output_size(x.h, spec.kernel_h, spec.stride, spec.padding);
    const int out_w = conv_output_size(x.w, spec.kernel_w, spec.stride, spec.padding);
    Tensor4<T> y(x.n, spec.out_channels, out_h, out_w);

    const int s = spec.stride, p = spec.padding;
    for (int n = 0; n < x.n; ++n) {
        for (int o = 0; o < spec.out_channels; ++o) {
            T* y_plane = &y.at(n, o, 0, 0);
            const T b = params.bias[static_cast<std::size_t>(o)];
            for (std::size_t i = 0; i < static_cast<std::size_t>(out_h) * out_w; ++i)
                y_plane[i] = b;
            for (int c = 0; c < spec.in_channels; ++c) {
                const T* x_plane = &x.at(n, c, 0, 0);
                const T* w_base = &params.weight[((static_cast<std::size_t>(o) * spec.in_channels + c) *
                                                  spec.kernel_h) * spec.kernel_w];
                for (int u = 0; u < spec.kernel_h; ++u) {
                    for (int v = 0; v < spec.kernel_w; ++v) {
                        const T wv = w_base[u * spec.kernel_w + v];
                        if (wv == T(0)) continue;
                        for (int i = 0; i < out_h; ++i) {
                            const int in_y = i * s - p + u;
                            if (in_y < 0 || in_y >= x.h) continue;
                            T* y_row = y_plane + static_cast<std::size_t>(i) * out_w;
                            const T* x_row = x_plane + static_cast<std::size_t>(in_y) * x.w;
                            for (int j = 0; j < out_w; ++j) {
                                const int in_x = j * s - p + v;
                                if (in_x < 0 || in_x >= x.w) continue;
                                y_row[j] += wv * x_row[in_x];
                            }
                        }
                    }
                }
            }
        }
    }
    return y;
}

template <typename T>
void conv2d_backward(const Tensor4<T>& x, const LayerSpec& spec, const LayerParams<T>& params,
                     const Tensor4<T>& dy, Tensor4<T>& dx, LayerParams<T>& dparams) {
    dx = Tensor4<T>(x.n, x.c, x.h, x.w);
    dparams.weight.assign(params.weight.size(), T(0));
    dparams.bias.assign(params.bias.size(), T(0));

    const int s = spec.stride, p = spec.padding;
    for (int n = 0; n < x.n; ++n) {
        for (int o = 0; o < spec.out_channels; ++o) {
            const T* dy_plane = &dy.at(n, o, 0, 0);
            T db = T(0);
            for (std::size_t i = 0; i < static_cast<std::size_t>(dy.h) * dy.w; ++i)
                db += dy_plane[i];
            dparams.bias[static_cast<std::size_t>(o)] += db;
            for (int c = 0; c < spec.in_channels; ++c) {
                const T* x_plane = &x.at(n, c, 0, 0);
                T* dx_plane = &dx.at(n, c, 0, 0);
                const std::size_t w_off = ((static_cast<std::size_t>(o) * spec.in_channels + c) *
                                           spec.kernel_h) * spec.kernel_w;
                for (int u = 0; u < spec.kernel_h; ++u) {
                    for (int v = 0; v < spec.kernel_w; ++v) {
                        const T wv = params.weight[w_off + static_cast<std::size_t>(u) * spec.kernel_w + v];
                        T dw = T(0);
                        for (int i = 0; i < dy.h; ++i) {
                            const int in_y = i * s - p + u;
                            if (in_y < 0 || in_y >= x.h) continue;
                            const T* dy_row = dy_plane + static_cast<std::size_t>(i) * dy.w;
                            const T* x_row = x_plane + static_cast<std::size_t>(in_y) * x.w;
                            T* dx_row = dx_plane + static_cast<std::size_t>(in_y) * x.w;
                            for (int j = 0; j < dy.w; ++j) {
                                const int in_x = j * s - p + v;
                                if (in_x < 0 || in_x >= x.w) continue;
                                dw += dy_row[j] * x_row[in_x];
                                dx_row[in_x] += wv * dy_row[j];
                            }
                        }
                        dparams.weight[w_off + static_cast<std::size_t>(u) * spec.kernel_w + v] += dw;
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Transposed convolution, the exact adjoint of conv2d with the same (k,s,p).
// Weight layout [in_c][out_c][kh][kw]: sharing the flat array between a conv
// and its mirror transpose satisfies <conv(x), y> = <x, conv_transpose(y)>.
// ---------------------------------------------------------------------------

template <typename T>
Tensor4<T> conv_transpose2d_forward(const Tensor4<T>& x, const LayerSpec& spec,
                                    const LayerParams<T>& params) {
    if (x.c != spec.in_channels)
        throw config_error("conv_transpose: input has " + std::to_string(x.c) +
                           " channels, spec expects " + std::to_string(spec.in_channels));
    const int out_h = conv_transpose_output_size(x.h, spec.kernel_h, spec.stride, spec.padding);
    const int out_w = conv_transpose_output_size(x.w, spec.kernel_w, spec.stride, spec.padding);
    Tensor4<T> y(x.n, spec.out_channels, out_h, out_w);

    const int s = spec.stride, p = spec.padding;
    for (int n = 0; n < x.n; ++n) {
        for (int o = 0; o < spec.out_channels; ++o) {
            T* y_plane = &y.at(n, o, 0, 0);
            const T b = params.bias[static_cast<std::size_t>(o)];
            for (std::size_t i = 0; i < static_cast<std::size_t>(out_h) * out_w; ++i)
                y_plane[i] = b;
            for (int c = 0; c < spec.in_channels; ++c) {
                const T* x_plane = &x.at(n, c, 0, 0);
                const std::size_t w_off = ((static_cast<std::size_t>(c) * spec.out_channels + o) *
                                           spec.kernel_h) * spec.kernel_w;
                for (int u = 0; u < spec.kernel_h; ++u) {
                    for (int v = 0; v < spec.kernel_w; ++v) {
                        const T wv = params.weight[w_off + static_cast<std::size_t>(u) * spec.kernel_w + v];
                        if (wv == T(0)) continue;
                        for (int a = 0; a < x.h; ++a) {
                            const int out_y = a * s - p + u;
                            if (out_y < 0 || out_y >= out_h) continue;
                            const T* x_row = x_plane + static_cast<std::size_t>(a) * x.w;
                            T* y_row = y_plane + static_cast<std::size_t>(out_y) * out_w;
                            for (int bcol = 0; bcol < x.w; ++bcol) {
                                const int out_x = bcol * s - p + v;
                                if (out_x < 0 || out_x >= out_w) continue;
                                y_row[out_x] += wv * x_row[bcol];
                            }
                        }
                    }
                }
            }
        }
    }
    return y;
}

template <typename T>
void conv_transpose2d_backward(const Tensor4<T>& x, const LayerSpec& spec,
                               const LayerParams<T>& params, const Tensor4<T>& dy,
                               Tensor4<T>& dx, LayerParams<T>& dparams) {
    dx = Tensor4<T>(x.n, x.c, x.h, x.w);
    dparams.weight.assign(params.weight.size(), T(0));
    dparams.bias.assign(params.bias.size(), T(0));

    const int s = spec.stride, p = spec.padding;
    for (int n = 0; n < x.n; ++n) {
        for (int o = 0; o < spec.out_channels; ++o) {
            const T* dy_plane = &dy.at(n, o, 0, 0);
            T db = T(0);
            for (std::size_t i = 0; i < static_cast<std::size_t>(dy.h) * dy.w; ++i)
                db += dy_plane[i];
            dparams.bias[static_cast<std::size_t>(o)] += db;
            for (int c = 0; c < spec.in_channels; ++c) {
                const T* x_plane = &x.at(n, c, 0, 0);
                T* dx_plane = &dx.at(n, c, 0, 0);
                const std::size_t w_off = ((static_cast<std::size_t>(c) * spec.out_channels + o) *
                                           spec.kernel_h) * spec.kernel_w;
                for (int u = 0; u < spec.kernel_h; ++u) {
                    for (int v = 0; v < spec.kernel_w; ++v) {
                        const T wv = params.weight[w_off + static_cast<std::size_t>(u) * spec.kernel_w + v];
                        T dw = T(0);
                        for (int a = 0; a < x.h; ++a) {
                            const int out_y = a * s - p + u;
                            if (out_y < 0 || out_y >= dy.h) continue;
                            const T* x_row = x_plane + static_cast<std::size_t>(a) * x.w;
                            T* dx_row = dx_plane + static_cast<std::size_t>(a) * x.w;
                            const T* dy_row = dy_plane + static_cast<std::size_t>(out_y) * dy.w;
                            for (int bcol = 0; bcol < x.w; ++bcol) {
                                const int out_x = bcol * s - p + v;
                                if (out_x < 0 || out_x >= dy.w) continue;
                                dw += x_row[bcol] * dy_row[out_x];
                                dx_row[bcol] += wv * dy_row[out_x];
                            }
                        }
                        dparams.weight[w_off + static_cast<std::size_t>(u) * spec.kernel_w + v] += dw;
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Batch normalization. Train mode normalizes by batch statistics (biased
// variance) and maintains running statistics via exponential moving average
// with the unbiased variance, eval mode applies the stored affine map.
// ---------------------------------------------------------------------------

template <typename T>
struct BatchNormCache {
    std::vector<T> mean;    // per channel
    std::vector<T> inv_std; // per channel, 1/sqrt(var + eps)
    bool train = false;
};

template <typename T>
Tensor4<T> batchnorm_forward(const Tensor4<T>& x, const LayerSpec& spec, LayerParams<T>& params,
                             RunMode mode, BatchNormCache<T>* cache = nullptr) {
    if (x.c != spec.in_channels)
        throw config_error("batchnorm: channel mismatch");
    Tensor4<T> y(x.n, x.c, x.h, x.w);
    const std::size_t plane = static_cast<std::size_t>(x.h) * x.w;
    const std::size_t m = static_cast<std::size_t>(x.n) * plane; // elements per channel
    const T eps = static_cast<T>(spec.bn_epsilon);

    std::vector<T> mean(x.c), inv_std(x.c);
    if (mode == RunMode::train) {
        for (int c = 0; c < x.c; ++c) {
            T sum = T(0);
            for (int n = 0; n < x.n; ++n) {
                const T* xp = &x.at(n, c, 0, 0);
                for (std::size_t i = 0; i < plane; ++i) sum += xp[i];
            }
            const T mu = sum / static_cast<T>(m);
            T sq = T(0);
            for (int n = 0; n < x.n; ++n) {
                const T* xp = &x.at(n, c, 0, 0);
                for (std::size_t i = 0; i < plane; ++i) {
                    const T d = xp[i] - mu;
                    sq += d * d;
                }
            }
            const T var = sq / static_cast<T>(m);
            mean[c] = mu;
            inv_std[c] = T(1) / std::sqrt(var + eps);

            const T momentum = static_cast<T>(spec.bn_momentum);
            const T unbiased = m > 1 ? sq / static_cast<T>(m - 1) : var;
            params.running_mean[c] = (T(1) - momentum) * params.running_mean[c] + momentum * mu;
            params.running_var[c] = (T(1) - momentum) * params.running_var[c] + momentum * unbiased;
        }
    } else {
        for (int c = 0; c < x.c; ++c) {
            mean[c] = params.running_mean[c];
            inv_std[c] = T(1) / std::sqrt(params.running_var[c] + eps);
        }
    }

    for (int n = 0; n < x.n; ++n) {
        for (int c = 0; c < x.c; ++c) {
            const T* xp = &x.at(n, c, 0, 0);
            T* yp = &y.at(n, c, 0, 0);
            const T mu = mean[c], is = inv_std[c];
            const T gamma = params.weight[static_cast<std::size_t>(c)];
            const T beta = params.bias[static_cast<std::size_t>(c)];
            for (std::size_t i = 0; i < plane; ++i)
                yp[i] = gamma * (xp[i] - mu) * is + beta;
        }
    }

    if (cache) {
        cache->mean = std::move(mean);
        cache->inv_std = std::move(inv_std);
        cache->train = mode == RunMode::train;
    }
    return y;
}

template <typename T>
void batchnorm_backward(const Tensor4<T>& x, const LayerSpec& spec, const LayerParams<T>& params,
                        const BatchNormCache<T>& cache, const Tensor4<T>& dy, Tensor4<T>& dx,
                        LayerParams<T>& dparams) {
    (void)spec;
    dx = Tensor4<T>(x.n, x.c, x.h, x.w);
    dparams.weight.assign(params.weight.size(), T(0));
    dparams.bias.assign(params.bias.size(), T(0));
    const std::size_t plane = static_cast<std::size_t>(x.h) * x.w;
    const T m = static_cast<T>(static_cast<std::size_t>(x.n) * plane);

    for (int c = 0; c < x.c; ++c) {
        const T mu = cache.mean[c], is = cache.inv_std[c];
        const T gamma = params.weight[static_cast<std::size_t>(c)];
        T sum_dy = T(0), sum_dy_xhat = T(0);
        for (int n = 0; n < x.n; ++n) {
            const T* xp = &x.at(n, c, 0, 0);
            const T* dyp = &dy.at(n, c, 0, 0);
            for (std::size_t i = 0; i < plane; ++i) {
                sum_dy += dyp[i];
                sum_dy_xhat += dyp[i] * (xp[i] - mu) * is;
            }
        }
        dparams.bias[static_cast<std::size_t>(c)] = sum_dy;
        dparams.weight[static_cast<std::size_t>(c)] = sum_dy_xhat;

        if (cache.train) {
            for (int n = 0; n < x.n; ++n) {
                const T* xp = &x.at(n, c, 0, 0);
                const T* dyp = &dy.at(n, c, 0, 0);
                T* dxp = &dx.at(n, c, 0, 0);
                for (std::size_t i = 0; i < plane; ++i) {
                    const T xhat = (xp[i] - mu) * is;
                    dxp[i] = gamma * is / m * (m * dyp[i] - sum_dy - xhat * sum_dy_xhat);
                }
            }
        } else {
            for (int n = 0; n < x.n; ++n) {
                const T* dyp = &dy.at(n, c, 0, 0);
                T* dxp = &dx.at(n, c, 0, 0);
                for (std::size_t i = 0; i < plane; ++i)
                    dxp[i] = gamma * is * dyp[i];
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Elementwise layers.
// ---------------------------------------------------------------------------

template <typename T>
Tensor4<T> leaky_relu_forward(const Tensor4<T>& x, double negative_slope) {
    Tensor4<T> y(x.n, x.c, x.h, x.w);
    const T slope = static_cast<T>(negative_slope);
    for (std::size_t i = 0; i < x.v.size(); ++i)
        y.v[i] = x.v[i] >= T(0) ? x.v[i] : slope * x.v[i];
    return y;
}

template <typename T>
Tensor4<T> leaky_relu_backward(const Tensor4<T>& x, double negative_slope, const Tensor4<T>& dy) {
    Tensor4<T> dx(x.n, x.c, x.h, x.w);
    const T slope = static_cast<T>(negative_slope);
    for (std::size_t i = 0; i < x.v.size(); ++i)
        dx.v[i] = x.v[i] >= T(0) ? dy.v[i] : slope * dy.v[i];
    return dx;
}

// Inverted dropout: survivors are scaled by 1/(1-p) so eval mode is the
// identity. The mask holds the applied per-element factor for backward.
template <typename T>
Tensor4<T> dropout_forward(const Tensor4<T>& x, double p, RunMode mode, Rng* rng,
                           Tensor4<T>* mask_out = nullptr) {
    if (p < 0.0 || p >= 1.0)
        throw config_error("dropout probability must be in [0,1)");
    if (mode == RunMode::eval || p == 0.0) {
        if (mask_out) *mask_out = Tensor4<T>();
        return x;
    }
    if (!rng)
        throw config_error("dropout in train mode requires a random source");
    Tensor4<T> y(x.n, x.c, x.h, x.w);
    Tensor4<T> mask(x.n, x.c, x.h, x.w);
    const T scale = static_cast<T>(1.0 / (1.0 - p));
    for (std::size_t i = 0; i < x.v.size(); ++i) {
        const T factor = rng->uniform01() < p ? T(0) : scale;
        mask.v[i] = factor;
        y.v[i] = factor * x.v[i];
    }
    if (mask_out) *mask_out = std::move(mask);
    return y;
}

template <typename T>
Tensor4<T> dropout_backward(const Tensor4<T>& mask, const Tensor4<T>& dy) {
    if (mask.v.empty()) // eval mode pass-through
        return dy;
    Tensor4<T> dx(dy.n, dy.c, dy.h, dy.w);
    for (std::size_t i = 0; i < dy.v.size(); ++i)
        dx.v[i] = mask.v[i] * dy.v[i];
    return dx;
}

// Per-pixel softmax across channels, max-shifted for stability.
template <typename T>
Tensor4<T> softmax_channel_forward(const Tensor4<T>& x) {
    Tensor4<T> y(x.n, x.c, x.h, x.w);
    const std::size_t plane = static_cast<std::size_t>(x.h) * x.w;
    for (int n = 0; n < x.n; ++n) {
        const std::size_t base = static_cast<std::size_t>(n) * x.c * plane;
        for (std::size_t i = 0; i < plane; ++i) {
            T max_v = x.v[base + i];
            for (int c = 1; c < x.c; ++c)
                max_v = std::max(max_v, x.v[base + static_cast<std::size_t>(c) * plane + i]);
            T sum = T(0);
            for (int c = 0; c < x.c; ++c) {
                const T e = std::exp(x.v[base + static_cast<std::size_t>(c) * plane + i] - max_v);
                y.v[base + static_cast<std::size_t>(c) * plane + i] = e;
                sum += e;
            }
            for (int c = 0; c < x.c; ++c)
                y.v[base + static_cast<std::size_t>(c) * plane + i] /= sum;
        }
    }
    return y;
}

// dx_c = y_c * (dy_c - sum_k dy_k y_k), from the softmax Jacobian.
template <typename T>
Tensor4<T> softmax_channel_backward(const Tensor4<T>& y, const Tensor4<T>& dy) {
    Tensor4<T> dx(y.n, y.c, y.h, y.w);
    const std::size_t plane = static_cast<std::size_t>(y.h) * y.w;
    for (int n = 0; n < y.n; ++n) {
        const std::size_t base = static_cast<std::size_t>(n) * y.c * plane;
        for (std::size_t i = 0; i < plane; ++i) {
            T dot = T(0);
            for (int c = 0; c < y.c; ++c) {
                const std::size_t k = base + static_cast<std::size_t>(c) * plane + i;
                dot += dy.v[k] * y.v[k];
            }
            for (int c = 0; c < y.c; ++c) {
                const std::size_t k = base + static_cast<std::size_t>(c) * plane + i;
                dx.v[k] = y.v[k] * (dy.v[k] - dot);
            }
        }
    }
    return dx;
}

} // namespace segqc::nn

#endif
