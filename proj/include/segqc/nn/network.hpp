#ifndef SEGQC_NN_NETWORK_HPP
#define SEGQC_NN_NETWORK_HPP

#include <cstddef>
#include <vector>

#include "segqc/nn/layers.hpp"
#include "segqc/util/rng.hpp"

namespace segqc::nn {

// Activations and auxiliary state recorded during a forward pass, consumed
// once by the matching backward pass.
template <typename T>
struct ForwardTrace {
    std::vector<Tensor4<T>> inputs;            // per layer
    std::vector<Tensor4<T>> dropout_masks;     // per layer; empty unless dropout in train mode
    std::vector<Tensor4<T>> softmax_outputs;   // per layer; empty unless softmax
    std::vector<BatchNormCache<T>> bn_caches;  // per layer; empty unless batchnorm
};

// A fixed sequence of layers over the engine's layer vocabulary. Parameters
// are owned by value; the network holds no hidden mutable state beyond
// batchnorm running statistics.
template <typename T>
class Network {
public:
    std::vector<LayerSpec> specs;
    std::vector<LayerParams<T>> params;

    Network() = default;
    explicit Network(std::vector<LayerSpec> layer_specs) : specs(std::move(layer_specs)) {
        params.reserve(specs.size());
        for (const LayerSpec& spec : specs)
            params.push_back(make_params<T>(spec));
    }

    std::size_t layer_count() const { return specs.size(); }

    std::size_t trainable_parameter_count() const {
        std::size_t total = 0;
        for (const auto& p : params)
            total += p.trainable_count();
        return total;
    }

    // Dropout draws happen in layer order; callers in train mode must pass a
    // random source. Batchnorm running statistics update in train mode.
    Tensor4<T> forward(const Tensor4<T>& x, RunMode mode, Rng* rng = nullptr,
                       ForwardTrace<T>* trace = nullptr) {
        if (trace) {
            trace->inputs.assign(specs.size(), Tensor4<T>());
            trace->dropout_masks.assign(specs.size(), Tensor4<T>());
            trace->softmax_outputs.assign(specs.size(), Tensor4<T>());
            trace->bn_caches.assign(specs.size(), BatchNormCache<T>());
        }
        Tensor4<T> cur = x;
        for (std::size_t l = 0; l < specs.size(); ++l) {
            const LayerSpec& spec = specs[l];
            if (trace)
                trace->inputs[l] = cur;
            switch (spec.kind) {
                case LayerKind::conv:
                    cur = conv2d_forward(cur, spec, params[l]);
                    break;
                case LayerKind::conv_transpose:
                    cur = conv_transpose2d_forward(cur, spec, params[l]);
                    break;
                case LayerKind::batchnorm:
                    cur = batchnorm_forward(cur, spec, params[l], mode,
                                            trace ? &trace->bn_caches[l] : nullptr);
                    break;
                case LayerKind::leaky_relu:
                    cur = leaky_relu_forward(cur, spec.negative_slope);
                    break;
                case LayerKind::dropout:
                    cur = dropout_forward(cur, spec.drop_prob, mode, rng,
                                          trace ? &trace->dropout_masks[l] : nullptr);
                    break;
                case LayerKind::softmax_channel:
                    cur = softmax_channel_forward(cur);
                    if (trace)
                        trace->softmax_outputs[l] = cur;
                    break;
            }
        }
        return cur;
    }

    // Gradient of the traced forward pass. Accumulation runs in a fixed
    // serial order, so results are deterministic for a given seed.
    Tensor4<T> backward(const ForwardTrace<T>& trace, const Tensor4<T>& grad_output,
                        std::vector<LayerParams<T>>& grads) const {
        grads.assign(specs.size(), LayerParams<T>());
        Tensor4<T> dcur = grad_output;
        for (std::size_t idx = specs.size(); idx-- > 0;) {
            const LayerSpec& spec = specs[idx];
            const Tensor4<T>& input = trace.inputs[idx];
            Tensor4<T> dprev;
            switch (spec.kind) {
                case LayerKind::conv:
                    conv2d_backward(input, spec, params[idx], dcur, dprev, grads[idx]);
                    break;
                case LayerKind::conv_transpose:
                    conv_transpose2d_backward(input, spec, params[idx], dcur, dprev, grads[idx]);
                    break;
                case LayerKind::batchnorm:
                    batchnorm_backward(input, spec, params[idx], trace.bn_caches[idx], dcur, dprev,
                                       grads[idx]);
                    break;
                case LayerKind::leaky_relu:
                    dprev = leaky_relu_backward(input, spec.negative_slope, dcur);
                    break;
                case LayerKind::dropout:
                    dprev = dropout_backward(trace.dropout_masks[idx], dcur);
                    break;
                case LayerKind::softmax_channel:
                    dprev = softmax_channel_backward(trace.softmax_outputs[idx], dcur);
                    break;
            }
            dcur = std::move(dprev);
        }
        return dcur;
    }

    template <typename U>
    Network<U> cast() const {
        Network<U> out;
        out.specs = specs;
        out.params.reserve(params.size());
        for (const auto& p : params)
            out.params.push_back(p.template cast<U>());
        return out;
    }
};

} // namespace segqc::nn

#endif
