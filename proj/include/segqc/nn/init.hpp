#ifndef SEGQC_NN_INIT_HPP
#define SEGQC_NN_INIT_HPP

#include <cmath>
#include <vector>

#include "segqc/nn/layers.hpp"
#include "segqc/util/rng.hpp"

namespace segqc::nn {

// Fan-in of one output unit: dim-1 channels of the weight layout times the
// kernel area. conv weights are [out][in][kh][kw], transposed conv weights
// are [in][out][kh][kw].
inline int he_fan_in(const LayerSpec& spec) {
    const int reach = spec.kernel_h * spec.kernel_w;
    return spec.kind == LayerKind::conv_transpose ? spec.out_channels * reach
                                                  : spec.in_channels * reach;
}

// He normal: conv weights ~ N(0, sqrt(2/fan_in)), biases zero, batchnorm at
// the identity (scale 1, shift 0, running mean 0, running var 1).
template <typename T>
void he_normal_init(const std::vector<LayerSpec>& specs, std::vector<LayerParams<T>>& params,
                    Rng& rng) {
    for (std::size_t l = 0; l < specs.size(); ++l) {
        const LayerSpec& spec = specs[l];
        LayerParams<T>& p = params[l];
        if (spec.kind == LayerKind::conv || spec.kind == LayerKind::conv_transpose) {
            const double stddev = std::sqrt(2.0 / static_cast<double>(he_fan_in(spec)));
            for (T& w : p.weight)
                w = static_cast<T>(rng.normal(0.0, stddev));
            for (T& b : p.bias)
                b = T(0);
        } else if (spec.kind == LayerKind::batchnorm) {
            for (T& g : p.weight) g = T(1);
            for (T& b : p.bias) b = T(0);
            for (T& m : p.running_mean) m = T(0);
            for (T& v : p.running_var) v = T(1);
        }
    }
}

} // namespace segqc::nn

#endif
