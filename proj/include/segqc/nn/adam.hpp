#ifndef SEGQC_NN_ADAM_HPP
#define SEGQC_NN_ADAM_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "segqc/nn/layers.hpp"
#include "segqc/util/errors.hpp"

namespace segqc::nn {

// Bias-corrected Adam with classic L2 coupling: the decay term wd*theta is
// added to the gradient before the moment updates (not decoupled).
template <typename T>
struct AdamState {
    std::int64_t step = 0;
    double lr = 2e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 1e-5;
    std::vector<LayerParams<T>> m; // first moments, shaped like the parameters
    std::vector<LayerParams<T>> v; // second moments

    static AdamState<T> for_params(const std::vector<LayerParams<T>>& params, double lr = 2e-4,
                                   double weight_decay = 1e-5) {
        AdamState<T> state;
        state.lr = lr;
        state.weight_decay = weight_decay;
        state.m.resize(params.size());
        state.v.resize(params.size());
        for (std::size_t l = 0; l < params.size(); ++l) {
            state.m[l].weight.assign(params[l].weight.size(), T(0));
            state.m[l].bias.assign(params[l].bias.size(), T(0));
            state.v[l].weight.assign(params[l].weight.size(), T(0));
            state.v[l].bias.assign(params[l].bias.size(), T(0));
        }
        return state;
    }
};

namespace detail {

template <typename T>
void adam_update_array(std::vector<T>& theta, const std::vector<T>& grad, std::vector<T>& m,
                       std::vector<T>& v, const AdamState<T>& s, T corr1, T corr2) {
    const T lr = static_cast<T>(s.lr);
    const T beta1 = static_cast<T>(s.beta1);
    const T beta2 = static_cast<T>(s.beta2);
    const T eps = static_cast<T>(s.epsilon);
    const T wd = static_cast<T>(s.weight_decay);
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const T g = grad[i] + wd * theta[i];
        m[i] = beta1 * m[i] + (T(1) - beta1) * g;
        v[i] = beta2 * v[i] + (T(1) - beta2) * g * g;
        const T m_hat = m[i] / corr1;
        const T v_hat = v[i] / corr2;
        theta[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
}

} // namespace detail

// One optimizer step over every trainable array. Batchnorm running
// statistics are not parameters and stay untouched.
template <typename T>
void adam_step(std::vector<LayerParams<T>>& params, const std::vector<LayerParams<T>>& grads,
               AdamState<T>& state) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw config_error("adam_step: state/parameter layout mismatch");
    state.step += 1;
    const T corr1 = T(1) - static_cast<T>(std::pow(state.beta1, static_cast<double>(state.step)));
    const T corr2 = T(1) - static_cast<T>(std::pow(state.beta2, static_cast<double>(state.step)));
    for (std::size_t l = 0; l < params.size(); ++l) {
        if (params[l].weight.size() != grads[l].weight.size() ||
            params[l].bias.size() != grads[l].bias.size())
            throw config_error("adam_step: gradient shape mismatch at layer " + std::to_string(l));
        detail::adam_update_array(params[l].weight, grads[l].weight, state.m[l].weight,
                                  state.v[l].weight, state, corr1, corr2);
        detail::adam_update_array(params[l].bias, grads[l].bias, state.m[l].bias,
                                  state.v[l].bias, state, corr1, corr2);
    }
}

} // namespace segqc::nn

#endif
