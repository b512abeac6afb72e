#ifndef SEGQC_CA_MODEL_HPP
#define SEGQC_CA_MODEL_HPP

#include <cstdint>
#include <utility>

#include "segqc/ca/architecture.hpp"
#include "segqc/mask.hpp"
#include "segqc/nn/init.hpp"
#include "segqc/nn/network.hpp"

namespace segqc::ca {

// The convolutional autoencoder: encoder table, mirrored transposed-conv
// decoder, terminal channel softmax. Owns its parameters by value.
template <typename T = float>
struct AutoencoderModel {
    ArchitectureConfig config;
    nn::Network<T> net;

    template <typename U>
    AutoencoderModel<U> cast() const {
        AutoencoderModel<U> out;
        out.config = config;
        out.net = net.template cast<U>();
        return out;
    }
};

template <typename T = float>
AutoencoderModel<T> build(const ArchitectureConfig& config) {
    AutoencoderModel<T> model;
    model.config = config;
    model.net = nn::Network<T>(config.layer_specs());
    return model;
}

template <typename T = float>
AutoencoderModel<T> build(const ArchitectureConfig& config, Rng& rng) {
    AutoencoderModel<T> model = build<T>(config);
    nn::he_normal_init(model.net.specs, model.net.params, rng);
    return model;
}

template <typename T>
nn::Tensor4<T> to_tensor(const OneHotGrid& grid) {
    nn::Tensor4<T> t(1, grid.channels, grid.height, grid.width);
    for (std::size_t i = 0; i < grid.values.size(); ++i)
        t.v[i] = static_cast<T>(grid.values[i]);
    return t;
}

template <typename T>
OneHotGrid to_one_hot_grid(const nn::Tensor4<T>& t, int sample) {
    OneHotGrid grid(t.c, t.h, t.w);
    const std::size_t plane = static_cast<std::size_t>(t.c) * t.h * t.w;
    const std::size_t base = static_cast<std::size_t>(sample) * plane;
    for (std::size_t i = 0; i < plane; ++i)
        grid.values[i] = static_cast<float>(t.v[base + i]);
    return grid;
}

// Reconstruction of a single mask: eval-mode forward, probabilities out,
// argmax decode into the pseudo ground truth. Deterministic.
template <typename T>
std::pair<LabelMask, OneHotGrid> reconstruct(AutoencoderModel<T>& model, const LabelMask& mask) {
    if (mask.height != model.config.input_size || mask.width != model.config.input_size)
        throw data_error("reconstruct: mask is " + std::to_string(mask.height) + "x" +
                         std::to_string(mask.width) + ", model expects " +
                         std::to_string(model.config.input_size) + "x" +
                         std::to_string(model.config.input_size) +
                         " (apply center_fit first)");
    ClassSet classes;
    classes.count = model.config.class_count;
    classes.names.clear();
    const OneHotGrid encoded = encode_one_hot(mask, classes);
    nn::Tensor4<T> x = to_tensor<T>(encoded);
    nn::Tensor4<T> y = model.net.forward(x, nn::RunMode::eval);
    OneHotGrid probs = to_one_hot_grid(y, 0);
    LabelMask pgt = decode_argmax(probs);
    pgt.spacing_row = mask.spacing_row;
    pgt.spacing_col = mask.spacing_col;
    return {std::move(pgt), std::move(probs)};
}

} // namespace segqc::ca

#endif
