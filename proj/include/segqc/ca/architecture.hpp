#ifndef SEGQC_CA_ARCHITECTURE_HPP
#define SEGQC_CA_ARCHITECTURE_HPP

#include <string>
#include <vector>

#include "segqc/nn/layers.hpp"
#include "segqc/util/errors.hpp"

namespace segqc::ca {

// One encoder table row: a convolution taking the running spatial size to
// the next one. Hidden rows expand to Conv -> BatchNorm -> LeakyReLU ->
// Dropout; the final row is the plain linear convolution into latent space.
struct EncoderRow {
    int out_channels = 0;
    int kernel = 0;
    int stride = 1;
    int padding = 0;

    bool operator==(const EncoderRow&) const = default;
};

struct ArchitectureConfig {
    int input_size = 256;  // H = W
    int class_count = 4;
    int latent_maps = 100; // feature maps in latent space
    int latent_size = 4;   // latent spatial size
    double negative_slope = 0.2;
    double drop_prob = 0.1;
    double bn_momentum = 0.1;
    double bn_epsilon = 1e-5;
    std::vector<EncoderRow> encoder_rows;

    bool operator==(const ArchitectureConfig&) const = default;

    // The published encoder table: 256x256x4 input compressed into 100
    // feature maps of size 4x4.
    static ArchitectureConfig canonical(int latent_maps = 100, int class_count = 4) {
        ArchitectureConfig cfg;
        cfg.class_count = class_count;
        cfg.latent_maps = latent_maps;
        cfg.encoder_rows = {
            {32, 4, 2, 1},  // 256 -> 128
            {32, 4, 2, 1},  // 128 -> 64
            {32, 4, 2, 1},  // 64  -> 32
            {32, 3, 1, 1},  // 32  -> 32
            {64, 4, 2, 1},  // 32  -> 16
            {64, 3, 1, 1},  // 16  -> 16
            {128, 4, 2, 1}, // 16  -> 8
            {64, 3, 1, 1},  // 8   -> 8
            {32, 3, 1, 1},  // 8   -> 8
            {latent_maps, 4, 2, 1}, // 8 -> 4, linear latent projection
        };
        return cfg;
    }

    // Desk-scale variant: rows are dropped from the front until the number
    // of remaining stride-2 rows matches log2(input_size / latent_size). The
    // channel pattern tail is preserved, so the canonical build stays
    // faithful while small inputs become cheap to train and test.
    static ArchitectureConfig scaled(int input_size, int latent_maps = 100, int class_count = 4) {
        ArchitectureConfig cfg = canonical(latent_maps, class_count);
        cfg.input_size = input_size;
        if (input_size < cfg.latent_size)
            throw config_error("scaled config: input size below latent size");
        int needed = 0;
        int size = input_size;
        while (size > cfg.latent_size) {
            if (size % 2 != 0)
                throw config_error("scaled config: input size " + std::to_string(input_size) +
                                   " is not latent_size * 2^k");
            size /= 2;
            ++needed;
        }
        int have = 0;
        for (const EncoderRow& row : cfg.encoder_rows)
            if (row.stride == 2) ++have;
        if (needed > have)
            throw config_error("scaled config: input size " + std::to_string(input_size) +
                               " needs more stride-2 rows than the canonical pattern has");
        while (have > needed) {
            if (cfg.encoder_rows.front().stride == 2)
                --have;
            cfg.encoder_rows.erase(cfg.encoder_rows.begin());
        }
        return cfg;
    }

    // Spatial-size/channel chain through the encoder, starting at the input.
    std::vector<std::pair<int, int>> encoder_shapes() const {
        std::vector<std::pair<int, int>> shapes;
        shapes.emplace_back(input_size, class_count);
        int size = input_size;
        for (const EncoderRow& row : encoder_rows) {
            size = nn::conv_output_size(size, row.kernel, row.stride, row.padding);
            shapes.emplace_back(size, row.out_channels);
        }
        return shapes;
    }

    // The shape chain must close: encoder reaches the latent geometry and
    // the mirrored decoder regenerates the input geometry exactly.
    void validate() const {
        if (class_count < 2)
            throw config_error("architecture: need at least 2 classes");
        if (encoder_rows.empty())
            throw config_error("architecture: no encoder rows");
        if (encoder_rows.back().out_channels != latent_maps)
            throw config_error("architecture: final row channels " +
                               std::to_string(encoder_rows.back().out_channels) +
                               " do not match latent maps " + std::to_string(latent_maps));
        int size = input_size;
        std::vector<int> sizes_in; // encoder input size per row, reused by the mirror check
        for (std::size_t i = 0; i < encoder_rows.size(); ++i) {
            const EncoderRow& row = encoder_rows[i];
            sizes_in.push_back(size);
            int out;
            try {
                out = nn::conv_output_size(size, row.kernel, row.stride, row.padding);
            } catch (const config_error& e) {
                throw config_error("architecture: encoder row " + std::to_string(i + 1) + ": " +
                                   e.what());
            }
            size = out;
        }
        if (size != latent_size)
            throw config_error("architecture: encoder ends at size " + std::to_string(size) +
                               ", expected latent size " + std::to_string(latent_size));
        // Mirrored transposed rows must regenerate each encoder input size.
        for (std::size_t i = encoder_rows.size(); i-- > 0;) {
            const EncoderRow& row = encoder_rows[i];
            const int regen = nn::conv_transpose_output_size(
                i + 1 < encoder_rows.size() ? sizes_in[i + 1] : latent_size, row.kernel, row.stride,
                row.padding);
            if (regen != sizes_in[i])
                throw config_error("architecture: decoder mirror of row " + std::to_string(i + 1) +
                                   " regenerates size " + std::to_string(regen) + ", expected " +
                                   std::to_string(sizes_in[i]));
        }
    }

    // Full layer list: encoder rows, mirrored transposed-convolution decoder
    // with reversed channel sequence, terminal channel softmax. The final
    // encoder row and final decoder row carry no batchnorm/dropout; the
    // latent projection is linear.
    std::vector<nn::LayerSpec> layer_specs() const {
        validate();
        std::vector<nn::LayerSpec> specs;
        int in_c = class_count;
        for (std::size_t i = 0; i < encoder_rows.size(); ++i) {
            const EncoderRow& row = encoder_rows[i];
            specs.push_back(nn::LayerSpec::conv(in_c, row.out_channels, row.kernel, row.stride,
                                                row.padding));
            if (i + 1 < encoder_rows.size()) {
                specs.push_back(nn::LayerSpec::batchnorm(row.out_channels, bn_momentum, bn_epsilon));
                specs.push_back(nn::LayerSpec::leaky_relu(negative_slope));
                specs.push_back(nn::LayerSpec::dropout(drop_prob));
            }
            in_c = row.out_channels;
        }
        for (std::size_t i = encoder_rows.size(); i-- > 0;) {
            const EncoderRow& row = encoder_rows[i];
            const int out_c = i > 0 ? encoder_rows[i - 1].out_channels : class_count;
            specs.push_back(nn::LayerSpec::conv_transpose(row.out_channels, out_c, row.kernel,
                                                          row.stride, row.padding));
            if (i > 0) {
                specs.push_back(nn::LayerSpec::batchnorm(out_c, bn_momentum, bn_epsilon));
                specs.push_back(nn::LayerSpec::leaky_relu(negative_slope));
                specs.push_back(nn::LayerSpec::dropout(drop_prob));
            }
        }
        specs.push_back(nn::LayerSpec::softmax_channel());
        return specs;
    }
};

} // namespace segqc::ca

#endif
