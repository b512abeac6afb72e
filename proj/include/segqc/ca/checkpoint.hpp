#ifndef SEGQC_CA_CHECKPOINT_HPP
#define SEGQC_CA_CHECKPOINT_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "segqc/ca/model.hpp"
#include "segqc/util/crc32.hpp"
#include "segqc/util/errors.hpp"
#include "segqc/util/fileio.hpp"

namespace segqc::ca {

// Best-validation snapshot of a training run. Parameters include batchnorm
// running statistics so a reloaded model reproduces forward outputs bitwise.
struct Checkpoint {
    std::uint32_t version = 1;
    ArchitectureConfig config;
    std::vector<std::string> class_names;
    std::vector<nn::LayerParams<float>> params;
    double best_val_loss = 0.0;
    int epoch = -1;
    std::uint64_t seed = 0;
};

namespace detail {

constexpr char kCheckpointMagic[4] = {'S', 'Q', 'C', 'A'};
constexpr std::uint32_t kCheckpointVersion = 1;

inline void append_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
    out.push_back(static_cast<char>((v >> 16) & 0xFF));
    out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

inline std::uint32_t read_u32(const std::string& data, std::size_t pos) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos])) |
           static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos + 1])) << 8 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos + 2])) << 16 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos + 3])) << 24;
}

inline nlohmann::json architecture_to_json(const ArchitectureConfig& cfg) {
    nlohmann::json rows = nlohmann::json::array();
    for (const EncoderRow& row : cfg.encoder_rows)
        rows.push_back({row.out_channels, row.kernel, row.stride, row.padding});
    return {
        {"input_size", cfg.input_size},       {"class_count", cfg.class_count},
        {"latent_maps", cfg.latent_maps},     {"latent_size", cfg.latent_size},
        {"negative_slope", cfg.negative_slope}, {"drop_prob", cfg.drop_prob},
        {"bn_momentum", cfg.bn_momentum},     {"bn_epsilon", cfg.bn_epsilon},
        {"encoder_rows", rows},
    };
}

inline ArchitectureConfig architecture_from_json(const nlohmann::json& j) {
    ArchitectureConfig cfg;
    cfg.input_size = j.at("input_size").get<int>();
    cfg.class_count = j.at("class_count").get<int>();
    cfg.latent_maps = j.at("latent_maps").get<int>();
    cfg.latent_size = j.at("latent_size").get<int>();
    cfg.negative_slope = j.at("negative_slope").get<double>();
    cfg.drop_prob = j.at("drop_prob").get<double>();
    cfg.bn_momentum = j.at("bn_momentum").get<double>();
    cfg.bn_epsilon = j.at("bn_epsilon").get<double>();
    cfg.encoder_rows.clear();
    for (const auto& row : j.at("encoder_rows")) {
        cfg.encoder_rows.push_back(
            {row.at(0).get<int>(), row.at(1).get<int>(), row.at(2).get<int>(), row.at(3).get<int>()});
    }
    return cfg;
}

inline std::size_t payload_float_count(const std::vector<nn::LayerParams<float>>& params) {
    std::size_t count = 0;
    for (const auto& p : params)
        count += p.weight.size() + p.bias.size() + p.running_mean.size() + p.running_var.size();
    return count;
}

inline void append_floats(std::string& out, const std::vector<float>& values) {
    for (float f : values)
        append_u32(out, std::bit_cast<std::uint32_t>(f));
}

} // namespace detail

inline void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    nlohmann::json meta = {
        {"config", detail::architecture_to_json(ckpt.config)},
        {"class_names", ckpt.class_names},
        {"best_val_loss", ckpt.best_val_loss},
        {"epoch", ckpt.epoch},
        {"seed", ckpt.seed},
        {"param_count", detail::payload_float_count(ckpt.params)},
    };
    const std::string json_block = meta.dump();

    std::string out;
    out.append(detail::kCheckpointMagic, 4);
    detail::append_u32(out, detail::kCheckpointVersion);
    detail::append_u32(out, static_cast<std::uint32_t>(json_block.size()));
    out.append(json_block);
    for (const auto& p : ckpt.params) {
        detail::append_floats(out, p.weight);
        detail::append_floats(out, p.bias);
        detail::append_floats(out, p.running_mean);
        detail::append_floats(out, p.running_var);
    }
    detail::append_u32(out, crc32(out.data(), out.size()));
    atomic_write_file(path, out);
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
    const std::string data = read_file(path);
    if (data.size() < 12)
        throw io_error("checkpoint truncated (no header): " + path.string());
    if (std::memcmp(data.data(), detail::kCheckpointMagic, 4) != 0)
        throw io_error("not a checkpoint file (bad magic): " + path.string());
    const std::uint32_t version = detail::read_u32(data, 4);
    if (version != detail::kCheckpointVersion)
        throw io_error("unsupported checkpoint version " + std::to_string(version) + ": " +
                       path.string());
    const std::uint32_t json_len = detail::read_u32(data, 8);
    if (data.size() < 12 + static_cast<std::size_t>(json_len) + 4)
        throw io_error("checkpoint truncated (config block): " + path.string());

    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(data.substr(12, json_len));
    } catch (const nlohmann::json::exception& e) {
        throw io_error("checkpoint config block unparseable: " + std::string(e.what()));
    }

    Checkpoint ckpt;
    ckpt.version = version;
    ckpt.config = detail::architecture_from_json(meta.at("config"));
    ckpt.class_names = meta.value("class_names", std::vector<std::string>{});
    ckpt.best_val_loss = meta.at("best_val_loss").get<double>();
    ckpt.epoch = meta.at("epoch").get<int>();
    ckpt.seed = meta.at("seed").get<std::uint64_t>();

    AutoencoderModel<float> shape_probe = build<float>(ckpt.config);
    ckpt.params = std::move(shape_probe.net.params);
    const std::size_t expected = detail::payload_float_count(ckpt.params);
    const std::size_t declared = meta.at("param_count").get<std::size_t>();
    if (declared != expected)
        throw io_error("checkpoint parameter count " + std::to_string(declared) +
                       " does not match its own config (" + std::to_string(expected) + ")");

    const std::size_t payload_off = 12 + json_len;
    const std::size_t payload_bytes = expected * 4;
    if (data.size() != payload_off + payload_bytes + 4)
        throw io_error("checkpoint truncated (payload): " + path.string());

    const std::uint32_t stored_crc = detail::read_u32(data, payload_off + payload_bytes);
    if (crc32(data.data(), payload_off + payload_bytes) != stored_crc)
        throw io_error("checkpoint checksum mismatch: " + path.string());

    std::size_t pos = payload_off;
    auto read_array = [&](std::vector<float>& dst) {
        for (float& f : dst) {
            f = std::bit_cast<float>(detail::read_u32(data, pos));
            pos += 4;
        }
    };
    for (auto& p : ckpt.params) {
        read_array(p.weight);
        read_array(p.bias);
        read_array(p.running_mean);
        read_array(p.running_var);
    }
    return ckpt;
}

// Build a fresh model carrying the checkpoint's weights.
inline AutoencoderModel<float> model_from_checkpoint(const Checkpoint& ckpt) {
    AutoencoderModel<float> model = build<float>(ckpt.config);
    model.net.params = ckpt.params;
    return model;
}

// Loading into an existing model requires the configs to match exactly.
inline void restore_into(AutoencoderModel<float>& model, const Checkpoint& ckpt) {
    if (!(model.config == ckpt.config))
        throw config_error("checkpoint architecture does not match the model it is loaded into");
    model.net.params = ckpt.params;
}

} // namespace segqc::ca

#endif
