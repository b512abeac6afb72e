#ifndef SEGQC_VERIFY_HPP
#define SEGQC_VERIFY_HPP

#include <string>
#include <vector>

#include "segqc/ca/model.hpp"
#include "segqc/nn/gradcheck.hpp"

namespace segqc {

struct VerificationItem {
    std::string name;
    double tolerance = 0.0;
    double max_rel_error = 0.0;
    bool passed = false;
};

struct VerificationReport {
    std::vector<VerificationItem> items;
    bool all_passed() const {
        for (const VerificationItem& i : items)
            if (!i.passed) return false;
        return true;
    }
};

namespace detail {

inline nn::Tensor4<double> random_tensor(int n, int c, int h, int w, Rng& rng, double lo = -1.0,
                                         double hi = 1.0) {
    nn::Tensor4<double> t(n, c, h, w);
    for (double& v : t.v)
        v = rng.uniform(lo, hi);
    return t;
}

inline void add_item(VerificationReport& report, const std::string& name,
                     const nn::GradCheckReport& check) {
    report.items.push_back({name, check.tolerance, check.max_rel_error, check.passed()});
}

} // namespace detail

// Finite-difference verification of every layer kind, both losses, and a
// small but complete autoencoder. Double precision throughout. Layer and
// loss checks run at layer_tolerance, the full model at model_tolerance with
// model_samples parameters checked per array (evenly spaced).
inline VerificationReport verify_engine_gradients(double layer_tolerance = 1e-4,
                                                  double model_tolerance = 1e-3,
                                                  std::uint64_t seed = 17,
                                                  std::size_t model_samples = 40) {
    VerificationReport report;
    Rng rng(seed);

    auto init_and_check = [&](const std::string& name, std::vector<nn::LayerSpec> specs,
                              const nn::Tensor4<double>& input, double tol) {
        nn::Network<double> net(std::move(specs));
        nn::he_normal_init(net.specs, net.params, rng);
        detail::add_item(report, name,
                         nn::gradient_check(net, input, nn::CheckLoss::weighted_sum, {}, tol, seed));
    };

    init_and_check("conv k3 s1 p1", {nn::LayerSpec::conv(2, 3, 3, 1, 1)},
                   detail::random_tensor(2, 2, 6, 6, rng), layer_tolerance);
    init_and_check("conv k4 s2 p1", {nn::LayerSpec::conv(2, 3, 4, 2, 1)},
                   detail::random_tensor(2, 2, 6, 6, rng), layer_tolerance);
    init_and_check("conv_transpose k3 s1 p1", {nn::LayerSpec::conv_transpose(2, 3, 3, 1, 1)},
                   detail::random_tensor(2, 2, 6, 6, rng), layer_tolerance);
    init_and_check("conv_transpose k4 s2 p1", {nn::LayerSpec::conv_transpose(2, 3, 4, 2, 1)},
                   detail::random_tensor(2, 2, 4, 4, rng), layer_tolerance);
    init_and_check("batchnorm", {nn::LayerSpec::batchnorm(3)},
                   detail::random_tensor(3, 3, 5, 5, rng), layer_tolerance);
    init_and_check("leaky_relu", {nn::LayerSpec::leaky_relu(0.2)},
                   detail::random_tensor(2, 3, 5, 5, rng), layer_tolerance);
    init_and_check("dropout", {nn::LayerSpec::dropout(0.1)},
                   detail::random_tensor(2, 3, 5, 5, rng), layer_tolerance);
    init_and_check("softmax_channel", {nn::LayerSpec::softmax_channel()},
                   detail::random_tensor(2, 4, 5, 5, rng), layer_tolerance);

    // Loss gradients against a one-hot target and a soft prediction.
    {
        nn::Tensor4<double> target(2, 4, 4, 4);
        for (int n = 0; n < target.n; ++n)
            for (int y = 0; y < target.h; ++y)
                for (int x = 0; x < target.w; ++x)
                    target.at(n, static_cast<int>(rng.uniform_below(4)), y, x) = 1.0;
        nn::Tensor4<double> raw = detail::random_tensor(2, 4, 4, 4, rng);
        nn::Tensor4<double> pred = nn::softmax_channel_forward(raw);
        detail::add_item(report, "mse_loss",
                         nn::gradient_check_loss(nn::CheckLoss::mse, pred, target, layer_tolerance));
        detail::add_item(report, "generalized_dice_loss",
                         nn::gradient_check_loss(nn::CheckLoss::gdl, pred, target, layer_tolerance));
        detail::add_item(report, "generalized_dice_loss (no background)",
                         nn::gradient_check_loss(nn::CheckLoss::gdl, pred, target, layer_tolerance,
                                                 false));
    }

    // Full scaled autoencoder under the training objective, parameters
    // sampled to keep the harness quick.
    {
        ca::ArchitectureConfig cfg = ca::ArchitectureConfig::scaled(16, 8);
        ca::AutoencoderModel<double> model = ca::build<double>(cfg, rng);
        nn::Tensor4<double> input(1, cfg.class_count, cfg.input_size, cfg.input_size);
        for (int y = 0; y < cfg.input_size; ++y)
            for (int x = 0; x < cfg.input_size; ++x)
                input.at(0, static_cast<int>(rng.uniform_below(4)), y, x) = 1.0;
        detail::add_item(report, "scaled autoencoder (mse+gdl)",
                         nn::gradient_check(model.net, input, nn::CheckLoss::mse_plus_gdl, input,
                                            model_tolerance, seed, model_samples));
    }

    return report;
}

} // namespace segqc

#endif
