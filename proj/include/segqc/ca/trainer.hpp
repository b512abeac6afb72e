#ifndef SEGQC_CA_TRAINER_HPP
#define SEGQC_CA_TRAINER_HPP

#include <cstdint>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

#include "segqc/ca/checkpoint.hpp"
#include "segqc/ca/model.hpp"
#include "segqc/mask.hpp"
#include "segqc/nn/adam.hpp"
#include "segqc/nn/losses.hpp"
#include "segqc/util/rng.hpp"

namespace segqc::ca {

struct TrainConfig {
    int epochs = 500;
    int bg_exclusion_epochs = 10; // generalized Dice skips background this long
    double lr = 2e-4;
    double weight_decay = 1e-5;
    int batch_size = 8;
    double split_ratio = 0.8; // training fraction of the dataset
    std::uint64_t seed = 0;

    void validate() const {
        if (split_ratio <= 0.0 || split_ratio >= 1.0)
            throw config_error("train: split ratio must be in (0,1)");
        if (bg_exclusion_epochs > epochs)
            throw config_error("train: background exclusion epochs exceed total epochs");
        if (epochs < 1 || batch_size < 1)
            throw config_error("train: epochs and batch size must be positive");
    }
};

struct EpochLog {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    bool gd_includes_background = false;
};

struct TrainingLog {
    std::vector<std::size_t> train_indices; // into the input dataset
    std::vector<std::size_t> val_indices;
    std::vector<EpochLog> epochs;
    int best_epoch = -1;
    double best_val_loss = 0.0;
};

namespace detail {

// Generalized Dice over an arbitrarily chunked sample stream: the loss only
// depends on per-class sums, so validation can run in bounded memory and is
// independent of the chunking.
class GdlAccumulator {
public:
    explicit GdlAccumulator(int classes) : r_sum_(classes, 0.0), p_sum_(classes, 0.0), rp_sum_(classes, 0.0) {}

    void add(const nn::Tensor4<float>& pred, const nn::Tensor4<float>& target) {
        const std::size_t plane = static_cast<std::size_t>(pred.h) * pred.w;
        for (int n = 0; n < pred.n; ++n) {
            for (int c = 0; c < pred.c; ++c) {
                const float* pp = &pred.at(n, c, 0, 0);
                const float* rp = &target.at(n, c, 0, 0);
                double r = 0.0, p = 0.0, x = 0.0;
                for (std::size_t i = 0; i < plane; ++i) {
                    r += rp[i];
                    p += pp[i];
                    x += static_cast<double>(rp[i]) * pp[i];
                }
                r_sum_[static_cast<std::size_t>(c)] += r;
                p_sum_[static_cast<std::size_t>(c)] += p;
                rp_sum_[static_cast<std::size_t>(c)] += x;
            }
        }
    }

    double loss(bool include_background) const {
        const double reg = 1e-6;
        double numer = 0.0, denom = 0.0;
        for (std::size_t c = include_background ? 0 : 1; c < r_sum_.size(); ++c) {
            const double w = 1.0 / (r_sum_[c] * r_sum_[c] + reg);
            numer += w * rp_sum_[c];
            denom += w * (r_sum_[c] + p_sum_[c]);
        }
        return 1.0 - 2.0 * numer / (denom + reg);
    }

private:
    std::vector<double> r_sum_, p_sum_, rp_sum_;
};

inline nn::Tensor4<float> assemble_batch(const std::vector<nn::Tensor4<float>>& encoded,
                                         const std::vector<std::size_t>& order, std::size_t first,
                                         std::size_t count) {
    const nn::Tensor4<float>& head = encoded[order[first]];
    nn::Tensor4<float> batch(static_cast<int>(count), head.c, head.h, head.w);
    const std::size_t plane = static_cast<std::size_t>(head.c) * head.h * head.w;
    for (std::size_t s = 0; s < count; ++s) {
        const nn::Tensor4<float>& src = encoded[order[first + s]];
        std::copy(src.v.begin(), src.v.end(), batch.v.begin() + static_cast<std::ptrdiff_t>(s * plane));
    }
    return batch;
}

} // namespace detail

// Trains the autoencoder on ground-truth masks. Deterministic for a given
// seed: one generator drives, in order, parameter init, the train/val split
// shuffle, then per epoch the minibatch shuffle and per-batch dropout masks.
// Loss is L_MSE + L_GD on the softmax probabilities; L_GD leaves out the
// background class while epoch < bg_exclusion_epochs. Validation always uses
// the full loss (background included), computed in eval mode over the whole
// validation set. The checkpoint keeps the epoch with the lowest validation
// loss.
inline std::pair<Checkpoint, TrainingLog> train(
    const std::vector<LabelMask>& dataset, const ArchitectureConfig& arch, const TrainConfig& cfg,
    std::vector<std::string> class_names = {},
    const std::function<void(const EpochLog&)>& on_epoch = nullptr) {
    cfg.validate();
    arch.validate();
    if (dataset.size() < 2)
        throw config_error("train: need at least 2 masks, got " + std::to_string(dataset.size()));
    for (const LabelMask& m : dataset)
        if (m.height != arch.input_size || m.width != arch.input_size)
            throw data_error("train: mask size " + std::to_string(m.height) + "x" +
                             std::to_string(m.width) + " does not match architecture input " +
                             std::to_string(arch.input_size));

    Rng rng(cfg.seed);
    AutoencoderModel<float> model = build<float>(arch, rng);
    nn::AdamState<float> adam =
        nn::AdamState<float>::for_params(model.net.params, cfg.lr, cfg.weight_decay);

    // Split by seeded shuffle.
    std::vector<std::size_t> indices(dataset.size());
    std::iota(indices.begin(), indices.end(), 0u);
    rng.shuffle(indices);
    const std::size_t train_n = static_cast<std::size_t>(
        static_cast<double>(dataset.size()) * cfg.split_ratio);
    if (train_n == 0 || train_n == dataset.size())
        throw config_error("train: split ratio " + std::to_string(cfg.split_ratio) +
                           " leaves an empty split for " + std::to_string(dataset.size()) +
                           " masks");

    TrainingLog log;
    log.train_indices.assign(indices.begin(), indices.begin() + static_cast<std::ptrdiff_t>(train_n));
    log.val_indices.assign(indices.begin() + static_cast<std::ptrdiff_t>(train_n), indices.end());

    ClassSet classes;
    classes.count = arch.class_count;
    classes.names.clear();
    std::vector<nn::Tensor4<float>> encoded;
    encoded.reserve(dataset.size());
    for (const LabelMask& m : dataset)
        encoded.push_back(to_tensor<float>(encode_one_hot(m, classes)));

    Checkpoint best;
    best.config = arch;
    best.class_names = std::move(class_names);
    best.seed = cfg.seed;
    bool have_best = false;

    const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
    std::vector<std::size_t> train_order = log.train_indices;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const bool include_bg = epoch >= cfg.bg_exclusion_epochs;

        rng.shuffle(train_order);
        double train_loss_sum = 0.0;
        for (std::size_t first = 0; first < train_order.size(); first += batch) {
            const std::size_t count = std::min(batch, train_order.size() - first);
            nn::Tensor4<float> x = detail::assemble_batch(encoded, train_order, first, count);

            nn::ForwardTrace<float> trace;
            nn::Tensor4<float> probs = model.net.forward(x, nn::RunMode::train, &rng, &trace);
            nn::LossValue<float> mse = nn::mse_loss(probs, x);
            nn::LossValue<float> gdl = nn::generalized_dice_loss(probs, x, include_bg);
            const double batch_loss = static_cast<double>(mse.value) + gdl.value;
            train_loss_sum += batch_loss * static_cast<double>(count);

            for (std::size_t i = 0; i < mse.grad.v.size(); ++i)
                mse.grad.v[i] += gdl.grad.v[i];
            std::vector<nn::LayerParams<float>> grads;
            model.net.backward(trace, mse.grad, grads);
            nn::adam_step(model.net.params, grads, adam);
        }

        // Validation in eval mode with the full loss.
        double sq_sum = 0.0;
        std::size_t element_count = 0;
        detail::GdlAccumulator gdl_val(arch.class_count);
        for (std::size_t first = 0; first < log.val_indices.size(); first += batch) {
            const std::size_t count = std::min(batch, log.val_indices.size() - first);
            nn::Tensor4<float> x = detail::assemble_batch(encoded, log.val_indices, first, count);
            nn::Tensor4<float> probs = model.net.forward(x, nn::RunMode::eval);
            for (std::size_t i = 0; i < x.v.size(); ++i) {
                const double d = static_cast<double>(probs.v[i]) - x.v[i];
                sq_sum += d * d;
            }
            element_count += x.v.size();
            gdl_val.add(probs, x);
        }
        const double val_loss = sq_sum / static_cast<double>(element_count) + gdl_val.loss(true);

        EpochLog entry;
        entry.epoch = epoch;
        entry.train_loss = train_loss_sum / static_cast<double>(train_order.size());
        entry.val_loss = val_loss;
        entry.gd_includes_background = include_bg;
        log.epochs.push_back(entry);
        if (on_epoch)
            on_epoch(entry);

        if (!have_best || val_loss < best.best_val_loss) {
            have_best = true;
            best.best_val_loss = val_loss;
            best.epoch = epoch;
            best.params = model.net.params;
        }
    }

    log.best_epoch = best.epoch;
    log.best_val_loss = best.best_val_loss;
    return {std::move(best), std::move(log)};
}

} // namespace segqc::ca

#endif
