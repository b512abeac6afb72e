#include <catch2/catch.hpp>

#include "segqc/ca/trainer.hpp"
#include "segqc/util/rng.hpp"

using namespace segqc;
using namespace segqc::ca;

namespace {

// Small masks with a block of each class, enough structure for the loss to
// have something to fit.
std::vector<LabelMask> tiny_dataset(int count, int size, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<LabelMask> masks;
    for (int i = 0; i < count; ++i) {
        LabelMask m(size, size);
        const int r0 = static_cast<int>(rng.uniform_int(1, size / 2));
        const int c0 = static_cast<int>(rng.uniform_int(1, size / 2));
        for (int r = r0; r < r0 + size / 4; ++r)
            for (int c = c0; c < c0 + size / 4; ++c)
                m.at(r, c) = 3;
        for (int r = 0; r < size / 8; ++r)
            for (int c = 0; c < size / 8; ++c) {
                m.at(r, c) = 1;
                m.at(size - 1 - r, size - 1 - c) = 2;
            }
        masks.push_back(std::move(m));
    }
    return masks;
}

TrainConfig quick_config(int epochs, int bg_epochs, std::uint64_t seed) {
    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.bg_exclusion_epochs = bg_epochs;
    cfg.batch_size = 2;
    cfg.split_ratio = 0.75;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST_CASE("training log flips the dice class set exactly at the boundary epoch") {
    const ArchitectureConfig arch = ArchitectureConfig::scaled(16, 8);
    const auto dataset = tiny_dataset(4, 16, 2);
    auto [ckpt, log] = train(dataset, arch, quick_config(6, 3, 11));

    REQUIRE(log.epochs.size() == 6);
    for (const EpochLog& e : log.epochs) {
        if (e.epoch < 3)
            REQUIRE_FALSE(e.gd_includes_background);
        else
            REQUIRE(e.gd_includes_background);
    }
    REQUIRE(ckpt.epoch >= 0);
}

TEST_CASE("checkpoint holds the minimum validation loss of the run") {
    const ArchitectureConfig arch = ArchitectureConfig::scaled(16, 8);
    const auto dataset = tiny_dataset(4, 16, 3);
    auto [ckpt, log] = train(dataset, arch, quick_config(8, 2, 21));

    double min_val = log.epochs.front().val_loss;
    for (const EpochLog& e : log.epochs)
        min_val = std::min(min_val, e.val_loss);
    REQUIRE(ckpt.best_val_loss == min_val);
    REQUIRE(log.epochs[static_cast<std::size_t>(ckpt.epoch)].val_loss == min_val);
}

TEST_CASE("training is bit-reproducible for a fixed seed") {
    const ArchitectureConfig arch = ArchitectureConfig::scaled(16, 8);
    const auto dataset = tiny_dataset(4, 16, 4);
    auto [ckpt1, log1] = train(dataset, arch, quick_config(5, 2, 33));
    auto [ckpt2, log2] = train(dataset, arch, quick_config(5, 2, 33));

    REQUIRE(log1.train_indices == log2.train_indices);
    REQUIRE(log1.epochs.size() == log2.epochs.size());
    for (std::size_t i = 0; i < log1.epochs.size(); ++i) {
        REQUIRE(log1.epochs[i].train_loss == log2.epochs[i].train_loss); // bitwise
        REQUIRE(log1.epochs[i].val_loss == log2.epochs[i].val_loss);
    }
    for (std::size_t l = 0; l < ckpt1.params.size(); ++l) {
        REQUIRE(ckpt1.params[l].weight == ckpt2.params[l].weight);
        REQUIRE(ckpt1.params[l].running_mean == ckpt2.params[l].running_mean);
    }

    auto [ckpt3, log3] = train(dataset, arch, quick_config(5, 2, 34));
    bool any_difference = false;
    for (std::size_t i = 0; i < log1.epochs.size() && !any_difference; ++i)
        any_difference = log1.epochs[i].train_loss != log3.epochs[i].train_loss;
    REQUIRE(any_difference); // a different seed actually changes the run
}

TEST_CASE("training loss decreases on an easy overfit") {
    const ArchitectureConfig arch = ArchitectureConfig::scaled(16, 8);
    const auto dataset = tiny_dataset(4, 16, 5);
    TrainConfig cfg = quick_config(15, 2, 44);
    cfg.lr = 5e-3;
    auto [ckpt, log] = train(dataset, arch, cfg);
    REQUIRE(log.epochs.back().train_loss < log.epochs.front().train_loss);
}

TEST_CASE("trainer validates its preconditions") {
    const ArchitectureConfig arch = ArchitectureConfig::scaled(16, 8);

    REQUIRE_THROWS_AS(train(tiny_dataset(1, 16, 6), arch, quick_config(2, 0, 1)), config_error);
    REQUIRE_THROWS_AS(train(tiny_dataset(4, 32, 6), arch, quick_config(2, 0, 1)), data_error);

    TrainConfig bad_split = quick_config(2, 0, 1);
    bad_split.split_ratio = 1.5;
    REQUIRE_THROWS_AS(train(tiny_dataset(4, 16, 6), arch, bad_split), config_error);

    TrainConfig tiny_split = quick_config(2, 0, 1);
    tiny_split.split_ratio = 0.05; // floor(4 * 0.05) = 0 training masks
    REQUIRE_THROWS_AS(train(tiny_dataset(4, 16, 6), arch, tiny_split), config_error);

    TrainConfig bad_bg = quick_config(2, 5, 1);
    REQUIRE_THROWS_AS(train(tiny_dataset(4, 16, 6), arch, bad_bg), config_error);
}
