#ifndef SEGQC_MASK_HPP
#define SEGQC_MASK_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "segqc/util/errors.hpp"

namespace segqc {

// Label vocabulary of a mask. Index 0 is always background. The canonical
// cardiac order is fixed as 0=background, 1=RV, 2=MYO, 3=LV and is recorded
// in every file header this toolkit writes.
struct ClassSet {
    int count = 4;
    std::vector<std::string> names = {"background", "RV", "MYO", "LV"};

    static ClassSet cardiac() { return ClassSet{}; }

    void validate() const {
        if (count < 2)
            throw config_error("ClassSet: need at least 2 classes, got " + std::to_string(count));
        if (!names.empty() && static_cast<int>(names.size()) != count)
            throw config_error("ClassSet: name count does not match class count");
    }

    const std::string& name(int index) const {
        static const std::string unnamed = "?";
        if (index < 0 || index >= static_cast<int>(names.size())) return unnamed;
        return names[static_cast<std::size_t>(index)];
    }
};

// 2-D grid of class labels with physical pixel spacing in millimetres.
struct LabelMask {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> labels; // row-major, height*width entries
    double spacing_row = 1.0;         // mm per pixel, row direction
    double spacing_col = 1.0;         // mm per pixel, column direction

    LabelMask() = default;
    LabelMask(int h, int w, std::uint8_t fill = 0)
        : height(h), width(w), labels(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), fill) {}

    std::uint8_t& at(int r, int c) {
        return labels[static_cast<std::size_t>(r) * static_cast<std::size_t>(width) + static_cast<std::size_t>(c)];
    }
    std::uint8_t at(int r, int c) const {
        return labels[static_cast<std::size_t>(r) * static_cast<std::size_t>(width) + static_cast<std::size_t>(c)];
    }

    std::size_t size() const { return labels.size(); }

    bool same_grid(const LabelMask& other) const {
        return height == other.height && width == other.width;
    }

    bool operator==(const LabelMask& other) const {
        return height == other.height && width == other.width && labels == other.labels &&
               spacing_row == other.spacing_row && spacing_col == other.spacing_col;
    }
};

// C-channel float view of a mask; the network's input/output domain.
// Encoded masks are exactly one-hot; network outputs are per-pixel
// probability distributions over channels.
struct OneHotGrid {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<float> values; // [c][h][w]

    OneHotGrid() = default;
    OneHotGrid(int c, int h, int w)
        : channels(c), height(h), width(w),
          values(static_cast<std::size_t>(c) * static_cast<std::size_t>(h) * static_cast<std::size_t>(w), 0.0f) {}

    float& at(int c, int r, int col) {
        return values[(static_cast<std::size_t>(c) * static_cast<std::size_t>(height) +
                       static_cast<std::size_t>(r)) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(col)];
    }
    float at(int c, int r, int col) const {
        return values[(static_cast<std::size_t>(c) * static_cast<std::size_t>(height) +
                       static_cast<std::size_t>(r)) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(col)];
    }
};

// One channel per class, 1 exactly where the mask carries that label.
inline OneHotGrid encode_one_hot(const LabelMask& mask, const ClassSet& classes) {
    classes.validate();
    OneHotGrid grid(classes.count, mask.height, mask.width);
    const std::size_t plane = static_cast<std::size_t>(mask.height) * static_cast<std::size_t>(mask.width);
    for (std::size_t i = 0; i < plane; ++i) {
        const std::uint8_t label = mask.labels[i];
        if (label >= classes.count)
            throw data_error("encode_one_hot: label " + std::to_string(label) +
                             " out of range for " + std::to_string(classes.count) + " classes");
        grid.values[static_cast<std::size_t>(label) * plane + i] = 1.0f;
    }
    return grid;
}

// Per-pixel argmax over channels; ties break toward the lowest class index.
inline LabelMask decode_argmax(const OneHotGrid& grid) {
    if (grid.channels < 1)
        throw data_error("decode_argmax: grid has no channels");
    LabelMask mask(grid.height, grid.width);
    const std::size_t plane = static_cast<std::size_t>(grid.height) * static_cast<std::size_t>(grid.width);
    for (std::size_t i = 0; i < plane; ++i) {
        int best = 0;
        float best_value = grid.values[i];
        for (int c = 1; c < grid.channels; ++c) {
            const float v = grid.values[static_cast<std::size_t>(c) * plane + i];
            if (v > best_value) {
                best_value = v;
                best = c;
            }
        }
        mask.labels[i] = static_cast<std::uint8_t>(best);
    }
    return mask;
}

// Place the mask in the middle of a target-sized background grid: smaller
// inputs are zero-padded centered, larger ones center-cropped. Odd remainders
// go to the bottom/right (floor on the leading offset).
inline LabelMask center_fit(const LabelMask& mask, int target_h = 256, int target_w = 256) {
    LabelMask out(target_h, target_w);
    out.spacing_row = mask.spacing_row;
    out.spacing_col = mask.spacing_col;

    const int copy_h = std::min(mask.height, target_h);
    const int copy_w = std::min(mask.width, target_w);
    const int src_r0 = mask.height > target_h ? (mask.height - target_h) / 2 : 0;
    const int src_c0 = mask.width > target_w ? (mask.width - target_w) / 2 : 0;
    const int dst_r0 = mask.height < target_h ? (target_h - mask.height) / 2 : 0;
    const int dst_c0 = mask.width < target_w ? (target_w - mask.width) / 2 : 0;

    for (int r = 0; r < copy_h; ++r)
        for (int c = 0; c < copy_w; ++c)
            out.at(dst_r0 + r, dst_c0 + c) = mask.at(src_r0 + r, src_c0 + c);
    return out;
}

} // namespace segqc

#endif
