#ifndef SEGQC_METRICS_SCORES_HPP
#define SEGQC_METRICS_SCORES_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "segqc/mask.hpp"
#include "segqc/metrics/distance_transform.hpp"
#include "segqc/util/errors.hpp"

namespace segqc::metrics {

// Scalar surrogate scores for one anatomical structure. The empty-set
// convention produces exactly (dsc, hd) = (0, 0) when the structure is
// missing from either mask; downstream flagging treats that pair as the
// erroneous-segmentation alert.
struct StructureScore {
    int class_index = 0;
    double dsc = 0.0;
    double hd_mm = 0.0;
    bool empty_pred = false;
    bool empty_ref = false;
};

// Pixel-wise disagreement between a mask and its pseudo ground truth.
struct InconsistencyMap {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> grid; // 1 where labels differ
    std::size_t count = 0;
};

namespace detail {

inline void require_same_grid(const LabelMask& a, const LabelMask& b, const char* where) {
    if (!a.same_grid(b))
        throw data_error(std::string(where) + ": mask dimensions differ (" +
                         std::to_string(a.height) + "x" + std::to_string(a.width) + " vs " +
                         std::to_string(b.height) + "x" + std::to_string(b.width) + ")");
}

inline std::vector<std::uint8_t> class_grid(const LabelMask& m, int cls, std::size_t& count) {
    std::vector<std::uint8_t> grid(m.size(), 0);
    count = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.labels[i] == cls) {
            grid[i] = 1;
            ++count;
        }
    }
    return grid;
}

} // namespace detail

// Dice overlap 2|A n B| / (|A| + |B|) of one class's pixel sets; 0 when
// either set is empty.
inline double dsc(const LabelMask& a, const LabelMask& b, int cls) {
    detail::require_same_grid(a, b, "dsc");
    std::size_t count_a = 0, count_b = 0, inter = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool in_a = a.labels[i] == cls;
        const bool in_b = b.labels[i] == cls;
        count_a += in_a;
        count_b += in_b;
        inter += in_a && in_b;
    }
    if (count_a == 0 || count_b == 0)
        return 0.0;
    return 2.0 * static_cast<double>(inter) / static_cast<double>(count_a + count_b);
}

// Hausdorff distance in millimetres over the full per-class pixel sets:
// max of the two directed farthest-nearest-point distances, each computed
// through the exact squared distance transform; the square root is taken
// once at the end. Either set empty yields 0.
inline double hausdorff(const LabelMask& a, const LabelMask& b, int cls) {
    detail::require_same_grid(a, b, "hausdorff");
    if (a.spacing_row != b.spacing_row || a.spacing_col != b.spacing_col)
        throw data_error("hausdorff: mask spacings differ");
    std::size_t count_a = 0, count_b = 0;
    const std::vector<std::uint8_t> set_a = detail::class_grid(a, cls, count_a);
    const std::vector<std::uint8_t> set_b = detail::class_grid(b, cls, count_b);
    if (count_a == 0 || count_b == 0)
        return 0.0;

    const std::vector<double> dist_to_b =
        squared_distance_transform(set_b, a.height, a.width, a.spacing_row, a.spacing_col);
    const std::vector<double> dist_to_a =
        squared_distance_transform(set_a, a.height, a.width, a.spacing_row, a.spacing_col);

    double max_sq = 0.0;
    for (std::size_t i = 0; i < set_a.size(); ++i) {
        if (set_a[i] && dist_to_b[i] > max_sq) max_sq = dist_to_b[i];
        if (set_b[i] && dist_to_a[i] > max_sq) max_sq = dist_to_a[i];
    }
    return std::sqrt(max_sq);
}

// Per foreground class: pDSC and pHD of the prediction against its pseudo
// ground truth. Both masks must live in the same normalized frame.
inline std::vector<StructureScore> pseudo_scores(const LabelMask& pred, const LabelMask& pgt,
                                                 const ClassSet& classes) {
    detail::require_same_grid(pred, pgt, "pseudo_scores");
    std::vector<StructureScore> scores;
    scores.reserve(static_cast<std::size_t>(classes.count) - 1);
    for (int cls = 1; cls < classes.count; ++cls) {
        StructureScore s;
        s.class_index = cls;
        std::size_t count_pred = 0, count_ref = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            count_pred += pred.labels[i] == cls;
            count_ref += pgt.labels[i] == cls;
        }
        s.empty_pred = count_pred == 0;
        s.empty_ref = count_ref == 0;
        if (!s.empty_pred && !s.empty_ref) {
            s.dsc = dsc(pred, pgt, cls);
            s.hd_mm = hausdorff(pred, pgt, cls);
        }
        scores.push_back(s);
    }
    return scores;
}

// Pixel-wise XOR of the label grids; count is their Hamming distance.
inline InconsistencyMap xor_map(const LabelMask& pred, const LabelMask& pgt) {
    detail::require_same_grid(pred, pgt, "xor_map");
    InconsistencyMap map;
    map.height = pred.height;
    map.width = pred.width;
    map.grid.assign(pred.size(), 0);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred.labels[i] != pgt.labels[i]) {
            map.grid[i] = 1;
            ++map.count;
        }
    }
    return map;
}

} // namespace segqc::metrics

#endif
