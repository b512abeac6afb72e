#ifndef SEGQC_METRICS_DISTANCE_TRANSFORM_HPP
#define SEGQC_METRICS_DISTANCE_TRANSFORM_HPP

#include <cstdint>
#include <limits>
#include <vector>

#include "segqc/util/errors.hpp"

namespace segqc::metrics {

// Exact anisotropic squared Euclidean distance transform, two passes.
//
// Pass 1 walks each column and records the integer row distance to the
// nearest feature pixel in that column. Pass 2 scans columns outward from
// each pixel and minimizes (sr*rows)^2 + (sc*cols)^2, pruning once the
// column term alone exceeds the best candidate. Every candidate is evaluated
// with the same floating-point expression a brute-force pairwise scan would
// use, so the result matches it exactly, not only to rounding.
//
// Pixels with no feature anywhere get +infinity.
inline std::vector<double> squared_distance_transform(const std::vector<std::uint8_t>& feature,
                                                      int height, int width, double spacing_row,
                                                      double spacing_col) {
    if (spacing_row <= 0.0 || spacing_col <= 0.0)
        throw data_error("distance transform: spacing must be positive");
    const double inf = std::numeric_limits<double>::infinity();
    const int no_feature = std::numeric_limits<int>::max();

    // Row distance to the nearest feature within the same column.
    std::vector<int> vertical(static_cast<std::size_t>(height) * width, no_feature);
    for (int c = 0; c < width; ++c) {
        int last = no_feature;
        for (int r = 0; r < height; ++r) {
            if (feature[static_cast<std::size_t>(r) * width + c])
                last = r;
            if (last != no_feature)
                vertical[static_cast<std::size_t>(r) * width + c] = r - last;
        }
        last = no_feature;
        for (int r = height - 1; r >= 0; --r) {
            if (feature[static_cast<std::size_t>(r) * width + c])
                last = r;
            if (last != no_feature) {
                const std::size_t i = static_cast<std::size_t>(r) * width + c;
                vertical[i] = std::min(vertical[i], last - r);
            }
        }
    }

    std::vector<double> out(static_cast<std::size_t>(height) * width, inf);
    for (int r = 0; r < height; ++r) {
        const int* vrow = &vertical[static_cast<std::size_t>(r) * width];
        double* orow = &out[static_cast<std::size_t>(r) * width];
        for (int c = 0; c < width; ++c) {
            double best = inf;
            for (int dc = 0; dc < width; ++dc) {
                const double col_term = (spacing_col * dc) * (spacing_col * dc);
                if (col_term >= best)
                    break;
                for (const int cc : {c - dc, c + dc}) {
                    if (cc < 0 || cc >= width)
                        continue;
                    const int g = vrow[cc];
                    if (g == no_feature)
                        continue;
                    const double cand = (spacing_row * g) * (spacing_row * g) + col_term;
                    if (cand < best)
                        best = cand;
                    if (dc == 0)
                        break; // c-0 and c+0 are the same column
                }
            }
            orow[c] = best;
        }
    }
    return out;
}

} // namespace segqc::metrics

#endif
