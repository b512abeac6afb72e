#ifndef SEGQC_DATA_SYNTH_HPP
#define SEGQC_DATA_SYNTH_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "segqc/mask.hpp"
#include "segqc/util/errors.hpp"
#include "segqc/util/rng.hpp"

namespace segqc::data {

// Desk-scale stand-in for curated cardiac ground truth: an LV disk, a MYO
// annulus directly around it, and an RV crescent hugging the ring from the
// side. Geometry is randomized per mask, reproducible per seed, and all
// three foreground classes are always present.
inline std::vector<LabelMask> synth_generate(int n, int size, std::uint64_t seed) {
    if (size < 32)
        throw data_error("synth_generate: size " + std::to_string(size) +
                         " too small to fit the structures (minimum 32)");
    if (n < 1)
        throw data_error("synth_generate: need a positive mask count");

    Rng rng(seed);
    std::vector<LabelMask> masks;
    masks.reserve(static_cast<std::size_t>(n));
    const double s = static_cast<double>(size);

    for (int i = 0; i < n; ++i) {
        const double r_lv = rng.uniform(0.08 * s, 0.14 * s);
        const double thickness = std::max(2.0, rng.uniform(0.035 * s, 0.06 * s));
        const double ring = r_lv + thickness;
        const double r_rv = rng.uniform(0.9 * ring, 1.15 * ring);
        const double center_gap = ring + 1.0; // RV center sits just off the ring

        const int margin_left = static_cast<int>(std::ceil(center_gap + r_rv)) + 1;
        const int margin_right = static_cast<int>(std::ceil(ring)) + 1;
        const int margin_vert = static_cast<int>(std::ceil(std::max(ring, r_rv))) + 1;
        if (margin_left + margin_right >= size - 2 || 2 * margin_vert >= size - 2)
            throw data_error("synth_generate: size too small for drawn geometry");

        const int cy = static_cast<int>(rng.uniform_int(margin_vert, size - 1 - margin_vert));
        const int cx = static_cast<int>(rng.uniform_int(margin_left, size - 1 - margin_right));
        const double rv_cy = cy + rng.uniform(-0.15 * ring, 0.15 * ring);
        const double rv_cx = cx - center_gap;

        LabelMask mask(size, size);
        for (int r = 0; r < size; ++r) {
            for (int c = 0; c < size; ++c) {
                const double d_lv = std::hypot(r - cy, c - cx);
                if (d_lv <= r_lv) {
                    mask.at(r, c) = 3; // LV
                } else if (d_lv <= ring) {
                    mask.at(r, c) = 2; // MYO
                } else if (std::hypot(r - rv_cy, c - rv_cx) <= r_rv) {
                    mask.at(r, c) = 1; // RV crescent: the disk clipped by the ring
                }
            }
        }

        for (int cls : {1, 2, 3}) {
            bool present = false;
            for (std::uint8_t v : mask.labels)
                if (v == cls) { present = true; break; }
            if (!present)
                throw data_error("synth_generate: class " + std::to_string(cls) +
                                 " missing from generated mask");
        }
        masks.push_back(std::move(mask));
    }
    return masks;
}

// Severity-parameterized deterministic corruptions standing in for the error
// modes of real segmentation models. Severity 0 is the identity for every
// kind.
enum class CorruptionKind { drop_structure, erode, dilate, punch_holes, swap_labels, random_blobs };

inline const char* corruption_kind_name(CorruptionKind k) {
    switch (k) {
        case CorruptionKind::drop_structure: return "drop_structure";
        case CorruptionKind::erode: return "erode";
        case CorruptionKind::dilate: return "dilate";
        case CorruptionKind::punch_holes: return "punch_holes";
        case CorruptionKind::swap_labels: return "swap_labels";
        case CorruptionKind::random_blobs: return "random_blobs";
    }
    return "?";
}

inline CorruptionKind corruption_kind_from_name(const std::string& name) {
    if (name == "drop_structure") return CorruptionKind::drop_structure;
    if (name == "erode") return CorruptionKind::erode;
    if (name == "dilate") return CorruptionKind::dilate;
    if (name == "punch_holes") return CorruptionKind::punch_holes;
    if (name == "swap_labels") return CorruptionKind::swap_labels;
    if (name == "random_blobs") return CorruptionKind::random_blobs;
    throw data_error("unknown corruption kind: " + name);
}

struct CorruptionSpec {
    CorruptionKind kind = CorruptionKind::erode;
    int severity = 0;
    int target_class = 3;
    std::uint64_t seed = 0;
};

inline nlohmann::json corruption_to_json(const CorruptionSpec& spec) {
    return {{"kind", corruption_kind_name(spec.kind)},
            {"severity", spec.severity},
            {"target_class", spec.target_class},
            {"seed", spec.seed}};
}

inline CorruptionSpec corruption_from_json(const nlohmann::json& j) {
    CorruptionSpec spec;
    spec.kind = corruption_kind_from_name(j.at("kind").get<std::string>());
    spec.severity = j.at("severity").get<int>();
    spec.target_class = j.at("target_class").get<int>();
    spec.seed = j.value("seed", std::uint64_t(0));
    if (spec.severity < 0)
        throw data_error("corruption severity must be >= 0");
    return spec;
}

namespace detail {

inline bool has_4_neighbor(const LabelMask& m, int r, int c, std::uint8_t cls) {
    return (r > 0 && m.at(r - 1, c) == cls) || (r + 1 < m.height && m.at(r + 1, c) == cls) ||
           (c > 0 && m.at(r, c - 1) == cls) || (c + 1 < m.width && m.at(r, c + 1) == cls);
}

inline bool touches_border_or_other(const LabelMask& m, int r, int c, std::uint8_t cls) {
    if (r == 0 || c == 0 || r == m.height - 1 || c == m.width - 1)
        return true;
    return m.at(r - 1, c) != cls || m.at(r + 1, c) != cls || m.at(r, c - 1) != cls ||
           m.at(r, c + 1) != cls;
}

inline void stamp_disk(LabelMask& m, double cy, double cx, double radius, std::uint8_t value,
                       int only_over = -1) {
    const int r0 = std::max(0, static_cast<int>(std::floor(cy - radius)));
    const int r1 = std::min(m.height - 1, static_cast<int>(std::ceil(cy + radius)));
    const int c0 = std::max(0, static_cast<int>(std::floor(cx - radius)));
    const int c1 = std::min(m.width - 1, static_cast<int>(std::ceil(cx + radius)));
    for (int r = r0; r <= r1; ++r)
        for (int c = c0; c <= c1; ++c)
            if (std::hypot(r - cy, c - cx) <= radius &&
                (only_over < 0 || m.at(r, c) == only_over))
                m.at(r, c) = value;
}

} // namespace detail

inline LabelMask corrupt(const LabelMask& mask, const CorruptionSpec& spec,
                         const ClassSet& classes = ClassSet::cardiac()) {
    if (spec.severity < 0)
        throw data_error("corrupt: negative severity");
    LabelMask out = mask;
    if (spec.severity == 0)
        return out;
    const std::uint8_t target = static_cast<std::uint8_t>(spec.target_class);

    switch (spec.kind) {
        case CorruptionKind::drop_structure: {
            for (std::uint8_t& v : out.labels)
                if (v == target) v = 0;
            break;
        }
        case CorruptionKind::erode: {
            for (int round = 0; round < spec.severity; ++round) {
                const LabelMask prev = out;
                for (int r = 0; r < prev.height; ++r)
                    for (int c = 0; c < prev.width; ++c)
                        if (prev.at(r, c) == target &&
                            detail::touches_border_or_other(prev, r, c, target))
                            out.at(r, c) = 0;
            }
            break;
        }
        case CorruptionKind::dilate: {
            for (int round = 0; round < spec.severity; ++round) {
                const LabelMask prev = out;
                for (int r = 0; r < prev.height; ++r)
                    for (int c = 0; c < prev.width; ++c)
                        if (prev.at(r, c) != target && detail::has_4_neighbor(prev, r, c, target))
                            out.at(r, c) = target;
            }
            break;
        }
        case CorruptionKind::punch_holes: {
            Rng rng(spec.seed);
            std::vector<std::size_t> pixels;
            for (std::size_t i = 0; i < out.size(); ++i)
                if (out.labels[i] == target) pixels.push_back(i);
            if (pixels.empty()) break;
            const double radius = 1.0 + static_cast<double>(spec.severity) / 4.0;
            for (int hole = 0; hole < spec.severity; ++hole) {
                const std::size_t p = pixels[rng.uniform_below(pixels.size())];
                const int r = static_cast<int>(p / static_cast<std::size_t>(out.width));
                const int c = static_cast<int>(p % static_cast<std::size_t>(out.width));
                detail::stamp_disk(out, r, c, radius, 0, target);
            }
            break;
        }
        case CorruptionKind::swap_labels: {
            const int foreground = classes.count - 1;
            const std::uint8_t other = static_cast<std::uint8_t>(
                (spec.target_class - 1 + spec.severity) % foreground + 1);
            if (other == target) break;
            for (std::uint8_t& v : out.labels) {
                if (v == target) v = other;
                else if (v == other) v = target;
            }
            break;
        }
        case CorruptionKind::random_blobs: {
            Rng rng(spec.seed);
            for (int blob = 0; blob < spec.severity; ++blob) {
                const double radius = rng.uniform(1.0, 2.0 + static_cast<double>(spec.severity) / 3.0);
                const double cy = rng.uniform(0.0, static_cast<double>(out.height - 1));
                const double cx = rng.uniform(0.0, static_cast<double>(out.width - 1));
                detail::stamp_disk(out, cy, cx, radius, target);
            }
            break;
        }
    }
    return out;
}

} // namespace segqc::data

#endif
