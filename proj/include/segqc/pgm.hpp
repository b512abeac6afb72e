#ifndef SEGQC_PGM_HPP
#define SEGQC_PGM_HPP

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <string>

#include "segqc/mask.hpp"
#include "segqc/util/errors.hpp"
#include "segqc/util/fileio.hpp"

namespace segqc {

// Masks on disk are 8-bit binary PGM (P5), pixel value = class index.
// Spacing travels in the dataset manifest, not in the image file.

namespace detail {

inline void pgm_skip_space(const std::string& s, std::size_t& pos) {
    while (pos < s.size()) {
        if (std::isspace(static_cast<unsigned char>(s[pos]))) {
            ++pos;
        } else if (s[pos] == '#') {
            while (pos < s.size() && s[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
}

inline long pgm_read_int(const std::string& s, std::size_t& pos, const std::string& path) {
    pgm_skip_space(s, pos);
    if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
        throw io_error("malformed PGM header: " + path);
    long v = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
        v = v * 10 + (s[pos] - '0');
        ++pos;
    }
    return v;
}

} // namespace detail

inline LabelMask read_pgm(const std::filesystem::path& path) {
    const std::string data = read_file(path);
    if (data.size() < 2 || data[0] != 'P' || data[1] != '5')
        throw io_error("not a binary PGM (P5) file: " + path.string());
    std::size_t pos = 2;
    const long width = detail::pgm_read_int(data, pos, path.string());
    const long height = detail::pgm_read_int(data, pos, path.string());
    const long maxval = detail::pgm_read_int(data, pos, path.string());
    if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255)
        throw io_error("unsupported PGM geometry in " + path.string());
    if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos])))
        throw io_error("malformed PGM header: " + path.string());
    ++pos; // single whitespace byte separates header from pixels

    const std::size_t pixel_count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (data.size() - pos < pixel_count)
        throw io_error("truncated PGM payload: " + path.string());

    LabelMask mask(static_cast<int>(height), static_cast<int>(width));
    for (std::size_t i = 0; i < pixel_count; ++i)
        mask.labels[i] = static_cast<std::uint8_t>(data[pos + i]);
    return mask;
}

inline void write_pgm(const LabelMask& mask, const std::filesystem::path& path) {
    std::string out = "P5\n" + std::to_string(mask.width) + " " + std::to_string(mask.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(mask.labels.data()), mask.labels.size());
    atomic_write_file(path, out);
}

// Inconsistency maps export as 0/255 so the disagreement is visible in any
// image viewer.
inline void write_pgm_binary(const std::vector<std::uint8_t>& grid, int height, int width,
                             const std::filesystem::path& path) {
    std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    out.reserve(out.size() + grid.size());
    for (std::uint8_t v : grid)
        out.push_back(v ? static_cast<char>(255) : static_cast<char>(0));
    atomic_write_file(path, out);
}

} // namespace segqc

#endif
