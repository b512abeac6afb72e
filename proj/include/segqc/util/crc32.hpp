#ifndef SEGQC_UTIL_CRC32_HPP
#define SEGQC_UTIL_CRC32_HPP

#include <array>
#include <cstddef>
#include <cstdint>

namespace segqc {

namespace detail {

inline const std::array<std::uint32_t, 256>& crc32_table() {
    static const std::array<std::uint32_t, 256> table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k)
                c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : (c >> 1);
            t[i] = c;
        }
        return t;
    }();
    return table;
}

} // namespace detail

// Streaming CRC-32 (IEEE 802.3 polynomial), used for checkpoint trailers.
class Crc32 {
public:
    void update(const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        const auto& table = detail::crc32_table();
        for (std::size_t i = 0; i < len; ++i)
            state_ = table[(state_ ^ p[i]) & 0xFFu] ^ (state_ >> 8);
    }

    std::uint32_t value() const { return state_ ^ 0xFFFFFFFFu; }

private:
    std::uint32_t state_ = 0xFFFFFFFFu;
};

inline std::uint32_t crc32(const void* data, std::size_t len) {
    Crc32 c;
    c.update(data, len);
    return c.value();
}

} // namespace segqc

#endif
