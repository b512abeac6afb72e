#ifndef SEGQC_UTIL_FILEIO_HPP
#define SEGQC_UTIL_FILEIO_HPP

#include <filesystem>
#include <fstream>
#include <string>

#include "segqc/util/errors.hpp"

namespace segqc {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open file: " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return data;
}

// Write via a temporary file in the same directory, then rename. Readers
// never observe a partially written file.
inline void atomic_write_file(const std::filesystem::path& path, const std::string& data) {
    namespace fs = std::filesystem;
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw io_error("cannot open file for writing: " + tmp.string());
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        if (!out)
            throw io_error("short write: " + tmp.string());
    }
    fs::rename(tmp, path);
}

} // namespace segqc

#endif
