#ifndef SEGQC_UTIL_ERRORS_HPP
#define SEGQC_UTIL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace segqc {

// Invalid configuration: inconsistent architecture rows, bad split ratios,
// shape mismatches between specs and tensors.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid data: out-of-range labels, dimension/spacing mismatches between
// masks, malformed records, join/coverage failures.
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

// File-level failures: missing paths, bad magic bytes, truncated payloads,
// checksum mismatches, unparseable manifests.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace segqc

#endif
