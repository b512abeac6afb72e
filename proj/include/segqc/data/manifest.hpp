#ifndef SEGQC_DATA_MANIFEST_HPP
#define SEGQC_DATA_MANIFEST_HPP

#include <filesystem>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "segqc/mask.hpp"
#include "segqc/util/errors.hpp"
#include "segqc/util/fileio.hpp"

namespace segqc::data {

// One dataset entry: a mask on disk plus the metadata the pipeline needs.
struct ManifestEntry {
    std::string case_id;
    std::string phase; // ED or ES
    std::string mask_path;
    double spacing_row = 1.0;
    double spacing_col = 1.0;
    std::string model_id;        // optional: which segmentation model produced the mask
    std::string reference_path;  // optional: per-case reference scores CSV
};

struct Manifest {
    int schema_version = 1;
    std::vector<std::string> class_names = ClassSet::cardiac().names;
    std::vector<ManifestEntry> entries;

    void validate() const {
        std::set<std::tuple<std::string, std::string, std::string>> seen;
        for (const ManifestEntry& e : entries) {
            if (e.spacing_row <= 0.0 || e.spacing_col <= 0.0)
                throw data_error("manifest: non-positive spacing for case " + e.case_id);
            if (!seen.insert({e.case_id, e.phase, e.model_id}).second)
                throw data_error("manifest: duplicate entry for (" + e.case_id + ", " + e.phase +
                                 ", " + e.model_id + ")");
        }
    }

    ClassSet classes() const {
        ClassSet c;
        c.count = static_cast<int>(class_names.size());
        c.names = class_names;
        c.validate();
        return c;
    }
};

inline nlohmann::json manifest_to_json(const Manifest& m) {
    nlohmann::json entries = nlohmann::json::array();
    for (const ManifestEntry& e : m.entries) {
        nlohmann::json j = {{"case_id", e.case_id},
                            {"phase", e.phase},
                            {"mask", e.mask_path},
                            {"spacing", {e.spacing_row, e.spacing_col}}};
        if (!e.model_id.empty()) j["model_id"] = e.model_id;
        if (!e.reference_path.empty()) j["reference_scores"] = e.reference_path;
        entries.push_back(std::move(j));
    }
    return {{"schema_version", m.schema_version},
            {"class_names", m.class_names},
            {"entries", entries}};
}

inline Manifest manifest_from_json(const nlohmann::json& j) {
    Manifest m;
    m.schema_version = j.at("schema_version").get<int>();
    if (m.schema_version != 1)
        throw data_error("manifest schema version " + std::to_string(m.schema_version) +
                         " not supported");
    m.class_names = j.at("class_names").get<std::vector<std::string>>();
    for (const auto& je : j.at("entries")) {
        ManifestEntry e;
        e.case_id = je.at("case_id").get<std::string>();
        e.phase = je.at("phase").get<std::string>();
        e.mask_path = je.at("mask").get<std::string>();
        const auto spacing = je.at("spacing");
        e.spacing_row = spacing.at(0).get<double>();
        e.spacing_col = spacing.at(1).get<double>();
        e.model_id = je.value("model_id", "");
        e.reference_path = je.value("reference_scores", "");
        m.entries.push_back(std::move(e));
    }
    m.validate();
    return m;
}

inline void save_manifest(const Manifest& m, const std::filesystem::path& path) {
    m.validate();
    atomic_write_file(path, manifest_to_json(m).dump(2) + "\n");
}

inline Manifest load_manifest(const std::filesystem::path& path) {
    try {
        return manifest_from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw io_error("manifest unparseable at " + path.string() + ": " + e.what());
    }
}

// Mask paths are stored relative to the manifest file.
inline std::filesystem::path resolve_path(const std::filesystem::path& manifest_path,
                                          const std::string& relative) {
    const std::filesystem::path p(relative);
    if (p.is_absolute()) return p;
    return manifest_path.parent_path() / p;
}

} // namespace segqc::data

#endif
