#ifndef SEGQC_MONITOR_RECORDS_HPP
#define SEGQC_MONITOR_RECORDS_HPP

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "segqc/metrics/scores.hpp"
#include "segqc/util/errors.hpp"
#include "segqc/util/fileio.hpp"

namespace segqc::monitor {

enum class AlertFlag { ok, suspicious, erroneous };

inline const char* alert_flag_name(AlertFlag f) {
    switch (f) {
        case AlertFlag::ok: return "ok";
        case AlertFlag::suspicious: return "suspicious";
        case AlertFlag::erroneous: return "erroneous";
    }
    return "?";
}

inline AlertFlag alert_flag_from_name(const std::string& name) {
    if (name == "ok") return AlertFlag::ok;
    if (name == "suspicious") return AlertFlag::suspicious;
    if (name == "erroneous") return AlertFlag::erroneous;
    throw data_error("unknown alert flag: " + name);
}

// One scored case: per-structure pDSC/pHD plus the alert flag derived from
// them. Serialized as JSON-lines, one record per line.
struct QualityRecord {
    std::string case_id;
    std::string model_id;
    std::string phase; // ED or ES
    std::vector<metrics::StructureScore> scores;
    AlertFlag flag = AlertFlag::ok;
};

constexpr int kRecordSchemaVersion = 1;

inline nlohmann::json record_to_json(const QualityRecord& r,
                                     const ClassSet& classes = ClassSet::cardiac()) {
    nlohmann::json scores = nlohmann::json::array();
    for (const metrics::StructureScore& s : r.scores) {
        scores.push_back({{"class", s.class_index},
                          {"structure", classes.name(s.class_index)},
                          {"dsc", s.dsc},
                          {"hd_mm", s.hd_mm},
                          {"empty_pred", s.empty_pred},
                          {"empty_ref", s.empty_ref}});
    }
    return {{"schema_version", kRecordSchemaVersion},
            {"case_id", r.case_id},
            {"model_id", r.model_id},
            {"phase", r.phase},
            {"scores", scores},
            {"flag", alert_flag_name(r.flag)}};
}

inline QualityRecord record_from_json(const nlohmann::json& j) {
    const int version = j.at("schema_version").get<int>();
    if (version != kRecordSchemaVersion)
        throw data_error("record schema version " + std::to_string(version) + " not supported");
    QualityRecord r;
    r.case_id = j.at("case_id").get<std::string>();
    r.model_id = j.at("model_id").get<std::string>();
    r.phase = j.at("phase").get<std::string>();
    for (const auto& s : j.at("scores")) {
        metrics::StructureScore score;
        score.class_index = s.at("class").get<int>();
        score.dsc = s.at("dsc").get<double>();
        score.hd_mm = s.at("hd_mm").get<double>();
        score.empty_pred = s.value("empty_pred", false);
        score.empty_ref = s.value("empty_ref", false);
        r.scores.push_back(score);
    }
    r.flag = alert_flag_from_name(j.at("flag").get<std::string>());
    return r;
}

inline void write_records(const std::vector<QualityRecord>& records,
                          const std::filesystem::path& path,
                          const ClassSet& classes = ClassSet::cardiac()) {
    std::ostringstream out;
    for (const QualityRecord& r : records)
        out << record_to_json(r, classes).dump() << "\n";
    atomic_write_file(path, out.str());
}

inline std::vector<QualityRecord> read_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open records file: " + path.string());
    std::vector<QualityRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            records.push_back(record_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw data_error("bad record at " + path.string() + ":" + std::to_string(line_no) +
                             ": " + e.what());
        }
    }
    return records;
}

} // namespace segqc::monitor

#endif
